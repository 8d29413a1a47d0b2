#!/usr/bin/env python
# -*- coding: utf-8 -*-

import json

import pytest

import main
from errors import NumericalError
from orchestrator import Orchestrator, SimpleScheduler, Task


@pytest.fixture
def workspace(tmp_path, monkeypatch):
    monkeypatch.setenv('CIPRECODE_OUTPUT_DIR', str(tmp_path / 'results'))
    monkeypatch.setenv('CIPRECODE_LOG_DIR', str(tmp_path / 'logs'))
    config = tmp_path / 'small.json'
    config.write_text(json.dumps({
        'scenario': 'small', 'pipeline': 'power_vs_channel', 'zeta_db': 4.7712, 'phis_deg': [22.5],
        'channel_power_db': [0.0, 5.0], 'trials': 3, 'phi_step_deg': 7.5,
    }))
    return tmp_path, str(config)


def test_scheduler_runs_dependencies_first():
    calls = []
    scheduler = SimpleScheduler()
    scheduler.add_task(Task('a', lambda: calls.append('a') or 1))
    scheduler.add_task(Task('b', lambda a: calls.append('b') or a + 1, ['a']))
    scheduler.add_task(Task('c', lambda a, b: a + b, ['a', 'b']))
    assert scheduler.run('c') == 3
    assert calls == ['a', 'b']
    with pytest.raises(ValueError):
        scheduler.run('missing')


def test_run_is_byte_identical(workspace):
    tmp_path, config = workspace
    first, second = tmp_path / 'first.csv', tmp_path / 'second.csv'
    assert main.main(['run', '--config', config, '--seed', '5', '--trials', '1', '--out', str(first), '--quiet']) == 0
    assert main.main(['run', '--config', config, '--seed', '5', '--trials', '1', '--out', str(second), '--quiet',
                      '--threads', '2']) == 0
    assert first.read_bytes() == second.read_bytes()
    text = first.read_text()
    assert text.startswith('# scenario: small\n# seed: 5\n')
    assert 'timestamp' not in text


def test_orchestrator_tasks(workspace, mock_config):
    tmp_path, config = workspace
    orchestrator = Orchestrator(mock_config, progress=False)
    table, path = orchestrator.run_scenario(config_path=config, out=str(tmp_path / 'o.csv'), stamp=True, trials=2)
    assert table.metadata['trials'] == 2
    assert table.metadata['validation_results']['validation_errors'] == []
    assert all(task.completed for task in orchestrator.scheduler.tasks.values())
    with open(path) as handle:
        assert '# timestamp:' in handle.read()


def test_exit_codes(workspace, monkeypatch, capsys):
    _, config = workspace
    assert main.main(['run', '--scenario', 'nope', '--quiet']) == main.EXIT_CONFIG
    assert main.main(['run', '--config', config, '--trials', '0', '--quiet']) == main.EXIT_CONFIG

    def fail(*args, **kwargs):
        raise NumericalError('boom')

    monkeypatch.setattr(Orchestrator, 'run_scenario', fail)
    assert main.main(['run', '--config', config, '--quiet']) == main.EXIT_NUMERICAL
    assert 'boom' in capsys.readouterr().err


def test_listing_commands(workspace, capsys):
    assert main.main(['list-scenarios']) == 0
    assert 'fig8' in capsys.readouterr().out
    assert main.main(['show-scenario', '--scenario', 'table2']) == 0
    shown = json.loads(capsys.readouterr().out)
    assert shown['zeta_db'] == 4.712
    with pytest.raises(SystemExit):
        main.main(['run'])
