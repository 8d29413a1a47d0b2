#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Scenario pipelines: Monte-Carlo runs over channel and symbol draws that
produce the result tables of the built-in experiments.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime

import numpy as np
from tqdm import tqdm

from analysis.bounds import genie_bound, multicast_rank1_bound
from analysis.energy import DrawSettings, PhiStarSearch, effective_rate
from analysis.ser import conditional_ser, count_errors, simulate_until
from errors import CIPrecodeError, InfeasibleError
from loaders.result_table import ResultTable
from precoders.baselines import matched_filter_baseline, mrt_baseline, scale_to_budget, zf_baseline
from precoders.fixed_phase import FixedPhaseSolver, TargetSpec
from precoders.maxmin import MaxMinSpec, cimm, cimmr
from precoders.relaxed import cipmr_per_user, margin_sweep
from signals.channel_model import RngStream, draw_channel
from signals.constellation import Constellation, SymbolFrame, draw_frame
from signals.units import db_to_linear
from validators.solution_validator import SolutionValidator

logger = logging.getLogger(__name__)


def _tag(phi_deg):
    return f"{phi_deg:g}deg"


class ScenarioRunner:
    """Runs scenario pipelines and collects their result tables."""

    def __init__(self, config, progress=True):
        """
        Initialize the scenario runner.

        Args:
            config (Config): Configuration object
            progress (bool): Show progress bars
        """
        self.config = config
        self.threads = config.threads
        self.progress = progress
        self.validator = SolutionValidator(config)
        self.pipelines = {
            'power_vs_channel': self._power_vs_channel,
            'received_constellation': self._received_constellation,
            'ser_vs_power': self._ser_vs_power,
            'rate_vs_channel': self._rate_vs_channel,
            'ee_vs_channel': self._ee_vs_channel,
            'ee_vs_target': self._ee_vs_target,
            'ee_vs_phi': self._ee_vs_phi,
            'modulation_table': self._modulation_table,
        }

    def run(self, scenario):
        """
        Run one scenario.

        Args:
            scenario (ScenarioConfig): Validated configuration

        Returns:
            ResultTable: Averaged results, one row per sweep point
        """
        logger.info(f"Running scenario {scenario.scenario} ({scenario.pipeline}, "
                    f"{scenario.trials} trials, seed {scenario.seed})")
        try:
            table = self.pipelines[scenario.pipeline](scenario)
        except CIPrecodeError as e:
            logger.error(f"Scenario {scenario.scenario} failed: {str(e)}")
            raise
        table.metadata.update(
            seed=scenario.seed,
            version=self.config.version,
            trials=scenario.trials,
            config_digest=scenario.digest(),
            timestamp=datetime.now().isoformat(timespec='seconds'),
        )
        logger.info(f"Scenario {scenario.scenario} produced {len(table)} rows")
        return table

    def _map_trials(self, func, streams, desc):
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            return list(tqdm(pool.map(func, streams), total=len(streams), desc=desc,
                             disable=not self.progress, leave=False))

    def _streams(self, scenario, point):
        base = RngStream(scenario.seed, point)
        return [base.substream(t) for t in range(scenario.trials)]

    def _draw(self, scenario, constellation, channel_power, stream):
        H = draw_channel(scenario.n_users, scenario.n_antennas, channel_power, stream.substream(0))
        if scenario.fixed_symbols is not None:
            frame = SymbolFrame.from_indices(scenario.fixed_symbols, constellation)
        else:
            frame = draw_frame(scenario.n_users, constellation, stream.substream(1))
        return H, frame

    def _relaxed_solutions(self, solver, frame, spec, phis_deg, step):
        """Strict solution plus per-user relaxed solutions for every margin."""
        strict = solver.solve(frame, spec, 0.0)
        if not phis_deg:
            return strict, {}
        relaxed = margin_sweep(solver, frame, spec, np.radians(phis_deg), step)
        return strict, dict(zip(phis_deg, relaxed))

    def _power_vs_channel(self, scenario):
        constellation = Constellation(scenario.psk_orders[0])
        zeta = float(db_to_linear(scenario.zeta_db))
        spec = TargetSpec.strict(zeta, scenario.noise_power)
        step = np.radians(scenario.phi_step_deg)
        relaxed_cols = [f"power_cipmr_{_tag(phi)}" for phi in scenario.phis_deg]
        columns = ['channel_power_db', 'power_multicast', 'power_genie', 'power_cipm'] + relaxed_cols + ['power_zf']
        table = ResultTable(scenario.scenario, columns)

        for point, channel_db in enumerate(scenario.channel_power_db):
            channel_power = float(db_to_linear(channel_db))

            def trial(stream):
                H, frame = self._draw(scenario, constellation, channel_power, stream)
                solver = FixedPhaseSolver(H)
                strict, relaxed = self._relaxed_solutions(solver, frame, spec, scenario.phis_deg, step)
                self.validator.validate(H, frame, strict, spec)
                powers = [
                    multicast_rank1_bound(H, zeta, scenario.noise_power)[0],
                    genie_bound(H, zeta, scenario.noise_power)[0],
                    strict.power,
                ]
                powers += [relaxed[phi].power for phi in scenario.phis_deg]
                powers.append(zf_baseline(H, frame, spec).power)
                return powers

            results = np.array(self._map_trials(trial, self._streams(scenario, point), f"{scenario.scenario} {channel_db:g} dB"))
            table.add_row([channel_db] + results.mean(axis=0).tolist())
        return table

    def _received_constellation(self, scenario):
        constellation = Constellation(scenario.psk_orders[0])
        zeta = float(db_to_linear(scenario.zeta_db))
        phi = float(np.radians(scenario.phis_deg[0]))
        strict_spec = TargetSpec.strict(zeta, scenario.noise_power)
        relaxed_spec = TargetSpec.per_user(zeta, phi, phi, scenario.noise_power)
        step = np.radians(scenario.phi_step_deg)
        columns = ['trial', 'user', 'symbol_index', 'threshold', 'cipm_re', 'cipm_im',
                   'cipmr_re', 'cipmr_im', 'cipmr_offset_deg']
        table = ResultTable(scenario.scenario, columns)
        channel_power = float(db_to_linear(scenario.channel_power_db[0]))

        def trial(stream):
            H, frame = self._draw(scenario, constellation, channel_power, stream)
            strict = FixedPhaseSolver(H).solve(frame, strict_spec, 0.0)
            relaxed = cipmr_per_user(H, frame, relaxed_spec, step)
            self.validator.validate(H, frame, relaxed, relaxed_spec)
            return frame, strict, relaxed

        results = self._map_trials(trial, self._streams(scenario, 0), scenario.scenario)
        threshold = np.sqrt(scenario.noise_power * zeta)
        for t, (frame, strict, relaxed) in enumerate(results):
            for j in range(scenario.n_users):
                table.add_row([t, j, frame.indices[j], threshold,
                               strict.received[j].real, strict.received[j].imag,
                               relaxed.received[j].real, relaxed.received[j].imag,
                               np.degrees(relaxed.phases_chosen[j])])
        return table

    def _ser_vs_power(self, scenario):
        constellation = Constellation(scenario.psk_orders[0])
        weights = scenario.weights or [1.0] * scenario.n_users
        step = np.radians(scenario.phi_step_deg)
        channel_power = float(db_to_linear(scenario.channel_power_db[0]))
        methods = ['cimm'] + [f"cimmr_{_tag(phi)}" for phi in scenario.phis_deg] + ['zf', 'mrt']
        columns = ['budget_db']
        for method in methods:
            columns += [f"ser_{method}", f"ci95_{method}"]
        table = ResultTable(scenario.scenario, columns)

        for point, budget_db in enumerate(scenario.budget_db_sweep):
            budget = float(db_to_linear(budget_db))
            spec = MaxMinSpec(weights, budget, scenario.noise_power)
            unit = TargetSpec.strict(1.0, scenario.noise_power)

            def precoder(method):
                def draw(stream):
                    H, frame = self._draw(scenario, constellation, channel_power, stream)
                    if method == 'cimm':
                        return cimm(H, frame, spec)[1], frame
                    if method == 'zf':
                        return scale_to_budget(zf_baseline(H, frame, unit), budget), frame
                    if method == 'mrt':
                        return scale_to_budget(matched_filter_baseline(H, frame, 1.0), budget), frame
                    phi = float(np.radians(float(method.split('_')[1][:-3])))
                    return cimmr(H, frame, spec, phi, step)[2], frame
                return draw

            def simulate(method):
                return simulate_until(precoder(method), scenario.noise_power, RngStream(scenario.seed, point),
                                      min_errors=scenario.min_errors, max_symbols=scenario.max_symbols,
                                      draws_per_trial=scenario.noise_draws)

            reports = self._map_trials(simulate, methods, f"{scenario.scenario} {budget_db:g} dB")
            row = [budget_db]
            for report in reports:
                row += [report.ser_mc, report.mc_ci95]
            table.add_row(row)
        return table

    def _evaluate_methods(self, scenario, constellation, channel_power, zeta, stream):
        """Per-method (power, per-user SER) of one draw; None marks an MRT outage."""
        H, frame = self._draw(scenario, constellation, channel_power, stream)
        spec = TargetSpec.strict(zeta, scenario.noise_power)
        solver = FixedPhaseSolver(H)
        strict, relaxed = self._relaxed_solutions(solver, frame, spec, scenario.phis_deg,
                                                  np.radians(scenario.phi_step_deg))
        solutions = {'cipm': strict}
        solutions.update({f"cipmr_{_tag(phi)}": relaxed[phi] for phi in scenario.phis_deg})
        solutions['zf'] = zf_baseline(H, frame, spec)
        try:
            solutions['mrt'] = mrt_baseline(H, frame, spec)
        except InfeasibleError:
            solutions['mrt'] = None

        outcome = {}
        for method, solution in solutions.items():
            if solution is None:
                outcome[method] = None
            elif scenario.ser_method == 'quadrature':
                outcome[method] = (solution.power, conditional_ser(solution, frame, scenario.noise_power))
            else:
                errors = count_errors(solution, frame, scenario.noise_power, scenario.noise_draws,
                                      stream.substream(2).generator())
                outcome[method] = (solution.power, errors / float(scenario.noise_draws))
        return outcome

    def _method_names(self, scenario):
        return ['cipm'] + [f"cipmr_{_tag(phi)}" for phi in scenario.phis_deg] + ['zf', 'mrt']

    def _efficiency_rows(self, scenario, sweep, sweep_column, metric):
        constellation = Constellation(scenario.psk_orders[0])
        rate = constellation.bits_per_symbol
        methods = self._method_names(scenario)
        columns = [sweep_column] + [f"{metric}_{method}" for method in methods] + ['mrt_outage']
        table = ResultTable(scenario.scenario, columns)

        for point, (label, channel_power, zeta) in enumerate(sweep):

            def trial(stream):
                return self._evaluate_methods(scenario, constellation, channel_power, zeta, stream)

            outcomes = self._map_trials(trial, self._streams(scenario, point), f"{scenario.scenario} {label:g}")
            row = [label]
            for method in methods:
                values = []
                for outcome in outcomes:
                    if outcome[method] is None:
                        values.append(0.0)
                        continue
                    power, user_ser = outcome[method]
                    rates = effective_rate(rate, user_ser)
                    values.append(float(np.mean(rates)) if metric == 'rate' else float(np.sum(rates)) / power)
                row.append(float(np.mean(values)))
            row.append(float(np.mean([outcome['mrt'] is None for outcome in outcomes])))
            table.add_row(row)
        return table

    def _rate_vs_channel(self, scenario):
        zeta = float(db_to_linear(scenario.zeta_db))
        sweep = [(db, float(db_to_linear(db)), zeta) for db in scenario.channel_power_db]
        return self._efficiency_rows(scenario, sweep, 'channel_power_db', 'rate')

    def _ee_vs_channel(self, scenario):
        zeta = float(db_to_linear(scenario.zeta_db))
        sweep = [(db, float(db_to_linear(db)), zeta) for db in scenario.channel_power_db]
        return self._efficiency_rows(scenario, sweep, 'channel_power_db', 'eta')

    def _ee_vs_target(self, scenario):
        channel_power = float(db_to_linear(scenario.channel_power_db[0]))
        sweep = [(db, channel_power, float(db_to_linear(db))) for db in scenario.zeta_db_sweep]
        return self._efficiency_rows(scenario, sweep, 'zeta_db', 'eta')

    def _phi_search(self, scenario, order, point):
        constellation = Constellation(order)
        draws = DrawSettings(scenario.n_users, scenario.n_antennas,
                             float(db_to_linear(scenario.channel_power_db[0])), constellation)
        spec = TargetSpec.strict(float(db_to_linear(scenario.zeta_db)), scenario.noise_power)
        search = PhiStarSearch(draws, spec, np.radians(scenario.phis_deg), np.radians(scenario.phi_step_deg),
                               scenario.ser_method, scenario.noise_draws, self.threads, self.progress)
        return search.run(scenario.trials, RngStream(scenario.seed, point))

    def _ee_vs_phi(self, scenario):
        table = ResultTable(scenario.scenario, ['phi_deg', 'eta', 'ser', 'power'])
        phi_star, reports = self._phi_search(scenario, scenario.psk_orders[0], 0)
        for report in reports:
            table.add_row([np.degrees(report.phi), report.eta, report.ser, report.power])
        table.metadata['phi_star_deg'] = float(np.degrees(phi_star))
        return table

    def _modulation_table(self, scenario):
        columns = ['psk_order'] + [f"eta_{_tag(phi)}" for phi in scenario.phis_deg]
        table = ResultTable(scenario.scenario, columns)
        for point, order in enumerate(scenario.psk_orders):
            _, reports = self._phi_search(scenario, order, point)
            # Reports follow the sorted margins
            ranks = np.argsort(np.argsort(scenario.phis_deg, kind="stable"), kind="stable")
            table.add_row([order] + [reports[rank].eta for rank in ranks])
        return table
