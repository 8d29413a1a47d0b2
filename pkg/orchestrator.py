#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Orchestrator module for the constructive-interference precoding simulator.
Handles task scheduling and execution flow of a scenario run.
"""

import logging
from datetime import datetime

from loaders.csv_loader import CsvLoader
from scenarios.experiments import ScenarioRunner
from scenarios.scenario_config import get_scenario, load_config_file
from validators.solution_validator import SolutionValidator

logger = logging.getLogger(__name__)


class Task:
    """Represents a task in a scenario run."""

    def __init__(self, name, func, dependencies=None):
        """
        Initialize a Task object.

        Args:
            name (str): Task name
            func (callable): Function to execute for this task
            dependencies (list): List of task names this task depends on
        """
        self.name = name
        self.func = func
        self.dependencies = dependencies or []
        self.completed = False
        self.result = None
        self.execution_time = None

    def execute(self, *args, **kwargs):
        """Execute the task function."""
        logger.info(f"Executing task: {self.name}")
        start_time = datetime.now()

        try:
            self.result = self.func(*args, **kwargs)
            self.completed = True
            self.execution_time = (datetime.now() - start_time).total_seconds()
            logger.info(f"Task {self.name} completed in {self.execution_time:.2f} seconds")
            return self.result
        except Exception as e:
            logger.error(f"Task {self.name} failed: {str(e)}")
            raise


class SimpleScheduler:
    """Simple dependency-ordered task scheduler."""

    def __init__(self):
        """Initialize the scheduler with an empty task dictionary."""
        self.tasks = {}

    def add_task(self, task):
        """Add a task to the scheduler."""
        self.tasks[task.name] = task

    def run(self, entry_point):
        """
        Run tasks starting from the entry point, dependencies first.

        Each task receives the results of its dependencies as positional
        arguments, in the order the dependencies are declared.

        Args:
            entry_point (str): Name of the entry point task

        Returns:
            The result of the entry point task
        """
        if entry_point not in self.tasks:
            raise ValueError(f"Task {entry_point} not found")

        task = self.tasks[entry_point]
        if task.completed:
            return task.result

        inputs = []
        for dep_name in task.dependencies:
            if dep_name not in self.tasks:
                raise ValueError(f"Dependency {dep_name} not found")
            inputs.append(self.run(dep_name))

        return task.execute(*inputs)


class Orchestrator:
    """Orchestrates a scenario run: configuration, simulation, validation, output."""

    def __init__(self, config, progress=True):
        """
        Initialize the orchestrator.

        Args:
            config (Config): Configuration object
            progress (bool): Show progress bars while simulating
        """
        self.config = config
        self.scheduler = SimpleScheduler()

        self.runner = ScenarioRunner(config, progress=progress)
        self.validator = SolutionValidator(config)
        self.csv_loader = CsvLoader(config)

    def _setup_tasks(self, resolve, out, stamp):
        self.scheduler.tasks = {}
        self.scheduler.add_task(Task("load_config", resolve))
        self.scheduler.add_task(Task("simulate", self.runner.run, ["load_config"]))
        self.scheduler.add_task(Task("validate_table", self.validator.validate_table, ["simulate"]))
        self.scheduler.add_task(Task(
            "emit_csv",
            lambda scenario, table: (table, self.csv_loader.export(table, out or scenario.output, stamp=stamp)),
            ["load_config", "validate_table"]))

    def resolve_scenario(self, scenario_id=None, config_path=None, **overrides):
        """
        Build the scenario configuration from a built-in id or a JSON file.

        Args:
            scenario_id (str, optional): Built-in scenario id
            config_path (str, optional): JSON scenario file
            **overrides: CLI values (seed, trials, phi_step_deg, ...); None keeps the file value

        Returns:
            ScenarioConfig: The validated configuration
        """
        if config_path:
            scenario = load_config_file(config_path)
            if scenario_id and scenario_id != scenario.scenario:
                overrides['scenario'] = scenario_id
        else:
            scenario = get_scenario(scenario_id)
        scenario = scenario.with_overrides(**overrides)
        logger.info(f"Resolved scenario {scenario.scenario} (digest {scenario.digest()})")
        return scenario

    def run_scenario(self, scenario_id=None, config_path=None, out=None, stamp=False, **overrides):
        """
        Run a scenario end to end.

        Args:
            scenario_id (str, optional): Built-in scenario id
            config_path (str, optional): JSON scenario file
            out (str, optional): CSV destination; defaults to the configured output directory
            stamp (bool): Write the run timestamp to the CSV
            **overrides: Configuration overrides

        Returns:
            tuple: (ResultTable, path of the written CSV)
        """
        self._setup_tasks(lambda: self.resolve_scenario(scenario_id, config_path, **overrides), out, stamp)
        try:
            table, path = self.scheduler.run("emit_csv")
        except Exception as e:
            logger.error(f"Error in scenario run {scenario_id or config_path}: {str(e)}")
            raise
        timings = {name: task.execution_time for name, task in self.scheduler.tasks.items()}
        logger.info(f"Scenario {table.scenario} written to {path}; task timings {timings}")
        return table, path
