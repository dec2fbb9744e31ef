"""Scenario runner, test-function families and the command-line entry point."""

from .runner import (ConfigError, NormReport, ScenarioConfig, ScenarioError, classify,
                     refinement_study, run_scenario)

__all__ = ["ConfigError", "NormReport", "ScenarioConfig", "ScenarioError", "classify",
           "refinement_study", "run_scenario"]
