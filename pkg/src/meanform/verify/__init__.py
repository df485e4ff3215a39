"""Seeded randomized checks of the operator and shift results."""
from .generators import GeneratorError, trial_rng
from .runner import VerifyReport, default_threads, run_suite, suite_names
from .suites import HARNESS_ONLY, REGISTRY, Suite, Trial

__all__ = [
    "GeneratorError",
    "HARNESS_ONLY",
    "REGISTRY",
    "Suite",
    "Trial",
    "VerifyReport",
    "default_threads",
    "run_suite",
    "suite_names",
    "trial_rng",
]
