import json

from ._core import (
    BellmanParams,
    ConfigError,
    Lab,
    LowFrequencyError,
    RootSystem,
    UpsilonError,
    bellman_B,
    bellman_hessian,
    beta,
    cutoff_phi,
    dunkl_kernel,
    elementary_margins,
    kernel_ode_residual,
    mollified_B,
    nu,
    nu_second_integral,
    root_system,
    suite_names,
)
from ._core import run_suite as _run_suite


def run_suite(**config):
    """Run a verification suite; keyword names follow the CLI config file. Returns the parsed report."""
    return json.loads(_run_suite(json.dumps(config)))


__all__ = [
    "BellmanParams",
    "ConfigError",
    "Lab",
    "LowFrequencyError",
    "RootSystem",
    "UpsilonError",
    "bellman_B",
    "bellman_hessian",
    "beta",
    "cutoff_phi",
    "dunkl_kernel",
    "elementary_margins",
    "kernel_ode_residual",
    "mollified_B",
    "nu",
    "nu_second_integral",
    "root_system",
    "run_suite",
    "suite_names",
]
