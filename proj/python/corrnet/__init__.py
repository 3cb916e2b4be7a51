"""Coupled GDP/CPI VARX estimation and Granger-causality networks."""

from ._corrnet import (  # noqa: F401
    CausalityNetwork,
    CoupledFit,
    Error,
    GeneratorSpec,
    Panel,
    VarxFit,
    assemble_network,
    companion_stability,
    f_cdf,
    fit_coupled,
    ingest,
    joint_spectral_radius,
    load_panel_csv,
    log_likelihood,
    ols_cusum,
    random_stable_spec,
    save_panel_csv,
    select_lag,
    simulate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
