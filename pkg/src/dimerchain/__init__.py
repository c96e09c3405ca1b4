"""Single-photon transport through dipole-coupled dimer chains on 1D waveguides."""

from .model import (
    ChainGeometry,
    CouplingParams,
    ScatteringResult,
    anchored_prefactor,
    build_periodic_chain,
    dipole_coupling,
    phase_between,
)
from .chiral import (
    AnalyticDisorderStats,
    ChiralAmplitudes,
    analytic_disorder_stats,
    chain_transmission,
    single_atom_t,
    single_dimer_t,
    tau_random_length,
)
from .bidirectional import (
    TransferMatrix2x2,
    chain_transmission_fast,
    dimer_transfer_matrix,
    single_dimer_tr,
    solve_dense,
)
from .disorder import (
    DisorderModel,
    EnsembleResult,
    LocalizationEstimate,
    ensemble_lnT,
    estimate_localization,
    sample_chain,
)

__version__ = "0.1.0"

__all__ = [
    "ChainGeometry", "CouplingParams", "ScatteringResult",
    "anchored_prefactor", "build_periodic_chain", "dipole_coupling", "phase_between",
    "AnalyticDisorderStats", "ChiralAmplitudes", "analytic_disorder_stats",
    "chain_transmission", "single_atom_t", "single_dimer_t", "tau_random_length",
    "TransferMatrix2x2", "chain_transmission_fast", "dimer_transfer_matrix",
    "single_dimer_tr", "solve_dense",
    "DisorderModel", "EnsembleResult", "LocalizationEstimate",
    "ensemble_lnT", "estimate_localization", "sample_chain",
    "__version__",
]
