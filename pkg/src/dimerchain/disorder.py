"""Gaussian geometry disorder, deterministic parallel ensembles and xi fits.

Every random draw is a pure function of (seed, realization, dimer, attempt)
through the counter-based generator in :mod:`dimerchain.rng`, so ensembles
are bit-identical for any worker count: threads only partition the
realization axis, per-realization ln T values are assembled by index, and
the reductions use exact compensated summation (math.fsum).
"""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import bidirectional, chiral
from .model import ChainGeometry, CouplingParams, check_detuning
from .rng import truncated_normal_field

__all__ = [
    "DisorderModel",
    "EnsembleResult",
    "LocalizationEstimate",
    "sample_chain",
    "ensemble_lnT",
    "estimate_localization",
]

#: ln T recorded when a realization transmits exactly nothing
LNT_FLOOR = -745.0

TARGETS = ("dimer_length", "dimer_separation")
SIGMA_UNITS = ("length_nm", "phase_radians")


@dataclass(frozen=True)
class DisorderModel:
    """Gaussian disorder on one geometric parameter.

    ``mean`` and ``sigma`` share the units named by ``sigma_units``: plain
    nanometres, or the propagation phase 2*pi*x/lambda_QD in radians.  With
    ``couple_J_to_length`` the dipole coupling is recomputed from each
    sampled length (requires formula-mode CouplingParams).
    """

    target: str
    mean: float
    sigma: float
    sigma_units: str = "length_nm"
    couple_J_to_length: bool = False

    def __post_init__(self):
        if self.target not in TARGETS:
            raise ValueError(f"target must be one of {TARGETS}, got {self.target!r}")
        if self.sigma_units not in SIGMA_UNITS:
            raise ValueError(f"sigma_units must be one of {SIGMA_UNITS}")
        if self.sigma < 0.0:
            raise ValueError("sigma must be non-negative")
        if self.mean <= 0.0:
            raise ValueError("mean must be positive")
        if self.couple_J_to_length and self.target != "dimer_length":
            raise ValueError("couple_J_to_length only makes sense for dimer_length disorder")

    def _to_nm(self, value, lambda_qd):
        if self.sigma_units == "length_nm":
            return float(value)
        if lambda_qd is None:
            raise ValueError("phase_radians disorder needs lambda_qd for conversion")
        return float(value) * lambda_qd / (2.0 * math.pi)

    def mean_nm(self, lambda_qd=None):
        return self._to_nm(self.mean, lambda_qd)

    def sigma_nm(self, lambda_qd=None):
        return self._to_nm(self.sigma, lambda_qd)


@dataclass(frozen=True)
class EnsembleResult:
    """Disorder-averaged ln T per chain size."""

    n_values: tuple[int, ...]
    mean_lnT: tuple[float, ...]
    stderr_lnT: tuple[float, ...]
    mean_T: tuple[float, ...]
    realizations: int
    seed: int
    underflow_counts: tuple[int, ...] = ()
    resample_counts: tuple[int, ...] = ()


@dataclass(frozen=True)
class LocalizationEstimate:
    """Least-squares fit of mean ln T against the dimer count, xi = -1/slope."""

    xi: float
    slope: float
    intercept: float
    r_squared: float
    xi_stderr: float


def _check_j_mode(model: DisorderModel, params: CouplingParams):
    if model.couple_J_to_length and params.J is not None:
        raise ValueError("couple_J_to_length requires formula-mode params (J=None)")
    if (model.target == "dimer_length" and not model.couple_J_to_length
            and params.J is None):
        raise ValueError("formula-mode params under length disorder must couple J to length")


def sample_chain(model: DisorderModel, base: ChainGeometry, realization_index, seed,
                 lambda_qd=None):
    """One disorder realization of ``base``, reproducible in isolation.

    Only the targeted quantity is redrawn (independent Gaussians per dimer,
    resampled while non-positive); the other is taken from ``base``
    unchanged.  ``lambda_qd`` is needed only for phase-unit models.  With
    sigma = 0 the base chain is returned as-is.
    """
    if model.sigma == 0.0:
        return base
    n = base.dimer_count
    mean = model.mean_nm(lambda_qd)
    sigma = model.sigma_nm(lambda_qd)
    if model.target == "dimer_length":
        field, resampled = truncated_normal_field(
            seed, 1, n, mean, sigma, realization_offset=int(realization_index))
        lengths = field[0]
        seps = base.dimer_separations
    else:
        field, resampled = truncated_normal_field(
            seed, 1, n - 1, mean, sigma, realization_offset=int(realization_index))
        lengths = base.dimer_lengths
        seps = field[0]
    if resampled:
        warnings.warn(f"resampled {resampled} non-positive draw(s)", stacklevel=2)
    return ChainGeometry.from_lengths_and_separations(
        lengths, seps, x0=base.atom_positions[0])


def _lnT_block(model, params, waveguide, n, count, offset, seed, delta,
               base_length, base_separation):
    """Per-realization ln T for realizations [offset, offset+count)."""
    lam = params.lambda_qd
    k = 2.0 * math.pi / lam
    mean = model.mean_nm(lam)
    sigma = model.sigma_nm(lam)
    resampled = 0
    if model.target == "dimer_length":
        if sigma > 0.0:
            lengths, resampled = truncated_normal_field(
                seed, count, n, mean, sigma, realization_offset=offset)
        else:
            lengths = np.full((count, n), mean)
        seps = np.full((count, n - 1), base_separation) if n > 1 else np.zeros((count, 0))
    else:
        lengths = np.full((count, n), base_length)
        if sigma > 0.0 and n > 1:
            seps, resampled = truncated_normal_field(
                seed, count, n - 1, mean, sigma, realization_offset=offset)
        else:
            seps = np.full((count, n - 1), mean) if n > 1 else np.zeros((count, 0))
    if params.J is not None:
        J = np.full((count, n), float(params.J))
    else:
        J = params.coupling_of_length(lengths)
    theta_L = k * lengths
    if waveguide == "chiral":
        lnT = chiral.lnT_chain_batch(delta, params.gamma, params.Gamma_R, J, theta_L)
    else:
        spans = k * (lengths[:, :-1] + seps)
        lnT, _, _ = bidirectional.cascade_batch(
            delta, params.gamma, params.Gamma_R, J, theta_L, spans)
    return np.asarray(lnT, dtype=float).reshape(count), resampled


def ensemble_lnT(model: DisorderModel, params: CouplingParams, waveguide, n_values,
                 realizations, seed, delta, *, base_length=None, base_separation=None,
                 threads=1):
    """Monte Carlo average of ln T over disorder realizations, per chain size.

    ``waveguide`` is "chiral" or "bidirectional".  The untargeted geometric
    parameter is fixed: ``base_length`` (nm) is required for separation
    disorder; ``base_separation`` defaults to three mean lengths (the paper's
    spacing) and is irrelevant for the chiral waveguide.  Results are
    bit-identical for any ``threads``.
    """
    delta = check_detuning(delta)
    if waveguide not in ("chiral", "bidirectional"):
        raise ValueError(f"unknown waveguide {waveguide!r}")
    if waveguide == "chiral" and not params.is_chiral:
        raise ValueError("chiral ensemble requires Gamma_L = 0")
    if waveguide == "bidirectional" and not params.is_symmetric:
        raise ValueError("bidirectional ensemble requires Gamma_R = Gamma_L")
    _check_j_mode(model, params)
    realizations = int(realizations)
    if realizations < 1:
        raise ValueError("needs at least one realization")
    if model.target == "dimer_separation" and base_length is None:
        raise ValueError("separation disorder needs base_length (nm)")
    if base_separation is None:
        base_separation = 3.0 * (base_length if model.target == "dimer_separation"
                                 else model.mean_nm(params.lambda_qd))

    n_values = [int(n) for n in n_values]
    threads = max(int(threads), 1)
    chunk = min(max(math.ceil(realizations / threads), 1), 16384)
    offsets = list(range(0, realizations, chunk))

    mean_lnT, stderr_lnT, mean_T = [], [], []
    underflows, resamples = [], []
    for n in n_values:
        if n < 1:
            raise ValueError("chain sizes must be positive")
        lnT = np.empty(realizations, dtype=float)
        counts = [0] * len(offsets)

        def work(idx):
            off = offsets[idx]
            cnt = min(chunk, realizations - off)
            block, resampled = _lnT_block(model, params, waveguide, n, cnt, off,
                                          seed, delta, base_length, base_separation)
            lnT[off:off + cnt] = block
            counts[idx] = resampled

        if threads == 1 or len(offsets) == 1:
            for idx in range(len(offsets)):
                work(idx)
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                list(pool.map(work, range(len(offsets))))

        bad = ~(lnT > LNT_FLOOR)  # catches -inf and nan
        n_under = int(np.count_nonzero(bad))
        if n_under:
            lnT[bad] = LNT_FLOOR
        m = math.fsum(lnT) / realizations
        if realizations > 1:
            var = math.fsum((x - m) ** 2 for x in lnT) / (realizations - 1)
            se = math.sqrt(var / realizations)
        else:
            se = 0.0
        T = np.exp(np.minimum(lnT, 0.0))
        mean_lnT.append(m)
        stderr_lnT.append(se)
        mean_T.append(math.fsum(T) / realizations)
        underflows.append(n_under)
        resamples.append(int(sum(counts)))

    return EnsembleResult(
        n_values=tuple(n_values), mean_lnT=tuple(mean_lnT),
        stderr_lnT=tuple(stderr_lnT), mean_T=tuple(mean_T),
        realizations=realizations, seed=int(seed),
        underflow_counts=tuple(underflows), resample_counts=tuple(resamples),
    )


def estimate_localization(ensemble: EnsembleResult):
    """OLS fit of mean ln T against n; xi = -1/slope.

    The slope standard error is propagated from the per-point Monte Carlo
    stderrs through the OLS weights (falling back to the residual-based
    estimate when they are all zero).  A non-negative slope yields the
    no-localization sentinel xi = +inf.
    """
    n = np.asarray(ensemble.n_values, dtype=float)
    y = np.asarray(ensemble.mean_lnT, dtype=float)
    if len(np.unique(n)) < 3:
        raise ValueError("localization fit needs at least 3 distinct chain sizes")
    nbar = n.mean()
    sxx = float(np.sum((n - nbar) ** 2))
    slope = float(np.sum((n - nbar) * (y - y.mean())) / sxx)
    intercept = float(y.mean() - slope * nbar)
    resid = y - (slope * n + intercept)
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0.0 else 1.0

    se_pts = np.asarray(ensemble.stderr_lnT, dtype=float)
    if np.any(se_pts > 0.0):
        weights = (n - nbar) / sxx
        slope_se = math.sqrt(float(np.sum(weights**2 * se_pts**2)))
    elif len(n) > 2:
        s2 = ss_res / (len(n) - 2)
        slope_se = math.sqrt(s2 / sxx)
    else:
        slope_se = 0.0

    if slope >= 0.0:
        return LocalizationEstimate(xi=math.inf, slope=slope, intercept=intercept,
                                    r_squared=r_squared, xi_stderr=math.inf)
    xi = -1.0 / slope
    xi_stderr = slope_se / slope**2
    return LocalizationEstimate(xi=xi, slope=slope, intercept=intercept,
                                r_squared=r_squared, xi_stderr=xi_stderr)
