"""Two-way (symmetric) waveguide transport: dense oracle and transfer-matrix fast path.

The dense path assembles the 4N coupled jump-condition equations over the
amplitude ladders (plane-wave gauge, first atom at the origin) and solves by
LU with partial pivoting.  The fast path cascades per-dimer 2x2 transfer
matrices.  Both run in extended precision (np.clongdouble): the oracle
equivalence tolerance is unreachable in float64 near deep transmission
minima.  A float64 batch kernel serves Monte Carlo ensembles and spectra.

Local dimer scattering amplitudes are derived from the same jump conditions
as the dense system but through an independent 2-variable elimination; the
transfer matrix is built from them as

    M = [[t - r r'/t', r'/t'], [-r/t', 1/t']],   det M = t/t' = 1

(reciprocity t' = t holds exactly for the symmetric waveguide), so the chain
output is extracted cancellation-free as t = 1/M22, r = -M21/M22.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConditioningError, SingularityError
from .model import ChainGeometry, CouplingParams, ScatteringResult, check_detuning

__all__ = [
    "TransferMatrix2x2",
    "single_dimer_tr",
    "solve_dense",
    "dimer_transfer_matrix",
    "chain_transmission_fast",
    "cascade_batch",
]

EPS_SINGULAR = 1e-12
#: rescale the running matrix product when any entry magnitude exceeds this
RESCALE_NORM = 1e150
#: condition-number ceiling for the dense solve
COND_LIMIT = 1e12


@dataclass(frozen=True)
class TransferMatrix2x2:
    """2x2 complex matrix propagating (right, left) amplitude pairs across a dimer."""

    m11: complex
    m12: complex
    m21: complex
    m22: complex

    def __post_init__(self):
        for name in ("m11", "m12", "m21", "m22"):
            v = complex(getattr(self, name))
            object.__setattr__(self, name, v)
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise ValueError(f"transfer matrix entry {name} is not finite: {v}")

    def as_array(self):
        return np.array([[self.m11, self.m12], [self.m21, self.m22]], dtype=complex)


def single_dimer_tr(delta, gamma, Gamma, J, theta):
    """Transmission and reflection of a single dimer on a symmetric waveguide."""
    delta = check_detuning(delta)
    E = cmath.exp(1j * theta)
    den = (4j * E * J * Gamma + 4.0 * E * E * Gamma * Gamma
           - (gamma + 2.0 * Gamma - 2j * delta) ** 2 - 4.0 * J * (J - 1j * Gamma * E))
    if abs(den) < EPS_SINGULAR:
        raise SingularityError(f"single_dimer_tr denominator vanished at delta={delta}")
    t = (-4j * E * J * Gamma + 4j * E**3 * J * Gamma
         - E * E * (4.0 * J * J + (gamma - 2j * delta) ** 2)) / den
    r = 2.0 * Gamma * (-4j * E * J + gamma + 2.0 * Gamma
                       - E * E * (-gamma + 2.0 * Gamma + 2j * delta) - 2j * delta) / den
    return t, r


def _dimer_scatter(D, g, J, E):
    """Local-frame dimer amplitudes (t, r, t', r') for left/right incidence.

    Works for numpy scalars (any complex dtype) and arrays alike; all
    denominators are in the form multiplied through by delta_omega^2 - J^2,
    regular at the bare-resonance points.
    """
    A = D * D - J * J
    at = A + 2j * g * (D + J * E)
    bt = 2j * g * (D * E + J)
    c = 2j * g / (at * at - bt * bt)
    # left incidence
    rhs1, rhs2 = D + J * E, D * E + J
    P = c * (at * rhs1 - bt * rhs2)
    Q = c * (at * rhs2 - bt * rhs1)
    t = 1.0 - P - Q / E
    r = -P - E * Q
    # right incidence
    rhs1, rhs2 = D + J / E, D / E + J
    P = c * (at * rhs1 - bt * rhs2)
    Q = c * (at * rhs2 - bt * rhs1)
    tp = 1.0 - P - E * Q
    rp = -P - Q / E
    return t, r, tp, rp


def _dimer_matrix_entries(D, g, J, E):
    t, r, tp, rp = _dimer_scatter(D, g, J, E)
    return ((t * tp - r * rp) / tp, rp / tp, -r / tp, 1.0 / tp)


def _require_two_way(params: CouplingParams):
    if not params.is_symmetric:
        raise ValueError("bidirectional solvers require symmetric coupling (Gamma_R = Gamma_L)"
                         " (asymmetric waveguides are out of scope)")


def dimer_transfer_matrix(theta_length, theta_gap, params: CouplingParams, delta):
    """Transfer matrix of one dimer including the propagation to the next dimer.

    ``theta_length`` is the intra-dimer phase 2*pi*L/lambda, ``theta_gap`` the
    phase of the gap to the next dimer.  The ordered product over dimers with
    boundary conditions t_0 = 1, r_{2N+1} = 0 reproduces the chain (T, R).
    """
    delta = check_detuning(delta)
    _require_two_way(params)
    J = params.J if params.J is not None else params.coupling_of_length(
        theta_length * params.lambda_qd / (2.0 * math.pi))
    D = np.clongdouble(delta) + 0.5j * np.clongdouble(params.gamma)
    g = np.longdouble(params.Gamma_R) / 2.0
    Jl = np.clongdouble(J)
    E = np.exp(1j * np.longdouble(theta_length))
    if abs(complex(D * D - Jl * Jl)) < EPS_SINGULAR:
        raise SingularityError(f"|delta_omega^2 - J^2| below guard at delta={delta}")
    m11, m12, m21, m22 = _dimer_matrix_entries(D, g, Jl, E)
    span = np.exp(1j * np.longdouble(theta_length + theta_gap))
    # S(span) @ M: rows scaled by e^{+i span}, e^{-i span}
    return TransferMatrix2x2(complex(m11 * span), complex(m12 * span),
                             complex(m21 / span), complex(m22 / span))


def chain_transmission_fast(geometry: ChainGeometry, params: CouplingParams, delta):
    """O(N) chain transport by cascading dimer transfer matrices (extended precision)."""
    delta = check_detuning(delta)
    _require_two_way(params)
    lengths = geometry.dimer_lengths
    seps = geometry.dimer_separations
    couplings = params.dimer_couplings(geometry)
    k = 2.0 * math.pi / params.lambda_qd
    D = np.clongdouble(delta) + 0.5j * np.clongdouble(params.gamma)
    g = np.longdouble(params.Gamma_R) / 2.0

    m11 = np.clongdouble(1.0)
    m12 = np.clongdouble(0.0)
    m21 = np.clongdouble(0.0)
    m22 = np.clongdouble(1.0)
    log_scale = 0.0
    gauge_phase = 0.0
    span_total = 0.0  # k * (start of last dimer): cascade frame vs absolute frame
    for j, (L, J) in enumerate(zip(lengths, couplings)):
        Jl = np.clongdouble(float(J))
        if abs(complex(D * D - Jl * Jl)) < EPS_SINGULAR:
            raise SingularityError(f"|delta_omega^2 - J^2| below guard at delta={delta}")
        theta = np.longdouble(k) * np.longdouble(L)
        gauge_phase += 2.0 * float(theta)
        E = np.exp(1j * theta)
        a11, a12, a21, a22 = _dimer_matrix_entries(D, g, Jl, E)
        if not (np.isfinite(a11) and np.isfinite(a12) and np.isfinite(a21) and np.isfinite(a22)):
            raise SingularityError(
                f"dimer {j + 1} transmits nothing at delta={delta}; transfer matrix singular"
            )
        if j > 0:
            # span from the previous dimer start: its length plus the gap
            span = np.longdouble(k) * (np.longdouble(lengths[j - 1]) + np.longdouble(seps[j - 1]))
            span_total += float(span)
            e = np.exp(1j * span)
            m11 *= e
            m12 *= e
            m21 /= e
            m22 /= e
        m11, m12, m21, m22 = (a11 * m11 + a12 * m21, a11 * m12 + a12 * m22,
                              a21 * m11 + a22 * m21, a21 * m12 + a22 * m22)
        norm = max(abs(m11), abs(m12), abs(m21), abs(m22))
        if norm > RESCALE_NORM:
            m11 /= norm
            m12 /= norm
            m21 /= norm
            m22 /= norm
            log_scale += math.log(float(norm))
    if m22 == 0:
        raise SingularityError("net transfer matrix has M22 = 0")
    r_out = complex(-m21 / m22)
    # det M = 1 exactly, so t = 1/(scale * m22); assembled in log space
    log_T = -2.0 * (log_scale + float(np.log(np.abs(m22))))
    t_phase = gauge_phase - span_total - float(np.angle(complex(m22 / abs(m22))))
    t_mag = math.exp(log_T / 2.0) if log_T > -745.0 else 0.0
    t_out = t_mag * cmath.exp(1j * t_phase)
    T = math.exp(log_T) if log_T > -745.0 else 0.0
    return ScatteringResult(t=t_out, r=r_out, T=T, R=abs(r_out) ** 2, log_T=log_T)


def solve_dense(geometry: ChainGeometry, params: CouplingParams, delta):
    """Assemble and LU-solve the full 4N coupled amplitude equations.

    Serves as the oracle for the transfer-matrix fast path; also accepts
    Gamma_L = 0 (chiral limit cross-check).  Returns the full ladders.
    """
    delta = check_detuning(delta)
    if not (params.is_symmetric or params.is_chiral):
        raise ValueError("solve_dense requires symmetric coupling or the chiral limit")
    pos = np.asarray(geometry.atom_positions, dtype=np.longdouble)
    pos = pos - pos[0]  # gauge: first atom at the origin
    n_at = len(pos)
    n_dim = geometry.dimer_count
    couplings = params.dimer_couplings(geometry)
    k = np.longdouble(2.0 * math.pi / params.lambda_qd)
    gR = np.longdouble(params.Gamma_R) / 2.0
    gL = np.longdouble(params.Gamma_L) / 2.0
    G = np.sqrt(gR * gL)
    D = np.clongdouble(delta) + 0.5j * np.clongdouble(params.gamma)

    A = np.zeros((2 * n_at, 2 * n_at), dtype=np.clongdouble)
    b = np.zeros(2 * n_at, dtype=np.clongdouble)

    def t_col(j):  # t_j, j = 1..2N
        return j - 1

    def r_col(j):  # r_j, j = 1..2N
        return n_at + j - 1

    def add_pair(row, coef, m, which):
        """Add coef * (t_m + t_{m-1}) or coef * (r_{m+1} + r_m) to a row."""
        if which == "S":
            A[row, t_col(m)] += coef
            if m - 1 >= 1:
                A[row, t_col(m - 1)] += coef
            else:
                b[row] -= coef  # t_0 = 1
        else:
            A[row, r_col(m)] += coef
            if m + 1 <= n_at:
                A[row, r_col(m + 1)] += coef
            # r_{2N+1} = 0 contributes nothing

    for d in range(n_dim):
        J = np.clongdouble(float(couplings[d]))
        Adet = D * D - J * J
        if abs(complex(Adet)) < EPS_SINGULAR:
            raise SingularityError(
                f"|delta_omega^2 - J^2| < {EPS_SINGULAR} at delta={delta} (dimer {d + 1})"
            )
        alpha_R = gR * D / Adet           # Eq.-12-style coefficients
        alpha_L = gL * D / Adet
        alpha_X = G * D / Adet
        beta_R = J * gR / Adet
        beta_L = J * gL / Adet
        beta_X = J * G / Adet
        p, q = 2 * d + 1, 2 * d + 2
        for (m, mh) in ((p, q), (q, p)):
            xm, xh = pos[m - 1], pos[mh - 1]
            # right-mover jump at atom m
            row = 2 * (m - 1)
            A[row, t_col(m)] += 1.0
            if m - 1 >= 1:
                A[row, t_col(m - 1)] += -1.0
            else:
                b[row] += 1.0
            add_pair(row, 1j * alpha_R, m, "S")
            add_pair(row, 1j * alpha_X * np.exp(-2j * k * xm), m, "W")
            add_pair(row, 1j * beta_R * np.exp(1j * k * (xh - xm)), mh, "S")
            add_pair(row, 1j * beta_X * np.exp(-1j * k * (xm + xh)), mh, "W")
            # left-mover jump at atom m
            row = 2 * (m - 1) + 1
            if m + 1 <= n_at:
                A[row, r_col(m + 1)] += 1.0
            A[row, r_col(m)] += -1.0
            add_pair(row, -1j * alpha_X * np.exp(2j * k * xm), m, "S")
            add_pair(row, -1j * alpha_L, m, "W")
            add_pair(row, -1j * beta_X * np.exp(1j * k * (xm + xh)), mh, "S")
            add_pair(row, -1j * beta_L * np.exp(-1j * k * (xh - xm)), mh, "W")

    cond = np.linalg.cond(A.astype(np.complex128))
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise ConditioningError(
            f"dense scattering system condition estimate {cond:.3e} > {COND_LIMIT:.0e} "
            f"at delta={delta}"
        )
    sol = _lu_solve_partial_pivot(A, b)
    t_lad = sol[:n_at].astype(np.complex128)
    r_lad = sol[n_at:].astype(np.complex128)

    theta_sum = float(2.0 * k * np.sum(np.asarray(geometry.dimer_lengths, dtype=np.longdouble)))
    gauge = cmath.exp(1j * theta_sum)
    t_out = complex(sol[n_at - 1]) * gauge
    r_out = complex(sol[n_at])
    mag = abs(complex(sol[n_at - 1]))
    log_T = 2.0 * math.log(mag) if mag > 0.0 else -math.inf
    return ScatteringResult(
        t=t_out, r=r_out, T=mag**2, R=abs(r_out) ** 2, log_T=log_T,
        t_ladder=np.concatenate(([1.0 + 0.0j], t_lad)),
        r_ladder=np.concatenate((r_lad, [0.0 + 0.0j])),
    )


def _lu_solve_partial_pivot(A, b):
    """Gaussian elimination with partial pivoting in the matrix's own dtype."""
    M = A.copy()
    x = b.copy()
    n = len(b)
    for col in range(n):
        piv = col + int(np.argmax(np.abs(M[col:, col])))
        if M[piv, col] == 0:
            raise ConditioningError("dense scattering system is singular")
        if piv != col:
            M[[col, piv]] = M[[piv, col]]
            x[[col, piv]] = x[[piv, col]]
        f = M[col + 1:, col] / M[col, col]
        M[col + 1:, col:] -= f[:, None] * M[col, col:]
        x[col + 1:] -= f * x[col]
    sol = np.zeros(n, dtype=M.dtype)
    for i in range(n - 1, -1, -1):
        sol[i] = (x[i] - M[i, i + 1:] @ sol[i + 1:]) / M[i, i]
    return sol


def cascade_batch(delta, gamma, Gamma, J, theta_L, span_phase):
    """Vectorised float64 transfer-matrix cascade for ensembles and spectra.

    ``J`` and ``theta_L`` have shape (B, n); ``span_phase`` (B, n-1) holds the
    start-to-start phases between consecutive dimers.  ``delta`` is scalar or
    (B,).  Returns ``(lnT, T, R)`` arrays of shape (B,).
    """
    J = np.asarray(J, dtype=float)
    theta_L = np.asarray(theta_L, dtype=float)
    B, n = J.shape
    D = (np.asarray(delta, dtype=float) + 0.5j * gamma) * np.ones(B)
    g = Gamma / 2.0
    E = np.exp(1j * theta_L)
    a11, a12, a21, a22 = _dimer_matrix_entries(D[:, None], g, J, E)
    m11 = a11[:, 0].copy()
    m12 = a12[:, 0].copy()
    m21 = a21[:, 0].copy()
    m22 = a22[:, 0].copy()
    log_scale = np.zeros(B)
    for j in range(1, n):
        e = np.exp(1j * span_phase[:, j - 1])
        m11 = m11 * e
        m12 = m12 * e
        m21 = m21 / e
        m22 = m22 / e
        m11, m12, m21, m22 = (a11[:, j] * m11 + a12[:, j] * m21,
                              a11[:, j] * m12 + a12[:, j] * m22,
                              a21[:, j] * m11 + a22[:, j] * m21,
                              a21[:, j] * m12 + a22[:, j] * m22)
        norm = np.maximum(np.maximum(np.abs(m11), np.abs(m12)),
                          np.maximum(np.abs(m21), np.abs(m22)))
        big = norm > RESCALE_NORM
        if big.any():
            s = norm[big]
            m11[big] /= s
            m12[big] /= s
            m21[big] /= s
            m22[big] /= s
            log_scale[big] += np.log(s)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        lnT = -2.0 * (log_scale + np.log(np.abs(m22)))
        R = np.abs(m21 / m22) ** 2
    T = np.exp(np.minimum(lnT, 0.0))
    T = np.where(lnT > -745.0, T, 0.0)
    return lnT, T, R
