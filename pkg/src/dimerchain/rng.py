"""Counter-based random numbers for reproducible parallel Monte Carlo.

Philox4x32-10 (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3",
SC'11) evaluated lazily per counter block, vectorised over numpy uint64
arrays.  Draw (realization i, dimer j, resample attempt a) reads the block

    counter = (a, j, i & 0xffffffff, i >> 32),  key = (seed_lo32, seed_hi32)

so every (realization, dimer) stream is reproducible in isolation and
resampling one dimer never shifts any other draw.  There is no sequential
state: results are independent of evaluation order and thread count.
"""
from __future__ import annotations

import numpy as np
from scipy.special import ndtri

from .errors import DisorderTooStrongError

__all__ = ["philox4x32", "counter_uniform", "counter_normal", "truncated_normal_field"]

_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint64(0x9E3779B9)
_W1 = np.uint64(0xBB67AE85)
_MASK32 = np.uint64(0xFFFFFFFF)

#: resample budget per (realization, dimer) draw before giving up
MAX_RESAMPLES = 100


def philox4x32(c0, c1, c2, c3, key0, key1, rounds=10):
    """Philox4x32 block cipher; inputs are uint64 arrays holding 32-bit words.

    Returns the four 32-bit output words (as uint64 arrays).  Verified
    against the Random123 known-answer vectors.
    """
    c0 = np.asarray(c0, dtype=np.uint64) & _MASK32
    c1 = np.asarray(c1, dtype=np.uint64) & _MASK32
    c2 = np.asarray(c2, dtype=np.uint64) & _MASK32
    c3 = np.asarray(c3, dtype=np.uint64) & _MASK32
    k0 = np.uint64(int(key0) & 0xFFFFFFFF)
    k1 = np.uint64(int(key1) & 0xFFFFFFFF)
    for r in range(rounds):
        if r:
            k0 = (k0 + _W0) & _MASK32
            k1 = (k1 + _W1) & _MASK32
        p0 = _M0 * c0  # exact: 32-bit operands in 64-bit lanes
        p1 = _M1 * c2
        hi0, lo0 = p0 >> np.uint64(32), p0 & _MASK32
        hi1, lo1 = p1 >> np.uint64(32), p1 & _MASK32
        c0, c1, c2, c3 = hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0
    return c0, c1, c2, c3


def counter_uniform(seed, realization, dimer, attempt=0):
    """Uniform(0, 1) double for each (realization, dimer, attempt) counter.

    Arguments broadcast; 53 random bits per value, never exactly 0 or 1.
    """
    realization, dimer, attempt = np.broadcast_arrays(
        np.asarray(realization, dtype=np.uint64),
        np.asarray(dimer, dtype=np.uint64),
        np.asarray(attempt, dtype=np.uint64),
    )
    seed = int(seed) & 0xFFFFFFFFFFFFFFFF
    o0, o1, _, _ = philox4x32(
        attempt, dimer, realization & _MASK32, realization >> np.uint64(32),
        seed & 0xFFFFFFFF, seed >> 32,
    )
    bits = (o0 << np.uint64(32)) | o1
    return ((bits >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def counter_normal(seed, realization, dimer, attempt=0, mean=0.0, sigma=1.0):
    """Gaussian draw per counter via the inverse normal CDF."""
    return mean + sigma * ndtri(counter_uniform(seed, realization, dimer, attempt))


def truncated_normal_field(seed, realizations, n_dimers, mean, sigma,
                           realization_offset=0, dimer_offset=0):
    """(realizations, n_dimers) Gaussian field truncated to positive values.

    Invalid (non-positive) draws are redrawn from the same (realization,
    dimer) stream with an incremented attempt counter, so the sampled law is
    the Gaussian conditioned on positivity and no other entry is disturbed.

    Returns ``(values, n_resampled)`` where ``n_resampled`` counts redrawn
    entries.  Raises ``DisorderTooStrongError`` once any single entry has
    used more than ``MAX_RESAMPLES`` attempts.
    """
    i = np.arange(realization_offset, realization_offset + realizations,
                  dtype=np.uint64)[:, None]
    j = np.arange(dimer_offset, dimer_offset + n_dimers, dtype=np.uint64)[None, :]
    values = counter_normal(seed, i, j, 0, mean, sigma)
    if sigma == 0.0:
        return np.full((realizations, n_dimers), float(mean)), 0
    n_resampled = 0
    bad = values <= 0.0
    attempt = 1
    while bad.any():
        if attempt > MAX_RESAMPLES:
            raise DisorderTooStrongError(
                f"a draw stayed non-positive after {MAX_RESAMPLES} resamples "
                f"(mean={mean}, sigma={sigma}); disorder too strong for the geometry"
            )
        ii, jj = np.nonzero(bad)
        n_resampled += len(ii)
        redraw = counter_normal(seed, i[ii, 0], j[0, jj], attempt, mean, sigma)
        values[ii, jj] = redraw
        bad[ii, jj] = redraw <= 0.0
        attempt += 1
    return values, n_resampled
