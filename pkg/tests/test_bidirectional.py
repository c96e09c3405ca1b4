import cmath
import math

import numpy as np
import pytest

from dimerchain import (ChainGeometry, CouplingParams, build_periodic_chain,
                        chain_transmission, chain_transmission_fast,
                        dimer_transfer_matrix, single_dimer_tr, solve_dense)
from dimerchain.bidirectional import cascade_batch
from dimerchain.errors import SingularityError
from dimerchain.model import phase_between

LAM = 655.0
THBAR = phase_between(0.0, 32.75, LAM)


def random_chain(rng, n_max=10):
    n = int(rng.integers(1, n_max + 1))
    lengths = rng.uniform(10, 80, n)
    seps = rng.uniform(20, 150, n - 1)
    return ChainGeometry.from_lengths_and_separations(lengths, seps)


class TestSingleDimerTR:
    def test_resonant_mirror(self):
        t, r = single_dimer_tr(0.0, 0.0, 11.103, 0.0, 0.7)
        assert abs(t) < 1e-14
        assert abs(abs(r) - 1.0) < 1e-14

    def test_J0_keeps_waveguide_mediated_term(self):
        # J = 0 limit: denominator retains the 4 e^{2i theta} Gamma^2 term
        d, g, G, th = 7.0, 3.0, 9.0, 0.4
        E = cmath.exp(1j * th)
        den = 4 * E * E * G * G - (g + 2 * G - 2j * d) ** 2
        t_ref = -E * E * (g - 2j * d) ** 2 / den
        r_ref = 2 * G * (g + 2 * G - E * E * (-g + 2 * G + 2j * d) - 2j * d) / den
        t, r = single_dimer_tr(d, g, G, 0.0, th)
        assert abs(t - t_ref) < 1e-14
        assert abs(r - r_ref) < 1e-14

    def test_flux_conservation_lossless(self):
        rng = np.random.default_rng(0)
        for _ in range(300):
            t, r = single_dimer_tr(rng.uniform(-80, 80), 0.0, rng.uniform(0.1, 30),
                                   rng.uniform(0, 60), rng.uniform(0, 2 * math.pi))
            assert abs(abs(t) ** 2 + abs(r) ** 2 - 1.0) < 1e-12

    def test_perfect_reflection_at_law_points(self):
        # gamma=0: T=0 and R=1 exactly at Delta = +-sqrt(2 Gamma J sin th + J^2)
        G, J = 11.103, 46.2
        law = math.sqrt(2 * G * J * math.sin(THBAR) + J**2)
        assert law == pytest.approx(49.51227978614559626, rel=1e-12)
        for d in (law, -law):
            t, r = single_dimer_tr(d, 0.0, G, J, THBAR)
            assert abs(t) < 1e-12
            assert abs(abs(r) - 1.0) < 1e-12


class TestDenseSolver:
    def test_single_dimer_matches_closed_form(self):
        rng = np.random.default_rng(1)
        geo = build_periodic_chain(1, 32.75, 98.25)
        for _ in range(50):
            d = rng.uniform(-80, 80)
            g, G, J = rng.uniform(0, 30), rng.uniform(0.5, 30), rng.uniform(0, 60)
            p = CouplingParams.symmetric(g, G, LAM, J=J)
            res = solve_dense(geo, p, d)
            t_ref, r_ref = single_dimer_tr(d, g, G, J, THBAR)
            assert abs(res.t - t_ref) <= 1e-12 * max(abs(t_ref), 1.0)
            assert abs(res.r - r_ref) <= 1e-12 * max(abs(r_ref), 1.0)

    def test_flux_conservation(self):
        rng = np.random.default_rng(2)
        for _ in range(30):
            geo = random_chain(rng, 5)
            p = CouplingParams.symmetric(0.0, rng.uniform(0.5, 30), LAM,
                                         J=rng.uniform(0, 60))
            res = solve_dense(geo, p, rng.uniform(-80, 80))
            assert abs(res.flux - 1.0) < 1e-10

    def test_passivity(self):
        rng = np.random.default_rng(3)
        for _ in range(30):
            geo = random_chain(rng, 5)
            p = CouplingParams.symmetric(rng.uniform(0, 30), rng.uniform(0.5, 30), LAM,
                                         J=rng.uniform(0, 60))
            res = solve_dense(geo, p, rng.uniform(-80, 80))
            assert res.flux <= 1.0 + 1e-10

    def test_chiral_limit(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            geo = random_chain(rng, 6)
            g, G, d = rng.uniform(0, 20), rng.uniform(0.5, 20), rng.uniform(-60, 60)
            p_chir = CouplingParams.chiral(g, G, LAM, j_prefactor=0.75)
            res_d = solve_dense(geo, p_chir, d)
            res_c = chain_transmission(geo, p_chir, d)
            assert abs(res_d.T - res_c.T) <= 1e-12 * max(res_c.T, 1e-15)
            assert res_d.R < 1e-25

    def test_ladders_shape_and_boundaries(self):
        geo = build_periodic_chain(4, 32.75, 98.25)
        p = CouplingParams.symmetric(6.86, 11.103, LAM, J=46.2)
        res = solve_dense(geo, p, 5.0)
        assert len(res.t_ladder) == 9 and len(res.r_ladder) == 9
        assert res.t_ladder[0] == 1.0
        assert res.r_ladder[-1] == 0.0

    def test_singularity_guard(self):
        geo = build_periodic_chain(1, 32.75, 98.25)
        p = CouplingParams.symmetric(0.0, 11.103, LAM, J=25.0)
        with pytest.raises(SingularityError):
            solve_dense(geo, p, 25.0)  # gamma=0 and Delta=J exactly


class TestTransferMatrix:
    def test_identity_limit(self):
        p = CouplingParams.symmetric(0.0, 1e-13, LAM, J=0.0)
        tm = dimer_transfer_matrix(0.31, 0.9, p, 4.0)
        span = cmath.exp(1j * (0.31 + 0.9))
        assert abs(tm.m11 - span) < 1e-11
        assert abs(tm.m22 - 1 / span) < 1e-11
        assert abs(tm.m12) < 1e-11 and abs(tm.m21) < 1e-11

    def test_single_dimer_moduli(self):
        p = CouplingParams.symmetric(6.86, 11.103, LAM, J=46.2)
        tm = dimer_transfer_matrix(THBAR, 3 * THBAR, p, 9.0)
        t_ref, r_ref = single_dimer_tr(9.0, 6.86, 11.103, 46.2, THBAR)
        # boundary conditions: t = 1/M22, r = -M21/M22
        assert abs(1.0 / tm.m22) == pytest.approx(abs(t_ref), rel=1e-12)
        assert abs(tm.m21 / tm.m22) == pytest.approx(abs(r_ref), rel=1e-12)

    def test_unit_determinant(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            p = CouplingParams.symmetric(rng.uniform(0, 30), rng.uniform(0.5, 30), LAM,
                                         J=rng.uniform(0, 60))
            tm = dimer_transfer_matrix(rng.uniform(0.05, 2.0), rng.uniform(0.05, 2.0),
                                       p, rng.uniform(-60, 60))
            det = tm.m11 * tm.m22 - tm.m12 * tm.m21
            assert abs(det - 1.0) < 1e-12

    def test_oracle_equivalence(self):
        rng = np.random.default_rng(6)
        for _ in range(25):
            geo = random_chain(rng)
            p = CouplingParams.symmetric(rng.uniform(0, 30), rng.uniform(0.1, 30), LAM,
                                         J=rng.uniform(0, 60))
            for d in rng.uniform(-100, 100, 4):
                rd = solve_dense(geo, p, d)
                rf = chain_transmission_fast(geo, p, d)
                assert abs(rf.T - rd.T) <= 1e-10 * max(rd.T, 1e-15)
                assert abs(rf.R - rd.R) <= 1e-10 * max(rd.R, 1e-15)
                assert abs(rf.t - rd.t) <= 1e-9 * max(abs(rd.t), 1e-9)

    def test_fast_flux_n100(self):
        geo = build_periodic_chain(100, 32.75, 98.25)
        p = CouplingParams.symmetric(0.0, 11.103, LAM, J=46.2)
        for d in (-70.0, -20.0, 3.0, 30.0, 80.0):
            res = chain_transmission_fast(geo, p, d)
            assert abs(res.flux - 1.0) < 1e-8

    def test_fast_runtime_and_stability_n100(self):
        import time
        geo = build_periodic_chain(100, 32.75, 98.25)
        p = CouplingParams.symmetric(6.86, 11.103, LAM, J=46.2)
        deltas = np.linspace(-100, 100, 40)
        start = time.perf_counter()
        for d in deltas:
            res = chain_transmission_fast(geo, p, d)
            assert math.isfinite(res.log_T)
            assert res.T >= 0.0
        per_point = (time.perf_counter() - start) / len(deltas)
        assert per_point < 0.010  # < 10 ms per detuning point

    def test_deep_gap_log_tracking(self):
        # inside the gap T underflows float64 but log_T stays finite
        geo = build_periodic_chain(100, 32.75, 98.25)
        p = CouplingParams.symmetric(6.86, 11.103, LAM, J=0.0)
        res = chain_transmission_fast(geo, p, 0.0)
        assert res.log_T < -200.0
        assert math.isfinite(res.log_T)


class TestCascadeBatch:
    def test_matches_scalar_fast_path(self):
        rng = np.random.default_rng(7)
        n = 12
        lengths = rng.uniform(15, 60, (6, n))
        seps = rng.uniform(40, 160, (6, n - 1))
        k = 2 * math.pi / LAM
        p = CouplingParams.symmetric(6.86, 11.103, LAM, J=46.2)
        J = np.full((6, n), 46.2)
        lnT, T, R = cascade_batch(10.0, 6.86, 11.103, J, k * lengths,
                                  k * (lengths[:, :-1] + seps))
        for i in range(6):
            geo = ChainGeometry.from_lengths_and_separations(lengths[i], seps[i])
            res = chain_transmission_fast(geo, p, 10.0)
            assert lnT[i] == pytest.approx(res.log_T, rel=1e-10)
            assert R[i] == pytest.approx(res.R, rel=1e-10, abs=1e-13)
