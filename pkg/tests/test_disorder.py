import math
import warnings

import numpy as np
import pytest

from dimerchain import (CouplingParams, anchored_prefactor, build_periodic_chain,
                        ensemble_lnT, estimate_localization, sample_chain)
from dimerchain.disorder import DisorderModel, EnsembleResult
from dimerchain.model import phase_between

LAM = 655.0
THBAR = phase_between(0.0, 32.75, LAM)


def length_model(sigma=0.2, couple=True):
    return DisorderModel("dimer_length", THBAR, sigma, "phase_radians",
                         couple_J_to_length=couple)


def sep_model(sigma=0.2):
    return DisorderModel("dimer_separation", 3 * THBAR, sigma, "phase_radians")


def chiral_params(J="anchored"):
    if J == "anchored":
        return CouplingParams.chiral(6.86, 11.103, LAM,
                                     j_prefactor=anchored_prefactor(46.02, 32.75, LAM))
    return CouplingParams.chiral(6.86, 11.103, LAM, J=J)


class TestDisorderModel:
    def test_validation(self):
        with pytest.raises(ValueError):
            DisorderModel("atom_positions", 1.0, 0.1)
        with pytest.raises(ValueError):
            DisorderModel("dimer_length", 1.0, -0.1)
        with pytest.raises(ValueError):
            DisorderModel("dimer_length", 1.0, 0.1, "furlongs")
        with pytest.raises(ValueError):
            DisorderModel("dimer_separation", 1.0, 0.1, couple_J_to_length=True)

    def test_unit_conversion(self):
        m = DisorderModel("dimer_length", THBAR, 0.2, "phase_radians")
        assert m.mean_nm(LAM) == pytest.approx(32.75, rel=1e-12)
        assert m.sigma_nm(LAM) == pytest.approx(0.2 * LAM / (2 * math.pi), rel=1e-12)
        m2 = DisorderModel("dimer_length", 32.75, 5.0, "length_nm")
        assert m2.mean_nm() == 32.75 and m2.sigma_nm() == 5.0


class TestSampleChain:
    def test_sigma_zero_identity(self):
        base = build_periodic_chain(5, 32.75, 98.25)
        model = length_model(sigma=0.0)
        assert sample_chain(model, base, 3, 42, lambda_qd=LAM) is base

    def test_deterministic(self):
        base = build_periodic_chain(6, 32.75, 98.25)
        model = length_model()
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            a = sample_chain(model, base, 17, 99, lambda_qd=LAM)
            b = sample_chain(model, base, 17, 99, lambda_qd=LAM)
            c = sample_chain(model, base, 18, 99, lambda_qd=LAM)
        assert a.atom_positions == b.atom_positions
        assert a.atom_positions != c.atom_positions

    def test_targeting(self):
        base = build_periodic_chain(6, 32.75, 98.25)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            g_len = sample_chain(length_model(), base, 0, 5, lambda_qd=LAM)
            g_sep = sample_chain(sep_model(), base, 0, 5, lambda_qd=LAM)
        assert np.array_equal(g_len.dimer_separations, base.dimer_separations)
        assert not np.array_equal(g_len.dimer_lengths, base.dimer_lengths)
        assert np.array_equal(g_sep.dimer_lengths, base.dimer_lengths)
        assert not np.array_equal(g_sep.dimer_separations, base.dimer_separations)

    def test_positivity(self):
        base = build_periodic_chain(10, 32.75, 98.25)
        model = length_model(sigma=0.25)  # sigma_L = 26 nm, heavy truncation
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            for i in range(30):
                geo = sample_chain(model, base, i, 1, lambda_qd=LAM)
                assert np.all(geo.dimer_lengths > 0)


class TestEnsemble:
    def test_thread_count_bit_identical(self):
        model = length_model()
        p = chiral_params()
        runs = [ensemble_lnT(model, p, "chiral", [10, 30, 50], 2000, 11, 15.0, threads=t)
                for t in (1, 2, 8)]
        for other in runs[1:]:
            assert runs[0].mean_lnT == other.mean_lnT
            assert runs[0].stderr_lnT == other.stderr_lnT
            assert runs[0].mean_T == other.mean_T

    def test_chiral_separation_immunity(self):
        # every realization coincides with the periodic chain: the ensemble
        # reduces to the absorption decay and carries zero statistical spread
        model = sep_model()
        p = chiral_params(J=46.02)
        ens = ensemble_lnT(model, p, "chiral", [10, 50, 100], 500, 2, 15.0,
                           base_length=32.75)
        from dimerchain import chain_transmission, single_dimer_t
        periodic = chain_transmission(build_periodic_chain(10, 32.75, 98.25), p, 15.0)
        assert ens.mean_lnT[0] == pytest.approx(periodic.log_T, rel=1e-13)
        assert all(se < 1e-15 for se in ens.stderr_lnT)
        est = estimate_localization(ens)
        per_dimer = math.log(abs(single_dimer_t(15.0, 6.86, 11.103, 46.02, THBAR)) ** 2)
        assert est.xi == pytest.approx(-1.0 / per_dimer, rel=1e-9)

    def test_chiral_separation_immunity_lossless(self):
        # with gamma = 0 the immune chain transmits perfectly: no localization
        # within numerical resolution (the slope is pure rounding)
        model = sep_model()
        p = CouplingParams.chiral(0.0, 11.103, LAM, J=46.02)
        ens = ensemble_lnT(model, p, "chiral", [10, 50, 100], 200, 2, 15.0,
                           base_length=32.75)
        est = estimate_localization(ens)
        assert est.xi == math.inf or est.xi > 1e10
        assert all(abs(m) < 1e-12 for m in ens.mean_lnT)

    def test_decoupled_waveguide_sentinel(self):
        # Gamma = 0: per-dimer factor is exactly 1, zero slope, xi = inf sentinel
        model = sep_model()
        p = CouplingParams.chiral(0.0, 0.0, LAM, J=46.02)
        ens = ensemble_lnT(model, p, "chiral", [10, 20, 30], 50, 2, 15.0,
                           base_length=32.75)
        est = estimate_localization(ens)
        assert est.xi == math.inf
        assert est.xi_stderr == math.inf

    def test_quadrature_agreement_small(self):
        from dimerchain import analytic_disorder_stats
        model = length_model(sigma=0.25 * THBAR)
        p = chiral_params()
        ens = ensemble_lnT(model, p, "chiral", list(range(10, 101, 10)), 4000, 5, 15.0)
        est = estimate_localization(ens)
        stats = analytic_disorder_stats(p, model, 10, 15.0)
        combined = math.sqrt(sum(
            w**2 * s**2 for w, s in zip(_ols_weights(ens.n_values), ens.stderr_lnT)))
        assert abs(est.slope - stats.mean_ln_tau_sq) < 3 * combined

    def test_stderr_scaling(self):
        model = length_model()
        p = chiral_params()
        e100 = ensemble_lnT(model, p, "chiral", [50], 100, 21, 15.0)
        e10k = ensemble_lnT(model, p, "chiral", [50], 10000, 21, 15.0)
        ratio = e100.stderr_lnT[0] / e10k.stderr_lnT[0]
        assert ratio == pytest.approx(10.0, rel=0.2)

    def test_periodic_limit(self):
        # no disorder, no loss: mean_lnT equals the periodic value exactly
        model = DisorderModel("dimer_length", THBAR, 0.0, "phase_radians")
        p = CouplingParams.symmetric(0.0, 11.103, LAM, J=0.0)
        ens = ensemble_lnT(model, p, "bidirectional", [5], 50, 1, 12.0,
                           base_separation=98.25)
        from dimerchain import chain_transmission_fast
        ref = chain_transmission_fast(build_periodic_chain(5, 32.75, 98.25), p, 12.0)
        assert ens.mean_lnT[0] == pytest.approx(ref.log_T, rel=1e-12)
        assert ens.stderr_lnT[0] == 0.0

    def test_mode_validation(self):
        with pytest.raises(ValueError):
            ensemble_lnT(length_model(couple=True), chiral_params(J=46.02), "chiral",
                         [10], 10, 0, 15.0)
        with pytest.raises(ValueError):
            ensemble_lnT(sep_model(), chiral_params(J=46.02), "chiral",
                         [10], 10, 0, 15.0)  # missing base_length
        with pytest.raises(ValueError):
            ensemble_lnT(length_model(), chiral_params(), "bidirectional", [10], 10, 0, 15.0)


def _ols_weights(n_values):
    n = np.asarray(n_values, dtype=float)
    return (n - n.mean()) / np.sum((n - n.mean()) ** 2)


class TestEstimateLocalization:
    def test_synthetic_line(self):
        n = tuple(range(10, 101, 10))
        y = tuple(-0.1 * v for v in n)
        ens = EnsembleResult(n_values=n, mean_lnT=y, stderr_lnT=(0.0,) * 10,
                             mean_T=(0.0,) * 10, realizations=1, seed=0)
        est = estimate_localization(ens)
        assert est.xi == pytest.approx(10.0, rel=1e-12)
        assert est.r_squared == pytest.approx(1.0, abs=1e-12)
        assert est.slope == pytest.approx(-0.1, rel=1e-12)

    def test_no_localization_sentinel(self):
        ens = EnsembleResult(n_values=(10, 20, 30), mean_lnT=(-1.0, -1.0, -1.0),
                             stderr_lnT=(0.0,) * 3, mean_T=(0.4,) * 3,
                             realizations=1, seed=0)
        est = estimate_localization(ens)
        assert est.xi == math.inf

    def test_needs_three_points(self):
        ens = EnsembleResult(n_values=(10, 20), mean_lnT=(-1.0, -2.0),
                             stderr_lnT=(0.0,) * 2, mean_T=(0.1,) * 2,
                             realizations=1, seed=0)
        with pytest.raises(ValueError):
            estimate_localization(ens)

    def test_stderr_propagation(self):
        n = (10, 20, 30, 40)
        ens = EnsembleResult(n_values=n, mean_lnT=(-1.0, -2.1, -2.9, -4.05),
                             stderr_lnT=(0.1, 0.1, 0.1, 0.1), mean_T=(0.1,) * 4,
                             realizations=100, seed=0)
        est = estimate_localization(ens)
        w = _ols_weights(n)
        expected = math.sqrt(float(np.sum(w**2 * 0.1**2)))
        assert est.xi_stderr == pytest.approx(expected / est.slope**2, rel=1e-12)
