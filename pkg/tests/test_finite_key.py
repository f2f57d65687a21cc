import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle
from finikey import (
    ChannelObservation,
    EpsilonBudget,
    ImpreciseEstimateWarning,
    ProtocolSpec,
    RunConfig,
    asymptotic_rate,
    delta_n,
    delta_v,
    key_length,
    key_length_at,
    leak_ec,
    pa_failure,
    total_epsilon,
)

BB84 = ProtocolSpec.bb84()
SIX = ProtocolSpec.six_state()
E10 = 2.0 ** -10


class TestDeltaN:
    def test_worked_value(self):
        expected = 2 / 5e5 * 10 + 7 * math.sqrt(11 / 5e5)
        assert delta_n(500_000, E10, E10) == pytest.approx(expected, rel=1e-14)
        assert delta_n(500_000, E10, E10) == pytest.approx(0.03287291031876, rel=1e-12)

    def test_large_n(self):
        assert delta_n(10**12, E10, E10) == pytest.approx(float(oracle.delta_n(10**12, E10, E10)), rel=1e-13)
        assert delta_n(10**12, E10, E10) == pytest.approx(2.3e-5, rel=0.01)

    def test_monotone_to_zero(self):
        vals = [delta_n(10**k, E10, E10) for k in range(3, 13)]
        assert all(b < a for a, b in zip(vals, vals[1:]))
        assert vals[-1] < 1e-4

    @pytest.mark.parametrize("eps", [0.0, 1.0, -0.1])
    def test_invalid_eps(self, eps):
        with pytest.raises(ValueError):
            delta_n(100, eps, 1e-3)


class TestDeltaV:
    def test_worked_value(self):
        assert delta_v(500_000, 1e-3, 2) == pytest.approx(0.0057578195555077, rel=1e-12)

    def test_eps_one_removes_log_term(self):
        assert delta_v(1000, 1.0, 2) == math.sqrt(math.log(1001) / 1000)

    def test_simulator_threshold_value(self):
        assert delta_v(1000, 1e-3, 2) == pytest.approx(float(oracle.delta_v(1000, "1e-3")), rel=1e-13)
        assert delta_v(1000, 1e-3, 2) == pytest.approx(0.1018, abs=1e-4)

    def test_decreasing_in_m(self):
        vals = [delta_v(m, 1e-3, 2) for m in np.unique(np.logspace(0, 9, 200).astype(int))]
        assert all(b < a for a, b in zip(vals, vals[1:]))

    def test_warning_iff_d_above_two(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            delta_v(100, 1e-3, 2)
        with pytest.warns(ImpreciseEstimateWarning):
            delta_v(100, 1e-3, 3)

    @pytest.mark.parametrize("eps", [0.0, 1.5])
    def test_invalid_eps(self, eps):
        with pytest.raises(ValueError):
            delta_v(100, eps, 2)


class TestLeak:
    def test_zero_qber(self):
        assert leak_ec(12345, 0.0, 1.2, E10) == 11.0

    def test_worked_value(self):
        expected = float(oracle.mpf("1.2") * 500000 * oracle.h2("0.01") + oracle.log(2000, 2))
        assert leak_ec(500_000, 0.01, 1.2, 1e-3) == pytest.approx(expected, rel=1e-13)
        assert leak_ec(500_000, 0.01, 1.2, 1e-3) == pytest.approx(48487, abs=1)

    def test_shannon_limit(self):
        q = 0.03
        per_bit = [leak_ec(n, q, 1.0, 1e-3) / n for n in (10**3, 10**6, 10**9, 10**12)]
        assert abs(per_bit[-1] - float(oracle.h2(q))) < 1e-10
        assert all(b <= a for a, b in zip(per_bit, per_bit[1:]))

    @pytest.mark.parametrize("kw", [dict(q=0.6), dict(f=0.9), dict(n=0)])
    def test_domain(self, kw):
        args = dict(n=10, q=0.1, f=1.2, eps_ec=1e-3) | kw
        with pytest.raises(ValueError):
            leak_ec(**args)


class TestPaFailure:
    def test_trivial(self):
        assert pa_failure(1000, 1000.0) == 1.0
        assert pa_failure(980, 1000.0) == 2.0 ** -10

    def test_round_trip(self):
        hmin = 5000.0
        ell = hmin - 2 * math.log2(1 / 1e-9)
        assert pa_failure(ell, hmin) == pytest.approx(1e-9, rel=1e-12)
        # same term the key length subtracts for eps_pa
        n = 1000
        assert 2 * math.log2(1 / 1e-9) == pytest.approx(
            n * (delta_n(n, 1e-9, 0.5) - delta_n(n, 0.5, 0.5)) + 2 * math.log2(1 / 0.5), rel=1e-12)


class TestBudget:
    def test_total(self):
        assert total_epsilon(EpsilonBudget(1e-3, 1e-3, 1e-3, 1e-3)) == pytest.approx(4e-3, rel=1e-15)

    def test_parameter_multiplicity(self):
        b = EpsilonBudget(1e-300, 1e-300, 1e-3, 1e-300, n_pe=3)
        assert total_epsilon(b) == pytest.approx(3e-3, rel=1e-12)

    def test_equal_split(self):
        b = EpsilonBudget.equal_split(1e-9)
        assert (b.eps_pa, b.eps_bar, b.eps_pe, b.eps_ec) == (2.5e-10,) * 4
        assert b.total == pytest.approx(1e-9, rel=1e-15)

    def test_invalid(self):
        with pytest.raises(ValueError):
            EpsilonBudget(eps_pa=0.0)
        with pytest.raises(ValueError):
            EpsilonBudget(0.3, 0.3, 0.3, 0.3)


class TestKeyLength:
    def test_worked_example_terms(self):
        res = key_length_at(10**6, 500_000, 0.01, BB84, EpsilonBudget(), 1.2)
        terms = oracle.bb84_terms(10**6, 500_000, "0.01", "1e-3", "1e-3", "1e-3", "1e-3", "1.2")
        for name in ("delta_v", "q_pess", "h_ae_pess", "delta_n", "leak_per_bit"):
            assert getattr(res, name) == pytest.approx(float(terms[name]), rel=1e-12), name
        assert res.ell == math.floor(terms["bound"]) == 354979
        assert res.r_N == 0.354979

    def test_measured_leak_overrides_model(self):
        res = key_length_at(10**6, 500_000, 0.01, BB84, EpsilonBudget(), 1.2, measured_leak=48487.0)
        assert res.leak_per_bit == 48487.0 / 500_000
        assert res.ell > key_length_at(10**6, 500_000, 0.01, BB84, EpsilonBudget(), 1.2).ell

    def test_clamps_to_zero(self):
        res = key_length_at(1000, 500, 0.05, BB84, EpsilonBudget(), 1.2)
        assert res.ell == 0 and res.r_N == 0.0

    def test_q_pess_clamped_flag(self):
        res = key_length_at(20, 10, 0.3, BB84, EpsilonBudget(), 1.2)
        assert res.q_clamped and res.q_pess == 0.5 and res.ell == 0

    def test_q_obs_out_of_range(self):
        with pytest.raises(ValueError):
            key_length_at(1000, 500, 0.6, BB84, EpsilonBudget(), 1.2)

    def test_mismatched_m(self):
        cfg = RunConfig(N=1000, n=500)
        with pytest.raises(ValueError):
            key_length(cfg, ChannelObservation(0.01, 400))

    def test_limit_recovers_asymptotic_rate(self):
        N = 10**12
        res = key_length_at(N, N - 10**9, 0.05, BB84, EpsilonBudget(), 1.0)
        assert abs(res.r_N - asymptotic_rate(BB84, 0.05)) < 1e-2

    def test_imprecise_flag(self):
        with pytest.warns(ImpreciseEstimateWarning):
            res = key_length(RunConfig(N=10**6, n=5 * 10**5, spec=ProtocolSpec(d=3)),
                             ChannelObservation(0.01, 5 * 10**5, 3))
        assert res.imprecise_dv

    def test_monotone_in_qber(self):
        ells = [key_length_at(10**6, 500_000, q, BB84, EpsilonBudget(), 1.2).ell
                for q in np.linspace(0, 0.12, 121)]
        assert all(b <= a for a, b in zip(ells, ells[1:]))

    @pytest.mark.parametrize("spec", [BB84, SIX], ids=["bb84", "six"])
    def test_monotone_in_N(self, spec):
        Ns = np.unique(np.logspace(3, 9, 120).astype(int))
        ells = [key_length_at(N, N // 2, 0.02, spec, EpsilonBudget(), 1.2).ell for N in Ns]
        assert all(b >= a for a, b in zip(ells, ells[1:]))

    @settings(max_examples=300, deadline=None)
    @given(N=st.integers(2, 10**10), frac=st.floats(0.001, 0.999), q=st.floats(0.0, 0.5),
           f=st.floats(1.0, 2.0), six=st.booleans())
    def test_bounds_and_asymptotic_dominance(self, N, frac, q, f, six):
        spec = SIX if six else BB84
        n = min(max(1, int(N * frac)), N - 1)
        res = key_length_at(N, n, q, spec, EpsilonBudget(), f)
        assert 0 <= res.ell <= n
        assert res.r_N == res.ell / N
        # bracket never exceeds the asymptotic bracket at q_obs with Shannon leakage
        assert res.r_N <= max(0.0, asymptotic_rate(spec, q)) + 1e-12
