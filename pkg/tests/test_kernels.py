import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from finikey import EpsilonBudget, ProtocolSpec, _kernels, _pykernels, key_length_at

BACKENDS = [_pykernels]
if _kernels.compiled_kernels is not None:
    BACKENDS.append(_kernels.compiled_kernels)


def test_backend_selected():
    assert _kernels.BACKEND in {"cython", "python"}
    assert _kernels.bound_bits is _kernels.kernels.bound_bits


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.__name__.rsplit(".", 1)[-1])
@settings(max_examples=200, deadline=None)
@given(N=st.integers(2, 10**12), frac=st.floats(0.01, 0.99), q=st.floats(0.0, 0.5),
       f=st.floats(1.0, 1.5), six=st.booleans(), e=st.floats(1e-12, 0.2))
def test_bound_matches_reference(backend, N, frac, q, f, six, e):
    spec = ProtocolSpec.six_state() if six else ProtocolSpec.bb84()
    n = min(max(1, int(N * frac)), N - 1)
    budget = EpsilonBudget(e, e / 2, e / 3, e / 4)
    ref = key_length_at(N, n, q, spec, budget, f)
    val = backend.bound_bits(n, N - n, q, 1 if six else 0, 0.5, 2, budget.eps_pa, budget.eps_bar,
                             budget.eps_pe, budget.eps_ec, f)
    assert max(0, min(n, math.floor(val))) == ref.ell or abs(val - round(val)) < 1e-6 * max(1, abs(val))


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernel not built")
@pytest.mark.parametrize("args", [
    (500_000, 500_000, 0.01, 0, 0.5, 2, 1, 4e-3, 1.2, 1e-3),
    (4925, 5732, 0.01, 0, 0.5, 2, 1, 4e-3, 1.2, 1e-3),
    (10**11, 10**9, 0.05, 1, 0.5, 2, 3, 1e-9, 1.0, 1e-3),
    (10, 10, 0.3, 0, 0.5, 2, 1, 4e-3, 1.2, 1e-3),
])
def test_backends_agree_on_share_search(args):
    py, c = (b.optimize_shares(*args) for b in BACKENDS)
    assert py[5] == c[5]
    for a, b in zip(py[:5], c[:5]):
        assert a == pytest.approx(b, rel=1e-12, abs=1e-300)


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.__name__.rsplit(".", 1)[-1])
def test_share_search_improves_on_equal_split(backend):
    args = (500_000, 500_000, 0.01, 0, 0.5, 2, 2, 4e-3, 1.2)
    best, *shares, evals = backend.optimize_shares(*args, 1e-3)
    start = backend.bound_bits(500_000, 500_000, 0.01, 0, 0.5, 2, 4e-3 / 5, 4e-3 / 5, 4e-3 / 5, 4e-3 / 5, 1.2)
    assert best >= start
    assert sum(shares) == pytest.approx(1.0, rel=1e-15)
    assert evals > 1
