import io

import numpy as np
import pytest
from fractions import Fraction

from localpolytope.states import (
    ghz_polygon_tensor,
    ghz_state,
    polygon_vectors,
    singlet_state,
    w_state,
)
from localpolytope.tensor import (
    CorrelationTensor,
    DeterministicStrategy,
    QuantumSetup,
    Scenario,
    inner,
    norm1,
    norm2,
    norm2_sq,
    quantum_tensor,
    read_tensor,
    scale,
    strategy_inner,
    strategy_tensor,
    tensor_strategy_inner,
    write_tensor,
)

NO_MARG_22 = Scenario(2, 2, marginals=False)


def test_scenario_dimensions():
    assert Scenario(2, 2, marginals=False).dimension == 4
    assert Scenario(2, 6, marginals=False).dimension == 36
    assert Scenario(3, 2, marginals=True).dimension == 26
    assert Scenario(2, 2, marginals=True).num_strategies == 16


def test_scenario_validation():
    with pytest.raises(ValueError):
        Scenario(0, 2)
    with pytest.raises(ValueError):
        Scenario(9, 30)  # over the entry cap


def test_strategy_tensor_direct_product():
    s = DeterministicStrategy.from_signs([[1, 1], [1, -1]])
    t = strategy_tensor(s, NO_MARG_22)
    assert t.entries.tolist() == [[1, -1], [1, -1]]


def test_strategy_sign_pair_identity():
    s1 = DeterministicStrategy.from_signs([[1, 1], [1, -1]])
    s2 = DeterministicStrategy.from_signs([[-1, -1], [-1, 1]])
    t1 = strategy_tensor(s1, NO_MARG_22)
    t2 = strategy_tensor(s2, NO_MARG_22)
    assert np.array_equal(t1.entries, t2.entries)
    assert s1.canonical(NO_MARG_22) == s2.canonical(NO_MARG_22)


def test_all_plus_strategy_with_marginals():
    sc = Scenario(3, 1, marginals=True)
    s = DeterministicStrategy.from_signs([[1], [1], [1]])
    t = strategy_tensor(s, sc)
    assert np.all(t.entries == 1.0)


def test_strategy_string_roundtrip():
    s = DeterministicStrategy.from_signs([[1, -1, 1], [-1, -1, 1]])
    assert s.to_string() == "+-+|--+"
    assert DeterministicStrategy.from_string(s.to_string()) == s
    with pytest.raises(ValueError):
        DeterministicStrategy.from_string("+-|x+")


def test_singlet_entries_are_minus_dot_products():
    rng = np.random.default_rng(7)
    m = 4
    alice = rng.normal(size=(m, 3))
    alice /= np.linalg.norm(alice, axis=1, keepdims=True)
    bob = rng.normal(size=(m, 3))
    bob /= np.linalg.norm(bob, axis=1, keepdims=True)
    sc = Scenario(2, m, marginals=False)
    t = quantum_tensor(QuantumSetup(singlet_state(), (alice, bob)), sc)
    assert np.abs(t.entries + alice @ bob.T).max() < 1e-12


def test_ghz_polygon_formula_against_born_rule():
    for m in (2, 3, 5):
        sc = Scenario(3, m, marginals=False)
        vecs = polygon_vectors(m)
        q = quantum_tensor(QuantumSetup(ghz_state(3), (vecs, vecs, vecs)), sc)
        ref = ghz_polygon_tensor(3, m, exact=False)
        assert np.abs(q.entries - ref.entries).max() < 1e-12


def test_ghz_polygon_m2_values():
    t = ghz_polygon_tensor(3, 2)
    assert t.entries[0, 0, 0] == 1    # inputs (1,1,1)
    assert t.entries[0, 1, 1] == -1   # inputs (1,2,2)
    assert t.entries[0, 0, 1] == 0    # inputs (1,1,2)


def test_ghz_polygon_marginals_vanish():
    sc = Scenario(3, 2, marginals=True)
    vecs = polygon_vectors(2)
    t = quantum_tensor(QuantumSetup(ghz_state(3), (vecs, vecs, vecs)), sc)
    full = t.entries[1:, 1:, 1:]
    mask = np.ones(sc.shape, dtype=bool)
    mask[1:, 1:, 1:] = False
    mask[0, 0, 0] = False
    assert np.abs(t.entries[mask]).max() < 1e-12
    assert np.abs(full - ghz_polygon_tensor(3, 2, exact=False).entries).max() < 1e-12


def test_quantum_tensor_entry_range():
    rng = np.random.default_rng(3)
    for trial in range(10):
        N = int(rng.integers(1, 4))
        m = int(rng.integers(1, 4))
        sc = Scenario(N, m, marginals=True)
        vecs = []
        for _ in range(N):
            v = rng.normal(size=(m, 3))
            v /= np.linalg.norm(v, axis=1, keepdims=True)
            vecs.append(v)
        psi = rng.normal(size=2**N) + 1j * rng.normal(size=2**N)
        t = quantum_tensor(QuantumSetup(psi, tuple(vecs)), sc)
        assert np.abs(t.entries).max() <= 1 + 1e-9


def test_quantum_tensor_rejects_bad_input():
    sc = Scenario(2, 1, marginals=False)
    good = np.array([[0.0, 0.0, 1.0]])
    bad = np.array([[0.0, 0.0, 2.0]])
    with pytest.raises(ValueError):
        quantum_tensor(QuantumSetup(singlet_state(), (good, bad)), sc)
    rho = np.diag([1.5, -0.5, 0.0, 0.0]).astype(complex)
    with pytest.raises(ValueError):
        quantum_tensor(QuantumSetup(rho, (good, good)), sc)


def test_inner_and_norms():
    z = CorrelationTensor.zeros(NO_MARG_22)
    assert norm2(z) == 0
    s = DeterministicStrategy.from_signs([[1, -1], [1, 1]])
    t = strategy_tensor(s, NO_MARG_22)
    assert norm2(t) == 2.0
    assert inner(t, t) == 4
    assert norm1(t) == 4

    sc = Scenario(2, 2, marginals=True)
    tm = strategy_tensor(s, sc)
    # root excluded: 8 remaining entries of magnitude 1
    assert inner(tm, tm) == 8
    assert norm2_sq(tm) == 8
    assert norm1(tm) == 8


def test_inner_scenario_mismatch():
    t1 = CorrelationTensor.zeros(NO_MARG_22)
    t2 = CorrelationTensor.zeros(Scenario(2, 3, marginals=False))
    with pytest.raises(ValueError):
        inner(t1, t2)


def test_scale():
    rng = np.random.default_rng(0)
    t = CorrelationTensor(NO_MARG_22, rng.uniform(-1, 1, (2, 2)))
    assert np.array_equal(scale(t, 1.0).entries, t.entries)
    assert np.all(scale(t, 0.0).entries == 0)
    assert np.allclose(scale(t, 0.3).entries, 0.3 * t.entries)
    with pytest.raises(ValueError):
        scale(t, 1.5)


def test_scaled_singlet(chsh_singlet):
    v = 0.7
    t = scale(chsh_singlet, v)
    assert np.allclose(t.entries, v * chsh_singlet.entries)


@pytest.mark.parametrize("marginals", [False, True])
def test_fast_inner_matches_entrywise(marginals):
    rng = np.random.default_rng(11)
    sc = Scenario(2, 3, marginals=marginals)
    for _ in range(1000):
        entries = rng.integers(-5, 6, size=sc.shape)
        t = CorrelationTensor(sc, entries.astype(float))
        bits = [int(rng.integers(0, 8)) for _ in range(2)]
        s = DeterministicStrategy(bits, 3)
        fast = tensor_strategy_inner(t, s)
        slow = inner(t, strategy_tensor(s, sc))
        assert fast == slow


def test_strategy_inner_matches_materialized():
    rng = np.random.default_rng(5)
    for marginals in (False, True):
        sc = Scenario(3, 4, marginals=marginals)
        for _ in range(200):
            s1 = DeterministicStrategy([int(b) for b in rng.integers(0, 16, 3)], 4)
            s2 = DeterministicStrategy([int(b) for b in rng.integers(0, 16, 3)], 4)
            expected = inner(strategy_tensor(s1, sc), strategy_tensor(s2, sc))
            assert strategy_inner(s1, s2, sc) == expected


def test_tensor_serialization_roundtrip():
    rng = np.random.default_rng(2)
    sc = Scenario(2, 3, marginals=True)
    t = CorrelationTensor(sc, rng.uniform(-1, 1, sc.shape))
    buf = io.StringIO()
    write_tensor(t, buf)
    buf.seek(0)
    t2 = read_tensor(buf)
    assert t2.scenario == sc
    assert np.array_equal(t.entries, t2.entries)

    exact = ghz_polygon_tensor(3, 2)
    buf = io.StringIO()
    write_tensor(exact, buf)
    buf.seek(0)
    back = read_tensor(buf)
    assert back.is_exact or back.entries.dtype == object
    assert all(
        Fraction(a) == Fraction(b)
        for a, b in zip(exact.entries.reshape(-1), back.entries.reshape(-1))
    )


def test_tensor_read_rejects_malformed():
    with pytest.raises(ValueError):
        read_tensor(io.StringIO("2 2"))
    with pytest.raises(ValueError):
        read_tensor(io.StringIO("2 2 false\n1 2 3"))


def test_w_state_valid():
    sc = Scenario(3, 2, marginals=True)
    vecs = polygon_vectors(2)
    t = quantum_tensor(QuantumSetup(w_state(), (vecs, vecs, vecs)), sc)
    assert abs(t.root - 1) < 1e-12
    assert np.abs(t.entries).max() <= 1 + 1e-9


def test_strategy_sign_vector_roundtrip_idempotent():
    rng = np.random.default_rng(13)
    for _ in range(50):
        bits = [int(b) for b in rng.integers(0, 32, 3)]
        s = DeterministicStrategy(bits, 5)
        assert DeterministicStrategy.from_signs(s.sign_vectors()) == s


def test_werner_mixture_equals_scaled_singlet():
    from localpolytope.states import chsh_vectors, singlet_tensor

    alice, bob = chsh_vectors()
    psi = singlet_state()
    sc = Scenario(2, 2, marginals=False)
    base = singlet_tensor(alice.tolist(), bob.tolist())
    for v in (0.0, 0.3, 1 / np.sqrt(2), 1.0):
        rho = v * np.outer(psi, psi.conj()) + (1 - v) * np.eye(4) / 4
        t = quantum_tensor(QuantumSetup(rho, (alice, bob)), sc)
        assert np.abs(t.entries - scale(base, v).entries).max() < 1e-12


def test_ghz4_polygon_formula():
    sc = Scenario(4, 2, marginals=False)
    vecs = polygon_vectors(2)
    q = quantum_tensor(QuantumSetup(ghz_state(4), (vecs,) * 4), sc)
    ref = ghz_polygon_tensor(4, 2, exact=False)
    assert np.abs(q.entries - ref.entries).max() < 1e-12
