"""Linear minimisation oracles over the deterministic strategies.

Minimising a linear functional over the local polytope means optimising a
multilinear +-1 assignment problem.  Three routes are provided: a batched
alternating-maximisation heuristic (fast, no optimality guarantee), exhaustive
enumeration (exact, capped), and an exact branch-and-bound on the QUBO
reformulation of the bipartite case.
"""

import numpy as np
from dataclasses import dataclass
from fractions import Fraction

from .tensor import CorrelationTensor, DeterministicStrategy

EXHAUSTIVE_CAP = 26  # max N*m for full enumeration


@dataclass(frozen=True)
class BellFunctional:
    """A linear functional on correlation tensors, typically a Bell inequality."""

    tensor: CorrelationTensor

    @property
    def scenario(self):
        return self.tensor.scenario

    @property
    def is_integer(self):
        flat = self.tensor.entries.reshape(-1)
        if self.tensor.is_exact:
            return all(
                isinstance(x, (int, np.integer))
                or (isinstance(x, Fraction) and x.denominator == 1)
                for x in flat
            )
        return bool(np.all(flat == np.round(flat)))

    def integer_array(self):
        if not self.is_integer:
            raise ValueError("functional does not have integer entries")
        flat = self.tensor.entries.reshape(-1)
        return np.array([int(x) for x in flat], dtype=np.int64).reshape(
            self.tensor.entries.shape
        )


def _extended(mat, marginals):
    """Prepend the fixed marginal-slot row of ones to a (m, R) sign matrix."""
    if not marginals:
        return mat
    return np.vstack([np.ones((1, mat.shape[1]), dtype=mat.dtype), mat])


_AXES = "abcd"


def _party_contraction(G, signs, n, marginals):
    """Coefficients of party n's signs given the other parties' (m, R) signs."""
    N = G.ndim
    ops = []
    spec = [_AXES[:N]]
    for j in range(N):
        if j == n:
            continue
        ops.append(_extended(signs[j], marginals))
        spec.append(_AXES[j] + "r")
    out = np.einsum(",".join(spec) + "->" + _AXES[n] + "r", G, *ops)
    return out


def _batch_objective(G, signs, marginals):
    N = G.ndim
    ops = [_extended(s, marginals) for s in signs]
    spec = _AXES[:N] + "," + ",".join(_AXES[j] + "r" for j in range(N))
    return np.einsum(spec + "->r", G, *ops)


def maximize_functional_heuristic(
    tensor, restarts=3000, seed=0, max_rounds=200, threads=1
):
    """Best strategy found by alternating maximisation of <tensor, d>.

    Every restart draws random signs for all parties and then cycles through
    the parties, replacing each party's signs by the sign of its coefficient
    vector (with sign(0) = +1) until a full round brings no improvement.
    Returns (strategy, value) with the value root-corrected, i.e. equal to
    inner(tensor, strategy_tensor(...)).
    """
    sc = tensor.scenario
    N, m = sc.parties, sc.inputs
    G = tensor.entries
    if G.dtype == object:
        G = G.astype(np.float64)

    def run_chunk(chunk_seed, R):
        rng = np.random.default_rng(chunk_seed)
        signs = [rng.choice([-1.0, 1.0], size=(m, R)) for _ in range(N)]
        prev = np.full(R, -np.inf)
        for _ in range(max_rounds):
            for n in range(N):
                C = _party_contraction(G, signs, n, sc.marginals)
                coeff = C[1:] if sc.marginals else C
                signs[n] = np.where(coeff >= 0, 1.0, -1.0)
            vals = _batch_objective(G, signs, sc.marginals)
            if np.all(vals <= prev + 1e-12):
                break
            prev = vals
        i = int(np.argmax(prev))
        return prev[i], [signs[n][:, i].copy() for n in range(N)]

    # restarts are independent; map over seeded chunks, reduce by best value
    threads = max(1, threads)
    base = restarts // threads
    sizes = [base + (1 if k < restarts % threads else 0) for k in range(threads)]
    jobs = [(seed + k, R) for k, R in enumerate(sizes) if R > 0]
    if len(jobs) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=len(jobs)) as pool:
            results = list(pool.map(lambda j: run_chunk(*j), jobs))
    else:
        results = [run_chunk(*j) for j in jobs]

    best_val, best_signs = max(results, key=lambda r: r[0])
    strategy = DeterministicStrategy.from_signs(
        [list(s.astype(int)) for s in best_signs]
    )
    root = float(G[(0,) * N]) if sc.marginals else 0.0
    return strategy, best_val - root


def heuristic_lmo(gradient, restarts=3000, seed=0, threads=1):
    """Strategy approximately minimising <gradient, d> over all strategies."""
    neg = CorrelationTensor(gradient.scenario, -gradient.entries)
    strategy, _ = maximize_functional_heuristic(
        neg, restarts=restarts, seed=seed, threads=threads
    )
    return strategy


def _lex_sign_batch(start, stop, num_vars):
    """Sign rows for assignment ids start..stop-1; id order equals the
    lexicographic order of the '+'/'-' strings (bit 0 -> '+')."""
    ids = np.arange(start, stop, dtype=np.uint64)
    shifts = np.arange(num_vars - 1, -1, -1, dtype=np.uint64)
    bits = (ids[:, None] >> shifts[None, :]) & 1
    return 1.0 - 2.0 * bits  # bit 0 -> +1


def exhaustive_lmo(gradient, batch=1 << 14):
    """Exact minimiser of <gradient, d> with lexicographically-smallest ties.

    Enumerates the first N-1 parties and solves the last party analytically;
    capped at N*m <= 26.
    """
    sc = gradient.scenario
    N, m = sc.parties, sc.inputs
    if N * m > EXHAUSTIVE_CAP:
        raise ValueError(f"exhaustive oracle capped at N*m <= {EXHAUSTIVE_CAP}")
    G = gradient.entries
    exact_int = False
    if G.dtype == object:
        flat = G.reshape(-1)
        if all(
            isinstance(x, (int, np.integer))
            or (isinstance(x, Fraction) and x.denominator == 1)
            for x in flat
        ):
            G = np.array([int(x) for x in flat], dtype=np.int64).reshape(G.shape)
            exact_int = True
        else:
            G = G.astype(np.float64)
    elif np.issubdtype(G.dtype, np.integer):
        exact_int = True

    outer_vars = (N - 1) * m
    best_val = None
    best_outer = None
    best_last = None
    root = G[(0,) * N] if sc.marginals else 0

    if N == 1:
        coeff = G[1:] if sc.marginals else G
        last = np.where(coeff > 0, -1, 1)
        value = -np.abs(coeff).sum()
        strategy = DeterministicStrategy.from_signs([list(last.astype(int))])
        return strategy, int(value) if exact_int else float(value)

    for start in range(0, 1 << outer_vars, batch):
        stop = min(start + batch, 1 << outer_vars)
        rows = _lex_sign_batch(start, stop, outer_vars) if outer_vars else np.ones((1, 0))
        if exact_int:
            rows = rows.astype(np.int64)
        B = rows.shape[0]
        signs = [rows[:, j * m : (j + 1) * m].T for j in range(N - 1)]

        # contraction onto the last party's axis, batched over assignments
        ops = [_extended(s, sc.marginals) for s in signs]
        spec = (
            _AXES[:N]
            + ","
            + ",".join(_AXES[j] + "r" for j in range(N - 1))
            + "->"
            + _AXES[N - 1]
            + "r"
        )
        C = np.einsum(spec, G, *ops)
        if sc.marginals:
            base = C[0]
            coeff = C[1:]
        else:
            base = np.zeros(B, dtype=C.dtype)
            coeff = C
        vals = base - np.abs(coeff).sum(axis=0)
        i = int(np.argmin(vals))
        v = vals[i]
        if best_val is None or v < best_val:
            best_val = v
            best_outer = [signs[j][:, i].copy() for j in range(N - 1)]
            # minimise coeff . s: s = -sign(coeff), ties resolved to +1
            best_last = np.where(coeff[:, i] > 0, -1, 1)

    sign_vectors = [list(s.astype(int)) for s in best_outer] + [
        list(best_last.astype(int))
    ]
    strategy = DeterministicStrategy.from_signs(sign_vectors)
    value = best_val - root
    if exact_int:
        value = int(value)
    return strategy, value


@dataclass(frozen=True)
class QuboInstance:
    """max_{a,b in {+-1}^m} a^T M b recast as c + 2 max_{w in {0,1}^2m} w^T Q w."""

    Q: np.ndarray
    c: object  # int for integer functionals, else float

    @property
    def size(self):
        return self.Q.shape[0]

    def value(self, w):
        w = np.asarray(w)
        return self.c + 2 * int(w @ self.Q @ w) if self.Q.dtype == np.int64 else (
            self.c + 2 * float(w @ self.Q @ w)
        )


def to_qubo(functional):
    """QUBO form of the bipartite no-marginal local-bound problem.

    Q has the row sums of M negated on the first diagonal block, the column
    sums negated on the second, and M / M^T off-diagonal; c is the entry sum.
    The identity a^T M b = c + 2 w^T Q w with w = ((a+1)/2, (b+1)/2) holds for
    every sign assignment.
    """
    if isinstance(functional, BellFunctional):
        sc = functional.scenario
        if sc.parties != 2 or sc.marginals:
            raise ValueError("QUBO reformulation needs a bipartite no-marginal functional")
        M = (
            functional.integer_array()
            if functional.is_integer
            else functional.tensor.entries.astype(float)
        )
    else:
        M = np.asarray(functional)
    m1, m2 = M.shape
    dt = np.int64 if np.issubdtype(M.dtype, np.integer) else np.float64
    Q = np.zeros((m1 + m2, m1 + m2), dtype=dt)
    Q[:m1, :m1] = -np.diag(M.sum(axis=1))
    Q[m1:, m1:] = -np.diag(M.sum(axis=0))
    Q[:m1, m1:] = M
    Q[m1:, :m1] = M.T
    c = M.sum()
    c = int(c) if dt == np.int64 else float(c)
    return QuboInstance(Q, c)


def qubo_branch_and_bound(instance, node_budget=5_000_000):
    """Exact maximisation of c + 2 w^T Q w over binary w.

    Depth-first branch and bound; variables are ordered once by decreasing
    absolute row sum and the bound at a node adds, to the value of the fixed
    part, every positive achievable linear and pairwise remainder.  Returns
    (value, w, optimal) where optimal is False if the node budget ran out.
    """
    Q = instance.Q
    n = Q.shape[0]
    if n > 64:
        raise ValueError("branch and bound capped at 64 binary variables")
    integer = Q.dtype == np.int64

    order = sorted(range(n), key=lambda i: -abs(Q[i]).sum())
    P = Q[np.ix_(order, order)]
    rows = [[int(x) for x in r] if integer else list(map(float, r)) for r in P]

    # suffix sums of positive pairwise terms among still-free variables
    zero = 0 if integer else 0.0
    pos_pair_suffix = [zero] * (n + 1)
    for d in range(n - 1, -1, -1):
        extra = sum(max(zero, 2 * rows[d][j]) for j in range(d + 1, n))
        pos_pair_suffix[d] = pos_pair_suffix[d + 1] + extra

    best_val = zero  # w = 0 is always feasible
    best_w = [0] * n
    nodes = 0
    exhausted = False

    lin = [zero] * n
    w = [0] * n

    def bound(d, fixed):
        b = fixed + pos_pair_suffix[d]
        for i in range(d, n):
            t = rows[i][i] + lin[i]
            if t > 0:
                b += t
        return b

    def dfs(d, fixed):
        nonlocal best_val, best_w, nodes, exhausted
        if exhausted:
            return
        nodes += 1
        if nodes > node_budget:
            exhausted = True
            return
        if d == n:
            if fixed > best_val:
                best_val = fixed
                best_w = w.copy()
            return
        if bound(d, fixed) <= best_val:
            return
        gain = rows[d][d] + lin[d]
        first = 1 if gain > 0 else 0
        for v in (first, 1 - first):
            w[d] = v
            if v:
                for i in range(d + 1, n):
                    lin[i] += 2 * rows[d][i]
                dfs(d + 1, fixed + gain)
                for i in range(d + 1, n):
                    lin[i] -= 2 * rows[d][i]
            else:
                dfs(d + 1, fixed)
        w[d] = 0

    dfs(0, zero)

    w_out = [0] * n
    for pos, i in enumerate(order):
        w_out[i] = best_w[pos]
    value = instance.c + 2 * best_val
    return value, np.array(w_out, dtype=np.int8), not exhausted


@dataclass(frozen=True)
class LocalBound:
    value: object
    strategy: DeterministicStrategy
    exact: bool


def local_bound(functional, node_budget=5_000_000):
    """Exact local bound max_d <M, d> of a Bell functional.

    Bipartite no-marginal functionals go through the QUBO branch and bound;
    everything else is enumerated exhaustively (N*m <= 26).  Non-integer
    functionals are solved in floating point and flagged inexact.
    """
    if not isinstance(functional, BellFunctional):
        functional = BellFunctional(functional)
    sc = functional.scenario
    integer = functional.is_integer

    if sc.parties == 2 and not sc.marginals:
        M = functional.integer_array() if integer else functional.tensor.entries
        inst = to_qubo(M)
        value, wvec, optimal = qubo_branch_and_bound(inst, node_budget)
        m = sc.inputs
        a = 2 * wvec[:m].astype(int) - 1
        b = 2 * wvec[m:].astype(int) - 1
        strategy = DeterministicStrategy.from_signs([list(a), list(b)])
        return LocalBound(value, strategy, exact=bool(optimal) and integer)

    neg = CorrelationTensor(sc, -functional.tensor.entries)
    strategy, v = exhaustive_lmo(neg)
    value = -v
    if integer:
        value = int(round(value)) if not isinstance(value, int) else value
    return LocalBound(value, strategy, exact=integer)
