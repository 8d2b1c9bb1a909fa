"""Correlation tensors and deterministic strategies for binary-outcome scenarios.

A scenario has N parties, each choosing one of m inputs and answering +1 or -1.
All correlation data lives in a single dense tensor: with marginals enabled the
input index runs over 0..m where index 0 means "party does not measure", so one
array holds every correlator order at once.  The all-zero entry (nobody
measures) is an affine constant equal to 1 on the polytope; it is stored but
excluded from inner products and norms.  Scenarios without marginals keep only
the full-body correlators (indices 1..m, stored 0-based).
"""

import numpy as np
from dataclasses import dataclass
from fractions import Fraction

MAX_ENTRIES = 10**8


@dataclass(frozen=True)
class Scenario:
    """N parties, m inputs each, with or without marginal slots."""

    parties: int
    inputs: int
    marginals: bool = True

    def __post_init__(self):
        if self.parties < 1 or self.inputs < 1:
            raise ValueError("need at least one party and one input")
        if self.num_entries > MAX_ENTRIES:
            raise ValueError(f"tensor would exceed {MAX_ENTRIES} entries")

    @property
    def axis_size(self):
        return self.inputs + 1 if self.marginals else self.inputs

    @property
    def shape(self):
        return (self.axis_size,) * self.parties

    @property
    def num_entries(self):
        return self.axis_size ** self.parties

    @property
    def dimension(self):
        """Dimension of the correlation space (root entry excluded)."""
        if self.marginals:
            return (self.inputs + 1) ** self.parties - 1
        return self.inputs ** self.parties

    @property
    def num_strategies(self):
        return 2 ** (self.parties * self.inputs)


class CorrelationTensor:
    """Dense correlation tensor over a scenario.

    Entries are float64 for solver work or exact ``Fraction`` objects for
    certification.  Instances are treated as immutable.
    """

    __slots__ = ("scenario", "entries")

    def __init__(self, scenario, entries):
        entries = np.asarray(entries)
        if entries.shape != scenario.shape:
            raise ValueError(
                f"entries shape {entries.shape} does not match scenario shape {scenario.shape}"
            )
        if entries.dtype != object:
            entries = entries.astype(np.float64)
        self.scenario = scenario
        self.entries = entries

    @classmethod
    def zeros(cls, scenario, exact=False):
        if exact:
            e = np.full(scenario.shape, Fraction(0), dtype=object)
        else:
            e = np.zeros(scenario.shape)
        return cls(scenario, e)

    @property
    def is_exact(self):
        return self.entries.dtype == object

    @property
    def root(self):
        """The all-zero-index entry, or None without marginal slots."""
        if not self.scenario.marginals:
            return None
        return self.entries[(0,) * self.scenario.parties]

    def to_float(self):
        if not self.is_exact:
            return self
        return CorrelationTensor(self.scenario, self.entries.astype(np.float64))

    def copy(self):
        return CorrelationTensor(self.scenario, self.entries.copy())

    def __add__(self, other):
        _check_same_scenario(self, other)
        return CorrelationTensor(self.scenario, self.entries + other.entries)

    def __sub__(self, other):
        _check_same_scenario(self, other)
        return CorrelationTensor(self.scenario, self.entries - other.entries)


def _check_same_scenario(t1, t2):
    if t1.scenario != t2.scenario:
        raise ValueError("scenario mismatch")


def inner(t1, t2):
    """Euclidean inner product of the vectorised tensors, root entry excluded."""
    _check_same_scenario(t1, t2)
    s = np.dot(t1.entries.reshape(-1), t2.entries.reshape(-1))
    if t1.scenario.marginals:
        s = s - t1.root * t2.root
    return s


def norm2_sq(t):
    """Exact squared 2-norm (root excluded); a Fraction for exact tensors."""
    return inner(t, t)


def norm2(t):
    return float(np.sqrt(float(norm2_sq(t))))


def norm1(t):
    flat = t.entries.reshape(-1)
    s = sum(abs(x) for x in flat) if t.is_exact else np.abs(flat).sum()
    if t.scenario.marginals:
        s = s - abs(t.root)
    return s


def scale(t, v):
    """Multiply every entry by a visibility 0 <= v <= 1 (marginal slots included)."""
    if not 0 <= v <= 1:
        raise ValueError("visibility must lie in [0, 1]")
    if t.is_exact:
        v = Fraction(v) if not isinstance(v, Fraction) else v
    return CorrelationTensor(t.scenario, t.entries * v)


class DeterministicStrategy:
    """One fixed +-1 answer for every input of every party; a polytope vertex.

    Signs are bit-packed, one integer per party: bit x set means input x+1
    answers -1.  Instances are immutable and hashable.
    """

    __slots__ = ("bits", "inputs", "_hash")

    def __init__(self, bits, inputs):
        self.bits = tuple(int(b) for b in bits)
        self.inputs = int(inputs)
        for b in self.bits:
            if not 0 <= b < (1 << self.inputs):
                raise ValueError("packed signs out of range for input count")
        self._hash = hash((self.bits, self.inputs))

    @classmethod
    def from_signs(cls, sign_vectors):
        """Build from per-party iterables of +-1 values."""
        bits = []
        m = None
        for sv in sign_vectors:
            sv = list(sv)
            if m is None:
                m = len(sv)
            elif len(sv) != m:
                raise ValueError("all parties need the same number of inputs")
            b = 0
            for x, s in enumerate(sv):
                if s == -1:
                    b |= 1 << x
                elif s != 1:
                    raise ValueError("signs must be +-1")
            bits.append(b)
        return cls(bits, m)

    @property
    def parties(self):
        return len(self.bits)

    def signs(self, n):
        """Sign vector of party n as an int8 array of +-1."""
        b = self.bits[n]
        out = np.ones(self.inputs, dtype=np.int8)
        for x in range(self.inputs):
            if b >> x & 1:
                out[x] = -1
        return out

    def sign_vectors(self):
        return [self.signs(n) for n in range(self.parties)]

    def flip_parties(self, which):
        """Invert every sign of the listed parties."""
        mask = (1 << self.inputs) - 1
        bits = list(self.bits)
        for n in which:
            bits[n] ^= mask
        return DeterministicStrategy(bits, self.inputs)

    def canonical(self, scenario):
        """Canonical representative of the strategies inducing the same tensor.

        With marginal slots every strategy induces a distinct tensor.  Without
        them, flipping an even number of parties leaves the tensor unchanged,
        so the first sign of every party but the last is forced to +1.
        """
        if scenario.marginals:
            return self
        s = self
        for n in range(self.parties - 1):
            if s.bits[n] & 1:
                s = s.flip_parties([n, self.parties - 1])
        return s

    def to_string(self):
        return "|".join(
            "".join("-" if b >> x & 1 else "+" for x in range(self.inputs))
            for b in self.bits
        )

    @classmethod
    def from_string(cls, text):
        parts = text.strip().split("|")
        m = len(parts[0])
        bits = []
        for p in parts:
            if len(p) != m or set(p) - {"+", "-"}:
                raise ValueError(f"malformed strategy string {text!r}")
            bits.append(sum(1 << x for x, ch in enumerate(p) if ch == "-"))
        return cls(bits, m)

    def __eq__(self, other):
        return (
            isinstance(other, DeterministicStrategy)
            and self.bits == other.bits
            and self.inputs == other.inputs
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"DeterministicStrategy({self.to_string()!r})"


def strategy_tensor(s, scenario, exact=False):
    """Rank-one tensor induced by a strategy; marginal slots contribute factor 1."""
    if s.parties != scenario.parties or s.inputs != scenario.inputs:
        raise ValueError("strategy does not match scenario")
    vecs = []
    for n in range(scenario.parties):
        sv = s.signs(n)
        if scenario.marginals:
            sv = np.concatenate([[1], sv])
        if exact:
            vecs.append(np.array([Fraction(int(x)) for x in sv], dtype=object))
        else:
            vecs.append(sv.astype(np.float64))
    out = vecs[0]
    for v in vecs[1:]:
        out = np.multiply.outer(out, v)
    return CorrelationTensor(scenario, out)


def strategy_inner(s1, s2, scenario):
    """Exact integer inner product of two strategy tensors via popcounts."""
    m = scenario.inputs
    prod = 1
    if scenario.marginals:
        for b1, b2 in zip(s1.bits, s2.bits):
            prod *= 1 + m - 2 * (b1 ^ b2).bit_count()
        return prod - 1
    for b1, b2 in zip(s1.bits, s2.bits):
        prod *= m - 2 * (b1 ^ b2).bit_count()
    return prod


def tensor_strategy_inner(t, s):
    """<t, strategy_tensor(s)> without materialising the strategy tensor.

    Contracts the tensor against the per-party sign vectors; for integer-valued
    tensors the result is exact.
    """
    sc = t.scenario
    arr = t.entries
    for n in range(sc.parties - 1, -1, -1):
        sv = s.signs(n).astype(arr.dtype if arr.dtype != object else np.int64)
        if sc.marginals:
            sv = np.concatenate([[1], sv])
        arr = arr @ sv if arr.ndim > 1 else np.dot(arr, sv)
    if sc.marginals:
        arr = arr - t.root
    return arr


@dataclass(frozen=True)
class QuantumSetup:
    """A shared N-qubit state plus m Bloch vectors per party.

    ``state`` is a complex vector of length 2^N or a density matrix; each row
    of ``bloch[n]`` is a unit vector a with observable a . sigma.
    """

    state: np.ndarray
    bloch: tuple

    def density(self):
        st = np.asarray(self.state, dtype=complex)
        if st.ndim == 1:
            st = st / np.linalg.norm(st)
            return np.outer(st, st.conj())
        return st


_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def bloch_observable(a):
    a = np.asarray(a, dtype=float)
    return a[0] * _PAULI[0] + a[1] * _PAULI[1] + a[2] * _PAULI[2]


def quantum_tensor(setup, scenario, tol=1e-8):
    """Correlation tensor of a quantum setup, entry by the Born rule.

    Index 0 of a party (marginal slot) uses the identity observable.  Raises
    for non-unit Bloch vectors or a state that is not a valid density matrix.
    """
    N, m = scenario.parties, scenario.inputs
    if N > 4:
        raise ValueError("quantum tensors are supported for at most 4 qubits")
    if len(setup.bloch) != N:
        raise ValueError("need one Bloch-vector family per party")
    rho = setup.density()
    if rho.shape != (2**N, 2**N):
        raise ValueError("state dimension does not match party count")
    if np.abs(rho - rho.conj().T).max() > tol:
        raise ValueError("state is not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise ValueError("state trace is not 1")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise ValueError("state is not positive semidefinite")

    ops = []
    for n in range(N):
        vecs = np.asarray(setup.bloch[n], dtype=float)
        if vecs.shape != (m, 3):
            raise ValueError("each party needs m Bloch vectors in R^3")
        lens = np.linalg.norm(vecs, axis=1)
        if np.abs(lens - 1).max() > tol:
            raise ValueError("Bloch vectors must have unit length")
        party_ops = [np.eye(2, dtype=complex)] if scenario.marginals else []
        party_ops += [bloch_observable(v) for v in vecs]
        ops.append(np.stack(party_ops))

    # contract Tr[(A1 x ... x AN) rho] for all input choices in one einsum
    letters = "abcd"
    rho_t = rho.reshape((2,) * (2 * N))
    subs = []
    idx = iter("ijklmnop")
    rows, cols = [], []
    for n in range(N):
        i, j = next(idx), next(idx)
        subs.append(f"{letters[n]}{i}{j}")
        rows.append(j)
        cols.append(i)
    spec = ",".join(subs) + "," + "".join(rows) + "".join(cols) + "->" + letters[:N]
    vals = np.einsum(spec, *ops, rho_t)
    if np.abs(vals.imag).max() > 1e-12:
        raise ValueError("correlation tensor has a non-negligible imaginary part")
    return CorrelationTensor(scenario, vals.real)


# --- text serialisation ---------------------------------------------------


def _format_value(x):
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _parse_value(tok):
    if "/" in tok:
        return Fraction(tok)
    if "." in tok or "e" in tok or "E" in tok or "inf" in tok or "nan" in tok:
        return float(tok)
    return int(tok)


def write_tensor(t, fp):
    """Write the header line ``N m marginals`` then entries in row-major order."""
    sc = t.scenario
    fp.write(f"{sc.parties} {sc.inputs} {'true' if sc.marginals else 'false'}\n")
    flat = t.entries.reshape(-1)
    for start in range(0, flat.size, sc.axis_size):
        fp.write(" ".join(_format_value(x) for x in flat[start : start + sc.axis_size]))
        fp.write("\n")


def read_tensor(fp):
    tokens = fp.read().split()
    if len(tokens) < 3:
        raise ValueError("truncated tensor file")
    N, m = int(tokens[0]), int(tokens[1])
    marg = tokens[2].lower()
    if marg not in ("true", "false", "0", "1"):
        raise ValueError(f"bad marginals flag {tokens[2]!r}")
    sc = Scenario(N, m, marg in ("true", "1"))
    vals = [_parse_value(tok) for tok in tokens[3:]]
    if len(vals) != sc.num_entries:
        raise ValueError(f"expected {sc.num_entries} entries, found {len(vals)}")
    if any(isinstance(v, Fraction) for v in vals):
        arr = np.array([Fraction(v) for v in vals], dtype=object)
    elif all(isinstance(v, int) for v in vals):
        arr = np.array(vals, dtype=object)
    else:
        arr = np.array(vals, dtype=float)
    return CorrelationTensor(sc, arr.reshape(sc.shape))
