"""Criteria, alternatives and 2-additive capacities in Mobius form.

A capacity (fuzzy measure) assigns a weight mu(S) in [0, 1] to every subset
of criteria, with mu(empty) = 0, mu(G) = 1 and monotonicity under set
inclusion.  Its Mobius representation m gives mu(S) = sum of m(T) over
T subseteq S.  For 2-additive capacities only singletons and unordered pairs
carry mass, which is the parameter space sampled by the rest of the package.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

#: tolerance for constraint satisfaction checks
FEASIBILITY_TOL = 1e-9
#: tolerance for algebraic round trips (Mobius <-> capacity)
ROUNDTRIP_TOL = 1e-12


@dataclass(frozen=True)
class Criterion:
    """A criterion with a dense 0-based index and a unique display label."""

    index: int
    label: str
    direction: str = "maximize"  # "maximize" or "minimize"

    def __post_init__(self):
        if self.direction not in ("maximize", "minimize"):
            raise ValueError(f"unknown direction {self.direction!r}")


@dataclass(frozen=True)
class Alternative:
    """An alternative with a dense 0-based index and a unique display label."""

    index: int
    label: str


def pair_order(n: int) -> list[tuple[int, int]]:
    """Lexicographic order of unordered criterion pairs: (0,1), (0,2), ..."""
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def pair_position(n: int, i: int, j: int) -> int:
    """Position of pair {i, j} inside ``pair_order(n)``."""
    if i == j:
        raise ValueError("a pair needs two distinct criteria")
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"criterion index out of range for n={n}")
    a, b = (i, j) if i < j else (j, i)
    # pairs with first element < a, then offset within the a-block
    return a * n - a * (a + 1) // 2 + (b - a - 1)


@dataclass(frozen=True)
class MobiusCapacity:
    """Mobius coefficients of a 1- or 2-additive capacity.

    ``singles[i]`` is m({i}) and ``pairs[(i, j)]`` with i < j is m({i, j}).
    Instances are immutable values; validity (normalization to 1 and the
    monotonicity family) is checked separately by :func:`validate` because
    invalid coefficient vectors are legitimate data, e.g. while reporting
    which constraint a hand-entered capacity violates.
    """

    n: int
    singles: tuple[float, ...]
    pairs: Mapping[tuple[int, int], float] = field(default_factory=dict)
    additivity: int = 2

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one criterion")
        if self.additivity not in (1, 2):
            raise ValueError("only 1- and 2-additive capacities are supported")
        if len(self.singles) != self.n:
            raise ValueError("one singleton coefficient per criterion required")
        object.__setattr__(self, "singles", tuple(float(v) for v in self.singles))
        canon = {}
        for (i, j), v in dict(self.pairs).items():
            if i == j:
                raise ValueError("pair coefficients need two distinct criteria")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise IndexError(f"criterion index out of range for n={self.n}")
            key = (i, j) if i < j else (j, i)
            if key in canon and canon[key] != float(v):
                raise ValueError(f"conflicting values for pair {key}")
            canon[key] = float(v)
        if self.additivity == 1 and any(v != 0.0 for v in canon.values()):
            raise ValueError("1-additive capacities cannot carry pair coefficients")
        object.__setattr__(self, "pairs", canon)

    # -- vector form -------------------------------------------------------

    def coefficients(self) -> np.ndarray:
        """Dense coefficient vector: singles then pairs in lexicographic order."""
        if self.additivity == 1:
            return np.asarray(self.singles, dtype=float)
        tail = [self.pairs.get(p, 0.0) for p in pair_order(self.n)]
        return np.asarray(list(self.singles) + tail, dtype=float)

    @classmethod
    def from_coefficients(cls, n: int, coeffs: Sequence[float], additivity: int = 2) -> "MobiusCapacity":
        coeffs = np.asarray(coeffs, dtype=float)
        if additivity == 1:
            if coeffs.shape != (n,):
                raise ValueError("expected one coefficient per criterion")
            return cls(n=n, singles=tuple(coeffs), pairs={}, additivity=1)
        expected = n + n * (n - 1) // 2
        if coeffs.shape != (expected,):
            raise ValueError(f"expected {expected} coefficients, got {coeffs.shape}")
        pairs = {p: float(coeffs[n + c]) for c, p in enumerate(pair_order(n)) if coeffs[n + c] != 0.0}
        return cls(n=n, singles=tuple(coeffs[:n]), pairs=pairs, additivity=additivity)

    def pair_value(self, i: int, j: int) -> float:
        key = (i, j) if i < j else (j, i)
        return self.pairs.get(key, 0.0)


# ---------------------------------------------------------------------------
# capacity values from Mobius coefficients and back
# ---------------------------------------------------------------------------

def mu_from_mobius(m: MobiusCapacity, subset: Iterable[int]) -> float:
    """Capacity value mu(S) = sum of singles in S plus pairs inside S."""
    s = sorted(set(subset))
    for i in s:
        if not (0 <= i < m.n):
            raise IndexError(f"criterion index {i} out of range for n={m.n}")
    total = sum(m.singles[i] for i in s)
    for i, j in itertools.combinations(s, 2):
        total += m.pair_value(i, j)
    return total


@dataclass(frozen=True)
class CapacityView:
    """Explicit table of mu(S) for every subset S, keyed by bitmask."""

    n: int
    values: Mapping[int, float]

    def __post_init__(self):
        full = (1 << self.n) - 1
        vals = dict(self.values)
        if set(vals) != set(range(full + 1)):
            raise ValueError("a value is required for every subset")
        object.__setattr__(self, "values", vals)

    def mu(self, subset: Iterable[int]) -> float:
        mask = 0
        for i in subset:
            if not (0 <= i < self.n):
                raise IndexError(f"criterion index {i} out of range for n={self.n}")
            mask |= 1 << i
        return self.values[mask]

    def check(self, tol: float = FEASIBILITY_TOL) -> list[str]:
        """Violated boundary/monotonicity conditions, as human-readable strings."""
        problems = []
        full = (1 << self.n) - 1
        if abs(self.values[0]) > tol:
            problems.append(f"mu(empty) = {self.values[0]!r}, expected 0")
        if abs(self.values[full] - 1.0) > tol:
            problems.append(f"mu(all criteria) = {self.values[full]!r}, expected 1")
        for mask in range(full + 1):
            for i in range(self.n):
                if mask & (1 << i):
                    continue
                bigger = mask | (1 << i)
                if self.values[mask] > self.values[bigger] + tol:
                    problems.append(
                        f"monotonicity: mu({_mask_repr(mask, self.n)}) > "
                        f"mu({_mask_repr(bigger, self.n)})"
                    )
        return problems

    def is_monotone(self, tol: float = FEASIBILITY_TOL) -> bool:
        return not self.check(tol)


def _mask_repr(mask: int, n: int) -> str:
    members = [f"g{i + 1}" for i in range(n) if mask & (1 << i)]
    return "{" + ",".join(members) + "}"


def capacity_view(m: MobiusCapacity) -> CapacityView:
    """Expand Mobius coefficients to the full subset table (2^n entries)."""
    if m.n > 20:
        raise ValueError("full subset expansion is limited to n <= 20")
    values = {0: 0.0}
    for mask in range(1, 1 << m.n):
        members = [i for i in range(m.n) if mask & (1 << i)]
        values[mask] = mu_from_mobius(m, members)
    return CapacityView(n=m.n, values=values)


def mobius_from_capacity(view: CapacityView) -> dict[int, float]:
    """General Mobius map of an arbitrary capacity, keyed by subset bitmask.

    m(S) = sum over T subseteq S of (-1)^(|S|-|T|) mu(T); inverts
    :func:`mu_from_full_mobius` exactly on every subset.
    """
    n = view.n
    out: dict[int, float] = {}
    for mask in range(1 << n):
        total = 0.0
        sub = mask
        # iterate all submasks of mask, including 0 and mask itself
        while True:
            sign = -1.0 if (bin(mask ^ sub).count("1") % 2) else 1.0
            total += sign * view.values[sub]
            if sub == 0:
                break
            sub = (sub - 1) & mask
        out[mask] = total
    return out


def mu_from_full_mobius(mobius: Mapping[int, float], subset_mask: int) -> float:
    """mu(S) = sum of m(T) over submasks T of S, for a general Mobius map."""
    total = 0.0
    sub = subset_mask
    while True:
        total += mobius.get(sub, 0.0)
        if sub == 0:
            break
        sub = (sub - 1) & subset_mask
    return total


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    """One violated constraint together with how far outside it sits."""

    name: str
    margin: float
    detail: str


def validate(m: MobiusCapacity, tol: float = FEASIBILITY_TOL, method: str = "shortcut") -> list[Violation]:
    """Check normalization and the monotonicity family of a Mobius capacity.

    Returns an empty list iff the capacity is valid within ``tol``.  The
    monotonicity family m({i}) + sum_{j in T} m({i,j}) >= 0 for every
    nonempty T is equivalent to checking the single worst set
    T* = {j : m({i,j}) < 0}; ``method="full"`` enumerates every T instead
    (exponential, kept for cross-checking the shortcut on small n).
    """
    if method not in ("shortcut", "full"):
        raise ValueError("method must be 'shortcut' or 'full'")
    out: list[Violation] = []
    coeffs = m.coefficients()
    total = float(coeffs.sum())
    if abs(total - 1.0) > tol:
        out.append(Violation("normalization", total - 1.0, f"coefficients sum to {total!r}, expected 1"))
    for i in range(m.n):
        if m.singles[i] < -tol:
            out.append(Violation(f"nonneg:g{i + 1}", m.singles[i], f"m({{g{i + 1}}}) = {m.singles[i]!r} < 0"))
    if m.additivity == 1:
        return out
    for i in range(m.n):
        others = [j for j in range(m.n) if j != i]
        if method == "shortcut":
            worst = [j for j in others if m.pair_value(i, j) < 0.0]
            candidates = [worst] if worst else []
        else:
            candidates = [list(t) for size in range(1, m.n) for t in itertools.combinations(others, size)]
        for t in candidates:
            lhs = m.singles[i] + sum(m.pair_value(i, j) for j in t)
            if lhs < -tol:
                members = ",".join(f"g{j + 1}" for j in t)
                out.append(
                    Violation(
                        f"monotone:g{i + 1}|{{{members}}}",
                        lhs,
                        f"m({{g{i + 1}}}) + pair terms over {{{members}}} = {lhs!r} < 0",
                    )
                )
    return out


def is_valid(m: MobiusCapacity, tol: float = FEASIBILITY_TOL) -> bool:
    return not validate(m, tol=tol)


# ---------------------------------------------------------------------------
# aggregation
# ---------------------------------------------------------------------------

def choquet_capacity(x: Sequence[float], view: CapacityView) -> float:
    """Choquet integral from the capacity table.

    Sorts the evaluations ascending (stable: by value, then criterion index)
    and accumulates [x_(i) - x_(i-1)] * mu({criteria at position >= i}) with
    x_(0) = 0, which requires nonnegative evaluations.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (view.n,):
        raise ValueError(f"expected {view.n} evaluations, got shape {x.shape}")
    if np.any(x < 0):
        raise ValueError("evaluations must be nonnegative; shift the scale first")
    order = sorted(range(view.n), key=lambda i: (x[i], i))
    total = 0.0
    prev = 0.0
    mask = sum(1 << i for i in order)
    for pos in range(view.n):
        i = order[pos]
        total += (x[i] - prev) * view.values[mask]
        prev = x[i]
        mask &= ~(1 << i)
    return total


def choquet_mobius(x: Sequence[float], m: MobiusCapacity) -> float:
    """Choquet integral from Mobius coefficients.

    sum_i m({i}) x_i + sum_{i<j} m({i,j}) min(x_i, x_j); collapses to the
    plain dot product for 1-additive capacities.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (m.n,):
        raise ValueError(f"expected {m.n} evaluations, got shape {x.shape}")
    if np.any(x < 0):
        raise ValueError("evaluations must be nonnegative; shift the scale first")
    total = float(np.dot(m.singles, x))
    for (i, j), v in m.pairs.items():
        total += v * min(x[i], x[j])
    return total


def choquet_features(evals: np.ndarray, n: int, additivity: int = 2) -> np.ndarray:
    """Per-alternative linear features of the Mobius vector.

    For an (l, n) evaluation matrix returns the (l, n + n(n-1)/2) matrix F
    with columns [x_i..., min(x_i, x_j)...] so the Choquet values of all
    alternatives are ``F @ coefficients``.  Accepts stacked matrices of
    shape (..., l, n) as well.
    """
    evals = np.asarray(evals, dtype=float)
    if evals.shape[-1] != n:
        raise ValueError(f"expected {n} columns, got {evals.shape[-1]}")
    if additivity == 1:
        return evals.copy()
    pairs = pair_order(n)
    out = np.empty(evals.shape[:-1] + (n + len(pairs),), dtype=float)
    out[..., :n] = evals
    for c, (i, j) in enumerate(pairs):
        np.minimum(evals[..., i], evals[..., j], out=out[..., n + c])
    return out


def shapley(m: MobiusCapacity, i: int) -> float:
    """Overall importance of criterion i: m({i}) plus half of its pair terms."""
    if not (0 <= i < m.n):
        raise IndexError(f"criterion index {i} out of range for n={m.n}")
    return m.singles[i] + 0.5 * sum(m.pair_value(i, j) for j in range(m.n) if j != i)


def interaction(m: MobiusCapacity, i: int, j: int) -> float:
    """Signed pairwise interaction, m({i,j}); symmetric in its arguments."""
    if i == j:
        raise ValueError("interaction needs two distinct criteria")
    if not (0 <= i < m.n and 0 <= j < m.n):
        raise IndexError(f"criterion index out of range for n={m.n}")
    return m.pair_value(i, j)


def shapley_vector(m: MobiusCapacity) -> np.ndarray:
    return np.array([shapley(m, i) for i in range(m.n)])


def uniform_capacity(n: int, additivity: int = 2) -> MobiusCapacity:
    """The additive capacity giving every criterion weight 1/n."""
    return MobiusCapacity(n=n, singles=tuple(1.0 / n for _ in range(n)), pairs={}, additivity=additivity)
