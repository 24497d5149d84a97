"""Preference statements and their compilation into linear constraints.

Everything a decision maker asserts (relative criterion importance, pairwise
interaction, comparisons of alternatives, intensity comparisons) is turned
into rows over the Mobius coefficient vector plus one shared auxiliary
variable epsilon that converts strict inequalities into weak ones.  The
variable layout is fixed:

    [m({1}), ..., m({n}), m({i,j}) in lexicographic pair order, epsilon]

Row order and coefficients are fully deterministic, so compiling the same
statements twice yields bit-identical systems.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .capacity import pair_order, pair_position

#: a model counts as compatible only when the optimal epsilon exceeds this
DEFAULT_EPSILON_MIN = 1e-6
#: artificial ceiling keeping "max epsilon" bounded when no strict row exists
EPSILON_CEILING = 1.0

REL_GE = ">="
REL_EQ = "="

#: hard cap for the monotonicity family enumeration (2^(n-1)-1 sets per criterion)
MAX_CRITERIA = 15


class StatementKind(enum.Enum):
    IMPORTANCE_WEAK = "importance_weak"
    IMPORTANCE_STRICT = "importance_strict"
    IMPORTANCE_EQUAL = "importance_equal"
    SYNERGY = "synergy"
    REDUNDANCY = "redundancy"
    ALT_WEAK = "alt_weak"
    ALT_STRICT = "alt_strict"
    ALT_INDIFFERENT = "alt_indifferent"
    INTENSITY_STRICT = "intensity_strict"
    INTENSITY_EQUAL = "intensity_equal"


_CRITERION_KINDS = {
    StatementKind.IMPORTANCE_WEAK,
    StatementKind.IMPORTANCE_STRICT,
    StatementKind.IMPORTANCE_EQUAL,
    StatementKind.SYNERGY,
    StatementKind.REDUNDANCY,
}
_STRICT_KINDS = {
    StatementKind.IMPORTANCE_STRICT,
    StatementKind.SYNERGY,
    StatementKind.REDUNDANCY,
    StatementKind.ALT_STRICT,
    StatementKind.INTENSITY_STRICT,
}


@dataclass(frozen=True)
class PreferenceStatement:
    """One assertion by the decision maker.

    ``criteria`` holds two indices for importance/interaction statements;
    ``alternatives`` holds two indices for comparisons and four for intensity
    statements ((a, b) vs (s, t) meaning a over b more than s over t).
    ``text`` is the surface form used in provenance tags and error messages.
    """

    kind: StatementKind
    criteria: tuple[int, ...] = ()
    alternatives: tuple[int, ...] = ()
    text: str = ""

    def __post_init__(self):
        if self.kind in _CRITERION_KINDS:
            if len(self.criteria) != 2 or self.alternatives:
                raise ValueError(f"{self.kind.value} needs exactly two criteria")
            if self.criteria[0] == self.criteria[1]:
                raise ValueError("criterion statements need two distinct criteria")
        elif self.kind in (StatementKind.ALT_WEAK, StatementKind.ALT_STRICT, StatementKind.ALT_INDIFFERENT):
            if len(self.alternatives) != 2 or self.criteria:
                raise ValueError(f"{self.kind.value} needs exactly two alternatives")
        else:
            if len(self.alternatives) != 4 or self.criteria:
                raise ValueError(f"{self.kind.value} needs exactly four alternatives")
        if not self.text:
            object.__setattr__(self, "text", self._canonical_text())

    @property
    def is_strict(self) -> bool:
        return self.kind in _STRICT_KINDS

    @property
    def references_alternatives(self) -> bool:
        return bool(self.alternatives)

    def _canonical_text(self) -> str:
        c = [f"g{i + 1}" for i in self.criteria]
        a = [f"a{i + 1}" for i in self.alternatives]
        k = self.kind
        if k is StatementKind.IMPORTANCE_WEAK:
            return f"imp: {c[0]} >= {c[1]}"
        if k is StatementKind.IMPORTANCE_STRICT:
            return f"imp: {c[0]} > {c[1]}"
        if k is StatementKind.IMPORTANCE_EQUAL:
            return f"imp: {c[0]} = {c[1]}"
        if k is StatementKind.SYNERGY:
            return f"synergy: {c[0]},{c[1]}"
        if k is StatementKind.REDUNDANCY:
            return f"redundancy: {c[0]},{c[1]}"
        if k is StatementKind.ALT_WEAK:
            return f"alt: {a[0]} >= {a[1]}"
        if k is StatementKind.ALT_STRICT:
            return f"alt: {a[0]} > {a[1]}"
        if k is StatementKind.ALT_INDIFFERENT:
            return f"alt: {a[0]} = {a[1]}"
        if k is StatementKind.INTENSITY_STRICT:
            return f"int: ({a[0]},{a[1]}) > ({a[2]},{a[3]})"
        return f"int: ({a[0]},{a[1]}) = ({a[2]},{a[3]})"


# ---------------------------------------------------------------------------
# surface syntax
# ---------------------------------------------------------------------------

class StatementSyntaxError(ValueError):
    """Raised when a statement string cannot be parsed; carries the column."""

    def __init__(self, message: str, text: str, column: int = 0):
        self.text = text
        self.column = column
        super().__init__(f"{message} (column {column}): {text!r}")


_PAIR_RE = re.compile(r"^\(([^,()]+),([^,()]+)\)$")


def parse_statement(
    text: str,
    criterion_labels: Sequence[str],
    alternative_labels: Sequence[str] = (),
) -> PreferenceStatement:
    """Parse one statement of the form ``imp: g1 > g2``, ``synergy: g1,g2``,
    ``alt: a16 > a2`` or ``int: (a1,a2) > (a3,a4)``.

    Whitespace-insensitive; identifiers are matched against the given labels.
    """
    raw = text
    if ":" not in text:
        raise StatementSyntaxError("expected '<kind>: <body>'", raw, 0)
    head, _, body = text.partition(":")
    kind_word = head.strip().lower()
    body_offset = len(head) + 1
    cix = {lab: i for i, lab in enumerate(criterion_labels)}
    aix = {lab: i for i, lab in enumerate(alternative_labels)}

    def lookup(token: str, table: dict, what: str, col: int) -> int:
        token = token.strip()
        if token not in table:
            raise StatementSyntaxError(f"unknown {what} {token!r}", raw, col)
        return table[token]

    def split_relation(s: str) -> tuple[str, str, str]:
        for op in (">=", "=", ">"):
            if op in s:
                lhs, _, rhs = s.partition(op)
                return lhs, op, rhs
        raise StatementSyntaxError("expected one of '>', '>=', '='", raw, body_offset)

    body_stripped = body.strip()
    if kind_word == "imp":
        lhs, op, rhs = split_relation(body_stripped)
        i = lookup(lhs, cix, "criterion", body_offset)
        j = lookup(rhs, cix, "criterion", body_offset + len(lhs) + len(op))
        kind = {
            ">": StatementKind.IMPORTANCE_STRICT,
            ">=": StatementKind.IMPORTANCE_WEAK,
            "=": StatementKind.IMPORTANCE_EQUAL,
        }[op]
        return PreferenceStatement(kind=kind, criteria=(i, j), text=text.strip())
    if kind_word in ("synergy", "redundancy"):
        parts = body_stripped.split(",")
        if len(parts) != 2:
            raise StatementSyntaxError("expected two comma-separated criteria", raw, body_offset)
        i = lookup(parts[0], cix, "criterion", body_offset)
        j = lookup(parts[1], cix, "criterion", body_offset + len(parts[0]) + 1)
        kind = StatementKind.SYNERGY if kind_word == "synergy" else StatementKind.REDUNDANCY
        return PreferenceStatement(kind=kind, criteria=(i, j), text=text.strip())
    if kind_word == "alt":
        lhs, op, rhs = split_relation(body_stripped)
        a = lookup(lhs, aix, "alternative", body_offset)
        b = lookup(rhs, aix, "alternative", body_offset + len(lhs) + len(op))
        kind = {
            ">": StatementKind.ALT_STRICT,
            ">=": StatementKind.ALT_WEAK,
            "=": StatementKind.ALT_INDIFFERENT,
        }[op]
        return PreferenceStatement(kind=kind, alternatives=(a, b), text=text.strip())
    if kind_word == "int":
        lhs, op, rhs = split_relation(body_stripped)
        if op == ">=":
            raise StatementSyntaxError("intensity statements support only '>' and '='", raw, body_offset)
        pieces = []
        for side, col in ((lhs, body_offset), (rhs, body_offset + len(lhs) + len(op))):
            m = _PAIR_RE.match(re.sub(r"\s+", "", side))
            if not m:
                raise StatementSyntaxError("expected '(alt,alt)'", raw, col)
            pieces.append(lookup(m.group(1), aix, "alternative", col))
            pieces.append(lookup(m.group(2), aix, "alternative", col))
        kind = StatementKind.INTENSITY_STRICT if op == ">" else StatementKind.INTENSITY_EQUAL
        return PreferenceStatement(kind=kind, alternatives=tuple(pieces), text=text.strip())
    raise StatementSyntaxError(f"unknown statement kind {kind_word!r}", raw, 0)


# ---------------------------------------------------------------------------
# linear constraint systems
# ---------------------------------------------------------------------------

@dataclass
class LinearConstraintSystem:
    """Rows over [singles..., pairs..., epsilon] with provenance tags.

    Relations are ``>=`` or ``=``; every strict-statement row carries -1 in
    the epsilon column and all other rows carry 0 there.
    """

    n: int
    additivity: int
    matrix: np.ndarray
    relations: list[str]
    rhs: np.ndarray
    tags: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.matrix = np.atleast_2d(np.asarray(self.matrix, dtype=float))
        self.rhs = np.asarray(self.rhs, dtype=float)
        rows = self.matrix.shape[0] if self.matrix.size else 0
        if self.matrix.size == 0:
            self.matrix = np.zeros((0, self.dim))
            rows = 0
        if self.matrix.shape[1] != self.dim:
            raise ValueError(f"rows must have {self.dim} columns, got {self.matrix.shape[1]}")
        if len(self.relations) != rows or self.rhs.shape != (rows,) or len(self.tags) != rows:
            raise ValueError("relations, rhs and tags must match the row count")
        for rel in self.relations:
            if rel not in (REL_GE, REL_EQ):
                raise ValueError(f"unknown relation {rel!r}")
        eps = self.matrix[:, -1] if rows else np.zeros(0)
        if rows and not np.all(np.isin(eps, (0.0, -1.0))):
            raise ValueError("epsilon column entries must be 0 or -1")

    @property
    def num_pairs(self) -> int:
        return self.n * (self.n - 1) // 2 if self.additivity == 2 else 0

    @property
    def num_mobius(self) -> int:
        return self.n + self.num_pairs

    @property
    def dim(self) -> int:
        """Row width: Mobius coefficients plus the epsilon column."""
        return self.num_mobius + 1

    @property
    def num_rows(self) -> int:
        return self.matrix.shape[0]

    def variable_names(self) -> list[str]:
        names = [f"m(g{i + 1})" for i in range(self.n)]
        if self.additivity == 2:
            names += [f"m(g{i + 1},g{j + 1})" for i, j in pair_order(self.n)]
        return names + ["epsilon"]

    def stacked(self, other: "LinearConstraintSystem") -> "LinearConstraintSystem":
        if (other.n, other.additivity) != (self.n, self.additivity):
            raise ValueError("cannot stack systems with different layouts")
        return LinearConstraintSystem(
            n=self.n,
            additivity=self.additivity,
            matrix=np.vstack([self.matrix, other.matrix]) if (self.num_rows or other.num_rows) else self.matrix,
            relations=self.relations + other.relations,
            rhs=np.concatenate([self.rhs, other.rhs]),
            tags=self.tags + other.tags,
        )

    def margins(self, mobius_coeffs: np.ndarray, epsilon: float = 0.0) -> np.ndarray:
        """Row slacks lhs - rhs at a full point (Mobius coefficients, epsilon)."""
        point = np.concatenate([np.asarray(mobius_coeffs, dtype=float), [epsilon]])
        return self.matrix @ point - self.rhs

    def satisfied_by(self, mobius_coeffs: np.ndarray, epsilon: float = 0.0, tol: float = 1e-9) -> bool:
        slack = self.margins(mobius_coeffs, epsilon)
        for r, rel in enumerate(self.relations):
            if rel == REL_EQ and abs(slack[r]) > tol:
                return False
            if rel == REL_GE and slack[r] < -tol:
                return False
        return True


def _empty_system(n: int, additivity: int) -> LinearConstraintSystem:
    return LinearConstraintSystem(
        n=n, additivity=additivity,
        matrix=np.zeros((0, n + (n * (n - 1) // 2 if additivity == 2 else 0) + 1)),
        relations=[], rhs=np.zeros(0), tags=[],
    )


def compile_mb(n: int, additivity: int = 2, labels: Optional[Sequence[str]] = None) -> LinearConstraintSystem:
    """Boundary and monotonicity rows shared by every problem.

    One normalization equality (all coefficients sum to 1), nonnegativity of
    the singletons, and for 2-additive capacities the full family
    m({i}) + sum_{j in T} m({i,j}) >= 0 over every nonempty T not containing
    i.  The family enumeration is capped at n <= 15.
    """
    if n < 2:
        raise ValueError("need at least two criteria")
    if n > MAX_CRITERIA:
        raise ValueError(f"monotonicity enumeration is capped at n <= {MAX_CRITERIA}")
    labels = list(labels) if labels is not None else [f"g{i + 1}" for i in range(n)]
    if len(labels) != n:
        raise ValueError("one label per criterion required")
    sys0 = _empty_system(n, additivity)
    dim = sys0.dim
    rows, relations, rhs, tags = [], [], [], []

    norm = np.zeros(dim)
    norm[: sys0.num_mobius] = 1.0
    rows.append(norm)
    relations.append(REL_EQ)
    rhs.append(1.0)
    tags.append("MB:norm")

    for i in range(n):
        r = np.zeros(dim)
        r[i] = 1.0
        rows.append(r)
        relations.append(REL_GE)
        rhs.append(0.0)
        tags.append(f"MB:nonneg:{labels[i]}")

    if additivity == 2:
        for i in range(n):
            others = [j for j in range(n) if j != i]
            for mask in range(1, 1 << len(others)):
                members = [others[k] for k in range(len(others)) if mask & (1 << k)]
                r = np.zeros(dim)
                r[i] = 1.0
                for j in members:
                    r[n + pair_position(n, i, j)] = 1.0
                rows.append(r)
                relations.append(REL_GE)
                rhs.append(0.0)
                tags.append(f"MB:mono:{labels[i]}|{{{','.join(labels[j] for j in members)}}}")

    return LinearConstraintSystem(
        n=n, additivity=additivity, matrix=np.array(rows),
        relations=relations, rhs=np.array(rhs), tags=tags,
    )


def _shapley_row(n: int, additivity: int, i: int, sign: float, row: np.ndarray):
    """Add sign * shapley(i) to a coefficient row."""
    row[i] += sign
    if additivity == 2:
        for j in range(n):
            if j != i:
                row[n + pair_position(n, i, j)] += 0.5 * sign


def _choquet_row(features: np.ndarray, a: int, b: int, sign: float, row: np.ndarray, num_mobius: int):
    """Add sign * (C(a) - C(b)) to a coefficient row, given the feature matrix."""
    row[:num_mobius] += sign * (features[a] - features[b])


def compile_preferences(
    statements: Sequence[PreferenceStatement],
    n: int,
    evals: Optional[np.ndarray] = None,
    additivity: int = 2,
) -> LinearConstraintSystem:
    """Rows for the importance/interaction and alternative-comparison blocks.

    ``evals`` must be a point-valued (l, n) matrix whenever any statement
    references alternatives; importance rows expand through the Shapley
    value, comparison rows through the Choquet integral features of the
    referenced alternatives.
    """
    from .capacity import choquet_features

    sys0 = _empty_system(n, additivity)
    dim, num_mobius = sys0.dim, sys0.num_mobius
    features = None
    if any(s.references_alternatives for s in statements):
        if evals is None:
            raise ValueError("alternative statements require a point evaluation matrix")
        evals = np.asarray(evals, dtype=float)
        if evals.ndim != 2 or evals.shape[1] != n:
            raise ValueError(f"evaluation matrix must be (alternatives, {n})")
        features = choquet_features(evals, n, additivity)

    rows, relations, rhs, tags = [], [], [], []
    for s in statements:
        row = np.zeros(dim)
        rel = REL_GE
        k = s.kind
        if k in (StatementKind.IMPORTANCE_WEAK, StatementKind.IMPORTANCE_STRICT, StatementKind.IMPORTANCE_EQUAL):
            i, j = s.criteria
            _shapley_row(n, additivity, i, +1.0, row)
            _shapley_row(n, additivity, j, -1.0, row)
            if k is StatementKind.IMPORTANCE_EQUAL:
                rel = REL_EQ
        elif k in (StatementKind.SYNERGY, StatementKind.REDUNDANCY):
            if additivity != 2:
                raise ValueError("interaction statements need a 2-additive capacity")
            i, j = s.criteria
            sign = 1.0 if k is StatementKind.SYNERGY else -1.0
            row[n + pair_position(n, i, j)] = sign
        elif k in (StatementKind.ALT_WEAK, StatementKind.ALT_STRICT, StatementKind.ALT_INDIFFERENT):
            a, b = s.alternatives
            for x in (a, b):
                if not (0 <= x < features.shape[0]):
                    raise IndexError(f"alternative index {x} out of range")
            _choquet_row(features, a, b, +1.0, row, num_mobius)
            if k is StatementKind.ALT_INDIFFERENT:
                rel = REL_EQ
        else:
            a, b, s2, t2 = s.alternatives
            for x in (a, b, s2, t2):
                if not (0 <= x < features.shape[0]):
                    raise IndexError(f"alternative index {x} out of range")
            _choquet_row(features, a, b, +1.0, row, num_mobius)
            _choquet_row(features, s2, t2, -1.0, row, num_mobius)
            if k is StatementKind.INTENSITY_EQUAL:
                rel = REL_EQ
        if s.is_strict:
            row[-1] = -1.0
        block = "C" if k in _CRITERION_KINDS else "A"
        rows.append(row)
        relations.append(rel)
        rhs.append(0.0)
        tags.append(f"{block}:{s.text}")

    if not rows:
        return sys0
    return LinearConstraintSystem(
        n=n, additivity=additivity, matrix=np.array(rows),
        relations=relations, rhs=np.array(rhs), tags=tags,
    )


def compile_system(
    statements: Sequence[PreferenceStatement],
    n: int,
    evals: Optional[np.ndarray] = None,
    additivity: int = 2,
    labels: Optional[Sequence[str]] = None,
) -> LinearConstraintSystem:
    """Full constraint system: boundary/monotonicity block plus statements."""
    return compile_mb(n, additivity, labels).stacked(
        compile_preferences(statements, n, evals=evals, additivity=additivity)
    )


# ---------------------------------------------------------------------------
# compatibility check
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CompatibilityResult:
    """Outcome of maximizing epsilon over a compiled system."""

    status: str  # "compatible" | "incompatible" | "infeasible"
    epsilon_star: Optional[float]
    point: Optional[np.ndarray]  # Mobius coefficients at the optimum
    suspect_rows: tuple[str, ...] = ()

    @property
    def compatible(self) -> bool:
        return self.status == "compatible"


def check_compatibility(
    system: LinearConstraintSystem,
    epsilon_min: float = DEFAULT_EPSILON_MIN,
) -> CompatibilityResult:
    """Maximize the shared epsilon over the system (epsilon in [0, 1]).

    Compatible iff the LP is feasible and the optimum exceeds
    ``epsilon_min``.  Requires the boundary/monotonicity block to be part of
    the system, otherwise the LP may be unbounded in the Mobius directions.
    """
    from .linprog import LpProblem, solve

    if not any(t.startswith("MB:") for t in system.tags):
        raise ValueError("system must include the boundary/monotonicity block")
    dim = system.dim
    c = np.zeros(dim)
    c[-1] = 1.0
    bounds: list[tuple[Optional[float], Optional[float]]] = [(None, None)] * (dim - 1)
    bounds.append((0.0, EPSILON_CEILING))
    problem = LpProblem(
        c=c,
        A=system.matrix,
        relations=list(system.relations),
        b=system.rhs.copy(),
        bounds=bounds,
        row_tags=list(system.tags),
    )
    sol = solve(problem)
    if sol.status == "infeasible":
        return CompatibilityResult("infeasible", None, None, tuple(sol.suspect_rows))
    if sol.status != "optimal":
        raise RuntimeError(f"compatibility LP failed: {sol.status} ({sol.diagnostics})")
    eps = float(sol.value)
    status = "compatible" if eps > epsilon_min else "incompatible"
    return CompatibilityResult(status, eps, sol.x[:-1].copy())
