"""Self-contained dense linear programming via two-phase primal simplex.

Small, deterministic and exact at vertices, which is what the compatibility
threshold on epsilon needs.  Bland's anti-cycling rule picks the entering
column, ratio-test ties break on the lowest row index, and free variables
are split into differences of nonnegatives, so identical problems always
produce identical pivot sequences.

The pivot loop itself lives in the kernel backend (compiled when available).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ._kernels import active_backend

PIVOT_TOL = 1e-9
DEFAULT_MAX_PIVOTS = 50_000

STATUS_OPTIMAL = "optimal"
STATUS_INFEASIBLE = "infeasible"
STATUS_UNBOUNDED = "unbounded"
STATUS_ITERATION_LIMIT = "iteration_limit"


@dataclass
class LpProblem:
    """Maximize ``c @ x`` subject to ``A x (rel) b`` and per-variable bounds.

    ``relations`` entries are ``">="`` or ``"="``; bounds are (lo, hi) pairs
    with ``None`` for unbounded sides.  ``row_tags`` carry provenance through
    infeasibility diagnostics.
    """

    c: np.ndarray
    A: np.ndarray
    relations: list[str]
    b: np.ndarray
    bounds: list[tuple[Optional[float], Optional[float]]]
    row_tags: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        self.A = np.atleast_2d(np.asarray(self.A, dtype=float))
        self.b = np.asarray(self.b, dtype=float)
        nvars = self.c.shape[0]
        if nvars < 1:
            raise ValueError("need at least one variable")
        if self.A.size == 0:
            self.A = np.zeros((0, nvars))
        if self.A.shape[1] != nvars:
            raise ValueError("A and c disagree on the variable count")
        m = self.A.shape[0]
        if self.b.shape != (m,) or len(self.relations) != m:
            raise ValueError("A, b and relations disagree on the row count")
        if len(self.bounds) != nvars:
            raise ValueError("one (lo, hi) bound pair per variable required")
        if not self.row_tags:
            self.row_tags = [f"row{i}" for i in range(m)]
        for rel in self.relations:
            if rel not in (">=", "=", "<="):
                raise ValueError(f"unknown relation {rel!r}")


@dataclass(frozen=True)
class LpSolution:
    status: str
    value: Optional[float]
    x: Optional[np.ndarray]
    pivots: int = 0
    suspect_rows: tuple[str, ...] = ()
    diagnostics: str = ""


def _pivot_loop(T: np.ndarray, basis: np.ndarray, end_col: int, tol: float, max_pivots: int):
    """Dispatch the hot loop to the active kernel backend."""
    return active_backend().simplex_pivot_loop(T, basis, end_col, tol, max_pivots)


def solve(problem: LpProblem, tol: float = PIVOT_TOL, max_pivots: int = DEFAULT_MAX_PIVOTS) -> LpSolution:
    """Two-phase primal simplex with Bland's rule; see module docstring."""
    nvars = problem.c.shape[0]

    # -- substitute variables so every structural column is >= 0 ------------
    col_map: list[tuple[int, str, float]] = []  # (original var, kind, offset)
    shift_vec = np.zeros(nvars)  # b -= A @ shift_vec
    for k, (lo, hi) in enumerate(problem.bounds):
        if lo is None and hi is None:
            col_map.append((k, "pos", 0.0))
            col_map.append((k, "neg", 0.0))
        elif lo is not None:
            col_map.append((k, "low", lo))
            shift_vec[k] = lo
        else:
            col_map.append((k, "upp", hi))
            shift_vec[k] = hi

    ncols_struct = len(col_map)
    src = np.array([k for k, _, _ in col_map], dtype=np.intp)
    sign = np.array([-1.0 if kind in ("neg", "upp") else 1.0 for _, kind, _ in col_map])

    n_base = problem.A.shape[0]
    box = [(c_idx, k) for c_idx, (k, kind, _) in enumerate(col_map)
           if kind == "low" and problem.bounds[k][1] is not None]
    m = n_base + len(box)
    A_std = np.zeros((m, ncols_struct))
    if n_base:
        A_std[:n_base] = problem.A[:, src] * sign
    b_std = np.empty(m)
    b_std[:n_base] = problem.b - (problem.A @ shift_vec if n_base else 0.0)
    rels = list(problem.relations)
    tags = list(problem.row_tags)
    for r, (c_idx, k) in enumerate(box):
        lo, hi = problem.bounds[k]
        A_std[n_base + r, c_idx] = 1.0
        b_std[n_base + r] = hi - lo
        rels.append("<=")
        tags.append(f"bound:x{k}")

    c_std = problem.c[src] * sign

    # flip rows so the rhs is nonnegative, then turn degenerate ">= 0" rows
    # into "<= 0" so they start with a feasible slack instead of an artificial
    for r in range(m):
        if b_std[r] < 0:
            A_std[r] = -A_std[r]
            b_std[r] = -b_std[r]
            if rels[r] == ">=":
                rels[r] = "<="
            elif rels[r] == "<=":
                rels[r] = ">="
        elif b_std[r] == 0.0 and rels[r] == ">=":
            A_std[r] = -A_std[r]
            rels[r] = "<="

    n_slack = sum(1 for rel in rels if rel != "=")
    n_art = sum(1 for rel in rels if rel != "<=")
    ncols = ncols_struct + n_slack + n_art
    T = np.zeros((m + 1, ncols + 1))
    T[:m, :ncols_struct] = A_std
    T[:m, -1] = b_std
    basis = np.empty(m, dtype=np.int64)
    art_cols: list[int] = []
    art_rows: list[int] = []
    s_at = ncols_struct
    a_at = ncols_struct + n_slack
    for r in range(m):
        if rels[r] == "<=":
            T[r, s_at] = 1.0
            basis[r] = s_at
            s_at += 1
        elif rels[r] == ">=":
            T[r, s_at] = -1.0
            s_at += 1
            T[r, a_at] = 1.0
            basis[r] = a_at
            art_cols.append(a_at)
            art_rows.append(r)
            a_at += 1
        else:
            T[r, a_at] = 1.0
            basis[r] = a_at
            art_cols.append(a_at)
            art_rows.append(r)
            a_at += 1

    pivots_total = 0

    # -- phase one: maximize -(sum of artificials) ---------------------------
    if art_cols:
        obj = np.zeros(ncols + 1)
        for col in art_cols:
            obj[col] = -1.0
        for r in art_rows:
            obj += T[r]  # make reduced costs consistent with the basis
        obj[art_cols] = 0.0
        T[m] = obj
        status, piv = _pivot_loop(T, basis, ncols, tol, max_pivots)
        pivots_total += piv
        if status == 2:
            return LpSolution(STATUS_ITERATION_LIMIT, None, None, pivots_total,
                              diagnostics=_last_pivot_info(basis, tags, m))
        if status == 1:
            raise RuntimeError("phase one cannot be unbounded")
        infeas = sum(T[r, -1] for r in range(m) if basis[r] in art_cols)
        if infeas > 1e-7:
            suspects = tuple(
                tags[r] if r < len(tags) else f"row{r}"
                for r in range(m)
                if basis[r] in art_cols and T[r, -1] > 1e-7
            )
            return LpSolution(STATUS_INFEASIBLE, None, None, pivots_total, suspect_rows=suspects)
        # drive remaining zero-level artificials out of the basis
        art_set = set(art_cols)
        for r in range(m):
            if basis[r] in art_set:
                pivot_col = -1
                for j in range(ncols_struct + n_slack):
                    if abs(T[r, j]) > tol:
                        pivot_col = j
                        break
                if pivot_col >= 0:
                    _apply_pivot(T, r, pivot_col)
                    basis[r] = pivot_col
                    pivots_total += 1
        # remove artificial columns from consideration
        T[:, ncols_struct + n_slack:ncols] = 0.0

    # -- phase two -----------------------------------------------------------
    obj = np.zeros(ncols + 1)
    obj[:ncols_struct] = c_std
    basic_rows = [(r, basis[r]) for r in range(m) if basis[r] < ncols_struct and abs(obj[basis[r]]) > 0]
    for r, col in basic_rows:
        obj -= obj[col] * T[r]
    T[m] = obj
    end_col = ncols_struct + n_slack  # artificials never re-enter
    status, piv = _pivot_loop(T, basis, end_col, tol, max_pivots)
    pivots_total += piv
    if status == 2:
        return LpSolution(STATUS_ITERATION_LIMIT, None, None, pivots_total,
                          diagnostics=_last_pivot_info(basis, tags, m))
    if status == 1:
        return LpSolution(STATUS_UNBOUNDED, None, None, pivots_total)

    x_std = np.zeros(ncols)
    for r in range(m):
        if basis[r] < ncols:
            x_std[basis[r]] = T[r, -1]
    x = np.zeros(nvars)
    for c_idx, (k, kind, off) in enumerate(col_map):
        v = x_std[c_idx]
        if kind == "pos":
            x[k] += v
        elif kind == "neg":
            x[k] -= v
        elif kind == "low":
            x[k] = v + off
        else:
            x[k] = off - v
    value = float(problem.c @ x)
    return LpSolution(STATUS_OPTIMAL, value, x, pivots_total)


def _apply_pivot(T: np.ndarray, row: int, col: int):
    piv_row = T[row] / T[row, col]
    column = T[:, col].copy()
    T -= np.outer(column, piv_row)
    T[row] = piv_row


def _last_pivot_info(basis: np.ndarray, tags: Sequence[str], m: int) -> str:
    names = [tags[r] if r < len(tags) else f"row{r}" for r in range(m)]
    return "pivot cap exceeded; basis rows: " + ", ".join(names[:8]) + ("..." if m > 8 else "")


def verify_solution(problem: LpProblem, sol: LpSolution, tol: float = 1e-7) -> bool:
    """Feasibility certificate: every row and bound holds within ``tol``."""
    if sol.status != STATUS_OPTIMAL or sol.x is None:
        return False
    x = sol.x
    lhs = problem.A @ x
    for r, rel in enumerate(problem.relations):
        if rel == ">=" and lhs[r] < problem.b[r] - tol:
            return False
        if rel == "<=" and lhs[r] > problem.b[r] + tol:
            return False
        if rel == "=" and abs(lhs[r] - problem.b[r]) > tol:
            return False
    for k, (lo, hi) in enumerate(problem.bounds):
        if lo is not None and x[k] < lo - tol:
            return False
        if hi is not None and x[k] > hi + tol:
            return False
    return abs(problem.c @ x - sol.value) <= tol
