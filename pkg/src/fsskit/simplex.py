"""Dense two-phase simplex for small linear programs.

Solves  maximize c.x  subject to  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0.

Phase 1 minimizes the sum of artificial variables to find a basic feasible
point; phase 2 optimizes the real objective from there. Pivoting follows
Bland's rule (lowest eligible index enters, lowest-index basic variable
leaves on ratio ties), which cannot cycle and makes the pivot sequence a
pure function of the input, at the cost of more iterations than steepest
descent rules. The programs this package generates have a handful of rows,
so robustness wins over speed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ComputationError, InfeasibleProgramError, InputError, UnboundedProgramError

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-7


@dataclass(frozen=True)
class LinearProgram:
    """maximize c.x with nonnegative x; either constraint block may be absent."""

    c: np.ndarray
    a_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    a_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None

    def validated(self) -> "LinearProgram":
        c = np.asarray(self.c, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise InputError("objective must be a non-empty vector")
        blocks = []
        for a, b, kind in ((self.a_ub, self.b_ub, "ub"), (self.a_eq, self.b_eq, "eq")):
            if (a is None) != (b is None):
                raise InputError(f"{kind} constraints need both matrix and bounds")
            if a is None:
                blocks.append((None, None))
                continue
            a = np.asarray(a, dtype=float)
            b = np.asarray(b, dtype=float)
            if a.ndim != 2 or b.ndim != 1 or a.shape[0] != b.size or a.shape[1] != c.size:
                raise InputError(f"{kind} constraint shapes are inconsistent")
            blocks.append((a, b))
        if not np.all(np.isfinite(c)):
            raise InputError("objective has non-finite entries")
        for a, b in blocks:
            if a is not None and not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
                raise InputError("constraints have non-finite entries")
        return LinearProgram(c=c, a_ub=blocks[0][0], b_ub=blocks[0][1],
                             a_eq=blocks[1][0], b_eq=blocks[1][1])


@dataclass(frozen=True)
class LPSolution:
    x: np.ndarray
    objective: float
    iterations: int


def _pivot(tableau: np.ndarray, basis: list[int], row: int, col: int):
    tableau[row] /= tableau[row, col]
    for r in range(tableau.shape[0]):
        if r != row and tableau[r, col] != 0.0:
            tableau[r] -= tableau[r, col] * tableau[row]
    basis[row] = col


def _run(tableau: np.ndarray, basis: list[int], n_cols: int, max_iter: int) -> int:
    """Minimize the tableau's objective row in place. Returns iteration count."""
    m = tableau.shape[0] - 1
    for iteration in range(max_iter):
        # Bland: first column with a negative reduced cost.
        col = -1
        for j in range(n_cols):
            if tableau[m, j] < -PIVOT_TOL:
                col = j
                break
        if col < 0:
            return iteration
        row, best = -1, np.inf
        for i in range(m):
            a = tableau[i, col]
            if a > PIVOT_TOL:
                ratio = tableau[i, -1] / a
                if ratio < best - PIVOT_TOL or (abs(ratio - best) <= PIVOT_TOL
                                                and (row < 0 or basis[i] < basis[row])):
                    row, best = i, ratio
        if row < 0:
            raise UnboundedProgramError("objective is unbounded above")
        _pivot(tableau, basis, row, col)
    raise ComputationError(f"simplex did not converge within {max_iter} pivots")


def solve_lp(lp: LinearProgram, max_iter: int = 100_000) -> LPSolution:
    lp = lp.validated()
    n = lp.c.size
    n_ub = 0 if lp.a_ub is None else lp.a_ub.shape[0]
    n_eq = 0 if lp.a_eq is None else lp.a_eq.shape[0]
    m = n_ub + n_eq
    if m == 0:
        # Only x >= 0 constrains the problem: bounded iff no positive cost.
        if np.any(lp.c > 0):
            raise UnboundedProgramError("objective is unbounded above")
        return LPSolution(x=np.zeros(n), objective=0.0, iterations=0)

    # Equality form: slacks on the <= rows, then flip rows to make b >= 0,
    # then one artificial per row for a trivially feasible starting basis.
    a = np.zeros((m, n + n_ub))
    b = np.zeros(m)
    if n_ub:
        a[:n_ub, :n] = lp.a_ub
        a[:n_ub, n:n + n_ub] = np.eye(n_ub)
        b[:n_ub] = lp.b_ub
    if n_eq:
        a[n_ub:, :n] = lp.a_eq
        b[n_ub:] = lp.b_eq
    negative = b < 0
    a[negative] *= -1.0
    b[negative] *= -1.0

    n_real = n + n_ub
    tableau = np.zeros((m + 1, n_real + m + 1))
    tableau[:m, :n_real] = a
    tableau[:m, n_real:n_real + m] = np.eye(m)
    tableau[:m, -1] = b
    basis = [n_real + i for i in range(m)]

    # Phase 1 objective: sum of artificials, expressed in the current basis.
    tableau[m, n_real:n_real + m] = 1.0
    for i in range(m):
        tableau[m] -= tableau[i]
    tableau[m, n_real:n_real + m] = 0.0  # keep artificial reduced costs at zero exactly
    iters = _run(tableau, basis, n_real, max_iter)
    if -tableau[m, -1] > FEAS_TOL:
        raise InfeasibleProgramError(
            f"constraints are infeasible (phase-1 residual {-tableau[m, -1]:.3g})"
        )

    # Drive leftover artificials out of the basis; rows that cannot pivot on
    # any real column are redundant constraints and carry a zero artificial.
    for i in range(m):
        if basis[i] >= n_real:
            for j in range(n_real):
                if abs(tableau[i, j]) > PIVOT_TOL:
                    _pivot(tableau, basis, i, j)
                    break

    # Phase 2 on the real columns only.
    tableau[m, :] = 0.0
    tableau[m, :n] = -lp.c  # minimize -c.x
    tableau[:, n_real:n_real + m] = 0.0  # artificials never re-enter
    for i in range(m):
        if basis[i] < n_real and tableau[m, basis[i]] != 0.0:
            tableau[m] -= tableau[m, basis[i]] * tableau[i]
    iters += _run(tableau, basis, n_real, max_iter)

    x = np.zeros(n_real)
    for i in range(m):
        if basis[i] < n_real:
            x[basis[i]] = tableau[i, -1]
    solution = x[:n]
    return LPSolution(x=solution, objective=float(lp.c @ solution), iterations=iters)
