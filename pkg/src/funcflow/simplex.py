"""Dense simplex over exact rationals.

Two-phase tableau method with nonnegative variables and <=/>=/== rows.  All
arithmetic is exact (gmpy2.mpq when available, fractions.Fraction otherwise),
so returned solutions satisfy the constraints with zero tolerance and optima
are exact.  The entering rule is steepest-coefficient with an automatic switch
to Bland's rule after a degenerate stall, which guarantees termination.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import Infeasible, NumericFailure

try:
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    _Q = Fraction

_ZERO = _Q(0)
_ONE = _Q(1)


def _to_fraction(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


@dataclass
class LPResult:
    status: str                 # "optimal" or "unbounded"
    value: Fraction
    x: list
    duals: list                 # one multiplier per input row (0 for dropped redundant rows)
    pivots: int


class _Tableau:
    def __init__(self, num_cols):
        self.rows = []          # list[list[_Q]] of length num_cols
        self.rhs = []           # list[_Q]
        self.basis = []         # basic column per row
        self.num_cols = num_cols
        self.pivots = 0

    def pivot(self, r, c):
        row = self.rows[r]
        inv = _ONE / row[c]
        if inv != 1:
            self.rows[r] = row = [a * inv for a in row]
            self.rhs[r] *= inv
        for i in range(len(self.rows)):
            if i == r:
                continue
            f = self.rows[i][c]
            if f:
                ri = self.rows[i]
                self.rows[i] = [a - f * b for a, b in zip(ri, row)]
                self.rhs[i] -= f * self.rhs[r]
        self.basis[r] = c
        self.pivots += 1


def _optimize(tab: _Tableau, cost, allowed, pivot_cap):
    """Minimize cost over the tableau; returns (status, obj_row, obj_val)."""
    m = len(tab.rows)
    obj = list(cost)
    for i in range(m):
        cb = cost[tab.basis[i]]
        if cb:
            row = tab.rows[i]
            obj = [a - cb * b for a, b in zip(obj, row)]

    def value():
        return sum((cost[tab.basis[i]] * tab.rhs[i] for i in range(m)), _ZERO)

    bland = False
    stall = 0
    stall_limit = 2 * m + 16
    while True:
        enter = -1
        if bland:
            for j in range(tab.num_cols):
                if allowed[j] and obj[j] < 0:
                    enter = j
                    break
        else:
            best = _ZERO
            for j in range(tab.num_cols):
                if allowed[j] and obj[j] < best:
                    best = obj[j]
                    enter = j
        if enter < 0:
            return "optimal", obj, value()

        leave = -1
        ratio = None
        for i in range(m):
            a = tab.rows[i][enter]
            if a > 0:
                r = tab.rhs[i] / a
                if ratio is None or r < ratio or (r == ratio and tab.basis[i] < tab.basis[leave]):
                    ratio = r
                    leave = i
        if leave < 0:
            return "unbounded", obj, None

        degenerate = tab.rhs[leave] == 0
        tab.pivot(leave, enter)
        if tab.pivots > pivot_cap:
            raise NumericFailure(f"pivot cap {pivot_cap} exceeded")
        f = obj[enter]
        if f:
            row = tab.rows[leave]
            obj = [a - f * b for a, b in zip(obj, row)]
        if degenerate:
            stall += 1
            if stall > stall_limit:
                bland = True
        else:
            stall = 0
            bland = False


def solve_lp(num_vars, objective, rows, maximize=True, pivot_cap=2_000_000) -> LPResult:
    """Solve max/min objective . x subject to rows and x >= 0.

    objective: dict or sequence of coefficients per variable.
    rows: list of (coeffs, sense, rhs) with coeffs a dict {var: coeff} and
    sense one of "<=", ">=", "==".
    """
    if isinstance(objective, dict):
        cvec = [_Q(0)] * num_vars
        for j, c in objective.items():
            cvec[j] = _Q(Fraction(c))
    else:
        cvec = [_Q(Fraction(c)) for c in objective]
    if maximize:
        cvec = [-c for c in cvec]

    norm = []
    for coeffs, sense, rhs in rows:
        rhs = Fraction(rhs)
        sign = 1
        if rhs < 0:
            sign = -1
            rhs = -rhs
            sense = {"<=": ">=", ">=": "<=", "==": "=="}[sense]
        norm.append((coeffs, sense, _Q(rhs), sign))

    m = len(norm)
    n_slack = sum(1 for _, s, _, _ in norm if s in ("<=", ">="))
    n_art = sum(1 for _, s, _, _ in norm if s in (">=", "=="))
    total = num_vars + n_slack + n_art
    tab = _Tableau(total)
    companion = []
    artificial_cols = []
    slack_i = num_vars
    art_i = num_vars + n_slack
    for coeffs, sense, rhs, sign in norm:
        row = [_Q(0)] * total
        for j, c in coeffs.items():
            row[j] = _Q(Fraction(c)) * sign
        if sense == "<=":
            row[slack_i] = _ONE
            tab.basis.append(slack_i)
            companion.append(slack_i)
            slack_i += 1
        elif sense == ">=":
            row[slack_i] = -_ONE
            slack_i += 1
            row[art_i] = _ONE
            tab.basis.append(art_i)
            companion.append(art_i)
            artificial_cols.append(art_i)
            art_i += 1
        else:
            row[art_i] = _ONE
            tab.basis.append(art_i)
            companion.append(art_i)
            artificial_cols.append(art_i)
            art_i += 1
        tab.rows.append(row)
        tab.rhs.append(rhs)

    art_set = set(artificial_cols)
    if artificial_cols:
        cost1 = [_Q(0)] * total
        for j in artificial_cols:
            cost1[j] = _ONE
        allowed = [True] * total
        status, _obj, val = _optimize(tab, cost1, allowed, pivot_cap)
        if status != "optimal" or val != 0:
            raise Infeasible("no feasible point", phase1_value=_to_fraction(val))
        # drive leftover artificials out of the basis; drop redundant rows
        keep = []
        row_of_input = list(range(m))  # maps current row -> original row index
        i = 0
        while i < len(tab.rows):
            b = tab.basis[i]
            if b in art_set:
                pivot_col = -1
                for j in range(num_vars + n_slack):
                    if tab.rows[i][j] != 0:
                        pivot_col = j
                        break
                if pivot_col >= 0:
                    tab.pivot(i, pivot_col)
                    i += 1
                else:
                    del tab.rows[i]
                    del tab.rhs[i]
                    del tab.basis[i]
                    del row_of_input[i]
            else:
                i += 1
    else:
        row_of_input = list(range(m))

    allowed = [j not in art_set for j in range(total)]
    status, obj_row, val = _optimize(tab, cvec + [_Q(0)] * (n_slack + n_art), allowed, pivot_cap)
    if status == "unbounded":
        return LPResult("unbounded", None, None, None, tab.pivots)

    x = [Fraction(0)] * num_vars
    for i, b in enumerate(tab.basis):
        if b < num_vars:
            x[b] = _to_fraction(tab.rhs[i])
    value = _to_fraction(val)
    if maximize:
        value = -value

    # dual of input row i: from the reduced cost of its companion identity column
    duals = [Fraction(0)] * m
    alive = set(row_of_input)
    for i in range(m):
        if i in alive:
            y_int = -obj_row[companion[i]]
            sign = norm[i][3]
            y = y_int * sign
            if maximize:
                y = -y
            duals[i] = _to_fraction(y)
    return LPResult("optimal", value, x, duals, tab.pivots)
