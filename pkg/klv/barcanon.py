"""
The bar operator on a parameter module and its canonical basis.

R[L', L] is the coefficient of a_L' in D(a_L). D is antilinear, commutes
with the Hecke action up to bar (D(h x) = bar(h) D(x)), is length
triangular with diagonal u^-l(L), and never connects different blocks
of the action graph.

Two independent computations are provided: bar_matrix walks the length
strata upward (exact division where a single generator pins a column,
a stratum-wide linear solve over Q(u) otherwise), and bar_matrix_oracle
solves the full system at integer values of u and interpolates.
"""
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Set, Tuple
import logging

import sympy
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from config.settings import settings
from klv.errors import (
    InterpolationMismatch, Inconsistent, NotLaurent, NotSelfDualConsistent, Underdetermined,
)
from klv.laurent import LaurentPoly, ONE, U_SYMBOL, ZERO, u_pow
from klv.matrix import MElt, PolyMatrix
from klv.modact import generator_matrices, module_blocks
from klv.paramdata import restrict_datum
from models.datum import ParamDatum
from models.reports import CheckResult, Violation

logger = logging.getLogger(__name__)

# an affine column: row -> (constant, {unknown index: coefficient})
AffineColumn = Dict[str, Tuple[LaurentPoly, Dict[int, LaurentPoly]]]


def _unknown_rows(d: ParamDatum, block_of: Mapping[str, int]) -> Dict[str, List[str]]:
    """Rows that may be nonzero off the diagonal of each column."""
    lengths = d.lengths()
    return {
        col: [row for row in d.param_ids() if lengths[row] < lengths[col] and block_of[row] == block_of[col]]
        for col in d.param_ids()
    }


def _block_index(d: ParamDatum) -> Dict[str, int]:
    return {p: i for i, block in enumerate(module_blocks(d)) for p in block}


def _column_shape_ok(column: MElt, col: str, allowed: Sequence[str], length: int) -> bool:
    allowed_set = set(allowed)
    for row, value in column.items():
        if row == col:
            if value != u_pow(-length):
                return False
        elif row not in allowed_set:
            return False
    return column[col] == u_pow(-length)


# ============ linear algebra over Q(u) ============

def _solve_over_fraction_field(equations: List[Tuple[LaurentPoly, Dict[int, LaurentPoly]]], n_vars: int,
                               what: str) -> List[LaurentPoly]:
    """
    Solve sum(coeff * x) + constant = 0 for every equation.

    Raises:
        Inconsistent: no solution, or a solution that is not a Laurent polynomial
        Underdetermined: the solution is not unique
    """
    field = QQ.frac_field(U_SYMBOL)
    cache: Dict[LaurentPoly, object] = {}

    def convert(p: LaurentPoly):
        if p not in cache:
            cache[p] = field.from_sympy(p.to_sympy())
        return cache[p]

    rows = {}
    for i, (constant, coeffs) in enumerate(equations):
        row = {j: convert(c) for j, c in coeffs.items() if c}
        if constant:
            row[n_vars] = convert(-constant)
        if row:
            rows[len(rows)] = row
    if not rows:
        raise Underdetermined(f"No constraints reach the columns of {what}")
    system = DomainMatrix(rows, (len(rows), n_vars + 1), field)
    reduced, pivots = system.rref()
    if n_vars in pivots:
        raise Inconsistent(f"The constraints for {what} have no solution")
    if len(pivots) < n_vars:
        raise Underdetermined(f"The constraints for {what} leave {n_vars - len(pivots)} free parameters")
    dense = reduced.to_Matrix()
    solution = []
    for i, j in enumerate(pivots):
        try:
            solution.append(LaurentPoly.from_sympy(dense[i, n_vars]))
        except NotLaurent as e:
            raise Inconsistent(f"Non-Laurent solution for {what}: {e}")
    return solution


def _affine_apply(M: PolyMatrix, column: AffineColumn) -> AffineColumn:
    result: AffineColumn = {}
    for row, k, value in M.entries():
        if k not in column:
            continue
        constant, coeffs = column[k]
        acc_const, acc_coeffs = result.get(row, (ZERO, {}))
        acc_coeffs = dict(acc_coeffs)
        for var, c in coeffs.items():
            acc_coeffs[var] = acc_coeffs.get(var, ZERO) + value * c
        result[row] = (acc_const + value * constant, acc_coeffs)
    return result


def _affine_add(a: AffineColumn, b: AffineColumn, factor: LaurentPoly) -> AffineColumn:
    """a + factor * b"""
    result = dict(a)
    for row, (constant, coeffs) in b.items():
        acc_const, acc_coeffs = result.get(row, (ZERO, {}))
        acc_coeffs = dict(acc_coeffs)
        for var, c in coeffs.items():
            acc_coeffs[var] = acc_coeffs.get(var, ZERO) + factor * c
        result[row] = (acc_const + factor * constant, acc_coeffs)
    return result


# ============ the recursion ============

def bar_matrix(d: ParamDatum) -> PolyMatrix:
    """
    The bar operator by the length recursion.

    Raises:
        Underdetermined: the constraints do not pin some column
        Inconsistent: the constraints contradict each other or the triangular shape,
            or declared Levi data disagree with the full action
        NotDivisible: a broken invariant in a single-generator step
    """
    index = d.param_ids()
    lengths = d.lengths()
    block_of = _block_index(d)
    allowed = _unknown_rows(d, block_of)
    matrices = generator_matrices(d)
    identity = PolyMatrix.identity(index)
    shifted = {g: M + identity for g, M in matrices.items()}
    m_of = {g.id: g.m for g in d.generators}

    R = PolyMatrix(index)
    known: Set[str] = set()

    for levi in d.levi_subsets or []:
        sub = restrict_datum(d, levi.gens, levi.params, name=f"{d.name}|levi")
        sub_bar = bar_matrix(sub)
        for row, col, value in sub_bar.entries():
            R[row, col] = value
        known.update(sub.param_ids())
        logger.debug(f"Levi sub-datum {levi.gens} x {len(levi.params)} parameters solved")

    warned = False
    for delta in sorted(set(lengths.values())):
        stratum = [p for p in index if lengths[p] == delta and p not in known]
        pending = []
        for col in stratum:
            if not allowed[col]:
                R[col, col] = u_pow(-delta)
                known.add(col)
                logger.debug(f"{col}: diagonal column (no lower parameter in its block)")
                continue
            column = _single_generator_column(col, delta, lengths, shifted, m_of, R, known)
            if column is None:
                pending.append(col)
                continue
            if not _column_shape_ok(column, col, allowed[col], delta):
                raise Inconsistent(f"Column {col} computed by exact division is not triangular")
            for row, value in column.items():
                R[row, col] = value
            known.add(col)
        if pending:
            if not warned and not d.levi_subsets:
                logger.warning(f"{d.name}: stratum-wide solve used without declared Levi data")
                warned = True
            _solve_stratum(d, delta, pending, lengths, allowed, shifted, m_of, R, known)
            known.update(pending)
        logger.info(f"{d.name}: stratum of length {delta} solved ({len(stratum)} columns, {len(pending)} jointly)")
    # Levi columns were solved without the outside generators
    if d.levi_subsets and not _commutes(d, R, matrices):
        raise Inconsistent(f"{d.name}: the declared Levi data give columns that do not commute with the full action")
    return R


def _single_generator_column(col: str, delta: int, lengths: Mapping[str, int], shifted: Mapping[str, PolyMatrix],
                             m_of: Mapping[str, int], R: PolyMatrix, known: Set[str]) -> Optional[MElt]:
    """
    Find g and a lower L1 with a_col in (T_g + 1) a_L1 and the rest of that
    image strictly lower, then divide out the coefficient.
    """
    for g, N in shifted.items():
        for source in N.index:
            if lengths[source] >= delta or source not in known:
                continue
            image = N.column(source)
            x = image[col]
            if not x:
                continue
            others = [(row, y) for row, y in image.items() if row != col]
            if any(lengths[row] >= delta or row not in known for row, _ in others):
                continue
            rhs = N.apply(R.column(source)).scale(u_pow(-m_of[g]))
            for row, y in others:
                rhs = rhs - R.column(row).scale(y.bar())
            divisor = x.bar()
            logger.debug(f"{col}: exact division by {divisor} via generator {g} from {source}")
            return MElt({row: value.exact_div(divisor) for row, value in rhs.items()})
    return None


def _solve_stratum(d: ParamDatum, delta: int, pending: List[str], lengths: Mapping[str, int],
                   allowed: Mapping[str, List[str]], shifted: Mapping[str, PolyMatrix], m_of: Mapping[str, int],
                   R: PolyMatrix, known: Set[str]) -> None:
    variables: List[Tuple[str, str]] = [(row, col) for col in pending for row in allowed[col]]
    var_index = {key: i for i, key in enumerate(variables)}
    pending_set = set(pending)

    def affine(col: str) -> AffineColumn:
        if col in pending_set:
            column: AffineColumn = {col: (u_pow(-delta), {})}
            for row in allowed[col]:
                column[row] = (ZERO, {var_index[row, col]: ONE})
            return column
        return {row: (value, {}) for row, value in R.column(col).items()}

    equations: List[Tuple[LaurentPoly, Dict[int, LaurentPoly]]] = []
    for g, N in shifted.items():
        factor = u_pow(-m_of[g])
        for source in N.index:
            image = N.column(source)
            involved = [source] + image.support()
            if any(lengths[p] > delta for p in involved):
                continue
            if not any(p in pending_set for p in involved):
                continue
            if any(p not in known and p not in pending_set for p in involved):
                continue
            lhs = _affine_apply(N, affine(source))
            lhs = {row: (c * factor, {v: x * factor for v, x in coeffs.items()}) for row, (c, coeffs) in lhs.items()}
            for row, y in image.items():
                lhs = _affine_add(lhs, affine(row), -y.bar())
            for constant, coeffs in lhs.values():
                equations.append((constant, coeffs))

    logger.debug(f"{d.name}: joint solve of {pending} with {len(variables)} unknowns, {len(equations)} equations")
    solution = _solve_over_fraction_field(equations, len(variables), f"{d.name} at length {delta}")
    for col in pending:
        R[col, col] = u_pow(-delta)
    for (row, col), value in zip(variables, solution):
        R[row, col] = value


# ============ the interpolation oracle ============

def bar_matrix_oracle(d: ParamDatum) -> PolyMatrix:
    """
    The bar operator from the full linear system at integer u, interpolated.

    Raises:
        Underdetermined: too many rank-deficient samples
        Inconsistent: the system has no solution at some sample
        InterpolationMismatch: the samples are not explained within the degree bound
    """
    index = d.param_ids()
    lengths = d.lengths()
    block_of = _block_index(d)
    allowed = _unknown_rows(d, block_of)
    matrices = generator_matrices(d)
    variables = [(row, col) for col in index for row in allowed[col]]
    max_m = max((g.m for g in d.generators), default=1)
    low = -(max(lengths.values(), default=0) + max_m)
    high = max_m
    samples: Dict[int, List[Fraction]] = {}
    solver = settings.solver

    if not variables:
        return PolyMatrix(index, {(p, p): u_pow(-lengths[p]) for p in index})

    for attempt in range(solver.oracle_max_retries + 1):
        needed = high - low + 1 + solver.oracle_extra_points
        points = _sample(d, variables, lengths, matrices, samples, needed)
        try:
            R = _interpolate(index, lengths, variables, points, samples, low, high)
            if _commutes(d, R, matrices):
                logger.info(f"{d.name}: oracle converged with exponents in [{low}, {high}]")
                return R
            logger.debug(f"{d.name}: interpolated matrix fails the symbolic check")
        except InterpolationMismatch as e:
            logger.debug(f"{d.name}: {e}")
        low, high = 2 * low, 2 * high
    raise InterpolationMismatch(f"{d.name}: no interpolation within {solver.oracle_max_retries} doublings")


def _sample(d: ParamDatum, variables: List[Tuple[str, str]], lengths: Mapping[str, int],
            matrices: Mapping[str, PolyMatrix], samples: Dict[int, List[Fraction]], needed: int) -> List[int]:
    solver = settings.solver
    points = sorted(samples)[:needed]
    t = max(samples, default=solver.oracle_first_point - 1) + 1
    skipped = 0
    while len(points) < needed:
        try:
            samples[t] = _solve_at(d, variables, lengths, matrices, t)
            points.append(t)
        except Underdetermined:
            skipped += 1
            logger.warning(f"{d.name}: rank-deficient sample u={t} skipped")
            if skipped > solver.oracle_max_skipped_points:
                raise Underdetermined(f"{d.name}: the bar operator is not determined by the constraints")
        t += 1
    return points


def _solve_at(d: ParamDatum, variables: List[Tuple[str, str]], lengths: Mapping[str, int],
              matrices: Mapping[str, PolyMatrix], t: int) -> List[Fraction]:
    """Solve R M(1/t) = (t^-m M(t) + (t^-m - 1) I) R over the rationals."""
    index = d.param_ids()
    n = len(index)
    var_index = {key: i for i, key in enumerate(variables)}
    n_vars = len(variables)
    tt = Fraction(t)

    def entry(r: int, c: int):
        """(constant, variable index or None) for R[r, c]."""
        if r == c:
            return tt ** (-lengths[index[r]]), None
        return Fraction(0), var_index.get((index[r], index[c]))

    rows = {}
    for gen in d.generators:
        M = matrices[gen.id]
        at_t = M.evaluate(tt)
        at_inv = M.evaluate(1 / tt)
        scale = tt ** (-gen.m)
        A = [[scale * at_t[r][c] + ((scale - 1) if r == c else 0) for c in range(n)] for r in range(n)]
        inv_cols = [[(k, at_inv[k][c]) for k in range(n) if at_inv[k][c]] for c in range(n)]
        a_rows = [[(k, A[r][k]) for k in range(n) if A[r][k]] for r in range(n)]
        for r in range(n):
            for c in range(n):
                constant = Fraction(0)
                coeffs: Dict[int, Fraction] = {}
                for k, value in inv_cols[c]:
                    fixed, var = entry(r, k)
                    if var is None:
                        constant += fixed * value
                    else:
                        coeffs[var] = coeffs.get(var, Fraction(0)) + value
                for k, value in a_rows[r]:
                    fixed, var = entry(k, c)
                    if var is None:
                        constant -= value * fixed
                    else:
                        coeffs[var] = coeffs.get(var, Fraction(0)) - value
                row = {j: QQ(v.numerator, v.denominator) for j, v in coeffs.items() if v}
                if constant:
                    row[n_vars] = QQ(-constant.numerator, constant.denominator)
                if row:
                    rows[len(rows)] = row
    system = DomainMatrix(rows, (len(rows), n_vars + 1), QQ)
    reduced, pivots = system.rref()
    if n_vars in pivots:
        raise Inconsistent(f"{d.name}: no bar operator at u={t}")
    if len(pivots) < n_vars:
        raise Underdetermined(f"rank {len(pivots)} < {n_vars} at u={t}")
    dense = reduced.to_Matrix()
    return [Fraction(int(dense[i, n_vars].p), int(dense[i, n_vars].q)) for i in range(n_vars)]


def _interpolate(index: List[str], lengths: Mapping[str, int], variables: List[Tuple[str, str]],
                 points: List[int], samples: Mapping[int, List[Fraction]], low: int, high: int) -> PolyMatrix:
    R = PolyMatrix(index, {(p, p): u_pow(-lengths[p]) for p in index})
    span = high - low
    for i, (row, col) in enumerate(variables):
        data = [(t, sympy.Rational(samples[t][i].numerator, samples[t][i].denominator) * sympy.Integer(t) ** (-low))
                for t in points]
        poly = sympy.Poly(sympy.interpolate(data, U_SYMBOL), U_SYMBOL)
        if not poly.is_zero and poly.degree() > span:
            raise InterpolationMismatch(f"R[{row},{col}] needs degree {poly.degree()} > {span}")
        coeffs = {}
        for (k,), c in poly.terms():
            c = sympy.Rational(c)
            if c.q != 1:
                raise InterpolationMismatch(f"R[{row},{col}] has non-integer coefficient {c}")
            coeffs[k + low] = int(c.p)
        R[row, col] = LaurentPoly(coeffs)
    return R


def _commutes(d: ParamDatum, R: PolyMatrix, matrices: Mapping[str, PolyMatrix]) -> bool:
    identity = PolyMatrix.identity(R.index)
    for gen in d.generators:
        M = matrices[gen.id]
        lhs = R @ M.bar()
        rhs = (M.scale(u_pow(-gen.m)) + identity.scale(u_pow(-gen.m) - 1)) @ R
        if lhs != rhs:
            return False
    return True


# ============ canonical basis ============

def canonical_basis(R: PolyMatrix, lengths: Mapping[str, int]) -> PolyMatrix:
    """
    The canonical basis coefficients P[L'', L] from a bar matrix.

    For each column L, rows are swept by decreasing length; with
    D = l(L) - l(L'') and gamma = u^l(L) sum_{L' != L''} P[L', L](u^-1) R[L'', L'],
    P[L'', L] solves P - u^D P(u^-1) = gamma with degree below D/2.

    Raises:
        NotSelfDualConsistent: gamma has no such decomposition
    """
    index = R.index
    P = PolyMatrix(index)
    order = sorted(index, key=lambda p: -lengths[p])
    for col in index:
        top = lengths[col]
        P[col, col] = ONE
        column: Dict[str, LaurentPoly] = {col: ONE}
        for row in order:
            delta = top - lengths[row]
            if delta <= 0:
                continue
            gamma = ZERO
            for other, value in column.items():
                rho = R[row, other]
                if rho:
                    gamma = gamma + value.bar() * rho
            gamma = gamma.shift(top)
            entry = LaurentPoly({k: c for k, c in gamma.items() if k >= 0 and 2 * k < delta})
            if entry - entry.bar().shift(delta) != gamma:
                raise NotSelfDualConsistent(f"P[{row},{col}]: {gamma} is not of the form P - u^{delta} P(u^-1)")
            if entry:
                column[row] = entry
                P[row, col] = entry
    return P


def klv_table(d: ParamDatum) -> PolyMatrix:
    """The twisted polynomials P[L', L] of the datum."""
    return canonical_basis(bar_matrix(d), d.lengths())


# ============ checks ============

def check_bar_matrix(d: ParamDatum, R: PolyMatrix) -> CheckResult:
    """Diagonal, triangularity, blocks, commutation with the action, and involution."""
    violations: List[Violation] = []
    lengths = d.lengths()
    block_of = _block_index(d)
    for p in d.param_ids():
        if R[p, p] != u_pow(-lengths[p]):
            violations.append(Violation(rule="diagonal", where=p, detail=str(R[p, p])))
    for row, col, value in R.entries():
        if row == col:
            continue
        if lengths[row] >= lengths[col]:
            violations.append(Violation(rule="triangular", where=f"{row},{col}", detail=str(value)))
        if block_of[row] != block_of[col]:
            violations.append(Violation(rule="block", where=f"{row},{col}", detail=str(value)))
    identity = PolyMatrix.identity(d.param_ids())
    matrices = generator_matrices(d)
    for gen in d.generators:
        N = matrices[gen.id] + identity
        lhs = (N @ R).scale(u_pow(-gen.m))
        rhs = R @ N.bar()
        if lhs != rhs:
            violations.append(Violation(rule="commutation", where=gen.id))
    if R @ R.bar() != identity:
        violations.append(Violation(rule="involution", detail="R * bar(R) != I"))
    return CheckResult(name="bar-matrix", passed=not violations, violations=violations)


def check_canonical(R: PolyMatrix, P: PolyMatrix, lengths: Mapping[str, int]) -> CheckResult:
    """Self-duality, triangularity, degree bounds and unit diagonal of a P table."""
    violations: List[Violation] = []
    for p in P.index:
        if P[p, p] != ONE:
            violations.append(Violation(rule="unit-diagonal", where=p, detail=str(P[p, p])))
    for row, col, value in P.entries():
        if row == col:
            continue
        delta = lengths[col] - lengths[row]
        if delta <= 0:
            violations.append(Violation(rule="triangular", where=f"{row},{col}", detail=str(value)))
        elif not value.is_polynomial() or 2 * value.degree() > delta - 1:
            violations.append(Violation(rule="degree-bound", where=f"{row},{col}", detail=str(value)))
    diagonal = PolyMatrix(P.index, {(p, p): u_pow(-lengths[p]) for p in P.index})
    if R @ P.bar() != P @ diagonal:
        violations.append(Violation(rule="self-duality", detail="R * bar(P) != P * u^-l"))
    return CheckResult(name="canonical-basis", passed=not violations, violations=violations)
