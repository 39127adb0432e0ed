"""
The Hecke module spanned by the parameters of a datum.

Each generator acts on a parameter according to the kind of its status.
The column of parameter X in a generator matrix is T * a_X; below
q = u^m for the generator type m.
"""
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple
import logging

import sympy

from klv.errors import DanglingReference, KlvError
from klv.laurent import LaurentPoly, ONE, u_pow
from klv.matrix import MElt, PolyMatrix
from models.datum import GeneratorStatus, Kind, ParamDatum, Role
from models.reports import CheckResult, Violation

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class KindSpec:
    """Payload shape and length deltas of one kind."""
    cross: bool = False
    cayley: int = 0
    roles: Tuple[Role, ...] = ()
    cross_delta: Optional[int] = None
    cayley_delta: Optional[int] = None


KIND_TABLE: Dict[Kind, KindSpec] = {
    Kind.C1_ASC: KindSpec(cross=True, cross_delta=1),
    Kind.C1_DESC: KindSpec(cross=True, cross_delta=-1),
    Kind.I1_SINGLE: KindSpec(cross=True, cayley=1, cross_delta=0, cayley_delta=1),
    Kind.R1_SINGLE: KindSpec(cayley=2, cayley_delta=-1),
    Kind.R1_SINGLE_S: KindSpec(),
    Kind.I1_DOUBLE: KindSpec(cayley=2, cayley_delta=1),
    Kind.R1_DOUBLE: KindSpec(cross=True, cayley=1, cross_delta=0, cayley_delta=-1),
    Kind.I1_DOUBLE_S: KindSpec(),
    Kind.RNP1: KindSpec(),
    Kind.IC1: KindSpec(),
    Kind.C2_ASC: KindSpec(cross=True, cross_delta=2),
    Kind.C2_DESC: KindSpec(cross=True, cross_delta=-2),
    Kind.SI2: KindSpec(cayley=1, cayley_delta=1),
    Kind.SR2: KindSpec(cayley=1, cayley_delta=-1),
    Kind.I2_11: KindSpec(cross=True, cayley=1, cross_delta=0, cayley_delta=2),
    Kind.R2_11: KindSpec(cayley=2, cayley_delta=-2),
    Kind.I2_22: KindSpec(cayley=2, cayley_delta=2),
    Kind.R2_22: KindSpec(cross=True, cayley=1, cross_delta=0, cayley_delta=-2),
    Kind.I2_12: KindSpec(cayley=2, roles=(Role.PLUS, Role.MINUS), cayley_delta=2),
    Kind.R2_21: KindSpec(cayley=2, roles=(Role.SUM, Role.DIFF), cayley_delta=-2),
    Kind.RNP2: KindSpec(),
    Kind.IC2: KindSpec(),
    Kind.C3_ASC: KindSpec(cross=True, cross_delta=3),
    Kind.C3_DESC: KindSpec(cross=True, cross_delta=-3),
    Kind.SI3: KindSpec(cayley=1, cayley_delta=2),
    Kind.R3: KindSpec(cayley=1, cayley_delta=-2),
    Kind.I3: KindSpec(cayley=1, cayley_delta=2),
    Kind.SR3: KindSpec(cayley=1, cayley_delta=-2),
    Kind.RNP3: KindSpec(),
    Kind.IC3: KindSpec(),
}

# kinds acting on their parameter by a scalar
_NEGATED = {Kind.I1_DOUBLE_S, Kind.RNP1, Kind.RNP2, Kind.RNP3}
_FIXED = {Kind.R1_SINGLE_S, Kind.IC1, Kind.IC2, Kind.IC3}
_SEMI_ASC = {Kind.SI2, Kind.SI3, Kind.I3}
_SEMI_DESC = {Kind.SR2, Kind.R3, Kind.SR3}


def references(status: GeneratorStatus) -> List[str]:
    """Parameter ids a status refers to (cross first, then Cayley targets)."""
    refs = [status.cross] if status.cross else []
    return refs + list(status.cayley or [])


def status_column(status: GeneratorStatus) -> MElt:
    """
    T * a_X for the parameter X carrying this status.

    Payloads are assumed present; validate_datum checks their shape.
    """
    kind = status.kind
    me = status.param
    q = u_pow(kind.m)
    u = u_pow(1)
    cayley = status.cayley or []

    if kind in _NEGATED:
        return MElt({me: -1})
    if kind in _FIXED:
        return MElt({me: q})
    if kind in (Kind.C1_ASC, Kind.C2_ASC, Kind.C3_ASC):
        return MElt({status.cross: ONE})
    if kind in (Kind.C1_DESC, Kind.C2_DESC, Kind.C3_DESC):
        return MElt({status.cross: q}) + MElt({me: q - 1})
    if kind in _SEMI_ASC:
        return MElt({me: u}) + MElt({cayley[0]: u + 1})
    if kind in _SEMI_DESC:
        return MElt({cayley[0]: q - u}) + MElt({me: q - u - 1})
    if kind in (Kind.I1_SINGLE, Kind.I2_11):
        return MElt({status.cross: ONE}) + MElt({cayley[0]: ONE})
    if kind in (Kind.R1_SINGLE, Kind.R2_11):
        return MElt({cayley[0]: q - 1}) + MElt({cayley[1]: q - 1}) + MElt({me: q - 2})
    if kind in (Kind.I1_DOUBLE, Kind.I2_22):
        return MElt({me: ONE}) + MElt({cayley[0]: ONE}) + MElt({cayley[1]: ONE})
    if kind in (Kind.R1_DOUBLE, Kind.R2_22):
        return MElt({cayley[0]: q - 1}) + MElt({me: q - 1}) + MElt({status.cross: -1})
    if kind == Kind.I2_12:
        sign = 1 if status.role == Role.PLUS else -1
        return MElt({me: ONE}) + MElt({cayley[0]: ONE}) + MElt({cayley[1]: sign})
    if kind == Kind.R2_21:
        sign = 1 if status.role == Role.SUM else -1
        return MElt({cayley[0]: q - 1}) + MElt({cayley[1]: (q - 1) * sign}) + MElt({me: q - 2})
    raise KlvError(f"No action formula for kind {kind.value}")


def generator_matrix(d: ParamDatum, g: str) -> PolyMatrix:
    """
    Matrix of T_g on the parameter basis (columns are images).

    Raises:
        MissingStatus: a parameter has no status for g
        DanglingReference: a status refers to an unknown parameter
    """
    index = d.param_ids()
    known = set(index)
    columns = {}
    for p in index:
        status = d.status(g, p)
        for ref in references(status):
            if ref not in known:
                raise DanglingReference(f"Status of {g} at {p} refers to unknown parameter {ref!r}")
        columns[p] = status_column(status)
    return PolyMatrix.from_columns(index, columns)


def generator_matrices(d: ParamDatum) -> Dict[str, PolyMatrix]:
    return {g: generator_matrix(d, g) for g in d.gen_ids()}


def act_word(d: ParamDatum, word: Sequence[str], xi: MElt) -> MElt:
    """Apply T_g1 ... T_gk to xi (the last letter acts first)."""
    matrices = {g: generator_matrix(d, g) for g in set(word)}
    for g in reversed(list(word)):
        xi = matrices[g].apply(xi)
    return xi


# ============ blocks ============

def _components(nodes: Sequence[str], edges: Sequence[Tuple[str, str]]) -> List[List[str]]:
    parent = {n: n for n in nodes}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        if a in parent and b in parent:
            parent[find(a)] = find(b)
    groups: Dict[str, List[str]] = {}
    for n in nodes:
        groups.setdefault(find(n), []).append(n)
    return list(groups.values())


def generator_blocks(d: ParamDatum, g: str) -> List[List[str]]:
    """Orbits of the parameters under the references of generator g."""
    edges = [(s.param, ref) for s in d.statuses if s.gen == g for ref in references(s)]
    return _components(d.param_ids(), edges)


def module_blocks(d: ParamDatum) -> List[List[str]]:
    """Connected components of the action graph over all generators, in datum order."""
    edges = [(s.param, ref) for s in d.statuses for ref in references(s)]
    return _components(d.param_ids(), edges)


# ============ checks ============

def quadratic_check(d: ParamDatum) -> CheckResult:
    """(M_g + I)(M_g - u^m I) = 0 for every generator; report-only."""
    violations: List[Violation] = []
    identity = PolyMatrix.identity(d.param_ids())
    for gen in d.generators:
        try:
            M = generator_matrix(d, gen.id)
        except KlvError as e:
            violations.append(Violation(rule="quadratic", where=gen.id, detail=str(e)))
            continue
        product = (M + identity) @ (M - identity.scale(u_pow(gen.m)))
        for row, col, value in product.entries():
            violations.append(Violation(rule="quadratic", where=f"{gen.id}:{row},{col}", detail=str(value)))
    return CheckResult(name="quadratic", passed=not violations, violations=violations)


def eigen_rank_check(d: ParamDatum, qs: Sequence[int] = (2, 3, 5)) -> CheckResult:
    """rank(M_g + I) + rank(M_g - q^m I) equals the number of parameters at integer u = q."""
    violations: List[Violation] = []
    n = len(d.parameters)
    for gen in d.generators:
        M = generator_matrix(d, gen.id)
        for q in qs:
            dense = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in M.evaluate(q)])
            total = (dense + sympy.eye(n)).rank() + (dense - q ** gen.m * sympy.eye(n)).rank()
            if total != n:
                violations.append(Violation(rule="eigen-rank", where=f"{gen.id}@{q}", detail=f"rank sum {total} != {n}"))
    return CheckResult(name="eigen-rank", passed=not violations, violations=violations)


def eigenvectors(d: ParamDatum, g: str) -> List[Tuple[MElt, LaurentPoly]]:
    """
    The listed eigenvectors of T_g with their eigenvalues (-1 or u^m).

    One group of vectors per block of g, read off from the ascent side of
    each pattern, so that the vectors of a valid datum form a basis.
    """
    q = u_pow(d.m_of(g))
    u = u_pow(1)
    minus = LaurentPoly.const(-1)
    found: List[Tuple[MElt, LaurentPoly]] = []
    for p in d.param_ids():
        s = d.status(g, p)
        k = s.kind
        cayley = s.cayley or []
        if k in _NEGATED:
            found.append((MElt.basis(p), minus))
        elif k in _FIXED:
            found.append((MElt.basis(p), q))
        elif k in (Kind.C1_ASC, Kind.C2_ASC, Kind.C3_ASC):
            found.append((MElt({p: 1, s.cross: 1}), q))
            found.append((MElt({p: -q, s.cross: 1}), minus))
        elif k in _SEMI_ASC:
            found.append((MElt({p: 1, cayley[0]: 1}), q))
            found.append((MElt({p: q - u, cayley[0]: -(u + 1)}), minus))
        elif k in (Kind.I1_SINGLE, Kind.I2_11) and p < s.cross:
            found.append((MElt({p: 1, s.cross: 1, cayley[0]: 1}), q))
            found.append((MElt({p: 1, s.cross: -1}), minus))
            found.append((MElt({p: q - 1, s.cross: q - 1, cayley[0]: -2}), minus))
        elif k in (Kind.I1_DOUBLE, Kind.I2_22):
            found.append((MElt({p: 1, cayley[0]: 1}), q))
            found.append((MElt({p: 1, cayley[1]: 1}), q))
            found.append((MElt({p: q - 1, cayley[0]: -1, cayley[1]: -1}), minus))
        elif k == Kind.R2_21:
            plus, minus_param = cayley
            sign = 1 if s.role == Role.SUM else -1
            found.append((MElt({plus: 1, minus_param: sign, p: 1}), q))
            found.append((MElt({plus: q - 1, minus_param: (q - 1) * sign, p: -2}), minus))
    return found


def eigenvector_check(d: ParamDatum) -> CheckResult:
    """Each listed eigenvector satisfies M v = lambda v, and each generator lists one per parameter."""
    violations: List[Violation] = []
    for g in d.gen_ids():
        M = generator_matrix(d, g)
        vectors = eigenvectors(d, g)
        for v, eigenvalue in vectors:
            if M.apply(v) != v.scale(eigenvalue):
                violations.append(Violation(rule="eigenvector", where=g, detail=f"{v} with eigenvalue {eigenvalue}"))
        if len(vectors) != len(d.parameters):
            violations.append(
                Violation(rule="eigenbasis", where=g, detail=f"{len(vectors)} vectors for {len(d.parameters)} parameters")
            )
    return CheckResult(name="eigenvectors", passed=not violations, violations=violations)
