"""
Finite-field models of the built-in families.

A scene is the set of F_q-points of the flag variety (the projective line
over F_{q^2}, or the isotropic lines of a Hermitian form on F_{q^2}^3)
with its K(F_q)-orbits. The Hecke generator acts on orbit functions by
convolution with the characteristic function of distinct point pairs;
interpolating that action in q recovers a parameter datum.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations, product
from pathlib import Path
from typing import Callable, Dict, FrozenSet, List, Optional, Sequence, Tuple, Union
import logging

import numpy as np
import sympy

from config.settings import settings
from klv.errors import FqError, InterpolationMismatch, UnclassifiableColumn, UnknownFamily
from klv.finite_field import QuadraticExtension
from klv.laurent import LaurentPoly, U_SYMBOL
from klv.matrix import MElt, PolyMatrix
from klv.modact import KIND_TABLE, generator_matrix, status_column
from klv.paramdata import save_datum, validate_datum
from models.datum import GeneratorSpec, GeneratorStatus, Kind, Parameter, ParamDatum
from models.reports import CountCheck, CountsReport, DeriveReport, TraceReport

logger = logging.getLogger(__name__)

IDENTITY = "1"
GENERATOR = "g"
SUB_LABELS = ("", "square", "nonsquare")

Point = Union[int, Tuple[int, int, int]]
Matrix3 = List[List[int]]


# ============ family tables ============

@dataclass(frozen=True)
class ParamSpec:
    """A parameter of a derived datum and the orbit functions it is built from."""
    id: str
    label: str
    combine: str = "single"  # single | sum | diff


@dataclass(frozen=True)
class FamilySpec:
    name: str
    geometry: str  # a1a1 | a2
    m: int
    labels: Tuple[str, ...]
    points: Callable[[int], int]
    sizes: Callable[[int], List[int]]
    size_text: str
    connected: bool
    params: Tuple[ParamSpec, ...] = ()
    preferred: FrozenSet[Kind] = frozenset()


def _half(n: int) -> int:
    return n // 2


FAMILIES: Dict[str, FamilySpec] = {
    "a1a1-sc": FamilySpec(
        name="a1a1-sc", geometry="a1a1", m=2, labels=("zero", "infinity", "open"),
        points=lambda q: q ** 2 + 1,
        sizes=lambda q: [1, 1, _half(q ** 2 - 1), _half(q ** 2 - 1)],
        size_text="1, 1, (q^2-1)/2, (q^2-1)/2", connected=True,
        params=(ParamSpec("L1", "zero"), ParamSpec("L2", "infinity"),
                ParamSpec("L'", "open", "sum"), ParamSpec("L''", "open", "diff")),
    ),
    "a1a1-int": FamilySpec(
        name="a1a1-int", geometry="a1a1", m=2, labels=("closed", "open"),
        points=lambda q: q ** 2 + 1,
        sizes=lambda q: [2, _half(q ** 2 - 1), _half(q ** 2 - 1)],
        size_text="2, (q^2-1)/2, (q^2-1)/2", connected=False,
    ),
    "a1a1-ad": FamilySpec(
        name="a1a1-ad", geometry="a1a1", m=2, labels=("closed", "open"),
        points=lambda q: q ** 2 + 1,
        sizes=lambda q: [2, q ** 2 - 1],
        size_text="2, q^2-1", connected=False,
    ),
    "a2-c": FamilySpec(
        name="a2-c", geometry="a2", m=3, labels=("closed", "open"),
        points=lambda q: q ** 3 + 1,
        sizes=lambda q: [q + 1, q ** 3 - q],
        size_text="q+1, q^3-q", connected=True,
        params=(ParamSpec("L", "closed"), ParamSpec("L'", "open")),
        preferred=frozenset({Kind.I3, Kind.SR3}),
    ),
    "a2-s": FamilySpec(
        name="a2-s", geometry="a2", m=3, labels=("closed", "open"),
        points=lambda q: q ** 3 + 1,
        sizes=lambda q: [q + 1, _half(q ** 3 - q), _half(q ** 3 - q)],
        size_text="q+1, (q^3-q)/2, (q^3-q)/2", connected=True,
        params=(ParamSpec("L", "closed"), ParamSpec("L'", "open", "sum"), ParamSpec("L''", "open", "diff")),
        preferred=frozenset({Kind.SI3, Kind.R3}),
    ),
}


def family_spec(family: str) -> FamilySpec:
    try:
        return FAMILIES[family]
    except KeyError:
        raise UnknownFamily(f"Unknown family {family!r}; known: {list(FAMILIES)}")


@lru_cache(maxsize=None)
def _field(q: int) -> QuadraticExtension:
    return QuadraticExtension(q)


# ============ scenes ============

@dataclass
class FqScene:
    """The F_q-points of one family with their K(F_q)-orbits (sorted by label)."""
    family: str
    q: int
    m: int
    extension: QuadraticExtension
    points: List[Point]
    orbits: List[List[int]]
    labels: List[str]
    sub_labels: List[str]
    point_labels: List[Tuple[str, str]]

    def relpos(self, i: int, j: int) -> str:
        """Relative position of two points: both folded groups here have two elements."""
        return IDENTITY if i == j else GENERATOR

    def orbit_keys(self) -> List[str]:
        return [f"{label}/{sub}" if sub else label for label, sub in zip(self.labels, self.sub_labels)]

    def sizes(self) -> List[int]:
        return [len(orbit) for orbit in self.orbits]


def _orbits(n: int, moves: Sequence[Callable[[int], int]]) -> List[List[int]]:
    """Orbits of {0..n-1} under the group generated by the moves."""
    seen = [False] * n
    orbits = []
    for start in range(n):
        if seen[start]:
            continue
        seen[start] = True
        orbit, stack = [start], [start]
        while stack:
            point = stack.pop()
            for move in moves:
                image = move(point)
                if not seen[image]:
                    seen[image] = True
                    orbit.append(image)
                    stack.append(image)
        orbits.append(sorted(orbit))
    return orbits


def _projective_line(spec: FamilySpec, F: QuadraticExtension) -> Tuple[List[Point], List[Callable[[int], int]], Callable]:
    infinity = F.order
    points: List[Point] = list(range(F.order + 1))
    g = F.primitive

    def scale(c: int) -> Callable[[int], int]:
        return lambda z: z if z in (0, infinity) else F.mul(c, z)

    def flip(z: int) -> int:
        if z == 0:
            return infinity
        if z == infinity:
            return 0
        return F.neg(F.inv(z))

    if spec.name == "a1a1-sc":
        moves = [scale(F.mul(g, g))]
    elif spec.name == "a1a1-int":
        moves = [scale(F.mul(g, g)), flip]
    else:
        moves = [scale(g), flip]

    def label(z: int) -> Tuple[str, str]:
        if z in (0, infinity):
            if spec.name == "a1a1-sc":
                return ("zero" if z == 0 else "infinity"), ""
            return "closed", ""
        if spec.name == "a1a1-ad":
            return "open", ""
        return "open", "square" if F.is_square(z) else "nonsquare"

    return points, moves, label


def _apply(F: QuadraticExtension, M: Matrix3, v: Tuple[int, int, int]) -> Tuple[int, int, int]:
    out = []
    for row in M:
        acc = 0
        for a, x in zip(row, v):
            acc = F.add(acc, F.mul(a, x))
        out.append(acc)
    return _normalize(F, out)


def _normalize(F: QuadraticExtension, v: Sequence[int]) -> Tuple[int, int, int]:
    """Scale so that the first nonzero coordinate is 1."""
    lead = next(x for x in v if x)
    inv = F.inv(lead)
    return tuple(F.mul(inv, x) for x in v)


def _isotropic_lines(F: QuadraticExtension) -> List[Tuple[int, int, int]]:
    """Lines isotropic for x1*conj(x3) + x3*conj(x1) - x2*conj(x2)."""
    points = [(0, 0, 1)]
    for b in F.elements():
        nb = F.norm(b)
        for c in F.elements():
            if F.trace(c) == nb:
                points.append((1, b, c))
    return points


def _hermitian_plane(spec: FamilySpec, F: QuadraticExtension) -> Tuple[List[Point], List[Callable[[int], int]], Callable]:
    points = _isotropic_lines(F)
    lookup = {p: i for i, p in enumerate(points)}
    one, minus = 1, F.neg(1)
    matrices: List[Matrix3] = []

    if spec.name == "a2-c":
        # K = U(span(e1, e3)) x U(e2)
        lam = F.primitive
        lam_bar = F.conj(lam)
        matrices.append([[lam, 0, 0], [0, F.div(lam_bar, lam), 0], [0, 0, F.inv(lam_bar)]])
        for t in F.trace_zero():
            if t:
                matrices.append([[one, 0, t], [0, one, 0], [0, 0, one]])
                matrices.append([[one, 0, 0], [0, one, 0], [t, 0, one]])
        matrices.append([[0, 0, one], [0, minus, 0], [one, 0, 0]])

        def label(v: Tuple[int, int, int]) -> Tuple[str, str]:
            return ("closed", "") if v[1] == 0 else ("open", "")
    else:
        # K = SO(3) over F_q for the form 2*x1*x3 - x2^2
        half = F.inv(F.from_int(2))
        for s in F.base[1:]:
            s2 = F.mul(F.mul(s, s), half)
            matrices.append([[one, s, s2], [0, one, s], [0, 0, one]])
            matrices.append([[one, 0, 0], [s, one, 0], [s2, s, one]])
        t = F.base_primitive
        matrices.append([[t, 0, 0], [0, one, 0], [0, 0, F.inv(t)]])
        two = F.from_int(2)

        def label(v: Tuple[int, int, int]) -> Tuple[str, str]:
            b = F.sub(F.mul(two, F.mul(v[0], v[2])), F.mul(v[1], v[1]))
            if b == 0:
                return "closed", ""
            return "open", "square" if F.is_square(b) else "nonsquare"

    moves = [(lambda i, M=M: lookup[_apply(F, M, points[i])]) for M in matrices]
    return points, moves, label


def build_scene(family: str, q: int) -> FqScene:
    """
    Enumerate the F_q-points of a family and their K(F_q)-orbits.

    Raises:
        UnknownFamily: unknown family name
        UnsupportedQ: q is not an odd prime power within max_q
    """
    spec = family_spec(family)
    F = _field(q)
    if spec.geometry == "a1a1":
        points, moves, label = _projective_line(spec, F)
    else:
        points, moves, label = _hermitian_plane(spec, F)

    orbits = _orbits(len(points), moves)
    point_labels = [label(p) for p in points]
    keyed = sorted(
        orbits,
        key=lambda o: (spec.labels.index(point_labels[o[0]][0]), SUB_LABELS.index(point_labels[o[0]][1]), o[0]),
    )
    scene = FqScene(
        family=family, q=q, m=spec.m, extension=F, points=points, orbits=keyed,
        labels=[point_labels[o[0]][0] for o in keyed],
        sub_labels=[point_labels[o[0]][1] for o in keyed],
        point_labels=point_labels,
    )
    logger.info(f"Scene {family} at q={q}: {len(points)} points, orbit sizes {scene.sizes()}")
    return scene


def build_scenes(family: str, qs: Sequence[int]) -> List[FqScene]:
    """Scenes for several q, built concurrently and returned in the order of qs."""
    family_spec(family)
    with ThreadPoolExecutor(max_workers=max(1, len(qs))) as pool:
        return list(pool.map(lambda q: build_scene(family, q), qs))


# ============ convolution ============

def convolution_matrix(scene: FqScene, element: str = GENERATOR) -> np.ndarray:
    """
    Convolution by the characteristic function of one relative position.

    Column O is the image of the orbit function of O:
    A[O', O] = #{B in O : relpos(rep(O'), B) = element}.
    """
    n = len(scene.orbits)
    A = np.zeros((n, n), dtype=np.int64)
    for i, target in enumerate(scene.orbits):
        rep = target[0]
        for j, source in enumerate(scene.orbits):
            A[i, j] = sum(1 for b in source if scene.relpos(rep, b) == element)
    return A


def action_at_q(scene: FqScene) -> np.ndarray:
    return convolution_matrix(scene, GENERATOR)


def _count(formula: str, expected: List[int], actual: List[int]) -> CountCheck:
    return CountCheck(formula=formula, expected=expected, actual=actual, passed=expected == actual)


def verify_counts(scene: FqScene) -> CountsReport:
    """Point and orbit cardinalities against the closed forms of the family; report-only."""
    spec = family_spec(scene.family)
    q = scene.q
    A = action_at_q(scene)
    n = len(scene.orbits)
    identity = np.eye(n, dtype=np.int64)
    relation = (A + identity) @ (A - q ** spec.m * identity)
    unlabelled = sum(1 for o in scene.orbits if len({scene.point_labels[p] for p in o}) != 1)

    checks = [
        _count(f"points = q^{spec.m}+1", [spec.points(q)], [len(scene.points)]),
        _count(f"orbit sizes = {spec.size_text}", sorted(spec.sizes(q)), sorted(scene.sizes())),
        _count("distinct points seen from each orbit = #points-1",
               [len(scene.points) - 1] * n, [int(x) for x in A.sum(axis=1)]),
        _count("orbits with non-constant label = 0", [0], [unlabelled]),
        _count(f"(A+1)(A-q^{spec.m}) = 0", [0], [int(np.abs(relation).max()) if n else 0]),
    ]
    report = CountsReport(family=scene.family, q=q, passed=all(c.passed for c in checks), checks=checks)
    logger.info(f"Counts for {scene.family} at q={q}: {'pass' if report.passed else 'FAIL'}")
    return report


# ============ interpolation ============

def _interpolate_integer(values: Sequence[Tuple[int, sympy.Rational]], max_degree: int, what: str) -> LaurentPoly:
    poly = sympy.Poly(sympy.interpolate(list(values), U_SYMBOL), U_SYMBOL)
    if not poly.is_zero and poly.degree() > max_degree:
        raise InterpolationMismatch(f"{what} needs degree {poly.degree()} > {max_degree}")
    coeffs = {}
    for (k,), c in poly.terms():
        c = sympy.Rational(c)
        if c.q != 1:
            raise InterpolationMismatch(f"{what} has non-integer coefficient {c}")
        coeffs[k] = int(c.p)
    return LaurentPoly(coeffs)


def _parameter_columns(spec: FamilySpec, scene: FqScene) -> sympy.Matrix:
    """Orbit-function expansion of each parameter (rows are orbits)."""
    C = sympy.zeros(len(scene.orbits), len(spec.params))
    for j, param in enumerate(spec.params):
        hits = [i for i, label in enumerate(scene.labels) if label == param.label]
        if not hits:
            raise FqError(f"{scene.family} at q={scene.q} has no orbit labelled {param.label!r}")
        for i in hits:
            if param.combine == "diff":
                C[i, j] = 1 if scene.sub_labels[i] == "square" else -1
            else:
                C[i, j] = 1
        if param.combine == "single" and len(hits) != 1:
            raise FqError(f"{scene.family} at q={scene.q}: {len(hits)} orbits labelled {param.label!r}")
    return C


def _classify(pid: str, column: MElt, m: int, ids: Sequence[str], lengths: Dict[str, int],
              preferred: FrozenSet[Kind]) -> GeneratorStatus:
    """
    The status whose action formula reproduces the column.

    Raises:
        UnclassifiableColumn: no kind of type m matches
    """
    candidates = []
    others = [p for p in ids if p != pid]
    for kind in Kind:
        if kind.m != m:
            continue
        spec = KIND_TABLE[kind]
        crosses = others if spec.cross else [None]
        cayleys = list(permutations(others, spec.cayley)) if spec.cayley else [()]
        for cross, cayley, role in product(crosses, cayleys, spec.roles or (None,)):
            if spec.cross_delta is not None and lengths[cross] - lengths[pid] != spec.cross_delta:
                continue
            if spec.cayley_delta is not None and any(lengths[c] - lengths[pid] != spec.cayley_delta for c in cayley):
                continue
            status = GeneratorStatus(
                gen=GENERATOR, param=pid, kind=kind, cross=cross, cayley=list(cayley) or None, role=role
            )
            if status_column(status) == column:
                candidates.append(status)
    if not candidates:
        raise UnclassifiableColumn(f"No status of type {m} matches column {pid}: {column}")
    candidates.sort(key=lambda s: (
        s.kind not in preferred, s.kind.value, s.cross or "", tuple(s.cayley or ()), s.role.value if s.role else ""
    ))
    if len(candidates) > 1:
        logger.debug(f"{pid}: {len(candidates)} matching statuses, chose {candidates[0].kind.value}")
    return candidates[0]


def _interpolate_scenes(spec: FamilySpec, scenes: Sequence[FqScene]) -> Tuple[ParamDatum, PolyMatrix]:
    ids = [p.id for p in spec.params]
    samples: Dict[Tuple[int, int], List[Tuple[int, sympy.Rational]]] = {}
    sizes: Dict[str, List[Tuple[int, int]]] = {p.id: [] for p in spec.params}
    for scene in scenes:
        C = _parameter_columns(spec, scene)
        if C.rows != C.cols or C.rank() != len(ids):
            raise FqError(f"{spec.name} at q={scene.q}: parameter functions are not independent")
        A = sympy.Matrix(action_at_q(scene).tolist())
        M = C.inv() * A * C
        for r in range(len(ids)):
            for c in range(len(ids)):
                samples.setdefault((r, c), []).append((scene.q, sympy.Rational(M[r, c])))
        for param in spec.params:
            total = sum(len(o) for o, label in zip(scene.orbits, scene.labels) if label == param.label)
            sizes[param.id].append((scene.q, total))
        logger.debug(f"{spec.name} at q={scene.q}: action {M.tolist()}")

    entries = {}
    for (r, c), values in samples.items():
        entries[ids[r], ids[c]] = _interpolate_integer(values, 3, f"{spec.name} entry [{ids[r]},{ids[c]}]")
    matrix = PolyMatrix(ids, entries)

    degrees = {pid: _interpolate_integer(values, 3, f"{spec.name} size of {pid}").degree()
               for pid, values in sizes.items()}
    floor = min(degrees.values())
    lengths = {pid: deg - floor for pid, deg in degrees.items()}

    failure: Optional[UnclassifiableColumn] = None
    for signs in product((1, -1), repeat=len(ids) - 1):
        eps = dict(zip(ids, (1,) + signs))
        signed = PolyMatrix(ids, {(r, c): v * (eps[r] * eps[c]) for r, c, v in matrix.entries()})
        try:
            statuses = [_classify(pid, signed.column(pid), spec.m, ids, lengths, spec.preferred) for pid in ids]
        except UnclassifiableColumn as e:
            failure = e
            continue
        if any(s != 1 for s in signs):
            logger.info(f"{spec.name}: sign normalization {eps}")
        datum = ParamDatum(
            name=spec.name,
            generators=[GeneratorSpec(id=GENERATOR, m=spec.m)],
            parameters=[Parameter(id=p.id, length=lengths[p.id], orbit=p.label) for p in spec.params],
            statuses=statuses,
        )
        return datum, signed
    raise failure or UnclassifiableColumn(f"{spec.name}: no sign choice gives a datum")


def interpolate_datum(family: str, qs: Sequence[int]) -> Tuple[ParamDatum, PolyMatrix]:
    """
    Derive a datum from the convolution action at several q.

    Args:
        family: a family whose K is connected (a1a1-sc, a2-c, a2-s)
        qs: at least four distinct odd prime powers

    Returns:
        The datum and its action matrix in u

    Raises:
        FqError: the family is not connected, or too few samples
        InterpolationMismatch: an entry is not an integral polynomial of degree at most 3
        UnclassifiableColumn: a column matches no status kind
    """
    spec = family_spec(family)
    if not spec.connected:
        raise FqError(f"{family}: the orbit functions do not separate parameters; use trace_check instead")
    qs = list(dict.fromkeys(qs))
    if len(qs) < 4:
        raise FqError(f"At least four distinct values of q are needed, got {qs}")
    return _interpolate_scenes(spec, build_scenes(family, qs))


# ============ trace check ============

def _candidate_functions(keys: Sequence[str], labels: Sequence[str], label: Optional[str]) -> List[Dict[str, int]]:
    """{0, +1, -1} combinations of the orbits of one label with a positive leading coefficient."""
    hits = [k for k, lab in zip(keys, labels) if label is not None and lab == label]
    if not hits:
        return [{}]
    found = []
    for coeffs in product((1, 0, -1), repeat=len(hits)):
        nonzero = [c for c in coeffs if c]
        if nonzero and nonzero[0] > 0:
            found.append({k: c for k, c in zip(hits, coeffs) if c})
    return found


def trace_check(datum: ParamDatum, family: str, qs: Optional[Sequence[int]] = None) -> TraceReport:
    """
    Search a map from parameters to orbit functions intertwining the actions.

    Each parameter goes to a {0, +1, -1} combination of the orbit functions
    carrying its orbit label; the map must satisfy A_q C = C M(q) at every
    sampled q. Report-only.
    """
    qs = list(qs or settings.fq.default_samples)
    spec = family_spec(family)
    if len(datum.generators) != 1 or datum.generators[0].m != spec.m:
        return TraceReport(family=family, datum=datum.name, qs=qs, passed=False,
                           detail=f"{family} needs a single generator of type {spec.m}")
    scenes = build_scenes(family, qs)
    keys = scenes[0].orbit_keys()
    if any(s.orbit_keys() != keys for s in scenes):
        return TraceReport(family=family, datum=datum.name, qs=qs, passed=False,
                           detail="orbit structure changes with q")
    labels = scenes[0].labels
    ids = datum.param_ids()
    M = generator_matrix(datum, datum.generators[0].id)
    actions = []
    for scene in scenes:
        at_q = M.evaluate(scene.q)
        if any(x.denominator != 1 for row in at_q for x in row):
            return TraceReport(family=family, datum=datum.name, qs=qs, passed=False,
                               detail=f"action is not integral at u={scene.q}")
        actions.append((action_at_q(scene), np.array([[int(x) for x in row] for row in at_q], dtype=np.int64)))

    choices = [_candidate_functions(keys, labels, datum.parameter(p).orbit) for p in ids]
    solutions = []
    for choice in product(*choices):
        C = np.array([[choice[j].get(k, 0) for j in range(len(ids))] for k in keys], dtype=np.int64)
        if all(np.array_equal(A @ C, C @ Mq) for A, Mq in actions):
            solutions.append(choice)
    logger.info(f"Trace check of {datum.name} against {family}: {len(solutions)} solutions")
    if not solutions:
        return TraceReport(family=family, datum=datum.name, qs=qs, passed=False,
                           detail="no map to orbit functions intertwines the actions")
    first = solutions[0]
    return TraceReport(
        family=family, datum=datum.name, qs=qs, passed=True,
        dictionary={pid: dict(f) for pid, f in zip(ids, first)},
        detail=f"{len(solutions)} solution(s)",
    )


# ============ derive ============

def derive(family: str, qs: Optional[Sequence[int]] = None, out: Optional[Union[str, Path]] = None) -> DeriveReport:
    """
    Interpolate a datum, validate it, check the counts and save it.

    Raises:
        FqError, InterpolationMismatch, UnclassifiableColumn: as interpolate_datum
    """
    spec = family_spec(family)
    qs = list(dict.fromkeys(qs or settings.fq.default_samples))
    if not spec.connected:
        raise FqError(f"{family}: the orbit functions do not separate parameters; use trace_check instead")
    if len(qs) < 4:
        raise FqError(f"At least four distinct values of q are needed, got {qs}")
    scenes = build_scenes(family, qs)
    datum, matrix = _interpolate_scenes(spec, scenes)
    validation = validate_datum(datum)
    counts = [verify_counts(scene) for scene in scenes]
    consistent = generator_matrix(datum, GENERATOR) == matrix
    target = Path(out) if out else Path(settings.derived_dir) / f"{family}.json"
    save_datum(datum, target)
    return DeriveReport(
        family=family, qs=qs, output=str(target), validation=validation, counts=counts,
        matrix={c: {r: str(matrix[r, c]) for r in matrix.index if matrix[r, c]} for c in matrix.index},
        passed=validation.passed and consistent and all(c.passed for c in counts),
    )
