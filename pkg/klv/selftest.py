"""
End-to-end acceptance suite: every check is exact and deterministic.
"""
from itertools import product
from typing import Callable, List, Optional, Sequence, Tuple
import logging
import time

from config.settings import settings
from klv.barcanon import bar_matrix, bar_matrix_oracle, canonical_basis, check_bar_matrix, check_canonical, klv_table
from klv.coxeter import FoldedSystem, folded_system
from klv.errors import KlvError, UnknownName
from klv.fqmodel import build_scene, interpolate_datum, verify_counts
from klv.hecke import HeckeElt, generator_times, hecke_kl, naive_kl, t_mul
from klv.laurent import ONE, U, u_pow
from klv.matrix import PolyMatrix
from klv.modact import quadratic_check
from klv.paramdata import BUILTIN_NAMES, builtin_datum, hecke_case_datum
from models.reports import CheckResult, SelftestReport, Violation

logger = logging.getLogger(__name__)

# (type, sigma) pairs exercised by the Hecke checks
TWISTED_FOLDINGS: List[Tuple[str, Optional[str]]] = [("A1xA1", "(1 2)"), ("A2", "(1 2)"), ("A3", "(1 3)")]
UNTWISTED_FOLDINGS: List[Tuple[str, Optional[str]]] = [("A2", None), ("B2", None), ("A3", None)]
ASSOCIATIVITY_LIMIT = 8
COUNT_QS = (3, 5, 7)


def _run(name: str, body: Callable[[], List[Violation]]) -> CheckResult:
    started = time.perf_counter()
    try:
        violations = body()
    except KlvError as e:
        violations = [Violation(rule="error", detail=f"{type(e).__name__}: {e}")]
    logger.info(f"selftest {name}: {'pass' if not violations else 'FAIL'} in {time.perf_counter() - started:.2f}s")
    return CheckResult(name=name, passed=not violations, violations=violations)


def _systems(foldings: Sequence[Tuple[str, Optional[str]]]) -> List[Tuple[str, FoldedSystem]]:
    return [(f"{t}:{s or '1'}", folded_system(t, s)) for t, s in foldings]


# ============ checks ============

def quadratic_relations() -> List[Violation]:
    violations = []
    for name in BUILTIN_NAMES:
        violations += quadratic_check(builtin_datum(name)).violations
    return violations


def hecke_axioms() -> List[Violation]:
    """Quadratic relation, T_x T_y = T_xy when lengths add, and associativity on small groups."""
    violations = []
    for label, F in _systems(TWISTED_FOLDINGS + UNTWISTED_FOLDINGS):
        basis = {w: HeckeElt.basis(w) for w in F.elements}
        for g in F.generators:
            q = u_pow(F.m[g])
            for w, t in basis.items():
                once = generator_times(F, g, t)
                twice = generator_times(F, g, once)
                if twice != once.scale(q - 1) + t.scale(q):
                    violations.append(Violation(rule="quadratic", where=f"{label}:{g}", detail=F.name(w)))
        for x, y in product(F.elements, repeat=2):
            xy = F.mul(x, y)
            if F.length(xy) == F.length(x) + F.length(y) and t_mul(F, basis[x], basis[y]) != basis[xy]:
                violations.append(Violation(rule="braid", where=label, detail=f"{F.name(x)} * {F.name(y)}"))
        if len(F.elements) <= ASSOCIATIVITY_LIMIT:
            for x, y, z in product(F.elements, repeat=3):
                left = t_mul(F, t_mul(F, basis[x], basis[y]), basis[z])
                right = t_mul(F, basis[x], t_mul(F, basis[y], basis[z]))
                if left != right:
                    violations.append(Violation(
                        rule="associativity", where=label, detail=f"{F.name(x)}, {F.name(y)}, {F.name(z)}"
                    ))
    return violations


def classical_reduction() -> List[Violation]:
    F = folded_system("A3")
    table = hecke_kl(F)
    violations = []
    if table != naive_kl(F.base):
        violations.append(Violation(rule="classical", where="A3", detail="hecke_kl differs from the naive recursion"))
    entry = table["s2", "s2s1s3s2"]
    if entry != U + 1:
        violations.append(Violation(rule="classical", where="s2,s2s1s3s2", detail=str(entry)))
    return violations


def folded_rank_one() -> List[Violation]:
    violations = []
    for label, F in _systems(TWISTED_FOLDINGS[:2]):
        table = hecke_kl(F)
        top = F.name(F.w_omega[F.generators[0]])
        identity = F.name(F.base.identity)
        if table[identity, top] != ONE:
            violations.append(Violation(rule="rank-one", where=label, detail=str(table[identity, top])))
    return violations


def finite_field_counts() -> List[Violation]:
    violations = []
    for family in ("a2-c", "a2-s", "a1a1-sc"):
        for q in COUNT_QS:
            report = verify_counts(build_scene(family, q))
            for check in report.checks:
                if not check.passed:
                    violations.append(Violation(
                        rule="counts", where=f"{family}@{q}",
                        detail=f"{check.formula}: expected {check.expected}, got {check.actual}"
                    ))
    return violations


def formula_recovery() -> List[Violation]:
    u = U
    expected = {
        "a2-c": PolyMatrix(["L", "L'"], {
            ("L", "L"): u, ("L'", "L"): u + 1,
            ("L", "L'"): u ** 3 - u, ("L'", "L'"): u ** 3 - u - 1,
        }),
        "a1a1-sc": PolyMatrix(["L1", "L2", "L'", "L''"], {
            ("L2", "L1"): 1, ("L'", "L1"): 1,
            ("L1", "L2"): 1, ("L'", "L2"): 1,
            ("L1", "L'"): u ** 2 - 1, ("L2", "L'"): u ** 2 - 1, ("L'", "L'"): u ** 2 - 2,
            ("L''", "L''"): -1,
        }),
    }
    violations = []
    for family, matrix in expected.items():
        datum, derived = interpolate_datum(family, settings.fq.default_samples)
        if derived != matrix:
            violations.append(Violation(rule="formula", where=family, detail=derived.to_tsv()))
        if datum != builtin_datum(family):
            violations.append(Violation(rule="formula", where=family, detail="derived datum differs from built-in"))
    return violations


def _bar_cases():
    cases = [(name, builtin_datum(name)) for name in BUILTIN_NAMES]
    for label, F in _systems(TWISTED_FOLDINGS + UNTWISTED_FOLDINGS):
        cases.append((f"hecke:{label}", hecke_case_datum(F)))
    return cases


def bar_cross_validation() -> List[Violation]:
    violations = []
    for label, d in _bar_cases():
        if bar_matrix(d) != bar_matrix_oracle(d):
            violations.append(Violation(rule="oracle", where=label, detail="recursion and oracle disagree"))
    return violations


def duality_involution() -> List[Violation]:
    violations = []
    for name in BUILTIN_NAMES:
        d = builtin_datum(name)
        violations += check_bar_matrix(d, bar_matrix(d)).violations
    return violations


def canonical_certification() -> List[Violation]:
    violations = []
    for label, d in _bar_cases():
        R = bar_matrix(d)
        P = canonical_basis(R, d.lengths())
        for v in check_canonical(R, P, d.lengths()).violations:
            violations.append(Violation(rule=v.rule, where=f"{label}:{v.where}", detail=v.detail))
    return violations


def regular_module() -> List[Violation]:
    violations = []
    for label, F in _systems(TWISTED_FOLDINGS + UNTWISTED_FOLDINGS):
        if klv_table(hecke_case_datum(F)) != hecke_kl(F):
            violations.append(Violation(rule="regular-module", where=label))
    return violations


CHECKS: List[Tuple[str, Callable[[], List[Violation]]]] = [
    ("quadratic-relation", quadratic_relations),
    ("hecke-axioms", hecke_axioms),
    ("classical-reduction", classical_reduction),
    ("folded-rank-one", folded_rank_one),
    ("finite-field-counts", finite_field_counts),
    ("formula-recovery", formula_recovery),
    ("bar-cross-validation", bar_cross_validation),
    ("duality-involution", duality_involution),
    ("canonical-certification", canonical_certification),
    ("regular-module", regular_module),
]


def run_selftest(names: Optional[Sequence[str]] = None) -> SelftestReport:
    """
    Run the acceptance checks (all of them, or the named subset).

    Raises:
        UnknownName: a requested check does not exist
    """
    known = [name for name, _ in CHECKS]
    unknown = [name for name in names or [] if name not in known]
    if unknown:
        raise UnknownName(f"Unknown selftest checks {unknown}; known: {known}")
    started = time.perf_counter()
    results = [_run(name, body) for name, body in CHECKS if not names or name in names]
    report = SelftestReport(
        passed=all(r.passed for r in results),
        elapsed_seconds=round(time.perf_counter() - started, 3),
        results=results,
    )
    logger.info(f"selftest finished: {sum(r.passed for r in results)}/{len(results)} passed")
    return report
