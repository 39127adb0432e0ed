"""
The quasisplit Hecke algebra of a folded Weyl group.

Basis T_w for w in W^sigma; the generator of type m satisfies
(T + 1)(T - u^m) = 0.
"""
from typing import Dict, Iterable, List, Mapping, Optional, Tuple
import logging

from klv.barcanon import canonical_basis
from klv.coxeter import Element, FoldedSystem, WeylGroup
from klv.laurent import LaurentPoly, ONE, ZERO, u_pow
from klv.matrix import PolyMatrix
from models.reports import CheckResult, Violation

logger = logging.getLogger(__name__)


class HeckeElt:
    """A Hecke algebra element {w: nonzero Laurent coefficient}."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Mapping[Element, LaurentPoly]] = None):
        self._terms: Dict[Element, LaurentPoly] = {}
        for w, c in (terms or {}).items():
            c = LaurentPoly.coerce(c)
            if c:
                self._terms[w] = c

    @classmethod
    def basis(cls, w: Element) -> "HeckeElt":
        """The basis element T_w."""
        return cls({w: ONE})

    def __getitem__(self, w: Element) -> LaurentPoly:
        return self._terms.get(w, ZERO)

    def items(self) -> Iterable[Tuple[Element, LaurentPoly]]:
        return self._terms.items()

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __add__(self, other: "HeckeElt") -> "HeckeElt":
        result = dict(self._terms)
        for w, c in other._terms.items():
            result[w] = result.get(w, ZERO) + c
        return HeckeElt(result)

    def __sub__(self, other: "HeckeElt") -> "HeckeElt":
        return self + other.scale(-1)

    def scale(self, factor) -> "HeckeElt":
        return HeckeElt({w: c * factor for w, c in self._terms.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HeckeElt):
            return NotImplemented
        return self._terms == other._terms

    def describe(self, F: FoldedSystem) -> str:
        parts = [f"({c})T_{F.name(w)}" for w, c in sorted(self._terms.items(), key=lambda t: F.base.sort_key(t[0]))]
        return " + ".join(parts) or "0"

    def __repr__(self) -> str:
        return f"HeckeElt(terms={len(self._terms)})"


def generator_times(F: FoldedSystem, g: str, h: HeckeElt) -> HeckeElt:
    """Left multiplication T_g * h."""
    m = F.m[g]
    result: Dict[Element, LaurentPoly] = {}
    for y, c in h.items():
        gy = F.generator_acts(g, y)
        if F.length(gy) > F.length(y):
            result[gy] = result.get(gy, ZERO) + c
        else:
            result[gy] = result.get(gy, ZERO) + c * u_pow(m)
            result[y] = result.get(y, ZERO) + c * (u_pow(m) - 1)
    return HeckeElt(result)


def generator_bar_times(F: FoldedSystem, g: str, h: HeckeElt) -> HeckeElt:
    """Left multiplication by bar(T_g) = u^-m T_g + (u^-m - 1) T_1."""
    m = F.m[g]
    return generator_times(F, g, h).scale(u_pow(-m)) + h.scale(u_pow(-m) - 1)


def t_mul(F: FoldedSystem, a: HeckeElt, b: HeckeElt) -> HeckeElt:
    """Product in the Hecke algebra, factoring each T_w of a along a folded reduced word."""
    result = HeckeElt()
    for w, c in a.items():
        partial = b
        for g in reversed(F.folded_reduced_word(w)):
            partial = generator_times(F, g, partial)
        result = result + partial.scale(c)
    return result


def t_bar(F: FoldedSystem, h: HeckeElt) -> HeckeElt:
    """The antilinear bar involution: bar(u^n T_w) = u^-n bar(T_g1) ... bar(T_gk)."""
    result = HeckeElt()
    identity = F.base.identity
    for w, c in h.items():
        partial = HeckeElt.basis(identity)
        for g in reversed(F.folded_reduced_word(w)):
            partial = generator_bar_times(F, g, partial)
        result = result + partial.scale(c.bar())
    return result


def t_duality(F: FoldedSystem, h: HeckeElt) -> HeckeElt:
    """The duality u^-nu * bar(h)."""
    return t_bar(F, h).scale(u_pow(-F.base.nu))


def element_names(F: FoldedSystem) -> List[str]:
    """W^sigma in length-then-lexicographic order, as display names."""
    return [F.name(w) for w in F.elements]


def hecke_bar_matrix(F: FoldedSystem) -> PolyMatrix:
    """Column w holds the coefficients of bar(T_w) in the T-basis."""
    names = element_names(F)
    matrix = PolyMatrix(names)
    for w in F.elements:
        for y, c in t_bar(F, HeckeElt.basis(w)).items():
            matrix[F.name(y), F.name(w)] = c
    return matrix


def hecke_kl(F: FoldedSystem) -> PolyMatrix:
    """
    Twisted Kazhdan-Lusztig polynomials P_{y,w} of the folded system.

    Returns:
        PolyMatrix with rows y and columns w, indexed by element names
    """
    lengths = {F.name(w): F.length(w) for w in F.elements}
    table = canonical_basis(hecke_bar_matrix(F), lengths)
    logger.info(f"Hecke KL table computed for |W^sigma|={len(F.elements)}")
    return table


def check_hecke_kl(F: FoldedSystem, P: PolyMatrix) -> CheckResult:
    """
    Verify self-duality, Bruhat vanishing, degree bounds and the unit diagonal.

    Report-only; never raises.
    """
    violations: List[Violation] = []
    for w in F.elements:
        wn = F.name(w)
        lw = F.length(w)
        column = HeckeElt({y: P[F.name(y), wn] for y in F.elements})
        lhs = t_bar(F, column)
        rhs = column.scale(u_pow(-lw))
        if lhs != rhs:
            violations.append(Violation(rule="self-duality", where=wn, detail="bar(C_w) != C_w"))
        if P[wn, wn] != ONE:
            violations.append(Violation(rule="unit-diagonal", where=wn, detail=f"P_ww = {P[wn, wn]}"))
        for y in F.elements:
            yn = F.name(y)
            entry = P[yn, wn]
            if not entry or y == w:
                continue
            if not F.base.bruhat_leq(y, w):
                violations.append(Violation(rule="bruhat-vanishing", where=f"{yn},{wn}", detail=str(entry)))
            if not entry.is_polynomial() or 2 * entry.degree() > lw - F.length(y) - 1:
                violations.append(Violation(rule="degree-bound", where=f"{yn},{wn}", detail=str(entry)))
    return CheckResult(name="hecke-kl", passed=not violations, violations=violations)


def naive_kl(W: WeylGroup) -> PolyMatrix:
    """
    Classical Kazhdan-Lusztig polynomials by the textbook recursion.

    For a left descent s of w and v = sw:
    P_{x,w} = u^(1-c) P_{sx,v} + u^c P_{x,v} - sum mu(z,v) u^((l(w)-l(z))/2) P_{x,z},
    the sum over z < v with sz < z, c = 1 if sx < x else 0.
    """
    P: Dict[Tuple[Element, Element], LaurentPoly] = {}
    elements = W.elements

    def get(x: Element, w: Element) -> LaurentPoly:
        return P.get((x, w), ZERO)

    def mu(z: Element, v: Element) -> int:
        gap = W.length(v) - W.length(z)
        if gap <= 0 or gap % 2 == 0:
            return 0
        return get(z, v)[(gap - 1) // 2]

    for w in elements:
        if w == W.identity:
            P[(w, w)] = ONE
            continue
        s = W.simple[W.left_descents(w)[0]]
        v = W.mul(s, w)
        lw = W.length(w)
        corrections = [
            (z, mu(z, v)) for z in elements
            if W.length(z) < W.length(v) and W.length(W.mul(s, z)) < W.length(z) and mu(z, v)
        ]
        for x in elements:
            if W.length(x) > lw:
                continue
            sx = W.mul(s, x)
            c = 1 if W.length(sx) < W.length(x) else 0
            value = get(sx, v) * u_pow(1 - c) + get(x, v) * u_pow(c)
            for z, coefficient in corrections:
                value = value - get(x, z) * (coefficient * u_pow((lw - W.length(z)) // 2))
            if value:
                P[(x, w)] = value

    names = [W.name(w) for w in elements]
    return PolyMatrix(names, {(W.name(x), W.name(w)): c for (x, w), c in P.items()})
