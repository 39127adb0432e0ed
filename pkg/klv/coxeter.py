"""
Finite Weyl groups and their foldings by a diagram involution.

Elements are stored as permutations of the full root list: the tuple w
satisfies roots[w[i]] = w(roots[i]). The length of w is the number of
positive roots it sends to negative roots.
"""
from collections import deque
from typing import Dict, List, Optional, Sequence, Tuple
import logging
import re

from config.settings import settings
from klv.errors import GroupError, InvalidSigma, NotFiniteType, UnknownType, UnsupportedOrbit

logger = logging.getLogger(__name__)

Element = Tuple[int, ...]
Cartan = Tuple[Tuple[int, ...], ...]

_TYPE_PART = re.compile(r"^([A-G])(\d+)$")


# ============ Cartan matrices ============

def _chain(n: int) -> List[List[int]]:
    matrix = [[0] * n for _ in range(n)]
    for i in range(n):
        matrix[i][i] = 2
        if i + 1 < n:
            matrix[i][i + 1] = -1
            matrix[i + 1][i] = -1
    return matrix


def _simple_type(letter: str, n: int) -> List[List[int]]:
    if letter == "A" and 1 <= n <= 7:
        return _chain(n)
    if letter in ("B", "C") and n >= 2:
        matrix = _chain(n)
        if letter == "B":
            matrix[n - 2][n - 1] = -2
        else:
            matrix[n - 1][n - 2] = -2
        return matrix
    if letter == "D" and n >= 4:
        matrix = _chain(n - 1) + [[0] * (n - 1)]
        for row in matrix:
            row.append(0)
        matrix[n - 1][n - 1] = 2
        matrix[n - 2][n - 1] = matrix[n - 1][n - 2] = 0
        matrix[n - 3][n - 1] = matrix[n - 1][n - 3] = -1
        return matrix
    if letter == "G" and n == 2:
        return [[2, -1], [-3, 2]]
    if letter == "F" and n == 4:
        return [[2, -1, 0, 0], [-1, 2, -2, 0], [0, -1, 2, -1], [0, 0, -1, 2]]
    raise UnknownType(f"Unknown Cartan type: {letter}{n}")


def cartan_matrix(name: str) -> Cartan:
    """
    Cartan matrix of a named type.

    Args:
        name: "A2", "B3", "D4", "G2", or products such as "A1xA1"

    Returns:
        Block-diagonal integer matrix with A[i][j] = <alpha_i^vee, alpha_j>
    """
    parts = [part.strip() for part in name.strip().split("x")]
    blocks = []
    for part in parts:
        match = _TYPE_PART.match(part)
        if match is None:
            raise UnknownType(f"Unknown Cartan type: {name!r}")
        blocks.append(_simple_type(match.group(1), int(match.group(2))))
    size = sum(len(block) for block in blocks)
    matrix = [[0] * size for _ in range(size)]
    offset = 0
    for block in blocks:
        for i, row in enumerate(block):
            for j, value in enumerate(row):
                matrix[offset + i][offset + j] = value
        offset += len(block)
    return tuple(tuple(row) for row in matrix)


def _check_cartan(cartan: Cartan) -> None:
    rank = len(cartan)
    for i in range(rank):
        if len(cartan[i]) != rank:
            raise NotFiniteType("Cartan matrix must be square")
        if cartan[i][i] != 2:
            raise NotFiniteType(f"Diagonal entry {i + 1} is not 2")
        for j in range(rank):
            if i != j and (cartan[i][j] > 0 or (cartan[i][j] == 0) != (cartan[j][i] == 0)):
                raise NotFiniteType(f"Entries ({i + 1},{j + 1}) do not form a generalized Cartan matrix")


# ============ Weyl group ============

class WeylGroup:
    """
    A finite Weyl group with all elements enumerated.

    Attributes:
        cartan: the Cartan matrix
        type_name: the Cartan type it was built from, e.g. "B2", if known
        roots: positive roots (by height) followed by their negatives
        elements: all elements sorted by (length, lexicographically first reduced word)
        longest: the longest element w0
        nu: length of w0, the number of positive roots
    """

    def __init__(self, cartan: Sequence[Sequence[int]], type_name: Optional[str] = None):
        self.cartan: Cartan = tuple(tuple(int(x) for x in row) for row in cartan)
        _check_cartan(self.cartan)
        self.rank = len(self.cartan)
        self.type_name = type_name
        self.roots = self._close_roots()
        self.n_positive = len(self.roots) // 2
        self._root_index = {root: i for i, root in enumerate(self.roots)}
        self.identity: Element = tuple(range(len(self.roots)))
        self.simple: List[Element] = [self._simple_reflection(i) for i in range(self.rank)]
        self.elements: List[Element] = []
        self._length: Dict[Element, int] = {}
        self._word: Dict[Element, Tuple[int, ...]] = {}
        self._bruhat_cache: Dict[Tuple[Element, Element], bool] = {}
        self._enumerate()
        self.longest = self.elements[-1]
        self.nu = self._length[self.longest]
        logger.info(f"Weyl group built: rank={self.rank}, order={len(self.elements)}, nu={self.nu}")

    def _reflect(self, i: int, root: Tuple[int, ...]) -> Tuple[int, ...]:
        pairing = sum(self.cartan[i][j] * root[j] for j in range(self.rank))
        return tuple(c - pairing if j == i else c for j, c in enumerate(root))

    def _close_roots(self) -> List[Tuple[int, ...]]:
        simple = [tuple(1 if j == i else 0 for j in range(self.rank)) for i in range(self.rank)]
        found = set(simple)
        queue = deque(simple)
        while queue:
            root = queue.popleft()
            for i in range(self.rank):
                image = self._reflect(i, root)
                if image not in found:
                    if len(found) >= settings.group.max_roots:
                        raise NotFiniteType(
                            f"Root closure exceeded {settings.group.max_roots} roots; not a finite type"
                        )
                    found.add(image)
                    queue.append(image)
        positive = sorted(
            (r for r in found if all(c >= 0 for c in r)), key=lambda r: (sum(r), tuple(-c for c in r))
        )
        if 2 * len(positive) != len(found):
            raise NotFiniteType("Root closure produced roots that are neither positive nor negative")
        return positive + [tuple(-c for c in r) for r in positive]

    def _simple_reflection(self, i: int) -> Element:
        return tuple(self._root_index[self._reflect(i, root)] for root in self.roots)

    def _enumerate(self) -> None:
        found = {self.identity}
        queue = deque([self.identity])
        while queue:
            w = queue.popleft()
            for s in self.simple:
                sw = self.mul(s, w)
                if sw not in found:
                    if len(found) >= settings.group.max_group_order:
                        raise GroupError(
                            f"Weyl group order exceeds max_group_order={settings.group.max_group_order}"
                        )
                    found.add(sw)
                    queue.append(sw)
        for w in found:
            self._length[w] = sum(1 for i in range(self.n_positive) if w[i] >= self.n_positive)
        for w in found:
            self._word[w] = self._greedy_word(w)
        self.elements = sorted(found, key=self.sort_key)

    # basic operations

    def mul(self, a: Element, b: Element) -> Element:
        """The product ab (apply b first)."""
        return tuple(a[i] for i in b)

    def inverse(self, w: Element) -> Element:
        result = [0] * len(w)
        for i, image in enumerate(w):
            result[image] = i
        return tuple(result)

    def length(self, w: Element) -> int:
        return self._length[w]

    def left_descents(self, w: Element) -> List[int]:
        """Indices i with l(s_i w) < l(w)."""
        # s_i w < w exactly when w^-1 sends alpha_i negative
        inverse = self.inverse(w)
        return [i for i in range(self.rank) if inverse[i] >= self.n_positive]

    def _greedy_word(self, w: Element) -> Tuple[int, ...]:
        word = []
        while w != self.identity:
            i = self.left_descents(w)[0]
            word.append(i)
            w = self.mul(self.simple[i], w)
        return tuple(word)

    def reduced_word(self, w: Element) -> Tuple[int, ...]:
        """Lexicographically first reduced word, as 0-based simple indices."""
        return self._word[w]

    def sort_key(self, w: Element) -> Tuple[int, Tuple[int, ...]]:
        return self._length[w], self._word[w]

    def name(self, w: Element) -> str:
        word = self._word[w]
        return "".join(f"s{i + 1}" for i in word) if word else "1"

    def from_word(self, word: Sequence[int]) -> Element:
        w = self.identity
        for i in word:
            w = self.mul(w, self.simple[i])
        return w

    def bruhat_leq(self, y: Element, w: Element) -> bool:
        """Bruhat order by the descent recursion."""
        key = (y, w)
        cached = self._bruhat_cache.get(key)
        if cached is not None:
            return cached
        if w == self.identity:
            result = y == self.identity
        elif self._length[y] > self._length[w]:
            result = False
        else:
            s = self.simple[self.left_descents(w)[0]]
            sw = self.mul(s, w)
            sy = self.mul(s, y)
            if self._length[sy] < self._length[y]:
                result = self.bruhat_leq(sy, sw)
            else:
                result = self.bruhat_leq(y, sw)
        self._bruhat_cache[key] = result
        return result

    def root_permutation(self, sigma: Sequence[int]) -> Element:
        """Permutation of the root list induced by a permutation of the simple roots."""
        images = []
        for root in self.roots:
            image = [0] * self.rank
            for j, c in enumerate(root):
                image[sigma[j]] = c
            images.append(self._root_index[tuple(image)])
        return tuple(images)


def build_weyl(cartan: Sequence[Sequence[int]], type_name: Optional[str] = None) -> WeylGroup:
    return WeylGroup(cartan, type_name)


def bruhat_leq(W: WeylGroup, y: Element, w: Element) -> bool:
    return W.bruhat_leq(y, w)


# ============ Folding ============

def parse_sigma(text: Optional[str], rank: int) -> Tuple[int, ...]:
    """
    Parse 1-based cycle notation, e.g. "(1 3)" or "(1 3)(2 4)".

    An empty string, "1" or "()" is the identity.
    """
    sigma = list(range(rank))
    text = (text or "").strip()
    if text in ("", "1", "()", "id"):
        return tuple(sigma)
    cycles = re.findall(r"\(([^()]*)\)", text)
    if not cycles or re.sub(r"\([^()]*\)", "", text).strip():
        raise InvalidSigma(f"Cannot parse permutation {text!r}")
    for cycle in cycles:
        try:
            points = [int(x) - 1 for x in re.split(r"[\s,]+", cycle.strip()) if x]
        except ValueError:
            raise InvalidSigma(f"Cannot parse permutation {text!r}")
        if any(p < 0 or p >= rank for p in points) or len(set(points)) != len(points):
            raise InvalidSigma(f"Cycle ({cycle}) is not a cycle on 1..{rank}")
        for a, b in zip(points, points[1:] + points[:1]):
            sigma[a] = b
    if sorted(sigma) != list(range(rank)):
        raise InvalidSigma(f"Cycles in {text!r} are not disjoint")
    return tuple(sigma)


def sigma_text(sigma: Sequence[int]) -> str:
    pairs = [f"({i + 1} {j + 1})" for i, j in enumerate(sigma) if i < j]
    return "".join(pairs) or "1"


class FoldedSystem:
    """
    The Coxeter system (W^sigma, S-bar) of a Weyl group folded by sigma.

    Generators are indexed by id strings joining their orbit members, e.g.
    "s1s3" for the orbit {s1, s3}; `m` holds each generator's type.
    """

    def __init__(self, base: WeylGroup, sigma: Sequence[int]):
        self.base = base
        self.sigma = tuple(sigma)
        self._check_sigma()
        self._root_sigma = base.root_permutation(self.sigma)

        self.orbits: List[Tuple[int, ...]] = []
        for i in range(base.rank):
            orbit = tuple(sorted({i, self.sigma[i]}))
            if orbit not in self.orbits:
                self.orbits.append(orbit)

        self.generators: List[str] = []
        self.m: Dict[str, int] = {}
        self.w_omega: Dict[str, Element] = {}
        for orbit in self.orbits:
            gid = "".join(f"s{i + 1}" for i in orbit)
            m = self._orbit_type(orbit)
            word = (orbit[0], orbit[1], orbit[0]) if m == 3 else orbit
            element = base.from_word(word)
            if base.length(element) != m:
                raise UnsupportedOrbit(f"Orbit {gid} has a longest element of length {base.length(element)}")
            self.generators.append(gid)
            self.m[gid] = m
            self.w_omega[gid] = element

        self.elements: List[Element] = [w for w in base.elements if self.apply_sigma(w) == w]
        self._by_name = {base.name(w): w for w in self.elements}
        logger.info(
            f"Folded by sigma={sigma_text(self.sigma)}: generators "
            f"{[(g, self.m[g]) for g in self.generators]}, |W^sigma|={len(self.elements)}"
        )

    def _check_sigma(self) -> None:
        rank = self.base.rank
        if sorted(self.sigma) != list(range(rank)):
            raise InvalidSigma(f"{self.sigma} is not a permutation of the simple reflections")
        if any(self.sigma[self.sigma[i]] != i for i in range(rank)):
            raise InvalidSigma(f"sigma={sigma_text(self.sigma)} does not square to the identity")
        cartan = self.base.cartan
        for i in range(rank):
            for j in range(rank):
                if cartan[self.sigma[i]][self.sigma[j]] != cartan[i][j]:
                    raise InvalidSigma(f"sigma does not preserve the Cartan matrix at ({i + 1},{j + 1})")

    def _orbit_type(self, orbit: Tuple[int, ...]) -> int:
        if len(orbit) == 1:
            return 1
        s, t = orbit
        product = self.base.cartan[s][t] * self.base.cartan[t][s]
        if product == 0:
            return 2
        if product == 1:
            return 3
        raise UnsupportedOrbit(f"Orbit (s{s + 1}, s{t + 1}) has m(s,t) > 3")

    def apply_sigma(self, w: Element) -> Element:
        """The diagram automorphism applied to w (conjugation on the root list)."""
        r = self._root_sigma
        return tuple(r[w[r[i]]] for i in range(len(w)))

    def length(self, w: Element) -> int:
        return self.base.length(w)

    def name(self, w: Element) -> str:
        return self.base.name(w)

    def element(self, name: str) -> Element:
        try:
            return self._by_name[name]
        except KeyError:
            raise GroupError(f"{name!r} is not an element of W^sigma")

    def mul(self, a: Element, b: Element) -> Element:
        return self.base.mul(a, b)

    def generator_acts(self, g: str, w: Element) -> Element:
        return self.base.mul(self.w_omega[g], w)

    def folded_reduced_word(self, w: Element) -> List[str]:
        """
        Split w into generators along a chain of left descents.

        Returns:
            Generator ids g1..gk with w = w_g1 ... w_gk and l(w) = sum of m(gi)
        """
        word = []
        while w != self.base.identity:
            for g in self.generators:
                shorter = self.base.mul(self.w_omega[g], w)
                if self.base.length(shorter) == self.base.length(w) - self.m[g]:
                    word.append(g)
                    w = shorter
                    break
            else:
                raise GroupError(f"{self.base.name(w)} has no folded left descent")
        return word


def fold(W: WeylGroup, sigma: Sequence[int]) -> FoldedSystem:
    return FoldedSystem(W, sigma)


def folded_reduced_word(F: FoldedSystem, w: Element) -> List[str]:
    return F.folded_reduced_word(w)


def folded_system(type_name: str, sigma: Optional[str] = None) -> FoldedSystem:
    """Build and fold a named type, e.g. folded_system("A3", "(1 3)")."""
    W = build_weyl(cartan_matrix(type_name), type_name)
    return fold(W, parse_sigma(sigma, W.rank))
