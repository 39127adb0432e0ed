"""
Sparse matrices and vectors over Z[u, u^-1] indexed by string ids.

Columns are the images of basis vectors: for a generator matrix M,
M[r, c] is the coefficient of a_r in T * a_c.
"""
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import pandas as pd

from klv.laurent import LaurentPoly, ONE, ZERO

Scalar = Union[LaurentPoly, int]


class MElt:
    """A module element: {basis id: nonzero Laurent coefficient}."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Mapping[str, Scalar]] = None):
        self._terms: Dict[str, LaurentPoly] = {}
        for key, value in (terms or {}).items():
            value = LaurentPoly.coerce(value)
            if value:
                self._terms[key] = value

    @classmethod
    def basis(cls, key: str) -> "MElt":
        return cls({key: ONE})

    def __getitem__(self, key: str) -> LaurentPoly:
        return self._terms.get(key, ZERO)

    def keys(self) -> Iterable[str]:
        return self._terms.keys()

    def items(self) -> Iterable[Tuple[str, LaurentPoly]]:
        return self._terms.items()

    def support(self) -> List[str]:
        return list(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __add__(self, other: "MElt") -> "MElt":
        result = dict(self._terms)
        for key, value in other._terms.items():
            result[key] = result.get(key, ZERO) + value
        return MElt(result)

    def __neg__(self) -> "MElt":
        return MElt({key: -value for key, value in self._terms.items()})

    def __sub__(self, other: "MElt") -> "MElt":
        return self + (-other)

    def scale(self, factor: Scalar) -> "MElt":
        return MElt({key: value * factor for key, value in self._terms.items()})

    def bar(self) -> "MElt":
        """Apply the bar involution to every coefficient."""
        return MElt({key: value.bar() for key, value in self._terms.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MElt):
            return NotImplemented
        return self._terms == other._terms

    def __repr__(self) -> str:
        body = ", ".join(f"{key}: {value}" for key, value in self._terms.items())
        return f"MElt({{{body}}})"

    def lines(self, order: Sequence[str]) -> List[str]:
        """`<id>\\t<polynomial>` lines in the given basis order, zero terms omitted."""
        return [f"{key}\t{self._terms[key]}" for key in order if key in self._terms]


class PolyMatrix:
    """Square matrix over Z[u, u^-1] with rows and columns indexed by the same id list."""

    def __init__(self, index: Sequence[str], entries: Optional[Mapping[Tuple[str, str], Scalar]] = None):
        self.index: List[str] = list(index)
        self._position = {key: i for i, key in enumerate(self.index)}
        if len(self._position) != len(self.index):
            raise ValueError("Matrix index ids must be unique")
        self._entries: Dict[Tuple[str, str], LaurentPoly] = {}
        for (row, col), value in (entries or {}).items():
            self[row, col] = value

    # construction

    @classmethod
    def identity(cls, index: Sequence[str]) -> "PolyMatrix":
        return cls(index, {(key, key): ONE for key in index})

    @classmethod
    def from_columns(cls, index: Sequence[str], columns: Mapping[str, MElt]) -> "PolyMatrix":
        matrix = cls(index)
        for col, vector in columns.items():
            for row, value in vector.items():
                matrix[row, col] = value
        return matrix

    def copy(self) -> "PolyMatrix":
        return PolyMatrix(self.index, self._entries)

    # access

    def __getitem__(self, key: Tuple[str, str]) -> LaurentPoly:
        return self._entries.get(key, ZERO)

    def __setitem__(self, key: Tuple[str, str], value: Scalar) -> None:
        row, col = key
        if row not in self._position or col not in self._position:
            raise KeyError(f"Unknown matrix index {key}")
        value = LaurentPoly.coerce(value)
        if value:
            self._entries[key] = value
        else:
            self._entries.pop(key, None)

    def __contains__(self, key: str) -> bool:
        return key in self._position

    def position(self, key: str) -> int:
        return self._position[key]

    def entries(self) -> Iterator[Tuple[str, str, LaurentPoly]]:
        """Nonzero entries as (row, col, value)."""
        for (row, col), value in self._entries.items():
            yield row, col, value

    def column(self, col: str) -> MElt:
        return MElt({row: value for (row, c), value in self._entries.items() if c == col})

    def row(self, row: str) -> MElt:
        return MElt({col: value for (r, col), value in self._entries.items() if r == row})

    def is_zero(self) -> bool:
        return not self._entries

    # algebra

    def _check_index(self, other: "PolyMatrix") -> None:
        if self.index != other.index:
            raise ValueError("Matrices are indexed by different id lists")

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        self._check_index(other)
        result = self.copy()
        for row, col, value in other.entries():
            result[row, col] = result[row, col] + value
        return result

    def __neg__(self) -> "PolyMatrix":
        return PolyMatrix(self.index, {key: -value for key, value in self._entries.items()})

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        return self + (-other)

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        self._check_index(other)
        by_row: Dict[str, List[Tuple[str, LaurentPoly]]] = {}
        for (k, col), value in other._entries.items():
            by_row.setdefault(k, []).append((col, value))
        result: Dict[Tuple[str, str], LaurentPoly] = {}
        for (row, k), left in self._entries.items():
            for col, right in by_row.get(k, ()):
                result[row, col] = result.get((row, col), ZERO) + left * right
        return PolyMatrix(self.index, result)

    def scale(self, factor: Scalar) -> "PolyMatrix":
        return PolyMatrix(self.index, {key: value * factor for key, value in self._entries.items()})

    def bar(self) -> "PolyMatrix":
        return PolyMatrix(self.index, {key: value.bar() for key, value in self._entries.items()})

    def apply(self, vector: MElt) -> MElt:
        """Matrix times column vector."""
        result: Dict[str, LaurentPoly] = {}
        for (row, col), value in self._entries.items():
            coefficient = vector[col]
            if coefficient:
                result[row] = result.get(row, ZERO) + value * coefficient
        return MElt(result)

    def restrict(self, keys: Sequence[str]) -> "PolyMatrix":
        """The principal submatrix on the given ids (in that order)."""
        keep = set(keys)
        return PolyMatrix(
            keys, {(r, c): v for (r, c), v in self._entries.items() if r in keep and c in keep}
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.index == other.index and self._entries == other._entries

    def evaluate(self, q: Union[int, Fraction]) -> List[List[Fraction]]:
        """Dense matrix of exact values at u = q, in index order."""
        size = len(self.index)
        dense = [[Fraction(0)] * size for _ in range(size)]
        for (row, col), value in self._entries.items():
            dense[self._position[row]][self._position[col]] = value.eval_int(q)
        return dense

    # output

    def to_frame(self) -> pd.DataFrame:
        """Canonical polynomial text in a DataFrame (rows and columns in index order)."""
        data = {col: [str(self[row, col]) for row in self.index] for col in self.index}
        frame = pd.DataFrame(data, index=self.index, columns=self.index)
        frame.index.name = "param"
        return frame

    def to_tsv(self) -> str:
        return self.to_frame().to_csv(sep="\t", lineterminator="\n")

    def __repr__(self) -> str:
        return f"PolyMatrix(index={self.index}, nonzero={len(self._entries)})"
