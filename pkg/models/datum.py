"""
Data models for parameter data (the datum file format).
"""
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, field_validator
from typing import Dict, List, Optional, Tuple
from enum import Enum

from klv.errors import MissingStatus


class Kind(str, Enum):
    """Generator status kinds, written with ASCII signs ("+" ascent side, "-" descent side)."""
    # type 1
    C1_ASC = "1C+"
    C1_DESC = "1C-"
    I1_SINGLE = "1I1+"
    R1_SINGLE = "1R1-"
    R1_SINGLE_S = "1R1s-"
    I1_DOUBLE = "1I2+"
    R1_DOUBLE = "1R2-"
    I1_DOUBLE_S = "1I2s+"
    RNP1 = "1RNP+"
    IC1 = "1IC-"
    # type 2
    C2_ASC = "2C+"
    C2_DESC = "2C-"
    SI2 = "2SI+"
    SR2 = "2SR-"
    I2_11 = "2I11+"
    R2_11 = "2R11-"
    I2_22 = "2I22+"
    R2_22 = "2R22-"
    I2_12 = "2I12+"
    R2_21 = "2R21-"
    RNP2 = "2RNP+"
    IC2 = "2IC-"
    # type 3
    C3_ASC = "3C+"
    C3_DESC = "3C-"
    SI3 = "3SI+"
    R3 = "3R-"
    I3 = "3I+"
    SR3 = "3SR-"
    RNP3 = "3RNP+"
    IC3 = "3IC-"

    @property
    def m(self) -> int:
        return int(self.value[0])

    @property
    def ascent_side(self) -> bool:
        return self.value.endswith("+")


class Role(str, Enum):
    """Sign roles of the 2I12+/2R21- pattern."""
    PLUS = "plus"
    MINUS = "minus"
    SUM = "sum"
    DIFF = "diff"


class GeneratorSpec(BaseModel):
    """A folded generator and its type."""
    model_config = ConfigDict(extra="forbid")

    id: str
    m: int = Field(ge=1, le=3)


class Parameter(BaseModel):
    """A sigma-fixed parameter with its orbit dimension."""
    model_config = ConfigDict(extra="forbid")

    id: str
    length: int = Field(ge=0)
    orbit: Optional[str] = None


class GeneratorStatus(BaseModel):
    """Status of one generator at one parameter."""
    model_config = ConfigDict(extra="forbid")

    gen: str
    param: str
    kind: Kind
    cross: Optional[str] = None
    cayley: Optional[List[str]] = None
    role: Optional[Role] = None

    @field_validator("kind", mode="before")
    @classmethod
    def _ascii_minus(cls, value):
        if isinstance(value, str):
            return value.replace("−", "-")
        return value


class LeviSubset(BaseModel):
    """A restriction-closed sub-datum."""
    model_config = ConfigDict(extra="forbid")

    gens: List[str]
    params: List[str]


class ParamDatum(BaseModel):
    """
    An abstract parameter datum.

    Parameters keep file order; that order is the basis order of every
    matrix built from the datum.
    """
    model_config = ConfigDict(extra="forbid")

    name: str
    generators: List[GeneratorSpec]
    parameters: List[Parameter]
    statuses: List[GeneratorStatus]
    levi_subsets: Optional[List[LeviSubset]] = None

    _status_index: Optional[Dict[Tuple[str, str], GeneratorStatus]] = PrivateAttr(default=None)

    def __eq__(self, other: object) -> bool:
        # field values only; the status index cache is not part of the datum
        if not isinstance(other, ParamDatum):
            return NotImplemented
        return self.model_dump() == other.model_dump()

    def param_ids(self) -> List[str]:
        return [p.id for p in self.parameters]

    def gen_ids(self) -> List[str]:
        return [g.id for g in self.generators]

    def m_of(self, gen: str) -> int:
        for g in self.generators:
            if g.id == gen:
                return g.m
        raise KeyError(f"Unknown generator {gen!r}")

    def lengths(self) -> Dict[str, int]:
        return {p.id: p.length for p in self.parameters}

    def parameter(self, param: str) -> Parameter:
        for p in self.parameters:
            if p.id == param:
                return p
        raise KeyError(f"Unknown parameter {param!r}")

    def status(self, gen: str, param: str) -> GeneratorStatus:
        """
        Look up a status.

        Raises:
            MissingStatus: the pair has no status
        """
        if self._status_index is None:
            self._status_index = {(s.gen, s.param): s for s in self.statuses}
        try:
            return self._status_index[gen, param]
        except KeyError:
            raise MissingStatus(f"No status for generator {gen!r} at parameter {param!r}")
