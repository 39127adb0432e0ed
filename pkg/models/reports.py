"""
Report models returned by checks that never raise.
"""
from pydantic import BaseModel, Field
from typing import Dict, List, Optional


class Violation(BaseModel):
    """A single failed rule."""
    rule: str
    where: str = ""
    detail: str = ""


class ValidationReport(BaseModel):
    """Result of validate_datum."""
    datum: str
    passed: bool
    violations: List[Violation] = Field(default_factory=list)


class CheckResult(BaseModel):
    """Result of one named check."""
    name: str
    passed: bool
    violations: List[Violation] = Field(default_factory=list)


class CountCheck(BaseModel):
    """A cardinality compared with its closed form."""
    formula: str
    expected: List[int]
    actual: List[int]
    passed: bool


class CountsReport(BaseModel):
    """Result of verify_counts for one scene."""
    family: str
    q: int
    passed: bool
    checks: List[CountCheck] = Field(default_factory=list)


class TraceReport(BaseModel):
    """Result of trace_check: parameter -> {orbit label: coefficient}."""
    family: str
    datum: str
    qs: List[int]
    passed: bool
    dictionary: Dict[str, Dict[str, int]] = Field(default_factory=dict)
    detail: str = ""


class DeriveReport(BaseModel):
    """Result of fq derive."""
    family: str
    qs: List[int]
    output: Optional[str] = None
    validation: ValidationReport
    counts: List[CountsReport] = Field(default_factory=list)
    matrix: Dict[str, Dict[str, str]] = Field(default_factory=dict)
    passed: bool


class SelftestReport(BaseModel):
    """Result of the acceptance suite."""
    passed: bool
    elapsed_seconds: float
    results: List[CheckResult] = Field(default_factory=list)
