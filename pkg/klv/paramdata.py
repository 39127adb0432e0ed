"""
Parameter data: validation, file I/O, restriction and built-in data.
"""
import json
import logging
from pathlib import Path
from typing import Iterable, List, Optional, Set, Union

import yaml
from pydantic import ValidationError

from config.settings import settings
from klv.coxeter import FoldedSystem, folded_system, sigma_text
from klv.errors import DatumFormatError, KlvError, UnknownName
from klv.modact import KIND_TABLE, quadratic_check, references
from models.datum import GeneratorSpec, GeneratorStatus, Kind, Parameter, ParamDatum, Role
from models.reports import ValidationReport, Violation

logger = logging.getLogger(__name__)

BUILTIN_NAMES = ["a1a1-sc", "a1a1-int", "a1a1-ad", "a2-c", "a2-s"]

_CROSS_PAIRS = {
    Kind.C1_ASC: Kind.C1_DESC, Kind.C1_DESC: Kind.C1_ASC,
    Kind.C2_ASC: Kind.C2_DESC, Kind.C2_DESC: Kind.C2_ASC,
    Kind.C3_ASC: Kind.C3_DESC, Kind.C3_DESC: Kind.C3_ASC,
}
_SEMI_PAIRS = {
    Kind.SI2: Kind.SR2, Kind.SR2: Kind.SI2,
    Kind.SI3: Kind.R3, Kind.R3: Kind.SI3,
    Kind.I3: Kind.SR3, Kind.SR3: Kind.I3,
}
_TYPE_I = {Kind.I1_SINGLE: Kind.R1_SINGLE, Kind.I2_11: Kind.R2_11}
_TYPE_II = {Kind.I1_DOUBLE: Kind.R1_DOUBLE, Kind.I2_22: Kind.R2_22}


# ============ validation ============

def _structure_violations(d: ParamDatum) -> List[Violation]:
    violations: List[Violation] = []
    gens = d.gen_ids()
    params = d.param_ids()
    if len(set(gens)) != len(gens):
        violations.append(Violation(rule="unique-ids", detail="generator ids repeat"))
    if len(set(params)) != len(params):
        violations.append(Violation(rule="unique-ids", detail="parameter ids repeat"))
    known_gens, known_params = set(gens), set(params)

    seen: Set = set()
    for s in d.statuses:
        where = f"{s.gen}@{s.param}"
        if s.gen not in known_gens or s.param not in known_params:
            violations.append(Violation(rule="dangling-reference", where=where, detail="status of unknown generator or parameter"))
            continue
        if (s.gen, s.param) in seen:
            violations.append(Violation(rule="duplicate-status", where=where))
        seen.add((s.gen, s.param))
        if s.kind.m != d.m_of(s.gen):
            violations.append(Violation(rule="kind-type", where=where, detail=f"{s.kind.value} on a type-{d.m_of(s.gen)} generator"))
        spec = KIND_TABLE[s.kind]
        if bool(s.cross) != spec.cross:
            violations.append(Violation(rule="payload", where=where, detail=f"{s.kind.value} {'needs' if spec.cross else 'takes no'} cross"))
        if len(s.cayley or []) != spec.cayley:
            violations.append(Violation(rule="payload", where=where, detail=f"{s.kind.value} needs {spec.cayley} cayley targets"))
        if spec.roles and s.role not in spec.roles:
            violations.append(Violation(rule="payload", where=where, detail=f"{s.kind.value} needs a role in {[r.value for r in spec.roles]}"))
        if not spec.roles and s.role is not None:
            violations.append(Violation(rule="payload", where=where, detail=f"{s.kind.value} takes no role"))
        for ref in references(s):
            if ref not in known_params:
                violations.append(Violation(rule="dangling-reference", where=where, detail=f"unknown parameter {ref!r}"))
            elif ref == s.param:
                violations.append(Violation(rule="payload", where=where, detail="status refers to its own parameter"))
        if spec.cayley == 2 and len(set(s.cayley or [])) != 2:
            violations.append(Violation(rule="payload", where=where, detail="cayley targets must be distinct"))

    for g in gens:
        for p in params:
            if (g, p) not in seen:
                violations.append(Violation(rule="missing-status", where=f"{g}@{p}"))
    return violations


def _reciprocity_violations(d: ParamDatum) -> List[Violation]:
    violations: List[Violation] = []
    lookup = {(s.gen, s.param): s for s in d.statuses}

    def fail(s: GeneratorStatus, detail: str) -> None:
        violations.append(Violation(rule="reciprocity", where=f"{s.gen}@{s.param}", detail=detail))

    def at(s: GeneratorStatus, param: str) -> Optional[GeneratorStatus]:
        return lookup.get((s.gen, param))

    for s in d.statuses:
        k = s.kind
        cayley = s.cayley or []
        if k in _CROSS_PAIRS:
            t = at(s, s.cross)
            if t is None or t.kind != _CROSS_PAIRS[k] or t.cross != s.param:
                fail(s, f"{s.cross} must carry {_CROSS_PAIRS[k].value} with cross {s.param}")
        elif k in _SEMI_PAIRS:
            t = at(s, cayley[0])
            if t is None or t.kind != _SEMI_PAIRS[k] or t.cayley != [s.param]:
                fail(s, f"{cayley[0]} must carry {_SEMI_PAIRS[k].value} with cayley [{s.param}]")
        elif k in _TYPE_I:
            partner, target = at(s, s.cross), at(s, cayley[0])
            if partner is None or partner.kind != k or partner.cross != s.param or partner.cayley != cayley:
                fail(s, f"cross partner {s.cross} must carry {k.value} with cross {s.param} and the same cayley target")
            if target is None or target.kind != _TYPE_I[k] or set(target.cayley or []) != {s.param, s.cross}:
                fail(s, f"{cayley[0]} must carry {_TYPE_I[k].value} with cayley {{{s.param}, {s.cross}}}")
        elif k in _TYPE_I.values():
            ascent = next(a for a, r in _TYPE_I.items() if r == k)
            for i, src in enumerate(cayley):
                t = at(s, src)
                other = cayley[1 - i]
                if t is None or t.kind != ascent or t.cayley != [s.param] or t.cross != other:
                    fail(s, f"{src} must carry {ascent.value} with cayley [{s.param}] and cross {other}")
        elif k in _TYPE_II:
            for i, target_id in enumerate(cayley):
                t = at(s, target_id)
                other = cayley[1 - i]
                if t is None or t.kind != _TYPE_II[k] or t.cayley != [s.param] or t.cross != other:
                    fail(s, f"{target_id} must carry {_TYPE_II[k].value} with cayley [{s.param}] and cross {other}")
        elif k in _TYPE_II.values():
            ascent = next(a for a, r in _TYPE_II.items() if r == k)
            source, sibling = at(s, cayley[0]), at(s, s.cross)
            if source is None or source.kind != ascent or set(source.cayley or []) != {s.param, s.cross}:
                fail(s, f"{cayley[0]} must carry {ascent.value} with cayley {{{s.param}, {s.cross}}}")
            if sibling is None or sibling.kind != k or sibling.cayley != cayley or sibling.cross != s.param:
                fail(s, f"{s.cross} must carry {k.value} with cayley {cayley} and cross {s.param}")
        elif k == Kind.I2_12:
            for target_id, role in zip(cayley, (Role.SUM, Role.DIFF)):
                t = at(s, target_id)
                position = 0 if s.role == Role.PLUS else 1
                if (t is None or t.kind != Kind.R2_21 or t.role != role or len(t.cayley or []) != 2
                        or t.cayley[position] != s.param):
                    fail(s, f"{target_id} must carry 2R21- role {role.value} listing {s.param} as its {s.role.value if s.role else '?'} source")
        elif k == Kind.R2_21:
            for source_id, role in zip(cayley, (Role.PLUS, Role.MINUS)):
                t = at(s, source_id)
                position = 0 if s.role == Role.SUM else 1
                if (t is None or t.kind != Kind.I2_12 or t.role != role or len(t.cayley or []) != 2
                        or t.cayley[position] != s.param):
                    fail(s, f"{source_id} must carry 2I12+ role {role.value} listing {s.param} as its {s.role.value if s.role else '?'} target")
    return violations


def _length_violations(d: ParamDatum) -> List[Violation]:
    violations: List[Violation] = []
    lengths = d.lengths()
    for s in d.statuses:
        spec = KIND_TABLE[s.kind]
        own = lengths[s.param]
        if spec.cross_delta is not None and s.cross in lengths and lengths[s.cross] - own != spec.cross_delta:
            violations.append(Violation(
                rule="length-delta", where=f"{s.gen}@{s.param}",
                detail=f"cross {s.cross} has length {lengths[s.cross]}, expected {own + spec.cross_delta}"
            ))
        if spec.cayley_delta is not None:
            for ref in s.cayley or []:
                if ref in lengths and lengths[ref] - own != spec.cayley_delta:
                    violations.append(Violation(
                        rule="length-delta", where=f"{s.gen}@{s.param}",
                        detail=f"cayley {ref} has length {lengths[ref]}, expected {own + spec.cayley_delta}"
                    ))
    return violations


def _levi_violations(d: ParamDatum) -> List[Violation]:
    violations: List[Violation] = []
    lookup = {(s.gen, s.param): s for s in d.statuses}
    known_gens, known_params = set(d.gen_ids()), set(d.param_ids())
    for i, levi in enumerate(d.levi_subsets or []):
        where = f"levi[{i}]"
        unknown = [g for g in levi.gens if g not in known_gens] + [p for p in levi.params if p not in known_params]
        if unknown:
            violations.append(Violation(rule="levi-closure", where=where, detail=f"unknown ids {unknown}"))
            continue
        inside = set(levi.params)
        for g in levi.gens:
            for p in levi.params:
                s = lookup.get((g, p))
                outside = [ref for ref in references(s) if ref not in inside] if s else []
                if outside:
                    violations.append(Violation(rule="levi-closure", where=f"{where}:{g}@{p}", detail=f"refers outside to {outside}"))
        # generators outside the Levi may not lower a Levi parameter
        for g in known_gens.difference(levi.gens):
            for p in levi.params:
                s = lookup.get((g, p))
                if s is not None and not s.kind.ascent_side:
                    violations.append(Violation(
                        rule="levi-closure", where=f"{where}:{g}@{p}",
                        detail=f"{s.kind.value} of an outside generator at a Levi parameter"
                    ))
    return violations


def validate_datum(d: ParamDatum) -> ValidationReport:
    """
    Check every datum invariant, then the quadratic relation.

    Report-only; never raises.
    """
    violations = _structure_violations(d)
    if not violations:
        violations += _reciprocity_violations(d)
        violations += _length_violations(d)
        violations += _levi_violations(d)
    if not violations:
        quadratic = quadratic_check(d)
        violations += quadratic.violations
    report = ValidationReport(datum=d.name, passed=not violations, violations=violations)
    if report.passed:
        logger.info(f"Datum {d.name} validated: {len(d.parameters)} parameters, {len(d.generators)} generators")
    else:
        logger.info(f"Datum {d.name} failed validation with {len(violations)} violations")
    return report


# ============ restriction ============

def restrict_datum(d: ParamDatum, gens: Iterable[str], params: Iterable[str], name: Optional[str] = None) -> ParamDatum:
    """The sub-datum on the given generators and parameters (kept in datum order)."""
    gens, params = set(gens), set(params)
    return ParamDatum(
        name=name or f"{d.name}|restricted",
        generators=[g for g in d.generators if g.id in gens],
        parameters=[p for p in d.parameters if p.id in params],
        statuses=[s for s in d.statuses if s.gen in gens and s.param in params],
    )


# ============ Hecke case ============

def hecke_case_datum(F: FoldedSystem, name: Optional[str] = None) -> ParamDatum:
    """
    The regular module: parameters are the elements of W^sigma.

    Generator g at w has kind mC+ with cross w_g w when lengths add,
    otherwise mC- with the same cross.
    """
    parameters = [Parameter(id=F.name(w), length=F.length(w)) for w in F.elements]
    statuses = []
    for g in F.generators:
        m = F.m[g]
        for w in F.elements:
            gw = F.generator_acts(g, w)
            ascent = F.length(gw) == F.length(w) + m
            kind = Kind(f"{m}C{'+' if ascent else '-'}")
            statuses.append(GeneratorStatus(gen=g, param=F.name(w), kind=kind, cross=F.name(gw)))
    if name is None:
        type_name = F.base.type_name or f"rank{F.base.rank}"
        twist = sigma_text(F.sigma)
        name = f"hecke:{type_name}" if twist == "1" else f"hecke:{type_name}:{twist}"
    return ParamDatum(
        name=name,
        generators=[GeneratorSpec(id=g, m=F.m[g]) for g in F.generators],
        parameters=parameters,
        statuses=statuses,
    )


# ============ file I/O ============

def datum_from_dict(data: dict) -> ParamDatum:
    try:
        return ParamDatum.model_validate(data)
    except ValidationError as e:
        raise DatumFormatError(f"Invalid datum: {e}")


def load_datum(path: Union[str, Path]) -> ParamDatum:
    """
    Load a datum file (JSON, or YAML by extension).

    Raises:
        DatumFormatError: unreadable file or unknown fields
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
        if path.suffix.lower() in (".yaml", ".yml"):
            data = yaml.safe_load(text)
        else:
            data = json.loads(text)
    except (OSError, ValueError, yaml.YAMLError) as e:
        raise DatumFormatError(f"Cannot read datum {path}: {e}")
    datum = datum_from_dict(data)
    logger.info(f"Datum loaded: {datum.name} from {path}")
    return datum


def datum_to_json(d: ParamDatum) -> str:
    return json.dumps(d.model_dump(mode="json", exclude_none=True), indent=2, ensure_ascii=False) + "\n"


def save_datum(d: ParamDatum, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(datum_to_json(d), encoding="utf-8")
    logger.info(f"Datum saved: {d.name} to {path}")
    return path


# ============ built-in data ============

def builtin_datum(name: str) -> ParamDatum:
    """
    A built-in datum by name.

    Args:
        name: one of BUILTIN_NAMES, or "hecke:<type>:<sigma>" such as "hecke:A3:(1 3)"

    Raises:
        UnknownName: no built-in datum has this name
    """
    if name.startswith("hecke:"):
        parts = name.split(":", 2)
        if len(parts) < 2 or not parts[1]:
            raise UnknownName(f"Malformed Hecke datum name {name!r}")
        sigma = parts[2] if len(parts) == 3 else None
        try:
            F = folded_system(parts[1], sigma)
        except KlvError as e:
            raise UnknownName(f"Cannot build {name!r}: {e}")
        return hecke_case_datum(F, name=name)
    if name not in BUILTIN_NAMES:
        raise UnknownName(f"No built-in datum named {name!r}; known: {BUILTIN_NAMES}")
    return load_datum(Path(settings.builtin_dir) / f"{name}.json")


def resolve_datum(ref: str) -> ParamDatum:
    """A datum file path, or a built-in name when no such file exists."""
    path = Path(ref)
    if path.is_file():
        return load_datum(path)
    return builtin_datum(ref)
