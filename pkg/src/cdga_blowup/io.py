"""Presentation files (``.cdga``, YAML) and versioned JSON persistence of algebras."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import yaml

from .algebra import DegreewiseAlgebra, cdga_from_presentation, validate
from .blowup import BlowupAlgebra
from .errors import InputError, PresentationError, ValidationError
from .linalg import Q, fmt

MODEL_FORMAT = "cdga-blowup/model"
MODEL_VERSION = 1


@dataclass
class PresentationFile:
    """A CDGA written as generators, differential, power relations and a top degree.

    ``distinguished`` may carry ``orientation``, ``symplectic_form`` and
    ``chern`` (total Chern class of the tangent bundle) as expressions.
    """
    generators: list
    differential: dict = field(default_factory=dict)
    relations: list = field(default_factory=list)
    truncate_above: int | None = None
    distinguished: dict = field(default_factory=dict)
    name: str = ""

    def top_degree(self) -> int:
        if self.truncate_above is not None:
            return self.truncate_above
        caps = {g: (1 if d % 2 else None) for g, d in self.generators}
        for rel in self.relations:
            text = rel.replace(" ", "")
            g, _, p = text.partition("^")
            if g in caps:
                p = int(p) if p else 1
                caps[g] = p - 1 if caps[g] is None else min(caps[g], p - 1)
        if any(c is None for c in caps.values()):
            raise PresentationError("%s: truncate_above is required for an infinite-dimensional algebra"
                                    % (self.name or "presentation"))
        return sum(c * d for (g, d), c in zip(self.generators, caps.values()))

    def build(self, check: bool = True) -> DegreewiseAlgebra:
        return cdga_from_presentation(self.generators, self.differential, self.relations,
                                      self.top_degree(), name=self.name, check=check)

    def to_dict(self) -> dict:
        out = {"name": self.name,
               "generators": [{"name": g, "degree": d} for g, d in self.generators],
               "differential": dict(self.differential),
               "relations": list(self.relations)}
        if self.truncate_above is not None:
            out["truncate_above"] = self.truncate_above
        if self.distinguished:
            out["distinguished"] = dict(self.distinguished)
        return out

    def dumps(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False, allow_unicode=True)


def _line_map(text: str) -> dict:
    """1-based line numbers of top-level keys, list entries ``(key, i)`` and mapping entries ``(key, name)``."""
    try:
        node = yaml.compose(text)
    except yaml.YAMLError:
        return {}
    out = {}
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            out[k.value] = k.start_mark.line + 1
            if isinstance(v, yaml.SequenceNode):
                for i, item in enumerate(v.value):
                    out[(k.value, i)] = item.start_mark.line + 1
            elif isinstance(v, yaml.MappingNode):
                for k2, _ in v.value:
                    out[(k.value, k2.value)] = k2.start_mark.line + 1
    return out


def parse_presentation(text: str, source: str = "<string>") -> PresentationFile:
    """Parse a ``.cdga`` document; errors name the file, line and field."""
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = "%s:%d" % (source, mark.line + 1) if mark else source
        raise PresentationError("%s: not a valid presentation file (%s)" % (where, getattr(exc, "problem", exc)))
    if not isinstance(data, dict):
        raise PresentationError("%s: expected a mapping at top level" % source)
    lines = _line_map(text)

    def where(key, sub=None):
        line = lines.get((key, sub), lines.get(key, "?"))
        return "%s:%s: field %r" % (source, line, key)

    known = {"name", "generators", "differential", "relations", "truncate_above", "distinguished"}
    for key in data:
        if key not in known:
            raise PresentationError("%s is not recognised" % where(key))
    gens = []
    for i, g in enumerate(data.get("generators") or []):
        if not isinstance(g, dict) or set(g) != {"name", "degree"}:
            raise PresentationError("%s: entry %d needs exactly 'name' and 'degree'" % (where("generators", i), i))
        deg = g["degree"]
        if isinstance(deg, bool) or not isinstance(deg, int):
            raise PresentationError("%s: degree of %s must be an integer, got %r"
                                    % (where("generators", i), g["name"], deg))
        if deg < 1:
            raise PresentationError("%s: degree of %s must be >= 1, got %d" % (where("generators", i), g["name"], deg))
        gens.append((str(g["name"]), deg))
    diff = data.get("differential") or {}
    if not isinstance(diff, dict):
        raise PresentationError("%s: expected a mapping generator -> expression" % where("differential"))
    diff = {str(k): ("0" if v is None else str(v)) for k, v in diff.items()}
    rels = data.get("relations") or []
    if not isinstance(rels, list):
        raise PresentationError("%s: expected a list" % where("relations"))
    top = data.get("truncate_above")
    if top is not None and (isinstance(top, bool) or not isinstance(top, int) or top < 0):
        raise PresentationError("%s: expected a non-negative integer" % where("truncate_above"))
    dist = data.get("distinguished") or {}
    if not isinstance(dist, dict) or set(dist) - {"orientation", "symplectic_form", "chern"}:
        raise PresentationError("%s: allowed keys are orientation, symplectic_form, chern" % where("distinguished"))
    pf = PresentationFile(gens, diff, [str(r) for r in rels], top, {k: str(v) for k, v in dist.items()},
                          str(data.get("name") or Path(source).stem))
    try:
        pf.build(check=False)
    except InputError as exc:
        msg = str(exc)
        loc = next((where("differential", g) for g in diff if "d(%s)" % g in msg), None)
        if loc is None:
            loc = next((where("relations", i) for i, r in enumerate(rels) if repr(str(r)) in msg), source)
        raise type(exc)("%s: %s" % (loc, msg)) from None
    return pf


def load_presentation(path) -> PresentationFile:
    """Read a presentation from a path, or from the built-in corpus by bare name."""
    p = Path(path)
    if not p.exists():
        data = resources.files("cdga_blowup") / "data" / (p.name if p.suffix else p.name + ".cdga")
        if not data.is_file():
            raise InputError("no such presentation file: %s" % path)
        return parse_presentation(data.read_text(), p.name)
    return parse_presentation(p.read_text(), str(p))


def corpus_names() -> list[str]:
    root = resources.files("cdga_blowup") / "data"
    return sorted(f.name for f in root.iterdir() if f.name.endswith(".cdga"))


# -- model persistence ------------------------------------------------------------------------

def _vec(v: dict) -> dict:
    return {str(k): fmt(c) for k, c in sorted(v.items())}


def algebra_to_dict(A: DegreewiseAlgebra, meta: dict | None = None) -> dict:
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "name": A.name,
        "truncated": bool(A.truncated),
        "generators": [[g, d] for g, d in A.generators],
        "basis": {str(d): list(A.basis[d]) for d in A.degrees()},
        "differential": {str(d): [_vec(A.diff_image(d, i)) for i in range(A.dim(d))] for d in A.degrees()},
        "products": [[d, i, e, j, _vec(v)] for (d, i, e, j), v in sorted(A.mult_items())],
        "phantom": sorted(getattr(A, "_phantom", ())),
        "meta": meta or {},
    }


def algebra_from_dict(data: dict, check: bool = True) -> DegreewiseAlgebra:
    if data.get("format") != MODEL_FORMAT:
        raise InputError("not a saved model (format %r)" % data.get("format"))
    if data.get("version") != MODEL_VERSION:
        raise InputError("unsupported model version %r" % data.get("version"))
    try:
        basis = {int(d): list(names) for d, names in data["basis"].items()}
        diff = {int(d): [{int(k): Q(c) for k, c in v.items()} for v in rows]
                for d, rows in data["differential"].items()}
        mult = {(d, i, e, j): {int(k): Q(c) for k, c in v.items()} for d, i, e, j, v in data["products"]}
    except (KeyError, ValueError, TypeError) as exc:
        raise InputError("malformed model file: %s" % exc) from None
    phantom = set(data.get("phantom") or ())
    cls = BlowupAlgebra if phantom else DegreewiseAlgebra
    A = cls(basis, mult, diff, generators=[tuple(g) for g in data.get("generators", [])],
            truncated=data.get("truncated", True), name=data.get("name", ""), check=False)
    if phantom:
        A._phantom = phantom
    if check:
        rep = validate(A)
        if not rep.ok:
            raise ValidationError(rep)
    return A


def save_model(A: DegreewiseAlgebra, path, meta: dict | None = None) -> None:
    Path(path).write_text(json.dumps(algebra_to_dict(A, meta), indent=1) + "\n")


def load_model(path, check: bool = True) -> tuple[DegreewiseAlgebra, dict]:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError("cannot read model %s: %s" % (path, exc)) from None
    return algebra_from_dict(data, check), data.get("meta", {})
