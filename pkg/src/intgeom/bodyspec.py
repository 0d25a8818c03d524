"""Plain-text body specifications.

A spec is an INI file read with :mod:`configparser`.  The root body lives in
the ``[body]`` section; composite kinds name other sections as operands::

    # product of an ellipsoid and an l_p ball, both in R^4
    [body]
    kind = radial_product
    factors = e, q
    powers = 1, 1

    [e]
    kind = ellipsoid
    axes = 1, 2, 0.5, 1

    [q]
    kind = lp_ball
    n = 4
    p = inf

Keys by kind (lists are comma separated, matrix rows separated by ``;``):

============== ===============================================================
ball           ``n``, optional ``radius``
ellipsoid      ``axes`` with optional ``rotation`` (matrix), or ``matrix``
lp_ball        ``n``, ``p`` (a number or ``inf``)
k_radial_sum   ``parts`` (section names), ``k``
radial_product ``factors`` (section names), ``powers``
linear_image   ``base`` (section name), ``matrix``
section        ``base``, and ``basis`` (rows spanning H) or ``coordinates``
============== ===============================================================
"""

from __future__ import annotations

import configparser
import re
from pathlib import Path

import numpy as np

from .geometry import Subspace
from .starbody import Ball, Ellipsoid, KRadialSum, LpBall, RadialProduct, StarBody, central_section, linear_image

ROOT = "body"

_KEYS = {
    "ball": ({"n"}, {"radius"}),
    "ellipsoid": (set(), {"axes", "rotation", "matrix"}),
    "lp_ball": ({"n", "p"}, set()),
    "k_radial_sum": ({"parts", "k"}, set()),
    "radial_product": ({"factors", "powers"}, set()),
    "linear_image": ({"base", "matrix"}, set()),
    "section": ({"base"}, {"basis", "coordinates"}),
}
KINDS = tuple(_KEYS)


class BodySpecError(ValueError):
    """Spec problem with its location (1-based line, section, field)."""

    def __init__(self, message: str, line: int | None = None, section: str | None = None, field: str | None = None):
        self.message, self.line, self.section, self.field = message, line, section, field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if section is not None:
            where.append(f"[{section}]" + (f" {field}" if field else ""))
        prefix = " ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)

    def as_dict(self) -> dict:
        return {"error": self.message, "line": self.line, "section": self.section, "field": self.field}


def _locate(text: str, section: str, field: str | None = None) -> int | None:
    """Line number of a section header, or of a key inside that section."""
    current = None
    for i, raw in enumerate(text.splitlines(), start=1):
        m = re.match(r"\s*\[([^\]]+)\]", raw)
        if m:
            current = m.group(1).strip()
            if current == section and field is None:
                return i
            continue
        if current == section and field is not None and re.match(rf"\s*{re.escape(field)}\s*[=:]", raw, re.I):
            return i
    return None


class _Reader:
    def __init__(self, text: str):
        self.text = text
        self.cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
        try:
            self.cp.read_string(text)
        except configparser.DuplicateSectionError as e:
            raise BodySpecError(f"duplicate section {e.section!r}", e.lineno, e.section) from None
        except configparser.DuplicateOptionError as e:
            raise BodySpecError(f"duplicate field {e.option!r}", e.lineno, e.section, e.option) from None
        except configparser.MissingSectionHeaderError as e:
            raise BodySpecError("content before the first [section] header", e.lineno) from None
        except configparser.ParsingError as e:
            lineno = e.errors[0][0] if e.errors else None
            raise BodySpecError("malformed line (expected 'key = value')", lineno) from None

    def error(self, message, section, field=None):
        # a field that is absent from the text is reported at its section header
        line = _locate(self.text, section, field) if field else None
        return BodySpecError(message, line or _locate(self.text, section), section, field)

    def get(self, section, field):
        return self.cp.get(section, field).strip()

    def dimension(self, section, field="n"):
        n = self.number(section, field, int)
        if n < 2:
            raise self.error(f"dimension must be >= 2, got {n}", section, field)
        return n

    def number(self, section, field, kind=float):
        raw = self.get(section, field)
        try:
            v = kind(raw)
        except ValueError:
            raise self.error(f"expected {'an integer' if kind is int else 'a number'}, got {raw!r}", section, field) from None
        if kind is float and np.isnan(v):
            raise self.error("NaN is not allowed", section, field)
        return v

    def vector(self, section, field):
        raw = self.get(section, field)
        try:
            v = np.array([float(x) for x in raw.split(",") if x.strip()])
        except ValueError:
            raise self.error(f"expected comma-separated numbers, got {raw!r}", section, field) from None
        if v.size == 0 or not np.all(np.isfinite(v)):
            raise self.error("expected a non-empty list of finite numbers", section, field)
        return v

    def matrix(self, section, field):
        raw = self.get(section, field)
        rows = [r for r in raw.split(";") if r.strip()]
        try:
            M = [[float(x) for x in r.split(",") if x.strip()] for r in rows]
        except ValueError:
            raise self.error(f"expected rows of comma-separated numbers, got {raw!r}", section, field) from None
        if not M or len({len(r) for r in M}) != 1:
            raise self.error("matrix rows must be non-empty and of equal length", section, field)
        M = np.array(M)
        if not np.all(np.isfinite(M)):
            raise self.error("matrix entries must be finite", section, field)
        return M

    def names(self, section, field):
        names = [x.strip() for x in self.get(section, field).split(",") if x.strip()]
        if not names:
            raise self.error("expected at least one section name", section, field)
        return names


def _build(r: _Reader, name: str, stack: tuple, ref: str | None = None) -> StarBody:
    # ref is the field of the parent section that names this one
    if name in stack:
        raise r.error(f"circular reference {' -> '.join(stack + (name,))}", stack[-1], ref)
    if not r.cp.has_section(name):
        raise r.error(f"no section [{name}]", stack[-1], ref) if stack else BodySpecError(f"no section [{name}]")
    stack = stack + (name,)
    if not r.cp.has_option(name, "kind"):
        raise r.error("missing field 'kind'", name)
    kind = r.get(name, "kind")
    if kind not in _KEYS:
        raise r.error(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}", name, "kind")
    required, optional = _KEYS[kind]
    present = set(r.cp.options(name)) - {"kind"}
    for key in sorted(present - required - optional):
        raise r.error(f"unexpected field for kind {kind!r}", name, key)
    for key in sorted(required - present):
        raise r.error(f"missing field {key!r} for kind {kind!r}", name, key)

    def sub(field):
        return [_build(r, child, stack, field) for child in r.names(name, field)]

    try:
        if kind == "ball":
            n = r.dimension(name)
            radius = r.number(name, "radius") if "radius" in present else 1.0
            return Ball(n, radius)
        if kind == "ellipsoid":
            if ("matrix" in present) == ("axes" in present):
                raise r.error("give exactly one of 'axes' or 'matrix'", name)
            if "matrix" in present:
                if "rotation" in present:
                    raise r.error("'rotation' only applies with 'axes'", name, "rotation")
                return Ellipsoid(r.matrix(name, "matrix"))
            rot = r.matrix(name, "rotation") if "rotation" in present else None
            return Ellipsoid.from_axes(r.vector(name, "axes"), rot)
        if kind == "lp_ball":
            return LpBall(r.dimension(name), r.number(name, "p"))
        if kind == "k_radial_sum":
            return KRadialSum(tuple(sub("parts")), r.number(name, "k"))
        if kind == "radial_product":
            factors, powers = sub("factors"), r.vector(name, "powers")
            if len(powers) != len(factors):
                raise r.error(f"{len(factors)} factors but {len(powers)} powers", name, "powers")
            return RadialProduct(tuple(factors), tuple(float(p) for p in powers))
        if kind == "linear_image":
            (base,) = _single(r, name, "base", sub("base"))
            return linear_image(base, r.matrix(name, "matrix"))
        if kind == "section":
            (base,) = _single(r, name, "base", sub("base"))
            if ("basis" in present) == ("coordinates" in present):
                raise r.error("give exactly one of 'basis' or 'coordinates'", name)
            if "basis" in present:
                H = Subspace.span(r.matrix(name, "basis"))
            else:
                idx = r.vector(name, "coordinates")
                if np.any(idx != np.round(idx)) or np.any(idx < 0) or np.any(idx >= base.n):
                    raise r.error(f"coordinates must be integers in [0, {base.n})", name, "coordinates")
                H = Subspace.coordinate(base.n, [int(i) for i in idx])
            return central_section(base, H)
    except BodySpecError:
        raise
    except (ValueError, TypeError, np.linalg.LinAlgError) as e:
        raise r.error(str(e), name) from None
    raise AssertionError(kind)


def _single(r, name, field, items):
    if len(items) != 1:
        raise r.error("expected exactly one section name", name, field)
    return items


def parse_body_spec(text: str) -> StarBody:
    """Build the star body described by ``text``; raises :class:`BodySpecError`."""
    r = _Reader(text)
    if not r.cp.has_section(ROOT):
        raise BodySpecError(f"missing root section [{ROOT}]")
    return _build(r, ROOT, ())


def load_body_spec(path) -> StarBody:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise BodySpecError(f"cannot read {path}: {e.strerror}") from None
    return parse_body_spec(text)
