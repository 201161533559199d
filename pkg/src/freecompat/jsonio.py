"""Canonical JSON for series, tables and algebra elements.

Rationals are ``[num, den]`` in lowest terms, matrices nested arrays of
those, group-algebra elements lists of ``{"word", "coeff"}``.  Keys are
sorted and entries ordered by (length, lexicographic), so equal inputs
give byte-identical output.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .coeffalg import SCALARS, GroupAlgebra, GroupAlgebraElement, Matrix, MatrixAlgebra, ScalarField
from .cumulant import CumulantTable, MomentTable, _Table
from .series import FormalSeries


def encode_scalar(x):
    if isinstance(x, Fraction):
        return [x.numerator, x.denominator]
    if isinstance(x, int):
        return [x, 1]
    if isinstance(x, complex):
        return [x.real, x.imag]
    return float(x)


def decode_scalar(v):
    if isinstance(v, list):
        if len(v) != 2:
            raise ValueError(f"bad rational {v!r}")
        if all(isinstance(t, int) for t in v):
            if v[1] == 0:
                raise ValueError("zero denominator")
            return Fraction(v[0], v[1])
        return complex(v[0], v[1])
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return v
    if isinstance(v, str):
        return parse_rational(v)
    raise ValueError(f"bad scalar {v!r}")


def parse_rational(text: str) -> Fraction:
    """'3', '-2/5' or '0.25' as an exact Fraction."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational literal: {text!r}") from exc


def encode_element(x, algebra):
    if algebra.is_scalar:
        return encode_scalar(x)
    if isinstance(algebra, MatrixAlgebra):
        return [[encode_scalar(v) for v in row] for row in x.rows]
    if isinstance(algebra, GroupAlgebra):
        return [{"word": w, "coeff": encode_scalar(c)} for w, c in sorted(x.terms.items(), key=lambda t: (len(t[0]), t[0]))]
    raise ValueError(f"no serialization for {algebra!r}")


def decode_element(v, algebra):
    if algebra.is_scalar:
        return decode_scalar(v)
    if isinstance(algebra, MatrixAlgebra):
        m = Matrix([[decode_scalar(t) for t in row] for row in v])
        if m.n != algebra.n:
            raise ValueError(f"expected a {algebra.n}x{algebra.n} matrix")
        return m
    if isinstance(algebra, GroupAlgebra):
        return GroupAlgebraElement({t["word"]: decode_scalar(t["coeff"]) for t in v})
    raise ValueError(f"no serialization for {algebra!r}")


def encode_algebra(algebra) -> dict:
    if isinstance(algebra, ScalarField):
        return {"type": "scalar", "exact": algebra.exact}
    if isinstance(algebra, MatrixAlgebra):
        return {"type": "matrix", "n": algebra.n, "exact": algebra.exact}
    if isinstance(algebra, GroupAlgebra):
        return {"type": "group"}
    raise ValueError(f"no serialization for {algebra!r}")


def decode_algebra(d: dict | None):
    if d is None or d.get("type") == "scalar":
        return SCALARS if d is None or d.get("exact", True) else ScalarField(False)
    if d["type"] == "matrix":
        return MatrixAlgebra(int(d["n"]), d.get("exact", True))
    if d["type"] == "group":
        return GroupAlgebra()
    raise ValueError(f"unknown algebra type {d.get('type')!r}")


def series_to_dict(f: FormalSeries) -> dict:
    alg = f.algebra
    zero = alg.zero()
    entries = [
        {"word": list(w), "value": encode_element(c, alg)}
        for w, c in f.items()
        if not alg.is_close(c, zero)
    ]
    d = {"s": f.s, "order": f.order, "entries": entries}
    if not (isinstance(alg, ScalarField) and alg.exact):
        d["algebra"] = encode_algebra(alg)
    if isinstance(f, _Table):
        d["kind"] = f.kind
        d["flavor"] = f.flavor
        if f.central:
            d["central"] = True
        if f.b0 is not None:
            d["b0"] = encode_element(f.b0, alg)
    return d


def series_from_dict(d: dict, kind: str | None = None) -> FormalSeries:
    """Inverse of :func:`series_to_dict`; ``kind`` forces a table class."""
    try:
        s, order = int(d["s"]), int(d["order"])
        alg = decode_algebra(d.get("algebra"))
        coeffs = {tuple(int(i) for i in e["word"]): decode_element(e["value"], alg) for e in d["entries"]}
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed series document: {exc}") from exc
    kind = kind or d.get("kind")
    if kind is None:
        return FormalSeries(s, order, coeffs, alg)
    cls = {"moment": MomentTable, "cumulant": CumulantTable}.get(kind)
    if cls is None:
        raise ValueError(f"unknown table kind {kind!r}")
    b0 = decode_element(d["b0"], alg) if "b0" in d else None
    return cls(s, order, coeffs, alg, b0=b0, central=bool(d.get("central", False)))


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"
