"""Truncated formal series in s noncommuting indeterminates.

A series is a sparse map from words ``(i_1, ..., i_n)`` (letters in ``1..s``,
``1 <= n <= order``) to coefficients in one algebra.  There is no constant
term.  Moment series and R-transforms are both stored this way; the cumulant
tables in :mod:`freecompat.cumulant` subclass :class:`FormalSeries`.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Iterator, Mapping, Sequence

from .coeffalg import SCALARS

Word = tuple[int, ...]


def words(s: int, n: int) -> Iterator[Word]:
    """Words of length n over 1..s, lexicographic."""
    return product(range(1, s + 1), repeat=n)


def all_words(s: int, order: int) -> list[Word]:
    """Every word of length 1..order, ordered by (length, lexicographic)."""
    return [w for n in range(1, order + 1) for w in words(s, n)]


def check_word(w: Sequence[int], s: int) -> Word:
    w = tuple(w)
    if not w:
        raise ValueError("words are nonempty")
    if any(not (1 <= i <= s) for i in w):
        raise ValueError(f"word {w} has letters outside 1..{s}")
    return w


class FormalSeries:
    """Immutable truncated series; absent words have zero coefficient."""

    def __init__(self, s: int, order: int, coeffs: Mapping[Word, object] | None = None, algebra=SCALARS):
        if s < 1 or order < 1:
            raise ValueError("s and order must be positive")
        self.s = s
        self.order = order
        self.algebra = algebra
        self._coeffs: dict[Word, object] = {}
        for w, c in (coeffs or {}).items():
            w = check_word(w, s)
            if len(w) > order:
                raise ValueError(f"word {w} longer than order {order}")
            self._coeffs[w] = c

    @property
    def is_scalar(self) -> bool:
        return self.algebra.is_scalar

    def coef(self, w: Sequence[int]):
        w = check_word(w, self.s)
        if len(w) > self.order:
            raise IndexError(f"word {w} beyond truncation order {self.order}")
        c = self._coeffs.get(w)
        return self.algebra.zero() if c is None else c

    def __getitem__(self, w):
        return self.coef(w)

    def items(self):
        return ((w, self._coeffs[w]) for w in sorted(self._coeffs, key=lambda w: (len(w), w)))

    def support(self) -> list[Word]:
        return [w for w, c in self.items() if not self.algebra.is_close(c, self.algebra.zero())]

    def truncate(self, order: int) -> "FormalSeries":
        return FormalSeries(self.s, min(order, self.order),
                            {w: c for w, c in self._coeffs.items() if len(w) <= order}, self.algebra)

    def equals(self, other: "FormalSeries") -> bool:
        """Coefficient-wise equality up to the common order (tolerant in float mode)."""
        if self.s != other.s:
            return False
        order = min(self.order, other.order)
        keys = {w for w in list(self._coeffs) + list(other._coeffs) if len(w) <= order}
        return all(self.algebra.is_close(self.coef(w), other.coef(w)) for w in keys)

    def __repr__(self):
        body = ", ".join(f"{w}: {c}" for w, c in self.items())
        return f"{type(self).__name__}(s={self.s}, order={self.order}, {{{body}}})"


def add(f: FormalSeries, g: FormalSeries) -> FormalSeries:
    if f.s != g.s:
        raise ValueError(f"cannot add series in {f.s} and {g.s} variables")
    order = min(f.order, g.order)
    out = {}
    for w in set(f._coeffs) | set(g._coeffs):
        if len(w) <= order:
            out[w] = f.coef(w) + g.coef(w)
    return FormalSeries(f.s, order, out, f.algebra)


def scale(c, f: FormalSeries) -> FormalSeries:
    return FormalSeries(f.s, f.order, {w: c * v for w, v in f._coeffs.items()}, f.algebra)


def zero_series(s: int, order: int, algebra=SCALARS) -> FormalSeries:
    return FormalSeries(s, order, {}, algebra)


def variable(i: int, s: int, order: int) -> FormalSeries:
    """The series z_i."""
    return FormalSeries(s, order, {(i,): Fraction(1)})


def one_variable(coeffs: Sequence, order: int | None = None, algebra=SCALARS) -> FormalSeries:
    """sum_n coeffs[n-1] z^n."""
    order = order or len(coeffs)
    return FormalSeries(1, order, {(1,) * n: c for n, c in enumerate(coeffs[:order], start=1)}, algebra)


# Polynomials with an explicit constant slot: dict word -> coefficient, () allowed.


def _poly_mul(p: dict, q: dict, order: int) -> dict:
    out: dict = {}
    for u, a in p.items():
        for v, b in q.items():
            if len(u) + len(v) > order:
                continue
            w = u + v
            out[w] = out.get(w, 0) + a * b
    return out


def mul(f: FormalSeries, g: FormalSeries) -> FormalSeries:
    """Noncommutative product f*g (words concatenate), truncated at min order."""
    if f.s != g.s:
        raise ValueError("variable count mismatch")
    order = min(f.order, g.order)
    return FormalSeries(f.s, order, _poly_mul(f._coeffs, g._coeffs, order), f.algebra)


def substitute(f: FormalSeries, args: Sequence[FormalSeries], offsets: Sequence | None = None) -> FormalSeries:
    """Formal composition f(c_1 + g_1, ..., c_s + g_s), truncated at f.order.

    The ``g_i`` carry scalar coefficients and share a variable count p.  The
    offsets ``c_i`` default to 0.  With nonzero offsets the truncated f is
    expanded as the polynomial it is; a nonzero constant term in the result
    is a domain error, because series here have no constant slot.
    """
    if len(args) != f.s:
        raise ValueError(f"need {f.s} arguments, got {len(args)}")
    p = args[0].s
    if any(a.s != p for a in args):
        raise ValueError("arguments must share one variable count")
    if any(not a.is_scalar for a in args):
        raise ValueError("substituted series must have scalar coefficients")
    offsets = list(offsets) if offsets is not None else [0] * f.s
    if len(offsets) != f.s:
        raise ValueError("one offset per variable")
    order = f.order
    polys = []
    for a, c in zip(args, offsets):
        d = dict(a._coeffs)
        if c:
            d[()] = d.get((), 0) + c
        polys.append(d)
    # Powers of each argument, memoised by word prefix.
    cache: dict[Word, dict] = {(): {(): 1}}

    def power(word: Word) -> dict:
        if word not in cache:
            cache[word] = _poly_mul(power(word[:-1]), polys[word[-1] - 1], order)
        return cache[word]

    out: dict = {}
    for w, coeff in f._coeffs.items():
        for v, a in power(w).items():
            if len(v) > order:
                continue
            out[v] = out[v] + a * coeff if v in out else a * coeff
    const = out.pop((), None)
    if const is not None and not f.algebra.is_close(const, f.algebra.zero()):
        raise ValueError("composition produces a constant term; series have no constant slot")
    return FormalSeries(p, order, out, f.algebra)


def solve_moment_from_r(r: FormalSeries, order: int) -> FormalSeries:
    """Moment series m with m(z) = r(z (1 + m(z))), one variable, scalar.

    Fixed-point iteration: the degree-k coefficient of the right-hand side
    only involves degrees < k of m, so ``order`` sweeps suffice.
    """
    if r.s != 1:
        raise ValueError("only the one-variable equation is solved")
    if not r.is_scalar:
        raise ValueError("r must have scalar coefficients")
    r = FormalSeries(1, order, {w: c for w, c in r._coeffs.items() if len(w) <= order}, r.algebra)
    z = variable(1, 1, order)
    m = zero_series(1, order)
    for _ in range(order):
        arg = add(z, mul(z, m))
        m = substitute(r, [arg])
    return m
