"""Moment and cumulant tables, partition-indexed evaluation, Moebius inversion.

A table stores the values at words ``w`` with the base insertions
``(1, b0, ..., b0)``: the n-th entry of a B-valued moment table is
``E(x_{w1} b0 x_{w2} ... b0 x_{wn})``.  Nested evaluation over a
noncrossing partition needs values at other insertions (an inner block's
value gets multiplied into the next leg of its parent), and a table gets
those from, in order of preference:

* its ``evaluator`` (model-backed or derived tables carry one),
* multilinearity, when the algebra is scalar or the insertions are scalar
  multiples of the unit and b0 is the unit,
* the ``central`` flag: the variables commute with B, so
  ``value(w, (m1, ..., mn)) = m1 ... mn * entry``.

Anything else raises ``ValueError``.  Insertions are lists with one slot
per position; slot j left-multiplies the j-th letter and ``None`` is the
unit.
"""

from __future__ import annotations

import random
import threading
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping, Sequence

from .coeffalg import SCALARS, MatrixAlgebra, ProbabilitySpaceModel, random_matrix, random_rational
from .ncpart import NoncrossingPartition, enumerate_nc, mobius_to_top, nesting_structure
from .series import FormalSeries, Word, all_words, check_word

Mults = tuple


def _mul(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return a * b


class _Table(FormalSeries):
    kind = "table"

    def __init__(self, s: int, order: int, coeffs: Mapping[Word, object] | None = None, algebra=SCALARS,
                 b0=None, evaluator: Callable | None = None, central: bool = False,
                 vanishes: Callable[[Word], bool] | None = None, entry_fn: Callable[[Word], object] | None = None):
        super().__init__(s, order, coeffs, algebra)
        # entry_fn fills base entries on first use; derived tables are lazy
        self.entry_fn = entry_fn
        if b0 is not None and not algebra.is_scalar and b0 == algebra.one():
            b0 = None
        self.b0 = b0
        self.evaluator = evaluator
        self.central = central
        self.vanishes = vanishes
        self._cache: dict = {}
        self._lock = threading.Lock()

    def coef(self, w: Sequence[int]):
        if self.entry_fn is None:
            return super().coef(w)
        w = check_word(w, self.s)
        if len(w) > self.order:
            raise IndexError(f"word {w} beyond truncation order {self.order}")
        v = self._coeffs.get(w)
        if v is None:
            v = self.entry_fn(w)
            with self._lock:
                self._coeffs[w] = v
        return v

    def materialize(self) -> "_Table":
        """Compute every entry up to the order (a no-op for eager tables)."""
        if self.entry_fn is not None:
            for w in all_words(self.s, self.order):
                self.coef(w)
        return self

    def items(self):
        self.materialize()
        return super().items()

    def equals(self, other) -> bool:
        self.materialize()
        if isinstance(other, _Table):
            other.materialize()
        return super().equals(other)

    @property
    def flavor(self) -> str:
        return "scalar" if self.algebra.is_scalar else "B"

    def _norm(self, m):
        if m is None or self.algebra.is_scalar:
            return m
        return None if m == self.algebra.one() else m

    def value(self, w: Sequence[int], mults: Sequence | None = None):
        """Entry at w with insertions ``mults`` (see module docstring)."""
        w = tuple(w)
        n = len(w)
        if mults is None:
            return self.coef(w)
        if len(mults) != n:
            raise ValueError("one insertion slot per letter")
        alg = self.algebra
        if alg.is_scalar:
            c = Fraction(1)
            for m in mults:
                if m is not None:
                    c = c * m
            return c * self.coef(w)
        first = self._norm(mults[0])
        rest = tuple(self._norm(m) for m in mults[1:])
        if rest == (self.b0,) * (n - 1):
            v = self.coef(w)
        elif self.vanishes is not None and self.vanishes(w):
            return alg.zero()
        elif self.evaluator is not None:
            key = (w, rest)
            v = self._cache.get(key)
            if v is None:
                v = self.evaluator(w, (None,) + rest)
                with self._lock:
                    self._cache[key] = v
        elif self.b0 is None and all(m is None or alg.as_scalar(m) is not None for m in rest):
            c = Fraction(1)
            for m in rest:
                if m is not None:
                    c = c * alg.as_scalar(m)
            v = c * self.coef(w)
        elif self.central and self.b0 is None:
            acc = None
            for m in rest:
                acc = _mul(acc, m)
            v = _mul(acc, self.coef(w))
        else:
            raise ValueError(
                f"{self.kind} table cannot be evaluated at non-base insertions for word {w}: "
                "it has no evaluator and is not declared central"
            )
        return _mul(first, v)

    def base_mults(self, n: int) -> Mults:
        return (None,) + (self.b0,) * (n - 1)

    def _like(self, cls, coeffs=None, evaluator=None, entry_fn=None):
        return cls(self.s, self.order, coeffs, self.algebra, b0=self.b0, evaluator=evaluator,
                   central=self.central, entry_fn=entry_fn)


class MomentTable(_Table):
    kind = "moment"


class CumulantTable(_Table):
    kind = "cumulant"


# --- partition-indexed evaluation ------------------------------------------------


@lru_cache(maxsize=None)
def _plan(pi: NoncrossingPartition):
    """Per block: (positions, ((gap index, child plan), ...)) for each root."""

    def build(node):
        block = node.block
        kids = []
        for child in node.children:
            gap = next(j for j, v in enumerate(block) if v > child.block[0])
            kids.append((gap, build(child)))
        return (block, tuple(kids))

    return tuple(build(r) for r in nesting_structure(pi))


def _eval_node(table: _Table, node, w: Word, mults: Mults):
    block, kids = node
    sub_mults = [mults[v - 1] for v in block]
    if kids:
        inserted: dict[int, object] = {}
        for gap, child in kids:
            val = _eval_node(table, child, w, mults)
            inserted[gap] = _mul(inserted.get(gap), val)
        for gap, val in inserted.items():
            sub_mults[gap] = _mul(val, sub_mults[gap])
    return table.value(tuple(w[v - 1] for v in block), tuple(sub_mults))


def eval_partitioned(table: _Table, pi: NoncrossingPartition, w: Sequence[int], mults: Sequence | None = None):
    """The multiplicative extension of ``table`` at pi, evaluated on w.

    Scalar tables give the product of block values.  B-valued tables are
    evaluated over the nesting forest of pi: the values of the blocks in a
    gap of their parent multiply, left to right, into the insertion slot of
    the parent's next leg; root values multiply left to right.
    """
    w = tuple(w)
    if len(w) != pi.n:
        raise ValueError(f"word length {len(w)} does not match partition size {pi.n}")
    if max(len(b) for b in pi.blocks) > table.order:
        raise ValueError(f"a block of {pi} is longer than the table order {table.order}")
    alg = table.algebra
    if table.vanishes is not None:
        for blk in pi.blocks:
            if table.vanishes(tuple(w[v - 1] for v in blk)):
                return alg.zero()
    if alg.is_scalar:
        acc = alg.one()
        if mults is not None:
            for m in mults:
                if m is not None:
                    acc = acc * m
        for blk in pi.blocks:
            acc = acc * table.coef(tuple(w[v - 1] for v in blk))
        return acc
    mults = table.base_mults(len(w)) if mults is None else tuple(table._norm(m) for m in mults)
    acc = None
    for root in _plan(pi):
        acc = _mul(acc, _eval_node(table, root, w, mults))
    return alg.one() if acc is None else acc


# --- Moebius inversion -----------------------------------------------------------


def _mobius_sum(table: _Table, w: Word, mults: Mults | None, with_mu: bool):
    alg = table.algebra
    total = alg.zero()
    if not with_mu:
        for pi in enumerate_nc(len(w)):
            total = total + eval_partitioned(table, pi, w, mults)
        return total
    for pi, mu in mobius_to_top(len(w)):
        if mu:
            total = total + mu * eval_partitioned(table, pi, w, mults)
    return total


def _derive(src: _Table, cls, with_mu: bool) -> _Table:
    evaluator = None
    if not src.algebra.is_scalar:
        # non-base insertions go through the source table; it raises if it cannot
        def evaluator(w, mults, _src=src):
            return _mobius_sum(_src, w, mults, with_mu)
    return src._like(cls, evaluator=evaluator, entry_fn=lambda w: _mobius_sum(src, w, None, with_mu))


def cumulants_from_moments(m: MomentTable) -> CumulantTable:
    """Entry at w: sum over pi in NC(|w|) of eval_partitioned(m, pi, w) mu(pi, 1)."""
    return _derive(m, CumulantTable, True)


def moments_from_cumulants(c: CumulantTable) -> MomentTable:
    """Entry at w: sum over pi in NC(|w|) of eval_partitioned(c, pi, w)."""
    return _derive(c, MomentTable, False)


# --- tables from a model ---------------------------------------------------------


def moment_table_from_model(model: ProbabilitySpaceModel, order: int, flavor: str = "B", b0=None) -> MomentTable:
    """phi- or E-moments of the model's generators up to ``order``.

    B flavor entries are E(x_{w1} b0 x_{w2} ... b0 x_{wn}); the table keeps
    the model as its evaluator so nested evaluation is exact.
    """
    if flavor not in ("scalar", "B"):
        raise ValueError("flavor must be 'scalar' or 'B'")
    s = model.s

    def base(n):
        return (None,) + (b0,) * (n - 1)

    if flavor == "scalar":
        coeffs = {w: model.phi(model.word_element(w, base(len(w)))) for w in all_words(s, order)}
        return MomentTable(s, order, coeffs, model.scalars, b0=b0)
    coeffs = {w: model.E(model.word_element(w, base(len(w)))) for w in all_words(s, order)}

    def evaluator(w, mults):
        return model.E(model.word_element(w, mults))

    return MomentTable(s, order, coeffs, model.B, b0=b0, evaluator=evaluator)


def b_valued_cumulants(model: ProbabilitySpaceModel, order: int, b0=None) -> CumulantTable:
    """K_n with insertions b0 (the trivial cumulants when b0 is the unit)."""
    return cumulants_from_moments(moment_table_from_model(model, order, "B", b0))


def scalar_cumulants(model: ProbabilitySpaceModel, order: int) -> CumulantTable:
    return cumulants_from_moments(moment_table_from_model(model, order, "scalar"))


def _phi_E(model, w: Word):
    return model.phi_B(model.E(model.word_element(w)))


def scalar_cumulant_via_E(model: ProbabilitySpaceModel, w: Sequence[int]):
    """sum_pi prod_{V in pi} phi(E(x_V)) mu(pi, 1); equals k_n when phi = phi o E."""
    w = check_word(w, model.s)
    cache: dict = {}

    def blockval(sub):
        if sub not in cache:
            cache[sub] = _phi_E(model, sub)
        return cache[sub]

    total = model.scalars.zero()
    for pi, mu in mobius_to_top(len(w)):
        if mu == 0:
            continue
        prod = model.scalars.one()
        for blk in pi.blocks:
            prod = prod * blockval(tuple(w[v - 1] for v in blk))
        total = total + mu * prod
    return total


def scalar_moment_via_E(model: ProbabilitySpaceModel, w: Sequence[int]):
    """sum_pi prod_{V in pi} k_{|V|}(x_V), each k_{|V|} written through phi o E."""
    w = check_word(w, model.s)
    kcache: dict = {}

    def k(sub):
        if sub not in kcache:
            kcache[sub] = scalar_cumulant_via_E(model, sub)
        return kcache[sub]

    total = model.scalars.zero()
    for pi in enumerate_nc(len(w)):
        prod = model.scalars.one()
        for blk in pi.blocks:
            prod = prod * k(tuple(w[v - 1] for v in blk))
        total = total + prod
    return total


# --- property (*) ------------------------------------------------------------------


def property_star_from_tables(scalar_c: CumulantTable, b_c: CumulantTable, phi_B: Callable, tol_alg=None):
    """Words where k_n differs from phi(K_n^t), with the gap phi(K) - k."""
    alg = tol_alg or scalar_c.algebra
    failures = []
    for w in all_words(scalar_c.s, min(scalar_c.order, b_c.order)):
        gap = phi_B(b_c.coef(w)) - scalar_c.coef(w)
        if not alg.is_close(gap, alg.zero()):
            failures.append((w, gap))
    return not failures, failures


def property_star_check(model: ProbabilitySpaceModel, order: int):
    """(holds, [(word, phi(K^t(w)) - k(w)), ...]) over all words up to ``order``."""
    k = scalar_cumulants(model, order)
    K = b_valued_cumulants(model, order)
    return property_star_from_tables(k, K, model.phi_B, model.scalars)


# --- transforms of variables ----------------------------------------------------------


def transform_variables(m: MomentTable, polys: Sequence[Sequence[tuple]], order: int | None = None) -> MomentTable:
    """Moment table of new variables y_j = sum coef * x_word.

    ``polys[j]`` lists ``(coef, word)`` pairs; e.g. x1 + x2 is
    ``[(1, (1,)), (1, (2,))]`` and x1 x2 is ``[(1, (1, 2))]``.  A word of
    y-letters expands into x-words whose length must stay within m.order.
    An insertion in front of a y-letter lands in front of the first x-letter
    of its expansion.  Only defined for b0 = unit.
    """
    if m.b0 is not None:
        raise ValueError("transform_variables needs a trivial (b0 = unit) table")
    longest = max(len(wd) for p in polys for _, wd in p)
    if any(len(wd) == 0 for p in polys for _, wd in p):
        raise ValueError("constant terms are not supported")
    order = order or m.order // longest
    if order < 1 or order * longest > m.order:
        raise ValueError("source table order too small for the requested transform")

    def expand(w, mults):
        terms = {((), ()): Fraction(1)}
        for letter, mu in zip(w, mults):
            nxt: dict = {}
            for (u, us), a in terms.items():
                for c, wd in polys[letter - 1]:
                    key = (u + tuple(wd), us + (mu,) + (None,) * (len(wd) - 1))
                    nxt[key] = nxt.get(key, 0) + a * c
            terms = nxt
        total = m.algebra.zero()
        for (u, us), a in terms.items():
            if a:
                total = total + a * m.value(u, us)
        return total

    evaluator = None if m.algebra.is_scalar else expand
    return MomentTable(len(polys), order, None, m.algebra, evaluator=evaluator,
                       entry_fn=lambda w: expand(w, (None,) * len(w)))


# --- random tables -----------------------------------------------------------------


def random_scalar_table(cls, s: int, order: int, rng: random.Random) -> _Table:
    coeffs = {w: random_rational(rng) for w in all_words(s, order)}
    return cls(s, order, coeffs)


def random_b_table(cls, s: int, order: int, rng: random.Random, n: int = 2) -> _Table:
    """A B-valued table over n x n rational matrices, defined at every insertion.

    Each word w of length k gets random matrices A_1..A_k and
    ``value(w, (m1, ..., mk)) = m1 A_1 m2 A_2 ... mk A_k``, which is
    multilinear and left B-linear as a table must be.
    """
    alg = MatrixAlgebra(n)
    factors = {w: [random_matrix(n, rng, -2, 2) for _ in w] for w in all_words(s, order)}

    def evaluator(w, mults):
        acc = None
        for m, a in zip(mults, factors[w]):
            acc = _mul(_mul(acc, m), a)
        return acc

    coeffs = {w: evaluator(w, (None,) * len(w)) for w in factors}
    return cls(s, order, coeffs, alg, evaluator=evaluator)
