"""Semicircular and even elements, scalar and B-valued."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .coeffalg import ProbabilitySpaceModel
from .cumulant import (
    CumulantTable,
    MomentTable,
    _Table,
    b_valued_cumulants,
    eval_partitioned,
    moments_from_cumulants,
    scalar_cumulants,
)
from .freeness import cumulants_free_from_B
from .ncpart import enumerate_nc_even, enumerate_nc_pair, mobius, mobius_to_top, one
from .series import all_words


class UnsupportedCase(ValueError):
    pass


def semicircular_cumulants(t, order: int) -> CumulantTable:
    """One variable, k_2 = t and every other cumulant 0."""
    if order < 2:
        raise ValueError("order must be at least 2")
    return CumulantTable(1, order, {(1, 1): t})


def semicircular_family(ts: Sequence, order: int) -> CumulantTable:
    """Free semicirculars with variances ts: k_2 = t_j at (j, j), all else 0."""
    if order < 2:
        raise ValueError("order must be at least 2")
    return CumulantTable(len(ts), order, {(j, j): t for j, t in enumerate(ts, start=1)})


def b_semicircular_table(t, order: int, algebra, central: bool = True) -> CumulantTable:
    """Trivial B-valued cumulants with K_2 = t 1_B only."""
    if not central:
        raise UnsupportedCase("only the B-central case is tabulated")
    return CumulantTable(1, order, {(1, 1): t * algebra.one()}, algebra, central=True)


def b_semicircular_moments(t, order: int, algebra, central: bool = True) -> list:
    """[E(x), E(x^2), ..., E(x^order)] for a B-central B-semicircular x."""
    m = moments_from_cumulants(b_semicircular_table(t, order, algebra, central))
    return [m.coef((1,) * n) for n in range(1, order + 1)]


def scalar_cumulants_of_b_semicircular(t, order: int) -> list:
    """k_1..k_order of a B-central B-semicircular element with scalar variance t.

    Written as the double sum: outer Moebius sum over even noncrossing
    partitions, and for each block of size 2k the inner sum over NC_2(2k)
    of t^(number of pairs).  Odd orders are 0.
    """
    out = []
    for n in range(1, order + 1):
        if n % 2:
            out.append(Fraction(0) * t)
            continue
        inner: dict[int, object] = {}
        for size in range(2, n + 1, 2):
            inner[size] = sum((t ** (len(theta)) for theta in enumerate_nc_pair(size)), Fraction(0) * t)
        top = one(n)
        total = Fraction(0) * t
        for pi in enumerate_nc_even(n):
            prod = Fraction(1)
            for blk in pi.blocks:
                prod = prod * inner[len(blk)]
            total = total + mobius(pi, top) * prod
        out.append(total)
    return out


def make_b_semicircular_from_scalar(c: _Table, algebra, phi_B: Callable | None = None) -> CumulantTable:
    """K^t = k 1_B for a semicircular element free from B."""
    if c.s != 1 or not c.algebra.is_scalar:
        raise ValueError("expects a one-variable scalar table")
    if any(len(w) != 2 and v != 0 for w, v in c.items()):
        raise ValueError("input table is not semicircular")
    return cumulants_free_from_B(c, algebra, phi_B)


# --- evenness ----------------------------------------------------------------------


def _odd_entries_vanish(c: _Table) -> bool:
    zero = c.algebra.zero()
    return all(c.algebra.is_close(c.coef(w), zero) for w in all_words(c.s, c.order) if len(w) % 2)


def is_even(c: _Table) -> bool:
    """Every odd-length entry of a scalar table is 0."""
    if not c.algebra.is_scalar:
        raise ValueError("is_even expects a scalar table; use is_b_even")
    return _odd_entries_vanish(c)


def is_b_even(c: _Table) -> bool:
    """Every odd-length entry of a B-valued table is 0_B."""
    if c.algebra.is_scalar:
        raise ValueError("is_b_even expects a B-valued table; use is_even")
    return _odd_entries_vanish(c)


def even_moment_cumulant_sum(m: MomentTable, n: int):
    """Cumulant of length n from an even moment table, summing only over
    partitions with even blocks.  Raises ValueError if the unrestricted sum
    over NC(n) disagrees (which means the table is not even)."""
    if n % 2:
        raise ValueError("length must be even")
    w = (1,) * n
    top = one(n)
    alg = m.algebra
    restricted = alg.zero()
    for pi in enumerate_nc_even(n):
        restricted = restricted + mobius(pi, top) * eval_partitioned(m, pi, w)
    full = alg.zero()
    for pi, mu in mobius_to_top(n):
        full = full + mu * eval_partitioned(m, pi, w)
    if not alg.is_close(restricted, full):
        raise ValueError("restricted and unrestricted sums differ: the table is not even")
    return restricted


def _rank(vectors: list[dict]) -> int:
    keys = sorted({k for v in vectors for k in v}, key=repr)
    rows = [[Fraction(v.get(k, 0)) for k in keys] for v in vectors]
    rank, col = 0, 0
    while rows and col < len(keys):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                f = rows[r][col] / rows[rank][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
        col += 1
    return rank


def phi_injective_on_span(model: ProbabilitySpaceModel, elements: Sequence) -> bool:
    """Whether phi (through the embedding) has trivial kernel on span(elements) in B.

    A scalar functional is injective on a subspace only when the subspace
    is 0, or one-dimensional and not killed by phi.
    """
    vecs = [model.B.coords(e) for e in elements]
    r = _rank(vecs)
    if r == 0:
        return True
    if r > 1:
        return False
    return any(model.phi_B(e) != 0 for e in elements)


@dataclass
class EvennessReport:
    b_even: bool
    scalar_even: bool
    forward_holds: bool
    nondegenerate: bool
    converse_holds: bool | None
    b_odd_cumulants: list
    scalar_odd_cumulants: list


def evenness_transfer_check(model: ProbabilitySpaceModel, a, order: int) -> EvennessReport:
    """Odd cumulants of ``a`` on both sides.

    The forward direction (B-even implies even) is the one that always has
    to hold for a compatible model; the converse is reported only where phi
    is injective on the span of the odd B-valued cumulants.
    """
    m1 = model.with_generators([a], ["a"])
    K = b_valued_cumulants(m1, order)
    k = scalar_cumulants(m1, order)
    odd = [n for n in range(1, order + 1) if n % 2]
    K_odd = [K.coef((1,) * n) for n in odd]
    k_odd = [k.coef((1,) * n) for n in odd]
    b_even = all(model.B.is_close(v, model.B.zero()) for v in K_odd)
    s_even = all(model.scalars.is_close(v, model.scalars.zero()) for v in k_odd)
    nondeg = phi_injective_on_span(model, K_odd)
    return EvennessReport(
        b_even=b_even,
        scalar_even=s_even,
        forward_holds=(not b_even) or s_even,
        nondegenerate=nondeg,
        converse_holds=((not s_even) or b_even) if nondeg else None,
        b_odd_cumulants=K_odd,
        scalar_odd_cumulants=k_odd,
    )
