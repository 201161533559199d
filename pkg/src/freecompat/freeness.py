"""Freeness through cumulants: joint tables of free families, R-transform
arithmetic, boxed convolution and the cumulants of variables free from B."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .coeffalg import SCALARS, MatrixAlgebra
from .cumulant import CumulantTable, MomentTable, _mul, _Table, eval_partitioned, moments_from_cumulants
from .ncpart import alternating_union, enumerate_nc, kreweras
from .series import FormalSeries, add, all_words


@dataclass(frozen=True)
class FamilyPartition:
    """labels[i-1] is the family of generator i."""

    labels: tuple

    def __post_init__(self):
        if not self.labels:
            raise ValueError("need at least one generator")

    @classmethod
    def of(cls, labels: Sequence) -> "FamilyPartition":
        return cls(tuple(labels))

    @classmethod
    def blocks(cls, sizes: Sequence[int]) -> "FamilyPartition":
        """Consecutive ranges: sizes (2, 1) labels generators 1,2 -> 0 and 3 -> 1."""
        return cls(tuple(j for j, k in enumerate(sizes) for _ in range(k)))

    def is_mixed(self, w: Sequence[int]) -> bool:
        return len({self.labels[i - 1] for i in w}) > 1


def mixed_cumulants_vanish(c: _Table, fam: FamilyPartition):
    """(True, []) if every word touching two or more families has zero cumulant,
    else (False, witnesses)."""
    if len(fam.labels) != c.s:
        raise ValueError(f"family labels cover {len(fam.labels)} generators, table has {c.s}")
    zero = c.algebra.zero()
    bad = [w for w in all_words(c.s, c.order) if fam.is_mixed(w) and not c.algebra.is_close(c.coef(w), zero)]
    return not bad, bad


# --- free products ------------------------------------------------------------


def joint_cumulant_table(tables: Sequence[_Table], index_maps: Sequence[Sequence[int]] | None = None,
                         order: int | None = None) -> CumulantTable:
    """Direct sum of family cumulant tables; mixed entries are zero.

    ``index_maps[j][i-1]`` is the global index of letter i of family j;
    by default families occupy consecutive ranges.
    """
    if not tables:
        raise ValueError("need at least one family")
    alg = tables[0].algebra
    if any(t.algebra != alg for t in tables):
        raise ValueError("families must share one coefficient algebra")
    if any(t.b0 != tables[0].b0 for t in tables):
        raise ValueError("families must share one insertion b0")
    if index_maps is None:
        index_maps, start = [], 1
        for t in tables:
            index_maps.append(list(range(start, start + t.s)))
            start += t.s
    if len(index_maps) != len(tables):
        raise ValueError("one index map per family")
    owner: dict[int, tuple[int, int]] = {}
    for j, (t, imap) in enumerate(zip(tables, index_maps)):
        if len(imap) != t.s:
            raise ValueError(f"index map {j} has {len(imap)} entries for {t.s} generators")
        for local, g in enumerate(imap, start=1):
            if g in owner:
                raise ValueError(f"generator index {g} claimed by two families")
            owner[g] = (j, local)
    s = max(owner)
    if sorted(owner) != list(range(1, s + 1)):
        raise ValueError("family index ranges must cover 1..s without gaps")
    order = order or min(t.order for t in tables)
    if order > min(t.order for t in tables):
        raise ValueError("joint order exceeds a family's order")

    def split(w):
        fams = {owner[i][0] for i in w}
        if len(fams) != 1:
            return None, None
        j = fams.pop()
        return tables[j], tuple(owner[i][1] for i in w)

    def vanishes(w):
        return len({owner[i][0] for i in w}) > 1

    coeffs = {}
    for j, (t, imap) in enumerate(zip(tables, index_maps)):
        for w in all_words(t.s, order):
            coeffs[tuple(imap[i - 1] for i in w)] = t.coef(w)

    evaluator = None
    if not alg.is_scalar:
        def evaluator(w, mults):
            t, local = split(w)
            return alg.zero() if t is None else t.value(local, mults)

    return CumulantTable(s, order, coeffs, alg, b0=tables[0].b0, evaluator=evaluator,
                         central=all(t.central for t in tables), vanishes=vanishes)


def free_joint_distribution(family_tables: Sequence[_Table], order: int | None = None,
                            index_maps: Sequence[Sequence[int]] | None = None) -> MomentTable:
    """Moments of the free product: Moebius summation of the joint cumulant table."""
    return moments_from_cumulants(joint_cumulant_table(family_tables, index_maps, order))


def r_concatenate(f: FormalSeries, g: FormalSeries) -> FormalSeries:
    """R-transform of the union of two free families: f in z_1..z_s, g in z_{s+1}..z_{s+p}."""
    if f.algebra != g.algebra:
        raise ValueError("flavors differ")
    if isinstance(f, _Table) and isinstance(g, _Table):
        return joint_cumulant_table([f, g])
    order = min(f.order, g.order)
    coeffs = {w: c for w, c in f.items() if len(w) <= order}
    coeffs.update({tuple(i + f.s for i in w): c for w, c in g.items() if len(w) <= order})
    return FormalSeries(f.s + g.s, order, coeffs, f.algebra)


def r_add(f: FormalSeries, g: FormalSeries) -> FormalSeries:
    """R-transform of (x_1 + y_1, ..., x_s + y_s) for free families x, y."""
    if f.s != g.s:
        raise ValueError(f"cannot add R-transforms in {f.s} and {g.s} variables")
    if not (isinstance(f, _Table) and isinstance(g, _Table)):
        return add(f, g)
    if f.b0 != g.b0:
        raise ValueError("tables use different insertions")
    order = min(f.order, g.order)
    coeffs = {w: f.coef(w) + g.coef(w) for w in all_words(f.s, order)}
    evaluator = None
    if not f.algebra.is_scalar:
        def evaluator(w, mults):
            return f.value(w, mults) + g.value(w, mults)
    return CumulantTable(f.s, order, coeffs, f.algebra, b0=f.b0, evaluator=evaluator,
                         central=f.central and g.central)


# --- boxed convolution -------------------------------------------------------------


def boxed_convolution(f: _Table, g: _Table, mode: str = "scalar") -> CumulantTable:
    """Cumulants of (x_1 y_1, ..., x_s y_s) from those of free families x and y.

    Entry at w: sum over pi in NC(n) of the joint table evaluated on the
    alternating union of pi and Kr(pi), over the interleaved word
    x_{w1} y_{w1} x_{w2} y_{w2} ....  ``mode`` is "scalar" (the evaluation
    factorises into block products) or "trivial" (B-valued; the right
    table must have b0 = unit).
    """
    if mode not in ("scalar", "trivial"):
        raise ValueError("mode must be 'scalar' or 'trivial'")
    if f.s != g.s:
        raise ValueError("tables must have the same number of variables")
    if f.algebra != g.algebra:
        raise ValueError("tables use different coefficient algebras")
    order = min(f.order, g.order)
    if mode == "scalar":
        if not f.algebra.is_scalar:
            raise ValueError("scalar mode needs scalar tables; use mode='trivial' for B-valued tables")

        def entry(w):
            total = f.algebra.zero()
            for pi in enumerate_nc(len(w)):
                total = total + eval_partitioned(f, pi, w) * eval_partitioned(g, kreweras(pi), w)
            return total

        return CumulantTable(f.s, order, None, f.algebra, entry_fn=entry)

    if f.algebra.is_scalar:
        raise ValueError("trivial mode is for B-valued tables; use mode='scalar'")
    if g.b0 is not None:
        raise ValueError("the right table must be a trivial table (b0 = unit)")
    s = f.s
    joint = joint_cumulant_table([f, g])
    # x-letters carry f's insertion b0 (except the first); y-letters carry none

    def evaluate(w, mults):
        n = len(w)
        word = tuple(v for i in w for v in (i, s + i))
        ins = tuple(m for mu in mults for m in (mu, None))
        total = f.algebra.zero()
        for pi in enumerate_nc(n):
            total = total + eval_partitioned(joint, alternating_union(pi, kreweras(pi)), word, ins)
        return total

    return CumulantTable(s, order, None, f.algebra, b0=f.b0, evaluator=evaluate,
                         entry_fn=lambda w: evaluate(w, f.base_mults(len(w))))


def delta_table(s: int, order: int, algebra=SCALARS) -> CumulantTable:
    """Cumulants of the unit: k_1 = 1 on every letter, all else 0."""
    return CumulantTable(s, order, {(i,): algebra.one() for i in range(1, s + 1)}, algebra, central=True)


def zeta_table(s: int, order: int, algebra=SCALARS) -> CumulantTable:
    """Every entry 1 (B-valued: 1_B, with insertions multiplied through)."""
    return CumulantTable(s, order, {w: algebra.one() for w in all_words(s, order)}, algebra, central=True)


# --- variables free from B -------------------------------------------------------


def _default_phi_B(algebra) -> Callable:
    if isinstance(algebra, MatrixAlgebra):
        return lambda b: b.trace() / b.n
    raise ValueError("pass phi_B explicitly for this algebra")


def cumulants_free_from_B(scalar_c: _Table, algebra, phi_B: Callable | None = None, b0=None,
                          weights: Callable[[int], object] | None = None) -> CumulantTable:
    """B-valued cumulants of variables free from B with scalar cumulants ``scalar_c``.

    Entry at a word of length n is phi(b0)^(n-1) k_n 1_B, or weights(n) k_n 1_B
    when ``weights`` is given (weights(1) must be 1).  At general insertions
    the value is m_1 phi(m_2) ... phi(m_n) k_n.
    """
    if not scalar_c.algebra.is_scalar:
        raise ValueError("input must be a scalar table")
    phi_B = phi_B or _default_phi_B(algebra)
    if weights is None:
        c0 = Fraction(1) if b0 is None else phi_B(b0)

        def weights(n):
            return c0 ** (n - 1)
    elif weights(1) != 1:
        raise ValueError("weight of length-1 words must be 1")
    one = algebra.one()
    coeffs = {w: weights(len(w)) * scalar_c.coef(w) * one for w in all_words(scalar_c.s, scalar_c.order)}

    def evaluator(w, mults):
        c = scalar_c.coef(w)
        for m in mults[1:]:
            if m is not None:
                c = c * phi_B(m)
        return _mul(mults[0], c * one)

    return CumulantTable(scalar_c.s, scalar_c.order, coeffs, algebra, b0=b0, evaluator=evaluator)
