"""Noncrossing partitions of {1, ..., n} and the lattice machinery built on them.

Partitions are immutable values in canonical form (blocks sorted by minimum,
elements ascending).  Enumeration walks restricted-growth strings in
lexicographic order, so ``enumerate_nc(n)`` is deterministic.

Lattice data (up-sets, Moebius values) is cached per ``n`` behind
``functools.lru_cache``; cached objects are never mutated after creation, so
concurrent readers always see complete results.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence

MAX_N = 12
"""Enumeration cap; |NC(12)| = 208012."""

MAX_LATTICE_N = 9
"""Cap for full lattice tables (up-sets and Moebius over every pair)."""


@dataclass(frozen=True, order=False)
class NoncrossingPartition:
    n: int
    blocks: tuple[tuple[int, ...], ...]
    _rgs: tuple[int, ...] = field(default=(), repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"ground set size must be positive, got {self.n}")
        blocks = tuple(sorted((tuple(sorted(b)) for b in self.blocks), key=lambda b: b[0] if b else 0))
        seen = [b for blk in blocks for b in blk]
        if any(len(b) == 0 for b in blocks):
            raise ValueError("empty block")
        if sorted(seen) != list(range(1, self.n + 1)):
            raise ValueError(f"blocks {blocks} do not partition 1..{self.n}")
        labels = [0] * self.n
        for j, blk in enumerate(blocks):
            for e in blk:
                labels[e - 1] = j
        if not _labels_noncrossing(labels):
            raise ValueError(f"partition {_fmt(blocks)} is crossing")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "_rgs", tuple(labels))

    @classmethod
    def from_rgs(cls, rgs: Sequence[int]) -> "NoncrossingPartition":
        """Build from a restricted-growth string of 0-based block labels."""
        nblocks = max(rgs) + 1 if rgs else 0
        blocks: list[list[int]] = [[] for _ in range(nblocks)]
        for i, lab in enumerate(rgs, start=1):
            blocks[lab].append(i)
        return cls(len(rgs), tuple(tuple(b) for b in blocks))

    @classmethod
    def parse(cls, text: str) -> "NoncrossingPartition":
        """Parse ``{(1,2),(3)}``; whitespace is ignored."""
        s = re.sub(r"\s+", "", text)
        if not (s.startswith("{") and s.endswith("}")):
            raise ValueError(f"cannot parse partition {text!r}")
        groups = re.findall(r"\(([^()]*)\)", s[1:-1])
        if re.sub(r"\([^()]*\)", "", s[1:-1]).strip(",") != "":
            raise ValueError(f"cannot parse partition {text!r}")
        blocks = [tuple(int(t) for t in g.split(",") if t) for g in groups]
        n = sum(len(b) for b in blocks)
        return cls(n, tuple(blocks))

    @property
    def rgs(self) -> tuple[int, ...]:
        return self._rgs

    def __len__(self) -> int:
        return len(self.blocks)

    def __str__(self) -> str:
        return _fmt(self.blocks)

    def __lt__(self, other: "NoncrossingPartition") -> bool:
        return (self.n, self.rgs) < (other.n, other.rgs)

    def block_of(self, i: int) -> tuple[int, ...]:
        return self.blocks[self._rgs[i - 1]]


def _fmt(blocks) -> str:
    return "{" + ",".join("(" + ",".join(map(str, b)) + ")" for b in blocks) + "}"


def _labels_noncrossing(labels: Sequence[int]) -> bool:
    # Stack test: a label may reappear only while it is still on the stack,
    # and reappearing closes every block opened after it.
    stack: list[int] = []
    closed: set[int] = set()
    for lab in labels:
        if lab in closed:
            return False
        if lab in stack:
            while stack[-1] != lab:
                closed.add(stack.pop())
        else:
            stack.append(lab)
    return True


def zero(n: int) -> NoncrossingPartition:
    """Minimal element 0_n (all singletons)."""
    return NoncrossingPartition(n, tuple((i,) for i in range(1, n + 1)))


def one(n: int) -> NoncrossingPartition:
    """Maximal element 1_n (one block)."""
    return NoncrossingPartition(n, (tuple(range(1, n + 1)),))


def _check_n(n: int, cap: int = MAX_N) -> None:
    if not isinstance(n, int) or n < 1 or n > cap:
        raise ValueError(f"n must be an integer in 1..{cap}, got {n!r}")


def _iter_rgs(n: int) -> Iterator[tuple[int, ...]]:
    out = [0] * n

    def rec(i: int, stack: tuple[int, ...], nblocks: int):
        if i == n:
            yield tuple(out)
            return
        # Joining block stack[d] closes every block above it.
        for d, lab in enumerate(stack):
            out[i] = lab
            yield from rec(i + 1, stack[: d + 1], nblocks)
        out[i] = nblocks
        yield from rec(i + 1, stack + (nblocks,), nblocks + 1)

    yield from rec(0, (), 0)


@lru_cache(maxsize=None)
def _nc_tuple(n: int) -> tuple[NoncrossingPartition, ...]:
    return tuple(NoncrossingPartition.from_rgs(r) for r in _iter_rgs(n))


def enumerate_nc(n: int, cap: int = MAX_N) -> list[NoncrossingPartition]:
    """All of NC(n), lexicographic in the restricted-growth encoding."""
    _check_n(n, cap)
    return list(_nc_tuple(n))


def is_even_partition(pi: NoncrossingPartition) -> bool:
    return all(len(b) % 2 == 0 for b in pi.blocks)


def is_pair_partition(pi: NoncrossingPartition) -> bool:
    return all(len(b) == 2 for b in pi.blocks)


def enumerate_nc_even(n: int) -> list[NoncrossingPartition]:
    """NC^(even)(n): every block has even size (empty for odd n)."""
    return [p for p in enumerate_nc(n) if is_even_partition(p)]


def enumerate_nc_pair(n: int) -> list[NoncrossingPartition]:
    """NC_2(n): noncrossing pairings (empty for odd n)."""
    if n % 2:
        _check_n(n)
        return []
    return [p for p in enumerate_nc(n) if is_pair_partition(p)]


def _same_n(theta: NoncrossingPartition, pi: NoncrossingPartition) -> None:
    if theta.n != pi.n:
        raise ValueError(f"ground sets differ: {theta.n} vs {pi.n}")


def leq(theta: NoncrossingPartition, pi: NoncrossingPartition) -> bool:
    """Refinement order: every block of theta sits inside a block of pi."""
    _same_n(theta, pi)
    lab = pi.rgs
    return all(len({lab[e - 1] for e in blk}) == 1 for blk in theta.blocks)


class _Lattice:
    """Index tables for NC(n): position of each partition and its up-set."""

    def __init__(self, n: int):
        self.n = n
        self.elements = _nc_tuple(n)
        self.index = {p: i for i, p in enumerate(self.elements)}
        covers = [self._covers(p) for p in self.elements]
        # Fewer blocks first means every cover is finished before it is needed.
        order = sorted(range(len(self.elements)), key=lambda i: len(self.elements[i]))
        up = [0] * len(self.elements)
        for i in order:
            bits = 1 << i
            for j in covers[i]:
                bits |= up[j]
            up[i] = bits
        self.up = up
        self._mu_top: list[int] | None = None

    def _covers(self, p: NoncrossingPartition) -> list[int]:
        res = []
        bl = p.blocks
        for a in range(len(bl)):
            for b in range(a + 1, len(bl)):
                merged = list(bl[:a]) + list(bl[a + 1 : b]) + list(bl[b + 1 :]) + [bl[a] + bl[b]]
                labels = [0] * p.n
                merged = sorted((tuple(sorted(m)) for m in merged), key=lambda m: m[0])
                for j, m in enumerate(merged):
                    for e in m:
                        labels[e - 1] = j
                if _labels_noncrossing(labels):
                    res.append(self.index[NoncrossingPartition(p.n, tuple(merged))])
        return res

    def upset(self, i: int) -> list[int]:
        bits, out, j = self.up[i], [], 0
        while bits:
            if bits & 1:
                out.append(j)
            bits >>= 1
            j += 1
        return out

    def mu_to_top(self) -> list[int]:
        if self._mu_top is None:
            top = self.index[one(self.n)]
            mu = [0] * len(self.elements)
            order = sorted(range(len(self.elements)), key=lambda i: len(self.elements[i]))
            for i in order:
                if i == top:
                    mu[i] = 1
                else:
                    mu[i] = -sum(mu[j] for j in self.upset(i) if j != i)
            self._mu_top = mu
        return self._mu_top


@lru_cache(maxsize=None)
def _lattice(n: int) -> _Lattice:
    _check_n(n, MAX_LATTICE_N)
    return _Lattice(n)


def upset(pi: NoncrossingPartition) -> list[NoncrossingPartition]:
    """All sigma with pi <= sigma."""
    lat = _lattice(pi.n)
    return [lat.elements[j] for j in lat.upset(lat.index[pi])]


@lru_cache(maxsize=None)
def _mobius_idx(n: int, i: int, j: int) -> int:
    lat = _lattice(n)
    if i == j:
        return 1
    if not (lat.up[i] >> j) & 1:
        return 0
    # mu(theta, pi) = -sum_{theta < sigma <= pi} mu(sigma, pi)
    total = 0
    for k in lat.upset(i):
        if k != i and (lat.up[k] >> j) & 1:
            total += _mobius_idx(n, k, j)
    return -total


def mobius(theta: NoncrossingPartition, pi: NoncrossingPartition) -> int:
    """Moebius function of the lattice NC(n); zero off the order relation."""
    _same_n(theta, pi)
    lat = _lattice(theta.n)
    return _mobius_idx(theta.n, lat.index[theta], lat.index[pi])


def zeta_fn(theta: NoncrossingPartition, pi: NoncrossingPartition) -> int:
    return 1 if leq(theta, pi) else 0


def delta_fn(theta: NoncrossingPartition, pi: NoncrossingPartition) -> int:
    _same_n(theta, pi)
    return 1 if theta == pi else 0


@lru_cache(maxsize=None)
def mobius_to_top(n: int) -> tuple[tuple[NoncrossingPartition, int], ...]:
    """Pairs (pi, mu(pi, 1_n)) for every pi in NC(n), in enumeration order."""
    lat = _lattice(n)
    return tuple(zip(lat.elements, lat.mu_to_top()))


def kreweras(pi: NoncrossingPartition) -> NoncrossingPartition:
    """Kreweras complement, computed as the cycles of pi^{-1} gamma.

    Here pi acts as the permutation cycling each block upward and
    gamma = (1 2 ... n).  Barred points sit immediately after their
    unbarred counterpart.
    """
    n = pi.n
    inv = {}
    for blk in pi.blocks:
        for a, b in zip(blk, blk[1:] + blk[:1]):
            inv[b] = a
    perm = {i: inv[i % n + 1] for i in range(1, n + 1)}
    seen, blocks = set(), []
    for start in range(1, n + 1):
        if start in seen:
            continue
        cyc, i = [], start
        while i not in seen:
            seen.add(i)
            cyc.append(i)
            i = perm[i]
        blocks.append(tuple(sorted(cyc)))
    return NoncrossingPartition(n, tuple(blocks))


def alternating_union(pi: NoncrossingPartition, sigma: NoncrossingPartition) -> NoncrossingPartition:
    """pi on odd points 1, 3, ..., sigma on even points 2, 4, ... of 2n points.

    Raises ValueError when the union crosses, i.e. when sigma is not below
    Kr(pi).
    """
    _same_n(pi, sigma)
    blocks = [tuple(2 * e - 1 for e in b) for b in pi.blocks]
    blocks += [tuple(2 * e for e in b) for b in sigma.blocks]
    return NoncrossingPartition(2 * pi.n, tuple(blocks))


@dataclass(frozen=True)
class BlockNode:
    block: tuple[int, ...]
    children: tuple["BlockNode", ...] = ()

    def walk(self) -> Iterator["BlockNode"]:
        yield self
        for c in self.children:
            yield from c.walk()


def _parent_map(pi: NoncrossingPartition) -> dict[tuple[int, ...], tuple[int, ...] | None]:
    parent: dict[tuple[int, ...], tuple[int, ...] | None] = {}
    for w in pi.blocks:
        best = None
        for v in pi.blocks:
            if v is w or v[0] > w[0]:
                continue
            # v encloses w when some leg of v lies beyond w's last point
            if v[0] < w[0] and v[-1] > w[-1]:
                if best is None or v[0] > best[0]:
                    best = v
        parent[w] = best
    return parent


def nesting_structure(pi: NoncrossingPartition) -> tuple[BlockNode, ...]:
    """Forest of blocks: outer blocks are roots (left to right), each child
    sits in a gap between two consecutive legs of its parent."""
    parent = _parent_map(pi)

    def build(v) -> BlockNode:
        kids = tuple(build(w) for w in pi.blocks if parent[w] == v)
        return BlockNode(v, kids)

    return tuple(build(v) for v in pi.blocks if parent[v] is None)


def outer_blocks(pi: NoncrossingPartition) -> list[tuple[int, ...]]:
    return [node.block for node in nesting_structure(pi)]


def catalan(n: int) -> int:
    from math import comb

    return comb(2 * n, n) // (n + 1)
