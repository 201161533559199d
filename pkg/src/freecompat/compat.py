"""Checks and constructions relating a scalar functional phi to a
conditional expectation E: compatibility phi = phi o E, compatible
subalgebras, the scalar-valued property and B-centrality.

"For all a in A" is replaced by a finite corpus throughout, so every
verdict here is relative to the corpus that was checked.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Sequence

from .coeffalg import (
    GroupAlgebraElement,
    Matrix,
    MatrixTensorModel,
    ProbabilitySpaceModel,
    reduced_words,
)


def _dev(model, a, b) -> float:
    return model.scalars.norm(a - b)


def _close(model, a, b) -> bool:
    return model.scalars.is_close(a, b)


# --- corpora ---------------------------------------------------------------------


def generator_corpus(model: ProbabilitySpaceModel, max_len: int, size: int | None = None,
                     rng: random.Random | None = None, with_B: bool = True) -> list:
    """Products m_1 x_{i1} ... m_n x_{in} with n <= max_len.

    With ``with_B`` the insertions are drawn from the model's B basis (or
    left as the unit); ``size`` random elements are drawn when given,
    otherwise every plain generator word is listed.
    """
    s = model.s
    if size is None:
        return [model.word_element(w) for n in range(1, max_len + 1) for w in product(range(1, s + 1), repeat=n)]
    rng = rng or random.Random(0)
    basis = model.B_basis() if with_B else []
    out = []
    for _ in range(size):
        n = rng.randint(1, max_len)
        w = [rng.randint(1, s) for _ in range(n)]
        mults = [rng.choice(basis + [None]) if basis else None for _ in range(n)]
        el = model.word_element(w, mults)
        if with_B and basis and rng.random() < 0.5:
            el = el * model.embed(rng.choice(basis))
        out.append(el)
    return out


def freegroup_corpus(max_len: int) -> list[GroupAlgebraElement]:
    """Every reduced word of length <= max_len as a group-algebra element."""
    return [GroupAlgebraElement.word(w) for w in reduced_words(max_len)]


def matrix_corpus(model: MatrixTensorModel, size: int, rng: random.Random) -> list:
    """Mixed corpus: generator words with B insertions plus elementary matrices of A."""
    out = generator_corpus(model, 4, size // 2, rng) if model.s else []
    n = model.N * model.K
    one = model.A.one()[0, 0]
    while len(out) < size:
        i, j = rng.randrange(n), rng.randrange(n)
        rows = [[one - one] * n for _ in range(n)]
        rows[i][j] = one
        out.append(Matrix(rows))
    return out


# --- compatibility ------------------------------------------------------------------


def is_compatible(model: ProbabilitySpaceModel, corpus: Sequence):
    """(True iff phi(a) = phi(E(a)) on the corpus, max |phi(a) - phi(E(a))|)."""
    worst, ok = 0.0, True
    for a in corpus:
        lhs, rhs = model.phi(a), model.phi_B(model.E(a))
        if not _close(model, lhs, rhs):
            ok = False
        worst = max(worst, _dev(model, lhs, rhs))
    return ok, worst


def induced_compatible_functional(model: ProbabilitySpaceModel) -> ProbabilitySpaceModel:
    """Copy of the model with phi replaced by phi o E."""
    base_phi = model.phi

    def phi_prime(x):
        return base_phi(model.embed(model.E(x)))

    return model.with_phi(phi_prime, f"{model.label}[phi o E]")


def make_compatible_functional(model: ProbabilitySpaceModel, psi: Callable) -> ProbabilitySpaceModel:
    """Copy of the model with phi = psi o E for a functional psi on B."""
    return model.with_phi(lambda x: psi(model.E(x)), f"{model.label}[psi o E]")


# --- compatible subalgebras -----------------------------------------------------------


def is_compatible_subalgebra(model: ProbabilitySpaceModel, gens: Sequence, max_len: int):
    """phi(x) = phi(E(x)) for every product of at most ``max_len`` elements of gens.

    Returns (verdict, max deviation, first failing index tuple or None).
    """
    worst, first_bad = 0.0, None
    for n in range(1, max_len + 1):
        for idx in product(range(len(gens)), repeat=n):
            x = model.A.one()
            for i in idx:
                x = x * gens[i]
            lhs, rhs = model.phi(x), model.phi_B(model.E(x))
            worst = max(worst, _dev(model, lhs, rhs))
            if first_bad is None and not _close(model, lhs, rhs):
                first_bad = idx
    return first_bad is None, worst, first_bad


def has_scalar_valued_property(model: ProbabilitySpaceModel, x, order: int):
    """(alphas, None) with E(x^n) = alpha_n 1_B for n = 1..order, or (None, n)
    for the first power that is not a scalar multiple of the unit."""
    alphas, p = [], model.A.one()
    for n in range(1, order + 1):
        p = p * x
        a = model.B.as_scalar(model.E(p))
        if a is None:
            return None, n
        alphas.append(a)
    return alphas, None


def is_B_central(model: ProbabilitySpaceModel, x, basis: Sequence | None = None):
    """(True iff x commutes with every sampled B element, first non-commuting b)."""
    basis = model.B_basis() if basis is None else basis
    for b in basis:
        eb = model.embed(b)
        if not model.A.is_close(x * eb, eb * x):
            return False, b
    return True, None


@dataclass
class SubalgebraTheoremReport:
    central: bool
    scalar_valued: bool
    power_compatible: bool
    alphas: list | None
    conclusion_checked: bool = False
    conclusion_holds: bool | None = None
    max_deviation: float = 0.0
    words_checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def hypotheses_hold(self) -> bool:
        return self.central and self.scalar_valued and self.power_compatible


def mixed_power_corpus(model: ProbabilitySpaceModel, x0, order: int, basis: Sequence | None = None,
                       size: int | None = 10, rng: random.Random | None = None):
    """Elements b_1 x0^{k_1} ... b_n x0^{k_n} with k_j >= 1, sum k_j <= order.

    Every composition of every total is used; the B factors are drawn from
    ``basis`` (all tuples when ``size`` is None, otherwise ``size`` random
    choices per composition).
    """
    basis = list(model.B_basis() if basis is None else basis)
    powers = [model.A.one()]
    for _ in range(order):
        powers.append(powers[-1] * x0)
    emb = [model.embed(b) for b in basis]

    def compositions(total):
        if total == 0:
            yield ()
            return
        for k in range(1, total + 1):
            for rest in compositions(total - k):
                yield (k,) + rest

    for total in range(1, order + 1):
        for comp in compositions(total):
            if size is None:
                choices = product(range(len(emb)), repeat=len(comp))
            else:
                rng = rng or random.Random(0)
                choices = [tuple(rng.randrange(len(emb)) for _ in comp) for _ in range(size)]
            for pick in choices:
                el = model.A.one()
                for k, bi in zip(comp, pick):
                    el = el * emb[bi] * powers[k]
                yield comp, pick, el


def verify_compatible_subalgebra_theorem(model: ProbabilitySpaceModel, x0, order: int,
                                         basis: Sequence | None = None, size: int | None = 10,
                                         rng: random.Random | None = None) -> SubalgebraTheoremReport:
    """Check the hypotheses on x0 (B-central, scalar-valued, phi(x0^n) = phi(E(x0^n)))
    and, only when all hold, phi = phi o E on mixed words of B and powers of x0."""
    central, _ = is_B_central(model, x0, basis)
    alphas, _ = has_scalar_valued_property(model, x0, order)
    p, power_ok = model.A.one(), True
    for _ in range(order):
        p = p * x0
        if not _close(model, model.phi(p), model.phi_B(model.E(p))):
            power_ok = False
    rep = SubalgebraTheoremReport(central, alphas is not None, power_ok, alphas)
    if not rep.hypotheses_hold:
        return rep
    rep.conclusion_checked = True
    for comp, pick, el in mixed_power_corpus(model, x0, order, basis, size, rng):
        lhs, rhs = model.phi(el), model.phi_B(model.E(el))
        rep.words_checked += 1
        rep.max_deviation = max(rep.max_deviation, _dev(model, lhs, rhs))
        if not _close(model, lhs, rhs):
            rep.failures.append((comp, pick))
    rep.conclusion_holds = not rep.failures
    return rep


def corrupted_matrix_model(N: int = 2, K: int = 2, generators: Sequence = (), weights: Sequence | None = None):
    """Tensor model whose phi is a non-uniformly weighted trace (not phi o E)."""
    if weights is None:
        total = N * K * (N * K + 1) // 2
        weights = [Fraction(i + 1, total) for i in range(N * K)]
    return MatrixTensorModel(N, K, generators, phi_diag=weights)

