import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freecompat.coeffalg import Matrix, MatrixAlgebra, MatrixTensorModel
from freecompat.cumulant import (
    CumulantTable,
    MomentTable,
    cumulants_from_moments,
    moments_from_cumulants,
    random_b_table,
    transform_variables,
)
from freecompat.distributions import (
    UnsupportedCase,
    b_semicircular_moments,
    b_semicircular_table,
    even_moment_cumulant_sum,
    evenness_transfer_check,
    is_b_even,
    is_even,
    make_b_semicircular_from_scalar,
    phi_injective_on_span,
    scalar_cumulants_of_b_semicircular,
    semicircular_cumulants,
    semicircular_family,
)
from freecompat.freeness import free_joint_distribution, r_add
from freecompat.ncpart import catalan
from freecompat.series import all_words

F = Fraction

ts = st.builds(Fraction, st.integers(-4, 4), st.integers(1, 4))


def random_even_scalar(order, rng):
    return CumulantTable(1, order, {(1,) * n: F(rng.randint(-3, 3), rng.randint(1, 3))
                                    for n in range(2, order + 1, 2)})


# --- semicircular ---------------------------------------------------------------------


def test_semicircular_table():
    c = semicircular_cumulants(1, 4)
    assert [c.coef((1,) * n) for n in range(1, 5)] == [0, 1, 0, 0]
    with pytest.raises(ValueError):
        semicircular_cumulants(1, 1)
    m = moments_from_cumulants(semicircular_cumulants(0, 6))
    assert all(m.coef((1,) * n) == 0 for n in range(1, 7))


@settings(max_examples=5, deadline=None)
@given(ts)
def test_semicircular_moment_law(t):
    m = moments_from_cumulants(semicircular_cumulants(t, 10))
    for n in range(1, 6):
        assert m.coef((1,) * (2 * n)) == catalan(n) * t ** n
        assert m.coef((1,) * (2 * n - 1)) == 0


def test_b_semicircular_moments():
    alg = MatrixAlgebra(2)
    t = F(3, 2)
    ms = b_semicircular_moments(t, 6, alg)
    assert ms[1] == t * alg.one()
    assert ms[3] == 2 * t ** 2 * alg.one()
    assert ms[5] == 5 * t ** 3 * alg.one()
    assert ms[0] == ms[2] == ms[4] == alg.zero()
    with pytest.raises(UnsupportedCase):
        b_semicircular_moments(t, 4, alg, central=False)


def test_b_semicircular_moments_are_scalar_valued():
    alg = MatrixAlgebra(3)
    t = F(-2)
    for n, e in enumerate(b_semicircular_moments(t, 8, alg), start=1):
        alpha = alg.as_scalar(e)
        assert alpha == (catalan(n // 2) * t ** (n // 2) if n % 2 == 0 else 0)


def test_central_table_nested_evaluation_matches_scalar_shape():
    # x commuting with B: E(x b x) = b t for the B-central semicircular
    alg = MatrixAlgebra(2)
    c = b_semicircular_table(F(2), 4, alg)
    b = Matrix([[F(1), F(2)], [F(3), F(4)]])
    assert c.value((1, 1), (None, b)) == 2 * b


@pytest.mark.parametrize("t", [F(1), F(2, 3), F(-5), F(0)])
def test_scalar_cumulants_of_b_semicircular(t):
    ks = scalar_cumulants_of_b_semicircular(t, 6)
    assert ks == [0, t, 0, 0, 0, 0]
    # independent route: Moebius inversion of the Catalan moments
    m = MomentTable(1, 6, {(1,) * n: (catalan(n // 2) * t ** (n // 2) if n % 2 == 0 else 0) for n in range(1, 7)})
    k = cumulants_from_moments(m)
    assert ks == [k.coef((1,) * n) for n in range(1, 7)]


def test_make_b_semicircular_from_scalar():
    alg = MatrixAlgebra(2)
    K = make_b_semicircular_from_scalar(semicircular_cumulants(F(5, 3), 5), alg)
    assert K.coef((1, 1)) == F(5, 3) * alg.one()
    for n in (1, 3, 4, 5):
        assert K.coef((1,) * n) == alg.zero()
    for w in all_words(1, 5):
        assert K.coef(w).trace() / 2 == semicircular_cumulants(F(5, 3), 5).coef(w)
    with pytest.raises(ValueError):
        make_b_semicircular_from_scalar(CumulantTable(1, 3, {(1,): 1}), alg)


def test_semicircular_family():
    fam = semicircular_family([1], 4)
    assert fam.equals(semicircular_cumulants(1, 4))
    fam = semicircular_family([1, 1], 4)
    m = moments_from_cumulants(fam)
    assert m.coef((1, 2, 1, 2)) == 0
    assert m.coef((1, 1, 2, 2)) == 1 and m.coef((1, 2, 2, 1)) == 1


@settings(max_examples=10, deadline=None)
@given(ts, ts)
def test_sum_of_free_semicirculars_is_semicircular(t1, t2):
    summed = r_add(semicircular_cumulants(t1, 6), semicircular_cumulants(t2, 6))
    assert summed.equals(semicircular_cumulants(t1 + t2, 6))
    via_joint = transform_variables(
        free_joint_distribution([semicircular_cumulants(t1, 6), semicircular_cumulants(t2, 6)]),
        [[(1, (1,)), (1, (2,))]],
    )
    assert cumulants_from_moments(via_joint).equals(semicircular_cumulants(t1 + t2, 6))


# --- evenness -------------------------------------------------------------------------


def test_is_even_examples():
    assert is_even(semicircular_cumulants(1, 5))
    assert not is_even(CumulantTable(1, 3, {(1,): 1}))
    alg = MatrixAlgebra(2)
    assert is_b_even(b_semicircular_table(1, 5, alg))
    assert not is_b_even(CumulantTable(1, 3, {(1, 1, 1): Matrix.unit(2, 0, 1)}, alg))
    with pytest.raises(ValueError):
        is_even(b_semicircular_table(1, 3, alg))
    with pytest.raises(ValueError):
        is_b_even(semicircular_cumulants(1, 3))


@pytest.mark.parametrize("seed", range(10))
def test_odd_cumulants_vanish_iff_odd_moments_vanish(seed):
    rng = random.Random(seed)
    c = random_even_scalar(6, rng)
    m = moments_from_cumulants(c)
    assert is_even(c) and is_even(m)
    # and back: an even moment table has even cumulants
    assert is_even(cumulants_from_moments(m))
    # breaking one odd cumulant breaks the moments
    c2 = CumulantTable(1, 6, dict(c.items()) | {(1, 1, 1): F(1)})
    assert not is_even(moments_from_cumulants(c2))


def test_even_moment_cumulant_sum():
    m = moments_from_cumulants(semicircular_cumulants(1, 6))
    assert even_moment_cumulant_sum(m, 2) == m.coef((1, 1))
    assert even_moment_cumulant_sum(m, 4) == 0
    assert even_moment_cumulant_sum(m, 6) == 0
    with pytest.raises(ValueError):
        even_moment_cumulant_sum(m, 3)
    odd = moments_from_cumulants(CumulantTable(1, 4, {(1,): 1, (1, 1): 1}))
    with pytest.raises(ValueError):
        even_moment_cumulant_sum(odd, 4)


@pytest.mark.parametrize("seed", range(5))
def test_restricted_sum_on_random_even_tables(seed):
    rng = random.Random(seed)
    c = random_even_scalar(6, rng)
    m = moments_from_cumulants(c)
    for n in (2, 4, 6):
        assert even_moment_cumulant_sum(m, n) == c.coef((1,) * n)


def test_restricted_sum_b_valued():
    alg = MatrixAlgebra(2)
    rng = random.Random(7)
    full = random_b_table(CumulantTable, 1, 6, rng)
    # zero the odd entries while keeping an evaluator for nested insertions
    ev = lambda w, mults: alg.zero() if len(w) % 2 else full.evaluator(w, mults)
    c = CumulantTable(1, 6, {w: (alg.zero() if len(w) % 2 else v) for w, v in full.items()}, alg, evaluator=ev)
    m = moments_from_cumulants(c)
    assert is_b_even(m)
    for n in (2, 4):
        assert even_moment_cumulant_sum(m, n) == c.coef((1,) * n)


def test_phi_injective_on_span():
    m = MatrixTensorModel(2, 2)
    one, e12 = m.B.one(), Matrix.unit(2, 0, 1)
    assert phi_injective_on_span(m, [])
    assert phi_injective_on_span(m, [m.B.zero()])
    assert phi_injective_on_span(m, [one, 2 * one])
    assert not phi_injective_on_span(m, [e12])
    assert not phi_injective_on_span(m, [one, e12])


def test_evenness_transfer_antidiagonal():
    m = MatrixTensorModel(2, 2)
    a = m.tensor(m.B.one(), Matrix([[F(0), F(1)], [F(-1), F(0)]]))
    rep = evenness_transfer_check(m, a, 6)
    assert rep.b_even and rep.scalar_even and rep.forward_holds
    assert rep.nondegenerate and rep.converse_holds


def test_evenness_transfer_unit():
    m = MatrixTensorModel(2, 2)
    rep = evenness_transfer_check(m, m.A.one(), 5)
    assert not rep.b_even and not rep.scalar_even
    assert rep.scalar_odd_cumulants[0] == 1
    assert rep.forward_holds and rep.nondegenerate and rep.converse_holds


def test_evenness_transfer_degenerate_span():
    # odd B-cumulants live off the diagonal, where phi vanishes: scalar-even
    # without being B-even, and the converse is not asserted
    m = MatrixTensorModel(2, 2)
    a = m.tensor(Matrix.unit(2, 0, 1), Matrix.identity(2))
    rep = evenness_transfer_check(m, a, 3)
    assert not rep.b_even and rep.scalar_even
    assert rep.forward_holds and not rep.nondegenerate and rep.converse_holds is None
