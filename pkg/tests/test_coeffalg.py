import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freecompat.coeffalg import (
    CapacityError,
    FreeGroupModel,
    GroupAlgebraElement as G,
    Matrix,
    MatrixAlgebra,
    MatrixTensorModel,
    apply_E,
    apply_phi,
    h_element,
    invert_word,
    random_group_element,
    random_matrix,
    reduce_word,
    reduced_words,
    shift_example_elements,
)

F = Fraction


def test_reduce_and_invert():
    assert reduce_word("abBA") == ""
    assert reduce_word("aAb") == "b"
    assert invert_word("ab") == "BA"
    assert (G.word("ab") * G.word("BA")) == G.word("")


@settings(max_examples=100, deadline=None)
@given(st.text(alphabet="aAbB", max_size=8))
def test_word_times_inverse_is_identity(w):
    assert G.word(w) * G.word(invert_word(reduce_word(w))) == G.word("")


def test_reduced_words_count():
    # 1 + 4 + 4*3 + 4*9
    assert len(reduced_words(3)) == 1 + 4 + 12 + 36


def test_freegroup_E_and_phi_examples():
    fg = FreeGroupModel()
    x = G({"": F(2), "abAB": F(3), "a": F(5)})
    assert apply_E(fg, x) == G({"": F(2), "abAB": F(3)})
    assert apply_phi(fg, x) == 2
    assert apply_E(fg, fg.A.one()) == fg.B.one()
    assert apply_phi(fg, fg.A.one()) == 1
    assert apply_E(fg, h_element(-2)) == h_element(-2)


def test_freegroup_capacity():
    fg = FreeGroupModel(max_len=4)
    with pytest.raises(CapacityError):
        fg.E(G.word("ababa"))


def test_matrix_E_and_phi_examples():
    m = MatrixTensorModel(2, 2)
    x = Matrix.unit(4, 0, 0)
    assert apply_E(m, x) == F(1, 2) * Matrix.unit(2, 0, 0)
    assert apply_E(m, m.A.one()) == m.B.one()
    assert apply_phi(m, x) == F(1, 4)
    assert apply_phi(m, m.A.one()) == 1
    with pytest.raises(CapacityError):
        m.E(Matrix.identity(3))


@pytest.mark.parametrize("N,expected", [(3, F(2, 3)), (2, F(1, 2)), (5, F(4, 5))])
def test_shift_example(N, expected):
    model, x, y = shift_example_elements(N)
    lower, upper = model.E(x), model.E(y)
    assert model.phi_B(lower * upper) == expected
    assert model.phi_B(lower) * model.phi_B(upper) == 0
    assert all(lower[i, j] == (1 if i == j + 1 else 0) for i in range(N) for j in range(N))
    assert upper == lower.transpose()


def test_shift_example_rejects_small_N():
    with pytest.raises(ValueError):
        shift_example_elements(1)


def test_matrix_ring_axioms():
    rng = random.Random(3)
    for _ in range(20):
        a, b, c = (random_matrix(3, rng) for _ in range(3))
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a * Matrix.identity(3) == a == Matrix.identity(3) * a


def test_group_ring_axioms():
    rng = random.Random(4)
    for _ in range(20):
        a, b, c = (random_group_element(rng) for _ in range(3))
        assert (a * b) * c == a * (b * c)
        assert (a + b) * c == a * c + b * c


def test_float_mode_tolerance():
    alg = MatrixAlgebra(2, exact=False)
    a = Matrix([[1.0, 0.0], [0.0, 1.0]])
    assert alg.is_close(a, Matrix([[1.0 + 1e-12, 0.0], [0.0, 1.0]]))
    assert not alg.is_close(a, Matrix([[1.0 + 1e-6, 0.0], [0.0, 1.0]]))


@pytest.mark.parametrize("seed", range(50))
def test_bimodule_law_matrix(seed):
    rng = random.Random(seed)
    m = MatrixTensorModel(2, 2)
    b, b2 = random_matrix(2, rng), random_matrix(2, rng)
    x = random_matrix(4, rng)
    assert m.E(m.embed(b) * x * m.embed(b2)) == b * m.E(x) * b2
    assert m.E(m.embed(m.E(x))) == m.E(x)
    assert m.phi(x) == m.phi_B(m.E(x))


@pytest.mark.parametrize("seed", range(50))
def test_bimodule_law_freegroup(seed):
    rng = random.Random(seed)
    fg = FreeGroupModel()
    b = sum((h_element(k, F(rng.randint(-2, 2))) for k in (-1, 0, 1)), G())
    b2 = h_element(rng.choice([-1, 1]), F(rng.randint(1, 3)))
    x = random_group_element(rng, max_len=4)
    assert fg.E(b * x * b2) == b * fg.E(x) * b2
    assert fg.E(fg.E(x)) == fg.E(x)
    assert fg.phi(x) == fg.phi(fg.E(x))
    assert fg.E(b) == b


def test_phi_linear():
    rng = random.Random(9)
    m = MatrixTensorModel(3, 2)
    for _ in range(10):
        x, y = random_matrix(6, rng), random_matrix(6, rng)
        c = F(rng.randint(-5, 5), 7)
        assert m.phi(x + c * y) == m.phi(x) + c * m.phi(y)


def test_weighted_phi_breaks_compatibility_on_a_witness():
    m = MatrixTensorModel(2, 2, phi_diag=[F(1, 10), F(2, 10), F(3, 10), F(4, 10)])
    x = Matrix.unit(4, 0, 0)
    assert m.phi(x) != m.phi_B(m.E(x))


def test_word_element_inserts_B_on_the_left_of_each_letter():
    model, x, y = shift_example_elements(3)
    b = Matrix.unit(3, 0, 0)
    assert model.word_element((1, 2), [b, None]) == model.embed(b) * x * y
    with pytest.raises(ValueError):
        model.word_element((3,))
