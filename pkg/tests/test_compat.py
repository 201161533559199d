import random
from fractions import Fraction

import pytest

from freecompat.coeffalg import (
    FreeGroupModel,
    Matrix,
    MatrixTensorModel,
    random_matrix,
    shift_example_elements,
    shift_matrices,
)
from freecompat.compat import (
    corrupted_matrix_model,
    freegroup_corpus,
    generator_corpus,
    has_scalar_valued_property,
    induced_compatible_functional,
    is_B_central,
    is_compatible,
    is_compatible_subalgebra,
    make_compatible_functional,
    matrix_corpus,
    mixed_power_corpus,
    verify_compatible_subalgebra_theorem,
)

F = Fraction


def circulant(cs):
    K = len(cs)
    return Matrix([[cs[(j - i) % K] for j in range(K)] for i in range(K)])


def flip():
    return Matrix([[F(0), F(1)], [F(1), F(0)]])


# --- compatibility ------------------------------------------------------------------


def test_freegroup_is_compatible():
    ok, dev = is_compatible(FreeGroupModel(), freegroup_corpus(6))
    assert ok and dev == 0
    assert len(freegroup_corpus(2)) == 1 + 4 + 12


def test_matrix_model_is_compatible():
    rng = random.Random(0)
    m = MatrixTensorModel(3, 2, [random_matrix(6, rng) for _ in range(2)])
    ok, dev = is_compatible(m, matrix_corpus(m, 200, rng))
    assert ok and dev == 0


def test_corrupted_phi_fails_then_repairs():
    bad = corrupted_matrix_model(2, 2)
    corpus = matrix_corpus(bad, 100, random.Random(1))
    ok, dev = is_compatible(bad, corpus)
    assert not ok and dev > 0
    witness = Matrix.unit(4, 0, 0)
    assert bad.phi(witness) != bad.phi_B(bad.E(witness))
    fixed = induced_compatible_functional(bad)
    ok, dev = is_compatible(fixed, corpus + [witness])
    assert ok and dev == 0


def test_induced_on_compatible_model_changes_nothing():
    rng = random.Random(2)
    m = MatrixTensorModel(2, 3, [random_matrix(6, rng)])
    m2 = induced_compatible_functional(m)
    for a in matrix_corpus(m, 50, rng):
        assert m.phi(a) == m2.phi(a)


def test_psi_variant():
    m = corrupted_matrix_model(3, 2)
    psi = lambda b: b[0, 0] - 2 * b[1, 2]
    m2 = make_compatible_functional(m, psi)
    corpus = matrix_corpus(m, 60, random.Random(3))
    assert is_compatible(m2, corpus) == (True, 0.0)
    a = corpus[0]
    assert m2.phi(a) == psi(m.E(a))


@pytest.mark.parametrize("seed", range(5))
def test_induced_always_passes_exactly(seed):
    rng = random.Random(seed)
    N, K = rng.randint(1, 3), rng.randint(1, 3)
    weights = [F(rng.randint(1, 9)) for _ in range(N * K)]
    m = MatrixTensorModel(N, K, [random_matrix(N * K, rng)], phi_diag=weights)
    ok, dev = is_compatible(induced_compatible_functional(m), matrix_corpus(m, 40, rng))
    assert ok and dev == 0


def test_generator_corpus_shapes():
    model, x, y = shift_example_elements(2)
    assert len(generator_corpus(model, 3)) == 2 + 4 + 8
    assert len(generator_corpus(model, 3, size=7, rng=random.Random(0))) == 7


# --- compatible subalgebras -----------------------------------------------------------


def test_scalar_and_B_generated_subalgebras():
    m = corrupted_matrix_model(2, 2)
    assert is_compatible_subalgebra(m, [F(3) * m.A.one()], 4)[0]
    basis = [m.embed(b) for b in m.B_basis()]
    assert is_compatible_subalgebra(m, basis, 3)[0]


@pytest.mark.parametrize("seed", range(5))
def test_B_basis_subalgebra_on_random_models(seed):
    rng = random.Random(100 + seed)
    N, K = rng.randint(1, 3), rng.randint(1, 3)
    m = MatrixTensorModel(N, K, phi_diag=[F(rng.randint(1, 5)) for _ in range(N * K)])
    assert is_compatible_subalgebra(m, [m.embed(b) for b in m.B_basis()], 2)[0]


def test_B_basis_subalgebra_freegroup():
    fg = FreeGroupModel()
    assert is_compatible_subalgebra(fg, fg.B_basis(1), 3)[0]


def test_subalgebra_off_B_fails_under_corrupted_phi():
    m = corrupted_matrix_model(3, 2)
    lower, upper = shift_matrices(3)
    # shift (x) 1 lies inside B, where phi and phi o E agree by definition
    assert is_compatible_subalgebra(m, [m.embed(lower), m.embed(upper)], 3)[0]
    ok, dev, bad = is_compatible_subalgebra(m, [m.embed(lower), Matrix.unit(6, 0, 0)], 2)
    assert not ok and dev > 0 and bad == (1,)


def test_scalar_valued_property():
    m = MatrixTensorModel(2, 2)
    c = F(-3, 2)
    alphas, bad = has_scalar_valued_property(m, c * m.A.one(), 5)
    assert alphas == [c ** n for n in range(1, 6)] and bad is None
    model, x, _ = shift_example_elements(3)
    assert has_scalar_valued_property(model, x, 4) == (None, 1)


def test_scalar_valued_property_of_central_involution():
    m = MatrixTensorModel(2, 2)
    x = m.tensor(m.B.one(), flip())
    alphas, _ = has_scalar_valued_property(m, x, 6)
    assert alphas == [0, 1, 0, 1, 0, 1]


def test_B_centrality():
    m = MatrixTensorModel(3, 2)
    assert is_B_central(m, m.A.one()) == (True, None)
    assert is_B_central(m, m.tensor(m.B.one(), Matrix([[F(1), F(2)], [F(3), F(4)]])))[0]
    lower, _ = shift_matrices(3)
    ok, b = is_B_central(m, m.embed(lower))
    assert not ok
    assert lower * b != b * lower


def test_theorem_with_traceless_involution():
    m = corrupted_matrix_model(2, 2)
    x0 = m.tensor(m.B.one(), flip())
    rep = verify_compatible_subalgebra_theorem(m, x0, 5)
    assert rep.hypotheses_hold and rep.conclusion_checked
    assert rep.conclusion_holds and rep.max_deviation == 0 and rep.words_checked > 0


def test_theorem_flags_failed_hypothesis():
    m = MatrixTensorModel(3, 2)
    lower, _ = shift_matrices(3)
    rep = verify_compatible_subalgebra_theorem(m, m.embed(lower), 3)
    assert not rep.central and not rep.hypotheses_hold
    assert not rep.conclusion_checked and rep.conclusion_holds is None


def test_theorem_unit():
    m = corrupted_matrix_model(2, 2)
    rep = verify_compatible_subalgebra_theorem(m, m.A.one(), 4)
    assert rep.hypotheses_hold and rep.conclusion_holds


@pytest.mark.parametrize("seed", range(10))
def test_theorem_on_random_circulants(seed):
    rng = random.Random(seed)
    m = corrupted_matrix_model(2, 2)
    x0 = m.tensor(m.B.one(), circulant([F(rng.randint(-3, 3)) for _ in range(2)]))
    rep = verify_compatible_subalgebra_theorem(m, x0, 6, rng=rng)
    assert rep.hypotheses_hold
    assert rep.conclusion_holds and rep.max_deviation == 0


def test_weighted_phi_can_break_the_power_hypothesis():
    m = corrupted_matrix_model(2, 2)
    x0 = m.tensor(m.B.one(), Matrix([[F(1), F(0)], [F(0), F(0)]]))
    rep = verify_compatible_subalgebra_theorem(m, x0, 3)
    assert rep.central and rep.scalar_valued and not rep.power_compatible
    assert not rep.conclusion_checked


def test_mixed_power_corpus_size():
    m = MatrixTensorModel(2, 2)
    x0 = m.A.one()
    # compositions of 1..3: 1 + 2 + 4 = 7, all basis picks: 4 + (16 + 4) + (64 + 2*16 + 4)
    full = list(mixed_power_corpus(m, x0, 3, size=None))
    assert len(full) == 4 + 16 + 4 + 64 + 32 + 4
    assert len(list(mixed_power_corpus(m, x0, 3, size=2))) == 2 * 7
