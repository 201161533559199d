"""Coefficient algebras and concrete probability-space models.

Algebra elements are plain Python values supporting ``+``, ``-``, ``*`` and
scalar multiplication: ``Fraction`` (or float/complex) for scalars,
:class:`Matrix` for matrix algebras, :class:`GroupAlgebraElement` for the
group algebra of the free group on ``a, b``.  An algebra object only supplies
the structural constants (zero, unit, closeness test, scalar detection).

Two models realise a pair (phi, E) on the same ambient algebra:

* :class:`MatrixTensorModel` -- ``A = M_N (x) M_K``, ``B = M_N (x) 1``, ``E`` the
  normalised partial trace over the second factor, ``phi`` the normalised
  trace (or a weighted diagonal trace, to produce incompatible functionals).
* :class:`FreeGroupModel` -- ``A = C[F_2]``, ``B = C[<h>]`` with
  ``h = a b a^-1 b^-1``, ``E`` the coefficient projection onto powers of ``h``
  and ``phi`` the coefficient of the identity.
"""

from __future__ import annotations

import copy
import random
from fractions import Fraction
from numbers import Number
from typing import Callable, Iterable, Sequence

FLOAT_TOL = 1e-10


class CapacityError(Exception):
    """An element falls outside the representable range of a model."""


def _is_number(x) -> bool:
    return isinstance(x, Number)


def _abs(x) -> float:
    return abs(complex(x)) if isinstance(x, complex) else abs(float(x))


class ScalarField:
    """The ground field; exact rationals unless ``exact=False``."""

    is_scalar = True

    def __init__(self, exact: bool = True):
        self.exact = exact
        self.tol = 0 if exact else FLOAT_TOL

    def zero(self):
        return Fraction(0) if self.exact else 0.0

    def one(self):
        return Fraction(1) if self.exact else 1.0

    def scalar(self, c):
        return c

    def as_scalar(self, x):
        return x

    def is_close(self, a, b) -> bool:
        return a == b if self.exact else _abs(a - b) <= self.tol

    def norm(self, x) -> float:
        return _abs(x)

    def coords(self, x) -> dict:
        return {(): x} if x != 0 else {}

    def __eq__(self, other):
        return isinstance(other, ScalarField) and other.exact == self.exact

    def __hash__(self):
        return hash(("scalar", self.exact))

    def __repr__(self):
        return f"ScalarField(exact={self.exact})"


SCALARS = ScalarField()


class Matrix:
    """Immutable dense square matrix over any numeric type."""

    __slots__ = ("rows", "n", "_hash")

    def __init__(self, rows: Iterable[Iterable]):
        self.rows = tuple(tuple(r) for r in rows)
        self.n = len(self.rows)
        if any(len(r) != self.n for r in self.rows):
            raise ValueError("matrix must be square")
        self._hash = None

    @classmethod
    def identity(cls, n: int, one=Fraction(1)) -> "Matrix":
        z = one - one
        return cls([[one if i == j else z for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, n: int, zero=Fraction(0)) -> "Matrix":
        return cls([[zero] * n for _ in range(n)])

    @classmethod
    def unit(cls, n: int, i: int, j: int, one=Fraction(1)) -> "Matrix":
        """Elementary matrix with a single ``one`` at 0-based (i, j)."""
        z = one - one
        return cls([[one if (r, c) == (i, j) else z for c in range(n)] for r in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __add__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return Matrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return Matrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self):
        return Matrix([[-a for a in r] for r in self.rows])

    def __mul__(self, other):
        if isinstance(other, Matrix):
            if other.n != self.n:
                raise ValueError(f"size mismatch {self.n} vs {other.n}")
            cols = list(zip(*other.rows))
            return Matrix([[sum(a * b for a, b in zip(r, c)) for c in cols] for r in self.rows])
        if _is_number(other):
            return Matrix([[a * other for a in r] for r in self.rows])
        return NotImplemented

    def __rmul__(self, other):
        if _is_number(other):
            return Matrix([[other * a for a in r] for r in self.rows])
        return NotImplemented

    def __eq__(self, other):
        return isinstance(other, Matrix) and self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.rows)
        return self._hash

    def __repr__(self):
        return "Matrix(" + repr([[str(a) for a in r] for r in self.rows]) + ")"

    def trace(self):
        return sum(self.rows[i][i] for i in range(self.n))

    def kron(self, other: "Matrix") -> "Matrix":
        n, k = self.n, other.n
        return Matrix(
            [[self.rows[i // k][j // k] * other.rows[i % k][j % k] for j in range(n * k)] for i in range(n * k)]
        )

    def transpose(self) -> "Matrix":
        return Matrix(zip(*self.rows))


class MatrixAlgebra:
    """``M_n`` over exact rationals (default) or floats."""

    is_scalar = False

    def __init__(self, n: int, exact: bool = True):
        if n < 1:
            raise ValueError("matrix size must be positive")
        self.n = n
        self.exact = exact
        self.tol = 0 if exact else FLOAT_TOL
        self._one = Fraction(1) if exact else 1.0

    def zero(self) -> Matrix:
        return Matrix.zeros(self.n, self._one - self._one)

    def one(self) -> Matrix:
        return Matrix.identity(self.n, self._one)

    def scalar(self, c) -> Matrix:
        return c * self.one()

    def as_scalar(self, x: Matrix):
        """Return c when x == c * identity, else None."""
        c = x.rows[0][0]
        for i in range(self.n):
            for j in range(self.n):
                target = c if i == j else 0
                if self.exact:
                    if x.rows[i][j] != target:
                        return None
                elif _abs(x.rows[i][j] - target) > self.tol:
                    return None
        return c

    def is_close(self, a: Matrix, b: Matrix) -> bool:
        if self.exact:
            return a == b
        return self.norm(a - b) <= self.tol

    def norm(self, x: Matrix) -> float:
        return max((_abs(v) for r in x.rows for v in r), default=0.0)

    def coords(self, x: Matrix) -> dict:
        return {(i, j): v for i, r in enumerate(x.rows) for j, v in enumerate(r) if v != 0}

    def basis(self) -> list[Matrix]:
        return [Matrix.unit(self.n, i, j, self._one) for i in range(self.n) for j in range(self.n)]

    def __eq__(self, other):
        return isinstance(other, MatrixAlgebra) and (other.n, other.exact) == (self.n, self.exact)

    def __hash__(self):
        return hash(("matrix", self.n, self.exact))

    def __repr__(self):
        return f"MatrixAlgebra({self.n}, exact={self.exact})"


# --- free group on a, b ------------------------------------------------------

_INV = {"a": "A", "A": "a", "b": "B", "B": "b"}


def reduce_word(word: str) -> str:
    """Freely reduce a word over a, A, b, B (capitals are inverses)."""
    out: list[str] = []
    for ch in word:
        if ch not in _INV:
            raise ValueError(f"bad letter {ch!r} in group word {word!r}")
        if out and out[-1] == _INV[ch]:
            out.pop()
        else:
            out.append(ch)
    return "".join(out)


def invert_word(word: str) -> str:
    return "".join(_INV[c] for c in reversed(word))


H_WORD = "abAB"


def h_power(word: str) -> int | None:
    """k if the reduced word equals h^k (h = a b a^-1 b^-1), else None."""
    if word == "":
        return 0
    for base, sign in ((H_WORD, 1), (invert_word(H_WORD), -1)):
        k, r = divmod(len(word), 4)
        if r == 0 and word == base * k:
            return sign * k
    return None


class GroupAlgebraElement:
    """Finitely supported sum of reduced words with scalar coefficients."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None):
        acc: dict[str, object] = {}
        for w, c in (terms.items() if isinstance(terms, dict) else (terms or ())):
            w = reduce_word(w)
            acc[w] = acc.get(w, 0) + c
        self.terms = {w: c for w, c in sorted(acc.items(), key=lambda t: (len(t[0]), t[0])) if c != 0}
        self._hash = None

    @classmethod
    def word(cls, w: str, coeff=Fraction(1)) -> "GroupAlgebraElement":
        return cls({w: coeff})

    def __add__(self, other):
        if not isinstance(other, GroupAlgebraElement):
            return NotImplemented
        t = dict(self.terms)
        for w, c in other.terms.items():
            t[w] = t.get(w, 0) + c
        return GroupAlgebraElement(t)

    def __neg__(self):
        return GroupAlgebraElement({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, GroupAlgebraElement):
            t: dict[str, object] = {}
            for u, c in self.terms.items():
                for v, d in other.terms.items():
                    w = reduce_word(u + v)
                    t[w] = t.get(w, 0) + c * d
            return GroupAlgebraElement(t)
        if _is_number(other):
            return GroupAlgebraElement({w: c * other for w, c in self.terms.items()})
        return NotImplemented

    def __rmul__(self, other):
        if _is_number(other):
            return GroupAlgebraElement({w: other * c for w, c in self.terms.items()})
        return NotImplemented

    def __eq__(self, other):
        return isinstance(other, GroupAlgebraElement) and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self.terms.items()))
        return self._hash

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*{w or 'e'}" for w, c in self.terms.items())

    def max_length(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def coefficient(self, w: str):
        return self.terms.get(reduce_word(w), Fraction(0))


class GroupAlgebra:
    """``C[F_2]`` with exact coefficients."""

    is_scalar = False
    exact = True
    tol = 0

    def zero(self):
        return GroupAlgebraElement()

    def one(self):
        return GroupAlgebraElement.word("")

    def scalar(self, c):
        return GroupAlgebraElement({"": c})

    def as_scalar(self, x: GroupAlgebraElement):
        if not x.terms:
            return Fraction(0)
        if set(x.terms) == {""}:
            return x.terms[""]
        return None

    def is_close(self, a, b) -> bool:
        return a == b

    def norm(self, x) -> float:
        return max((_abs(c) for c in x.terms.values()), default=0.0)

    def coords(self, x) -> dict:
        return dict(x.terms)

    def __eq__(self, other):
        return isinstance(other, GroupAlgebra)

    def __hash__(self):
        return hash("groupalgebra")

    def __repr__(self):
        return "GroupAlgebra(F2)"


# --- models --------------------------------------------------------------------


class ProbabilitySpaceModel:
    """An ambient algebra A with subalgebra B, conditional expectation E and
    scalar functional phi, plus named generators.

    Subclasses implement ``_E`` (returning an element of B in B's own
    representation), ``_phi`` and ``embed``.
    """

    A = None
    B = None
    scalars: ScalarField = SCALARS

    def __init__(self, generators: Sequence, names: Sequence[str] | None = None):
        self.generators = tuple(generators)
        self.names = tuple(names) if names else tuple(f"x{i}" for i in range(1, len(self.generators) + 1))
        self._phi_override: Callable | None = None
        self.label = type(self).__name__

    @property
    def s(self) -> int:
        return len(self.generators)

    def embed(self, b):
        raise NotImplementedError

    def _E(self, x):
        raise NotImplementedError

    def _phi(self, x):
        raise NotImplementedError

    def check(self, x) -> None:
        """Raise CapacityError if x is not representable."""

    def E(self, x):
        self.check(x)
        return self._E(x)

    def phi(self, x):
        self.check(x)
        if self._phi_override is not None:
            return self._phi_override(x)
        return self._phi(x)

    def phi_B(self, b):
        """phi of a B-element, through its embedding in A."""
        return self.phi(self.embed(b))

    def with_phi(self, fn: Callable, label: str | None = None) -> "ProbabilitySpaceModel":
        """Copy of the model whose scalar functional is ``fn``."""
        m = copy.copy(self)
        m._phi_override = fn
        m.label = label or f"{self.label}[phi']"
        return m

    def with_generators(self, generators: Sequence, names: Sequence[str] | None = None):
        m = copy.copy(self)
        m.generators = tuple(generators)
        m.names = tuple(names) if names else tuple(f"x{i}" for i in range(1, len(m.generators) + 1))
        return m

    def word_element(self, word: Sequence[int], mults: Sequence | None = None):
        """The A-element m_1 x_{i_1} m_2 x_{i_2} ... m_n x_{i_n} (1-based letters).

        ``mults`` are B-elements; ``None`` entries stand for the unit.
        """
        acc = self.A.one()
        for j, letter in enumerate(word):
            if not 1 <= letter <= self.s:
                raise ValueError(f"letter {letter} outside 1..{self.s}")
            m = mults[j] if mults is not None else None
            if m is not None:
                acc = acc * self.embed(m)
            acc = acc * self.generators[letter - 1]
        return acc

    def B_basis(self) -> list:
        raise NotImplementedError


def apply_E(model: ProbabilitySpaceModel, x):
    return model.E(x)


def apply_phi(model: ProbabilitySpaceModel, x):
    return model.phi(x)


class MatrixTensorModel(ProbabilitySpaceModel):
    """``M_N (x) M_K`` as (N x N) blocks of (K x K) matrices.

    ``phi_diag`` replaces the normalised trace by ``x -> sum_i d_i x_ii``
    (length N*K); leave it ``None`` for the canonical compatible trace.
    """

    def __init__(self, N: int, K: int = 2, generators: Sequence[Matrix] = (), names=None,
                 exact: bool = True, phi_diag: Sequence | None = None):
        if N < 1 or K < 1:
            raise ValueError("N and K must be positive")
        self.N, self.K = N, K
        self.A = MatrixAlgebra(N * K, exact)
        self.B = MatrixAlgebra(N, exact)
        self.scalars = ScalarField(exact)
        self.exact = exact
        one = Fraction(1) if exact else 1.0
        self._idK = Matrix.identity(K, one)
        if phi_diag is not None:
            if len(phi_diag) != N * K:
                raise ValueError("phi_diag must have N*K entries")
            phi_diag = tuple(phi_diag)
        self.phi_diag = phi_diag
        super().__init__(generators, names)
        for g in self.generators:
            self.check(g)
        self.label = f"matrix(N={N},K={K})"

    def check(self, x) -> None:
        if not isinstance(x, Matrix) or x.n != self.N * self.K:
            raise CapacityError(f"expected a {self.N * self.K}x{self.N * self.K} matrix")

    def embed(self, b: Matrix) -> Matrix:
        if not isinstance(b, Matrix) or b.n != self.N:
            raise ValueError(f"embed expects an {self.N}x{self.N} matrix")
        return b.kron(self._idK)

    def tensor(self, b: Matrix, m: Matrix) -> Matrix:
        """b (x) m for b in M_N, m in M_K."""
        return b.kron(m)

    def _E(self, x: Matrix) -> Matrix:
        K = self.K
        r = x.rows
        return Matrix(
            [[sum(r[i * K + k][j * K + k] for k in range(K)) / K for j in range(self.N)] for i in range(self.N)]
        )

    def _phi(self, x: Matrix):
        if self.phi_diag is None:
            return x.trace() / (self.N * self.K)
        return sum(d * x.rows[i][i] for i, d in enumerate(self.phi_diag))

    def B_basis(self) -> list[Matrix]:
        return self.B.basis()


def shift_matrices(N: int, exact: bool = True) -> tuple[Matrix, Matrix]:
    """Lower and upper shift matrices in M_N."""
    one = Fraction(1) if exact else 1.0
    z = one - one
    lower = Matrix([[one if i == j + 1 else z for j in range(N)] for i in range(N)])
    return lower, lower.transpose()


def shift_example_elements(N: int, K: int = 2, exact: bool = True):
    """(model, x, y) with E(x) the lower shift and E(y) the upper shift in M_N.

    x = lower (x) 1_K and y = upper (x) 1_K, so the conditional expectation
    returns the shifts exactly.
    """
    if N < 2:
        raise ValueError("shift example needs N >= 2")
    base = MatrixTensorModel(N, K, exact=exact)
    lower, upper = shift_matrices(N, exact)
    x, y = base.embed(lower), base.embed(upper)
    return base.with_generators([x, y], ["x", "y"]), x, y


class FreeGroupModel(ProbabilitySpaceModel):
    """C[F_2] with E onto C[<h>], h = a b a^-1 b^-1, and phi = tr.

    Default generators are ``a + a^-1`` and ``b + b^-1``.  Elements whose
    reduced words exceed ``max_len`` raise :class:`CapacityError`.
    """

    def __init__(self, generators: Sequence[GroupAlgebraElement] | None = None, names=None, max_len: int = 12):
        self.A = GroupAlgebra()
        self.B = GroupAlgebra()
        self.max_len = max_len
        if generators is None:
            generators = [
                GroupAlgebraElement({"a": Fraction(1), "A": Fraction(1)}),
                GroupAlgebraElement({"b": Fraction(1), "B": Fraction(1)}),
            ]
        super().__init__(generators, names)
        for g in self.generators:
            self.check(g)
        self.label = "freegroup"

    def check(self, x) -> None:
        if not isinstance(x, GroupAlgebraElement):
            raise CapacityError("expected a group-algebra element")
        if x.max_length() > self.max_len:
            raise CapacityError(f"word of reduced length {x.max_length()} exceeds cap {self.max_len}")

    def embed(self, b):
        return b

    def _E(self, x: GroupAlgebraElement) -> GroupAlgebraElement:
        return GroupAlgebraElement({w: c for w, c in x.terms.items() if h_power(w) is not None})

    def _phi(self, x: GroupAlgebraElement):
        return x.terms.get("", Fraction(0))

    def B_basis(self, max_power: int = 2) -> list[GroupAlgebraElement]:
        """h^k for |k| <= max_power (B is infinite dimensional)."""
        out = []
        for k in range(-max_power, max_power + 1):
            w = H_WORD * k if k >= 0 else invert_word(H_WORD) * (-k)
            out.append(GroupAlgebraElement.word(w))
        return out


def h_element(k: int = 1, coeff=Fraction(1)) -> GroupAlgebraElement:
    w = H_WORD * k if k >= 0 else invert_word(H_WORD) * (-k)
    return GroupAlgebraElement.word(w, coeff)


# --- random elements (reproducible via an explicit rng) -----------------------


def random_rational(rng: random.Random, lo: int = -3, hi: int = 3, dens: Sequence[int] = (1, 2, 3)) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.choice(dens))


def random_matrix(n: int, rng: random.Random, lo: int = -2, hi: int = 2, exact: bool = True,
                  dens: Sequence[int] = (1,)) -> Matrix:
    if exact:
        return Matrix([[random_rational(rng, lo, hi, dens) for _ in range(n)] for _ in range(n)])
    return Matrix([[rng.uniform(lo, hi) for _ in range(n)] for _ in range(n)])


def random_group_element(rng: random.Random, max_len: int = 3, terms: int = 3) -> GroupAlgebraElement:
    t = {}
    for _ in range(terms):
        length = rng.randint(0, max_len)
        w = "".join(rng.choice("aAbB") for _ in range(length))
        t[w] = t.get(w, 0) + random_rational(rng)
    return GroupAlgebraElement(t)


def reduced_words(max_len: int) -> list[str]:
    """Every reduced word over a, A, b, B of length <= max_len."""
    out, frontier = [""], [""]
    for _ in range(max_len):
        nxt = []
        for w in frontier:
            for ch in "aAbB":
                if w and w[-1] == _INV[ch]:
                    continue
                nxt.append(w + ch)
        out += nxt
        frontier = nxt
    return out
