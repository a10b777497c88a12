"""Transfer-function realizations of bounded nc functions on pencil balls.

A realization holds system data (A, B, C, D) over a pencil Q and an internal
multiplicity m.  Its value at a level-n point X is

    f(X) = A I_n + (B x I_n) L(X) [ 1 - (D x I_n) L(X) ]^{-1} (C x I_n),

where L(X) = I_m x Q(X) and "x" is the Kronecker product.  With Q of size
p x q the data shapes are B: 1 x (m p), C: (m q) x 1, D: (m q) x (m p).
In isometry mode the system matrix V = [[A, B], [C, D]] satisfies V*V = 1 and
f is then a complete contraction on the ball; in contraction mode only
||D|| <= 1 is required and f is merely analytic where the resolvent exists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .freealg import FreePolynomial, Word
from .mattuple import MatrixTuple, seq_matmul, seq_solve
from .opball import OperatorBall, Pencil, pencil_eval, polydisk

CONTRACTION_TOL = 1e-10
ISOMETRY_TOL = 1e-10
RESOLVENT_COND_LIMIT = 1e12


class IllConditionedError(RuntimeError):
    """The resolvent operand is numerically singular; carries ``cond``."""

    def __init__(self, cond: float):
        super().__init__(f"resolvent condition estimate {cond:.3e} exceeds {RESOLVENT_COND_LIMIT:.0e}")
        self.cond = cond


class Realization:
    """System data (A, B, C, D) over a pencil, evaluable at matrix tuples."""

    __slots__ = ("pencil", "m", "A", "B", "C", "D", "mode")

    def __init__(self, pencil: Pencil, m: int, a, b, c, d, mode: str = "contraction"):
        if m < 1:
            raise ValueError(f"m must be >= 1, got {m}")
        if mode not in ("contraction", "isometry"):
            raise ValueError(f"mode must be 'contraction' or 'isometry', got {mode!r}")
        b = np.asarray(b, dtype=complex).reshape(-1)
        c = np.asarray(c, dtype=complex).reshape(-1)
        d = np.asarray(d, dtype=complex)
        mp, mq = m * pencil.p, m * pencil.q
        if b.shape[0] != mp:
            raise ValueError(f"B must have length m*p = {mp}, got {b.shape[0]}")
        if c.shape[0] != mq:
            raise ValueError(f"C must have length m*q = {mq}, got {c.shape[0]}")
        if d.shape != (mq, mp):
            raise ValueError(f"D must be (m*q) x (m*p) = {mq} x {mp}, got {d.shape}")
        d_norm = float(np.linalg.norm(d, 2))
        if d_norm > 1.0 + CONTRACTION_TOL:
            raise ValueError(f"||D|| = {d_norm:.17g} exceeds 1; the series would not converge on the ball")
        b.setflags(write=False)
        c.setflags(write=False)
        d = d.copy()
        d.setflags(write=False)
        object.__setattr__(self, "pencil", pencil)
        object.__setattr__(self, "m", int(m))
        object.__setattr__(self, "A", complex(a))
        object.__setattr__(self, "B", b)
        object.__setattr__(self, "C", c)
        object.__setattr__(self, "D", d)
        object.__setattr__(self, "mode", mode)
        if mode == "isometry":
            v = self.system_matrix()
            defect = float(np.linalg.norm(v.conj().T @ v - np.eye(1 + mp), 2))
            if defect > ISOMETRY_TOL:
                raise ValueError(f"V*V differs from the identity by {defect:.3e}; not an isometry")

    def __setattr__(self, name, value):
        raise AttributeError("Realization is immutable")

    @property
    def d(self) -> int:
        return self.pencil.d

    def system_matrix(self) -> np.ndarray:
        """V = [[A, B], [C, D]], of shape (1 + m*q) x (1 + m*p)."""
        mp, mq = self.m * self.pencil.p, self.m * self.pencil.q
        v = np.zeros((1 + mq, 1 + mp), dtype=complex)
        v[0, 0] = self.A
        v[0, 1:] = self.B
        v[1:, 0] = self.C
        v[1:, 1:] = self.D
        return v

    def letter_matrix(self, j: int) -> np.ndarray:
        """L_j = I_m x Q_j, the pencil letter seen by the system data."""
        return np.kron(np.eye(self.m), self.pencil.coefficients[j - 1])

    def _lam(self, x: MatrixTuple) -> np.ndarray:
        return np.kron(np.eye(self.m), pencil_eval(self.pencil, x))

    def _resolvent(self, x: MatrixTuple, lam: np.ndarray) -> np.ndarray:
        """Solve [1 - (D x I_n) L(X)] R = C x I_n with a conditioning guard."""
        n = x.n
        t = np.eye(self.m * self.pencil.q * n, dtype=complex) - seq_matmul(np.kron(self.D, np.eye(n)), lam)
        cond = float(np.linalg.cond(t))
        if not np.isfinite(cond) or cond > RESOLVENT_COND_LIMIT:
            raise IllConditionedError(cond)
        return seq_solve(t, np.kron(self.C.reshape(-1, 1), np.eye(n)))

    def eval(self, x: MatrixTuple) -> np.ndarray:
        if x.d != self.d:
            raise ValueError(f"realization over d={self.d} evaluated at a {x.d}-tuple")
        lam = self._lam(x)
        res = self._resolvent(x, lam)
        n = x.n
        head = seq_matmul(np.kron(self.B.reshape(1, -1), np.eye(n)), lam)
        return self.A * np.eye(n, dtype=complex) + seq_matmul(head, res)

    def resolvent_term(self, x: MatrixTuple) -> np.ndarray:
        """[1 - (D x I_n) L(X)]^{-1} (C x I_n), of shape (m q n) x n.

        This right factor need not be bounded on the ball even when f is.
        """
        if x.d != self.d:
            raise ValueError(f"realization over d={self.d} evaluated at a {x.d}-tuple")
        return self._resolvent(x, self._lam(x))

    def _prefix_row(self, word: Word) -> np.ndarray:
        """B L_{w_1} D L_{w_2} D ... D L_{w_k}, a row of length m*q."""
        row = self.B.reshape(1, -1) @ self.letter_matrix(word.letters[0])
        for letter in word.letters[1:]:
            row = row @ self.D @ self.letter_matrix(letter)
        return row

    def power_series_coefficient(self, word: Word) -> complex:
        """c_w with f = sum_w c_w Z^w; c_empty = A."""
        if word.d != self.d:
            raise ValueError(f"word over alphabet 1..{word.d} for a realization with d={self.d}")
        if len(word) == 0:
            return self.A
        return complex((self._prefix_row(word) @ self.C)[0])

    def remainder_factor(self, word: Word) -> "RemainderFactor":
        if word.d != self.d:
            raise ValueError(f"word over alphabet 1..{word.d} for a realization with d={self.d}")
        if len(word) == 0:
            raise ValueError("remainder factors are indexed by nonempty words")
        return RemainderFactor(self, word)

    def remainder_values(self, x: MatrixTuple, words) -> dict[Word, np.ndarray]:
        """Evaluate many remainder factors at one point with a single solve."""
        res = self.resolvent_term(x)
        eye = np.eye(x.n)
        return {w: seq_matmul(np.kron(self._prefix_row(w), eye), res) for w in words}

    def homogeneous_value(self, x: MatrixTuple, k: int) -> np.ndarray:
        """The degree-k term sum_{|w|=k} c_w x^w, without enumerating words."""
        if k < 0:
            raise ValueError(f"k must be >= 0, got {k}")
        n = x.n
        if k == 0:
            return self.A * np.eye(n, dtype=complex)
        lam = self._lam(x)
        eye = np.eye(n)
        cur = seq_matmul(np.kron(self.B.reshape(1, -1), eye), lam)
        hop = seq_matmul(np.kron(self.D, eye), lam)
        for _ in range(k - 1):
            cur = seq_matmul(cur, hop)
        return seq_matmul(cur, np.kron(self.C.reshape(-1, 1), eye))

    def cesaro_value(self, x: MatrixTuple, n_terms: int) -> np.ndarray:
        """sum_{k<N} (1 - k/N) f_k(x), evaluated termwise in O(N) products."""
        if n_terms < 1:
            raise ValueError(f"n_terms must be >= 1, got {n_terms}")
        n = x.n
        out = self.A * np.eye(n, dtype=complex)
        if n_terms == 1:
            return out
        lam = self._lam(x)
        eye = np.eye(n)
        cur = seq_matmul(np.kron(self.B.reshape(1, -1), eye), lam)
        hop = seq_matmul(np.kron(self.D, eye), lam)
        c_col = np.kron(self.C.reshape(-1, 1), eye)
        for k in range(1, n_terms):
            out = out + (1.0 - k / n_terms) * seq_matmul(cur, c_col)
            cur = seq_matmul(cur, hop)
        return out

    def __repr__(self):
        return f"Realization(d={self.d}, p={self.pencil.p}, q={self.pencil.q}, m={self.m}, mode={self.mode!r})"


@dataclass(frozen=True)
class RemainderFactor:
    """The right factor g_w in  f = sum_{|v|<N} c_v Z^v + sum_{|w|=N} Z^w g_w."""

    base: Realization
    word: Word

    @property
    def d(self) -> int:
        return self.base.d

    def eval(self, x: MatrixTuple) -> np.ndarray:
        res = self.base.resolvent_term(x)
        return seq_matmul(np.kron(self.base._prefix_row(self.word), np.eye(x.n)), res)


def make_realization(pencil: Pencil, m: int, a, b, c, d, mode: str = "contraction") -> Realization:
    """Validating constructor accepting plain lists for B, C, D."""
    return Realization(pencil, m, a, b, c, d, mode)


def bidisk_witness() -> Realization:
    """The builtin bidisk realization (CLI name "ex52").

    Its scalar values are (2 x1 x2 - x1 - x2)/(x1 + x2 - 2), a complete
    contraction on the bidisk, yet the resolvent term blows up as the point
    approaches the corner (1, 1).  The system matrix is unitary.
    """
    s = 1.0 / math.sqrt(2.0)
    return Realization(
        polydisk(2).pencil,
        1,
        0.0,
        [s, s],
        [s, s],
        [[0.5, -0.5], [-0.5, 0.5]],
        mode="isometry",
    )


def bidisk_witness_closed_form(x1: complex, x2: complex) -> complex:
    """Scalar closed form of the builtin bidisk realization."""
    return (2.0 * x1 * x2 - x1 - x2) / (x1 + x2 - 2.0)


def taylor_polynomial(f: Realization, n: int) -> FreePolynomial:
    """sum_{|w|<n} c_w Z^w as an explicit polynomial (word-budgeted)."""
    from .freealg import BudgetExceededError, WORD_BUDGET, words_of_size

    total = sum(f.d**k for k in range(n))
    if total > WORD_BUDGET:
        raise BudgetExceededError(f"{total} words with size < {n} exceed the budget {WORD_BUDGET}")
    terms = {}
    for k in range(n):
        for word in words_of_size(f.d, k):
            value = f.power_series_coefficient(word)
            if value != 0:
                terms[word] = value
    return FreePolynomial(f.d, terms)


# ---------------------------------------------------------------------------
# JSON form


def realization_to_dict(f: Realization) -> dict:
    from .opball import pencil_to_dict

    def pair(v: complex) -> list[float]:
        return [float(v.real), float(v.imag)]

    return {
        "pencil": pencil_to_dict(f.pencil),
        "m": f.m,
        "A": pair(f.A),
        "B": [pair(v) for v in f.B],
        "C": [pair(v) for v in f.C],
        "D": [[pair(v) for v in row] for row in f.D],
        "mode": f.mode,
    }


def realization_from_dict(obj: dict) -> Realization:
    from .opball import pencil_from_dict

    try:
        pencil = pencil_from_dict(obj["pencil"])
        m = int(obj["m"])
        a = complex(obj["A"][0], obj["A"][1])
        b = [complex(re, im) for re, im in obj["B"]]
        c = [complex(re, im) for re, im in obj["C"]]
        d = [[complex(re, im) for re, im in row] for row in obj["D"]]
        mode = str(obj.get("mode", "contraction"))
    except (KeyError, TypeError, IndexError) as exc:
        raise ValueError(f"malformed realization object: {exc}") from exc
    return Realization(pencil, m, a, b, c, d, mode)


BUILTIN_REALIZATIONS = {"ex52": bidisk_witness}
