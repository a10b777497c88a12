"""Difference-differential calculus for nc functions via block evaluation.

Everything rests on one structural fact: evaluating an nc function at the
upper-triangular tuple  X_j = [[a_j, h_j], [0, b_j]]  yields

    f(X) = [[f(a), Df(a,b)[h]], [0, f(b)]],

so first-order difference operators are read off the (1,2) corner of an
ordinary evaluation, with no symbolic differentiation and no finite
difference noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .freealg import (
    BudgetExceededError,
    FreePolynomial,
    homogeneous_component,
    left_divide,
    words_of_size,
)
from .mattuple import MatrixTuple, eval_poly, eval_word
from .realize import Realization

COALESCE_TOL = 1e-12
TT_WORD_BUDGET = 10**5


def nc_eval(f, x: MatrixTuple) -> np.ndarray:
    """Evaluate a polynomial, realization, or any object with .eval(x)."""
    if isinstance(f, FreePolynomial):
        return eval_poly(f, x)
    if hasattr(f, "eval"):
        return f.eval(x)
    raise TypeError(f"cannot evaluate an object of type {type(f).__name__}")


def scalar_eval(f, point) -> complex:
    """Evaluate at a scalar (level-1) point."""
    return complex(nc_eval(f, MatrixTuple.scalars(point))[0, 0])


def pair_point(a, b, h) -> MatrixTuple:
    """The 2x2 upper-triangular tuple with diagonal (a, b) and corner h."""
    a, b, h = list(a), list(b), list(h)
    if not len(a) == len(b) == len(h):
        raise ValueError(f"tuple length mismatch: {len(a)}, {len(b)}, {len(h)}")
    d = len(a)
    out = np.zeros((d, 2, 2), dtype=complex)
    for j in range(d):
        out[j, 0, 0] = complex(a[j])
        out[j, 0, 1] = complex(h[j])
        out[j, 1, 1] = complex(b[j])
    return MatrixTuple(out)


def delta_first(f, x, h) -> complex:
    """The first difference Df(0, x)[h], read off a 2x2 block evaluation.

    For a realization this stays well defined for every direction h as long
    as the base point x lies strictly inside the ball, because the block
    resolvent is triangular with invertible diagonal.
    """
    x = list(x)
    value = nc_eval(f, pair_point([0.0] * len(x), x, h))
    return complex(value[0, 1])


def pair_derivative(f, a, b, h) -> complex:
    """Df(a, b)[h] for scalar base points a, b."""
    return complex(nc_eval(f, pair_point(a, b, h))[0, 1])


def d1_difference_quotient(f, x: complex, y: complex) -> complex:
    """(f(x) - f(y))/(x - y) for one-variable f, stable under coalescence.

    Below a separation of 1e-12 the quotient is replaced by the (1,2) entry
    of f([[x, 1], [0, y]]), which equals the quotient identically and tends
    to the derivative as y -> x.
    """
    x, y = complex(x), complex(y)
    if abs(x - y) > COALESCE_TOL:
        return (scalar_eval(f, (x,)) - scalar_eval(f, (y,))) / (x - y)
    return pair_derivative(f, (x,), (y,), (1.0,))


def gleason_split(f, x) -> tuple[complex, complex]:
    """Coefficients (g1, g2) with f(x) = f(0,0) + g1 x1 + g2 x2 on the bidisk.

    g1 freezes the second coordinate at 0, g2 sweeps it:
        g1 = (f(x1, 0) - f(0, 0)) / x1,   g2 = (f(x1, x2) - f(x1, 0)) / x2,
    with the limit (a block derivative) substituted below modulus 1e-12.
    """
    x1, x2 = complex(x[0]), complex(x[1])
    f00 = scalar_eval(f, (0.0, 0.0))
    fx10 = scalar_eval(f, (x1, 0.0))
    if abs(x1) > COALESCE_TOL:
        g1 = (fx10 - f00) / x1
    else:
        g1 = pair_derivative(f, (0.0, 0.0), (0.0, 0.0), (1.0, 0.0))
    if abs(x2) > COALESCE_TOL:
        g2 = (scalar_eval(f, (x1, x2)) - fx10) / x2
    else:
        g2 = pair_derivative(f, (x1, 0.0), (x1, 0.0), (0.0, 1.0))
    return g1, g2


@dataclass(frozen=True)
class TTReport:
    """Outcome of a truncation identity check at one point."""

    lhs: np.ndarray
    rhs: np.ndarray
    defect: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.defect <= self.tol


def tt_check(f, x: MatrixTuple, order: int, tol: float = 1e-9) -> TTReport:
    """Verify f(X) = sum_{|v|<N} c_v X^v + sum_{|w|=N} X^w g_w(X) at X.

    Works for realizations (g_w are remainder factors) and for polynomials
    (g_w come from exact left division of the high part).  Enumerates d^N
    words, budgeted at 1e5.
    """
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    d = x.d
    if d**order > TT_WORD_BUDGET:
        raise BudgetExceededError(f"{d}^{order} words exceed the budget {TT_WORD_BUDGET}")
    lhs = nc_eval(f, x)
    n = x.n
    rhs = np.zeros((n, n), dtype=complex)
    if isinstance(f, FreePolynomial):
        if f.d != d:
            raise ValueError(f"polynomial in d={f.d} variables checked at a {d}-tuple")
        for k in range(order):
            rhs += eval_poly(homogeneous_component(f, k), x)
        high = FreePolynomial(d, {w: c for w, c in f.terms.items() if len(w) >= order})
        if high:
            for word, quotient in left_divide(high, order).items():
                if quotient:
                    rhs += eval_word(x, word) @ eval_poly(quotient, x)
    elif isinstance(f, Realization):
        if f.d != d:
            raise ValueError(f"realization over d={f.d} checked at a {d}-tuple")
        for k in range(order):
            rhs += f.homogeneous_value(x, k)
        remainders = f.remainder_values(x, list(words_of_size(d, order)))
        for word, tail in remainders.items():
            rhs += eval_word(x, word) @ tail
    else:
        raise TypeError(f"tt_check supports polynomials and realizations, got {type(f).__name__}")
    defect = float(np.linalg.norm(lhs - rhs, 2))
    return TTReport(lhs=lhs, rhs=rhs, defect=defect, tol=tol)
