"""Seeded numerical probes: sup-norm estimation, blowup scans, dichotomy
classification, and regularity factors.

Every probe is deterministic: sample i of a run with seed s is drawn from its
own generator seeded by s+i, so serial and parallel schedules agree and rerun
reports match bit for bit.  Estimates are always lower bounds witnessed by a
stored argmax point; nothing here certifies a supremum.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .freealg import BudgetExceededError, FreePolynomial, Word, left_divide, words_of_size
from .mattuple import MatrixTuple, eval_poly, eval_word
from .ncdiff import nc_eval
from .opball import OperatorBall, Pencil, membership, pencil_eval
from .realize import IllConditionedError, Realization

MULTISTART_MARGINS = (0.5, 0.1, 0.01, 0.001)
CLIMB_FLOOR = 1e-6
INITIAL_STEP = 0.1
MIN_STEP = 1e-6
REGULARITY_WORD_BUDGET = 10**4
BOUNDARY_THRESHOLD = 1.0 - 1e-6
# corner-approach ladder injected into bidisk level-1 multistarts; the deeper
# rungs are left to hill climbing so divergence shows up as climb growth
INJECTION_EPS = (0.1, 0.045, 0.014)


def corner_path(eps: float) -> tuple[complex, complex]:
    """The builtin path (1-eps^2+i*eps, 1-eps^2-i*eps) toward the corner (1,1).

    Each coordinate has squared modulus 1 - eps^2 + eps^4 < 1, so the path
    stays strictly inside the bidisk while the denominator x1+x2-2 = -2 eps^2
    collapses quadratically.
    """
    x1 = complex(1.0 - eps * eps, eps)
    return (x1, x1.conjugate())


def sample_in_ball(ball: OperatorBall, n: int, margin: float, rng: np.random.Generator) -> MatrixTuple:
    """A Gaussian draw rescaled so that ||Q(X)|| = 1 - margin."""
    if not 0.0 < margin < 1.0:
        raise ValueError(f"margin must be in (0, 1), got {margin}")
    if n < 1:
        raise ValueError(f"level must be >= 1, got {n}")
    d = ball.d
    for _ in range(100):
        raw = rng.standard_normal((d, n, n)) + 1j * rng.standard_normal((d, n, n))
        x = MatrixTuple(raw)
        s = ball.norm_at(x)
        if s > 0.0:
            return x.scale((1.0 - margin) / s)
    raise RuntimeError("100 degenerate all-zero draws in a row; rng is broken")


@dataclass(frozen=True)
class TrajectoryRow:
    iteration: int
    label: str
    value: float
    boundary_distance: float


@dataclass
class ProbeReport:
    """Deterministic record of one sup-norm search.

    ``settled`` is a heuristic: False when the running best kept growing as
    samples approached the boundary or while climbing, which is the numerical
    signature of an unbounded target.  ``best_value`` is only ever a lower
    bound for the true supremum.
    """

    target: str
    ball: str
    level: int
    budget: int
    seed: int
    best_value: float = 0.0
    argmax: MatrixTuple | None = None
    trajectory: list[TrajectoryRow] = field(default_factory=list)
    evaluations: int = 0
    failures: int = 0
    settled: bool = True
    margin_best: dict = field(default_factory=dict)


def _target_norm(f, x: MatrixTuple) -> float:
    return float(np.linalg.norm(nc_eval(f, x), 2))


def _nearest_margin(distance: float) -> float:
    scale = np.log10(max(distance, 1e-12))
    return min(MULTISTART_MARGINS, key=lambda m: abs(np.log10(m) - scale))


def estimate_sup(
    f,
    ball: OperatorBall,
    n: int,
    budget: int,
    seed: int,
    target_label: str | None = None,
    margins: tuple[float, ...] | None = None,
) -> ProbeReport:
    """Estimate sup ||f(X)|| over level-n points of the ball.

    Spends half the budget on a random multistart over the margin schedule
    (0.5, 0.1, 0.01, 0.001), plus a deterministic corner-path pool on the
    level-1 bidisk, then hill climbs from the best point by perturbing one
    real or imaginary entry at a time with rescale-to-membership projection
    and step halving from 0.1 down to 1e-6.  Evaluation failures are counted
    and skipped.  The report is reproducible bit for bit from (seed, budget).

    Passing ``margins`` replaces the multistart margin schedule.
    """
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    schedule = MULTISTART_MARGINS if margins is None else tuple(margins)
    if not schedule:
        raise ValueError("margin schedule must be nonempty")
    from .opball import ball_shorthand

    report = ProbeReport(
        target=target_label if target_label is not None else _describe(f),
        ball=ball_shorthand(ball) or f"pencil(d={ball.d},p={ball.pencil.p},q={ball.pencil.q})",
        level=n,
        budget=budget,
        seed=seed,
    )

    def consider(x: MatrixTuple, label: str) -> float | None:
        verdict = membership(ball, x)
        try:
            value = _target_norm(f, x)
        except (IllConditionedError, np.linalg.LinAlgError):
            report.failures += 1
            return None
        report.trajectory.append(TrajectoryRow(report.evaluations, label, value, verdict.distance))
        report.evaluations += 1
        if value > report.best_value or report.argmax is None:
            report.best_value = value
            report.argmax = x
        return value

    # multistart phase
    n_samples = max(budget // 2, 1)
    pool: list[tuple[MatrixTuple, str]] = []
    if ball.d == 2 and n == 1:
        for eps in INJECTION_EPS:
            point = MatrixTuple.scalars(corner_path(eps))
            if membership(ball, point).is_inside:
                pool.append((point, f"path:{eps:g}"))
    for i in range(max(n_samples - len(pool), 0)):
        margin = schedule[i % len(schedule)]
        rng = np.random.default_rng(seed + i)
        pool.append((sample_in_ball(ball, n, margin, rng), f"m{margin:g}"))
    for x, label in pool[:n_samples]:
        value = consider(x, label)
        if value is not None:
            bin_key = _nearest_margin(membership(ball, x).distance)
            report.margin_best[bin_key] = max(report.margin_best.get(bin_key, 0.0), value)
    multistart_best = report.best_value

    # hill-climbing phase from the multistart argmax
    remaining = budget - report.evaluations
    if report.argmax is not None and remaining > 0:
        current = report.argmax
        current_value = report.best_value
        step = INITIAL_STEP
        while remaining > 0 and step >= MIN_STEP:
            improved = False
            for j in range(ball.d):
                for r in range(n):
                    for c in range(n):
                        for part in (1.0, 1j):
                            for direction in (1.0, -1.0):
                                if remaining <= 0:
                                    break
                                entries = np.array(current.entries)
                                entries[j, r, c] += direction * step * part
                                candidate = MatrixTuple(entries)
                                s = ball.norm_at(candidate)
                                if s > BOUNDARY_THRESHOLD:
                                    if s == 0.0:
                                        continue
                                    candidate = candidate.scale(BOUNDARY_THRESHOLD / s)
                                value = consider(candidate, f"climb:{step:g}")
                                remaining -= 1
                                if value is not None and value > current_value:
                                    current = candidate
                                    current_value = value
                                    improved = True
            if not improved:
                step *= 0.5

    # settled heuristic: margin ladder ratio and climb growth
    near = report.margin_best.get(0.001, 0.0)
    mid = report.margin_best.get(0.1, 0.0)
    ladder_divergent = mid > 0.0 and near > 10.0 * mid
    climb_divergent = multistart_best > 0.0 and report.best_value > 1.25 * multistart_best
    report.settled = not (ladder_divergent or climb_divergent)
    return report


def _describe(f) -> str:
    if isinstance(f, FreePolynomial):
        return f"poly:{f}"
    if isinstance(f, Realization):
        return f"realization(d={f.d},m={f.m},{f.mode})"
    return type(f).__name__


@dataclass(frozen=True)
class BlowupRow:
    eps: float
    value: complex | None  # scalar value when the target returns 1x1
    norm: float
    boundary_distance: float


@dataclass(frozen=True)
class BlowupReport:
    rows: tuple[BlowupRow, ...]
    monotone: bool  # norms strictly increasing in the listed eps order


def blowup_scan(g, path, eps_list, ball: OperatorBall) -> BlowupReport:
    """Evaluate g along a scalar path, verifying strict membership first.

    ``g`` is an evaluable nc function or a callable taking the scalar tuple;
    ``path`` maps eps to a scalar tuple (use corner_path for the builtin).
    """
    rows = []
    for eps in eps_list:
        point = tuple(path(eps))
        x = MatrixTuple.scalars(point)
        verdict = membership(ball, x)
        if not verdict.is_inside:
            raise ValueError(f"path point at eps={eps:g} is not strictly inside the ball (norm {verdict.norm:.17g})")
        if isinstance(g, FreePolynomial) or hasattr(g, "eval"):
            value = nc_eval(g, x)
        elif callable(g):
            value = g(point)
        else:
            raise TypeError(f"cannot evaluate an object of type {type(g).__name__}")
        value = np.atleast_2d(np.asarray(value, dtype=complex))
        norm = float(np.linalg.norm(value, 2))
        scalar = complex(value[0, 0]) if value.shape == (1, 1) else None
        rows.append(BlowupRow(float(eps), scalar, norm, verdict.distance))
    monotone = all(rows[i + 1].norm > rows[i].norm for i in range(len(rows) - 1))
    return BlowupReport(tuple(rows), monotone)


@dataclass(frozen=True)
class DichotomyResult:
    """Sampled classification of where a map sends a ball.

    Mixed is numerical evidence about the sampled hypothesis set, never a
    refutation of the interior/boundary alternative itself.
    """

    kind: str  # "AllInterior" | "AllBoundary" | "Mixed"
    max_norm: float
    min_norm: float
    samples: int


def dichotomy_scan(
    maps,
    source_ball: OperatorBall,
    target_pencil: Pencil,
    samples: int,
    seed: int,
    levels=(1, 2, 3),
) -> DichotomyResult:
    """Classify ||P(F(X))|| over sampled X as all-interior, all-boundary, or mixed."""
    maps = list(maps)
    if len(maps) != target_pencil.d:
        raise ValueError(f"map has {len(maps)} components but the target pencil has d={target_pencil.d}")
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    norms = []
    for i in range(samples):
        rng = np.random.default_rng(seed + i)
        level = levels[i % len(levels)]
        margin = MULTISTART_MARGINS[(i // len(levels)) % len(MULTISTART_MARGINS)]
        x = sample_in_ball(source_ball, level, margin, rng)
        image = MatrixTuple(np.array([nc_eval(component, x) for component in maps]))
        norms.append(float(np.linalg.norm(pencil_eval(target_pencil, image), 2)))
    max_norm, min_norm = max(norms), min(norms)
    if max_norm < BOUNDARY_THRESHOLD:
        kind = "AllInterior"
    elif min_norm > BOUNDARY_THRESHOLD:
        kind = "AllBoundary"
    else:
        kind = "Mixed"
    return DichotomyResult(kind, max_norm, min_norm, samples)


def builtin_dichotomy_case(name: str):
    """The named builtin case: (maps, source ball, target pencil)."""
    from .opball import polydisk

    ball = polydisk(2)
    z1 = FreePolynomial.generator(2, 1)
    z2 = FreePolynomial.generator(2, 2)
    if name == "half":
        return (0.5 * z1, 0.5 * z2), ball, ball.pencil
    if name == "identity":
        return (z1, z2), ball, ball.pencil
    if name == "boundary":
        one = FreePolynomial.constant(2, 1.0)
        zero = FreePolynomial.zero(2)
        return (one, zero), ball, ball.pencil
    raise ValueError(f"unknown dichotomy case {name!r} (use half, identity, or boundary)")


class MonomialRow:
    """The row [X^{w_1} ... X^{w_k}] over all words of one size, length-lex."""

    __slots__ = ("d", "words")

    def __init__(self, d: int, size: int):
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "words", tuple(words_of_size(d, size)))

    def __setattr__(self, name, value):
        raise AttributeError("MonomialRow is immutable")

    def eval(self, x: MatrixTuple) -> np.ndarray:
        return np.hstack([eval_word(x, w) for w in self.words])


class RemainderColumn:
    """col(g_w(X)) over all words of one size, sharing a single resolvent solve."""

    __slots__ = ("base", "size", "words")

    def __init__(self, base: Realization, size: int):
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "size", size)
        object.__setattr__(self, "words", tuple(words_of_size(base.d, size)))

    def __setattr__(self, name, value):
        raise AttributeError("RemainderColumn is immutable")

    @property
    def d(self) -> int:
        return self.base.d

    def eval(self, x: MatrixTuple) -> np.ndarray:
        values = self.base.remainder_values(x, self.words)
        return np.vstack([values[w] for w in self.words])


class QuotientColumn:
    """col(f_w(X)) of left-division quotients of a polynomial with no low words."""

    __slots__ = ("d", "quotients", "words")

    def __init__(self, p: FreePolynomial, size: int):
        quotients = left_divide(p, size)
        object.__setattr__(self, "d", p.d)
        object.__setattr__(self, "words", tuple(quotients.keys()))
        object.__setattr__(self, "quotients", quotients)

    def __setattr__(self, name, value):
        raise AttributeError("QuotientColumn is immutable")

    def eval(self, x: MatrixTuple) -> np.ndarray:
        return np.vstack([eval_poly(self.quotients[w], x) for w in self.words])


@dataclass(frozen=True)
class RegularityReport:
    row: ProbeReport
    col: ProbeReport

    @property
    def row_factor(self) -> float:
        return self.row.best_value

    @property
    def col_factor(self) -> float:
        return self.col.best_value


def regularity_factors(f, order: int, ball: OperatorBall, n: int, budget: int, seed: int) -> RegularityReport:
    """Estimate sup||row(X^w)|| and sup||col(g_w(X))|| over words of size N.

    Each factor gets the full sample budget.  The column stacks remainder
    factors for a realization, or left-division quotients for a polynomial
    whose words all have size >= N.
    """
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    if ball.d**order > REGULARITY_WORD_BUDGET:
        raise BudgetExceededError(f"{ball.d}^{order} words exceed the budget {REGULARITY_WORD_BUDGET}")
    row_target = MonomialRow(ball.d, order)
    if isinstance(f, Realization):
        col_target = RemainderColumn(f, order)
    elif isinstance(f, FreePolynomial):
        col_target = QuotientColumn(f, order)
    else:
        raise TypeError(f"regularity_factors supports polynomials and realizations, got {type(f).__name__}")
    row_report = estimate_sup(row_target, ball, n, budget, seed, target_label=f"row(X^w,|w|={order})")
    col_report = estimate_sup(col_target, ball, n, budget, seed, target_label=f"col(g_w,|w|={order})")
    return RegularityReport(row=row_report, col=col_report)
