"""DIRECT (dividing rectangles) global search over the unit box.

Deterministic and derivative-free: the unit hypercube is recursively
trisected, and at each round the potentially-optimal rectangles -- those on
the lower convex hull of (diameter, center value) -- are subdivided along
their longest sides. No randomness anywhere, so identical budgets and
objectives reproduce identical sample sequences bit for bit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

# balance parameter for the potential-optimality test
DEFAULT_EPS = 1e-4


class ObjectiveEvaluationError(RuntimeError):
    """The objective returned a non-finite value."""


@dataclass
class DirectResult:
    """Outcome of a DIRECT run, in maximization orientation."""

    point: np.ndarray
    value: float
    evaluations: int
    samples: list[tuple[np.ndarray, float]]


class _Rect:
    """Hyperrectangle tracked by center, per-dimension trisection counts, and value.

    Side length along dimension i is 3**-levels[i]; integer bookkeeping keeps
    size comparisons exact.
    """

    __slots__ = ("center", "levels", "value", "index", "diameter")

    def __init__(self, center: np.ndarray, levels: tuple[int, ...], value: float, index: int):
        self.center = center
        self.levels = levels
        self.value = value
        self.index = index
        self.diameter = 0.5 * math.sqrt(math.fsum(9.0 ** (-l) for l in levels))


def _potentially_optimal(rects: list[_Rect], f_min: float, eps: float) -> list[_Rect]:
    """Rectangles on the lower convex hull of (diameter, value), minimization sense."""
    # one representative per diameter: the lowest value, ties to the oldest
    best_by_diam: dict[float, _Rect] = {}
    for r in rects:
        cur = best_by_diam.get(r.diameter)
        if cur is None or r.value < cur.value or (r.value == cur.value and r.index < cur.index):
            best_by_diam[r.diameter] = r
    reps = sorted(best_by_diam.values(), key=lambda r: r.diameter)

    chosen = []
    m = len(reps)
    for j, rj in enumerate(reps):
        dj, fj = rj.diameter, rj.value
        left = -math.inf
        for i in range(j):
            left = max(left, (fj - reps[i].value) / (dj - reps[i].diameter))
        right = math.inf
        for i in range(j + 1, m):
            right = min(right, (reps[i].value - fj) / (reps[i].diameter - dj))
        if left > right:
            continue
        if j < m - 1:  # some larger rectangle exists, so the eps guard applies
            if f_min != 0.0:
                if (f_min - fj) / abs(f_min) + dj * right / abs(f_min) < eps:
                    continue
            elif fj > dj * right:
                continue
        chosen.append(rj)
    return chosen


def direct_maximize(
    objective: Callable[[np.ndarray], float],
    dim: int,
    eval_budget: int,
    eps: float = DEFAULT_EPS,
) -> DirectResult:
    """Maximize a black-box objective over [0,1]^dim with at most eval_budget calls.

    Returns the best sampled point together with every (point, value) pair in
    evaluation order. Raises ObjectiveEvaluationError on non-finite values.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if eval_budget < 1:
        raise ValueError("eval_budget must be >= 1")

    samples: list[tuple[np.ndarray, float]] = []

    def evaluate(z: np.ndarray) -> float:
        value = float(objective(z))
        if not math.isfinite(value):
            raise ObjectiveEvaluationError(f"objective returned {value} at {z.tolist()}")
        samples.append((z.copy(), value))
        return -value  # minimize internally

    center = np.full(dim, 0.5)
    best_f = evaluate(center)
    best_z = center.copy()
    rects = [_Rect(center, (0,) * dim, best_f, 0)]
    next_index = 1

    while len(samples) < eval_budget:
        selected = _potentially_optimal(rects, best_f, eps)
        if not selected:
            break
        progressed = False
        for rect in sorted(selected, key=lambda r: (r.diameter, r.index)):
            min_level = min(rect.levels)
            long_dims = [i for i, l in enumerate(rect.levels) if l == min_level]
            if len(samples) + 2 * len(long_dims) > eval_budget:
                continue  # cannot afford a full division of this rectangle
            delta = 3.0 ** (-(min_level + 1))

            # sample the two offset centers for every longest dimension
            trial_values: list[tuple[float, int, float, float, np.ndarray, np.ndarray]] = []
            for d in long_dims:
                z_plus = rect.center.copy()
                z_plus[d] += delta
                z_minus = rect.center.copy()
                z_minus[d] -= delta
                f_plus = evaluate(z_plus)
                f_minus = evaluate(z_minus)
                for f, z in ((f_plus, z_plus), (f_minus, z_minus)):
                    if f < best_f:
                        best_f, best_z = f, z.copy()
                trial_values.append((min(f_plus, f_minus), d, f_plus, f_minus, z_plus, z_minus))

            # split best-w dimensions first so good directions keep larger pieces
            trial_values.sort(key=lambda t: (t[0], t[1]))
            levels = list(rect.levels)
            for _, d, f_plus, f_minus, z_plus, z_minus in trial_values:
                levels[d] += 1
                snapshot = tuple(levels)
                rects.append(_Rect(z_plus, snapshot, f_plus, next_index))
                next_index += 1
                rects.append(_Rect(z_minus, snapshot, f_minus, next_index))
                next_index += 1
            rect.levels = tuple(levels)
            rect.diameter = 0.5 * math.sqrt(math.fsum(9.0 ** (-l) for l in rect.levels))
            progressed = True
        if not progressed:
            break  # every selected division would exceed the budget

    return DirectResult(
        point=best_z,
        value=-best_f,
        evaluations=len(samples),
        samples=samples,
    )
