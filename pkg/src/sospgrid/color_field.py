"""Discrete grid, color value regimes, and per-point value/gradient data.

Every corner of the lattice {0, ..., N}^2 (N = 6 * 2^n + 6) receives one of
five affine color values (Blue < Black < Red < Green < Orange) together with
a cardinal gradient.  The stored vector is grad f; the *named* direction
(Up/Down/Left/Right) is where -grad f points.  Corner second derivatives are
f_xx = f_yy = -1/2 with all mixed derivatives zero.

The piecewise clauses are evaluated in their listed order (first match
wins), with node-index formulas like k = floor((a + 4) / 6).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from sospgrid.iter_problems import IterInstance, iter_is_solution

HALF = Fraction(1, 2)


class Color(enum.Enum):
    BLUE = "blue"
    BLACK = "black"
    RED = "red"
    GREEN = "green"
    ORANGE = "orange"


class Direction(enum.Enum):
    """Named direction of steepest descent; `.grad` is the stored grad f."""

    UP = (Fraction(0), -HALF)
    DOWN = (Fraction(0), HALF)
    LEFT = (HALF, Fraction(0))
    RIGHT = (-HALF, Fraction(0))

    @property
    def grad(self) -> tuple[Fraction, Fraction]:
        return self.value


# Color ordering: BLUE < BLACK < RED < GREEN < ORANGE at every grid point.
COLOR_ORDER = (Color.BLUE, Color.BLACK, Color.RED, Color.GREEN, Color.ORANGE)


@dataclass(frozen=True)
class GridGeometry:
    n: int

    @property
    def N(self) -> int:
        return 6 * (1 << self.n) + 6

    def in_lattice(self, a: int, b: int) -> bool:
        return 0 <= a <= self.N and 0 <= b <= self.N


@dataclass(frozen=True)
class CornerAssignment:
    value: Fraction
    direction: Direction
    color: Color

    @property
    def grad(self) -> tuple[Fraction, Fraction]:
        return self.direction.grad

    # All corners share the same pure second derivatives.
    f_xx = -HALF
    f_yy = -HALF
    f_xy = Fraction(0)


def regime_value(color: Color, a, b, N: int) -> Fraction:
    """Affine value of a color regime at (a, b) on the N-grid."""
    a = Fraction(a)
    b = Fraction(b)
    if color is Color.BLUE:
        return 10**4 * N - a - b
    if color is Color.BLACK:
        return (10**6 + 1) * N + a - b
    if color is Color.RED:
        return 10**4 * (10**4 - 2) * N - a + b
    if color is Color.GREEN:
        return 10**15 * N + a - b
    if color is Color.ORANGE:
        return 10**16 * N - a + b
    raise ValueError(f"unknown color {color!r}")


def node_sets(inst: IterInstance) -> tuple[frozenset[int], frozenset[int]]:
    """(Columns, Solutions): moving nodes, and nodes that solve the instance.

    Columns = {k : C(k) != k};
    Solutions = {k : C(k) < k or (C(k) > k and C(C(k)) = C(k))}.
    """
    columns = frozenset(k for k in range(1, inst.size + 1) if inst.C(k) != k)
    solutions = frozenset(k for k in range(1, inst.size + 1) if iter_is_solution(inst, k))
    return columns, solutions


def _grid_color(inst: IterInstance, columns: frozenset[int], a: int, b: int) -> Color:
    size = inst.size
    N = 6 * size + 6
    k4 = (a + 4) // 6
    in_k4 = 1 <= k4 <= size

    # Blue clauses.
    if in_k4 and k4 in columns and 6 * k4 - 3 <= a <= 6 * k4 - 1 and 3 <= b <= 6 * k4 + 2:
        return Color.BLUE
    if b == 2 and in_k4 and k4 in columns and a == 6 * k4 - 2:
        return Color.BLUE
    k0 = a // 6
    if 1 <= k0 <= size and inst.C(k0) > k0 and inst.C(k0) in columns:
        if 6 * k0 <= a <= 6 * k0 + 2 and 6 * k0 + 1 <= b <= 6 * k0 + 2:
            return Color.BLUE
    if b % 6 in (1, 2):
        l = b // 6
        k3 = (a + 3) // 6
        if l in columns and 1 <= k3 <= size and inst.C(l) > k3 > l:
            if k3 in columns and 6 * k3 <= a <= 6 * k3 + 2:
                return Color.BLUE
            if k3 not in columns and 6 * k3 - 3 <= a <= 6 * k3 + 2:
                return Color.BLUE

    # Black clauses.
    if b == 2:
        if in_k4 and k4 in columns and 6 * k4 - 1 <= a <= 6 * k4 + 1:
            return Color.BLACK
        if in_k4 and k4 not in columns and 6 * k4 - 4 <= a <= 6 * k4 + 1:
            return Color.BLACK
        if 6 * size + 2 <= a <= 6 * size + 4:
            return Color.BLACK

    # Green clauses.
    if 2 <= a <= N and 0 <= b <= 1:
        return Color.GREEN
    if 6 * size + 5 <= a <= N and 2 <= b <= 6 * size + 4:
        return Color.GREEN

    # Orange clauses.
    if 0 <= a <= 1 and 0 <= b <= N:
        return Color.ORANGE
    if 2 <= a <= N and 6 * size + 5 <= b <= N:
        return Color.ORANGE

    return Color.RED


def _grid_direction(
    inst: IterInstance, columns: frozenset[int], solutions: frozenset[int], a: int, b: int
) -> Direction:
    size = inst.size
    N = 6 * size + 6
    k4 = (a + 4) // 6
    in_k4 = 1 <= k4 <= size

    # Up clauses.
    if 2 <= a <= N and 0 <= b <= 1:
        return Direction.UP
    if in_k4 and k4 in columns and 6 * k4 - 2 <= a <= 6 * k4 - 1 and 2 <= b <= 6 * k4 + 1:
        return Direction.UP
    if in_k4 and k4 in solutions and 6 * k4 - 2 <= a <= 6 * k4 - 1 and b == 6 * k4 + 2:
        return Direction.UP
    k0 = a // 6
    if 1 <= k0 <= size and inst.C(k0) > k0 and inst.C(k0) in columns:
        if 6 * k0 <= a <= 6 * k0 + 2 and b == 6 * k0 + 1:
            return Direction.UP
    if b % 6 == 1:
        l = b // 6
        k3 = (a + 3) // 6
        if l in columns and 1 <= k3 <= size and inst.C(l) > k3 > l:
            if k3 in columns and 6 * k3 + 1 <= a <= 6 * k3 + 2:
                return Direction.UP
            if k3 not in columns and 6 * k3 - 3 <= a <= 6 * k3 + 2:
                return Direction.UP
        if 1 <= l <= size and in_k4 and k4 in columns and inst.C(l) >= k4 > l and a == 6 * k4 - 3:
            return Direction.UP

    # Left clauses.
    if b == 2:
        if in_k4 and k4 in columns and 6 * k4 <= a <= 6 * k4 + 1:
            return Direction.LEFT
        if in_k4 and k4 not in columns and 6 * k4 - 4 <= a <= 6 * k4 + 1:
            return Direction.LEFT
        if 6 * size + 2 <= a <= 6 * size + 4:
            return Direction.LEFT
    if 6 * size + 5 <= a <= N and 2 <= b <= 6 * size + 4:
        return Direction.LEFT

    # Down clauses.
    if 2 <= a <= N and 6 * size + 5 <= b <= N:
        return Direction.DOWN
    if a == 6 * size + 4 and 3 <= b <= 6 * size + 4:
        return Direction.DOWN
    if in_k4 and k4 in solutions and 6 * k4 - 2 <= a <= 6 * k4 - 1 and 6 * k4 + 3 <= b <= 6 * size + 4:
        return Direction.DOWN
    if b == 3:
        k5 = (a + 5) // 6
        if 1 <= k5 <= size and k5 in columns and k5 > 1 and a == 6 * k5 - 5:
            return Direction.DOWN

    return Direction.RIGHT


class ColorField:
    """Corner-lattice assignment for one ITER instance (memoized)."""

    def __init__(self, inst: IterInstance):
        self.inst = inst
        self.geometry = GridGeometry(inst.n)
        self.columns, self.solutions = node_sets(inst)
        self._cache: dict[tuple[int, int], CornerAssignment] = {}

    @property
    def N(self) -> int:
        return self.geometry.N

    def assignment(self, a: int, b: int) -> CornerAssignment:
        if not self.geometry.in_lattice(a, b):
            raise ValueError(f"({a}, {b}) outside the corner lattice [0, {self.N}]^2")
        key = (a, b)
        got = self._cache.get(key)
        if got is None:
            color = _grid_color(self.inst, self.columns, a, b)
            direction = _grid_direction(self.inst, self.columns, self.solutions, a, b)
            got = CornerAssignment(
                value=regime_value(color, a, b, self.N), direction=direction, color=color
            )
            self._cache[key] = got
        return got


def grid_assignment(inst: IterInstance, a: int, b: int) -> CornerAssignment:
    """One-shot corner assignment (prefer ColorField for repeated queries)."""
    return ColorField(inst).assignment(a, b)
