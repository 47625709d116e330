"""Assembled objective for an ITER instance.

Lazily builds interpolation patches over [0, N]^2, tracks the analytic
Lipschitz record, supports rescaling onto [0, 1]^2, and decodes points back
to ITER solutions.
"""

from __future__ import annotations

import enum
import math
import threading
from collections import OrderedDict
from dataclasses import dataclass
from fractions import Fraction

from sospgrid._precision import hp, to_fraction
from sospgrid.biquintic import BoxPatch, patch_from_corners
from sospgrid.color_field import ColorField
from sospgrid.iter_problems import IterInstance

C0_AGGRESSIVE = 2**76
DEFAULT_CACHE_CELLS = 4096


class ScaleMode(enum.Enum):
    UNIT = "unit"  # objective on [0, N]^2, no rescale
    MODERATE = "moderate"  # f(Nx, Ny) / N on [0, 1]^2
    AGGRESSIVE = "aggressive"  # f(Nx, Ny) / (c0 N^4) on [0, 1]^2


@dataclass(frozen=True)
class EvalResult:
    f: object
    grad: tuple
    hess: tuple
    cell: tuple[int, int]


@dataclass(frozen=True)
class LipschitzRecord:
    L: Fraction
    L1: Fraction
    L2: Fraction
    coeff_norm_bound: Fraction


class HardInstance:
    """Evaluable objective; immutable apart from an internal patch cache."""

    def __init__(self, inst: IterInstance, mode: ScaleMode = ScaleMode.UNIT,
                 cache_cells: int = DEFAULT_CACHE_CELLS):
        self.instance = inst
        self.mode = mode
        self.field = ColorField(inst)
        self.N = self.field.N
        self._cache: OrderedDict[tuple[int, int], BoxPatch] = OrderedDict()
        self._cache_cells = cache_cells
        self._lock = threading.Lock()

    @property
    def geometry(self):
        return self.field.geometry

    @property
    def domain_high(self) -> int:
        """Upper coordinate bound of the (square) domain; lower bound is 0."""
        return self.N if self.mode is ScaleMode.UNIT else 1

    def patch(self, a: int, b: int) -> BoxPatch:
        """Interpolation patch of Box(a, b) in unscaled coordinates."""
        if not (0 <= a <= self.N - 1 and 0 <= b <= self.N - 1):
            raise ValueError(f"Box({a}, {b}) outside the grid")
        key = (a, b)
        with self._lock:
            got = self._cache.get(key)
            if got is not None:
                self._cache.move_to_end(key)
                return got
        asn = self.field.assignment
        built = patch_from_corners(a, b, asn(a, b), asn(a, b + 1), asn(a + 1, b), asn(a + 1, b + 1))
        with self._lock:
            self._cache[key] = built
            if len(self._cache) > self._cache_cells:
                self._cache.popitem(last=False)
        return built

    def locate(self, x, y) -> tuple[int, int]:
        """Cell containing the *unscaled* point, clamping at the far edge."""
        if not (0 <= x <= self.N and 0 <= y <= self.N):
            raise ValueError(f"({x}, {y}) outside [0, {self.N}]^2")
        # math.floor, not int(): high-precision floats round under int().
        a = min(math.floor(x), self.N - 1)
        b = min(math.floor(y), self.N - 1)
        return a, b

    def evaluate(self, x, y, exact: bool = True) -> EvalResult:
        """f, grad f, hess f at a domain point, in the instance's scale mode."""
        if self.mode is ScaleMode.UNIT:
            u, v = x, y
        else:
            if not (0 <= x <= 1 and 0 <= y <= 1):
                raise ValueError(f"({x}, {y}) outside [0, 1]^2")
            if exact:
                u, v = to_fraction(x) * self.N, to_fraction(y) * self.N
            else:
                u, v = hp(x) * self.N, hp(y) * self.N
        a, b = self.locate(u, v)
        f, grad, hess = self.patch(a, b).eval(u, v, exact=exact)
        if self.mode is ScaleMode.MODERATE:
            f = f / self.N
            hess = tuple(tuple(h * self.N for h in row) for row in hess)
        elif self.mode is ScaleMode.AGGRESSIVE:
            c = C0_AGGRESSIVE * self.N**4
            den = hp(c) if not exact else c
            f = f / den
            grad = tuple(g * self.N / den for g in grad)
            hess = tuple(tuple(h * self.N**2 / den for h in row) for row in hess)
        return EvalResult(f=f, grad=grad, hess=hess, cell=(a, b))

    def objective(self, exact: bool = True):
        """Callable x -> (f, grad, hess) for the solver/verifier modules."""
        def call(pt):
            res = self.evaluate(pt[0], pt[1], exact=exact)
            return res.f, res.grad, res.hess
        return call

    def domain_polytope(self):
        """The instance's feasible box as a Polytope."""
        from .stationarity import Polytope

        hi = self.domain_high
        return Polytope.box((0, 0), (hi, hi))

    def decode_solution(self, x, y):
        """ITER solution k if the (unscaled) point lies in an X cell, else None."""
        if not (0 <= x <= self.N and 0 <= y <= self.N):
            return None
        a, b = self.locate(x, y)
        k, rem = divmod(a + 3, 6)
        if rem > 2:
            return None
        if b == 6 * k + 2 and k in self.field.solutions:
            return k
        return None

    def decode_scaled(self, x, y):
        """decode_solution for a point in the instance's own coordinates."""
        if self.mode is ScaleMode.UNIT:
            return self.decode_solution(x, y)
        return self.decode_solution(to_fraction(x) * self.N,
                                    to_fraction(y) * self.N)

    def lipschitz_report(self) -> LipschitzRecord:
        """Analytic bounds: coefficient norm < 2^10 (2^55 N + 2), and from it
        L <= 10 * coeff < 2^70 N, L1 <= 90 * coeff < 2^73 N, L2 <= 2^75 N,
        adjusted for the scale mode."""
        N = self.N
        coeff = Fraction(2**10 * (2**55 * N + 2))
        L, L1, L2 = Fraction(2**70 * N), Fraction(2**73 * N), Fraction(2**75 * N)
        if self.mode is ScaleMode.MODERATE:
            L, L1, L2 = L, N * L1, N**2 * L2
        elif self.mode is ScaleMode.AGGRESSIVE:
            c = C0_AGGRESSIVE
            L, L1, L2 = L / (c * N**3), L1 / (c * N**2), L2 / (c * N)
        return LipschitzRecord(L=L, L1=L1, L2=L2, coeff_norm_bound=coeff)


def build(inst: IterInstance, mode: ScaleMode | str = ScaleMode.UNIT,
          cache_cells: int = DEFAULT_CACHE_CELLS) -> HardInstance:
    if isinstance(mode, str):
        mode = ScaleMode(mode)
    return HardInstance(inst, mode=mode, cache_cells=cache_cells)
