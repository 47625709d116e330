"""Per-cell degree-(5,5) Hermite interpolation.

Each unit cell Box(a, b) gets a polynomial sum_ij c_ij (x-a)^i (y-b)^j whose
value, first derivative, and pure second derivative match the corner data at
all four corners (mixed corner derivatives are exactly zero).  Coefficients
are solved exactly: C = A^-1 V (A^-1)^T over rationals.

Two evaluation paths: exact Fractions (verification) and high-precision
floats (solver loops); see _precision.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from sospgrid._precision import hp
from sospgrid.color_field import CornerAssignment

# Rows: value at 0, value at 1, 1st derivative at 0/1, 2nd derivative at 0/1
# of the monomial basis 1, t, ..., t^5.
A_MATRIX = (
    (1, 0, 0, 0, 0, 0),
    (1, 1, 1, 1, 1, 1),
    (0, 1, 0, 0, 0, 0),
    (0, 1, 2, 3, 4, 5),
    (0, 0, 2, 0, 0, 0),
    (0, 0, 2, 6, 12, 20),
)


def _invert6(matrix) -> tuple[tuple[Fraction, ...], ...]:
    n = len(matrix)
    aug = [[Fraction(matrix[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for col in range(n):
        pivot = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [x - factor * y for x, y in zip(aug[r], aug[col])]
    return tuple(tuple(row[n:]) for row in aug)


A_INV = _invert6(A_MATRIX)


def _matmul6(X, Y):
    return tuple(
        tuple(sum(X[i][k] * Y[k][j] for k in range(6)) for j in range(6)) for i in range(6)
    )


def _transpose6(X):
    return tuple(tuple(X[j][i] for j in range(6)) for i in range(6))


CornerBlock = tuple[tuple[Fraction, ...], ...]


def assemble_corner_block(
    c00: CornerAssignment,
    c01: CornerAssignment,
    c10: CornerAssignment,
    c11: CornerAssignment,
) -> CornerBlock:
    """6x6 value matrix V for corners at (a,b), (a,b+1), (a+1,b), (a+1,b+1).

    Row functionals act in x, column functionals in y: e.g. V[2][0] is
    f_x(a, b) and V[0][3] is f_y(a, b+1).  Mixed-derivative slots are zero.
    """
    zero = Fraction(0)
    return (
        (c00.value, c01.value, c00.grad[1], c01.grad[1], c00.f_yy, c01.f_yy),
        (c10.value, c11.value, c10.grad[1], c11.grad[1], c10.f_yy, c11.f_yy),
        (c00.grad[0], c01.grad[0], zero, zero, zero, zero),
        (c10.grad[0], c11.grad[0], zero, zero, zero, zero),
        (c00.f_xx, c01.f_xx, zero, zero, zero, zero),
        (c10.f_xx, c11.f_xx, zero, zero, zero, zero),
    )


@dataclass(frozen=True)
class BoxPatch:
    """One cell's coefficient matrix, anchored at integer (a, b)."""

    a: int
    b: int
    coeffs: tuple[tuple[Fraction, ...], ...]
    _hp_cache: dict = field(default_factory=dict, compare=False, repr=False)

    def contains(self, x, y) -> bool:
        return self.a <= x <= self.a + 1 and self.b <= y <= self.b + 1

    def hp_coeffs(self):
        """Coefficient matrix converted to high-precision floats (cached)."""
        got = self._hp_cache.get("hp")
        if got is None:
            got = tuple(tuple(hp(c) for c in row) for row in self.coeffs)
            self._hp_cache["hp"] = got
        return got

    def _eval_local(self, dx, dy, coeffs):
        """(f, fx, fy, fxx, fyy, fxy) at local offsets (dx, dy)."""
        one = dx - dx + 1
        xp = [one]
        yp = [one]
        for _ in range(5):
            xp.append(xp[-1] * dx)
            yp.append(yp[-1] * dy)
        f = fx = fy = fxx = fyy = fxy = dx - dx
        for i in range(6):
            for j in range(6):
                c = coeffs[i][j]
                if c == 0:
                    continue
                f += c * xp[i] * yp[j]
                if i >= 1:
                    fx += i * c * xp[i - 1] * yp[j]
                if j >= 1:
                    fy += j * c * xp[i] * yp[j - 1]
                if i >= 2:
                    fxx += i * (i - 1) * c * xp[i - 2] * yp[j]
                if j >= 2:
                    fyy += j * (j - 1) * c * xp[i] * yp[j - 2]
                if i >= 1 and j >= 1:
                    fxy += i * j * c * xp[i - 1] * yp[j - 1]
        return f, fx, fy, fxx, fyy, fxy

    def eval(self, x, y, exact: bool = True):
        """Value, gradient, Hessian at (x, y) inside the cell.

        Returns (f, (fx, fy), ((fxx, fxy), (fxy, fyy))).  With exact=True
        inputs must be rational and the result is exact.
        """
        if not self.contains(x, y):
            raise ValueError(f"({x}, {y}) outside Box({self.a}, {self.b})")
        if exact:
            dx = Fraction(x) - self.a
            dy = Fraction(y) - self.b
            coeffs = self.coeffs
        else:
            dx = hp(x) - self.a
            dy = hp(y) - self.b
            coeffs = self.hp_coeffs()
        f, fx, fy, fxx, fyy, fxy = self._eval_local(dx, dy, coeffs)
        return f, (fx, fy), ((fxx, fxy), (fxy, fyy))


def solve_coefficients(V: CornerBlock, a: int = 0, b: int = 0) -> BoxPatch:
    """Exact coefficients C with A C A^T = V."""
    V = tuple(tuple(Fraction(x) for x in row) for row in V)
    coeffs = _matmul6(_matmul6(A_INV, V), _transpose6(A_INV))
    return BoxPatch(a=a, b=b, coeffs=coeffs)


def patch_from_corners(
    a: int,
    b: int,
    c00: CornerAssignment,
    c01: CornerAssignment,
    c10: CornerAssignment,
    c11: CornerAssignment,
) -> BoxPatch:
    return solve_coefficients(assemble_corner_block(c00, c01, c10, c11), a=a, b=b)
