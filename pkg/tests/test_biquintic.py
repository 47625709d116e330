"""Biquintic coefficient solve against a dense 36x36 oracle, plus the
Hermite corner conditions and cross-cell continuity."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from sospgrid.biquintic import (
    A_INV,
    A_MATRIX,
    BoxPatch,
    assemble_corner_block,
    patch_from_corners,
    solve_coefficients,
)
from sospgrid.color_field import ColorField
from sospgrid.iter_problems import IterInstance


def dense_solve_36(V):
    """Oracle: solve the 36x36 tensor-product system by Gaussian elimination.

    Unknowns c[p][q]; equation (i, j) reads
    sum_pq A[i][p] A[j][q] c[p][q] = V[i][j].
    """
    M = []
    rhs = []
    for i in range(6):
        for j in range(6):
            M.append([Fraction(A_MATRIX[i][p] * A_MATRIX[j][q])
                      for p in range(6) for q in range(6)])
            rhs.append(Fraction(V[i][j]))
    n = 36
    for col in range(n):
        piv = next(r for r in range(col, n) if M[r][col] != 0)
        M[col], M[piv] = M[piv], M[col]
        rhs[col], rhs[piv] = rhs[piv], rhs[col]
        inv = 1 / M[col][col]
        M[col] = [v * inv for v in M[col]]
        rhs[col] *= inv
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[col])]
                rhs[r] -= f * rhs[col]
    return tuple(tuple(rhs[p * 6 + q] for q in range(6)) for p in range(6))


def random_block(rng) -> tuple:
    return tuple(tuple(Fraction(rng.randrange(-100, 101), rng.randrange(1, 11))
                       for _ in range(6)) for _ in range(6))


def test_a_inverse_is_exact():
    for i in range(6):
        for j in range(6):
            got = sum(A_MATRIX[i][k] * A_INV[k][j] for k in range(6))
            assert got == (1 if i == j else 0)


def test_solve_matches_dense_oracle():
    rng = random.Random(11)
    for _ in range(25):
        V = random_block(rng)
        assert solve_coefficients(V).coeffs == dense_solve_36(V)


def test_hermite_corner_conditions():
    """The patch reproduces V's functionals at the four corners exactly."""
    rng = random.Random(23)
    V = random_block(rng)
    patch = solve_coefficients(V)

    def functionals(x, y):
        f, (fx, fy), ((fxx, _), (fxy, fyy)) = patch.eval(x, y)
        return f, fx, fy, fxx, fyy, fxy

    for u in (0, 1):
        for v in (0, 1):
            f, fx, fy, fxx, fyy, fxy = functionals(u, v)
            assert f == V[u][v]
            assert fx == V[2 + u][v]
            assert fy == V[u][2 + v]
            assert fxx == V[4 + u][v]
            assert fyy == V[u][4 + v]
            assert fxy == V[2 + u][2 + v]


def test_corner_blocks_zero_mixed_derivatives():
    """Blocks built from corner assignments put 0 in every mixed slot, so
    the interpolant's corner f_xy vanishes."""
    field = ColorField(IterInstance(1, (2, 2)))
    patch = patch_from_corners(
        4, 7,
        field.assignment(4, 7), field.assignment(4, 8),
        field.assignment(5, 7), field.assignment(5, 8))
    for u in (4, 5):
        for v in (7, 8):
            _, _, ((_, fxy), (_, _)) = patch.eval(Fraction(u), Fraction(v))
            assert fxy == 0


def test_eval_rejects_outside_points():
    patch = BoxPatch(a=2, b=3, coeffs=tuple(tuple(Fraction(0) for _ in range(6))
                                            for _ in range(6)))
    with pytest.raises(ValueError):
        patch.eval(Fraction(4), Fraction(3))


def test_hp_eval_tracks_exact_eval():
    rng = random.Random(5)
    V = random_block(rng)
    patch = solve_coefficients(V)
    for _ in range(10):
        x = Fraction(rng.randrange(0, 1001), 1000)
        y = Fraction(rng.randrange(0, 1001), 1000)
        fe, ge, he = patch.eval(x, y)
        ff, gf, hf = patch.eval(x, y, exact=False)
        assert abs(float(fe) - float(ff)) <= 1e-12 * max(1.0, abs(float(fe)))
        for a, b in zip(ge, gf):
            assert abs(float(a) - float(b)) <= 1e-12 * max(1.0, abs(float(a)))
        for ra, rb in zip(he, hf):
            for a, b in zip(ra, rb):
                assert abs(float(a) - float(b)) <= 1e-12 * max(1.0, abs(float(a)))


def test_adjacent_cells_agree_on_shared_edges():
    """Spot continuity check on the hard instance (full sweep in acceptance)."""
    field = ColorField(IterInstance(1, (2, 2)))

    def patch(a, b):
        return patch_from_corners(
            a, b,
            field.assignment(a, b), field.assignment(a, b + 1),
            field.assignment(a + 1, b), field.assignment(a + 1, b + 1))

    samples = [Fraction(i, 4) for i in range(5)]
    for (a, b) in [(3, 7), (7, 3), (10, 10)]:
        left, right = patch(a, b), patch(a + 1, b)
        lo, hi = patch(a, b), patch(a, b + 1)
        for t in samples:
            assert left.eval(a + 1, b + t) == right.eval(a + 1, b + t)
            assert lo.eval(a + t, b + 1) == hi.eval(a + t, b + 1)


def test_corner_block_layout():
    field = ColorField(IterInstance(1, (2, 2)))
    c00 = field.assignment(0, 0)
    c01 = field.assignment(0, 1)
    c10 = field.assignment(1, 0)
    c11 = field.assignment(1, 1)
    V = assemble_corner_block(c00, c01, c10, c11)
    assert V[0][0] == c00.value and V[1][1] == c11.value
    assert V[2][0] == c00.grad[0] and V[0][2] == c00.grad[1]
    assert V[4][0] == c00.f_xx and V[0][4] == c00.f_yy
