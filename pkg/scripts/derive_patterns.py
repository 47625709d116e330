"""Dev-time derivation of the corner-pattern table used by the cell
classifier.

For each catalogued group we know closed-form expressions for the partial
derivatives Gx, Gy of the interpolant on the unit box.  The interpolant is
linear in the 12 free corner parameters (4 values, 8 gradient components;
second-order data is fixed), so equating polynomial coefficients recovers
the corner pattern: the arrow at each corner and the value offsets in terms
of the reference color symbols.

Run directly to print the frozen table pasted into sospgrid/box_certifier.py.
"""

from __future__ import annotations

import sympy as sp

x, y = sp.symbols("x y")
B, M, R, G = sp.symbols("B M R G")
a, b, c, d = sp.symbols("a b c d")

UNKNOWNS = sp.symbols("v00 v01 v10 v11 gx00 gx01 gx10 gx11 gy00 gy01 gy10 gy11")
(v00, v01, v10, v11, gx00, gx01, gx10, gx11, gy00, gy01, gy10, gy11) = UNKNOWNS

A_MAT = sp.Matrix([
    [1, 0, 0, 0, 0, 0],
    [1, 1, 1, 1, 1, 1],
    [0, 1, 0, 0, 0, 0],
    [0, 1, 2, 3, 4, 5],
    [0, 0, 2, 0, 0, 0],
    [0, 0, 2, 6, 12, 20],
])
A_INV = A_MAT.inv()

half = sp.Rational(1, 2)
V = sp.Matrix([
    [v00, v01, gy00, gy01, -half, -half],
    [v10, v11, gy10, gy11, -half, -half],
    [gx00, gx01, 0, 0, 0, 0],
    [gx10, gx11, 0, 0, 0, 0],
    [-half, -half, 0, 0, 0, 0],
    [-half, -half, 0, 0, 0, 0],
])
C = A_INV * V * A_INV.T
F = sum(C[i, j] * x**i * y**j for i in range(6) for j in range(6))
PATCH_GX = sp.expand(sp.diff(F, x))
PATCH_GY = sp.expand(sp.diff(F, y))

P1x = 180 * x**5 - 450 * x**4 + 300 * x**3

GROUPS = {
    "A": (
        x**4*y**5*(-180*M + 180*R - 180) + x**4*y**4*(450*M - 450*R + 450)
        + x**4*y**3*(-300*M + 300*R - 300) + 30*x**4
        + x**3*y**5*(360*M - 360*R + 372) + x**3*y**4*(-900*M + 900*R - 930)
        + x**3*y**3*(600*M - 600*R + 620) - 61*x**3
        + x**2*y**5*(-180*M + 180*R - 198) + x**2*y**4*(450*M - 450*R + 495)
        + x**2*y**3*(-300*M + 300*R - 330)
        + sp.Rational(63, 2)*x**2 - x/2 + 3*y**5 - sp.Rational(15, 2)*y**4 + 5*y**3,
        x**5*y**4*(-180*M + 180*R - 180) + x**5*y**3*(360*M - 360*R + 360)
        + x**5*y**2*(-180*M + 180*R - 180)
        + x**4*y**4*(450*M - 450*R + 465) + x**4*y**3*(-900*M + 900*R - 930)
        + x**4*y**2*(450*M - 450*R + 465)
        + x**3*y**4*(-300*M + 300*R - 330) + x**3*y**3*(600*M - 600*R + 660)
        + x**3*y**2*(-300*M + 300*R - 330)
        + 15*x*y**4 - 30*x*y**3 + 15*x*y**2
        + y**4*(-30*G + 30*M + sp.Rational(75, 2)) + y**3*(60*G - 60*M - 77)
        + y**2*(-30*G + 30*M + sp.Rational(81, 2)) - y/2 - half,
    ),
    "B": (
        x*(360*x**3*y**5*(R - B - 1) + 900*x**3*y**4*(-R + B + 1)
           + 600*x**3*y**3*(R - B - 1) + 30*x**3*y + 45*x**3
           + 24*x**2*y**5*(-30*R + 30*B + 31) + 60*x**2*y**4*(30*R - 30*B - 31)
           + 40*x**2*y**3*(-30*R + 30*B + 31) - 60*x**2*y - 94*x**2
           + 36*x*y**5*(10*R - 10*B - 11) + 90*x*y**4*(-10*R + 10*B + 11)
           + 60*x*y**3*(10*R - 10*B - 11) + 30*x*y + 51*x - 1)/2,
        x**5*y**4*(180*R - 180*B - 180) + x**5*y**3*(-360*R + 360*B + 360)
        + x**5*y**2*(180*R - 180*B - 180) + 3*x**5
        + x**4*y**4*(-450*R + 450*B + 465) + x**4*y**3*(900*R - 900*B - 930)
        + x**4*y**2*(-450*R + 450*B + 465) - sp.Rational(15, 2)*x**4
        + x**3*y**4*(300*R - 300*B - 330) + x**3*y**3*(-600*R + 600*B + 660)
        + x**3*y**2*(300*R - 300*B - 330) + 5*x**3
        + y**4*(-30*M + 30*B + 45) + y**3*(60*M - 60*B - 91)
        + y**2*(-30*M + 30*B + sp.Rational(93, 2)) - y/2 - half,
    ),
    "C": (
        x**4*y**5*(180*M - 180*R + 270) + x**4*y**4*(-450*M + 450*R - sp.Rational(1335, 2))
        + x**4*y**3*(300*M - 300*R + 435) + x**4*(-30*M + 30*R - 60)
        + x**3*y**5*(-360*M + 360*R - 546) + x**3*y**4*(900*M - 900*R + 1350)
        + x**3*y**3*(-600*M + 600*R - 880) + x**3*(60*M - 60*R + 121)
        + x**2*y**5*(180*M - 180*R + 279) + x**2*y**4*(-450*M + 450*R - 690)
        + x**2*y**3*(300*M - 300*R + 450)
        + x**2*(-30*M + 30*R - sp.Rational(123, 2)) - x/2 - 3*y**5
        + sp.Rational(15, 2)*y**4 - 5*y**3 + half,
        y*(x**5*y**3*(360*M - 360*R + 540) + x**5*y**2*(-720*M + 720*R - 1068)
           + 18*x**5*y*(20*M - 20*R + 29)
           + x**4*y**3*(-900*M + 900*R - 1365) + x**4*y**2*(1800*M - 1800*R + 2700)
           + 60*x**4*y*(-15*M + 15*R - 22)
           + x**3*y**3*(600*M - 600*R + 930) + x**3*y**2*(-1200*M + 1200*R - 1840)
           + 300*x**3*y*(2*M - 2*R + 3)
           - 30*x*y**3 + 60*x*y**2 - 30*x*y + y**3*(-60*M + 60*R - 15)
           + y**2*(120*M - 120*R + 26) + 3*y*(-20*M + 20*R - 3) - 1)/2,
    ),
    "D": (
        x*(x**3*y**5*(360*B - 360*R - 540) + x**3*y**4*(-900*B + 900*R + 1365)
           + x**3*y**3*(600*B - 600*R - 930) + 30*x**3*y
           + x**3*(-60*B + 60*R + 15) + x**2*y**5*(-720*B + 720*R + 1068)
           + x**2*y**4*(1800*B - 1800*R - 2700)
           + x**2*y**3*(-1200*B + 1200*R + 1840) - 60*x**2*y
           + x**2*(120*B - 120*R - 30) + 18*x*y**5*(20*B - 20*R - 29)
           + 60*x*y**4*(-15*B + 15*R + 22) + 300*x*y**3*(2*B - 2*R - 3)
           + 30*x*y + 15*x*(-4*B + 4*R + 1) - 1)/2,
        x**5*y**4*(180*B - 180*R - 270) + x**5*y**3*(-360*B + 360*R + 546)
        + x**5*y**2*(180*B - 180*R - 279) + 3*x**5
        + x**4*y**4*(-450*B + 450*R + sp.Rational(1335, 2)) + x**4*y**3*(900*B - 900*R - 1350)
        + x**4*y**2*(-450*B + 450*R + 690) - sp.Rational(15, 2)*x**4
        + x**3*y**4*(300*B - 300*R - 435) + x**3*y**3*(-600*B + 600*R + 880)
        + x**3*y**2*(300*B - 300*R - 450) + 5*x**3
        - 15*y**4 + 29*y**3 - sp.Rational(27, 2)*y**2 - y/2 - half,
    ),
    "E": (
        x*(540*x**3*y**5 - 1350*x**3*y**4 + 900*x**3*y**3 + 30*x**3*y
           + x**3*(60*R - 60*B - 45) - 1080*x**2*y**5 + 2700*x**2*y**4
           - 1800*x**2*y**3 - 60*x**2*y + x**2*(-120*R + 120*B + 90)
           + 540*x*y**5 - 1350*x*y**4 + 900*x*y**3 + 30*x*y
           + 15*x*(4*R - 4*B - 3) - 1)/2,
        270*x**5*y**4 - 540*x**5*y**3 + 270*x**5*y**2 + 3*x**5
        - 675*x**4*y**4 + 1350*x**4*y**3 - 675*x**4*y**2 - sp.Rational(15, 2)*x**4
        + 450*x**3*y**4 - 900*x**3*y**3 + 450*x**3*y**2 + 5*x**3
        - 15*y**4 + 29*y**3 - sp.Rational(27, 2)*y**2 - y/2 - half,
    ),
    "F": (
        -270*x**4*y**5 + sp.Rational(1335, 2)*x**4*y**4 - 435*x**4*y**3 + 15*x**4
        + 534*x**3*y**5 - 1320*x**3*y**4 + 860*x**3*y**3 - 31*x**3
        - 261*x**2*y**5 + 645*x**2*y**4 - 420*x**2*y**3 + sp.Rational(33, 2)*x**2
        - x/2 - 6*y**5 + 15*y**4 - 10*y**3 + half,
        y*(-540*x**5*y**3 + 1068*x**5*y**2 - 522*x**5*y + 1335*x**4*y**3
           - 2640*x**4*y**2 + 1290*x**4*y - 870*x**3*y**3 + 1720*x**3*y**2
           - 840*x**3*y - 60*x*y**3 + 120*x*y**2 - 60*x*y
           + 60*y**3*(-M + R + 1) + 2*y**2*(60*M - 60*R - 61)
           + 3*y*(-20*M + 20*R + 21) - 1)/2,
    ),
    "G": (
        (x/2)*(360*x**3*y**5 - 900*x**3*y**4 + 600*x**3*y**3 + 60*x**3*y
               + 60*x**3*(R - M - 1) - 720*x**2*y**5 + 1800*x**2*y**4
               - 1200*x**2*y**3 - 120*x**2*y + 2*x**2*(-60*R + 60*M + 59)
               + 360*x*y**5 - 900*x*y**4 + 600*x*y**3 + 60*x*y
               + 3*x*(20*R - 20*M - 19) - 1),
        180*x**5*y**4 - 360*x**5*y**3 + 180*x**5*y**2 + 6*x**5
        - 450*x**4*y**4 + 900*x**4*y**3 - 450*x**4*y**2 - 15*x**4
        + 300*x**3*y**4 - 600*x**3*y**3 + 300*x**3*y**2 + 10*x**3
        - 15*y**4 + 29*y**3 - sp.Rational(27, 2)*y**2 - y/2 - half,
    ),
    "G1": (
        x**2*(1 - x)**2*((b - a)*(180*y**5 - 450*y**4 + 300*y**3)
                         + (d - c)*(-180*y**5 + 450*y**4 - 300*y**3 + 30))
        + 15*x**4 - 31*x**3 + sp.Rational(33, 2)*x**2 - x/2 - half,
        None,
    ),
    "G2": (
        x**4*y**5*(-180*a + 180*b + 180*c - 180*d + 90)
        + x**4*y**4*(450*a - 450*b - 450*c + 450*d - 225)
        + x**4*y**3*(-300*a + 300*b + 300*c - 300*d + 150) + x**4*(-30*c + 30*d)
        + x**3*y**5*(360*a - 360*b - 360*c + 360*d - 180)
        + x**3*y**4*(-900*a + 900*b + 900*c - 900*d + 450)
        + x**3*y**3*(600*a - 600*b - 600*c + 600*d - 300) + x**3*(60*c - 60*d - 1)
        + x**2*y**5*(-180*a + 180*b + 180*c - 180*d + 90)
        + x**2*y**4*(450*a - 450*b - 450*c + 450*d - 225)
        + x**2*y**3*(-300*a + 300*b + 300*c - 300*d + 150)
        + x**2*(-30*c + 30*d + sp.Rational(3, 2)) - x/2 - 3*y**5
        + sp.Rational(15, 2)*y**4 - 5*y**3,
        (1 - y)*(((b - d)*P1x + (c - a)*(P1x - 30) + P1x/2 - 15*x
                  + sp.Rational(19, 2))*(y**2 - y**3) + 2*y**3 - y - half),
    ),
    "G3": (
        x**4*y**5*(-180*a + 180*b + 180*c - 180*d + 90)
        + x**4*y**4*(450*a - 450*b - 450*c + 450*d - sp.Rational(435, 2))
        + x**4*y**3*(-300*a + 300*b + 300*c - 300*d + 135) + x**4*(-30*c + 30*d)
        + x**3*y**5*(360*a - 360*b - 360*c + 360*d - 186)
        + x**3*y**4*(-900*a + 900*b + 900*c - 900*d + 450)
        + x**3*y**3*(600*a - 600*b - 600*c + 600*d - 280) + x**3*(60*c - 60*d - 1)
        + x**2*y**5*(-180*a + 180*b + 180*c - 180*d + 99)
        + x**2*y**4*(450*a - 450*b - 450*c + 450*d - 240)
        + x**2*y**3*(-300*a + 300*b + 300*c - 300*d + 150)
        + x**2*(-30*c + 30*d + sp.Rational(3, 2)) - x/2 - 3*y**5
        + sp.Rational(15, 2)*y**4 - 5*y**3,
        x**5*y**4*(-180*a + 180*b + 180*c - 180*d + 90)
        + x**5*y**3*(360*a - 360*b - 360*c + 360*d - 174)
        + x**5*y**2*(-180*a + 180*b + 180*c - 180*d + 81)
        + x**4*y**4*(450*a - 450*b - 450*c + 450*d - sp.Rational(465, 2))
        + x**4*y**3*(-900*a + 900*b + 900*c - 900*d + 450)
        + x**4*y**2*(450*a - 450*b - 450*c + 450*d - 210)
        + x**3*y**4*(-300*a + 300*b + 300*c - 300*d + 165)
        + x**3*y**3*(600*a - 600*b - 600*c + 600*d - 320)
        + x**3*y**2*(-300*a + 300*b + 300*c - 300*d + 150)
        - 15*x*y**4 + 30*x*y**3 - 15*x*y**2
        + y**4*(30*a - 30*c + sp.Rational(15, 2)) + y**3*(-60*a + 60*c - 17)
        + y**2*(30*a - 30*c + sp.Rational(21, 2)) - y/2 - half,
    ),
    "G4": (
        180*x**4*y**5*(-a + b + c - d) + 15*x**4*y**4*(60*a - 60*b - 60*c + 60*d - 1)/2
        + 15*x**4*y**3*(-20*a + 20*b + 20*c - 20*d + 1) - 15*x**4*y
        + 15*x**4*(-4*c + 4*d + 1)/2 + 6*x**3*y**5*(60*a - 60*b - 60*c + 60*d + 1)
        + 900*x**3*y**4*(-a + b + c - d) + 20*x**3*y**3*(30*a - 30*b - 30*c + 30*d - 1)
        + 30*x**3*y + x**3*(60*c - 60*d - 17)
        + 9*x**2*y**5*(-20*a + 20*b + 20*c - 20*d - 1)
        + 15*x**2*y**4*(30*a - 30*b - 30*c + 30*d + 1) + 300*x**2*y**3*(-a + b + c - d)
        - 15*x**2*y + 3*x**2*(-20*c + 20*d + 7)/2
        - x/2 + 3*y**5 - sp.Rational(15, 2)*y**4 + 5*y**3 - half,
        180*x**5*y**4*(-a + b + c - d) + 6*x**5*y**3*(60*a - 60*b - 60*c + 60*d - 1)
        + 9*x**5*y**2*(-20*a + 20*b + 20*c - 20*d + 1) - 3*x**5
        + 15*x**4*y**4*(60*a - 60*b - 60*c + 60*d + 1)/2 + 900*x**4*y**3*(-a + b + c - d)
        + 15*x**4*y**2*(30*a - 30*b - 30*c + 30*d - 1) + sp.Rational(15, 2)*x**4
        + 15*x**3*y**4*(-20*a + 20*b + 20*c - 20*d - 1)
        + 20*x**3*y**3*(30*a - 30*b - 30*c + 30*d + 1) + 300*x**3*y**2*(-a + b + c - d)
        - 5*x**3 + 15*x*y**4 - 30*x*y**3 + 15*x*y**2
        + 15*y**4*(4*a - 4*c + 1)/2 + 15*y**3*(-4*a + 4*c - 1)
        + 15*y**2*(4*a - 4*c + 1)/2 - y/2,
    ),
}


def fit(name: str, gx_target, gy_target):
    eqs = []
    diff = sp.expand(PATCH_GX - gx_target)
    eqs += sp.Poly(diff, x, y).coeffs() if diff != 0 else []
    if gy_target is not None:
        diff = sp.expand(PATCH_GY - gy_target)
        if diff != 0:
            eqs += sp.Poly(diff, x, y).coeffs()
    sol = sp.solve(eqs, UNKNOWNS, dict=True)
    if not sol:
        print(f"{name}: NO SOLUTION")
        return
    s = sol[0]
    print(f"--- {name} ---")
    for u in UNKNOWNS:
        print(f"  {u} = {sp.simplify(s.get(u, u))}")


if __name__ == "__main__":
    for nm, (gx_t, gy_t) in GROUPS.items():
        fit(nm, gx_t, gy_t)
