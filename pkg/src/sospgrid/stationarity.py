"""Constrained first/second-order stationarity machinery.

Polytopes {x : Ax <= b}, Euclidean projection, proximal gradient, active
sets with null-space projectors, projected-Hessian eigenvalues, and the
(eps_G, eps_H)-SOSP verifier.  Exact-rational and high-precision float
paths are both supported; polytope data is always rational.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from sospgrid._precision import hp, hp_sqrt

INF = float("inf")


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _is_exact_vec(x) -> bool:
    return all(isinstance(c, (int, Fraction)) for c in x)


def _solve_frac(M: list[list[Fraction]], rhs: list[Fraction]) -> Optional[list[Fraction]]:
    """Solve M z = rhs exactly; None if M is singular."""
    n = len(M)
    aug = [row[:] + [rhs[i]] for i, row in enumerate(M)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = Fraction(1) / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [v - f * w for v, w in zip(aug[r], aug[col])]
    return [aug[r][n] for r in range(n)]


def independent_rows(rows: Sequence[Sequence[Fraction]]) -> list[int]:
    """Indices of a maximal linearly independent subset, scanned in order."""
    kept: list[list[Fraction]] = []
    idx: list[int] = []
    for i, row in enumerate(rows):
        work = [_frac(v) for v in row]
        for basis in kept:
            lead = next((j for j, v in enumerate(basis) if v != 0), None)
            if lead is not None and work[lead] != 0:
                f = work[lead] / basis[lead]
                work = [v - f * w for v, w in zip(work, basis)]
        if any(v != 0 for v in work):
            kept.append(work)
            idx.append(i)
    return idx


class Polytope:
    """Rational polytope {x : Ax <= b}."""

    def __init__(self, A: Sequence[Sequence], b: Sequence,
                 box_bounds: Optional[tuple[tuple, tuple]] = None):
        self.A = tuple(tuple(_frac(v) for v in row) for row in A)
        self.b = tuple(_frac(v) for v in b)
        if len(self.A) != len(self.b):
            raise ValueError("A and b size mismatch")
        if not self.A:
            raise ValueError("empty constraint system")
        self.d = len(self.A[0])
        self.m = len(self.A)
        if box_bounds is not None:
            lo, hi = box_bounds
            self.box_bounds = (tuple(_frac(v) for v in lo), tuple(_frac(v) for v in hi))
        else:
            self.box_bounds = None

    @classmethod
    def box(cls, lo: Sequence, hi: Sequence) -> "Polytope":
        lo = [_frac(v) for v in lo]
        hi = [_frac(v) for v in hi]
        if len(lo) != len(hi) or any(l > h for l, h in zip(lo, hi)):
            raise ValueError("invalid box bounds")
        d = len(lo)
        A, b = [], []
        for i in range(d):
            row = [Fraction(0)] * d
            row[i] = Fraction(-1)
            A.append(row)
            b.append(-lo[i])
        for i in range(d):
            row = [Fraction(0)] * d
            row[i] = Fraction(1)
            A.append(row)
            b.append(hi[i])
        return cls(A, b, box_bounds=(lo, hi))

    def with_cut(self, row: Sequence, rhs) -> "Polytope":
        """New polytope with one extra half-space a.x <= rhs."""
        return Polytope(list(self.A) + [list(row)], list(self.b) + [rhs])

    def slack(self, j: int, x) -> object:
        return self.b[j] - sum(a * c for a, c in zip(self.A[j], x))

    def contains(self, x, tol=0) -> bool:
        return all(self.slack(j, x) >= -tol for j in range(self.m))

    def active_tolerance(self, j: int, exact: bool) -> object:
        if exact:
            return Fraction(0)
        return 1e-9 * (1 + abs(float(self.b[j])))


@dataclass(frozen=True)
class ActiveSet:
    x: tuple
    indices: tuple[int, ...]
    rows: tuple  # independent active rows (rational)
    projector: tuple  # d x d rational matrix, I - A'^T (A'A'^T)^-1 A'
    dim_null: int


def project(poly: Polytope, v, exact: bool = True):
    """Euclidean projection of v onto the polytope (exact rational QP)."""
    w = [_frac(c) for c in v]
    if poly.box_bounds is not None:
        lo, hi = poly.box_bounds
        out = [min(max(c, l), h) for c, l, h in zip(w, lo, hi)]
    else:
        out = _project_general(poly, w)
    if exact:
        return tuple(out)
    return tuple(float(c) for c in out)


def _project_general(poly: Polytope, w: list[Fraction]) -> list[Fraction]:
    if poly.contains(w):
        return w
    d = poly.d
    best = None
    best_dist = None
    for size in range(1, d + 1):
        for subset in itertools.combinations(range(poly.m), size):
            rows = [list(poly.A[j]) for j in subset]
            if len(independent_rows(rows)) < size:
                continue
            rhs = [poly.b[j] for j in subset]
            # projection onto the affine set A_S x = b_S
            gram = [[sum(a * c for a, c in zip(r1, r2)) for r2 in rows] for r1 in rows]
            resid = [sum(a * c for a, c in zip(rows[i], w)) - rhs[i] for i in range(size)]
            mult = _solve_frac(gram, resid)
            if mult is None:
                continue
            cand = [w[k] - sum(mult[i] * rows[i][k] for i in range(size)) for k in range(d)]
            if not poly.contains(cand):
                continue
            dist = sum((a - b) * (a - b) for a, b in zip(cand, w))
            if best_dist is None or dist < best_dist:
                best, best_dist = cand, dist
    if best is None:
        raise ValueError("projection failed: polytope appears infeasible")
    return best


def proximal_gradient(x, grad, L1, poly: Polytope):
    """g_pi(x) = L1 * (pi_X(x - grad/L1) - x)."""
    exact = _is_exact_vec(x) and _is_exact_vec(grad) and isinstance(L1, (int, Fraction))
    if exact:
        L1 = _frac(L1)
        step = tuple(_frac(c) - _frac(g) / L1 for c, g in zip(x, grad))
        proj = project(poly, step, exact=True)
        return tuple(L1 * (p - _frac(c)) for p, c in zip(proj, x))
    step = tuple(hp(c) - hp(g) / hp(L1) for c, g in zip(x, grad))
    if poly.box_bounds is not None:
        lo, hi = poly.box_bounds
        proj = tuple(min(max(s, hp(l)), hp(h)) for s, l, h in zip(step, lo, hi))
    else:
        proj = project(poly, tuple(Fraction(float(s)) for s in step), exact=True)
    return tuple(hp(L1) * (hp(p) - hp(c)) for p, c in zip(proj, x))


def active_set(poly: Polytope, x, tau=None) -> ActiveSet:
    """Active constraints at x with the null-space projector P(x)."""
    exact = _is_exact_vec(x)
    idx = []
    for j in range(poly.m):
        t = tau if tau is not None else poly.active_tolerance(j, exact)
        s = poly.slack(j, x)
        if s < -(t if not exact else 0):
            raise ValueError(f"point violates constraint {j}")
        if s <= t:
            idx.append(j)
    all_rows = [list(poly.A[j]) for j in idx]
    keep = independent_rows(all_rows)
    rows = [all_rows[i] for i in keep]
    P = projector_from_rows(rows, poly.d)
    return ActiveSet(x=tuple(x), indices=tuple(idx),
                     rows=tuple(tuple(r) for r in rows),
                     projector=P, dim_null=poly.d - len(rows))


def projector_from_rows(rows: Sequence[Sequence[Fraction]], d: int) -> tuple:
    """P = I - A^T (A A^T)^-1 A for linearly independent rows (exact)."""
    k = len(rows)
    ident = [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]
    if k == 0:
        return tuple(tuple(r) for r in ident)
    gram = [[sum(a * c for a, c in zip(r1, r2)) for r2 in rows] for r1 in rows]
    gram_inv_cols = []
    for c in range(k):
        e = [Fraction(int(i == c)) for i in range(k)]
        col = _solve_frac([r[:] for r in gram], e)
        if col is None:
            raise ValueError("rows are not linearly independent")
        gram_inv_cols.append(col)
    # M = (A A^T)^-1 A  (k x d)
    M = [[sum(gram_inv_cols[j][i] * rows[i][c] for i in range(k)) for c in range(d)]
         for j in range(k)]
    P = [[ident[r][c] - sum(rows[i][r] * M[i][c] for i in range(k)) for c in range(d)]
         for r in range(d)]
    return tuple(tuple(row) for row in P)


def min_eig_2x2(f_xx, f_yy, f_xy):
    """Closed-form minimum eigenvalue of a symmetric 2x2 matrix."""
    a, b, c = hp(f_xx), hp(f_yy), hp(f_xy)
    disc = hp_sqrt((a - b) * (a - b) + 4 * c * c)
    return (a + b - disc) / 2


def _jacobi_eigen(M: list[list], tol) -> tuple[list, list[list]]:
    """Cyclic Jacobi sweeps; returns (eigenvalues, eigenvector columns)."""
    n = len(M)
    A = [[hp(v) for v in row] for row in M]
    V = [[hp(int(i == j)) for j in range(n)] for i in range(n)]
    tol = hp(tol)
    for _ in range(100):
        off = hp(0)
        for i in range(n):
            for j in range(i + 1, n):
                off += A[i][j] * A[i][j]
        if hp_sqrt(2 * off) <= tol:
            break
        for p in range(n):
            for q in range(p + 1, n):
                if A[p][q] == 0:
                    continue
                theta = (A[q][q] - A[p][p]) / (2 * A[p][q])
                sign = 1 if theta >= 0 else -1
                t = sign / (abs(theta) + hp_sqrt(theta * theta + 1))
                c = 1 / hp_sqrt(t * t + 1)
                s = t * c
                for k in range(n):
                    akp, akq = A[k][p], A[k][q]
                    A[k][p] = c * akp - s * akq
                    A[k][q] = s * akp + c * akq
                for k in range(n):
                    apk, aqk = A[p][k], A[q][k]
                    A[p][k] = c * apk - s * aqk
                    A[q][k] = s * apk + c * aqk
                for k in range(n):
                    vkp, vkq = V[k][p], V[k][q]
                    V[k][p] = c * vkp - s * vkq
                    V[k][q] = s * vkp + c * vkq
    eigvals = [A[i][i] for i in range(n)]
    eigvecs = [[V[i][j] for i in range(n)] for j in range(n)]
    return eigvals, eigvecs


def projected_hessian_min_eig(H, P, delta_eig=1e-12):
    """(lambda, v): min eigenvalue of P H P restricted to range(P).

    Returns (+inf, None) when rank(P) = 0.  v satisfies v = Pv, ||v|| = 1.
    """
    d = len(H)
    for i in range(d):
        for j in range(i + 1, d):
            if hp(H[i][j]) != hp(H[j][i]):
                raise ValueError("Hessian must be symmetric")
    Ph = [[hp(P[i][j]) for j in range(d)] for i in range(d)]
    rank = sum(Ph[i][i] for i in range(d))  # trace of an orthogonal projector
    if float(rank) < 0.5:
        return INF, None
    Hh = [[hp(H[i][j]) for j in range(d)] for i in range(d)]
    PH = [[sum(Ph[i][k] * Hh[k][j] for k in range(d)) for j in range(d)] for i in range(d)]
    PHP = [[sum(PH[i][k] * Ph[k][j] for k in range(d)) for j in range(d)] for i in range(d)]
    # shift null(P) eigendirections above any eigenvalue of PHP
    bound = hp(1)
    for i in range(d):
        for j in range(d):
            bound += abs(Hh[i][j])
    M = [[PHP[i][j] + bound * (hp(int(i == j)) - Ph[i][j]) for j in range(d)] for i in range(d)]
    vals, vecs = _jacobi_eigen(M, hp(delta_eig))
    lam, vec = min(zip(vals, vecs), key=lambda t: t[0])
    # re-project and normalize the eigenvector
    pv = [sum(Ph[i][k] * vec[k] for k in range(d)) for i in range(d)]
    norm = hp_sqrt(sum(c * c for c in pv))
    if float(norm) == 0.0:
        return INF, None
    return lam, tuple(c / norm for c in pv)


def is_psd(M: list[list[Fraction]]) -> bool:
    """Exact PSD test for a symmetric rational matrix."""
    A = [[_frac(v) for v in row] for row in M]
    n = len(A)
    live = list(range(n))
    while live:
        piv = max(live, key=lambda i: A[i][i])
        if A[piv][piv] < 0:
            return False
        if A[piv][piv] == 0:
            # all remaining diagonal entries are <= 0 here, i.e. exactly 0;
            # any nonzero off-diagonal entry makes the matrix indefinite
            return all(A[i][j] == 0 for i in live for j in live)
        p = A[piv][piv]
        live.remove(piv)
        for i in live:
            f = A[i][piv] / p
            for j in live:
                A[i][j] -= f * A[piv][j]
    return True


def psd_on_tangent(H, P, eps) -> bool:
    """Exact test that y^T H y >= -eps ||y||^2 for all y in range(P)."""
    d = len(H)
    Hf = [[_frac(H[i][j]) for j in range(d)] for i in range(d)]
    Pf = [[_frac(P[i][j]) for j in range(d)] for i in range(d)]
    PH = [[sum(Pf[i][k] * Hf[k][j] for k in range(d)) for j in range(d)] for i in range(d)]
    PHP = [[sum(PH[i][k] * Pf[k][j] for k in range(d)) for j in range(d)] for i in range(d)]
    M = [[PHP[i][j] + _frac(eps) * Pf[i][j] for j in range(d)] for i in range(d)]
    return is_psd(M)


@dataclass(frozen=True)
class SospReport:
    x: tuple
    gpi_norm: object
    lambda_min: object
    pass_first: bool
    pass_second: bool
    active_indices: tuple[int, ...]

    @property
    def passed(self) -> bool:
        return self.pass_first and self.pass_second


def verify_sosp(objective: Callable, poly: Polytope, x, eps_g, eps_h, L1,
                exact: bool = False, delta_eig=None) -> SospReport:
    """(eps_G, eps_H)-SOSP check at a feasible point.

    objective(x) must return (f, grad, hess).  With exact=True all data must
    be rational and the second-order test is an exact PSD certificate.
    """
    if not poly.contains(x, tol=0 if exact else 1e-9):
        raise ValueError("point is not feasible")
    _, grad, hess = objective(x)
    gpi = proximal_gradient(x, grad, L1, poly)
    act = active_set(poly, x)
    if delta_eig is None:
        delta_eig = min(1e-12, float(eps_h) / 100) if float(eps_h) > 0 else 1e-12
    lam, _ = projected_hessian_min_eig(hess, act.projector, delta_eig)
    if exact:
        sq = sum(_frac(g) * _frac(g) for g in gpi)
        pass_first = sq <= _frac(eps_g) ** 2
        pass_second = (act.dim_null == 0) or psd_on_tangent(hess, act.projector, eps_h)
        gnorm = hp_sqrt(hp(sq))
    else:
        gnorm = hp_sqrt(sum(hp(g) * hp(g) for g in gpi))
        pass_first = gnorm <= hp(eps_g)
        pass_second = (lam == INF) or (lam >= -hp(eps_h))
    return SospReport(x=tuple(x), gpi_norm=gnorm, lambda_min=lam,
                      pass_first=pass_first, pass_second=pass_second,
                      active_indices=act.indices)
