"""Discrete grids for the membership reduction: box step sizes, per-face
algebraic lattices over a polytope, and the MapToGrid rounding procedure
with its active-set / feasibility / distance guarantees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from sospgrid._precision import hp, hp_sqrt
from sospgrid.stationarity import Polytope, independent_rows, projector_from_rows, _solve_frac


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, float)):
        return Fraction(x)
    raise ValueError(f"rational value required, got {type(x).__name__}")


def _ceil_sqrt_rational(q: Fraction) -> Fraction:
    """Smallest 'nice' rational upper bound on sqrt(q): ceil-to-1/den grid."""
    if q < 0:
        raise ValueError("negative radicand")
    if q == 0:
        return Fraction(0)
    num, den = q.numerator, q.denominator
    # sqrt(num/den) = sqrt(num*den)/den; round the integer sqrt up
    r = math.isqrt(num * den)
    if r * r < num * den:
        r += 1
    return Fraction(r, den)


def _ceil_int_ge_sqrt(q: Fraction) -> int:
    """Smallest integer k with k^2 >= q (q >= 0)."""
    num, den = q.numerator, q.denominator
    k = math.isqrt(num // den)
    while k * k * den < num:
        k += 1
    return max(k, 1)


def frac_gcd(values: Sequence[Fraction]) -> Fraction:
    g = Fraction(0)
    for v in values:
        v = abs(_frac(v))
        g = v if g == 0 else Fraction(math.gcd(g.numerator * v.denominator,
                                               v.numerator * g.denominator),
                                      g.denominator * v.denominator)
    return g


def box_grid_step(intervals: Sequence[tuple], eps, L_max) -> Fraction:
    """gamma = gamma_GCD / ceil(1000 d^{3/2} L_MAX^3 gamma_GCD / eps^5)."""
    lengths = []
    for a, b in intervals:
        ln = _frac(b) - _frac(a)
        if ln <= 0:
            raise ValueError("intervals must have positive length")
        lengths.append(ln)
    d = len(lengths)
    eps, L = _frac(eps), _frac(L_max)
    if eps <= 0:
        raise ValueError("eps must be positive")
    gcd = frac_gcd(lengths)
    q = 1000 * d * L**3 * gcd / eps**5  # still missing the sqrt(d) factor
    # k = smallest integer >= q * sqrt(d), found via k^2 >= q^2 d
    k = _ceil_int_ge_sqrt(q * q * d)
    return gcd / k


@dataclass(frozen=True)
class FaceFrame:
    indices: tuple[int, ...]
    x_ref: tuple  # minimum-norm solution of A_I x = b_I
    basis: tuple  # orthogonal rational basis of ker(A_I)
    norms_sq: tuple  # squared norms of the basis vectors
    norm_bounds: tuple  # rational upper bounds on the basis norms

    @property
    def dim(self) -> int:
        return len(self.basis)


@lru_cache(maxsize=4096)
def _face_frame_cached(A: tuple, b: tuple, I: tuple) -> FaceFrame:
    d = len(A[0]) if A else 0
    rows = [list(A[j]) for j in I]
    rhs = [b[j] for j in I]
    keep = independent_rows(rows)
    ind_rows = [rows[i] for i in keep]
    ind_rhs = [rhs[i] for i in keep]
    k = len(ind_rows)
    if k == 0:
        x_ref = tuple(Fraction(0) for _ in range(d))
    else:
        gram = [[sum(a * c for a, c in zip(r1, r2)) for r2 in ind_rows] for r1 in ind_rows]
        mult = _solve_frac(gram, ind_rhs)
        if mult is None:
            raise ValueError("degenerate face system")
        x_ref = tuple(sum(mult[i] * ind_rows[i][c] for i in range(k)) for c in range(d))
    for j, (row, r) in enumerate(zip(rows, rhs)):
        if sum(a * c for a, c in zip(row, x_ref)) != r:
            raise ValueError(f"inconsistent face system at constraint {I[j]}")
    # orthogonal basis of ker(A_I): project standard basis, Gram-Schmidt
    P = projector_from_rows(ind_rows, d)
    basis: list[tuple] = []
    norms_sq: list[Fraction] = []
    for i in range(d):
        w = [P[r][i] for r in range(d)]
        for v, nsq in zip(basis, norms_sq):
            dot = sum(a * c for a, c in zip(w, v))
            if dot != 0:
                f = dot / nsq
                w = [a - f * c for a, c in zip(w, v)]
        nsq = sum(c * c for c in w)
        if nsq != 0:
            basis.append(tuple(w))
            norms_sq.append(nsq)
    bounds = tuple(_ceil_sqrt_rational(n) for n in norms_sq)
    return FaceFrame(indices=I, x_ref=x_ref, basis=tuple(basis),
                     norms_sq=tuple(norms_sq), norm_bounds=bounds)


def face_frame(poly: Polytope, I: Sequence[int]) -> FaceFrame:
    """Canonical reference point + orthogonal kernel basis for face I."""
    return _face_frame_cached(poly.A, poly.b, tuple(sorted(I)))


@dataclass(frozen=True)
class RoundingCertificate:
    x_in: tuple
    y_out: tuple
    bounces: tuple  # (constraint index hit, t_min) per ray-shoot
    step_dist_sq: tuple  # squared displacement of each rounding step

    @property
    def bounce_count(self) -> int:
        return len(self.bounces)

    @property
    def total_displacement(self):
        return sum((hp_sqrt(hp(s)) for s in self.step_dist_sq), hp(0))


def _round_to_multiple(c: Fraction, step: Fraction) -> Fraction:
    """Nearest multiple of step; half-way ties round down."""
    q = c / step
    m = (2 * q.numerator + q.denominator) // (2 * q.denominator)
    if Fraction(2 * m - 1, 2) == q:
        m -= 1
    return m * step


def map_to_grid(poly: Polytope, x, delta) -> tuple[tuple, RoundingCertificate]:
    """Round x onto the lattice of its face, ray-shooting on exit (exact)."""
    delta = _frac(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    x0 = tuple(_frac(c) for c in x)
    if not poly.contains(x0):
        raise ValueError("point is not feasible")
    d = poly.d
    cur = x0
    bounces: list[tuple[int, Fraction]] = []
    dists: list[Fraction] = []
    for _ in range(d + 1):
        I = tuple(j for j in range(poly.m) if poly.slack(j, cur) == 0)
        frame = face_frame(poly, I)
        if frame.dim == 0:
            y = frame.x_ref
            break
        diff = [c - r for c, r in zip(cur, frame.x_ref)]
        target = list(frame.x_ref)
        for v, nsq, nu in zip(frame.basis, frame.norms_sq, frame.norm_bounds):
            coeff = sum(a * c for a, c in zip(diff, v)) / nsq
            step = delta / nu  # per-direction step; displacement <= delta/2
            rounded = _round_to_multiple(coeff, step)
            for i in range(d):
                target[i] += rounded * v[i]
        target_t = tuple(target)
        if target_t == cur:
            y = cur
            break
        if poly.contains(target_t):
            dists.append(sum((a - b) * (a - b) for a, b in zip(target_t, cur)))
            y = target_t
            break
        # ray shoot toward the ideal target, stop at the first facet hit
        t_min, j_hit = None, None
        for j in range(poly.m):
            adot = sum(a * (t - c) for a, t, c in zip(poly.A[j], target_t, cur))
            if adot <= 0:
                continue
            t_j = poly.slack(j, cur) / adot
            if t_min is None or t_j < t_min:
                t_min, j_hit = t_j, j
        if t_min is None or t_min >= 1:
            raise ValueError("ray test found no blocking facet for an infeasible target")
        nxt = tuple(c + t_min * (t - c) for c, t in zip(cur, target_t))
        dists.append(sum((a - b) * (a - b) for a, b in zip(nxt, cur)))
        bounces.append((j_hit, t_min))
        cur = nxt
    else:
        raise RuntimeError("rounding did not terminate within d+1 face drops")
    cert = RoundingCertificate(x_in=x0, y_out=tuple(y),
                               bounces=tuple(bounces), step_dist_sq=tuple(dists))
    return tuple(y), cert


def lattice_cardinality_bound(m: int, d: int, diameter, eps_r) -> Fraction:
    """Sum over face dimensions of C(m, d-d') (D d sqrt(d)/eps_r + 1)^{d'}."""
    D, er = _frac(diameter), _frac(eps_r)
    if er <= 0:
        raise ValueError("eps_r must be positive")
    root_d = _ceil_sqrt_rational(Fraction(d))
    per_axis = D * d * root_d / er + 1
    total = Fraction(0)
    for dprime in range(d + 1):
        total += math.comb(m, d - dprime) * per_axis**dprime
    return total
