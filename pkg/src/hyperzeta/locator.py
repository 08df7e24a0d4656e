"""Argument-principle zero counting and localization, plus the
inverse-spectral asymptotic fit.

Winding numbers are computed from the analytic log accessors themselves:
the zeta-engine log values are single analytic branches away from zeros,
so the winding of f around a closed contour is the total unwrapped change
of Im(log f) divided by 2 pi. Edge sampling is refined adaptively until
consecutive phase steps are unambiguous (< pi/2); zeros on the boundary
are detected through a |f| threshold and handled by a deterministic
outward jitter of the box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (ConvergenceFailure, EmptyRange, IllConditionedFit,
                     NonIntegerWinding, ZeroOnBoundary)
from .zeta import ResonanceSet

JITTER = 1e-3


@dataclass(frozen=True)
class ContourBox:
    re_min: float
    re_max: float
    im_min: float
    im_max: float
    edge_samples: int = 128

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError("box must have nonempty interior")
        if self.edge_samples < 64:
            raise ValueError("edge_samples must be >= 64")

    @property
    def corners(self):
        return (complex(self.re_min, self.im_min), complex(self.re_max, self.im_min),
                complex(self.re_max, self.im_max), complex(self.re_min, self.im_max))

    def expanded(self, d):
        return ContourBox(self.re_min - d, self.re_max + d,
                          self.im_min - d, self.im_max + d, self.edge_samples)

    def contains(self, z, slack=0.0):
        return (self.re_min - slack <= z.real <= self.re_max + slack
                and self.im_min - slack <= z.imag <= self.im_max + slack)

    def quadrants(self):
        cx = 0.5 * (self.re_min + self.re_max)
        cy = 0.5 * (self.im_min + self.im_max)
        return [ContourBox(self.re_min, cx, self.im_min, cy, self.edge_samples),
                ContourBox(cx, self.re_max, self.im_min, cy, self.edge_samples),
                ContourBox(self.re_min, cx, cy, self.im_max, self.edge_samples),
                ContourBox(cx, self.re_max, cy, self.im_max, self.edge_samples)]

    @property
    def diameter(self):
        return math.hypot(self.re_max - self.re_min, self.im_max - self.im_min)


@dataclass
class AnalyticLogHandle:
    """Function handle for the locator: log_f(z_array) -> array of one
    analytic branch of log f; dlog(z) optional (f'/f) for Newton."""

    log_f: object
    dlog: object = None
    label: str = ""

    def logf(self, z):
        return np.asarray(self.log_f(np.asarray(z, dtype=complex)), dtype=complex)


@dataclass(frozen=True)
class AsymptoticFit:
    chi_est: float
    n_c_est: float
    quad_coeffs: tuple
    log_coeff: float
    residual: float

    def rounded(self, tol=0.2):
        chi = round(self.chi_est)
        ncusp = round(self.n_c_est)
        if abs(chi - self.chi_est) > tol or abs(ncusp - self.n_c_est) > tol:
            raise IllConditionedFit(
                f"estimates not within {tol} of integers: chi={self.chi_est}, n_C={self.n_c_est}")
        return chi, ncusp


def _contour_points(box: ContourBox, per_edge):
    pts = []
    cs = box.corners
    for i in range(4):
        a, b = cs[i], cs[(i + 1) % 4]
        t = np.linspace(0.0, 1.0, per_edge, endpoint=False)
        pts.append(a + (b - a) * t)
    z = np.concatenate(pts)
    return np.append(z, z[0])


def _winding(handle: AnalyticLogHandle, box: ContourBox, max_refine=8):
    z = _contour_points(box, box.edge_samples)
    for _ in range(max_refine):
        L = handle.logf(z)
        if not np.all(np.isfinite(L)):
            raise ZeroOnBoundary("log f not finite on the contour")
        dphi = np.diff(np.imag(L))
        dphi = np.mod(dphi + np.pi, 2 * np.pi) - np.pi
        if np.max(np.abs(dphi)) < 0.5 * np.pi:
            return dphi.sum() / (2 * np.pi)
        znew = np.empty(2 * len(z) - 1, dtype=complex)
        znew[0::2] = z
        znew[1::2] = 0.5 * (z[:-1] + z[1:])
        z = znew
    raise NonIntegerWinding("phase steps never resolved; zero too close to an edge?")


def _boundary_clear(handle, box, threshold):
    z = _contour_points(box, box.edge_samples)
    L = handle.logf(z)
    return np.all(np.isfinite(L)) and np.min(np.real(L)) > math.log(threshold)


def count_zeros(handle: AnalyticLogHandle, box: ContourBox,
                min_boundary_abs=1e-12) -> int:
    """Number of zeros inside the box, with multiplicity, by the argument
    principle. Requires f nonvanishing on the boundary; a boundary hit
    raises ZeroOnBoundary (callers may expand the box)."""
    if not _boundary_clear(handle, box, min_boundary_abs):
        raise ZeroOnBoundary("|f| below threshold on an edge sample")
    w = _winding(handle, box)
    n = round(w)
    if abs(w - n) > 0.25:
        raise NonIntegerWinding(f"winding {w} too far from an integer")
    return int(n)


def _count_with_jitter(handle, box):
    try:
        return count_zeros(handle, box), box
    except (ZeroOnBoundary, NonIntegerWinding):
        jbox = box.expanded(min(JITTER, 0.05 * box.diameter))
        return count_zeros(handle, jbox), jbox


def _newton_polish(handle, z0, mult, tol, radius, max_iter=60):
    z = complex(z0)
    if handle.dlog is None:
        return _local_min_polish(handle, z0, tol, radius)
    for _ in range(max_iter):
        d = complex(np.asarray(handle.dlog(np.array([z])), dtype=complex).ravel()[0])
        if d == 0 or not np.isfinite(d):
            return _local_min_polish(handle, z, tol, radius)
        step = mult / d
        z = z - step
        if abs(step) < tol * 0.1:
            return z
    return z


def _local_min_polish(handle, z0, tol, radius):
    # fallback: shrink a stencil around the minimum of |f| = exp(Re log f)
    z = complex(z0)
    h = max(radius, 4 * tol)
    while h > 0.02 * tol:
        cand = z + h * np.array([0, 1, -1, 1j, -1j, 1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j])
        vals = np.real(handle.logf(cand))
        z = complex(cand[int(np.argmin(vals))])
        h *= 0.55
    return z


def locate_zeros(handle: AnalyticLogHandle, box: ContourBox, tol=1e-8,
                 source="Located") -> ResonanceSet:
    """All zeros in the (closed) box with multiplicities: recursive
    quadrisection until each sub-box carries at most 2 countable zeros and
    is smaller than 1e-2, then multiplicity-aware Newton polishing on
    m/dlog. Boundary zeros of the original box are captured by the
    deterministic jitter expansion."""
    total, work_box = _count_with_jitter(handle, box)
    queue = [(work_box, total)]
    found = []
    while queue:
        b, n = queue.pop()
        if n == 0:
            continue
        if n <= 2 and b.diameter < 1e-2:
            z = _newton_polish(handle, complex(0.5 * (b.re_min + b.re_max),
                                               0.5 * (b.im_min + b.im_max)), n, tol,
                               radius=b.diameter)
            found.append((z, n, b))
            continue
        if b.diameter < 64 * tol:
            raise ConvergenceFailure("sub-box not separable", box=b)
        # jittered sub-boxes may overlap; duplicates are merged by position below
        for q in b.quadrants():
            try:
                c, qq = _count_with_jitter(handle, q)
            except (ZeroOnBoundary, NonIntegerWinding) as exc:
                raise ConvergenceFailure(f"sub-box count failed: {exc}", box=q)
            if c:
                queue.append((qq, c))
    # merge duplicates from overlapping jittered boxes
    merged = []
    for z, n, b in found:
        for i, (zm, nm) in enumerate(merged):
            if abs(z - zm) < 1e-6:
                merged[i] = (zm, max(nm, n))
                break
        else:
            merged.append((z, n))
    pts = [(z, m) for z, m in merged if box.contains(z, slack=2 * JITTER)]
    pts.sort(key=lambda p: (p[0].real, p[0].imag))
    rs = ResonanceSet(tuple(pts), (box.re_min, box.re_max, box.im_min, box.im_max),
                      source, {"tol": tol, "label": handle.label})
    recount = count_zeros(handle, work_box)
    if rs.total_multiplicity() != recount:
        raise ConvergenceFailure(
            f"located multiplicities {rs.total_multiplicity()} != contour count {recount}",
            box=work_box)
    return rs


# ----------------------------------------------------------------------
# inverse-spectral asymptotics


def invert_asymptotics(samples) -> AsymptoticFit:
    """Least-squares fit of log P samples on a real ray against

        a s^2 log s + b s log s + c2 s^2 + c1 s + c0 + d log s.

    With log P = log Z_X + log Z_inf - n_C log Gamma(s-1/2), the s^2 log s
    coefficient of log Z_inf equals the Euler characteristic and the
    s log s coefficient is -chi - n_C, so chi_est = a and
    n_C_est = -a - b. (Columns are norm-scaled before solving; the fit is
    exact on synthetic data from its own model class.)
    """
    pts = [(float(np.real(s)), float(np.real(v))) for s, v in samples]
    if len(pts) < 12:
        raise IllConditionedFit("need at least 12 sample points")
    s = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    if np.min(s) < 10.0:
        raise IllConditionedFit("samples must lie on a real ray with s >= 10")
    cols = np.stack([s * s * np.log(s), s * np.log(s), s * s, s,
                     np.ones_like(s), np.log(s)], axis=1)
    scale = np.linalg.norm(cols, axis=0)
    coef, _, rank, _ = np.linalg.lstsq(cols / scale, y, rcond=None)
    coef = coef / scale
    pred = cols @ coef
    resid = float(np.max(np.abs(pred - y)))
    if rank < 6:
        raise IllConditionedFit("rank-deficient design matrix")
    a, b, c2, c1, c0, d = (float(c) for c in coef)
    return AsymptoticFit(chi_est=a, n_c_est=-a - b, quad_coeffs=(c2, c1, c0),
                         log_coeff=d, residual=resid)


def funnel_zeta_handle(ell, policy=None) -> AnalyticLogHandle:
    """Vectorized locator handle for Z_F(., ell) with analytic dlog."""
    from .zeta import DEFAULT_POLICY, dlog_zeta_funnel_array, log_zeta_funnel_array
    pol = policy or DEFAULT_POLICY
    return AnalyticLogHandle(lambda z: log_zeta_funnel_array(z, ell, pol),
                             dlog=lambda z: dlog_zeta_funnel_array(z, ell, pol),
                             label=f"zeta_funnel[l={ell:g}]")


def cylinder_zeta_handle(ell, policy=None) -> AnalyticLogHandle:
    """Vectorized locator handle for Z_M(., ell) with analytic dlog."""
    from .zeta import DEFAULT_POLICY, dlog_zeta_cylinder_array, log_zeta_cylinder_array
    pol = policy or DEFAULT_POLICY
    return AnalyticLogHandle(lambda z: log_zeta_cylinder_array(z, ell, pol),
                             dlog=lambda z: dlog_zeta_cylinder_array(z, ell, pol),
                             label=f"zeta_cylinder[l={ell:g}]")


def euler_char_bounds(orders):
    """Integer range of Euler characteristics consistent with observed
    orders of zeros at s = -k: 0 >= chi >= -order/(2k+1).

    orders: iterable of (k, order). Returns (chi_min, chi_max) with
    chi_min = None when unbounded below (empty input)."""
    lo = None
    for k, order in orders:
        if k < 0 or order < 0:
            raise ValueError("need k >= 0 and order >= 0")
        bound = -order / (2 * k + 1)
        cand = math.ceil(bound - 1e-12)
        lo = cand if lo is None else max(lo, cand)
    if lo is None:
        return (None, 0)
    if lo > 0:
        raise EmptyRange("orders force chi > 0, inconsistent with chi <= 0")
    return (lo, 0)
