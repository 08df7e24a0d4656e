"""Zeta-type products: Selberg Euler product over a length spectrum,
cylinder/funnel closed forms, the Barnes-double-Gamma topological factor,
and Hadamard products over resonance lattices.

All products are computed as sums of log1p terms; values are exponentiated
only at the API boundary, and analytic term-by-term derivatives (dlog,
d2log, d3log) are provided for the argument-principle and determinant
work downstream. With x = exp(-(s+k) l),

    d/ds   log(1 - x) =  l x / (1-x)
    d2/ds2 log(1 - x) = -l^2 x / (1-x)^2
    d3/ds3 log(1 - x) =  l^3 x (1+x) / (1-x)^3
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import AtZero, IncompleteSpectrum, PoleAtNonPositiveInteger
from .special import log_gamma, log_barnes_gamma2, polygamma

TAIL_TOO_LARGE = "tail-too-large"


@dataclass(frozen=True)
class TruncationPolicy:
    k_max: int = 60
    tail_tol: float = 1e-10
    word_L_max: float = 8.0
    radius: float = 60.0  # Hadamard truncation |zeta| <= radius

    def __post_init__(self):
        if self.k_max < 1:
            raise ValueError("k_max must be >= 1")
        if not (0 < self.tail_tol <= 1e-2):
            raise ValueError("tail_tol must lie in (0, 1e-2]")


DEFAULT_POLICY = TruncationPolicy()


@dataclass(frozen=True)
class ResonanceSet:
    """Finite list of (position, multiplicity) pairs inside a search box.

    box is (re_min, re_max, im_min, im_max) or None; source is one of
    'ClosedForm', 'Located', 'Loaded'.
    """

    points: tuple
    box: tuple | None
    source: str
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        pts = tuple((complex(z), int(m)) for z, m in self.points)
        for _, m in pts:
            if m < 1:
                raise ValueError("multiplicities must be >= 1")
        for i, (z, _) in enumerate(pts):
            for w, _ in pts[i + 1:]:
                if abs(z - w) < 1e-9:
                    raise ValueError(f"points {z} and {w} are not distinct at 1e-9")
        object.__setattr__(self, "points", pts)

    def total_multiplicity(self):
        return sum(m for _, m in self.points)


@dataclass(frozen=True)
class SelbergEval:
    value: complex
    log_value: complex
    k_tail_bound: float
    length_tail_estimate: float
    flags: tuple = ()


# ----------------------------------------------------------------------
# elementary log-product helpers


def _geom_tail(re_s, ell, k_from):
    """bound on sum_{k >= k_from} |log(1 - e^{-(s+k)l})| via |x|/(1-|x|)."""
    x0 = math.exp(-(re_s + k_from) * ell)
    if x0 >= 1.0:
        return math.inf
    return x0 / ((1.0 - math.exp(-ell)) * (1.0 - x0))


def _log_product(s, ell, exponents):
    """sum over the exponent array a of log(1 - e^{-a l}) at a = s + offset."""
    x = -np.exp(-(np.asarray(exponents, dtype=complex)) * ell)
    return complex(np.sum(np.log1p(x)))


def log_zeta_cylinder(s, ell, policy=DEFAULT_POLICY):
    """log Z_M(s), Z_M(s) = prod_{k>=0} (1 - e^{-(s+k)l})^2, with k-tail bound."""
    s = complex(s)
    k = np.arange(0, policy.k_max + 1)
    logz = 2.0 * _log_product(s, ell, s + k)
    tail = 2.0 * _geom_tail(s.real, ell, policy.k_max + 1)
    return logz, tail


def log_zeta_cylinder_array(s, ell, policy=DEFAULT_POLICY):
    """vectorized log Z_M over an array of s (one analytic branch)."""
    s = np.asarray(s, dtype=complex)
    k = np.arange(0, policy.k_max + 1)
    return 2.0 * np.log1p(-np.exp(-(s[..., None] + k) * ell)).sum(axis=-1)


def dlog_zeta_cylinder_array(s, ell, policy=DEFAULT_POLICY):
    s = np.asarray(s, dtype=complex)
    x = np.exp(-(s[..., None] + np.arange(0, policy.k_max + 1)) * ell)
    return 2.0 * (ell * x / (1.0 - x)).sum(axis=-1)


def log_zeta_funnel_array(s, ell, policy=DEFAULT_POLICY):
    """vectorized log Z_F over an array of s (one analytic branch)."""
    s = np.asarray(s, dtype=complex)
    k = np.arange(0, policy.k_max + 1)
    return (-s * ell / 4.0
            + 2.0 * np.log1p(-np.exp(-(s[..., None] + 2 * k + 1) * ell)).sum(axis=-1))


def dlog_zeta_funnel_array(s, ell, policy=DEFAULT_POLICY):
    s = np.asarray(s, dtype=complex)
    x = np.exp(-(s[..., None] + 2 * np.arange(0, policy.k_max + 1) + 1) * ell)
    return -ell / 4.0 + 2.0 * (ell * x / (1.0 - x)).sum(axis=-1)


def zeta_cylinder(s, ell, policy=DEFAULT_POLICY):
    logz, _ = log_zeta_cylinder(s, ell, policy)
    return complex(np.exp(logz))


def _cyl_factor_terms(s, ell, policy, order):
    s = complex(s)
    k = np.arange(0, policy.k_max + 1)
    x = np.exp(-(s + k) * ell)
    if order == 1:
        t = ell * x / (1.0 - x)
    elif order == 2:
        t = -ell ** 2 * x / (1.0 - x) ** 2
    else:
        t = ell ** 3 * x * (1.0 + x) / (1.0 - x) ** 3
    return t


def dlog_zeta_cylinder(s, ell, policy=DEFAULT_POLICY, order=1):
    """order-th s-derivative of log Z_M, term by term."""
    return complex(2.0 * np.sum(_cyl_factor_terms(s, ell, policy, order)))


def log_zeta_funnel(s, ell, policy=DEFAULT_POLICY):
    """log Z_F(s), Z_F(s) = e^{-s l/4} prod_{k>=0} (1 - e^{-(s+2k+1)l})^2."""
    s = complex(s)
    k = np.arange(0, policy.k_max + 1)
    logz = -s * ell / 4.0 + 2.0 * _log_product(s, ell, s + 2 * k + 1)
    # next omitted exponent is s + 2(k_max+1) + 1; the ladder ratio is e^{-2l}
    x0 = math.exp(-(s.real + 2 * policy.k_max + 3) * ell)
    tail = 2.0 * x0 / ((1.0 - math.exp(-2 * ell)) * (1.0 - x0)) if x0 < 1 else math.inf
    return logz, tail


def zeta_funnel(s, ell, policy=DEFAULT_POLICY):
    logz, _ = log_zeta_funnel(s, ell, policy)
    return complex(np.exp(logz))


def _funnel_factor_terms(s, ell, policy, order):
    s = complex(s)
    k = np.arange(0, policy.k_max + 1)
    x = np.exp(-(s + 2 * k + 1) * ell)
    if order == 1:
        return ell * x / (1.0 - x)
    if order == 2:
        return -ell ** 2 * x / (1.0 - x) ** 2
    return ell ** 3 * x * (1.0 + x) / (1.0 - x) ** 3


def dlog_zeta_funnel(s, ell, policy=DEFAULT_POLICY, order=1):
    base = -ell / 4.0 if order == 1 else 0.0
    return complex(base + 2.0 * np.sum(_funnel_factor_terms(s, ell, policy, order)))


def log_zeta_Y(s, funnel_lengths, policy=DEFAULT_POLICY):
    total = 0.0 + 0.0j
    tail = 0.0
    for ell in funnel_lengths:
        lz, t = log_zeta_funnel(s, ell, policy)
        total += lz
        tail += t
    return total, tail


def zeta_Y(s, funnel_lengths, policy=DEFAULT_POLICY):
    lz, _ = log_zeta_Y(s, funnel_lengths, policy)
    return complex(np.exp(lz))


def dlog_zeta_Y(s, funnel_lengths, policy=DEFAULT_POLICY, order=1):
    return sum(dlog_zeta_funnel(s, ell, policy, order) for ell in funnel_lengths)


# ----------------------------------------------------------------------
# Selberg Euler product over a length spectrum


def zeta_selberg(s, spectrum, policy=DEFAULT_POLICY):
    """Euler product over primitive classes of the given LengthSpectrum:
    prod_gamma prod_{k=0}^{k_max} (1 - e^{-(s+k) l(gamma)})^mult.

    Returns a SelbergEval with a rigorous k-tail bound and a heuristic
    estimate for the classes beyond spectrum.L_max (exponential growth
    model calibrated on the counting function)."""
    s = complex(s)
    if not spectrum.entries and not spectrum.complete:
        raise IncompleteSpectrum("empty, incomplete spectrum")
    logz = 0.0 + 0.0j
    ktail = 0.0
    k = np.arange(0, policy.k_max + 1)
    for ell, mult in spectrum.entries:
        logz += mult * _log_product(s, ell, s + k)
        ktail += mult * _geom_tail(s.real, ell, policy.k_max + 1)
    ltail = _length_tail_estimate(s.real, spectrum)
    flags = ()
    if ktail > policy.tail_tol or ltail > policy.tail_tol:
        flags = (TAIL_TOO_LARGE,)
    return SelbergEval(complex(np.exp(logz)), complex(logz), ktail, ltail, flags)


def dlog_zeta_selberg(s, spectrum, policy=DEFAULT_POLICY, order=1):
    s = complex(s)
    k = np.arange(0, policy.k_max + 1)
    total = 0.0 + 0.0j
    for ell, mult in spectrum.entries:
        x = np.exp(-(s + k) * ell)
        if order == 1:
            t = ell * x / (1.0 - x)
        elif order == 2:
            t = -ell ** 2 * x / (1.0 - x) ** 2
        else:
            t = ell ** 3 * x * (1.0 + x) / (1.0 - x) ** 3
        total += mult * np.sum(t)
    return complex(total)


def _length_tail_estimate(re_s, spectrum):
    """Heuristic bound for primitive classes with l > L_max: fit N(L) ~ c e^{dL}
    on the top half of the spectrum, then integrate e^{-Re(s) l} dN."""
    if not spectrum.entries:
        return 0.0
    L = spectrum.L_max
    half = [e for e in spectrum.entries if e[0] >= L / 2]
    n_half = sum(m for _, m in half)
    n_all = sum(m for _, m in spectrum.entries)
    if n_half == 0 or n_half == n_all or L <= 0:
        delta = 0.5
    else:
        delta = max(0.05, min(1.0, math.log(max(n_all, 2) / max(n_all - n_half, 1)) / (L / 2)))
    if re_s <= delta:
        return math.inf
    c = max(n_all, 1) / math.exp(delta * L)
    # integral of e^{-re_s l} c delta e^{delta l} dl from L to infinity
    return c * delta / (re_s - delta) * math.exp(-(re_s - delta) * L)


# ----------------------------------------------------------------------
# topological factor


def log_zeta_infinity(s, chi):
    """log Z_inf(s) with Z_inf(s) = [(2 pi)^s Gamma_2(s)^2 / Gamma(s)]^(-chi)."""
    s = complex(s)
    if chi == 0:
        return 0.0 + 0.0j
    if chi > 0:
        raise ValueError("chi must be <= 0 for these surfaces")
    return -chi * (s * np.log(2 * np.pi) + 2.0 * log_barnes_gamma2(s) - log_gamma(s))


def zeta_infinity(s, chi):
    s = complex(s)
    if chi != 0 and s.imag == 0 and s.real <= 0 and abs(s.real - round(s.real)) < 1e-12:
        raise PoleAtNonPositiveInteger(
            f"Z_inf has a pole of order {(2 * int(-round(s.real)) + 1) * (-chi)} at s = {s.real:g}")
    return complex(np.exp(log_zeta_infinity(s, chi)))


def dlog_zeta_infinity(s, chi, order=1):
    """Derivatives of log Z_inf via Z_inf'/Z_inf = chi (2s-1)(Psi(s) - 1)."""
    s = complex(s)
    if chi == 0:
        return 0.0 + 0.0j
    if order == 1:
        return chi * (2 * s - 1) * (polygamma(0, s) - 1.0)
    if order == 2:
        return chi * (2.0 * (polygamma(0, s) - 1.0) + (2 * s - 1) * polygamma(1, s))
    return chi * (4.0 * polygamma(1, s) + (2 * s - 1) * polygamma(2, s))


# ----------------------------------------------------------------------
# resonance lattices (closed forms) and Hadamard products


def _lattice_in_box(re_values, im_spacing, box):
    re_min, re_max, im_min, im_max = box
    pts = []
    for r in re_values:
        if not (re_min <= r <= re_max):
            continue
        m_lo = math.ceil(im_min / im_spacing - 1e-12)
        m_hi = math.floor(im_max / im_spacing + 1e-12)
        for m in range(m_lo, m_hi + 1):
            pts.append(complex(r, m * im_spacing))
    return pts


def funnel_resonances(ell, box) -> ResonanceSet:
    """All zeta_{k,m} = -(2k+1) + 2 pi i m / l inside the closed box,
    each with multiplicity 2."""
    if not ell > 0:
        raise ValueError("funnel length must be positive")
    re_min = box[0]
    ks = range(0, max(0, int(math.floor((-re_min - 1) / 2))) + 1)
    res = [-(2 * k + 1) for k in ks]
    pts = _lattice_in_box(res, 2 * np.pi / ell, box)
    return ResonanceSet(tuple((z, 2) for z in sorted(pts, key=lambda z: (z.real, z.imag))),
                        tuple(box), "ClosedForm", {"model": f"funnel:{ell:g}"})


def cylinder_resonances(ell, box) -> ResonanceSet:
    """Zeros of Z_M: -k + 2 pi i m / l, multiplicity 2 (one per squared factor)."""
    if not ell > 0:
        raise ValueError("cylinder length must be positive")
    re_min = box[0]
    ks = range(0, max(0, int(math.floor(-re_min))) + 1)
    res = [-float(k) for k in ks]
    pts = _lattice_in_box(res, 2 * np.pi / ell, box)
    return ResonanceSet(tuple((z, 2) for z in sorted(pts, key=lambda z: (z.real, z.imag))),
                        tuple(box), "ClosedForm", {"model": f"cylinder:{ell:g}"})


def _point_arrays(points):
    zs = np.array([z for z, _ in points], dtype=complex)
    ms = np.array([m for _, m in points], dtype=float)
    origin = np.abs(zs) < 1e-9
    return zs[~origin], ms[~origin], int(ms[origin].sum())


def _hadamard_log_terms(s, points):
    """sum of m [log(1 - s/z) + s/z + (s/z)^2/2] plus m0 log s for z ~ 0."""
    s = complex(s)
    zs, ms, m0 = _point_arrays(points)
    r = s / zs
    total = complex(np.sum(ms * (np.log1p(-r) + r + 0.5 * r * r)))
    if m0:
        if s == 0:
            raise AtZero("Hadamard product has a zero of order m0 at s = 0")
        total += m0 * np.log(complex(s))
    return total


@lru_cache(maxsize=64)
def _lattice_ring_sum(ell, radius, odd):
    """sum of 2/|z|^3 over lattice points with radius < |z| <= 4*radius,
    plus the integral estimate beyond."""
    spacing = 2 * np.pi / ell
    re_step = 2.0 if odd else 1.0
    re0 = 1.0 if odd else 0.0
    r_outer = 4.0 * radius
    res = -(re0 + re_step * np.arange(0, int((r_outer - re0) / re_step) + 1))
    m_max = int(r_outer / spacing) + 1
    ims = spacing * np.arange(-m_max, m_max + 1)
    az = np.hypot(res[:, None], ims[None, :])
    ring = float(np.sum(2.0 / az[(az > radius) & (az <= r_outer)] ** 3))
    density = 2.0 / (re_step * spacing)
    return ring + 2 * np.pi * density / r_outer


def _hadamard_tail_bound(s, ell, radius, odd):
    """heuristic bound on the omitted |z| > radius part of a funnel/cylinder
    lattice product: sum of m |s/z|^3 factors, ring-summed then integrated."""
    s_abs = abs(complex(s))
    if s_abs >= radius:
        return math.inf
    return (s_abs ** 3 / 3.0) / (1.0 - s_abs / radius) * _lattice_ring_sum(ell, radius, odd)


@lru_cache(maxsize=64)
def _funnel_lattice_points(ell, radius):
    box = (-radius - 1, 0.0, -radius - 1, radius + 1)
    return tuple((z, m) for z, m in funnel_resonances(ell, box).points
                 if abs(z) <= radius)


def log_hadamard_funnel(s, ell, policy=DEFAULT_POLICY):
    """log P_F(s) over the funnel lattice truncated at |z| <= radius,
    conjugate pairs kept together; returns (log value, tail bound)."""
    R = policy.radius
    logp = _hadamard_log_terms(s, _funnel_lattice_points(ell, R))
    tail = _hadamard_tail_bound(s, ell, R, odd=True)
    return logp, tail


def hadamard_funnel(s, ell, policy=DEFAULT_POLICY):
    logp, _ = log_hadamard_funnel(s, ell, policy)
    return complex(np.exp(logp))


def log_hadamard_resonances(s, rset: ResonanceSet):
    """log P_X(s) = m0 log s + sum m [log(1-s/z) + s/z + s^2/(2 z^2)] over the
    finite set; truncation accounting is the caller's concern."""
    return _hadamard_log_terms(s, rset.points)


def hadamard_resonances(s, rset: ResonanceSet):
    return complex(np.exp(log_hadamard_resonances(s, rset)))


def d3log_hadamard_resonances(s, rset: ResonanceSet):
    """third derivative of log P_X: 2 m0/s^3 - sum m 2/(z-s)^3."""
    s = complex(s)
    zs, ms, m0 = _point_arrays(rset.points)
    total = complex(np.sum(ms * (-2.0) / (zs - s) ** 3))
    if m0:
        total += m0 * 2.0 / s ** 3
    return total


def restrict_to_radius(rset: ResonanceSet, radius) -> ResonanceSet:
    pts = tuple((z, m) for z, m in rset.points if abs(z) <= radius)
    meta = dict(rset.meta)
    meta["truncation_radius"] = radius
    return ResonanceSet(pts, rset.box, rset.source, meta)
