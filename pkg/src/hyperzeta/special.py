"""Complex special functions and quadrature.

Everything downstream leans on this module: principal-branch log Gamma,
polygamma, Riemann zeta (globally convergent alternating series plus the
functional equation), Barnes' double Gamma, and the hyperbolic Green's
function

    g_s(sigma) = (1/4pi) Int_0^1 t^(s-1) (1-t)^(s-1) (sigma-t)^(-s) dt
               = (1/4pi) Gamma(s)^2/Gamma(2s) sigma^(-s) F(s,s;2s;1/sigma)

valid for sigma > 1, Re(s) > 0, together with its integral identities.

Numerical notes:
  * The Green's function is parametrized internally by delta = sigma - 1.
    Forming sigma - 1 from sigma loses all precision once delta < 1e-16,
    and several callers (horn trace, diagonal limits) need delta as small
    as 1e-300; they pass delta (and optionally log delta) directly.
  * Quadrature is double-exponential (tanh-sinh): nodes cluster
    double-exponentially at both endpoints, which is exactly what the
    t^(s-1), (1-t)^(s-1) endpoint behavior requires. Half-infinite ranges
    are mapped by u = tan(theta) with a capped far tail whose dropped mass
    is bounded analytically and added to the reported error.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import loggamma as _loggamma

from .errors import DomainError, PoleAtNonPositiveInteger, PoleAtOne

EULER_GAMMA = float(np.euler_gamma)
# zeta'(-1) = 1/12 - log A  (Glaisher-Kinkelin constant A)
ZETA_PRIME_AT_MINUS_ONE = -0.16542114370045092922

# Bernoulli numbers B_2, B_4, ... used in asymptotic tails
_BERN = [
    1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730,
    7.0 / 6, -3617.0 / 510, 43867.0 / 798, -174611.0 / 330, 854513.0 / 138,
    -236364091.0 / 2730, 8553103.0 / 6,
]


def _bern(n):
    """B_n for even n >= 2."""
    return _BERN[n // 2 - 1]


@dataclass(frozen=True)
class QuadratureBudget:
    max_nodes: int = 40000
    abs_tol: float = 1e-11
    rel_tol: float = 1e-11

    def __post_init__(self):
        if self.max_nodes < 16:
            raise ValueError("max_nodes must be >= 16")
        for t in (self.abs_tol, self.rel_tol):
            if not (0 < t <= 1e-2):
                raise ValueError("tolerances must lie in (0, 1e-2]")


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    error_bound: float
    converged: bool
    nodes_used: int


# ----------------------------------------------------------------------
# Gamma family


def _check_not_nonpositive_integer(s):
    s = complex(s)
    if s.imag == 0 and s.real <= 0 and abs(s.real - round(s.real)) < 1e-14:
        raise PoleAtNonPositiveInteger(f"pole at s = {s.real:g}")


def log_gamma(s) -> complex:
    """Principal branch of log Gamma, continuous off (-inf, 0]."""
    _check_not_nonpositive_integer(s)
    return complex(_loggamma(complex(s)))


def polygamma(m, s) -> complex:
    """Psi^(m)(s) for m in {0, 1, 2}: recurrence ladder into Re >= 15,
    then the Bernoulli asymptotic series; reflection for Re(s) < 1/2."""
    s = complex(s)
    _check_not_nonpositive_integer(s)
    if s.real < 0.5:
        x = 1.0 - s
        if m == 0:
            return polygamma(0, x) - np.pi / np.tan(np.pi * s)
        if m == 1:
            return -polygamma(1, x) + (np.pi / np.sin(np.pi * s)) ** 2
        if m == 2:
            return polygamma(2, x) - 2 * np.pi ** 3 * np.cos(np.pi * s) / np.sin(np.pi * s) ** 3
    shift = 0.0 + 0.0j
    while s.real < 15.0:
        if m == 0:
            shift -= 1.0 / s
        elif m == 1:
            shift += 1.0 / s ** 2
        else:
            shift -= 2.0 / s ** 3
        s = s + 1.0
    if m == 0:
        r = np.log(s) - 0.5 / s
        for k in range(1, 10):
            r -= _bern(2 * k) / (2 * k * s ** (2 * k))
    elif m == 1:
        r = 1.0 / s + 0.5 / s ** 2
        for k in range(1, 10):
            r += _bern(2 * k) / s ** (2 * k + 1)
    else:
        r = -1.0 / s ** 2 - 1.0 / s ** 3
        for k in range(1, 10):
            r -= (2 * k + 1) * _bern(2 * k) / s ** (2 * k + 2)
    return complex(r + shift)


def digamma(s) -> complex:
    return polygamma(0, s)


def trigamma(s) -> complex:
    return polygamma(1, s)


# ----------------------------------------------------------------------
# Riemann zeta


def riemann_zeta(s, terms=64) -> complex:
    """zeta(s) by Cohen-Rodriguez Villegas-Zagier acceleration of the
    alternating (eta) series for Re(s) >= 0, functional equation below.

    Accuracy degrades near the spurious zeros s = 1 + 2 pi i k / log 2 of
    the eta prefactor; all uses here stay far from them.
    """
    s = complex(s)
    if s == 1:
        raise PoleAtOne("zeta has its pole at s = 1")
    if s.real < 0:
        return (2.0 ** s * np.pi ** (s - 1) * np.sin(np.pi * s / 2)
                * np.exp(_loggamma(1 - s)) * riemann_zeta(1 - s, terms))
    n = terms
    d = ((3.0 + np.sqrt(8.0)) ** n + (3.0 - np.sqrt(8.0)) ** n) / 2.0
    b = -1.0
    c = -d
    acc = 0.0 + 0.0j
    for k in range(n):
        c = b - c
        acc += c * (k + 1.0) ** (-s)
        b = (k + n) * (k - n) * b / ((k + 0.5) * (k + 1.0))
    eta = acc / d
    return complex(eta / (1.0 - 2.0 ** (1.0 - s)))


# ----------------------------------------------------------------------
# Barnes double Gamma

_G2_CUT = 12.0
_G2_CONST = ZETA_PRIME_AT_MINUS_ONE - 1.0 / 12.0


def _log_barnes_g_asymptotic(z, nterms=10):
    # log G(z+1) = z^2/4 + z log Gamma(z+1) - (z(z+1)/2 + 1/12) log z
    #              + zeta'(-1) - 1/12 + sum_k B_{2k+2}/(2k(2k+1)(2k+2) z^{2k})
    z = complex(z)
    r = (z * z / 4.0 + z * _loggamma(z + 1.0)
         - (z * (z + 1.0) / 2.0 + 1.0 / 12.0) * np.log(z) + _G2_CONST)
    for k in range(1, nterms + 1):
        r += _bern(2 * k + 2) / (2 * k * (2 * k + 1) * (2 * k + 2) * z ** (2 * k))
    return r


def log_barnes_gamma2(s) -> complex:
    """Branch-consistent log of the double Gamma function Gamma_2, with
    Gamma_2(1) = 1 and Gamma_2(s+1) = Gamma_2(s) / Gamma(s).

    Computed from the asymptotic series for Re(s) >= 12 and carried down
    by the recurrence log Gamma_2(s) = log Gamma_2(s+1) + log Gamma(s), so
    the recurrence holds exactly by construction. The result is one
    analytic branch only up to 2 pi i; downstream work uses exp or
    derivatives, which do not see the branch constant.
    """
    s = complex(s)
    if s.imag == 0 and s.real <= 0 and abs(s.real - round(s.real)) < 1e-14:
        raise PoleAtNonPositiveInteger(f"Gamma_2 pole at s = {s.real:g}")
    shift = 0.0 + 0.0j
    n = max(0, int(np.ceil(_G2_CUT - s.real)))
    for j in range(n):
        shift += _loggamma(s + j)
    return complex(-_log_barnes_g_asymptotic(s + n - 1.0) + shift)


# ----------------------------------------------------------------------
# tanh-sinh quadrature on (0, 1)

_DE_UMAX = 6.0


@lru_cache(maxsize=32)
def _de_grid(level):
    """Nodes/weights for step h = 2^-level on (0,1).

    Returns (t, 1-t, w) with t computed in the stable logistic form so
    that 1-t never rounds to 0."""
    h = 1.0 / 2 ** level
    n = int(_DE_UMAX / h)
    u = np.arange(-n, n + 1) * h
    q = np.pi / 2 * np.sinh(u)
    # |q| < 140 keeps t and 1-t in normal float range (>= ~1e-122), deep
    # enough for any integrable endpoint singularity
    keep = np.abs(q) < 140.0
    u, q = u[keep], q[keep]
    t = 1.0 / (1.0 + np.exp(-2.0 * q))
    omt = 1.0 / (1.0 + np.exp(2.0 * q))
    w = (np.pi / 2) * np.cosh(u) / np.cosh(q) ** 2
    for arr in (t, omt, w):
        arr.flags.writeable = False
    return t, omt, w, h


def tanh_sinh_01(f, budget: QuadratureBudget = QuadratureBudget()) -> QuadratureResult:
    """Integrate f over (0,1); f(t, one_minus_t) must be vectorized.

    Levels are doubled until successive values differ by less than the
    budget tolerances or the node budget runs out (flagged, best value
    returned)."""
    prev = None
    nfev = 0
    val = 0.0 + 0.0j
    err = np.inf
    for level in range(3, 13):
        t, omt, w, h = _de_grid(level)
        if nfev + len(t) > budget.max_nodes and prev is not None:
            return QuadratureResult(val, err, False, nfev)
        fv = f(t, omt)
        nfev += len(t)
        val = complex(np.sum(fv * w) * h / 2.0)
        if prev is not None:
            err = abs(val - prev)
            if err <= max(budget.abs_tol, budget.rel_tol * abs(val)):
                return QuadratureResult(val, err, True, nfev)
        prev = val
    return QuadratureResult(val, err, False, nfev)


# ----------------------------------------------------------------------
# Green's function: series, quadrature, tail integrals


def _greens_log_prefactor(s):
    # log of (1/4pi) Gamma(s)^2 / Gamma(2s)
    return 2.0 * _loggamma(s) - _loggamma(2.0 * s) - np.log(4.0 * np.pi)


def greens_from_delta(s, delta, log_delta=None, nmax=600, tol=1e-16):
    """g_s(1 + delta) by hypergeometric series, vectorized over delta > 0.

    For delta >= 1 the defining series in 1/sigma is used; for delta < 1
    the logarithmic connection series in w = delta/(1+delta), which
    converges geometrically with ratio < 1/2 on that range. Callers with
    sub-underflow delta pass log_delta.
    """
    s = complex(s)
    if s.real <= 0:
        raise DomainError("greens function needs Re(s) > 0")
    delta = np.asarray(delta, dtype=float)
    scalar = delta.ndim == 0
    delta = np.atleast_1d(delta).astype(float)
    if log_delta is None:
        # floor keeps sub-underflow deltas finite; callers that need the true
        # magnitude below 1e-308 pass log_delta themselves
        log_delta = np.log(np.maximum(delta, 1e-308))
    else:
        log_delta = np.atleast_1d(np.asarray(log_delta, dtype=float))
    out = np.empty(delta.shape, dtype=complex)
    far = delta >= 1.0
    if far.any():
        sg = 1.0 + delta[far]
        z = 1.0 / sg
        term = np.ones_like(z, dtype=complex)
        acc = term.copy()
        for n in range(nmax):
            term = term * ((s + n) * (s + n)) / ((2 * s + n) * (n + 1)) * z
            acc += term
            if np.all(np.abs(term) <= tol * np.abs(acc)):
                break
        out[far] = np.exp(_greens_log_prefactor(s) - s * np.log(sg) + np.log(acc))
    near = ~far
    if near.any():
        d = delta[near]
        lw = log_delta[near] - np.log1p(d)  # log(delta/(1+delta))
        w = np.exp(lw)
        coef = np.ones_like(d, dtype=complex)
        psi_n1 = -EULER_GAMMA
        psi_sn = polygamma(0, s)
        acc = (2 * psi_n1 - 2 * psi_sn - lw) * coef
        for n in range(nmax):
            coef = coef * ((s + n) / (n + 1)) ** 2 * w
            psi_n1 += 1.0 / (n + 1)
            psi_sn += 1.0 / (s + n)
            t = (2 * psi_n1 - 2 * psi_sn - lw) * coef
            acc += t
            if np.all(np.abs(t) <= tol * np.maximum(np.abs(acc), 1e-300)):
                break
        out[near] = np.exp(-s * np.log1p(d)) / (4 * np.pi) * acc
    return complex(out[0]) if scalar else out


def greens_function(s, sigma, budget: QuadratureBudget = QuadratureBudget(),
                    sigma_minus_1=None) -> QuadratureResult:
    """g_s(sigma) by tanh-sinh quadrature of the Euler integral.

    The independent series route is greens_from_delta; the two are
    cross-checked in the test suite. Pass sigma_minus_1 when sigma is
    so close to 1 that forming sigma - 1 would lose precision.
    """
    s = complex(s)
    if sigma_minus_1 is None:
        sigma_minus_1 = float(sigma) - 1.0
    delta = float(sigma_minus_1)
    if s.real <= 0 or delta <= 0:
        raise DomainError(f"need Re(s) > 0 and sigma > 1, got s={s}, sigma-1={delta}")

    def integrand(t, omt):
        # t^(s-1) (1-t)^(s-1) (sigma-t)^(-s); sigma - t = delta + (1-t)
        return np.exp((s - 1) * np.log(t) + (s - 1) * np.log(omt)
                      - s * np.log(delta + omt))

    res = tanh_sinh_01(integrand, budget)
    return QuadratureResult(res.value / (4 * np.pi), res.error_bound / (4 * np.pi),
                            res.converged, res.nodes_used)


def greens_tail_integrals(s, a_values, scale=1.0, log_weight_base=None,
                          budget: QuadratureBudget = QuadratureBudget()):
    """Batched Q(a) = Int_a^inf g_s(scale*(1+u^2)) [* log(u/b0)] du.

    Substitution u = a + tan(theta) on theta in (0, pi/2); the far tail
    where g has entered its power law sigma^(-s) is evaluated in log
    space and capped, with the dropped mass bounded analytically and
    reported. Requires Re(s) > 1/2 for convergence.
    """
    s = complex(s)
    if s.real <= 0.5:
        raise DomainError("tail integrals need Re(s) > 1/2")
    a_values = np.asarray(a_values, dtype=float)
    lpref = _greens_log_prefactor(s)
    two_res_m1 = 2.0 * s.real - 1.0
    logt_cap = min(46.0 / two_res_m1, 600.0 / max(2.0 - 2.0 * s.real, 0.05))
    # the node grid itself only reaches log(tan) ~ 280; report whichever
    # horizon binds. Dropped tail ~ C T^(1-2Re s)/(2Re s - 1).
    horizon = min(logt_cap, 280.0)
    tail_drop = np.exp(lpref.real - two_res_m1 * horizon) / two_res_m1

    prev = None
    nfev = 0
    for level in range(3, 12):
        t, omt, w, h = _de_grid(level)
        comp = omt * (np.pi / 2)
        with np.errstate(divide="ignore"):
            logtan = np.where(comp > 1e-8,
                              np.log(np.abs(np.tan(np.pi / 2 * np.minimum(t, 1 - 1e-9)))),
                              -np.log(np.maximum(comp, 1e-320)))
        keep = logtan <= logt_cap
        lt, ww = logtan[keep], w[keep]
        tt = np.exp(lt)
        nfev += len(tt) * len(a_values)
        u = a_values[:, None] + tt[None, :]
        nearcol = lt < 115.0  # u*u stays finite
        gv = np.empty(u.shape, dtype=complex)
        if nearcol.any():
            un = u[:, nearcol]
            gv[:, nearcol] = greens_from_delta(s, scale * un * un + (scale - 1.0))
        if (~nearcol).any():
            gv[:, ~nearcol] = np.exp(lpref - s * (np.log(scale) + 2 * lt[None, ~nearcol]))
        if log_weight_base is not None:
            lu = np.where(nearcol[None, :], np.log(np.maximum(u, 1e-300)), lt[None, :])
            gv = gv * (lu - np.log(log_weight_base))
        jac = np.where(nearcol, 1.0 + tt * tt, np.exp(np.minimum(2 * lt, 700.0)))
        vals = (gv * (jac * ww)[None, :]).sum(axis=1) * h * (np.pi / 4.0)
        if prev is not None:
            diff = np.max(np.abs(vals - prev))
            if diff <= max(budget.abs_tol, budget.rel_tol * np.max(np.abs(vals))):
                return vals, diff + tail_drop, True, nfev
            if nfev >= budget.max_nodes * max(1, len(a_values)):
                return vals, diff + tail_drop, False, nfev
        prev = vals
    return vals, np.max(np.abs(vals - prev)) + tail_drop, False, nfev


def greens_radial_integral(s, kappa, budget: QuadratureBudget = QuadratureBudget()) -> QuadratureResult:
    """(2s-1) Int_{-inf}^{inf} g_s((1+t^2)(1+kappa)^2/(4 kappa)) dt.

    Equals max(kappa, 1/kappa)^(1/2-s) / (kappa^(1/2) + kappa^(-1/2));
    this function computes the left side by direct quadrature.
    """
    s = complex(s)
    if s.real <= 0.5:
        raise DomainError("radial integral needs Re(s) > 1/2")
    if not kappa > 0:
        raise DomainError("kappa must be positive")
    c = (1.0 + kappa) ** 2 / (4.0 * kappa)
    vals, err, ok, nfev = greens_tail_integrals(s, np.array([0.0]), scale=c, budget=budget)
    v = 2.0 * (2.0 * s - 1.0) * vals[0]
    return QuadratureResult(complex(v), float(abs(2 * (2 * s - 1)) * err), ok, nfev)
