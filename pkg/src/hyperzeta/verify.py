"""Scripted verification suites: each check evaluates one identity at desk
scale and reports (residual, tolerance, pass/fail). Identity names follow
the anchors used throughout the library so reports are traceable.
"""

from __future__ import annotations

import math

import numpy as np

from .groups import Cylinder, Funnel, Horn
from .locator import ContourBox, funnel_zeta_handle, locate_zeros
from .scattering import (phi_cylinder, phi_funnel, phi_funnel_image_sum,
                         phi_horn, phi_horn_quadrature, phi_ups_relation_residual,
                         tau_hadamard_d3log, tau_zratio, upsilon_horn)
from .special import (QuadratureBudget, greens_from_delta, greens_function,
                      greens_radial_integral, log_gamma, riemann_zeta, trigamma)
from .zeta import (TruncationPolicy, cylinder_resonances, funnel_resonances,
                   log_hadamard_funnel, log_zeta_cylinder, log_zeta_funnel,
                   log_zeta_infinity, zeta_selberg)
from .groups import enumerate_primitive_classes


def _check(identity, residual, tolerance, detail=""):
    return {
        "identity": identity,
        "residual": float(abs(residual)),
        "tolerance": float(tolerance),
        "passed": bool(abs(residual) <= tolerance),
        "detail": detail,
    }


def _third_deriv_fd(f, s0, h):
    """f'''(s0): centered 6-point stencil, O(h^4)."""
    c = {-3: 1 / 8, -2: -1.0, -1: 13 / 8, 1: -13 / 8, 2: 1.0, 3: -1 / 8}
    return sum(w * f(s0 + k * h) for k, w in c.items()) / h ** 3


def _third_divdiff(f, s0, h):
    """third divided difference over s0, s0+h, .., s0+3h (= f'''/6 + O(h^2))."""
    v = [f(s0 + j * h) for j in range(4)]
    return (v[3] - 3 * v[2] + 3 * v[1] - v[0]) / (6 * h ** 3)


def suite_appendix():
    checks = []
    budget = QuadratureBudget()
    # Euler-integral quadrature vs hypergeometric series
    for s, sig in ((0.5 + 5j, 1.5), (2 + 1j, 1.01), (1.0, 2.0)):
        q = greens_function(s, sig, budget)
        ser = greens_from_delta(s, sig - 1.0)
        checks.append(_check(f"gs-formula[s={s}, sigma={sig}]", q.value - ser, 1e-8))
    # radial integral closed form
    for s in (1.0, 0.75 + 2j):
        for kappa in (1.0, math.e, 10.0):
            lhs = greens_radial_integral(s, kappa, budget).value
            rhs = max(kappa, 1 / kappa) ** (0.5 - complex(s)) / (kappa ** 0.5 + kappa ** -0.5)
            checks.append(_check(f"gs-int[s={s}, kappa={kappa:.3g}]", lhs - rhs, 1e-6))
    # normalized half-line integral 4(2s-1) Int_0^inf = 1, i.e. twice the
    # full-line value at kappa = 1
    for s in (1.0, 0.75):
        v = 2.0 * greens_radial_integral(s, 1.0, budget).value
        checks.append(_check(f"gs-int2[s={s}]", v - 1.0, 1e-6))
    # diagonal difference -> (1/2) cot(pi s)
    for s in (0.3, 0.6):
        d = 1e-6
        lhs = greens_from_delta(s, d) - greens_from_delta(1 - s, d)
        checks.append(_check(f"ghgh-diag[s={s}]", lhs - 0.5 / math.tan(math.pi * s), 1e-5))
    # s-derivative at the diagonal -> -Psi'(s)/(2 pi)
    for s in (0.8, 1.3):
        h, d = 1e-5, 1e-9
        fd = (greens_from_delta(s + h, d) - greens_from_delta(s - h, d)) / (2 * h)
        checks.append(_check(f"rsq-diag[s={s}]", fd + trigamma(s) / (2 * np.pi), 1e-5))
    # cusp residue cancellation: (2s-1) Gamma(s)^2 4^s zeta(2s) / (2 pi Gamma(2s)) -> 1
    for s in (0.5 + 1e-4, 0.5 - 1e-4):
        v = ((2 * s - 1) * np.exp(2 * log_gamma(s) - log_gamma(2 * s)) * 4 ** s
             * riemann_zeta(2 * s) / (2 * np.pi))
        checks.append(_check(f"cusp-res[s={s:.5g}]", v - 1.0, 1e-3))
    # horn trace, end to end
    rep = phi_horn_quadrature(1.0)
    checks.append(_check("horn-quadrature[s=1]", rep.value - phi_horn(1.0), 1e-3,
                         f"error estimate {rep.error_estimate:.2e}"))
    return checks


def suite_traces():
    checks = []
    checks.append(_check("phi-ups-relation[horn,s=1]",
                         phi_ups_relation_residual(1.0, Horn()), 1e-12))
    checks.append(_check("phi-ups-relation[funnel l=2,s=0.8+2i]",
                         phi_ups_relation_residual(0.8 + 2j, Funnel(2.0)), 1e-10))
    checks.append(_check("phi-ups-relation[cylinder l=1,s=0.75]",
                         phi_ups_relation_residual(0.75, Cylinder(1.0)), 1e-10))
    for eps in (1e-4, 1e-6):
        checks.append(_check(f"horn-residue[eps={eps:g}]", 2 * eps * phi_horn(0.5 + eps) - 1.0,
                             2e-3, "2(s-1/2) Phi_H -> 1"))
    s = 0.37 + 1.2j
    checks.append(_check("upsilon-horn-symmetry", upsilon_horn(s) - upsilon_horn(1 - s), 1e-12))
    pol = TruncationPolicy(k_max=120)
    for s in (1.0, 2.0 + 1j):
        lhs = phi_funnel(s, 2.0, pol) + 2.0 / 4.0
        rhs = phi_funnel_image_sum(s, 2.0)
        checks.append(_check(f"funnel-image-resummation[s={s}]", lhs - rhs, 1e-10))
    return checks


def suite_zeta():
    checks = []
    pol = TruncationPolicy(k_max=120, radius=60.0)
    # small funnel lattice window
    handle = funnel_zeta_handle(math.pi, pol)
    rs = locate_zeros(handle, ContourBox(-2.0, 0.0, 1.0, 3.0), tol=1e-9)
    want = complex(-1.0, 2.0)
    if len(rs.points) == 1 and rs.points[0][1] == 2:
        checks.append(_check("polarset-lattice[l=pi box]", rs.points[0][0] - want, 1e-8,
                             "single double zero at -1+2i"))
    else:
        checks.append(_check("polarset-lattice[l=pi box]", math.inf, 1e-8,
                             f"unexpected set {rs.points}"))
    # Euler product on the cylinder spectrum == closed form
    cyl = Cylinder(1.0)
    spec = enumerate_primitive_classes(cyl, 5.0)
    for s in (2.0, 1.5 + 2j):
        ev = zeta_selberg(s, spec, pol)
        lz, _ = log_zeta_cylinder(s, 1.0, pol)
        checks.append(_check(f"cylinder-selberg[s={s}]", ev.log_value - lz, 1e-12))
    # Z_inf reflection via finite differences
    for s, chi in ((0.3, -1), (0.62, -2)):
        h = 1e-5
        fd = (log_zeta_infinity(s + h, chi) - log_zeta_infinity(1 - s - h, chi)
              - log_zeta_infinity(s - h, chi) + log_zeta_infinity(1 - s + h, chi)) / (2 * h)
        rhs = -chi * (2 * s - 1) * np.pi / np.tan(np.pi * s)
        checks.append(_check(f"zinf-reflection[s={s}, chi={chi}]", fd - rhs, 1e-6))
    # funnel factorization: log Z_F - log P_F has (truncation-limited)
    # vanishing third divided differences, decaying ~ 1/R
    for R, tol in ((60.0, 5e-3), (200.0, 1.5e-3)):
        polR = TruncationPolicy(k_max=120, radius=R)
        f = lambda s: (log_zeta_funnel(s, 2.0, polR)[0]
                       - log_hadamard_funnel(s, 2.0, polR)[0])
        checks.append(_check(f"eq-YPZ[l=2, R={R:g}]", _third_divdiff(f, 1.2, 0.3), tol))
    return checks


def suite_tau():
    checks = []
    pol = TruncationPolicy(k_max=120, radius=60.0)
    cyl = Cylinder(1.0)
    rset = cylinder_resonances(1.0, (-60.5, 0.7, -60.0, 60.0))
    for s0 in (0.3 + 1.5j, 0.7 + 2.5j):
        dz = _third_deriv_fd(lambda s: tau_zratio(s, cyl, pol), s0, 0.1)
        dh = tau_hadamard_d3log(s0, rset, cyl.funnel_lengths, pol)
        checks.append(_check(f"tau-two-form[s={s0}]", dz - dh, 1e-2))
    # antisymmetry: log tau(s) + log tau(1-s) is constant
    g = lambda s: tau_zratio(s, cyl, pol) + tau_zratio(1 - s, cyl, pol)
    fd = (g(0.41 + 0.3j) - g(0.38 + 0.3j)) / 0.03
    checks.append(_check("tau-antisymmetry", fd, 1e-8))
    return checks


SUITES = {
    "appendix": suite_appendix,
    "traces": suite_traces,
    "zeta": suite_zeta,
    "tau": suite_tau,
}


def run_suite(name):
    if name == "all":
        out = []
        for key in ("appendix", "traces", "zeta", "tau"):
            out.extend(SUITES[key]())
        return out
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; have {sorted(SUITES)} and 'all'")
    return SUITES[name]()
