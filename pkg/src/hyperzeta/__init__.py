"""Numerics for Selberg zeta functions, resolvent traces and resonances of
geometrically finite hyperbolic surfaces.

Subpackages by theme:
    hyperbolic   upper half-plane geometry (Mobius maps, distances, collars)
    special      complex special functions and quadrature (Gamma, zeta,
                 Barnes double Gamma, hyperbolic Green's function)
    groups       surface models and primitive geodesic length spectra
    zeta         zeta-type products (Selberg, cylinder, funnel, Hadamard)
    scattering   regularized traces, scattering determinants, wave trace
    locator      argument-principle zero counting and asymptotic inversion
    store        JSON/CSV persistence for spectra, catalogs and reports
    cli          command-line front-end
"""

__version__ = "0.1.0"

from .hyperbolic import (
    MobiusMap,
    HalfPlanePoint,
    Vertical,
    Semicircle,
    classify,
    translation_length,
    sigma,
    geodesic_distance,
    collar_bound,
)
from .special import (
    QuadratureBudget,
    log_gamma,
    digamma,
    trigamma,
    riemann_zeta,
    log_barnes_gamma2,
    greens_function,
    greens_from_delta,
    greens_radial_integral,
)
from .groups import (
    Cylinder,
    Funnel,
    Horn,
    Schottky,
    pants_from_lengths,
    enumerate_primitive_classes,
    counting_function,
    LengthSpectrum,
    PrimitiveClass,
)
from .zeta import (
    TruncationPolicy,
    ResonanceSet,
    zeta_selberg,
    zeta_cylinder,
    zeta_funnel,
    zeta_Y,
    zeta_infinity,
    hadamard_funnel,
    funnel_resonances,
    cylinder_resonances,
    hadamard_resonances,
)
from .scattering import (
    phi_horn,
    phi_horn_quadrature,
    upsilon_horn,
    phi_cylinder,
    phi_funnel,
    upsilon_funnel,
    phi_ups_relation_residual,
    tau_zratio,
    tau_hadamard,
    det_laplacian_log,
    wave_trace_residual,
)
from .locator import (
    ContourBox,
    AsymptoticFit,
    count_zeros,
    locate_zeros,
    invert_asymptotics,
    euler_char_bounds,
)
