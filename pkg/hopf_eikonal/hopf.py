"""
The toroidal Hopf maps chi^(m,n) = f(eta) exp(i (m xi + n phi)) solving the static complex eikonal equation.

The profile depends on |m| and |n| only; the phase uses the signed windings.
"""
import cmath
import logging
import math
import sys

import numpy as np
from scipy.optimize import brentq

from hopf_eikonal.coords import _to_toroidal, _frame, _check_regular, to_toroidal
from hopf_eikonal.models import ScalarField, as_array
from hopf_eikonal.utils import setting, reduce_angle, DomainError, NearFocalCircleError

logger = logging.getLogger(__name__)

_LOG_FLOAT_MAX = math.log(sys.float_info.max)


def _check_eta(eta, strict=False):
    if not math.isfinite(eta) or eta < 0 or (strict and eta == 0):
        bound = "positive" if strict else "non-negative"
        raise DomainError(f"eta should be {bound}, got {eta}")


def log_profile_f(spec, eta):
    """ln f(eta), evaluated without forming cosh(eta)^|m|"""
    _check_eta(eta, strict=True)
    big_m, big_n = abs(spec.m), abs(spec.n)
    decay = math.exp(-2.0 * eta)
    log_sinh = eta + math.log1p(-decay) - math.log(2.0)
    # R exp(-eta) with R = sqrt(n^2 + m^2 sinh^2 eta)
    scaled_root = math.hypot(big_n * math.exp(-eta), big_m * 0.5 * (1.0 - decay))
    half_cosh = 0.5 * (1.0 + decay)
    return (
        big_n * log_sinh
        + big_m * (eta + math.log(big_m * half_cosh + scaled_root))
        - big_n * (eta + math.log(big_n * half_cosh + scaled_root))
    )


def _direct_form_fits(spec, eta):
    """Whether every power in the direct closed form stays inside the float range"""
    big_m, big_n = abs(spec.m), abs(spec.n)
    return max(big_m, big_n) * (eta + math.log(2.0 * (big_m + big_n))) < _LOG_FLOAT_MAX


def profile_f(spec, eta, log_space_above=None):
    """
    Closed form profile f(eta) = sinh^|n| (|m| cosh + R)^|m| / (|n| cosh + R)^|n|, R = sqrt(n^2 + m^2 sinh^2).
    f(0) = 0, f is strictly increasing and unbounded. Evaluated in log space above log_space_above, or
    wherever a power of the direct form would overflow.
    """
    _check_eta(eta)
    if eta == 0.0:
        return 0.0
    if eta > setting("ETA_LOG_SPACE", log_space_above) or not _direct_form_fits(spec, eta):
        log_value = log_profile_f(spec, eta)
        if log_value > _LOG_FLOAT_MAX:
            raise NearFocalCircleError(
                f"f(eta={eta}) of {spec.describe()} exceeds the float range (ln f = {log_value:.1f}); "
                "chi is at infinity to working precision"
            )
        return math.exp(log_value)
    big_m, big_n = abs(spec.m), abs(spec.n)
    sinh, cosh = math.sinh(eta), math.cosh(eta)
    root = math.sqrt(spec.n * spec.n + spec.m * spec.m * sinh * sinh)
    return sinh ** big_n * (big_m * cosh + root) ** big_m / (big_n * cosh + root) ** big_n


def profile_log_deriv(spec, eta):
    """d ln f / d eta, by differentiating the closed form term by term"""
    _check_eta(eta, strict=True)
    big_m, big_n = abs(spec.m), abs(spec.n)
    sinh, cosh = math.sinh(eta), math.cosh(eta)
    root = math.sqrt(spec.n * spec.n + spec.m * spec.m * sinh * sinh)
    root_deriv = spec.m * spec.m * sinh * cosh / root
    return (
        big_n * cosh / sinh
        + big_m * (big_m * sinh + root_deriv) / (big_m * cosh + root)
        - big_n * (big_n * sinh + root_deriv) / (big_n * cosh + root)
    )


def ode_rhs(spec, eta):
    """f'/f = sqrt(m^2 + n^2 / sinh^2 eta), the eikonal equation reduced to the profile"""
    _check_eta(eta, strict=True)
    sinh = math.sinh(eta)
    return math.sqrt(spec.m * spec.m + spec.n * spec.n / (sinh * sinh))


def profile_inverse(spec, modulus):
    """The eta at which f(eta) equals modulus"""
    if not modulus > 0 or not math.isfinite(modulus):
        raise DomainError(f"Modulus should be positive and finite, got {modulus}")
    eta_max = setting("ETA_MAX")
    lower, upper = 0.0, 1.0
    while True:
        try:
            value = profile_f(spec, upper)
        except NearFocalCircleError:
            # f(upper) is past the float range, so the root lies below it
            upper = 0.5 * (lower + upper)
            continue
        if value >= modulus:
            break
        if upper >= eta_max:
            raise DomainError(f"Modulus {modulus} lies beyond eta_max (too close to the focal circle)")
        lower, upper = upper, min(2.0 * upper, eta_max)
    return brentq(lambda eta: profile_f(spec, eta) - modulus, lower, upper, xtol=1e-15)


def modulus_phase(value):
    """Polar accessors (S, sigma) of a complex value, sigma in [0, 2pi)"""
    return abs(value), reduce_angle(cmath.phase(value))


def phase_of(spec, t):
    return spec.m * t.xi + spec.n * t.phi


def _evaluate(spec, x, y, z, eta_max):
    eta, xi, phi, on_axis = _to_toroidal(x, y, z, eta_max)
    if on_axis:
        return 0j
    return profile_f(spec, eta) * cmath.exp(1j * (spec.m * xi + spec.n * phi))


def evaluate(spec, p, eta_max=None):
    """
    chi^(m,n) at a Cartesian point. Exactly 0 on the z axis; raises NearFocalCircleError on C, where chi is
    the point at infinity of the Riemann sphere.
    """
    x, y, z = as_array(p)
    return _evaluate(spec, x, y, z, setting("ETA_MAX", eta_max))


def _gradient(spec, eta, xi, phi, profile, log_deriv):
    q = math.cosh(eta) - math.cos(xi)
    e_eta, e_xi, e_phi = _frame(eta, xi, phi)
    value = profile(spec, eta)
    derivative = value * log_deriv(spec, eta)
    phase = cmath.exp(1j * (spec.m * xi + spec.n * phi))
    return (q * phase) * (
        derivative * e_eta
        + (1j * spec.m * value) * e_xi
        + (1j * spec.n * value / math.sinh(eta)) * e_phi
    )


def gradient_analytic(spec, t, eps_q=None, eps_eta=None):
    """
    grad chi = q exp(i(m xi + n phi)) (f' e_eta + i m f e_xi + (i n / sinh eta) f e_phi), Cartesian components
    """
    _check_regular(t.eta, t.xi, setting("EPS_Q", eps_q), setting("EPS_ETA", eps_eta))
    return _gradient(spec, t.eta, t.xi, t.phi, profile_f, profile_log_deriv)


def hopf_field(spec):
    eta_max = setting("ETA_MAX")
    return ScalarField(
        evaluator=lambda p: _evaluate(spec, p[0], p[1], p[2], eta_max),
        provenance=(spec.describe(),),
    )


# The toroidal Hopf map with S = sinh(eta) and the same phase. It is a genuine Hopf map with N_H = nm but
# only solves the eikonal equation for |m| = |n| = 1.


def _naive_profile(spec, eta):
    return math.sinh(eta)


def _naive_log_deriv(spec, eta):
    return math.cosh(eta) / math.sinh(eta)


def naive_evaluate(spec, p, eta_max=None):
    eta, xi, phi, on_axis = _to_toroidal(*as_array(p), setting("ETA_MAX", eta_max))
    if on_axis:
        return 0j
    return math.sinh(eta) * cmath.exp(1j * (spec.m * xi + spec.n * phi))


def naive_gradient(spec, t, eps_q=None, eps_eta=None):
    _check_regular(t.eta, t.xi, setting("EPS_Q", eps_q), setting("EPS_ETA", eps_eta))
    return _gradient(spec, t.eta, t.xi, t.phi, _naive_profile, _naive_log_deriv)


def naive_field(spec):
    eta_max = setting("ETA_MAX")
    return ScalarField(
        evaluator=lambda p: naive_evaluate(spec, p, eta_max),
        provenance=(f"naive {spec.describe()} (S = sinh eta)",),
    )


def level_gradients(spec, p, eta_max=None):
    """
    Modulus, phase and their analytic gradients at p: grad S = Re(exp(-i sigma) grad chi),
    grad sigma = Im(exp(-i sigma) grad chi) / S. Returns (S, sigma, grad_S, grad_sigma, toroidal point).
    """
    t = to_toroidal(p, eta_max)
    _check_regular(t.eta, t.xi, setting("EPS_Q"), setting("EPS_ETA"))
    value = profile_f(spec, t.eta)
    sigma = phase_of(spec, t)
    rotated = _gradient(spec, t.eta, t.xi, t.phi, profile_f, profile_log_deriv) * cmath.exp(-1j * sigma)
    return value, sigma, np.real(rotated), np.imag(rotated) / value, t
