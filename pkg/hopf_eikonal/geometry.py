"""
Vertical/horizontal splitting of R^3 induced by chi^(m,n) and the conformal comparison of the horizontal metric
with the target metric d rho^2 + rho^2 d phi^2.

Frames are unit vectors of the Euclidean metric. The (dS, d sigma) basis comes from finite differences of
modulus and phase (see calculus.modulus_phase_gradients).
"""
import logging
import math

import numpy as np

from hopf_eikonal.calculus import modulus_phase_gradients, fd_gradient, scan_points
from hopf_eikonal.coords import to_toroidal
from hopf_eikonal.hopf import hopf_field, profile_f
from hopf_eikonal.models import (
    SplitFrame,
    CoFrame,
    ConformalCheckResult,
    GeometryReport,
    as_array,
)
from hopf_eikonal.utils import setting, unit, DomainError, DegenerateJacobianError

logger = logging.getLogger(__name__)

# |grad S x grad sigma| relative to |grad S| |grad sigma| below which the Jacobian counts as degenerate
_INDEPENDENCE = 1e-8


def _differentials(spec, p, h=None):
    modulus, grad_modulus, grad_phase = modulus_phase_gradients(hopf_field(spec), p, h)
    cross = np.cross(grad_modulus, grad_phase)
    scale = np.linalg.norm(grad_modulus) * np.linalg.norm(grad_phase)
    if scale == 0.0 or np.linalg.norm(cross) < _INDEPENDENCE * scale:
        raise DegenerateJacobianError(
            f"dS and d sigma are not independent at {tuple(as_array(p))}"
        )
    return modulus, grad_modulus, grad_phase, cross


def vertical_field(spec, p, h=None):
    """Unit vector along grad S x grad sigma, annihilated by both dS and d sigma"""
    return unit(_differentials(spec, p, h)[3])


def split_frame(spec, p, h=None):
    """e3 vertical, e1 along grad S, e2 = e3 x e1; right handed"""
    _, grad_modulus, _, cross = _differentials(spec, p, h)
    e3 = unit(cross)
    e1 = unit(grad_modulus)
    return SplitFrame(e1=e1, e2=np.cross(e3, e1), e3=e3)


def coframe(frame):
    """Dual one-forms: rows of the inverse transpose of the frame matrix"""
    try:
        dual = np.linalg.inv(frame.matrix).T
    except np.linalg.LinAlgError:
        raise DomainError("Frame is singular and has no dual coframe")
    return CoFrame(w1=dual[0], w2=dual[1], w3=dual[2])


def horizontal_metric(spec, p, h=None):
    """
    g_h = w1 (x) w1 + w2 (x) w2 in the basis (dS, d sigma). With J the matrix of dS, d sigma on (e1, e2),
    the horizontal one-forms are w_i = (J^-1)_ia da, so g_h = J^-T J^-1.
    """
    _, grad_modulus, grad_phase, cross = _differentials(spec, p, h)
    e3 = unit(cross)
    e1 = unit(grad_modulus)
    e2 = np.cross(e3, e1)
    jacobian = np.array(
        [
            [grad_modulus @ e1, grad_modulus @ e2],
            [grad_phase @ e1, grad_phase @ e2],
        ]
    )
    inverse = np.linalg.inv(jacobian)
    metric = inverse.T @ inverse
    return 0.5 * (metric + metric.T)


def target_metric(rho):
    """g2 = d rho (x) d rho + rho^2 d phi (x) d phi"""
    if not rho > 0:
        raise DomainError(f"rho should be positive, got {rho}")
    return np.diag([1.0, rho * rho])


def conformal_check(spec, p, h=None):
    """
    Compare the horizontal metric H with T = target_metric(S) under (dS, d sigma) <-> (d rho, d phi).
    lambda = H11 / T11; the residuals vanish when H = lambda T.
    """
    modulus = abs(hopf_field(spec)(p))
    metric = horizontal_metric(spec, p, h)
    target = target_metric(modulus)
    lam = metric[0, 0] / target[0, 0]
    return ConformalCheckResult(
        lam=float(lam),
        offdiag_residual=float(abs(metric[0, 1]) / math.sqrt(metric[0, 0] * metric[1, 1])),
        proportionality_residual=float(abs(metric[1, 1] / target[1, 1] - lam) / lam),
    )


def conformal_factor_closed_form(spec, p):
    """
    lambda = t^2 / (q^2 f^2 (n^2 + m^2 t^2)), t = sinh eta, which is 1 / |grad S|^2 for the closed form profile.
    """
    t = to_toroidal(p)
    sinh = math.sinh(t.eta)
    value = profile_f(spec, t.eta)
    return sinh * sinh / (t.q ** 2 * value * value * (spec.n ** 2 + spec.m ** 2 * sinh * sinh))


def vertical_annihilation(spec, p, h=None):
    """|d chi(e3)| / |grad chi|, with d chi(e3) a central difference along e3"""
    h = setting("FD_STEP", h)
    field = hopf_field(spec)
    e3 = vertical_field(spec, p, h)
    base = as_array(p)
    directional = (field(base + h * e3) - field(base - h * e3)) / (2.0 * h)
    return abs(directional) / np.linalg.norm(fd_gradient(field, p, h))


def _geometry_residuals(spec, p, h):
    frame = split_frame(spec, p, h)
    check = conformal_check(spec, p, h)
    closed_form = conformal_factor_closed_form(spec, p)
    return {
        "vertical_annihilation": vertical_annihilation(spec, p, h),
        "orthonormality": frame.residual,
        "duality": coframe(frame).duality_residual(frame),
        "offdiag": check.offdiag_residual,
        "proportionality": check.proportionality_residual,
        "lambda_consistency": abs(check.lam - closed_form) / closed_form,
        "lambda": check.lam,
    }


def verify_geometry(spec, sampling, tolerances=None, h=None):
    """Run every geometry check over a sample and report the maximum residual of each"""
    h = setting("FD_STEP", h)
    tolerances = dict(setting("VERIFY_TOLERANCES", tolerances))
    values, excluded = scan_points(
        hopf_field(spec),
        sampling,
        lambda field, p: _geometry_residuals(spec, p, h),
        label=f"verify {spec.describe()}",
    )
    residuals = {name: max(value[name] for value in values) for name in tolerances}
    report = GeometryReport(
        spec=spec,
        samples=len(values),
        excluded=excluded,
        residuals=residuals,
        tolerances=tolerances,
        min_lambda=min(value["lambda"] for value in values),
    )
    for name, passed in report.passed.items():
        if not passed:
            logger.warning(
                "%s: %s residual %.3e exceeds %.1e",
                spec.describe(),
                name,
                residuals[name],
                tolerances[name],
            )
    return report
