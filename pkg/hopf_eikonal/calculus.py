"""
Finite-difference calculus on complex scalar fields and eikonal residual diagnostics.
"""
import cmath
import logging
import math

import numpy as np
from joblib import Parallel, delayed

from hopf_eikonal import CONTROL_FIELDS
from hopf_eikonal.coords import _to_cartesian, distance_to_focal_circle, distance_to_axis
from hopf_eikonal.models import ScalarField, ResidualReport, as_array
from hopf_eikonal.utils import (
    setting,
    worker_count,
    TWO_PI,
    DomainError,
    SingularityError,
    StencilError,
    ZeroModulusError,
    EmptySampleError,
)

logger = logging.getLogger(__name__)

_CONTROL_EVALUATORS = {
    "x+2iy": lambda p: complex(p[0], 2.0 * p[1]),
    "x+iy": lambda p: complex(p[0], p[1]),
    "const": lambda p: 1.0 + 2.0j,
    "planar-exp": lambda p: math.exp(p[0]) * cmath.exp(1j * p[1]),
}


def control_field(name):
    """Built-in control fields: x+2iy (non-solution), x+iy and planar-exp (planar solutions), const"""
    if name not in CONTROL_FIELDS:
        raise DomainError(f"Unknown control field {name!r}, expected one of {', '.join(CONTROL_FIELDS)}")
    return ScalarField(evaluator=_CONTROL_EVALUATORS[name], provenance=(name,))


def _stencil(field, p, h):
    """Field values at p + h e_k and p - h e_k, as two length 3 complex arrays"""
    if not h > 0:
        raise DomainError(f"Finite difference step should be positive, got {h}")
    p = as_array(p)
    forward = np.empty(3, dtype=complex)
    backward = np.empty(3, dtype=complex)
    try:
        for k in range(3):
            step = np.zeros(3)
            step[k] = h
            forward[k] = field(p + step)
            backward[k] = field(p - step)
    except SingularityError as error:
        raise StencilError(f"Stencil of size {h} around {tuple(p)} touches a singularity: {error.message}")
    return forward, backward


def fd_gradient(field, p, h=None):
    """Central difference gradient, componentwise, with O(h^2) truncation error"""
    h = setting("FD_STEP", h)
    forward, backward = _stencil(field, p, h)
    return (forward - backward) / (2.0 * h)


def eikonal_residual(field, p, h=None, degenerate=None):
    """
    Raw residual sum_k (d_k chi)^2 (unconjugated) and its scale invariant normalisation
    |raw| / sum_k |d_k chi|^2, declared 0 when the denominator is degenerate.
    """
    gradient = fd_gradient(field, p, h)
    raw = complex(np.sum(gradient * gradient))
    denominator = float(np.sum(np.abs(gradient) ** 2))
    if denominator < setting("DEGENERATE_DENOMINATOR", degenerate):
        return raw, 0.0
    return raw, abs(raw) / denominator


def modulus_phase_gradients(field, p, h=None):
    """
    Modulus S at p and the FD gradients of S and of the phase sigma. Phase differences are taken relative to
    the centre value and mapped to (-pi, pi], so the branch cut of sigma never enters a difference.
    """
    h = setting("FD_STEP", h)
    try:
        centre = field(p)
    except SingularityError as error:
        raise StencilError(f"Field is singular at {tuple(as_array(p))}: {error.message}")
    modulus = abs(centre)
    if modulus == 0.0:
        raise ZeroModulusError(f"Field vanishes at {tuple(as_array(p))}; its phase is undefined")
    forward, backward = _stencil(field, p, h)
    if np.any(forward == 0) or np.any(backward == 0):
        raise ZeroModulusError(f"Field vanishes on the stencil around {tuple(as_array(p))}")
    reference = centre.conjugate()
    grad_modulus = (np.abs(forward) - np.abs(backward)) / (2.0 * h)
    grad_phase = (np.angle(forward * reference) - np.angle(backward * reference)) / (2.0 * h)
    return modulus, grad_modulus, grad_phase


def split_residuals(field, p, h=None):
    """
    Residuals of the real form of the eikonal equation: grad S . grad sigma = 0 and |grad S|^2 = S^2 |grad sigma|^2,
    each normalised to be dimensionless. Returns (orthogonality, balance).
    """
    modulus, grad_modulus, grad_phase = modulus_phase_gradients(field, p, h)
    norm_modulus = np.linalg.norm(grad_modulus)
    norm_phase = np.linalg.norm(grad_phase)
    if norm_modulus == 0.0 or norm_phase == 0.0:
        orthogonality = 0.0
    else:
        orthogonality = abs(float(grad_modulus @ grad_phase)) / (norm_modulus * norm_phase)
    radial = norm_modulus ** 2
    angular = modulus ** 2 * norm_phase ** 2
    balance = 0.0 if radial + angular == 0.0 else abs(radial - angular) / (radial + angular)
    return orthogonality, balance


def sample_points(sampling):
    """Deterministic sample of Cartesian points for a SamplingSpec, as an (N, 3) array"""
    rng = np.random.default_rng(sampling.seed)
    if sampling.region == "box":
        return rng.uniform(-sampling.half_width, sampling.half_width, size=(sampling.count, 3))
    low, high = sampling.eta_range
    etas = rng.uniform(low, high, size=sampling.count)
    angles = rng.uniform(0.0, TWO_PI, size=(sampling.count, 2))
    points = np.empty((sampling.count, 3))
    for index in range(sampling.count):
        try:
            points[index] = _to_cartesian(etas[index], angles[index, 0], angles[index, 1], setting("EPS_Q"))
        except SingularityError:
            # eta = xi = 0 exactly; the far point is dropped by the exclusion test
            points[index] = np.inf
    return points


def is_excluded(field, p, sampling):
    """Whether p falls inside an exclusion tube, measured at its pull-back to the underlying map's chart"""
    if not np.all(np.isfinite(p)):
        return True
    try:
        base = as_array(field.base_point(p))
    except SingularityError:
        return True
    return (
        distance_to_focal_circle(base) < sampling.exclude_circle
        or distance_to_axis(base) < sampling.exclude_axis
    )


def scan_points(field, sampling, measure, label="scan"):
    """
    Apply measure(field, p) at every non-excluded sample point, concurrently when configured.
    Points whose stencil touches a singularity count as excluded. Returns (values, excluded count).
    """
    points = sample_points(sampling)
    kept = [p for p in points if not is_excluded(field, p, sampling)]

    def safe_measure(p):
        try:
            return measure(field, p)
        except DomainError as error:
            logger.debug("%s: excluding %s (%s)", label, tuple(p), error.message)
            return None

    results = Parallel(n_jobs=worker_count(), prefer="threads")(delayed(safe_measure)(p) for p in kept)
    values = [result for result in results if result is not None]
    excluded = sampling.count - len(values)
    if not values:
        raise EmptySampleError(f"All {sampling.count} sample points were excluded ({sampling.describe()})")
    logger.info("%s: %d points evaluated, %d excluded", label, len(values), excluded)
    return values, excluded


def residual_scan(field, sampling, h=None):
    """Aggregate normalized eikonal residuals over a sample. Deterministic given the sampling seed."""
    h = setting("FD_STEP", h)
    values, excluded = scan_points(
        field, sampling, lambda f, p: eikonal_residual(f, p, h)[1], label=f"scan {field.describe()}"
    )
    residuals = np.array(values)
    return ResidualReport(
        requested=sampling.count,
        samples=len(residuals),
        excluded=excluded,
        max=float(np.max(residuals)),
        mean=float(np.mean(residuals)),
        p99=float(np.percentile(residuals, 99)),
        h=h,
        seed=sampling.seed,
        description=sampling.describe(),
    )
