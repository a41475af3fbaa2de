"""
Fiber (level curve) tracing, Gauss linking numbers and the Hopf index N_H = nm.

Fibers are oriented along grad S x grad sigma, which is proportional to -n d/dxi + m d/dphi: phi advances by
m/g turns and xi by -n/g turns per component, g = gcd(|m|, |n|).
"""
import cmath
import logging
import math

import attr
import numpy as np
from joblib import Parallel, delayed
from scipy.spatial.distance import cdist

from hopf_eikonal.coords import to_cartesian, to_toroidal
from hopf_eikonal.hopf import evaluate, level_gradients, profile_f, profile_inverse
from hopf_eikonal.models import Fiber, LinkingResult, ToroidalPoint, TraceOptions, as_array
from hopf_eikonal.utils import (
    setting,
    worker_count,
    wrap_angle,
    unit,
    TWO_PI,
    DomainError,
    DegenerateJacobianError,
    TraceError,
    LinkingError,
)

logger = logging.getLogger(__name__)

# Runge-Kutta-Fehlberg 4(5): stage coefficients, 4th order weights and error estimate weights
_RKF45_STAGES = (
    (),
    (1 / 4,),
    (3 / 32, 9 / 32),
    (1932 / 2197, -7200 / 2197, 7296 / 2197),
    (439 / 216, -8.0, 3680 / 513, -845 / 4104),
    (-8 / 27, 2.0, -3544 / 2565, 1859 / 4104, -11 / 40),
)
_RKF45_WEIGHTS = (25 / 216, 0.0, 1408 / 2565, 2197 / 4104, -1 / 5, 0.0)
_RKF45_ERROR = (1 / 360, 0.0, -128 / 4275, -2197 / 75240, 1 / 50, 2 / 55)


def fiber_tangent(spec, p):
    """Unit tangent of the fiber through p, along grad S x grad sigma"""
    _, _, grad_modulus, grad_phase, _ = level_gradients(spec, p)
    cross = np.cross(grad_modulus, grad_phase)
    if np.linalg.norm(cross) == 0.0:
        raise DegenerateJacobianError(f"Fiber direction is undefined at {tuple(as_array(p))}")
    return unit(cross)


def seed_on_level_set(spec, eta0, sigma0, component=0):
    """
    Point of the torus eta = eta0 on the level set m xi + n phi = sigma0, with phi = 0 and
    xi = (sigma0 + 2 pi component) / m. Components 0..g-1 are distinct.
    """
    if not eta0 > 0:
        raise DomainError(f"eta0 should be positive, got {eta0}")
    assert 0 <= component < spec.g, f"Component should be in [0, {spec.g})"
    xi = (sigma0 + TWO_PI * component) / spec.m
    return to_cartesian(ToroidalPoint(eta0, xi, 0.0))


def component_count(spec):
    return spec.g


def _rkf45_step(spec, x, h):
    stages = []
    for coefficients in _RKF45_STAGES:
        offset = sum((c * k for c, k in zip(coefficients, stages)), np.zeros(3))
        stages.append(fiber_tangent(spec, x + h * offset))
    advance = sum(w * k for w, k in zip(_RKF45_WEIGHTS, stages))
    error = h * np.linalg.norm(sum(w * k for w, k in zip(_RKF45_ERROR, stages)))
    return x + h * advance, error


def _project(spec, x, modulus, phase, opts):
    """Newton projection back onto the level set {S = modulus, sigma = phase}, moving in span(grad S, grad sigma)"""
    size = math.inf
    for _ in range(opts.corrector_iterations):
        value, sigma, grad_modulus, grad_phase, _ = level_gradients(spec, x)
        residual = np.array([value - modulus, wrap_angle(sigma - phase)])
        size = max(abs(residual[0]) / modulus, abs(residual[1]))
        if size < opts.corrector_tolerance:
            return x
        jacobian = np.vstack([grad_modulus, grad_phase])
        x = x - jacobian.T @ np.linalg.solve(jacobian @ jacobian.T, residual)
    if size < setting("TRACE_CORRECTOR_ACCEPT"):
        return x
    raise TraceError(f"Level-set corrector diverged at {tuple(x)} (residual {size:.3e})")


def trace_fiber(spec, seed, opts=None):
    """
    Follow the fiber through seed with adaptive RKF45 steps, each followed by a level-set correction, until it
    returns to the seed with integer windings.
    """
    seed = as_array(seed)
    level = evaluate(spec, seed)
    if level == 0:
        raise DomainError("Seed lies on the z axis, where the level set is not a regular fiber")
    modulus, phase = abs(level), cmath.phase(level)
    start = to_toroidal(seed)
    opts = opts or TraceOptions.for_torus(start.eta)

    x = seed
    points = [seed]
    turns = np.zeros(2)
    previous = (start.xi, start.phi)
    arc_length = 0.0
    h = opts.step
    for steps in range(1, opts.max_steps + 1):
        while True:
            proposal, error = _rkf45_step(spec, x, h)
            if error <= opts.tolerance:
                break
            h *= max(0.2, 0.9 * (opts.tolerance / error) ** 0.25)
            if h < 1e-6 * opts.step:
                raise TraceError(f"Step size underflow while tracing from {tuple(seed)}")
        proposal = _project(spec, proposal, modulus, phase, opts)
        current = to_toroidal(proposal)
        turns += (wrap_angle(current.xi - previous[0]), wrap_angle(current.phi - previous[1]))
        previous = (current.xi, current.phi)
        arc_length += float(np.linalg.norm(proposal - x))
        x = proposal
        points.append(x)
        if error > 0:
            h = min(opts.step, h * min(5.0, 0.9 * (opts.tolerance / error) ** 0.2))
        else:
            h = opts.step

        windings = turns / TWO_PI
        near_integer = np.all(np.abs(windings - np.round(windings)) < opts.winding_tolerance)
        if (
            near_integer
            and np.any(np.round(windings) != 0)
            and np.linalg.norm(x - seed) < opts.closure
        ):
            break
    else:
        raise TraceError(
            f"Fiber of {spec.describe()} did not close within {opts.max_steps} steps"
        )

    # the closing segment back to the seed completes the winding count
    turns += (wrap_angle(start.xi - previous[0]), wrap_angle(start.phi - previous[1]))
    arc_length += float(np.linalg.norm(seed - x))
    if np.linalg.norm(seed - x) < 1e-9 * opts.step:
        points.pop()
    windings = turns / TWO_PI
    logger.info(
        "%s: fiber closed after %d steps, windings (xi, phi) = (%.6f, %.6f), length %.6f",
        spec.describe(),
        steps,
        windings[0],
        windings[1],
        arc_length,
    )
    return Fiber(
        points=np.array(points),
        closed=True,
        windings=(float(windings[0]), float(windings[1])),
        arc_length=arc_length,
        level=complex(level),
        steps=steps,
    )


def trace_level_set(spec, eta0, sigma0, opts=None):
    """All gcd(|m|, |n|) components of one level set"""
    return [
        attr.evolve(
            trace_fiber(spec, seed_on_level_set(spec, eta0, sigma0, component), opts),
            component=component,
        )
        for component in range(component_count(spec))
    ]


def _closed(points):
    return np.vstack([points, points[:1]])


def _solid_angle_terms(start, end, b_start, b_end):
    """
    Exact contribution of every segment pair: half the signed solid angle swept by r_a - r_b, summed over
    the two triangles of the quadrilateral (a, b, c, d) of difference vectors.
    """
    a = start[:, None, :] - b_start[None, :, :]
    b = start[:, None, :] - b_end[None, :, :]
    c = end[:, None, :] - b_end[None, :, :]
    d = end[:, None, :] - b_start[None, :, :]
    norm_a, norm_b, norm_c, norm_d = (np.linalg.norm(v, axis=2) for v in (a, b, c, d))

    def dot(u, v):
        return np.einsum("ijk,ijk->ij", u, v)

    triple = dot(a, np.cross(b, c))
    first = norm_a * norm_b * norm_c + dot(a, b) * norm_c + dot(b, c) * norm_a + dot(c, a) * norm_b
    second = norm_a * norm_d * norm_c + dot(a, d) * norm_c + dot(d, c) * norm_a + dot(c, a) * norm_d
    return (np.arctan2(triple, first) + np.arctan2(triple, second)) / TWO_PI


def _midpoint_terms(start, end, b_start, b_end):
    separation = 0.5 * (start + end)[:, None, :] - 0.5 * (b_start + b_end)[None, :, :]
    cross = np.cross((end - start)[:, None, :], (b_end - b_start)[None, :, :])
    distance = np.linalg.norm(separation, axis=2)
    return np.einsum("ijk,ijk->ij", separation, cross) / (4.0 * math.pi * distance ** 3)


_LINK_TERMS = {"exact": _solid_angle_terms, "midpoint": _midpoint_terms}


def polyline_linking(a, b, method=None, max_step=None, closeness=None, chunk=None):
    """
    Gauss linking integral (1/4pi) oint oint (r1 - r2).(dr1 x dr2) / |r1 - r2|^3 of two closed polylines
    given as (N, 3) vertex arrays (the closing segment is implied). Partial sums are combined with fsum,
    so the value does not depend on the number of workers.
    """
    method = setting("LINK_METHOD", method)
    if method not in _LINK_TERMS:
        raise DomainError(f"Unknown linking method {method!r}")
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if max_step is None:
        max_step = max(
            np.max(np.linalg.norm(np.diff(_closed(curve), axis=0), axis=1)) for curve in (a, b)
        )
    limit = setting("LINK_CLOSENESS_FACTOR", closeness) * max_step
    chunk = setting("LINK_CHUNK", chunk)
    closed_a, closed_b = _closed(a), _closed(b)
    terms = _LINK_TERMS[method]

    def partial(begin):
        rows = slice(begin, min(begin + chunk, len(a)))
        nearest = float(cdist(a[rows], b).min())
        if nearest <= limit:
            raise LinkingError(
                f"Curves come within {nearest:.3e} of each other (limit {limit:.3e}); "
                "the linking integral is ill-conditioned"
            )
        start, end = closed_a[rows], closed_a[rows.start + 1 : rows.stop + 1]
        return float(np.sum(terms(start, end, closed_b[:-1], closed_b[1:])))

    partials = Parallel(n_jobs=worker_count(), prefer="threads")(
        delayed(partial)(begin) for begin in range(0, len(a), chunk)
    )
    return math.fsum(partials)


def gauss_linking(a, b, method=None):
    """Linking number of two closed fibers"""
    if not (a.closed and b.closed):
        raise DomainError("Both fibers should be closed before computing their linking number")
    method = setting("LINK_METHOD", method)
    raw = polyline_linking(a.points, b.points, method=method, max_step=max(a.max_step, b.max_step))
    result = LinkingResult.from_raw(raw, method=method)
    logger.info("linking integral %.9f (rounded %d)", result.raw, result.rounded)
    if not result.valid:
        logger.warning("Linking integral %.6f is not close to an integer", result.raw)
    return result


def level_set_linking(fibers_a, fibers_b, method=None, expected=None, experimental=False):
    """Linking of two full level sets: the sum of the pairwise linkings of their components"""
    method = setting("LINK_METHOD", method)
    pairwise = [gauss_linking(a, b, method).raw for a in fibers_a for b in fibers_b]
    return LinkingResult.from_raw(
        math.fsum(pairwise),
        components=max(len(fibers_a), len(fibers_b)),
        expected=expected,
        method=method,
        experimental=experimental,
    )


def hopf_index(spec, opts=None, etas=None, sigmas=None, method=None):
    """
    N_H from one traced component of each of two level sets at distinct eta and sigma. The g components of
    each level set link pairwise alike, so the total is the per-component linking times g^2.
    """
    etas = setting("INDEX_ETAS", etas)
    sigmas = setting("INDEX_SIGMAS", sigmas)
    if etas[0] == etas[1] or sigmas[0] == sigmas[1]:
        raise DomainError("The two level sets need distinct eta and distinct sigma")
    fibers = [
        trace_fiber(spec, seed_on_level_set(spec, eta, sigma), opts)
        for eta, sigma in zip(etas, sigmas)
    ]
    per_component = gauss_linking(fibers[0], fibers[1], method)
    g = component_count(spec)
    result = LinkingResult.from_raw(
        per_component.raw * g * g,
        components=g,
        per_component=per_component.raw,
        expected=spec.expected_index,
        method=per_component.method,
    )
    if g > 1:
        logger.info(
            "%s: level sets have %d components; index is the per-component linking times %d",
            spec.describe(),
            g,
            g * g,
        )
    return result


def composed_hopf_index(spec, target_map, opts=None, etas=None, sigmas=None, method=None):
    """
    Hopf index of F o chi^(m,n). The preimage of a target value w0 is the union of the chi-fibers over the
    roots of F(w) = w0; every component of two such preimages is traced and the pairwise linkings summed.
    """
    etas = setting("INDEX_ETAS", etas)
    sigmas = setting("INDEX_SIGMAS", sigmas)
    levels = []
    for eta, sigma in zip(etas, sigmas):
        target = target_map(profile_f(spec, eta) * cmath.exp(1j * sigma))
        fibers = []
        for root in target_map.preimages(target):
            if abs(root) == 0:
                raise DomainError("Target value is the image of chi = 0, whose preimage is the z axis")
            fibers.extend(trace_level_set(spec, profile_inverse(spec, abs(root)), cmath.phase(root), opts))
        logger.info("level F = %s: %d fibers", target, len(fibers))
        levels.append(fibers)
    return level_set_linking(
        levels[0],
        levels[1],
        method=method,
        expected=target_map.degree ** 2 * spec.expected_index,
        experimental=not target_map.is_polynomial,
    )
