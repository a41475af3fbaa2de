"""
Toroidal coordinates (eta, xi, phi) around the focal circle C = {z = 0, x^2 + y^2 = 1}:

    x = sinh(eta) cos(phi) / q,  y = sinh(eta) sin(phi) / q,  z = sin(xi) / q,
    q = cosh(eta) - cos(xi).

The scalar helpers prefixed with an underscore work on plain floats; the fiber tracer calls them in its
inner loop.
"""
import math

import numpy as np

from hopf_eikonal.models import CartesianPoint, ToroidalPoint, Frame, as_array
from hopf_eikonal.utils import (
    setting,
    reduce_angle,
    DegeneratePointError,
    NearFocalCircleError,
    AxisDegeneracyError,
)


def scale_factor(t):
    return t.q


def _to_cartesian(eta, xi, phi, eps_q):
    q = math.cosh(eta) - math.cos(xi)
    if q < eps_q:
        raise DegeneratePointError(
            f"Toroidal point (eta={eta}, xi={xi}) represents the point at infinity (q={q})"
        )
    radial = math.sinh(eta) / q
    return radial * math.cos(phi), radial * math.sin(phi), math.sin(xi) / q


def to_cartesian(t, eps_q=None):
    """
    Map toroidal coordinates to Cartesian ones. Fails only at eta = xi = 0, the point at infinity.
    """
    return CartesianPoint(*_to_cartesian(t.eta, t.xi, t.phi, setting("EPS_Q", eps_q)))


def _to_toroidal(x, y, z, eta_max):
    """Bipolar-distance inversion in the (rho, z) half plane. Returns (eta, xi, phi, on_axis)."""
    rho = math.hypot(x, y)
    far = (rho + 1.0) ** 2 + z * z
    near = (rho - 1.0) ** 2 + z * z
    if near == 0.0:
        raise NearFocalCircleError(f"Point ({x}, {y}, {z}) lies on focal circle C")
    eta = max(0.5 * math.log(far / near), 0.0)
    if eta > eta_max:
        raise NearFocalCircleError(
            f"Point ({x}, {y}, {z}) lies on focal circle C within tolerance (eta={eta:.3f})"
        )
    # r^2 - 1 = 2 cos(xi) / q and 2 z = 2 sin(xi) / q
    xi = math.atan2(2.0 * z, x * x + y * y + z * z - 1.0)
    on_axis = rho == 0.0
    phi = 0.0 if on_axis else math.atan2(y, x)
    return eta, reduce_angle(xi), reduce_angle(phi), on_axis


def to_toroidal(p, eta_max=None):
    eta, xi, phi, on_axis = _to_toroidal(*as_array(p), setting("ETA_MAX", eta_max))
    return ToroidalPoint(eta, xi, phi, axis=on_axis)


def _frame(eta, xi, phi):
    q = math.cosh(eta) - math.cos(xi)
    radial = (1.0 - math.cosh(eta) * math.cos(xi)) / q
    vertical = -math.sin(xi) * math.sinh(eta) / q
    cos_phi, sin_phi = math.cos(phi), math.sin(phi)
    e_eta = np.array([radial * cos_phi, radial * sin_phi, vertical])
    e_xi = np.array([vertical * cos_phi, vertical * sin_phi, -radial])
    e_phi = np.array([-sin_phi, cos_phi, 0.0])
    return e_eta, e_xi, e_phi


def _check_regular(eta, xi, eps_q, eps_eta):
    q = math.cosh(eta) - math.cos(xi)
    if q <= eps_q:
        raise DegeneratePointError(f"Scale factor q={q} vanishes (point at infinity)")
    if eta < eps_eta:
        raise AxisDegeneracyError(f"eta={eta} is on the z axis, where phi is undefined")
    return q


def toroidal_frame(t, eps_q=None, eps_eta=None):
    """
    Orthonormal, right handed frame (e_eta, e_xi, e_phi) with grad eta = q e_eta, grad xi = q e_xi and
    grad phi = (q / sinh eta) e_phi.
    """
    _check_regular(t.eta, t.xi, setting("EPS_Q", eps_q), setting("EPS_ETA", eps_eta))
    return Frame(*_frame(t.eta, t.xi, t.phi))


def toroidal_basis_vectors(t, eps_q=None, eps_eta=None):
    """Coordinate vectors (d/d eta, d/d xi, d/d phi) in Cartesian components"""
    q = _check_regular(t.eta, t.xi, setting("EPS_Q", eps_q), setting("EPS_ETA", eps_eta))
    e_eta, e_xi, e_phi = _frame(t.eta, t.xi, t.phi)
    return e_eta / q, e_xi / q, (math.sinh(t.eta) / q) * e_phi


def distance_to_focal_circle(p):
    x, y, z = as_array(p)
    return math.hypot(math.hypot(x, y) - 1.0, z)


def distance_to_axis(p):
    x, y, _ = as_array(p)
    return math.hypot(x, y)
