import math

import numpy as np
import pytest

from hopf_eikonal.calculus import (
    control_field,
    fd_gradient,
    eikonal_residual,
    modulus_phase_gradients,
    split_residuals,
    sample_points,
    residual_scan,
)
from hopf_eikonal.coords import to_cartesian, to_toroidal
from hopf_eikonal.hopf import gradient_analytic, hopf_field, naive_field, level_gradients
from hopf_eikonal.models import HopfMapSpec, SamplingSpec, ToroidalPoint
from hopf_eikonal.utils import DomainError, StencilError, ZeroModulusError, EmptySampleError

from conftest import SOLUTION_PAIRS


# Unit Tests


##### Control fields #####
def test_linear_control_at_origin():
    field = control_field("x+2iy")
    gradient = fd_gradient(field, (0.0, 0.0, 0.0))
    assert gradient == pytest.approx(np.array([1.0, 2.0j, 0.0]), abs=1e-12)
    raw, normalized = eikonal_residual(field, (0.0, 0.0, 0.0))
    assert raw == pytest.approx(-3.0, abs=1e-12)
    assert normalized == pytest.approx(0.6, abs=1e-12)


@pytest.mark.parametrize(
    "point",
    [
        (0.3, -1.2, 2.0),
        (5.0, 5.0, -5.0),
    ],
)
def test_control_fields(point):
    raw, normalized = eikonal_residual(control_field("x+2iy"), point)
    assert raw == pytest.approx(-3.0, abs=1e-9)
    assert normalized == pytest.approx(0.6, abs=1e-9)
    assert abs(eikonal_residual(control_field("x+iy"), point)[0]) < 1e-9
    assert fd_gradient(control_field("const"), point) == pytest.approx(np.zeros(3))
    # zero gradient: the residual is declared 0
    assert eikonal_residual(control_field("const"), point) == (0j, 0.0)


def test_planar_exponential_split():
    orthogonality, balance = split_residuals(control_field("planar-exp"), (0.4, -0.7, 1.3))
    assert orthogonality < 1e-8
    assert balance < 1e-8


def test_linear_control_split_balance():
    orthogonality, balance = split_residuals(control_field("x+2iy"), (1.0, 1.0, 0.0))
    # |grad S|^2 = 17/5 and S^2 |grad sigma|^2 = 8/5
    assert balance == pytest.approx(1.8 / 5.0, rel=1e-6)


@pytest.mark.xfail(reason="Unknown control field", strict=True, raises=DomainError)
def test_unknown_control_field():
    control_field("x^2")


##### fd_gradient #####
@pytest.mark.parametrize("windings", SOLUTION_PAIRS)
def test_fd_gradient_matches_analytic(windings, regular_points):
    spec = HopfMapSpec(*windings)
    field = hopf_field(spec)
    for p in regular_points:
        analytic = gradient_analytic(spec, to_toroidal(p))
        numeric = fd_gradient(field, p)
        assert np.linalg.norm(numeric - analytic) < 1e-6 * np.linalg.norm(analytic)


def test_fd_gradient_converges_quadratically(spec23):
    field = hopf_field(spec23)
    p = to_cartesian(ToroidalPoint(1.0, 1.0, 0.5)).as_array()
    analytic = gradient_analytic(spec23, to_toroidal(p))
    coarse = np.linalg.norm(fd_gradient(field, p, 1e-4) - analytic)
    fine = np.linalg.norm(fd_gradient(field, p, 5e-5) - analytic)
    assert 2.0 < coarse / fine < 8.0


def test_stencil_touches_focal_circle(spec11):
    with pytest.raises(StencilError, match="touches a singularity"):
        fd_gradient(hopf_field(spec11), (1.5, 0.0, 0.0), h=0.5)


@pytest.mark.xfail(reason="Step must be positive", strict=True, raises=DomainError)
@pytest.mark.parametrize("h", [0.0, -1e-5])
def test_fd_gradient_step(h):
    fd_gradient(control_field("x+iy"), (0.0, 0.0, 0.0), h)


##### eikonal_residual and split_residuals #####
@pytest.mark.parametrize("windings", SOLUTION_PAIRS)
def test_split_residuals_hold(windings, regular_points):
    field = hopf_field(HopfMapSpec(*windings))
    for p in regular_points:
        orthogonality, balance = split_residuals(field, p)
        assert orthogonality < 1e-6
        assert balance < 1e-6


def test_phase_gradient_across_branch_cut(spec11):
    # sigma = xi + phi = 2 pi, where the principal phase jumps
    p = to_cartesian(ToroidalPoint(0.7, 0.3, 2 * math.pi - 0.3)).as_array()
    _, grad_modulus, grad_phase = modulus_phase_gradients(hopf_field(spec11), p)
    _, _, exact_modulus, exact_phase, _ = level_gradients(spec11, p)
    assert np.linalg.norm(grad_modulus - exact_modulus) < 1e-6 * np.linalg.norm(exact_modulus)
    assert np.linalg.norm(grad_phase - exact_phase) < 1e-6 * np.linalg.norm(exact_phase)


def test_split_residuals_on_axis(spec11):
    with pytest.raises(ZeroModulusError):
        split_residuals(hopf_field(spec11), (0.0, 0.0, 0.5))


##### Sampling and residual_scan #####
def test_sample_points_in_shell():
    sampling = SamplingSpec(count=300, seed=3, eta_range=(0.2, 1.5))
    points = sample_points(sampling)
    assert points.shape == (300, 3)
    etas = [to_toroidal(p).eta for p in points]
    assert min(etas) >= 0.2 - 1e-9 and max(etas) <= 1.5 + 1e-9
    assert np.array_equal(points, sample_points(sampling))


def test_sample_points_in_box():
    points = sample_points(SamplingSpec(region="box", count=100, half_width=0.5, seed=3))
    assert np.all(np.abs(points) <= 0.5)


@pytest.mark.parametrize("windings", SOLUTION_PAIRS)
def test_residual_scan_solutions(windings):
    report = residual_scan(hopf_field(HopfMapSpec(*windings)), SamplingSpec(count=1000, seed=42), h=1e-5)
    assert report.max < 1e-6
    assert report.samples + report.excluded == 1000
    assert report.samples > 900


def test_residual_scan_linear_control():
    report = residual_scan(control_field("x+2iy"), SamplingSpec(region="box", count=200, seed=5))
    assert report.mean == pytest.approx(0.6, abs=1e-9)
    assert report.max == pytest.approx(0.6, abs=1e-9)


def test_residual_scan_constant_control():
    report = residual_scan(control_field("const"), SamplingSpec(region="box", count=50, seed=5))
    assert report.max == 0.0


def test_residual_scan_naive_map(spec23, sampling):
    assert residual_scan(naive_field(spec23), sampling).max > 0.1


def test_residual_scan_deterministic(spec23, monkeypatch):
    sampling = SamplingSpec(count=300, seed=11)
    serial = residual_scan(hopf_field(spec23), sampling).to_dict()
    monkeypatch.setenv("HOPF_EIKONAL_THREADS", "4")
    threaded = residual_scan(hopf_field(spec23), sampling).to_dict()
    assert serial == threaded
    assert serial == residual_scan(hopf_field(spec23), sampling).to_dict()


def test_residual_scan_everything_excluded(spec11):
    sampling = SamplingSpec(region="box", count=20, half_width=1e-3, exclude_axis=1.0, seed=1)
    with pytest.raises(EmptySampleError):
        residual_scan(hopf_field(spec11), sampling)
