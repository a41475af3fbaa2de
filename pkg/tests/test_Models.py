import math

import numpy as np
import pytest

from hopf_eikonal.models import (
    CartesianPoint,
    ToroidalPoint,
    HopfMapSpec,
    SamplingSpec,
    TraceOptions,
    LinkingResult,
    Fiber,
    ConformalCheckResult,
    ScalarField,
    RunConfig,
)


# Unit Tests


##### HopfMapSpec Class #####
## Validity Testing -> Check that valid windings are accepted
@pytest.mark.parametrize(
    "windings",
    [
        [1, 1, 1],  # m, n, number of level set components
        [2, 3, 1],
        [2, 2, 2],
        [-3, 6, 3],
        [4, -6, 2],
    ],
)
def test_HopfMapSpecClass(windings):
    spec = HopfMapSpec(windings[0], windings[1])
    assert spec.m == windings[0]
    assert spec.n == windings[1]
    assert spec.g == windings[2]
    assert spec.expected_index == windings[0] * windings[1]
    assert spec.describe() == f"chi^({windings[0]},{windings[1]})"


## Expected Failure
"""
1. Zero winding
2. Wrong data type
"""


@pytest.mark.xfail(reason="Invalid Windings", strict=True)
@pytest.mark.parametrize(
    "windings",
    [
        [0, 1],  # m must be nonzero
        [1, 0],  # n must be nonzero
        [1.0, 1],  # Float data type should be invalid
        ["1", 1],  # Cannot be string
        [True, 1],  # Booleans are not windings
    ],
)
def test_HopfMapSpecValidation(windings):
    HopfMapSpec(windings[0], windings[1])


def test_HopfMapSpecMessage():
    with pytest.raises(AssertionError, match="m and n must be nonzero"):
        HopfMapSpec(0, 1)


##### CartesianPoint and ToroidalPoint Classes #####
def test_CartesianPointClass():
    point = CartesianPoint(3, 4, 12)
    assert point.r2 == 169.0
    assert point.rho == 5.0
    assert np.array_equal(point.as_array(), [3.0, 4.0, 12.0])


@pytest.mark.xfail(reason="Non finite component", strict=True)
@pytest.mark.parametrize("component", [math.inf, -math.inf, math.nan])
def test_CartesianPointValidation(component):
    CartesianPoint(component, 0, 0)


@pytest.mark.parametrize(
    "angles",
    [
        [-0.5, 2 * math.pi - 0.5],  # Input angle, reduced angle
        [7.0, 7.0 - 2 * math.pi],
        [2 * math.pi, 0.0],
        [0.0, 0.0],
    ],
)
def test_ToroidalPointReducesAngles(angles):
    point = ToroidalPoint(1.0, angles[0], angles[0])
    assert point.xi == pytest.approx(angles[1], abs=1e-15)
    assert point.phi == pytest.approx(angles[1], abs=1e-15)
    assert 0 <= point.xi < 2 * math.pi


def test_ToroidalPointScale():
    point = ToroidalPoint(1.0, math.pi / 2, 0.0)
    assert point.q == pytest.approx(math.cosh(1.0))
    assert point.t == pytest.approx(math.sinh(1.0))


@pytest.mark.xfail(reason="Negative eta", strict=True)
def test_ToroidalPointValidation():
    ToroidalPoint(-0.1, 0.0, 0.0)


##### SamplingSpec Class #####
def test_SamplingSpecDefaults():
    sampling = SamplingSpec()
    assert sampling.region == "toroidal"
    assert sampling.count == 1000
    assert sampling.eta_range == (0.1, 2.5)
    # test_config.cfg overrides the seed
    assert sampling.seed == 1234
    assert sampling.to_dict()["seed"] == 1234


@pytest.mark.xfail(reason="Invalid Sampling", strict=True)
@pytest.mark.parametrize(
    "kwargs",
    [
        {"region": "sphere"},  # Unknown region
        {"count": 0},  # Must be positive
        {"count": 10.5},  # Must be int
        {"eta_range": (2.0, 1.0)},  # Low above high
        {"seed": -1},  # Negative seed
        {"exclude_circle": 0.0},  # Exclusion radius must be positive
    ],
)
def test_SamplingSpecValidation(kwargs):
    SamplingSpec(**kwargs)


##### TraceOptions Class #####
def test_TraceOptionsForTorus():
    opts = TraceOptions.for_torus(1.0)
    assert opts.step == pytest.approx(1e-3 * 2 * math.pi / math.sinh(1.0))
    assert opts.closure == pytest.approx(0.6 * opts.step)
    refined = opts.refined(2.0)
    assert refined.step == pytest.approx(opts.step / 2)
    assert refined.closure == pytest.approx(opts.closure / 2)


@pytest.mark.xfail(reason="Invalid Trace Options", strict=True)
@pytest.mark.parametrize(
    "kwargs",
    [
        {"step": 0.0},
        {"step": 0.01, "tolerance": -1e-9},
        {"step": 0.01, "closure": -1.0},
    ],
)
def test_TraceOptionsValidation(kwargs):
    TraceOptions(**kwargs)


##### LinkingResult Class #####
@pytest.mark.parametrize(
    "values",
    [
        [0.9999, 1, True],  # Raw, rounded, valid
        [-2.02, -2, True],
        [5.5 + 1e-9, 6, False],
        [0.2, 0, False],
    ],
)
def test_LinkingResultFromRaw(values):
    result = LinkingResult.from_raw(values[0])
    assert result.rounded == values[1]
    assert result.deviation == pytest.approx(abs(values[0] - values[1]))
    assert result.valid == values[2]
    assert result.to_dict()["rounded"] == values[1]


def test_LinkingResultOptionalKeys():
    plain = LinkingResult.from_raw(1.0).to_dict()
    assert "expected" not in plain and "experimental" not in plain
    full = LinkingResult.from_raw(4.0, expected=4, per_component=1.0, experimental=True).to_dict()
    assert full["expected"] == 4
    assert full["per_component"] == 1.0
    assert full["experimental"] is True


@pytest.mark.xfail(reason="Negative deviation", strict=True)
def test_LinkingResultValidation():
    LinkingResult(raw=1.0, rounded=1, deviation=-0.1)


##### ConformalCheckResult Class #####
def test_ConformalCheckResultClass():
    assert ConformalCheckResult(lam=2.0, offdiag_residual=0.0, proportionality_residual=0.0).lam == 2.0


@pytest.mark.xfail(reason="Non positive conformal factor", strict=True)
@pytest.mark.parametrize("lam", [0.0, -1.0])
def test_ConformalCheckResultValidation(lam):
    ConformalCheckResult(lam=lam, offdiag_residual=0.0, proportionality_residual=0.0)


##### Fiber Class #####
def test_FiberSegments():
    points = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0]])
    fiber = Fiber(points=points, closed=True, windings=(0.0, 1.0), arc_length=2.0 + math.sqrt(2), level=1j)
    assert len(fiber) == 3
    assert len(fiber.segments) == 3
    assert fiber.max_step == pytest.approx(math.sqrt(2))
    assert fiber.to_dict()["level"] == {"re": 0.0, "im": 1.0}


@pytest.mark.xfail(reason="Too few points", strict=True)
def test_FiberValidation():
    Fiber(points=np.zeros((2, 3)), closed=True, windings=(0.0, 0.0), arc_length=0.0, level=0j)


##### ScalarField and RunConfig Classes #####
def test_ScalarFieldClass():
    field = ScalarField(evaluator=lambda p: p[0] + 1j * p[2], provenance=("test",))
    assert field((1, 2, 3)) == 1 + 3j
    assert field.describe() == "test"
    assert np.array_equal(field.base_point(np.ones(3)), np.ones(3))


@pytest.mark.xfail(reason="Missing provenance", strict=True)
def test_ScalarFieldValidation():
    ScalarField(evaluator=lambda p: 0j, provenance=())


def test_RunConfigClass():
    run = RunConfig(command="scan", m=2, n=3, transforms=["invert"])
    assert run.to_dict()["transforms"] == ["invert"]
    assert run.to_dict()["command"] == "scan"


@pytest.mark.xfail(reason="Invalid RunConfig", strict=True)
@pytest.mark.parametrize(
    "kwargs",
    [
        {"command": "plot"},  # No plotting command
        {"command": "trace", "fmt": "ply"},  # Unknown export format
    ],
)
def test_RunConfigValidation(kwargs):
    RunConfig(**kwargs)
