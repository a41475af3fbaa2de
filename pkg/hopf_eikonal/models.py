import math
import numbers

import attr
import numpy as np

from hopf_eikonal import config, SAMPLING_REGIONS, LINK_METHODS, EXPORT_FORMATS
from hopf_eikonal.utils import reduce_angle, TWO_PI

COMMANDS = ("eval", "scan", "trace", "link", "index", "verify")


def as_array(p):
    """Cartesian components of a point (CartesianPoint or any length 3 sequence) as a float array"""
    if isinstance(p, CartesianPoint):
        return np.array([p.x, p.y, p.z])
    values = np.asarray(p, dtype=float)
    assert values.shape == (3,), "A point should have exactly three components"
    return values


def as_point(p):
    if isinstance(p, CartesianPoint):
        return p
    return CartesianPoint.from_array(as_array(p))


@attr.frozen
class CartesianPoint:
    """
    CartesianPoint represents a point (x, y, z) of R^3, in units of the focal circle radius
    """

    x: float = attr.field(converter=float)
    y: float = attr.field(converter=float)
    z: float = attr.field(converter=float)

    @x.validator
    @y.validator
    @z.validator
    def validate_component(self, attribute, value):
        assert math.isfinite(value), f"{attribute.name} should be finite"

    @classmethod
    def from_array(cls, values):
        return cls(values[0], values[1], values[2])

    @property
    def r2(self):
        return self.x * self.x + self.y * self.y + self.z * self.z

    @property
    def rho(self):
        return math.hypot(self.x, self.y)

    def as_array(self):
        return np.array([self.x, self.y, self.z])


@attr.frozen
class ToroidalPoint:
    """
    ToroidalPoint represents toroidal coordinates (eta, xi, phi). Angles are reduced to [0, 2pi).
    axis flags points on the z axis, where phi is undefined and set to 0.
    """

    eta: float = attr.field(converter=float)
    xi: float = attr.field(converter=reduce_angle)
    phi: float = attr.field(converter=reduce_angle)
    axis: bool = attr.field(default=False)

    @eta.validator
    def validate_eta(self, attribute, eta):
        assert math.isfinite(eta), "eta should be finite"
        assert eta >= 0, "eta should be greater than or equal to 0"

    @property
    def q(self):
        return math.cosh(self.eta) - math.cos(self.xi)

    @property
    def t(self):
        return math.sinh(self.eta)


def _orthonormality_residual(vectors):
    matrix = np.vstack(vectors)
    return float(np.max(np.abs(matrix @ matrix.T - np.eye(len(vectors)))))


@attr.frozen(eq=False)
class Frame:
    """
    Frame holds the orthonormal toroidal frame (e_eta, e_xi, e_phi) in Cartesian components
    """

    e_eta: np.ndarray
    e_xi: np.ndarray
    e_phi: np.ndarray

    def __attrs_post_init__(self):
        assert (
            _orthonormality_residual([self.e_eta, self.e_xi, self.e_phi]) < 1e-12
        ), "Frame vectors should be orthonormal"

    @property
    def matrix(self):
        return np.vstack([self.e_eta, self.e_xi, self.e_phi])


@attr.frozen
class HopfMapSpec:
    """
    HopfMapSpec holds the winding integers of the toroidal Hopf map chi^(m,n)
    """

    m: int = attr.field()
    n: int = attr.field()

    @m.validator
    @n.validator
    def validate_winding(self, attribute, value):
        assert isinstance(value, numbers.Integral) and not isinstance(
            value, bool
        ), f"{attribute.name} should be an integer"
        assert value != 0, "m and n must be nonzero"

    @property
    def g(self):
        """Number of connected components of a level set"""
        return math.gcd(abs(self.m), abs(self.n))

    @property
    def expected_index(self):
        return self.m * self.n

    def describe(self):
        return f"chi^({self.m},{self.n})"

    def to_dict(self):
        return {"m": int(self.m), "n": int(self.n)}


def _positive(instance, attribute, value):
    assert value > 0, f"{attribute.name} should be positive"


@attr.frozen
class SamplingSpec:
    """
    SamplingSpec describes a reproducible random sample of points for residual scans and geometry checks
    """

    region: str = attr.field(factory=lambda: config["SAMPLE_REGION"])
    count: int = attr.field(factory=lambda: config["SAMPLE_COUNT"])
    eta_range: tuple = attr.field(
        factory=lambda: tuple(config["SAMPLE_ETA_RANGE"]), converter=tuple
    )
    half_width: float = attr.field(
        factory=lambda: config["SAMPLE_BOX_HALF_WIDTH"], validator=_positive
    )
    exclude_circle: float = attr.field(
        factory=lambda: config["EXCLUDE_CIRCLE"], validator=_positive
    )
    exclude_axis: float = attr.field(
        factory=lambda: config["EXCLUDE_AXIS"], validator=_positive
    )
    seed: int = attr.field(factory=lambda: config["SAMPLE_SEED"])

    @region.validator
    def validate_region(self, attribute, region):
        assert region in SAMPLING_REGIONS, "Region should be one of the sampling regions"

    @count.validator
    def validate_count(self, attribute, count):
        assert isinstance(count, numbers.Integral), "Sample count should be an integer"
        assert count > 0, "Sample count should be positive"

    @eta_range.validator
    def validate_eta_range(self, attribute, eta_range):
        assert len(eta_range) == 2, "eta range should have a lower and an upper bound"
        assert 0 <= eta_range[0] < eta_range[1], "eta range should satisfy 0 <= low < high"

    @seed.validator
    def validate_seed(self, attribute, seed):
        assert isinstance(seed, numbers.Integral), "Seed should be an integer"
        assert seed >= 0, "Seed should not be negative"

    def describe(self):
        if self.region == "toroidal":
            low, high = self.eta_range
            where = f"toroidal shell eta in [{low}, {high}]"
        else:
            where = f"box [-{self.half_width}, {self.half_width}]^3"
        return (
            f"{where}, {self.count} samples, seed {self.seed}, exclusion radii "
            f"{self.exclude_circle} (circle) / {self.exclude_axis} (axis)"
        )

    def to_dict(self):
        return {
            "region": self.region,
            "count": int(self.count),
            "eta_range": [float(value) for value in self.eta_range],
            "half_width": float(self.half_width),
            "exclude_circle": float(self.exclude_circle),
            "exclude_axis": float(self.exclude_axis),
            "seed": int(self.seed),
        }


@attr.frozen
class ResidualReport:
    """
    ResidualReport aggregates normalized eikonal residuals over a sample
    """

    requested: int
    samples: int
    excluded: int
    max: float
    mean: float
    p99: float
    h: float
    seed: int
    description: str

    def __attrs_post_init__(self):
        assert (
            self.samples + self.excluded == self.requested
        ), "Evaluated and excluded points should add up to the requested count"

    def to_dict(self):
        return {
            "samples": int(self.samples),
            "excluded": int(self.excluded),
            "max": float(self.max),
            "mean": float(self.mean),
            "p99": float(self.p99),
            "h": float(self.h),
            "seed": int(self.seed),
            "sampling": self.description,
        }


@attr.frozen
class TraceOptions:
    """
    TraceOptions controls the adaptive fiber tracer. Lengths are arc lengths.
    """

    step: float = attr.field(validator=_positive)
    tolerance: float = attr.field(
        factory=lambda: config["TRACE_TOLERANCE"], validator=_positive
    )
    closure: float = attr.field(default=None)
    max_steps: int = attr.field(
        factory=lambda: config["TRACE_MAX_STEPS"], validator=_positive
    )
    corrector_tolerance: float = attr.field(
        factory=lambda: config["TRACE_CORRECTOR_TOLERANCE"], validator=_positive
    )
    corrector_iterations: int = attr.field(
        factory=lambda: config["TRACE_CORRECTOR_ITERATIONS"], validator=_positive
    )
    winding_tolerance: float = attr.field(
        factory=lambda: config["TRACE_WINDING_TOLERANCE"], validator=_positive
    )

    def __attrs_post_init__(self):
        if self.closure is None:
            object.__setattr__(self, "closure", config["TRACE_CLOSURE_FRACTION"] * self.step)
        assert self.closure > 0, "closure should be positive"

    @classmethod
    def for_torus(cls, eta0, **overrides):
        """Default options for a fiber on the torus eta = eta0: step is a fixed fraction of the minor circumference"""
        assert eta0 > 0, "eta0 should be positive"
        step = config["TRACE_STEP_FRACTION"] * TWO_PI / math.sinh(eta0)
        return cls(step=overrides.pop("step", step), **overrides)

    def refined(self, factor=2.0):
        return attr.evolve(self, step=self.step / factor, closure=self.closure / factor)

    def to_dict(self):
        return attr.asdict(self)


@attr.frozen(eq=False)
class Fiber:
    """
    Fiber is a closed polyline approximating one connected component of a level curve.
    windings are the accumulated (xi, phi) turns, in units of 2pi.
    """

    points: np.ndarray = attr.field()
    closed: bool
    windings: tuple
    arc_length: float
    level: complex
    component: int = 0
    steps: int = 0

    @points.validator
    def validate_points(self, attribute, points):
        assert points.ndim == 2 and points.shape[1] == 3, "Fiber points should be an (N, 3) array"
        assert points.shape[0] >= 3, "A fiber needs at least three points"

    def __len__(self):
        return self.points.shape[0]

    @property
    def segments(self):
        closing = self.points[:1] if self.closed else self.points[-1:]
        return np.diff(np.vstack([self.points, closing]), axis=0)

    @property
    def max_step(self):
        return float(np.max(np.linalg.norm(self.segments, axis=1)))

    def to_dict(self):
        return {
            "points": len(self),
            "closed": bool(self.closed),
            "windings": {"xi": float(self.windings[0]), "phi": float(self.windings[1])},
            "arc_length": float(self.arc_length),
            "level": {"re": float(self.level.real), "im": float(self.level.imag)},
            "component": int(self.component),
            "steps": int(self.steps),
        }


@attr.frozen
class LinkingResult:
    """
    LinkingResult holds a raw linking integral and its nearest integer
    """

    raw: float
    rounded: int
    deviation: float = attr.field()
    components: int = 1
    per_component: float = None
    expected: int = None
    method: str = attr.field(factory=lambda: config["LINK_METHOD"])
    experimental: bool = False

    @deviation.validator
    def validate_deviation(self, attribute, deviation):
        assert deviation >= 0, "Deviation should not be negative"

    @method.validator
    def validate_method(self, attribute, method):
        assert method in LINK_METHODS, "Method should be one of the linking methods"

    @classmethod
    def from_raw(cls, raw, **kwargs):
        rounded = int(round(raw))
        return cls(raw=float(raw), rounded=rounded, deviation=abs(raw - rounded), **kwargs)

    @property
    def valid(self):
        """Rounding is only claimed valid for small deviations"""
        return self.deviation < config["LINK_VALID_DEVIATION"]

    def to_dict(self):
        result = {
            "raw": self.raw,
            "rounded": self.rounded,
            "deviation": self.deviation,
            "valid": self.valid,
            "components": self.components,
            "method": self.method,
        }
        if self.per_component is not None:
            result["per_component"] = self.per_component
        if self.expected is not None:
            result["expected"] = self.expected
        if self.experimental:
            result["experimental"] = True
        return result


@attr.frozen(eq=False)
class SplitFrame:
    """
    SplitFrame holds the horizontal (e1, e2) and vertical (e3) unit vectors of a Hopf map
    """

    e1: np.ndarray
    e2: np.ndarray
    e3: np.ndarray

    def __attrs_post_init__(self):
        assert self.residual < 1e-10, "Split frame should be orthonormal"

    @property
    def matrix(self):
        return np.vstack([self.e1, self.e2, self.e3])

    @property
    def residual(self):
        return _orthonormality_residual([self.e1, self.e2, self.e3])


@attr.frozen(eq=False)
class CoFrame:
    w1: np.ndarray
    w2: np.ndarray
    w3: np.ndarray

    @property
    def matrix(self):
        return np.vstack([self.w1, self.w2, self.w3])

    def duality_residual(self, frame):
        return float(np.max(np.abs(self.matrix @ frame.matrix.T - np.eye(3))))


@attr.frozen
class ConformalCheckResult:
    lam: float = attr.field()
    offdiag_residual: float
    proportionality_residual: float

    @lam.validator
    def validate_lam(self, attribute, lam):
        assert lam > 0, "Conformal factor should be positive at regular points"


@attr.frozen
class GeometryReport:
    """
    GeometryReport lists the maximum residual of every geometry check over a sample
    """

    spec: HopfMapSpec
    samples: int
    excluded: int
    residuals: dict
    tolerances: dict
    min_lambda: float

    @property
    def passed(self):
        return {
            name: bool(self.residuals[name] < tolerance)
            for name, tolerance in self.tolerances.items()
        }

    @property
    def all_passed(self):
        return all(self.passed.values()) and self.min_lambda > 0

    def to_dict(self):
        return {
            "map": self.spec.to_dict(),
            "samples": int(self.samples),
            "excluded": int(self.excluded),
            "checks": {
                name: {
                    "max": float(self.residuals[name]),
                    "tolerance": float(tolerance),
                    "passed": self.passed[name],
                }
                for name, tolerance in self.tolerances.items()
            },
            "min_lambda": float(self.min_lambda),
            "passed": self.all_passed,
        }


def _identity(p):
    return p


@attr.frozen(eq=False)
class ScalarField:
    """
    ScalarField is an evaluable complex field on R^3. base_point pulls an evaluation point back to the
    chart of the underlying map, where the singular loci (focal circle, z axis) are measured.
    """

    evaluator: object
    provenance: tuple = attr.field(converter=tuple)
    base_point: object = attr.field(default=_identity)

    @provenance.validator
    def validate_provenance(self, attribute, provenance):
        assert len(provenance) > 0, "A field should record where it came from"

    def __call__(self, p):
        return complex(self.evaluator(as_array(p)))

    def describe(self):
        return " | ".join(self.provenance)


@attr.frozen
class RunConfig:
    """
    RunConfig is the validated, effective configuration of one command line run
    """

    command: str = attr.field()
    m: int = None
    n: int = None
    field: str = None
    sampling: dict = None
    trace: dict = None
    transforms: tuple = attr.field(default=(), converter=tuple)
    inputs: tuple = attr.field(default=(), converter=tuple)
    compose: str = None
    output: str = None
    fmt: str = attr.field(default=None)
    seed: int = None

    @command.validator
    def validate_command(self, attribute, command):
        assert command in COMMANDS, "Command should be one of the known commands"

    @fmt.validator
    def validate_fmt(self, attribute, fmt):
        assert fmt is None or fmt in EXPORT_FORMATS, "Format should be csv or obj"

    def to_dict(self):
        return attr.asdict(self)
