"""
Symmetries of the static eikonal equation: holomorphic maps of the target (chi -> F(chi)) and conformal maps
of the base, acting on ScalarFields by pull-back of the evaluation point.
"""
import logging

import attr
import numpy as np
from numpy.polynomial import polynomial
from scipy.spatial.transform import Rotation

from hopf_eikonal.models import ScalarField, as_array
from hopf_eikonal.utils import setting, DomainError, PoleError, InversionSingularityError

logger = logging.getLogger(__name__)


def _trim(coefficients):
    values = [complex(value) for value in coefficients]
    while len(values) > 1 and values[-1] == 0:
        values.pop()
    return tuple(values)


@attr.frozen(eq=False)
class TargetMap:
    """
    TargetMap is a polynomial or rational function of the target variable, coefficients in ascending powers.
    Poles of rational maps are registered at construction.
    """

    numerator: tuple = attr.field(converter=_trim)
    denominator: tuple = attr.field(default=(1,), converter=_trim)
    pole_epsilon: float = attr.field(factory=lambda: setting("POLE_EPSILON"))
    poles: tuple = attr.field(init=False)

    @numerator.validator
    @denominator.validator
    def validate_coefficients(self, attribute, coefficients):
        assert len(coefficients) > 0, f"{attribute.name} needs at least one coefficient"
        assert all(np.isfinite(value) for value in coefficients), "Coefficients should be finite"

    def __attrs_post_init__(self):
        assert any(value != 0 for value in self.denominator), "Denominator should not vanish identically"
        poles = ()
        if len(self.denominator) > 1:
            poles = tuple(complex(root) for root in np.roots(self.denominator[::-1]))
        object.__setattr__(self, "poles", poles)

    @classmethod
    def polynomial(cls, coefficients):
        return cls(numerator=coefficients)

    @classmethod
    def identity(cls):
        return cls(numerator=(0, 1))

    @property
    def is_polynomial(self):
        return len(self.denominator) == 1

    @property
    def degree(self):
        return max(len(self.numerator), len(self.denominator)) - 1

    def _check_poles(self, w):
        for pole in self.poles:
            if abs(w - pole) < self.pole_epsilon:
                raise PoleError(f"Value {w} hits the pole {pole} of F")

    def __call__(self, w):
        self._check_poles(w)
        return complex(polynomial.polyval(w, self.numerator) / polynomial.polyval(w, self.denominator))

    def derivative(self, w):
        self._check_poles(w)
        top = polynomial.polyval(w, self.numerator)
        bottom = polynomial.polyval(w, self.denominator)
        top_deriv = polynomial.polyval(w, polynomial.polyder(self.numerator))
        bottom_deriv = polynomial.polyval(w, polynomial.polyder(self.denominator))
        return complex((top_deriv * bottom - top * bottom_deriv) / (bottom * bottom))

    def preimages(self, w0):
        """Roots of F(w) = w0 that are not poles"""
        difference = list(self.numerator) + [0j] * (len(self.denominator) - len(self.numerator))
        for power, value in enumerate(self.denominator):
            difference[power] -= w0 * value
        difference = _trim(difference)
        if len(difference) == 1:
            raise DomainError(f"F is constant; cannot solve F(w) = {w0}")
        roots = np.roots(difference[::-1])
        return [complex(root) for root in roots if all(abs(root - pole) >= self.pole_epsilon for pole in self.poles)]

    def describe(self):
        def render(coefficients):
            return ",".join(f"{value.real:g}{value.imag:+g}i" for value in coefficients)

        if self.is_polynomial:
            return f"polynomial [{render(self.numerator)}]"
        return f"rational [{render(self.numerator)}] / [{render(self.denominator)}]"


@attr.frozen(eq=False)
class Translation:
    shift: np.ndarray = attr.field(converter=as_array)

    def forward(self, x):
        return x + self.shift

    def inverse(self, x):
        return x - self.shift

    def describe(self):
        return "translate({:g},{:g},{:g})".format(*self.shift)


@attr.frozen(eq=False)
class Rotation3:
    axis: np.ndarray = attr.field(converter=as_array)
    angle: float = attr.field(converter=float)
    rotation: Rotation = attr.field(init=False)

    @axis.validator
    def validate_axis(self, attribute, axis):
        assert np.linalg.norm(axis) > 0, "Rotation axis should be nonzero"

    def __attrs_post_init__(self):
        rotvec = self.angle * self.axis / np.linalg.norm(self.axis)
        object.__setattr__(self, "rotation", Rotation.from_rotvec(rotvec))

    def forward(self, x):
        return self.rotation.apply(x)

    def inverse(self, x):
        return self.rotation.apply(x, inverse=True)

    def describe(self):
        return "rotate({:g},{:g},{:g};{:g})".format(*self.axis, self.angle)


@attr.frozen(eq=False)
class Dilation:
    scale: float = attr.field(converter=float)

    @scale.validator
    def validate_scale(self, attribute, scale):
        assert scale > 0, "Dilation scale should be positive"

    def forward(self, x):
        return self.scale * x

    def inverse(self, x):
        return x / self.scale

    def describe(self):
        return f"dilate({self.scale:g})"


@attr.frozen(eq=False)
class Inversion:
    """Inversion in the unit sphere centred at the origin; its own inverse"""

    def forward(self, x):
        r2 = float(x @ x)
        if r2 == 0.0:
            raise InversionSingularityError("Inversion is singular at the origin")
        return x / r2

    inverse = forward

    def describe(self):
        return "invert"


@attr.frozen(eq=False)
class BaseConformalMap:
    """
    BaseConformalMap is an ordered composition of primitive conformal maps of R^3, applied first to last.
    (T2 @ T1) applies T1 first.
    """

    steps: tuple = attr.field(default=(), converter=tuple)

    def apply(self, x):
        x = as_array(x)
        for step in self.steps:
            x = step.forward(x)
        return x

    def inverse(self, x):
        x = as_array(x)
        for step in reversed(self.steps):
            x = step.inverse(x)
        return x

    def __matmul__(self, other):
        return BaseConformalMap(other.steps + self.steps)

    def describe(self):
        return " then ".join(step.describe() for step in self.steps) or "identity"


def translation(shift):
    return BaseConformalMap((Translation(shift),))


def rotation(axis, angle):
    return BaseConformalMap((Rotation3(axis, angle),))


def dilation(scale):
    return BaseConformalMap((Dilation(scale),))


def inversion():
    return BaseConformalMap((Inversion(),))


def special_conformal(b):
    """Proper conformal transformation: inversion, translation by b, inversion"""
    return BaseConformalMap((Inversion(), Translation(b), Inversion()))


def compose_target(field, target_map):
    """F o field: p -> F(field(p))"""
    return ScalarField(
        evaluator=lambda p: target_map(field.evaluator(p)),
        provenance=field.provenance + (f"target {target_map.describe()}",),
        base_point=field.base_point,
    )


def transform_base(field, transform):
    """field o T^-1: p -> field(T^-1(p)), evaluated lazily"""
    return ScalarField(
        evaluator=lambda p: field.evaluator(transform.inverse(p)),
        provenance=field.provenance + (f"base {transform.describe()}",),
        base_point=lambda p: field.base_point(transform.inverse(p)),
    )


def _numbers(text, count=None):
    try:
        values = [complex(token.strip().replace("i", "j")) for token in text.split(",") if token.strip()]
    except ValueError:
        raise DomainError(f"Cannot parse numbers from {text!r}")
    if not values:
        raise DomainError("Expected at least one number")
    if count is not None and len(values) != count:
        raise DomainError(f"Expected {count} numbers in {text!r}, got {len(values)}")
    return values


def _reals(text, count):
    values = _numbers(text, count)
    if any(value.imag != 0 for value in values):
        raise DomainError(f"Expected real numbers in {text!r}")
    return [value.real for value in values]


def parse_target_map(text):
    """
    Coefficients in ascending powers, e.g. "0,0,1" for w^2 or "0,1+2i,1" for w^2 + (1+2i) w.
    A rational map is written "r:numerator;denominator".
    """
    if text.startswith("r:"):
        text = text[2:]
        if ";" not in text:
            raise DomainError(f"Rational map {text!r} needs a denominator after ';'")
    if ";" in text:
        top, bottom = text.split(";", 1)
        return TargetMap(numerator=_numbers(top), denominator=_numbers(bottom))
    return TargetMap.polynomial(_numbers(text))


_TRANSFORMS = {
    "translate": lambda args: translation(_reals(args, 3)),
    "rotate": lambda args: rotation(_reals(args, 4)[:3], _reals(args, 4)[3]),
    "dilate": lambda args: dilation(_reals(args, 1)[0]),
    "invert": lambda args: inversion(),
    "special": lambda args: special_conformal(_reals(args, 3)),
    "identity": lambda args: BaseConformalMap(),
}


def parse_transform(text):
    """Named base transform: translate:dx,dy,dz | rotate:ax,ay,az,angle | dilate:s | invert | special:bx,by,bz"""
    name, _, args = text.partition(":")
    if name not in _TRANSFORMS:
        raise DomainError(f"Unknown transform {name!r}, expected one of {', '.join(_TRANSFORMS)}")
    return _TRANSFORMS[name](args)
