import click

from hopf_eikonal.models import CartesianPoint
from hopf_eikonal.symmetry import parse_target_map, parse_transform
from hopf_eikonal.utils import DomainError


def _floats(text, count, label):
    try:
        values = [float(token) for token in text.split(",")]
    except ValueError:
        raise ValueError(f"{label} should be {count} comma separated numbers, got {text!r}")
    if len(values) != count:
        raise ValueError(f"{label} should have {count} components, got {len(values)}")
    return values


class PointType(click.ParamType):
    """Cartesian point written x,y,z"""

    name = "point"

    def convert(self, value, param, ctx):
        if isinstance(value, CartesianPoint):
            return value
        try:
            return CartesianPoint(*_floats(value, 3, "Point"))
        except (ValueError, AssertionError) as error:
            self.fail(str(error), param, ctx)


class EtaRangeType(click.ParamType):
    name = "low,high"

    def convert(self, value, param, ctx):
        if isinstance(value, tuple):
            return value
        try:
            low, high = _floats(value, 2, "eta range")
        except ValueError as error:
            self.fail(str(error), param, ctx)
        if not 0 <= low < high:
            self.fail("eta range should satisfy 0 <= low < high", param, ctx)
        return low, high


class TargetMapType(click.ParamType):
    name = "coefficients"

    def convert(self, value, param, ctx):
        try:
            return value, parse_target_map(value)
        except (DomainError, AssertionError) as error:
            self.fail(getattr(error, "message", str(error)), param, ctx)


class TransformType(click.ParamType):
    name = "transform"

    def convert(self, value, param, ctx):
        try:
            return value, parse_transform(value)
        except (DomainError, AssertionError) as error:
            self.fail(getattr(error, "message", str(error)), param, ctx)


POINT = PointType()
ETA_RANGE = EtaRangeType()
TARGET_MAP = TargetMapType()
TRANSFORM = TransformType()
