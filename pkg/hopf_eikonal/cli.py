"""
Command line front end. Every command validates its inputs into a RunConfig, runs one library operation and
echoes the effective configuration into its report.
"""
import logging
import math
import os

import attr
import click

from hopf_eikonal import config, CONTROL_FIELDS, SAMPLING_REGIONS, LINK_METHODS, EXPORT_FORMATS
from hopf_eikonal.calculus import control_field, residual_scan
from hopf_eikonal.coords import to_toroidal
from hopf_eikonal.export import to_json, write_atomic, render_fibers, read_fibers_csv
from hopf_eikonal.fibers import (
    trace_fiber,
    trace_level_set,
    seed_on_level_set,
    polyline_linking,
    hopf_index,
    composed_hopf_index,
)
from hopf_eikonal.geometry import verify_geometry
from hopf_eikonal.hopf import evaluate, hopf_field, naive_field
from hopf_eikonal.models import HopfMapSpec, SamplingSpec, TraceOptions, LinkingResult, RunConfig
from hopf_eikonal.params import POINT, ETA_RANGE, TARGET_MAP, TRANSFORM
from hopf_eikonal.symmetry import compose_target, transform_base
from hopf_eikonal.utils import reports_errors, install_log_handler, DomainError, ToleranceError

logger = logging.getLogger(__name__)


def map_options(func):
    func = click.option("-n", "n", type=int, default=1, show_default=True, help="Winding n (phi)")(func)
    return click.option("-m", "m", type=int, default=1, show_default=True, help="Winding m (xi)")(func)


def sampling_options(func):
    options = [
        click.option("--samples", type=int, default=None, help="Number of sample points"),
        click.option("--seed", type=int, default=None, help="Sampling seed"),
        click.option("--region", type=click.Choice(SAMPLING_REGIONS), default=None),
        click.option("--eta-range", type=ETA_RANGE, default=None, help="eta shell of the toroidal region"),
        click.option("--half-width", type=float, default=None, help="Half width of the box region"),
        click.option("--h", "h", type=float, default=None, help="Finite difference step"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def trace_options(func):
    options = [
        click.option("--step", type=float, default=None, help="Maximum arc length step"),
        click.option("--tolerance", type=float, default=None, help="Local RKF45 error tolerance"),
        click.option("--max-steps", type=int, default=None),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def output_option(func):
    return click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)(func)


def _present(**kwargs):
    return {key: value for key, value in kwargs.items() if value is not None}


def _sampling(samples, seed, region, eta_range, half_width):
    return SamplingSpec(
        **_present(count=samples, seed=seed, region=region, eta_range=eta_range, half_width=half_width)
    )


def _trace_options(eta, step, tolerance, max_steps):
    return TraceOptions.for_torus(eta, **_present(step=step, tolerance=tolerance, max_steps=max_steps))


def _emit(text, output):
    if output is None:
        click.echo(text, nl=False)
    else:
        write_atomic(output, text)


def _report(report, run, output):
    report["config"] = run.to_dict()
    _emit(to_json(report), output)


def _format_complex(value):
    # adding 0.0 turns -0.0 into 0.0
    return f"{value.real + 0.0:.16g}{value.imag + 0.0:+.16g}i"


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Log at DEBUG level")
@click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False), help="Extra .cfg file")
def cli(verbose, config_file):
    """Toroidal Hopf maps chi^(m,n) solving the static complex eikonal equation."""
    if config_file is not None:
        config.from_pyfile(os.path.abspath(config_file))
        logger.info("Using config from %s", config_file)
    install_log_handler(logging.DEBUG if verbose else config["LOG_LEVEL"])


@cli.command("eval")
@map_options
@click.option("--point", "-p", type=POINT, required=True, help="Cartesian point x,y,z")
@reports_errors
def cmd_eval(m, n, point):
    """Evaluate chi^(m,n) at a point and print its toroidal coordinates."""
    spec = HopfMapSpec(m, n)
    value = evaluate(spec, point)
    t = to_toroidal(point)
    click.echo(_format_complex(value))
    click.echo(f"eta={t.eta:.16g} xi={t.xi:.16g} phi={t.phi:.16g}" + (" (z axis)" if t.axis else ""))


@cli.command("scan")
@map_options
@click.option("--field", "field_name", type=click.Choice(CONTROL_FIELDS), default=None, help="Control field")
@click.option("--naive", is_flag=True, help="Scan the S = sinh(eta) Hopf map instead")
@click.option("--compose", type=TARGET_MAP, default=None, help="Target map F, ascending coefficients")
@click.option("--transform", "transforms", type=TRANSFORM, multiple=True, help="Base transform, applied in order")
@sampling_options
@click.option("--fail-above", type=float, default=None, help="Exit 3 when the max residual exceeds this")
@output_option
@reports_errors
def cmd_scan(
    m, n, field_name, naive, compose, transforms, samples, seed, region, eta_range, half_width, h, fail_above, output
):
    """Sample the normalized eikonal residual of a field and report max, mean and p99 as JSON."""
    if field_name is not None and naive:
        raise DomainError("--field and --naive are mutually exclusive")
    sampling = _sampling(samples, seed, region, eta_range, half_width)
    if field_name is not None:
        field = control_field(field_name)
    else:
        spec = HopfMapSpec(m, n)
        field = naive_field(spec) if naive else hopf_field(spec)
    for _, transform in transforms:
        field = transform_base(field, transform)
    if compose is not None:
        field = compose_target(field, compose[1])

    run = RunConfig(
        command="scan",
        m=m,
        n=n,
        field=field.describe(),
        sampling=sampling.to_dict(),
        transforms=[text for text, _ in transforms],
        compose=compose[0] if compose else None,
        output=output,
        seed=sampling.seed,
    )
    report = residual_scan(field, sampling, h)
    result = report.to_dict()
    result["map"] = {"m": m, "n": n, "field": field.describe()}
    _report(result, run, output)
    if fail_above is not None and report.max > fail_above:
        raise ToleranceError(f"Max normalized residual {report.max:.3e} exceeds {fail_above:.3e}")


@cli.command("trace")
@map_options
@click.option("--eta", type=float, default=1.0, show_default=True, help="Torus eta = const of the level set")
@click.option("--sigma", type=float, default=0.0, show_default=True, help="Phase of the level set")
@click.option("--component", type=int, default=None, help="Trace one component only (default: all)")
@trace_options
@click.option("--format", "fmt", type=click.Choice(EXPORT_FORMATS), default="csv", show_default=True)
@output_option
@click.option("--report", "report_path", type=click.Path(dir_okay=False), default=None, help="JSON summary")
@reports_errors
def cmd_trace(m, n, eta, sigma, component, step, tolerance, max_steps, fmt, output, report_path):
    """Trace the fiber(s) of the level set through (eta, xi, 0) with m xi + n phi = sigma."""
    spec = HopfMapSpec(m, n)
    opts = _trace_options(eta, step, tolerance, max_steps)
    if component is None:
        fibers = trace_level_set(spec, eta, sigma, opts)
    else:
        seed = seed_on_level_set(spec, eta, sigma, component)
        fibers = [attr.evolve(trace_fiber(spec, seed, opts), component=component)]
    _emit(render_fibers(fibers, fmt), output)

    if report_path is not None:
        run = RunConfig(command="trace", m=m, n=n, trace=opts.to_dict(), output=output, fmt=fmt)
        summary = {
            "map": spec.to_dict(),
            "eta": eta,
            "sigma": sigma,
            # fibers run along -n d_xi + m d_phi, so each closes after (-n/g, m/g) turns
            "orientation": {
                "convention": "(xi, phi) windings = (-n/g, m/g)",
                "windings": {"xi": -n / spec.g, "phi": m / spec.g},
            },
            "fibers": [f.to_dict() for f in fibers],
        }
        _report(summary, run, report_path)


@cli.command("link")
@click.argument("files", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--method", type=click.Choice(LINK_METHODS), default=None)
@output_option
@reports_errors
def cmd_link(files, method, output):
    """
    Linking number of exported fibers. One file must hold exactly two fibers; with two files, every fiber
    of the first is linked with every fiber of the second and the results summed.
    """
    if len(files) > 2:
        raise DomainError("link takes one or two CSV files")
    curves = [read_fibers_csv(path) for path in files]
    if len(files) == 1:
        if len(curves[0]) != 2:
            raise DomainError(f"{files[0]} holds {len(curves[0])} fibers; expected exactly two")
        first, second = [curves[0][0]], [curves[0][1]]
    else:
        first, second = curves
    method = method or config["LINK_METHOD"]
    raw = math.fsum(polyline_linking(a, b, method=method) for a in first for b in second)
    result = LinkingResult.from_raw(raw, components=max(len(first), len(second)), method=method)
    if not result.valid:
        logger.warning("Linking integral %.6f is not close to an integer", result.raw)
    run = RunConfig(command="link", inputs=files, output=output)
    _report(result.to_dict(), run, output)


@cli.command("index")
@map_options
@click.option("--compose", type=TARGET_MAP, default=None, help="Index of F o chi^(m,n) instead")
@click.option("--method", type=click.Choice(LINK_METHODS), default=None)
@output_option
@reports_errors
def cmd_index(m, n, compose, method, output):
    """Hopf index N_H as the linking number of two traced level sets; expected m*n."""
    spec = HopfMapSpec(m, n)
    if compose is None:
        result = hopf_index(spec, method=method)
    else:
        result = composed_hopf_index(spec, compose[1], method=method)
    run = RunConfig(
        command="index",
        m=m,
        n=n,
        compose=compose[0] if compose else None,
        output=output,
    )
    report = result.to_dict()
    report["map"] = spec.to_dict()
    _report(report, run, output)
    if not result.valid:
        raise ToleranceError(f"Linking integral {result.raw:.6f} is not within tolerance of an integer")


@cli.command("verify")
@map_options
@sampling_options
@output_option
@reports_errors
def cmd_verify(m, n, samples, seed, region, eta_range, half_width, h, output):
    """Run the geometry suite: vertical annihilation, frame and coframe checks, conformal comparison."""
    spec = HopfMapSpec(m, n)
    sampling = _sampling(
        samples if samples is not None else config["VERIFY_SAMPLES"], seed, region, eta_range, half_width
    )
    report = verify_geometry(spec, sampling, h=h)
    run = RunConfig(command="verify", m=m, n=n, sampling=sampling.to_dict(), output=output, seed=sampling.seed)
    _report(report.to_dict(), run, output)
    if not report.all_passed:
        failed = [name for name, passed in report.passed.items() if not passed]
        raise ToleranceError(f"Geometry checks failed: {', '.join(failed)}")
