"""Command line interface: frequency scans, pole reports, verification.

Subcommands
-----------
scan
    Evaluate a response quantity on a uniform frequency grid and emit CSV
    or JSON rows, frequency-major and channel-minor.
poles
    Locate the pair of resonance poles of the transition matrix.
verify
    Run the built-in acceptance checks, optionally gated on a user config.
selfenergy
    Dump masses, renormalization constants and self-energies for a config.

Scans honor the ``QUBIT_QED_THREADS`` environment variable by splitting
the grid into per-thread chunks and reassembling them in chunk order, so
the emitted bytes do not depend on the thread count.
"""

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .errors import (
    ConfigError,
    CouplingTooLarge,
    DomainError,
    NoConvergence,
    QuadratureError,
    QubitQedError,
)
from .model import parse_config
from .quadrature import DEFAULT_QUAD
from .response import QUANTITIES, locate_poles, scan_points
from .selfenergy import (
    coefficients_b_delta,
    electron_self_energy_2,
    mass_correction,
    photon_self_energy_2,
    photon_self_energy_24,
)

SCAN_VERSION = "qubit-qed v1"

EXIT_CONFIG = 2
EXIT_DOMAIN = 3
EXIT_COUPLING = 4
EXIT_CONVERGENCE = 5


def _fmt(x):
    """Shortest round-trip decimal for a float."""
    return format(float(x), ".17g")


def _fmt_complex(z):
    z = complex(z)
    return f"{z.real:.17g}{z.imag:+.17g}j"


def _order_label(order):
    return "2" if int(order) == 2 else "2+4"


def _fail(code, exc):
    print(f"error: {exc}", file=sys.stderr)
    raise SystemExit(code)


def _load_model(path):
    # config phase: every package error maps to the config exit code
    try:
        return parse_config(path)
    except QubitQedError as exc:
        _fail(EXIT_CONFIG, exc)


def _compute(fn):
    """Run a computation, translating package errors to exit codes."""
    try:
        return fn()
    except (QuadratureError, CouplingTooLarge) as exc:
        _fail(EXIT_COUPLING, exc)
    except NoConvergence as exc:
        _fail(EXIT_CONVERGENCE, exc)
    except ConfigError as exc:
        _fail(EXIT_CONFIG, exc)
    except DomainError as exc:
        _fail(EXIT_DOMAIN, exc)


def _emit(data, output):
    if isinstance(data, str):
        data = data.encode()
    if output == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        Path(output).write_bytes(data)


# Scan rendering ---------------------------------------------------------------


def _thread_count():
    raw = os.environ.get("QUBIT_QED_THREADS", "").strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"QUBIT_QED_THREADS must be an integer, got {raw!r}")


def _scan_rows(model, quantity, order, omegas, quad):
    nthreads = _thread_count()
    if nthreads == 1 or omegas.size < 2 * nthreads:
        return scan_points(model, quantity, order, omegas, quad)
    # each grid point is evaluated independently, so per-chunk evaluation
    # reproduces the serial values; reassembly in submit order keeps the
    # row order (and hence the bytes) thread-count invariant
    chunks = np.array_split(omegas, nthreads)
    with ThreadPoolExecutor(max_workers=nthreads) as pool:
        futures = [pool.submit(scan_points, model, quantity, order, chunk, quad) for chunk in chunks]
        rows = []
        for future in futures:
            rows.extend(future.result())
    return rows


def render_scan(model, quantity, order, omega_min, omega_max, points, fmt, quad=DEFAULT_QUAD):
    """Render a frequency scan to CSV or JSON bytes.

    Parameters
    ----------
    quantity : str
        One of ``transition``, ``scattering``, ``susceptibility``,
        ``polarizability``.
    order : int
        2 for bare second order, 4 for the resummed second-plus-fourth
        order (written as ``2+4`` in the output).
    fmt : str
        ``csv`` or ``json``.

    Returns
    -------
    bytes
        Deterministic for fixed inputs, independent of thread count.
    """
    points = int(points)
    if points < 1:
        raise DomainError(f"scan needs at least one point, got {points}")
    omegas = np.linspace(float(omega_min), float(omega_max), points)
    rows = _scan_rows(model, quantity, order, omegas, quad)
    label = _order_label(order)
    if fmt == "csv":
        lines = [f"# {SCAN_VERSION}", "omega,channel,re,im,order,quantity"]
        for r in rows:
            lines.append(
                f"{_fmt(r.omega)},{r.channel},{_fmt(r.value.real)},{_fmt(r.value.imag)},{label},{r.quantity}"
            )
        return ("\n".join(lines) + "\n").encode()
    if fmt == "json":
        payload = {
            "version": SCAN_VERSION,
            "quantity": quantity,
            "order": label,
            "rows": [
                {"omega": r.omega, "channel": r.channel, "re": r.value.real, "im": r.value.imag}
                for r in rows
            ],
        }
        return (json.dumps(payload, indent=2) + "\n").encode()
    raise DomainError(f"unknown scan format {fmt!r}")


def read_scan_csv(source):
    """Parse a scan CSV produced by ``render_scan`` back into arrays.

    Returns a dict with keys ``omega`` (float array), ``channel`` (list of
    str), ``value`` (complex array), ``order`` and ``quantity`` (lists of
    str).  Raises :class:`ConfigError` on a malformed header or row.
    """
    text = Path(source).read_text()
    lines = text.splitlines()
    if not lines or lines[0] != f"# {SCAN_VERSION}":
        raise ConfigError(f"{source}: missing scan version header")
    if len(lines) < 2 or lines[1] != "omega,channel,re,im,order,quantity":
        raise ConfigError(f"{source}: missing scan column header")
    omega, channel, value, order, quantity = [], [], [], [], []
    for ln, line in enumerate(lines[2:], start=3):
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 6:
            raise ConfigError(f"{source}:{ln}: expected 6 columns, got {len(parts)}")
        try:
            omega.append(float(parts[0]))
            value.append(complex(float(parts[2]), float(parts[3])))
        except ValueError as exc:
            raise ConfigError(f"{source}:{ln}: {exc}")
        channel.append(parts[1])
        order.append(parts[4])
        quantity.append(parts[5])
    return {
        "omega": np.array(omega),
        "channel": channel,
        "value": np.array(value, dtype=complex),
        "order": order,
        "quantity": quantity,
    }


# Subcommands ------------------------------------------------------------------


def _cmd_scan(args):
    model = _load_model(args.config)
    data = _compute(
        lambda: render_scan(
            model,
            args.quantity,
            args.order,
            args.omega_min,
            args.omega_max,
            args.points,
            args.format,
        )
    )
    _emit(data, args.output)
    return 0


def _cmd_poles(args):
    model = _load_model(args.config)
    reports = _compute(lambda: locate_poles(model, args.order))
    lines = ["channel,re,im"]
    for rep in reports:
        lines.append(f"{rep.channel},{_fmt(rep.location.real)},{_fmt(rep.location.imag)}")
    _emit("\n".join(lines) + "\n", args.output)
    return 0


def _cmd_verify(args):
    gate = None
    if args.config is not None:
        model = _load_model(args.config)
        # the resummation coefficients double as a sanity gate on the
        # user's coupling before the slow checks run
        gate = _compute(lambda: coefficients_b_delta(model))
    from .oracle import acceptance_suite, report_text

    results = _compute(lambda: acceptance_suite(only=args.only))
    if not results:
        _fail(EXIT_CONFIG, ConfigError(f"no acceptance check matches {args.only!r}"))
    ok = all(r.passed for r in results)
    if args.format == "json":
        payload = {
            "checks": [
                {
                    "name": r.name,
                    "computed": r.computed,
                    "tolerance": r.tolerance,
                    "passed": r.passed,
                    "detail": r.detail,
                }
                for r in results
            ],
            "passed": ok,
        }
        if gate is not None:
            payload["config"] = {"b": gate[0], "delta": gate[1]}
        _emit(json.dumps(payload, indent=2) + "\n", args.output)
    else:
        lines = []
        if gate is not None:
            lines.append(f"config ok: b={gate[0]:.6g} delta={gate[1]:.6g}")
        lines.append(report_text(results))
        npass = sum(r.passed for r in results)
        lines.append(f"{npass}/{len(results)} checks passed")
        _emit("\n".join(lines) + "\n", args.output)
    return 0 if ok else 1


def _cmd_selfenergy(args):
    model = _load_model(args.config)

    def build():
        mc = mass_correction(model)
        b, delta = coefficients_b_delta(model)
        sigma = electron_self_energy_2(model, args.p0)
        pi2 = photon_self_energy_2(model, args.k0)
        pi24 = photon_self_energy_24(model, args.k0)
        return mc, b, delta, sigma, pi2, pi24

    mc, b, delta, sigma, pi2, pi24 = _compute(build)
    lines = [
        f"variant={model.variant.value}",
        f"m_e={_fmt(model.m_e)}",
        f"m_g={_fmt(model.m_g)}",
        f"delta_m_e={_fmt(mc.delta_m_e)}",
        f"delta_m_g={_fmt(mc.delta_m_g)}",
        f"m_t={_fmt(mc.m_t)}",
        f"b={_fmt(b)}",
        f"delta={_fmt(delta)}",
        f"p0={_fmt(args.p0)}",
        f"sigma_e={_fmt_complex(sigma.c_e)}",
        f"sigma_g={_fmt_complex(sigma.c_g)}",
        f"k0={_fmt(args.k0)}",
    ]
    for name, val in pi2.channels():
        lines.append(f"pi2_{name}={_fmt_complex(val)}")
    for name, val in pi24.channels():
        lines.append(f"pi24_{name}={_fmt_complex(val)}")
    _emit("\n".join(lines) + "\n", args.output)
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="qubit-qed",
        description="Perturbative electrodynamics of spin and atom qubits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    scan = sub.add_parser("scan", help="evaluate a response quantity on a frequency grid")
    scan.add_argument("--config", required=True, help="flat key=value model config")
    scan.add_argument("--quantity", required=True, choices=QUANTITIES)
    scan.add_argument("--order", type=int, choices=(2, 4), default=4)
    scan.add_argument("--omega-min", type=float, required=True)
    scan.add_argument("--omega-max", type=float, required=True)
    scan.add_argument("--points", type=int, required=True)
    scan.add_argument("--output", default="-", help="output path, - for stdout")
    scan.add_argument("--format", choices=("csv", "json"), default="csv")
    scan.set_defaults(func=_cmd_scan)

    poles = sub.add_parser("poles", help="locate the resonance pole pair")
    poles.add_argument("--config", required=True)
    poles.add_argument("--order", type=int, choices=(2, 4), default=4)
    poles.add_argument("--output", default="-")
    poles.set_defaults(func=_cmd_poles)

    verify = sub.add_parser("verify", help="run the built-in acceptance checks")
    verify.add_argument("--config", help="optional config gated before the checks")
    verify.add_argument("--only", help="run only checks whose name contains this substring")
    verify.add_argument("--format", choices=("text", "json"), default="text")
    verify.add_argument("--output", default="-")
    verify.set_defaults(func=_cmd_verify)

    se = sub.add_parser("selfenergy", help="dump masses and self-energies for a config")
    se.add_argument("--config", required=True)
    se.add_argument("--p0", type=float, default=0.0, help="matter energy argument")
    se.add_argument("--k0", type=float, default=0.0, help="photon energy argument")
    se.add_argument("--output", default="-")
    se.set_defaults(func=_cmd_selfenergy)

    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    return args.func(args)
