"""Command-line front end: enumeration, mapping, sampling, analysis, verify.

Subcommands: classes, params, pulse, narrow, walls, verify.  Complex flags
take "re,im" pairs plus the shorthands i, -i, 1, -1 and auto (the phase
that makes the constant-detuning pulse real).  Exit codes: 0 success,
1 module or verification failure, 2 usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .classes import (
    ClassId,
    ModelParams,
    enumerate_classes,
    finite_pulse_area,
    format_ustar,
    phi_exponents_trivial,
    real_amplitude_phase,
)
from .dynamics import verify_class
from .fields import TransformSpec
from .mapping import exponent_candidates, heun_params
from .pulseshape import narrow_pulse_roots, wall_positions

_G = "{:.17g}".format


def parse_complex(text, class_id=None):
    """Parse 're,im', a bare real, or the shorthands i / -i / auto."""
    text = text.strip()
    low = text.lower()
    if low in ("i", "+i", "1i"):
        return 1j
    if low in ("-i", "-1i"):
        return -1j
    if low == "auto":
        if class_id is None:
            raise ValueError("'auto' needs a class to pick the phase for")
        return real_amplitude_phase(class_id)
    if "," in text:
        re_s, im_s = text.split(",", 1)
        return complex(float(re_s), float(im_s))
    return complex(float(text))


def _add_grid_flags(p):
    p.add_argument("--t-min", type=float, default=-10.0)
    p.add_argument("--t-max", type=float, default=10.0)
    p.add_argument("--n", type=int, default=1001, help="grid points")


def _add_model_flags(p):
    p.add_argument("--a", required=True, help="singular-point location")
    p.add_argument("--U0star", default="auto",
                   help="amplitude scale ('re,im', i, -i, or auto)")
    p.add_argument("--d", help="d1,d2,d3 as one real triple")
    p.add_argument("--d1", help="detuning-modulation parameter at z=0")
    p.add_argument("--d2", help="detuning-modulation parameter at z=1")
    p.add_argument("--d3", help="detuning-modulation parameter at z=a")
    p.add_argument("--Delta", type=float, default=1.0,
                   help="constant detuning scale")


def _model_params(args, class_id):
    if args.d is not None:
        if args.d1 or args.d2 or args.d3:
            raise ValueError("give either --d or --d1/--d2/--d3, not both")
        parts = args.d.split(",")
        if len(parts) != 3:
            raise ValueError("--d needs three comma-separated values")
        d1, d2, d3 = (complex(float(x)) for x in parts)
    else:
        d1 = parse_complex(args.d1) if args.d1 else 0.0
        d2 = parse_complex(args.d2) if args.d2 else 0.0
        d3 = parse_complex(args.d3) if args.d3 else 0.0
    return ModelParams(a=parse_complex(args.a),
                       u0star=parse_complex(args.U0star, class_id),
                       d1=d1, d2=d2, d3=d3, Delta=args.Delta)


def _transform_spec(args, kind):
    if kind == "constant_detuning":
        return TransformSpec(kind="real_constant_detuning", Delta=args.Delta)
    if kind == "complex_line":
        for name in ("a0", "lambda1", "lambda2", "lambda3", "U0"):
            if getattr(args, name) is None:
                raise ValueError(f"--{name} is required for complex_line")
        return TransformSpec(kind="complex_line", Delta=args.Delta,
                             a0=args.a0, lambda1=args.lambda1,
                             lambda2=args.lambda2, lambda3=args.lambda3,
                             U0=args.U0)
    if kind == "periodic":
        return TransformSpec(kind="periodic_exponential", Delta=args.Delta,
                             U0=args.U0 if args.U0 is not None else 1.0)
    if kind == "constant_amplitude":
        return TransformSpec(kind="periodic_exponential", Delta=args.Delta,
                             U0=args.U0 if args.U0 is not None else 1.0,
                             Delta1=args.Delta1, Delta2=args.Delta2)
    raise ValueError(f"unknown transform {kind!r}")


def _cmd_classes(args):
    rows = []
    for c in enumerate_classes():
        rows.append({
            "class": list(c.doubled()),
            "text": c.to_text(),
            "amplitude": format_ustar(c),
            "finite_area": finite_pulse_area(c),
            "phi_trivial": phi_exponents_trivial(c),
        })
    if args.json:
        print(json.dumps(rows, indent=2, sort_keys=True))
        return 0
    header = f"{'class':>16}  {'finite_area':>11}  {'phi_trivial':>11}  amplitude"
    print(header)
    for r in rows:
        print(f"{r['text']:>16}  {str(r['finite_area']):>11}  "
              f"{str(r['phi_trivial']):>11}  {r['amplitude']}")
    print(f"total: {len(rows)} classes, "
          f"{sum(r['finite_area'] for r in rows)} finite-area, "
          f"{sum(r['phi_trivial'] for r in rows)} with trivial pre-factor")
    return 0


def _cmd_params(args):
    class_id = ClassId.parse(args.cls)
    params = _model_params(args, class_id)
    if args.branch:
        idx = [int(x) for x in args.branch.split(",")]
        if len(idx) != 3 or any(i not in (0, 1) for i in idx):
            raise ValueError("--branch needs three 0/1 indices, e.g. 0,1,0")
        choice = exponent_candidates(class_id, params).choice(*idx)
    else:
        choice = None
    mapping = heun_params(class_id, params, choice)
    text = json.dumps(mapping.to_json_dict(), indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def _cmd_pulse(args):
    class_id = ClassId.parse(args.cls)
    t_grid = np.linspace(args.t_min, args.t_max, args.n)
    spec = _transform_spec(args, args.transform)
    if args.transform == "constant_detuning":
        params = _model_params(args, class_id)
    else:
        params = ModelParams(a=parse_complex(args.a) if args.a else 0.5,
                             u0star=1.0)
    trace = spec.sample(class_id, params, t_grid)
    if args.normalize:
        trace = trace.normalized()
    if args.out:
        side = trace.write(args.out)
        print(f"wrote {args.out} and {side}", file=sys.stderr)
    else:
        sys.stdout.write(trace.to_csv())
    if args.plot:
        from .plots import render_trace
        render_trace(trace, args.plot)
        print(f"wrote {args.plot}", file=sys.stderr)
    return 0


def _cmd_narrow(args):
    if args.free == "d3":
        roots = narrow_pulse_roots(a=float(args.a), d1=float(args.d1),
                                   d2=float(args.d2), free="d3")
    else:
        roots = narrow_pulse_roots(d1=float(args.d1), d2=float(args.d2),
                                   d3=float(args.d3), free="a")
    if args.json:
        print(json.dumps([{
            "free": r.free_parameter, "value": r.value, "z0": r.z0,
            "admissible": r.admissible, "reason": r.reason} for r in roots],
            indent=2, sort_keys=True))
        return 0
    for r in roots:
        status = "admissible" if r.admissible else f"inadmissible ({r.reason})"
        print(f"{r.free_parameter} = {_G(r.value)}  z0 = {_G(r.z0)}  {status}")
    if not any(r.admissible for r in roots):
        print("no admissible infinitely-narrow-pulse root", file=sys.stderr)
    return 0


def _cmd_walls(args):
    t1, t2, d = wall_positions(float(args.a), float(args.d3), args.Delta,
                               float(args.d1), float(args.d2))
    if args.json:
        print(json.dumps({"t1": t1, "t2": t2, "d": d}, indent=2,
                         sort_keys=True))
    else:
        print(f"t1 = {_G(t1)}")
        print(f"t2 = {_G(t2)}")
        print(f"d = {_G(d)}")
    return 0


def _cmd_verify(args):
    class_id = ClassId.parse(args.cls)
    spec = _transform_spec(args, args.transform)
    if args.transform == "complex_line":
        params = None
    else:
        params = _model_params(args, class_id)
    threshold = args.threshold
    if threshold is None:
        threshold = float(os.environ.get("HEUNPULSE_TOL", 1e-5))
    report = verify_class(class_id, params, spec,
                          z_interval=(args.z_min, args.z_max),
                          rel_tol=args.rel_tol, n_samples=args.n_samples)
    text = json.dumps(report.to_json_dict(), indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
        print(f"wrote {args.out}", file=sys.stderr)
    else:
        print(text)
    if args.plot:
        from .plots import render_verification
        render_verification(report, args.plot)
        print(f"wrote {args.plot}", file=sys.stderr)
    if not report.passed(threshold):
        print(f"verification FAILED: max relative error "
              f"{report.max_relative_error:.3e} > threshold {threshold:.3e}",
              file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="heunpulse",
        description="Two-state pulse models built on the general Heun "
                    "equation: class census, parameter mapping, pulse "
                    "synthesis, pulse geometry, verification.")
    sub = ap.add_subparsers(dest="command", required=True)

    p_classes = sub.add_parser("classes", help="the 35 solvable classes")
    p_classes.add_argument("action", choices=["list"])
    p_classes.add_argument("--json", action="store_true")

    p_params = sub.add_parser("params", help="Heun parameters of a class")
    p_params.add_argument("--class", dest="cls", required=True,
                          help='exponent triple, e.g. "0,0,-1"')
    _add_model_flags(p_params)
    p_params.add_argument("--branch", help="exponent root indices, e.g. 0,0,1")
    p_params.add_argument("--out", help="write JSON here instead of stdout")

    p_pulse = sub.add_parser("pulse", help="sample a field configuration")
    p_pulse.add_argument("--class", dest="cls", required=True)
    p_pulse.add_argument("--transform", default="constant_detuning",
                         choices=["constant_detuning", "complex_line",
                                  "periodic", "constant_amplitude"])
    p_pulse.add_argument("--a", required=False)
    p_pulse.add_argument("--U0star", default="auto")
    p_pulse.add_argument("--d")
    p_pulse.add_argument("--d1")
    p_pulse.add_argument("--d2")
    p_pulse.add_argument("--d3")
    p_pulse.add_argument("--Delta", type=float, default=1.0)
    p_pulse.add_argument("--a0", type=float)
    p_pulse.add_argument("--lambda1", type=float)
    p_pulse.add_argument("--lambda2", type=float)
    p_pulse.add_argument("--lambda3", type=float)
    p_pulse.add_argument("--U0", type=float)
    p_pulse.add_argument("--Delta1", type=float)
    p_pulse.add_argument("--Delta2", type=float)
    _add_grid_flags(p_pulse)
    p_pulse.add_argument("--normalize", action="store_true",
                         help="scale the written pulse to peak 1")
    p_pulse.add_argument("--out", help="CSV path (adds a .json sidecar)")
    p_pulse.add_argument("--plot", help="render the trace to this image file")

    p_narrow = sub.add_parser("narrow",
                              help="zero-discriminant (narrow pulse) roots")
    p_narrow.add_argument("--class", dest="cls", help="accepted, informational")
    p_narrow.add_argument("--a")
    p_narrow.add_argument("--d1", required=True)
    p_narrow.add_argument("--d2", required=True)
    p_narrow.add_argument("--d3")
    p_narrow.add_argument("--free", default="d3", choices=["d3", "a"])
    p_narrow.add_argument("--json", action="store_true")

    p_walls = sub.add_parser("walls", help="vertical-wall edge positions")
    p_walls.add_argument("--a", required=True)
    p_walls.add_argument("--d3", required=True)
    p_walls.add_argument("--d1", default="0")
    p_walls.add_argument("--d2", default="0")
    p_walls.add_argument("--Delta", type=float, default=1.0)
    p_walls.add_argument("--json", action="store_true")

    p_verify = sub.add_parser("verify",
                              help="analytic solution vs direct integration")
    p_verify.add_argument("--class", dest="cls", required=True)
    p_verify.add_argument("--transform", default="constant_detuning",
                          choices=["constant_detuning", "complex_line",
                                   "periodic", "constant_amplitude"])
    p_verify.add_argument("--a")
    p_verify.add_argument("--U0star", default="auto")
    p_verify.add_argument("--d")
    p_verify.add_argument("--d1")
    p_verify.add_argument("--d2")
    p_verify.add_argument("--d3")
    p_verify.add_argument("--Delta", type=float, default=1.0)
    p_verify.add_argument("--a0", type=float)
    p_verify.add_argument("--lambda1", type=float)
    p_verify.add_argument("--lambda2", type=float)
    p_verify.add_argument("--lambda3", type=float)
    p_verify.add_argument("--U0", type=float)
    p_verify.add_argument("--Delta1", type=float)
    p_verify.add_argument("--Delta2", type=float)
    p_verify.add_argument("--z-min", type=float, default=0.05)
    p_verify.add_argument("--z-max", type=float, default=0.95)
    p_verify.add_argument("--rel-tol", type=float, default=1e-12)
    p_verify.add_argument("--n-samples", type=int, default=81)
    p_verify.add_argument("--threshold", type=float, default=None,
                          help="max relative error accepted "
                               "(default 1e-5 or HEUNPULSE_TOL)")
    p_verify.add_argument("--out", help="write the JSON report here")
    p_verify.add_argument("--plot", help="render the comparison to this file")

    return ap


_DISPATCH = {
    "classes": _cmd_classes,
    "params": _cmd_params,
    "pulse": _cmd_pulse,
    "narrow": _cmd_narrow,
    "walls": _cmd_walls,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except (ValueError, ZeroDivisionError, RuntimeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
