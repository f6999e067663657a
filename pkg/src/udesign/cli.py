"""Command-line front end.

Subcommands
-----------
construct   sample a path or curve to CSV (plus a JSON descriptor)
verify      design report for a path, optionally a frame-potential scan
simulate    gate | memory | ff robustness data
project     map S^3 points through stereo / hopf / R / T / Q

Every command that writes files also writes ``<out>.manifest.json``;
``udesign --replay <manifest>`` reruns it and reproduces the same bytes.
Units: Omega = 1, times in 1/Omega, frequencies in Omega.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__, _kernels, design, sphere, upath
from . import io as uio
from .qmat import ValidationError, parse_axis

log = logging.getLogger("udesign")


def parse_range(text: str, integer: bool = False):
    """``a:b[:step]`` inclusive of ``b``; a bare number is a single value."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            vals = [float(parts[0])]
        elif len(parts) in (2, 3):
            a, b = float(parts[0]), float(parts[1])
            step = float(parts[2]) if len(parts) == 3 else 1.0
            if step <= 0 or b < a:
                raise ValueError
            n = int(np.floor((b - a) / step + 1e-9)) + 1
            vals = [a + k * step for k in range(n)]
        else:
            raise ValueError
    except ValueError:
        raise ValidationError(f"bad range {text!r}; expected a:b[:step]") from None
    if integer:
        return [int(round(v)) for v in vals]
    # round off accumulated representation noise, e.g. 0.30000000000000004
    return [float(np.round(v, 12)) for v in vals]


def _csv_list(text):
    return [t.strip() for t in text.split(",") if t.strip()]


# ---------------------------------------------------------------------------
# path / curve construction from arguments
# ---------------------------------------------------------------------------

PATH_KINDS = ("two-axis", "fixed-angle", "open", "tensor", "fiber", "hw", "curve")


def add_path_args(p):
    p.add_argument("--path", choices=PATH_KINDS)
    p.add_argument("--n1", default="z")
    p.add_argument("--n2", default="y")
    p.add_argument("--axis", dest="axis_n", default="z", help="fixed-angle rotation axis")
    p.add_argument("--n-perp", default="x")
    p.add_argument("--twist", type=int, default=1, choices=(1, -1))
    p.add_argument("--target", default="Z", help="I, X, Y, Z or R<axis>:<angle>")
    p.add_argument("--qubits", type=int, default=2)
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--curve", choices=[k.value for k in sphere.CurveKind])
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--half-dim", type=int, default=2)


def build_path(a) -> upath.UnitaryPath:
    kind = a.path
    if kind == "two-axis":
        return upath.TwoAxis(parse_axis(a.n1), parse_axis(a.n2))
    if kind == "fixed-angle":
        return upath.FixedAngleAxis(parse_axis(a.axis_n), parse_axis(a.n_perp), a.twist)
    if kind == "open":
        return upath.build_open_path(upath.TwoAxis(parse_axis(a.n1), parse_axis(a.n2)), upath.named_target(a.target))
    if kind == "tensor":
        pair = (parse_axis(a.n1), parse_axis(a.n2))
        return upath.TensorQubits([pair] * a.qubits)
    if kind == "fiber":
        return upath.FiberBundle(a.d)
    if kind == "hw":
        return upath.HeisenbergWeyl(a.d)
    if kind == "curve":
        return upath.CurvePath(build_curve(a))
    raise ValidationError("choose --path")


def build_curve(a) -> sphere.CurveSpec:
    if not a.curve:
        raise ValidationError("choose --curve")
    return sphere.CurveSpec(a.curve, phi=a.phi, half_dim=a.half_dim)


def project_points(x, how: str, phi: float = 0.0):
    how = how.lower()
    if how == "none":
        return x
    if how == "stereo":
        return sphere.stereographic_project(x)
    if how == "hopf":
        return sphere.hopf_map(x)
    if how.upper() in ("R", "T", "Q"):
        return sphere.apply_fixed_rotation(how.upper(), x, phi)
    raise ValidationError(f"unknown projection {how!r}")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_construct(a):
    out = Path(a.out)
    if a.curve and not a.path:
        spec = build_curve(a)
        s = np.arange(a.samples) / a.samples
        x = sphere.eval_curve(spec, s)
        y = project_points(x, a.project, a.phi)
        header = ["s"] + [f"x{i + 1}" for i in range(y.shape[1])]
        uio.write_csv(out, header, ([si, *row] for si, row in zip(s, y)))
        desc = {"curve": spec.kind.value, "phi": spec.phi, "half_dim": spec.half_dim,
                "samples": a.samples, "projection": a.project, "arc_length": sphere.arc_length(spec)}
    else:
        path = build_path(a)
        s = upath.sample_points(path, a.samples)
        u = path.eval_many(s)
        header = ["s"] + uio.matrix_columns(path.dim)
        uio.write_csv(out, header, ([si, *uio.matrix_row(m)] for si, m in zip(s, u)))
        desc = path.to_dict()
        desc["samples"] = a.samples
        desc["period_note"] = path.period_note
    js = uio.sidecar(out, ".json")
    uio.write_json(js, desc)
    return [out, js]


def cmd_verify(a):
    path = build_path(a)
    n = a.n if a.n is not None else path.min_samples
    report = design.verify_path(path, n, a.tol)
    outputs = []
    text = report.to_json()
    if a.out:
        outputs.append(uio.atomic_write(a.out, text + "\n"))
    else:
        print(text)
    if a.scan:
        rows = design.design_scan(path, parse_range(a.scan, integer=True))
        if a.out or a.scan_out:
            target = Path(a.scan_out) if a.scan_out else uio.sidecar(a.out, "_scan.csv")
            outputs.append(uio.write_csv(target, ["N", "F"], rows))
        else:
            sys.stdout.write(uio.csv_text(["N", "F"], rows))
    return outputs


def _prop_cfg(a):
    from .control import PropagationConfig

    return PropagationConfig(steps_per_segment=a.steps) if a.steps else PropagationConfig()


def cmd_sim_gate(a):
    from .control import MonteCarloConfig, fidelity_sweep, named_pulse

    etas = parse_range(a.eta)
    mc = MonteCarloConfig(a.trials, a.seed)
    cfg = _prop_cfg(a)
    rows, meta = [], {}
    for name in _csv_list(a.pulses):
        pulse = named_pulse(name, a.omega)
        for eta, mean, se in fidelity_sweep(pulse, [e * a.omega for e in etas], mc, cfg):
            rows.append([name, eta / a.omega, mean, se])
        meta[name] = pulse.describe()
    out = Path(a.out)
    uio.write_csv(out, ["pulse", "eta", "mean_F", "stderr"], rows)
    js = uio.sidecar(out, ".json")
    uio.write_json(js, {"seed": a.seed, "trials": a.trials, "steps": a.steps or "adaptive",
                        "pulses": meta, "rows": rows})
    return [out, js]


def cmd_sim_memory(a):
    from .control import MonteCarloConfig, equal_time_repetitions, memory_decay

    kinds = _csv_list(a.kinds)
    reps = equal_time_repetitions(kinds, a.reps, a.tau, a.omega)
    mc = MonteCarloConfig(a.trials, a.seed)
    rows, summary = [], {}
    for k in kinds:
        res = memory_decay(k, reps[k], mc, _prop_cfg(a), a.tau, a.omega, a.etamax)
        for r, m, se in res.rows():
            rows.append([k, r, r * res.cycle_time, m, se])
        mean, se = res.run_mean()
        summary[k] = {"repetitions": reps[k], "cycle_time": res.cycle_time, "run_mean": mean, "run_stderr": se}
    out = Path(a.out)
    uio.write_csv(out, ["kind", "repetition", "time", "mean_F", "stderr"], rows)
    js = uio.sidecar(out, ".json")
    uio.write_json(js, {"seed": a.seed, "trials": a.trials, "steps": a.steps or "adaptive",
                        "eta_max": a.etamax, "summary": summary, "rows": rows})
    return [out, js]


def cmd_sim_ff(a):
    from .control import filter_function, named_pulse

    w = np.array(parse_range(a.omega_grid))
    rows, meta = [], {}
    for name in _csv_list(a.pulses):
        pulse = named_pulse(name, a.omega)
        ff = filter_function(pulse, w * a.omega, _prop_cfg(a))
        rows.extend([name, wi, *ff[:, i]] for i, wi in enumerate(w))
        meta[name] = pulse.describe()
    out = Path(a.out)
    uio.write_csv(out, ["pulse", "omega", "FF_x", "FF_y", "FF_z"], rows)
    js = uio.sidecar(out, ".json")
    uio.write_json(js, {"steps": a.steps or "adaptive", "pulses": meta, "rows": rows})
    return [out, js]


def cmd_project(a):
    header, rows = uio.read_csv(a.input)
    cols = [header.index(c) for c in ("x1", "x2", "x3", "x4") if c in header]
    if len(cols) != 4:
        raise ValidationError("input CSV needs columns x1..x4")
    x = np.array([[float(r[c]) for c in cols] for r in rows])
    y = project_points(x, a.map, a.phi)
    lead = header.index("s") if "s" in header else None
    out_header = (["s"] if lead is not None else []) + [f"y{i + 1}" for i in range(y.shape[1])]
    body = ([float(r[lead])] if lead is not None else [] for r in rows)
    uio.write_csv(a.out, out_header, ([*b, *yy] for b, yy in zip(body, y)))
    return [Path(a.out)]


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="udesign", description="Unitary 1-design paths and robust control.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--replay", metavar="MANIFEST", help="rerun the command recorded in a manifest")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command")

    c = sub.add_parser("construct", help="sample a path or curve")
    add_path_args(c)
    c.add_argument("--samples", type=int, default=128)
    c.add_argument("--project", default="none", help="none, stereo, hopf, R, T or Q (curves only)")
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_construct)

    v = sub.add_parser("verify", help="design report for a path")
    add_path_args(v)
    v.add_argument("--n", type=int, default=None, help="equiangular sample count")
    v.add_argument("--scan", help="N range a:b[:step] for a frame-potential scan")
    v.add_argument("--scan-out")
    v.add_argument("--tol", type=float, default=design.EXACT_TOL)
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("simulate", help="robustness simulations")
    ss = s.add_subparsers(dest="sim")

    def common(q, default_out):
        q.add_argument("--omega", type=float, default=1.0, help="Rabi bound")
        q.add_argument("--steps", type=int, default=None, help="fixed steps per analytic segment")
        q.add_argument("--out", default=default_out)

    g = ss.add_parser("gate", help="noise-averaged gate fidelity vs eta")
    g.add_argument("--pulses", default="urc,square,corpse,bb1")
    g.add_argument("--eta", default="0:0.3:0.03", help="eta/Omega range")
    g.add_argument("--trials", type=int, default=1000)
    g.add_argument("--seed", type=int, default=7)
    common(g, "gate.csv")
    g.set_defaults(func=cmd_sim_gate)

    m = ss.add_parser("memory", help="memory fidelity vs repetitions")
    m.add_argument("--kinds", default="urc,xy4,cpmg")
    m.add_argument("--reps", type=int, default=20, help="cycles of the longest sequence")
    m.add_argument("--trials", type=int, default=100)
    m.add_argument("--etamax", type=float, default=0.05)
    m.add_argument("--tau", type=float, default=None)
    m.add_argument("--seed", type=int, default=7)
    common(m, "memory.csv")
    m.set_defaults(func=cmd_sim_memory)

    f = ss.add_parser("ff", help="filter functions")
    f.add_argument("--pulses", default="urc,square,corpse,bb1")
    f.add_argument("--omega-grid", "--omega", dest="omega_grid", default="0:0.5:0.005",
                   help="frequency range in units of Omega")
    f.add_argument("--rabi", dest="omega", type=float, default=1.0)
    f.add_argument("--steps", type=int, default=None)
    f.add_argument("--out", default="ff.csv")
    f.set_defaults(func=cmd_sim_ff)

    pr = sub.add_parser("project", help="project S^3 points from a CSV")
    pr.add_argument("--in", dest="input", required=True)
    pr.add_argument("--map", default="stereo")
    pr.add_argument("--phi", type=float, default=0.0)
    pr.add_argument("--out", required=True)
    pr.set_defaults(func=cmd_project)
    return p


def _run(argv) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if a.verbose else logging.WARNING, format="%(name)s: %(message)s")
    if a.replay:
        data = json.loads(Path(a.replay).read_text())
        return _run(data["parameters"]["argv"])
    if not getattr(a, "func", None):
        parser.print_help()
        return 2
    _kernels.configure_threads()
    outputs = a.func(a)
    if outputs:
        params = {k: v for k, v in vars(a).items() if k not in ("func", "replay", "verbose")}
        params["argv"] = list(argv)
        man = uio.manifest(a.command if a.command != "simulate" else f"simulate {a.sim}",
                           params, getattr(a, "seed", None), outputs, __version__)
        uio.write_json(uio.sidecar(outputs[0], ".manifest.json"), man)
    for o in outputs:
        log.info("wrote %s", o)
    return 0


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        return _run(argv)
    except ValidationError as exc:
        print(f"udesign: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"udesign: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
