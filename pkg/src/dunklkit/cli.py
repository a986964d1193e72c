"""Command-line runner: `dunklkit <subcommand> [--config PATH] [--out DIR] ...`.

Logs go to stderr; the JSON result of the run goes to stdout. Exit codes:
0 success, 1 failed check or computation error, 2 configuration error.
"""

import argparse
import json
from pathlib import Path

import numpy as np

from . import __version__
from .checks import check_names, run_checks
from .config import load_config
from .convolution import convergence_experiment, convolve_on_grid, young_ratio
from .errors import ConfigError, DunklError
from .foundation import make_multiplicity
from .grid import radial_profile, sample
from .log import log, setup_logging
from .maximal import grid_schedule, majorization_check, poisson_maximal, weak_type_experiment
from .output import ArtifactWriter, to_jsonable
from .parallel import set_threads
from .summability import bochner_riesz_profile, dilate, make_kernel
from .testfunctions import resolve
from .transform import decay_check, lp_norm, plancherel_defect, transform_to_grid
from .translation import (
    translate_heat_closed,
    translate_radial,
    translate_spectral,
    translate_z2d,
    translation_norm_ratio,
)

ROUTES = ("explicit", "radial", "spectral", "closed")
EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _emit(payload):
    print(json.dumps(payload))


def _setup(cfg):
    mult = make_multiplicity(cfg.dimension, cfg.kappa)
    func, profile0, rate = resolve(cfg.test_function, cfg.bump_radius)
    f = sample(mult, func, cfg.radius, cfg.points, label=cfg.test_function)
    profile = None
    if profile0 is not None:
        support = cfg.bump_radius if cfg.test_function == "bump" else None
        profile = radial_profile(mult, profile0, n=cfg.radial_points, support=support, label=cfg.test_function)
    return mult, f, profile, rate


def _grid_rows(g):
    pts = g.points()
    vals = np.asarray(g.values, dtype=complex).ravel()
    rows = []
    for p, v in zip(pts, vals):
        row = {f"x{i + 1}": float(c) for i, c in enumerate(p)}
        row.update({"re": float(v.real), "im": float(v.imag)})
        rows.append(row)
    return rows


def cmd_verify(cfg, writer, args):
    names = [args.filter] if args.filter else None
    results = run_checks(cfg.seed, names)
    checks = [r.to_dict() for r in results]
    writer.write_json("verify", {"checks": checks}, anchors=[r.anchor for r in results])
    passed = all(r.passed for r in results)
    return passed, {"checks": checks}


def cmd_transform(cfg, writer, args):
    mult, f, _, _ = _setup(cfg)
    fhat = transform_to_grid(f)
    writer.write_csv("transform", _grid_rows(fhat), anchors=["transform.transform_to_grid"])
    summary = {
        "plancherel_defect": plancherel_defect(f),
        "edge_ratio": decay_check(fhat, emit=False),
        "norms": {str(p): lp_norm(fhat, p) for p in cfg.p_values},
    }
    writer.write_json("transform", summary, anchors=["transform.plancherel_defect", "transform.decay_check"])
    return True, summary


def _routes(args, profile, rate):
    wanted = ROUTES if args.route == "all" else (args.route,)
    out = []
    for route in wanted:
        if route == "radial" and profile is None:
            log("Translate", "skipping radial route: test function is not radial")
            continue
        if route == "closed" and rate is None:
            log("Translate", "skipping closed route: test function is not a centred Gaussian")
            continue
        out.append(route)
    return out


def cmd_translate(cfg, writer, args):
    mult, f, profile, rate = _setup(cfg)
    routes = _routes(args, profile, rate)
    s = np.linspace(-cfg.radius / 2.0, cfg.radius / 2.0, 49)
    summary = {"routes": routes, "shifts": []}
    fhat = transform_to_grid(f) if "spectral" in routes else None
    for k, y in enumerate(cfg.shifts):
        y = np.asarray(y, dtype=float)
        direction = y / np.linalg.norm(y) if np.any(y) else np.eye(mult.d)[0]
        targets = s[:, None] * direction
        values = {}
        for route in routes:
            if route == "explicit":
                values[route] = np.asarray(translate_z2d(mult, f.func, y, targets, cfg.translation_order))
            elif route == "radial":
                values[route] = np.asarray(translate_radial(mult, profile, y, targets, order=cfg.jacobi_order))
            elif route == "spectral":
                values[route] = np.real(translate_spectral(f, y, targets, fhat=fhat))
            else:
                values[route] = np.asarray(translate_heat_closed(mult, rate, targets, y))
        rows = []
        for i, t in enumerate(targets):
            row = {f"x{j + 1}": float(c) for j, c in enumerate(t)}
            row.update({route: float(values[route][i]) for route in routes})
            rows.append(row)
        writer.write_csv(f"translate_{k}", rows, anchors=[f"translation.{r}" for r in routes])
        diffs = {
            f"{a}-{b}": float(np.max(np.abs(values[a] - values[b])))
            for i, a in enumerate(routes)
            for b in routes[i + 1 :]
        }
        ratios = {str(p): translation_norm_ratio(f, y, p, cfg.translation_order) for p in cfg.p_values}
        summary["shifts"].append({"y": y.tolist(), "route_differences": diffs, "norm_ratios": ratios})
    writer.write_json("translate", summary, anchors=["translation.translation_norm_ratio"])
    return True, summary


def _kernel_operand(cfg, mult):
    k = make_kernel(mult, cfg.kernel_family, cfg.kernel_param, cfg.kernel_R)
    if k.profile is not None:
        return k, dilate(k.profile, k.eps)
    if cfg.kernel_family == "bochner_riesz":
        delta = k.param
        profile = radial_profile(mult, lambda r: bochner_riesz_profile(mult, delta, r), scale=1.0, n=512, label="bochner-riesz")
        return k, dilate(profile, k.eps)
    return k, k.phi_eps()


def cmd_convolve(cfg, writer, args):
    mult, f, _, _ = _setup(cfg)
    k, g = _kernel_operand(cfg, mult)
    conv = convolve_on_grid(f, g, cfg.translation_order)
    writer.write_csv("convolve", _grid_rows(conv), anchors=["convolution.convolve"])
    summary = {"kernel": k.family, "param": k.param, "eps": k.eps}
    if k.family in ("heat", "poisson"):
        summary["young_ratios"] = {str(p): young_ratio(f, g, p, cfg.translation_order) for p in cfg.p_values}
    writer.write_json("convolve", summary, anchors=["convolution.convolve", "convolution.young_ratio"])
    return True, summary


def cmd_summability(cfg, writer, args):
    mult, f, _, _ = _setup(cfg)
    k = make_kernel(mult, cfg.kernel_family, cfg.kernel_param, cfg.kernel_R)
    rows = []
    for p in cfg.p_values:
        rows.extend(convergence_experiment(f, k, p, cfg.eps_schedule))
    columns = ["kernel", "param", "eps", "p", "error", "relative", "runtime_ms"]
    writer.write_csv("summability", rows, anchors=["convolution.convergence_experiment"], columns=columns)
    summary = {"kernel": k.family, "integrable": k.integrable, "rows": rows}
    writer.write_json("summability", summary, anchors=["convolution.convergence_experiment", "summability.summability_apply"])
    return True, summary


def cmd_maximal(cfg, writer, args):
    mult, f, _, _ = _setup(cfg)
    f = f.with_values(np.abs(f.values), func=lambda x, g=f.func: np.abs(g(x)))
    sched = grid_schedule(f, cfg.radius_count)
    weak = weak_type_experiment(f, cfg.levels, sched)
    writer.write_csv("maximal_weak_type", weak["rows"], anchors=["maximal.weak_type_experiment"])
    rng = np.random.default_rng(cfg.seed)
    points = rng.uniform(-cfg.radius / 3.0, cfg.radius / 3.0, size=(8, mult.d))
    k = make_kernel(mult, "poisson", 1.0)
    major = majorization_check(f, k, cfg.eps_schedule, points, sched)
    writer.write_csv(
        "maximal_majorization",
        [{"x": row["x"], "sup_ratio": row["ratio"]} for row in major["rows"]],
        anchors=["maximal.majorization_check"],
    )
    pmax = poisson_maximal(f, points, cfg.eps_schedule, sched)
    summary = {
        "weak_type_constant": weak["constant"],
        "majorization_constant": major["constant"],
        "moment": major["moment"],
        "reverse_ratio_max": float(np.max(pmax["ratio"])),
    }
    writer.write_json("maximal", summary, anchors=["maximal.weak_type_experiment", "maximal.majorization_check", "maximal.poisson_maximal"])
    return True, summary


COMMANDS = {
    "verify": cmd_verify,
    "transform": cmd_transform,
    "translate": cmd_translate,
    "convolve": cmd_convolve,
    "summability": cmd_summability,
    "maximal": cmd_maximal,
}


def parse_args(argv=None):
    parser = argparse.ArgumentParser(prog="dunklkit", description="Dunkl analysis experiments for Z2^d")
    parser.add_argument("--version", action="version", version=f"dunklkit {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML experiment config (defaults apply when omitted)")
    common.add_argument("--out", help="output directory (overrides output.dir)")
    common.add_argument("--threads", type=int, help="worker threads (or set DUNKLKIT_THREADS)")
    common.add_argument("--seed", type=int, help="random seed (overrides runtime.seed)")
    common.add_argument("--debug", action="store_true", help="debug logging (or set DEBUG=true)")
    common.add_argument("--no-timing", action="store_true", help="leave runtime columns out of artifacts")
    sub = parser.add_subparsers(dest="command", required=True)
    verify = sub.add_parser("verify", parents=[common], help="run the acceptance checks")
    verify.add_argument("--filter", help="run only the named check")
    verify.add_argument("--list", action="store_true", help="print check names and exit")
    translate = sub.add_parser("translate", parents=[common], help="generalized translation by several routes")
    translate.add_argument("--route", choices=ROUTES + ("all",), default="all")
    for name in ("transform", "convolve", "summability", "maximal"):
        sub.add_parser(name, parents=[common], help=f"{name} experiment")
    return parser.parse_args(argv)


def main(argv=None):
    args = parse_args(argv)
    if args.command == "verify" and args.list:
        print("\n".join(check_names()))
        return EXIT_OK
    try:
        cfg = load_config(args.config)
        overrides = {}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.out:
            overrides["output_dir"] = args.out
        if args.threads is not None:
            overrides["threads"] = args.threads
        if overrides:
            cfg = cfg.with_overrides(**overrides)
    except ConfigError as e:
        setup_logging(args.debug)
        log("Config", f"Error: {e}")
        _emit({"success": False, "error": str(e)})
        return EXIT_CONFIG
    setup_logging(args.debug or cfg.debug)
    set_threads(cfg.threads)
    writer = ArtifactWriter(Path(cfg.output_dir), cfg, __version__, timing=not args.no_timing)
    try:
        ok, data = COMMANDS[args.command](cfg, writer, args)
    except DunklError as e:
        log("Run", f"Error: {e}")
        _emit({"success": False, "error": str(e)})
        return EXIT_FAIL
    except Exception as e:
        log("Run", f"Unexpected error: {e}")
        _emit({"success": False, "error": str(e)})
        return EXIT_FAIL
    data = {"files": writer.written, **data}
    _emit({"success": ok, "data": to_jsonable(data)})
    return EXIT_OK if ok else EXIT_FAIL
