"""Command line front end: ``transversal <command> --scene FILE``.

Exit statuses: 0 success, 2 precondition failed, 3 not found at budget,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import distances, ekeland, oracles, stationarity, translations
from .errors import TransversalError
from .figures import render_scene
from .report import make_report, write_outputs
from .scene import Scene, load_scene

COMMANDS = ("distance", "translate", "theta", "ekeland", "stationarity", "modulus", "certify", "oracle")


def _distance(scene: Scene, args):
    n = scene.norm
    which = ["d1", "d2", "d3"] if args.which == "all" else [args.which]
    if "points" in scene.arrays:
        pts = scene.array("points")
        fns = {"d1": lambda: distances.d1_points(pts, n), "d2": lambda: distances.d2_points(pts, n),
               "d3": lambda: distances.d3_points(pts, n)}
        out = {}
        for w in which:
            v = fns[w]()
            out[w] = v if not isinstance(v, float) else distances.Bracket.exact(v, "closed-form")
        series = {"points": pts}
    else:
        sets = list(scene.sets)
        fns = {"d1": distances.d1_sets, "d2": distances.d2_sets, "d3": distances.d3_sets}
        out = {w: fns[w](sets, n) for w in which}
        series = {w: np.array(out[w].points) for w in which if out[w].points}
    return out, series


def _translate(scene: Scene, args):
    sets, n = list(scene.sets), scene.norm
    eps = scene.param("epsilon", args.epsilon)
    if args.mode == "near-closest":
        ts = translations.translations_from_near_closest(sets, scene.array("omegas"), eps, n)
        check = ts.meta.get("check")
        return {"translations": ts, "check": check}, {"omegas": scene.array("omegas")}
    x_bar = scene.require_anchor()
    rho = scene.param("rho", args.rho)
    a = scene.array("translations")
    metric = translations.extremal_to_metric_condition(sets, x_bar, a, eps, rho, n)
    stat = translations.metric_to_alpha_stationary(sets, x_bar, a, eps, rho, n)
    return {"metric_condition": metric, "alpha_stationary": stat}, {"omegas": stat.omegas}


def _theta(scene: Scene, args):
    rho = scene.param("rho", args.rho)
    br = translations.theta_rho(list(scene.sets), scene.require_anchor(), rho, scene.norm, seed=args.seed)
    return {"theta": br, "rho": rho}, {}


def _ekeland(scene: Scene, args):
    eps = scene.param("epsilon", args.epsilon)
    lam = scene.param("lam", args.lam)
    if "values" in scene.arrays:
        space = ekeland.FiniteMetricSpace.from_points(scene.array("points"), scene.norm)
        f = scene.array("values").ravel()
        res = ekeland.evp(space, f, args.start, eps, lam)
        return {"evp": res, "holds": res.holds}, {"x_hat": space.points[res.x_hat]}
    rho = scene.param("rho", args.rho)
    res = ekeland.agevp_n(list(scene.sets), scene.array("omegas"), eps, lam, rho, scene.norm)
    return {"geometric": res}, {"points": res.points}


def _stationarity(scene: Scene, args):
    sets, n, x_bar = list(scene.sets), scene.norm, scene.require_anchor()
    eps = scene.param("epsilon", args.epsilon)
    alpha = scene.param("alpha", args.alpha)
    test = stationarity.alpha_stationarity_test(sets, x_bar, alpha, eps, n, budget=args.budget, seed=args.seed)
    out = {"status": test.status, "tried": test.tried, "witness": test.witness, "check": test.check,
           "near_sum": stationarity.dual_alpha_sup(sets, x_bar, eps, "near-sum", n),
           "zero_sum": stationarity.dual_alpha_sup(sets, x_bar, eps, "zero-sum", n)}
    return out, {}


def _modulus(scene: Scene, args):
    eps = scene.param("epsilon", args.epsilon)
    rep = stationarity.transversality_modulus(list(scene.sets), scene.require_anchor(), eps,
                                              samples=args.samples, seed=args.seed, n=scene.norm)
    series = {"worst_sample": rep.witnesses[0]} if rep.witnesses else {}
    return {"modulus": rep, "width": rep.upper - rep.lower}, series


def _certify(scene: Scene, args):
    eps = scene.param("epsilon", args.epsilon)
    alpha = args.alpha if args.alpha is not None else scene.parameters.get("alpha")
    bundle = stationarity.dual_certificate_search(list(scene.sets), scene.require_anchor(), eps, alpha,
                                                  args.form, scene.norm)
    out = {"certificate": bundle}
    if args.convert:
        out["converted"] = stationarity.certificate_convert(bundle, args.convert)
    return out, {"points": bundle.points}


def _oracle(scene: Scene, args):
    sets = list(scene.sets)
    res = oracles.emptiness_oracle(sets)
    out = {"emptiness": res}
    if scene.anchor is not None:
        dists = {}
        for name, s in zip(scene.names, sets):
            try:
                dists[name] = oracles.grid_distance_oracle(scene.anchor, s, scene.norm)
            except TransversalError as exc:
                dists[name] = {"error": exc.code, "message": str(exc)}
        out["grid_distances"] = dists
    series = {"witness": res.witness} if res.witness is not None else {}
    return out, series


HANDLERS = {"distance": _distance, "translate": _translate, "theta": _theta, "ekeland": _ekeland,
            "stationarity": _stationarity, "modulus": _modulus, "certify": _certify, "oracle": _oracle}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="transversal", description="Transversality and stationarity of set collections.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--scene", required=True, help="scene JSON file")
    p.add_argument("--seed", type=int, default=None, help="overrides the scene seed")
    p.add_argument("--out", type=Path, default=None, help="output directory (stdout if omitted)")
    p.add_argument("--format", choices=("json", "csv", "plot"), default="json")
    p.add_argument("--which", choices=("d1", "d2", "d3", "all"), default="all")
    p.add_argument("--mode", choices=("near-closest", "pipeline"), default="near-closest")
    p.add_argument("--form", choices=tuple(stationarity.FORMS), default="near-sum")
    p.add_argument("--convert", choices=tuple(stationarity.FORMS), default=None)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--budget", type=int, default=2000)
    p.add_argument("--start", type=int, default=0, help="starting index for the finite principle")
    for name in ("epsilon", "rho", "lam", "alpha"):
        p.add_argument(f"--{name}", type=float, default=None)
    return p


def run(command: str, scene: Scene, args) -> tuple[dict, dict, float]:
    t0 = time.perf_counter()
    results, series = HANDLERS[command](scene, args)
    return results, series, time.perf_counter() - t0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scene = load_scene(args.scene)
        if args.seed is None:
            args.seed = scene.seed
        results, series, elapsed = run(args.command, scene, args)
        report = make_report(args.command, scene, results, args.seed)
        series = {k: v for k, v in series.items() if v is not None and np.size(v)}
        figure = (lambda path: render_scene(scene, series, path, args.command)) if args.format == "plot" else None
        write_outputs(report, args.format, args.out, series, {"seconds": elapsed}, figure)
        # a negative search still writes its report but is flagged for scripts
        if results.get("status") == "not-found-at-budget":
            return 3
    except TransversalError as exc:
        print(json.dumps({"error": exc.code, "message": str(exc)}), file=sys.stderr)
        return exc.exit_status
    return 0


if __name__ == "__main__":
    sys.exit(main())
