"""Command-line front door: parse inputs, dispatch, emit reports.

Reports are deterministic given (input, flags, seed): keys are sorted,
floats are emitted verbatim (infinities as the string "inf"), and nothing
time- or host-dependent is written.  Exit codes: 0 all checks pass,
1 a contract was violated, 2 bad input or schema, 3 schedule overflow.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from .counterexample import (
    CounterexampleConfig,
    build_family,
    ball_point_count,
    ray_point,
    separation_witness,
    verify_metric_ray,
    verify_separation_epsilon,
)
from .errors import SchemaError, ScheduleOverflow, SpiralPasteError
from .fdd import embed_no_cotype, equivalence_ratio, pair_isometry_check
from .frechet import frechet_embed
from .metric import distortion as measure_distortion, load_space, packing_bound
from .spiral import analytic_bound, paste, seam_check, spiral_distortion
from .sumspace import SUP, BlockVector, SumSpaceSpec

SCHEMA_VERSION = "1"


@dataclass(frozen=True)
class RunConfig:
    """Resolved flags for one invocation; echoed verbatim into the report."""

    subcommand: str
    input: str | None = None
    map: str | None = None
    out: str | None = None
    p: float | None = None
    epsilon: float | None = None
    bands: int | None = None
    method: str = "spiral"
    bound: float | None = None
    depth: int = 6
    rays: int = 8
    levels: tuple[int, ...] | None = None
    eps_list: tuple[float, ...] | None = None
    samples: int = 200
    seed: int = 0
    tmax: float = 1e4
    p_grid: tuple[float, ...] = ()
    eps_grid: tuple[float, ...] = ()


# Report plumbing -------------------------------------------------------------


def _jsonify(x):
    """Make a report tree JSON-safe; infinities become strings, NaN is a bug."""
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            raise ValueError("NaN reached a report")
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, dict):
        return {str(k): _jsonify(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonify(v) for v in x]
    return x


def _render_report(cfg: RunConfig, payload: dict, passed: bool) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": cfg.subcommand,
        "config": dataclasses.asdict(cfg),
        "pass": passed,
    }
    doc.update(payload)
    return json.dumps(_jsonify(doc), sort_keys=True, indent=2) + "\n"


def _read_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON in {path}: {exc}") from exc


def _load_map(doc) -> tuple[SumSpaceSpec, dict]:
    """Parse a map document: a block-space layout plus one vector per point."""
    if not isinstance(doc, dict):
        raise SchemaError("map document must be an object")
    for key in ("p", "block_dims", "images"):
        if key not in doc:
            raise SchemaError(f"map document missing {key!r}")
    p = doc["p"]
    if p == "sup":
        p = SUP
    if not isinstance(p, (int, float)):
        raise SchemaError("map field 'p' must be a number or \"sup\"")
    dims = doc["block_dims"]
    if not isinstance(dims, list) or not all(isinstance(d, int) for d in dims):
        raise SchemaError("map field 'block_dims' must be a list of integers")
    spec = SumSpaceSpec(float(p), tuple(dims))
    raw = doc["images"]
    if not isinstance(raw, dict):
        raise SchemaError("map field 'images' must be an object keyed by point id")
    images = {}
    for pid, blocks in raw.items():
        if not isinstance(blocks, dict):
            raise SchemaError(f"image of {pid!r} must be an object keyed by block index")
        parsed = {}
        for key, vals in blocks.items():
            try:
                idx = int(key)
            except ValueError as exc:
                raise SchemaError(f"block key {key!r} of {pid!r} is not an integer") from exc
            if not isinstance(vals, list):
                raise SchemaError(f"block {key} of {pid!r} must be a list of numbers")
            parsed[idx] = [float(v) for v in vals]
        images[pid] = BlockVector(spec, parsed)
    return spec, images


# Subcommands ------------------------------------------------------------------


def _cmd_embed(cfg: RunConfig) -> tuple[dict, bool]:
    space = load_space(_read_json(cfg.input))
    if cfg.method == "frechet":
        fm = frechet_embed(space)
        spec = SumSpaceSpec(SUP, (fm.dimension,))
        images = {pid: BlockVector(spec, {1: fm[pid]}) for pid in space.ids}
        rep = measure_distortion(space, images, spec)
        # Exact on integer metrics; float inputs round at ulp(diameter),
        # amplified by the smallest pair distance.
        D = space.distance_matrix()
        off = D[np.triu_indices(len(space), 1)]
        allowance = 64.0 * np.finfo(float).eps * float(off.max()) / max(float(off.min()), 1e-300)
        checks = {"isometry": rep.distortion <= 1.0 + max(allowance, 1e-12)}
        payload = {
            "method": "frechet",
            "dimension": fm.dimension,
            "report": rep.to_doc(),
            "checks": checks,
        }
        return payload, all(checks.values())

    if cfg.p is None or cfg.epsilon is None:
        raise SchemaError("the spiral method needs --p and --epsilon")
    emb = paste(space, cfg.p, cfg.epsilon, bands=cfg.bands)
    bound = analytic_bound(cfg.p, cfg.epsilon)
    rep = measure_distortion(space, emb.images, emb.spec, analytic_bound=bound)
    gap, seam_pairs = seam_check(emb)
    npe = emb.norm_preservation_error()
    sched = emb.layout.schedule
    band_counts: dict[str, int] = {}
    for b in emb.band_of.values():
        band_counts[str(b)] = band_counts.get(str(b), 0) + 1
    checks = {
        "distortion_within_bound": rep.passed,
        "norm_preservation": npe <= 1e-9,
        "seams_exact": gap == 0.0,
    }
    payload = {
        "method": "spiral",
        "report": rep.to_doc(),
        "schedule": {
            "epsilon": sched.epsilon,
            "band_count": sched.band_count,
            "radii": [float(r) for r in sched.radii],
        },
        "block_dims": list(emb.spec.block_dims),
        "band_counts": band_counts,
        "seam": {"max_gap": gap, "pairs_checked": seam_pairs},
        "norm_preservation_error": npe,
        "checks": checks,
    }
    return payload, all(checks.values())


def _cmd_distortion(cfg: RunConfig) -> tuple[dict, bool]:
    space = load_space(_read_json(cfg.input))
    spec, images = _load_map(_read_json(cfg.map))
    missing = [pid for pid in space.ids if pid not in images]
    if missing:
        raise SchemaError(f"map has no image for {missing[0]!r}")
    rep = measure_distortion(space, images, spec, analytic_bound=cfg.bound)
    checks = {
        "injective": math.isfinite(rep.distortion),
        "within_bound": rep.passed,
    }
    payload = {"report": rep.to_doc(), "checks": checks}
    return payload, all(checks.values())


def _cmd_counterexample(cfg: RunConfig) -> tuple[dict, bool]:
    levels = cfg.levels or tuple(t + 1 for t in range(1, cfg.depth + 1))
    family = build_family(CounterexampleConfig(N=levels, depth=cfg.depth, ray_count=cfg.rays))
    c = family.config

    rays = []
    additive = True
    for j in range(1, c.ray_count + 1):
        pts = [ray_point(family, j, t) for t in range(c.depth + 1)]
        additive &= verify_metric_ray(pts)
        rays.append({"ray": j, "points": [{str(i): v for i, v in p.items()} for p in pts]})

    separations = []
    for t in range(2, c.depth + 1):
        w = separation_witness(family, t)
        separations.append(
            {
                "level": w.level,
                "rays": list(w.rays),
                "count": len(w.points),
                "min_distance": w.min_distance,
                "bound": w.bound,
            }
        )

    # How the witness counts stack up against fixed-dimension packing limits.
    packing = []
    for t in range(2, c.depth + 1):
        radius = (3**t - 1) / 2
        delta = float(3 ** (t - 1))
        row = {"level": t, "radius": radius, "delta": delta, "count": c.N[t - 2]}
        for m in (1, 2, 3):
            row[f"bound_dim_{m}"] = packing_bound(radius, delta, m, 4.0)
        packing.append(row)

    eps_exact = verify_separation_epsilon(12)
    checks = {
        "rays_additive": bool(additive),
        "separations_at_bound": all(s["min_distance"] >= s["bound"] for s in separations),
        "epsilon_exact": eps_exact,
    }
    payload = {
        "levels": list(c.N),
        "depth": c.depth,
        "ray_count": c.ray_count,
        "rays": rays,
        "separations": separations,
        "packing": packing,
        "separation_epsilon": "1/9",
        "ball_points": ball_point_count(family, (3**c.depth - 1) // 2),
        "checks": checks,
    }
    return payload, all(checks.values())


def _cmd_fdd_demo(cfg: RunConfig) -> tuple[dict, bool]:
    space = load_space(_read_json(cfg.input))
    if cfg.epsilon is None:
        raise SchemaError("fdd-demo needs --epsilon")
    result = embed_no_cotype(space, cfg.epsilon, eps_list=cfg.eps_list)
    model = result.model
    eq = equivalence_ratio(model, cfg.epsilon, seed=cfg.seed, n=cfg.samples)
    pair_dev = 0.0
    if model.num_blocks >= 2:
        pair_dev = pair_isometry_check(model, 1, 2, samples=cfg.samples, seed=cfg.seed)
    checks = {
        "pair_isometry": pair_dev <= 1e-12,
        "equivalence_within_bound": eq.max_ratio <= eq.bound + 1e-12,
        "renormed_within_bound": result.report_a is None or result.report_a.passed,
        "ambient_within_bound": result.report_ambient is None or result.report_ambient.passed,
    }
    payload = {
        "model": {"block_dims": list(model.block_dims), "eps_list": list(model.eps_list)},
        "equivalence": {
            "max_ratio": eq.max_ratio,
            "bound": eq.bound,
            "samples": eq.samples,
        },
        "pair_isometry_deviation": pair_dev,
        "report_renormed": None if result.report_a is None else result.report_a.to_doc(),
        "report_ambient": None
        if result.report_ambient is None
        else result.report_ambient.to_doc(),
        "checks": checks,
    }
    return payload, all(checks.values())


def _cmd_spiral(cfg: RunConfig) -> tuple[dict, bool]:
    if cfg.epsilon is None:
        raise SchemaError("spiral needs --epsilon")
    rep = spiral_distortion(cfg.epsilon, t_max=cfg.tmax, samples=cfg.samples)
    checks = {"finite": math.isfinite(rep.distortion)}
    if cfg.epsilon == 0.0:
        checks["identity_exact"] = rep.distortion == 1.0
    payload = {
        "epsilon": cfg.epsilon,
        "t_max": cfg.tmax,
        "samples": cfg.samples,
        "report": rep.to_doc(),
        "checks": checks,
    }
    return payload, all(checks.values())


def _render_sweep(cfg: RunConfig) -> tuple[str, bool]:
    if not cfg.p_grid or not cfg.eps_grid:
        raise SchemaError("sweep needs non-empty --p and --eps grids")
    space = load_space(_read_json(cfg.input))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["p", "epsilon", "distortion", "bound", "margin"])
    ok = True
    for p in cfg.p_grid:
        for eps in cfg.eps_grid:
            emb = paste(space, p, eps)
            bound = analytic_bound(p, eps)
            rep = measure_distortion(space, emb.images, emb.spec, analytic_bound=bound)
            ok &= rep.passed
            writer.writerow(
                [
                    repr(float(p)),
                    repr(float(eps)),
                    repr(float(rep.distortion)),
                    repr(float(bound)),
                    repr(float(bound - rep.distortion)),
                ]
            )
    return buf.getvalue(), bool(ok)


_HANDLERS = {
    "embed": _cmd_embed,
    "distortion": _cmd_distortion,
    "counterexample": _cmd_counterexample,
    "fdd-demo": _cmd_fdd_demo,
    "spiral": _cmd_spiral,
}


# Argument parsing -------------------------------------------------------------


def _float_list(text: str) -> tuple[float, ...]:
    if not text.strip():
        return ()
    try:
        return tuple(float(tok) for tok in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma list of numbers: {text!r}") from exc


def _int_list(text: str) -> tuple[int, ...]:
    if not text.strip():
        return ()
    try:
        return tuple(int(tok) for tok in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma list of integers: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spiralpaste",
        description="Bilipschitz embeddings of pointed metric spaces into "
        "sums of sup-norm blocks, with measured-vs-analytic distortion reports.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    embed = sub.add_parser("embed", help="embed a space and report its distortion")
    embed.add_argument("--input", required=True, help="metric-space JSON document")
    embed.add_argument("--p", type=float, help="sum exponent (spiral method)")
    embed.add_argument("--epsilon", type=float, help="blend parameter (spiral method)")
    embed.add_argument("--bands", type=int, default=None, help="explicit band budget")
    embed.add_argument("--method", choices=("spiral", "frechet"), default="spiral")
    embed.add_argument("--out", default=None, help="report path (default: stdout)")

    dist = sub.add_parser("distortion", help="measure a user-supplied map")
    dist.add_argument("--input", required=True, help="metric-space JSON document")
    dist.add_argument("--map", required=True, help="map JSON document")
    dist.add_argument("--bound", type=float, default=None, help="bound the report must meet")
    dist.add_argument("--out", default=None)

    cex = sub.add_parser("counterexample", help="build the ray family and its witnesses")
    cex.add_argument("--depth", type=int, default=6)
    cex.add_argument("--rays", type=int, default=8)
    cex.add_argument("--N", type=_int_list, default=None, help='level widths, e.g. "2,3,4"')
    cex.add_argument("--out", default=None)

    fdd = sub.add_parser("fdd-demo", help="renormed block model round trip")
    fdd.add_argument("--input", required=True)
    fdd.add_argument("--epsilon", type=float, required=True)
    fdd.add_argument("--eps-list", type=_float_list, default=None, help='per-block eps, e.g. "0,0.1"')
    fdd.add_argument("--samples", type=int, default=200)
    fdd.add_argument("--seed", type=int, default=0)
    fdd.add_argument("--out", default=None)

    spiral = sub.add_parser("spiral", help="distortion of the reference plane spiral")
    spiral.add_argument("--epsilon", type=float, required=True)
    spiral.add_argument("--tmax", type=float, default=1e4)
    spiral.add_argument("--samples", type=int, default=512)
    spiral.add_argument("--out", default=None)

    sweep = sub.add_parser("sweep", help="distortion-vs-bound table over a (p, eps) grid")
    sweep.add_argument("--input", required=True)
    sweep.add_argument("--p", dest="p_grid", type=_float_list, default=(), help='e.g. "1,2,3"')
    sweep.add_argument("--eps", dest="eps_grid", type=_float_list, default=(), help='e.g. "0.5,0.2,0.1"')
    sweep.add_argument("--out", default=None, help="CSV path (default: stdout)")

    return parser


def _config_from(ns: argparse.Namespace) -> RunConfig:
    fields = {f.name for f in dataclasses.fields(RunConfig)}
    picked = {}
    for key, val in vars(ns).items():
        name = "levels" if key == "N" else key
        if name in fields and val is not None:
            picked[name] = val
    return RunConfig(**picked)


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else 2
    cfg = _config_from(ns)
    try:
        if cfg.subcommand == "sweep":
            text, passed = _render_sweep(cfg)
        else:
            payload, passed = _HANDLERS[cfg.subcommand](cfg)
            text = _render_report(cfg, payload, passed)
    except ScheduleOverflow as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SpiralPasteError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _write(text, cfg.out)
    print(f"{cfg.subcommand}: {'pass' if passed else 'FAIL'}", file=sys.stderr)
    return 0 if passed else 1


if __name__ == "__main__":
    sys.exit(main())
