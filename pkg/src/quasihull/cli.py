"""Command-line front end.

    quasihull <command> --config PATH [--seed N] [--tol X] [--out DIR] [--jobs N] [--format json|csv]
    quasihull run --config PATH          (command taken from the config)

The config is ``{"command"?, "input": {...}, "seed"?, "tol"?, ...}``; flags
override config fields.  The report goes to stdout and, with ``--out``, to
``DIR/<command>.json`` (plus ``DIR/<command>.csv`` for tabular results).
Exit status: 0 success, 2 domain error, 3 malformed config.
"""

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__, ads3, earthquake, hyp3, inverse_solver
from .errors import DomainError, LeafEndpoint, SchemaError
from .mobius import CircleMap, format_value, parse_value, qs_norm_estimate

COMMANDS = (
    "hull-hyp",
    "hull-ads",
    "gluing",
    "width",
    "earthquake",
    "qsnorm",
    "approx-lam",
    "mess-check",
    "solve-inverse",
    "degeneration-study",
)
RANDOMIZED = {"mess-check", "solve-inverse", "qsnorm"}
EXIT_DOMAIN, EXIT_SCHEMA = 2, 3


# ---------------------------------------------------------------------------
# config handling


def load_schema(name):
    text = resources.files("quasihull").joinpath("schemas", f"{name}.json").read_text()
    return json.loads(text)


def validate(doc, name):
    try:
        jsonschema.validate(doc, load_schema(name))
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SchemaError(f"{name}: {where}: {exc.message}") from exc


def canonical(doc):
    return json.dumps(_jsonable(doc), sort_keys=True, separators=(",", ":"))


def config_hash(doc):
    return hashlib.sha256(canonical(doc).encode()).hexdigest()


def _jsonable(obj):
    """Plain JSON: numpy scalars unwrapped, non-finite floats as strings."""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else format_value(v)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def _complex_value(v):
    if isinstance(v, list):
        return complex(v[0], v[1])
    if isinstance(v, str):
        s = v.strip().lower()
        if s in ("inf", "+inf", "-inf", "infinity"):
            return math.inf
        try:
            return complex(s.replace("i", "j") if "j" not in s else s)
        except ValueError as exc:
            raise SchemaError(f"not a complex number: {v!r}") from exc
    return float(v)


def _polygon(doc):
    return ads3.AcausalPolygon.from_json(doc)


# ---------------------------------------------------------------------------
# commands; each returns (result dict, optional CSV rows with header first)


def cmd_hull_hyp(inp, cfg):
    pts = [_complex_value(p) for p in inp["points"]]
    hull = hyp3.convex_hull_ideal(pts, tuple(inp.get("marked", (0, 1, 2))))
    return hull.to_json(), None


def cmd_hull_ads(inp, cfg):
    hull = ads3.convex_hull_acausal(_polygon(inp))
    return hull.to_json(), None


def _sample_rows(cmap):
    rows = [["index", "x", "y"]]
    rows += [[i, format_value(x), format_value(y)] for i, (x, y) in enumerate(cmap.samples())]
    return rows


def cmd_gluing(inp, cfg):
    marked = tuple(inp.get("marked", (0, 1, 2)))
    if inp["geometry"] == "hyp":
        hull = hyp3.convex_hull_ideal([_complex_value(p) for p in inp["points"]], marked)
        cmap = hyp3.hyp_gluing_samples(hull)
    else:
        poly = ads3.AcausalPolygon(
            [(parse_value(a), parse_value(b)) for a, b in inp["points"]], marked, inp.get("allow_lightlike", False)
        )
        hull = ads3.convex_hull_acausal(poly)
        cmap = ads3.ads_gluing_samples(hull, route=inp.get("route", "both"), tol=cfg.get("tol", 1e-7))
    return {"geometry": inp["geometry"], "planar": hull.planar, **cmap.to_json()}, _sample_rows(cmap)


def cmd_width(inp, cfg):
    hull = ads3.convex_hull_acausal(_polygon(inp))
    opts = {"res": inp["resolution"]} if "resolution" in inp else {}
    if "depth" in inp:
        opts["depth"] = inp["depth"]
    rep = ads3.width(hull, **opts)
    return rep, None


def cmd_earthquake(inp, cfg):
    lam = earthquake.FiniteLamination.from_json(inp["lamination"])
    base = inp.get("base")
    quake = earthquake.Earthquake(lam, inp.get("side", earthquake.LEFT), None if base is None else parse_value(base))
    values = []
    for p in inp["points"]:
        z = _complex_value(p)
        if isinstance(z, complex) and z.imag == 0:
            z = z.real
        if isinstance(z, complex):
            values.append({"point": [z.real, z.imag], "image": quake.eval_point(z)})
            continue
        try:
            values.append({"point": z, "image": earthquake.earthquake_eval(quake, z)})
        except LeafEndpoint as exc:
            values.append({"point": z, "image": None, "limits": list(exc.limits)})
    rows = [["point", "image"]] + [
        [format_value(v["point"]), format_value(v["image"])] for v in values if not isinstance(v["point"], list)
        and v["image"] is not None
    ]
    return {"lamination": lam.to_json(), "side": quake.side, "values": values}, rows


def cmd_qsnorm(inp, cfg):
    cmap = CircleMap.from_json(inp["map"])
    count = inp.get("count", 4096)
    return {"qs_norm_estimate": qs_norm_estimate(cmap, count=count, seed=cfg["seed"]), "count": count}, None


def cmd_approx_lam(inp, cfg):
    lam = earthquake.FiniteLamination.from_json(inp["lamination"])
    n, k = inp.get("n", 1), inp.get("k", 1.0)
    x0 = _complex_value(inp.get("x0", [0.0, 1.0]))
    radius = inp.get("radius", k + n)
    moved, poly, orbit, gens, elements = earthquake.approximate_lamination(lam, n=n, k=k, x0=x0, radius=radius)
    center = earthquake.h2.from_upper(complex(x0))
    claims = earthquake.check_polygon_claims(poly, moved, center, k + n)
    inside = earthquake.restrict_to_ball(moved, center, radius)
    restricted = earthquake.restrict_to_ball(orbit, center, radius)
    return {
        "perturbed": moved.to_json(),
        "polygon_edges": len(poly.lines),
        "claims": claims,
        "orbit": orbit.to_json(),
        "orbit_elements": len(elements),
        "restriction_equal": bool(inside.matches(restricted)),
        "norm_input": list(earthquake.thurston_norm_estimate(lam)),
        "norm_orbit": list(earthquake.thurston_norm_estimate(orbit)),
    }, None


def _mess_one(doc):
    hull = ads3.convex_hull_acausal(ads3.AcausalPolygon.from_json(doc))
    return ads3.mess_check(hull)


def _map(func, items, jobs):
    if jobs <= 1 or len(items) < 2:
        return [func(it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items))


def random_polygons(count, seed, min_vertices=4, max_vertices=8):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(min_vertices, max_vertices + 1))
        out.append(ads3.random_acausal_polygon(n, rng).to_json())
    return out


def cmd_mess_check(inp, cfg):
    docs = list(inp.get("polygons", []))
    if "random" in inp:
        r = inp["random"]
        docs += random_polygons(r["count"], cfg["seed"], r.get("min_vertices", 4), r.get("max_vertices", 8))
    reports = _map(_mess_one, docs, cfg.get("jobs", 1))
    dev = max(r["max_deviation"] for r in reports)
    rows = [["index", "n", "left_future", "right_past"]]
    rows += [[i, r["n"], repr(r["left_future"]), repr(r["right_past"])] for i, r in enumerate(reports)]
    tol = cfg.get("tol", 1e-8)
    return {"count": len(reports), "max_deviation": dev, "tol": tol, "ok": dev < tol, "polygons": reports}, rows


def cmd_solve_inverse(inp, cfg):
    doc = dict(inp)
    doc.setdefault("seed", cfg["seed"])
    rep = inverse_solver.solve_from_config(doc)
    return rep.to_json(), None


def family_polygon(family, t):
    if family == "rhombus":
        return ads3.degeneration_polygon(t)
    # graphs of the rotations by angle t: planar hulls
    xs = np.tan(np.array([-2.5, -1.0, 0.3, 1.2, 2.2]) / 2.0)
    c, s = math.cos(t / 2.0), math.sin(t / 2.0)
    ys = (c * xs + s) / (-s * xs + c)
    return ads3.AcausalPolygon(list(zip(xs, ys)))


def _degeneration_row(args):
    family, t, qs_count = args
    try:
        poly = family_polygon(family, t)
    except DomainError:
        return None
    hull = ads3.convex_hull_acausal(poly)
    w = ads3.width(hull)["lower"]
    return [t, w, qs_norm_estimate(poly.circle_map(), count=qs_count, seed=0)]


def degeneration_study(family, steps=20, start=None, end=None, reverse=False, qs_count=4096, jobs=1):
    """Rows (parameter, width, qs_norm_estimate) along a one-parameter family.

    The rhombus family shrinks delta linearly from ``start`` to ``end``;
    it leaves the acausal polygons at delta <= 0, where the table is
    truncated and ``truncated`` is set.
    """
    if start is None:
        start = 0.5 if family == "rhombus" else 0.0
    if end is None:
        end = 0.005 if family == "rhombus" else 1.0
    params = np.linspace(start, end, steps).tolist()
    if reverse:
        params = params[::-1]
    rows = _map(_degeneration_row, [(family, t, qs_count) for t in params], jobs)
    truncated = any(r is None for r in rows)
    if truncated:
        rows = rows[: rows.index(None)]
    return rows, truncated


def cmd_degeneration_study(inp, cfg):
    rows, truncated = degeneration_study(
        inp["family"], inp.get("steps", 20), inp.get("start"), inp.get("end"), inp.get("reverse", False),
        inp.get("qs_count", 4096), cfg.get("jobs", 1),
    )
    table = [["parameter", "width", "qs_norm_estimate"]] + [[repr(a), repr(b), repr(c)] for a, b, c in rows]
    return {"family": inp["family"], "rows": rows, "truncated": truncated}, table


HANDLERS = {
    "hull-hyp": cmd_hull_hyp,
    "hull-ads": cmd_hull_ads,
    "gluing": cmd_gluing,
    "width": cmd_width,
    "earthquake": cmd_earthquake,
    "qsnorm": cmd_qsnorm,
    "approx-lam": cmd_approx_lam,
    "mess-check": cmd_mess_check,
    "solve-inverse": cmd_solve_inverse,
    "degeneration-study": cmd_degeneration_study,
}


# ---------------------------------------------------------------------------
# driver


def rows_to_csv(rows):
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\r\n").writerows(rows)
    return buf.getvalue()


def run(config):
    """Validate and dispatch one experiment config; returns (report, csv text or None)."""
    validate(config, "envelope")
    command = config.get("command")
    if command not in HANDLERS:
        raise SchemaError(f"unknown command {command!r}")
    inp = config["input"]
    validate(inp, command)
    if command in RANDOMIZED and "seed" not in config and not (command == "solve-inverse" and "seed" in inp):
        raise SchemaError(f"command {command!r} needs a seed")
    cfg = {k: config[k] for k in ("seed", "tol", "jobs") if k in config}
    if command == "solve-inverse" and "seed" not in cfg:
        cfg["seed"] = inp["seed"]
    result, rows = HANDLERS[command](inp, cfg)
    report = {
        "command": command,
        "version": __version__,
        "config_hash": config_hash({k: v for k, v in config.items() if k not in ("out", "format", "jobs")}),
        "result": result,
    }
    return _jsonable(report), (rows_to_csv(rows) if rows else None)


def _parser():
    p = argparse.ArgumentParser(prog="quasihull", description="Convex hulls, earthquakes and gluing maps.")
    p.add_argument("command", choices=COMMANDS + ("run",))
    p.add_argument("--config", required=True, help="experiment config JSON ('-' for stdin)")
    p.add_argument("--seed", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--out", help="directory for report files")
    p.add_argument("--jobs", type=int)
    p.add_argument("--format", choices=("json", "csv"))
    return p


def _read_config(path):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
        doc = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read config: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("config must be a JSON object")
    return doc


def _emit_error(kind, exc, code):
    doc = {"error": {"type": type(exc).__name__, "kind": kind, "message": str(exc)}}
    print(json.dumps(doc, sort_keys=True))
    return code


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        config = _read_config(args.config)
        if "input" not in config and args.command != "run":
            config = {"input": config}
        if args.command != "run":
            if config.get("command", args.command) != args.command:
                raise SchemaError("config command does not match the subcommand")
            config["command"] = args.command
        for key in ("seed", "tol", "jobs", "format", "out"):
            val = getattr(args, key)
            if val is not None:
                config[key] = val
        report, table = run(config)
    except SchemaError as exc:
        return _emit_error("schema", exc, EXIT_SCHEMA)
    except DomainError as exc:
        return _emit_error("domain", exc, EXIT_DOMAIN)
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    fmt = config.get("format", "json")
    out = config.get("out")
    if out:
        d = Path(out)
        d.mkdir(parents=True, exist_ok=True)
        (d / f"{report['command']}.json").write_text(text)
        if table is not None:
            (d / f"{report['command']}.csv").write_text(table, newline="")
    if fmt == "csv" and table is not None:
        sys.stdout.write(table)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
