"""Width/depth sweep orchestration: schedules grid cells, derives per-cell
seeds, estimates distances to the Gaussian limit, evaluates bounds, fits
log-log convergence rates, and emits deterministic CSV/JSON/SVG reports.

Determinism contract: a sweep is a pure function of its spec.  Cell seeds
derive from ``SeedSequence(master_seed, spawn_key=(width_index, replicate))``
so adding replicates or reordering execution (including the concurrent path)
never changes existing rows.  Emitted CSV/JSON are byte-identical across
runs; wall-clock timings are kept in memory but excluded from files unless
explicitly requested, and the JSON round trip restores everything except
those timings.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bounds import (BOUND_IDS, BoundReport, C_UNIVERSAL_DEFAULT,
                     K_ROSENTHAL_DEFAULT, depth_for_width, evaluate_bound)
from .config import NetConfig, config_from_json, config_to_json, make_config
from .distances import (halfspace_kolmogorov_sup, kolmogorov_distance_1d,
                        multivariate_kolmogorov, wasserstein1_distance_1d)
from .kernels import kernel_sequence
from .sampling import forward_sample

__all__ = [
    "DESK_CAPS", "SweepSpec", "SweepRow", "RateFit", "SweepResult",
    "run_sweep", "fit_rate", "write_csv", "write_json", "write_svg",
    "read_json", "sweep_spec_from_dict", "check_dominance",
    "DISTANCE_KINDS",
]

DESK_CAPS = {"max_width": 8192, "max_depth": 6, "max_samples": 1_000_000,
             "max_inputs": 4}

DISTANCE_KINDS = ("kolmogorov", "wasserstein", "wasserstein_normalized",
                  "multivariate_kolmogorov", "halfspace")

# which empirical distance column validates a bound, by bound target
TARGET_TO_KINDS = {
    "kolmogorov": ("kolmogorov",),
    "wasserstein": ("wasserstein",),
    "wasserstein_normalized": ("wasserstein_normalized",),
    "max_kw": ("kolmogorov", "wasserstein"),
    "convex": ("multivariate_kolmogorov", "halfspace"),
    "variance_gap": (),
}


@dataclass(frozen=True)
class SweepSpec:
    base_cfg: NetConfig
    width_grid: tuple
    depth_rule: dict            # {"kind": "fixed", "depth": L} or
                                # {"kind": "schedule", "epsilon": eps}
    distances: tuple
    bounds: tuple
    m: int
    seed: int
    replicates: int = 1
    bound_mode: str = "empirical"
    bound_m: int = 100_000
    k_rosenthal: float = K_ROSENTHAL_DEFAULT
    c_universal: float = C_UNIVERSAL_DEFAULT

    def __post_init__(self):
        widths = tuple(int(n) for n in self.width_grid)
        if any(b <= a for a, b in zip(widths, widths[1:])):
            raise ValueError("width_grid must be strictly increasing")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        for kind in self.distances:
            if kind not in DISTANCE_KINDS:
                raise ValueError(f"unknown distance kind {kind!r}; "
                                 f"known: {', '.join(DISTANCE_KINDS)}")
        for bid in self.bounds:
            if bid not in BOUND_IDS:
                raise ValueError(f"unknown bound id {bid!r}")
        kind = self.depth_rule.get("kind")
        if kind == "fixed":
            if int(self.depth_rule["depth"]) < 1:
                raise ValueError("fixed depth must be >= 1")
        elif kind == "schedule":
            eps = float(self.depth_rule["epsilon"])
            if not 0.0 < eps < 0.5:
                raise ValueError("schedule epsilon must be in (0, 1/2)")
        else:
            raise ValueError("depth_rule.kind must be 'fixed' or 'schedule'")

    def depth_at(self, n: int) -> int:
        if self.depth_rule["kind"] == "fixed":
            return int(self.depth_rule["depth"])
        return depth_for_width(n, float(self.depth_rule["epsilon"]))

    def cell_config(self, n: int) -> NetConfig:
        return self.base_cfg.with_widths((n,) * self.depth_at(n))

    def check_caps(self, force: bool = False):
        if force:
            return
        problems = []
        if max(self.width_grid) > DESK_CAPS["max_width"]:
            problems.append(f"width {max(self.width_grid)} exceeds cap "
                            f"{DESK_CAPS['max_width']}")
        depths = [self.depth_at(n) for n in self.width_grid]
        if max(depths) > DESK_CAPS["max_depth"]:
            problems.append(f"depth {max(depths)} exceeds cap "
                            f"{DESK_CAPS['max_depth']}")
        if self.m > DESK_CAPS["max_samples"]:
            problems.append(f"m {self.m} exceeds cap {DESK_CAPS['max_samples']}")
        if self.base_cfg.n_inputs > DESK_CAPS["max_inputs"]:
            problems.append(f"{self.base_cfg.n_inputs} inputs exceed cap "
                            f"{DESK_CAPS['max_inputs']}")
        if problems:
            raise ValueError("desk-scale caps exceeded (pass force=True / "
                             "--force to override): " + "; ".join(problems))

    def to_dict(self) -> dict:
        return {
            "net": json.loads(config_to_json(self.base_cfg)),
            "widths": list(self.width_grid),
            "depth_rule": dict(self.depth_rule),
            "distances": list(self.distances),
            "bounds": list(self.bounds),
            "m": self.m,
            "seed": self.seed,
            "replicates": self.replicates,
            "bound_mode": self.bound_mode,
            "bound_m": self.bound_m,
            "k_rosenthal": self.k_rosenthal,
            "c_universal": self.c_universal,
        }


def _net_config_from_obj(net) -> NetConfig:
    """Accept a canonical JSON string, a canonical dict (with an
    'activation' object), or user-file shorthand keys for make_config."""
    if isinstance(net, str):
        return config_from_json(net)
    if "activation" in net:
        return config_from_json(json.dumps(net))
    return make_config(**net)


def sweep_spec_from_dict(obj: dict) -> SweepSpec:
    base = _net_config_from_obj(obj["net"])
    return SweepSpec(
        base_cfg=base,
        width_grid=tuple(int(n) for n in obj["widths"]),
        depth_rule=dict(obj.get("depth_rule", {"kind": "fixed",
                                               "depth": base.depth})),
        distances=tuple(obj.get("distances", ("kolmogorov",))),
        bounds=tuple(obj.get("bounds", ())),
        m=int(obj.get("m", 100_000)),
        seed=int(obj.get("seed", 0)),
        replicates=int(obj.get("replicates", 1)),
        bound_mode=str(obj.get("bound_mode", "empirical")),
        bound_m=int(obj.get("bound_m", 100_000)),
        k_rosenthal=float(obj.get("k_rosenthal", K_ROSENTHAL_DEFAULT)),
        c_universal=float(obj.get("c_universal", C_UNIVERSAL_DEFAULT)),
    )


@dataclass(frozen=True)
class SweepRow:
    n: int
    depth: int
    replicate: int
    seed: int
    m: int
    distances: dict             # kind -> {"value": v, "stderr": e}
    bounds: dict                # bound_id -> BoundReport
    wall_time: float = 0.0

    def to_dict(self, include_timing: bool = False) -> dict:
        out = {
            "n": self.n, "depth": self.depth, "replicate": self.replicate,
            "seed": self.seed, "m": self.m,
            "distances": {k: dict(v) for k, v in self.distances.items()},
            "bounds": {k: v.to_dict() for k, v in self.bounds.items()},
        }
        if include_timing:
            out["wall_time"] = self.wall_time
        return out

    @staticmethod
    def from_dict(obj: dict) -> "SweepRow":
        return SweepRow(
            n=obj["n"], depth=obj["depth"], replicate=obj["replicate"],
            seed=obj["seed"], m=obj["m"],
            distances={k: dict(v) for k, v in obj["distances"].items()},
            bounds={k: BoundReport.from_dict(v)
                    for k, v in obj["bounds"].items()},
            wall_time=obj.get("wall_time", 0.0))


@dataclass(frozen=True)
class RateFit:
    kind: str
    slope: float
    intercept: float
    r2: float
    ci_halfwidth: float         # None when replicates == 1
    n_points: int
    per_replicate_slopes: tuple

    def to_dict(self) -> dict:
        return {"kind": self.kind, "slope": self.slope,
                "intercept": self.intercept, "r2": self.r2,
                "ci_halfwidth": self.ci_halfwidth, "n_points": self.n_points,
                "per_replicate_slopes": list(self.per_replicate_slopes)}

    @staticmethod
    def from_dict(obj: dict) -> "RateFit":
        return RateFit(kind=obj["kind"], slope=obj["slope"],
                       intercept=obj["intercept"], r2=obj["r2"],
                       ci_halfwidth=obj["ci_halfwidth"],
                       n_points=obj["n_points"],
                       per_replicate_slopes=tuple(obj["per_replicate_slopes"]))


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    rows: tuple
    rate_fits: dict             # kind -> RateFit

    def to_dict(self, include_timing: bool = False) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "rows": [r.to_dict(include_timing) for r in self.rows],
            "rate_fits": {k: v.to_dict() for k, v in self.rate_fits.items()},
        }

    @staticmethod
    def from_dict(obj: dict) -> "SweepResult":
        return SweepResult(
            spec=sweep_spec_from_dict(obj["spec"]),
            rows=tuple(SweepRow.from_dict(r) for r in obj["rows"]),
            rate_fits={k: RateFit.from_dict(v)
                       for k, v in obj["rate_fits"].items()})

    def all_bounds_inapplicable(self) -> bool:
        """True when bounds were requested and every evaluation came back
        infinite with failed preconditions."""
        saw_any = False
        for row in self.rows:
            for rep in row.bounds.values():
                saw_any = True
                if rep.preconditions_ok:
                    return False
        return saw_any


def _cell_seeds(master_seed: int, width_index: int, replicate: int):
    ss = np.random.SeedSequence(master_seed, spawn_key=(width_index, replicate))
    state = ss.generate_state(4, dtype=np.uint64)
    return [int(s) for s in state]


def _estimate_distances(cfg, kernel, kinds, m, seed):
    """Sample the network output once and measure every requested distance
    against the limit covariance."""
    layer = cfg.depth + 1
    batch = forward_sample(cfg, layer, m, seed)
    z = batch.values
    k_mat = kernel.matrix(layer)
    out = {}
    for kind in kinds:
        if kind == "kolmogorov":
            est = kolmogorov_distance_1d(z[:, 0], ref_variance=float(k_mat[0, 0]))
        elif kind == "wasserstein":
            est = wasserstein1_distance_1d(z[:, 0],
                                           ref_variance=float(k_mat[0, 0]),
                                           seed=seed)
        elif kind == "wasserstein_normalized":
            scale = math.sqrt(float(k_mat[0, 0]))
            est = wasserstein1_distance_1d(z[:, 0] / scale, ref_variance=1.0,
                                           seed=seed)
        elif kind == "multivariate_kolmogorov":
            est = multivariate_kolmogorov(z, np.asarray(k_mat), seed=seed)
        elif kind == "halfspace":
            est = halfspace_kolmogorov_sup(z, np.asarray(k_mat), seed=seed)
        else:
            raise ValueError(f"unknown distance kind {kind!r}")
        out[kind] = {"value": est.value, "stderr": est.error}
    return out


def _run_cell(payload: dict) -> dict:
    """One (width, replicate) grid cell; module-level so worker processes can
    import it.  Rebuilds the config from JSON to stay picklable."""
    t0 = time.perf_counter()
    spec_d = payload
    cfg = config_from_json(spec_d["cfg_json"])
    seeds = spec_d["seeds"]
    kernel = kernel_sequence(cfg, seed=seeds[0])
    distances = _estimate_distances(cfg, kernel, spec_d["distances"],
                                    spec_d["m"], seeds[1])
    bounds = {}
    for i, bid in enumerate(spec_d["bounds"]):
        rep = evaluate_bound(
            bid, cfg, kernel, mode=spec_d["bound_mode"],
            m=spec_d["bound_m"], seed=seeds[2] + i,
            k_rosenthal=spec_d["k_rosenthal"],
            c_universal=spec_d["c_universal"])
        bounds[bid] = rep.to_dict()
    return {
        "n": spec_d["n"], "depth": cfg.depth,
        "replicate": spec_d["replicate"], "seed": seeds[1], "m": spec_d["m"],
        "distances": distances, "bounds": bounds,
        "wall_time": time.perf_counter() - t0,
    }


def run_sweep(spec: SweepSpec, *, workers: int = 1, force: bool = False,
              progress=None) -> SweepResult:
    """Execute the sweep grid; fully deterministic given spec.

    ``progress`` is an optional callable taking a status string (defaults to
    writing to stderr).  Cells run concurrently when ``workers > 1``; output
    ordering is canonical (sorted by width then replicate) regardless of
    completion order.
    """
    spec.check_caps(force=force)
    if progress is None:
        progress = lambda msg: print(msg, file=sys.stderr, flush=True)
    payloads = []
    for wi, n in enumerate(spec.width_grid):
        cfg = spec.cell_config(n)
        for rep in range(spec.replicates):
            payloads.append({
                "cfg_json": config_to_json(cfg),
                "n": n, "replicate": rep,
                "seeds": _cell_seeds(spec.seed, wi, rep),
                "distances": list(spec.distances),
                "bounds": list(spec.bounds),
                "m": spec.m, "bound_mode": spec.bound_mode,
                "bound_m": spec.bound_m,
                "k_rosenthal": spec.k_rosenthal,
                "c_universal": spec.c_universal,
            })
    raw = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for i, res in enumerate(pool.map(_run_cell, payloads)):
                raw.append(res)
                progress(f"[{i + 1}/{len(payloads)}] n={res['n']} "
                         f"rep={res['replicate']} done in {res['wall_time']:.1f}s")
    else:
        for i, payload in enumerate(payloads):
            res = _run_cell(payload)
            raw.append(res)
            progress(f"[{i + 1}/{len(payloads)}] n={res['n']} "
                     f"rep={res['replicate']} done in {res['wall_time']:.1f}s")
    raw.sort(key=lambda r: (r["n"], r["replicate"]))
    rows = tuple(
        SweepRow(n=r["n"], depth=r["depth"], replicate=r["replicate"],
                 seed=r["seed"], m=r["m"], distances=r["distances"],
                 bounds={k: BoundReport.from_dict(v)
                         for k, v in r["bounds"].items()},
                 wall_time=r["wall_time"])
        for r in raw)
    fits = {}
    if len(spec.width_grid) >= 4:
        for kind in spec.distances:
            try:
                fits[kind] = fit_rate(rows, kind)
            except ValueError:
                pass
    return SweepResult(spec=spec, rows=rows, rate_fits=fits)


def fit_rate(rows, kind: str) -> RateFit:
    """OLS fit of log(distance) against log(n).

    The headline slope/intercept/r2 come from replicate-averaged log values
    (one point per width); the confidence halfwidth is 2 * std / sqrt(R) of
    the per-replicate slopes (None when R == 1).
    """
    by_width = {}
    for row in rows:
        if kind not in row.distances:
            continue
        v = row.distances[kind]["value"]
        if not (math.isfinite(v) and v > 0):
            continue
        by_width.setdefault(row.n, {})[row.replicate] = math.log(v)
    widths = sorted(by_width)
    if len(widths) < 4:
        raise ValueError(f"need >= 4 distinct widths with finite positive "
                         f"{kind} values; have {len(widths)}")
    log_n = np.log(np.array(widths, dtype=np.float64))
    avg = np.array([math.fsum(by_width[n].values()) / len(by_width[n])
                    for n in widths])
    slope, intercept = np.polyfit(log_n, avg, 1)
    pred = slope * log_n + intercept
    ss_res = float(np.sum((avg - pred) ** 2))
    ss_tot = float(np.sum((avg - avg.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    reps = sorted({r for points in by_width.values() for r in points})
    rep_slopes = []
    for r in reps:
        ws = [n for n in widths if r in by_width[n]]
        if len(ws) >= 2:
            s, _ = np.polyfit(np.log(np.array(ws, dtype=np.float64)),
                              np.array([by_width[n][r] for n in ws]), 1)
            rep_slopes.append(float(s))
    ci = None
    if len(rep_slopes) >= 2:
        ci = 2.0 * float(np.std(rep_slopes, ddof=1)) / math.sqrt(len(rep_slopes))
    return RateFit(kind=kind, slope=float(slope), intercept=float(intercept),
                   r2=r2, ci_halfwidth=ci, n_points=len(widths),
                   per_replicate_slopes=tuple(rep_slopes))


# ---------------------------------------------------------------------------
# dominance checking (--check mode)


def check_dominance(result: SweepResult) -> list:
    """Violations of 'bound >= paired empirical distance - 3 * stderr'.

    Returns a list of human-readable violation strings (empty = all good).
    Inapplicable bounds are skipped; ``max_kw`` bounds are checked against
    both 1-d distances, ``convex`` against both multivariate proxies.
    """
    violations = []
    for row in result.rows:
        for bid, rep in row.bounds.items():
            if not rep.preconditions_ok or not math.isfinite(rep.value):
                continue
            for kind in TARGET_TO_KINDS.get(rep.target, ()):
                if kind not in row.distances:
                    continue
                d = row.distances[kind]
                threshold = d["value"] - 3.0 * d["stderr"]
                if rep.value < threshold:
                    violations.append(
                        f"n={row.n} rep={row.replicate}: bound {bid} = "
                        f"{rep.value:.6g} < {kind} - 3*stderr = {threshold:.6g}")
    return violations


# ---------------------------------------------------------------------------
# emission


def _fmt(x) -> str:
    """Deterministic float formatting (shortest round-trip repr)."""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def csv_columns(spec: SweepSpec) -> list:
    cols = ["n", "L", "replicate", "m", "seed"]
    for kind in spec.distances:
        cols += [f"dist_{kind}", f"dist_{kind}_stderr"]
    for bid in spec.bounds:
        cols.append(f"bound_{bid}")
    return cols


def write_csv(result: SweepResult, path) -> None:
    """Fixed column order: n, L, replicate, m, seed, then each distance with
    its stderr, then each bound value.  Byte-deterministic."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    cols = csv_columns(result.spec)
    writer.writerow(cols)
    for row in result.rows:
        rec = [row.n, row.depth, row.replicate, row.m, row.seed]
        for kind in result.spec.distances:
            d = row.distances.get(kind, {"value": math.nan, "stderr": math.nan})
            rec += [_fmt(d["value"]), _fmt(d["stderr"])]
        for bid in result.spec.bounds:
            rep = row.bounds.get(bid)
            rec.append(_fmt(rep.value) if rep is not None else "")
        writer.writerow(rec)
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())


def write_json(result: SweepResult, path, *, include_timing: bool = False) -> None:
    """Full-fidelity JSON (spec, rows with complete BoundReport factor
    breakdowns, rate fits).  Sorted keys, no timestamps: byte-deterministic.
    Non-finite floats use Python's JSON extensions (Infinity/NaN)."""
    with open(path, "w") as fh:
        json.dump(result.to_dict(include_timing=include_timing), fh,
                  indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path) -> SweepResult:
    with open(path) as fh:
        return SweepResult.from_dict(json.load(fh))


def _svg_points(xs, ys, x_rng, y_rng, box):
    x0, y0, w, h = box
    (xa, xb), (ya, yb) = x_rng, y_rng
    pts = []
    for x, y in zip(xs, ys):
        px = x0 + (x - xa) / (xb - xa) * w
        py = y0 + h - (y - ya) / (yb - ya) * h
        pts.append(f"{px:.2f},{py:.2f}")
    return " ".join(pts)


_SVG_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
               "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


def write_svg(result: SweepResult, path) -> None:
    """Log-log plot: one polyline per distance kind (replicate-averaged,
    solid) and one per bound id (dashed), points at each width.  Contains no
    timestamps; byte-deterministic."""
    spec = result.spec
    series = []     # (label, dashed, [(log10 n, log10 v), ...])
    for kind in spec.distances:
        pts = []
        for n in spec.width_grid:
            vals = [r.distances[kind]["value"] for r in result.rows
                    if r.n == n and kind in r.distances]
            vals = [v for v in vals if math.isfinite(v) and v > 0]
            if vals:
                pts.append((math.log10(n), math.log10(sum(vals) / len(vals))))
        if pts:
            series.append((f"dist {kind}", False, pts))
    for bid in spec.bounds:
        pts = []
        for n in spec.width_grid:
            vals = [r.bounds[bid].value for r in result.rows
                    if r.n == n and bid in r.bounds]
            vals = [v for v in vals if math.isfinite(v) and v > 0]
            if vals:
                pts.append((math.log10(n), math.log10(sum(vals) / len(vals))))
        if pts:
            series.append((f"bound {bid}", True, pts))
    width, height = 720, 480
    box = (70, 20, width - 90, height - 70)
    if series:
        all_x = [p[0] for _, _, pts in series for p in pts]
        all_y = [p[1] for _, _, pts in series for p in pts]
        xa, xb = min(all_x), max(all_x)
        ya, yb = min(all_y), max(all_y)
        if xb - xa < 1e-9:
            xa, xb = xa - 0.5, xb + 0.5
        if yb - ya < 1e-9:
            ya, yb = ya - 0.5, yb + 0.5
        pad = 0.05 * (yb - ya)
        ya, yb = ya - pad, yb + pad
    else:
        xa, xb, ya, yb = 0.0, 1.0, 0.0, 1.0
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{box[0]}" y="{box[1]}" width="{box[2]}" height="{box[3]}" '
        'fill="none" stroke="black"/>',
        f'<text x="{width // 2}" y="{height - 8}" text-anchor="middle" '
        'font-size="13">log10 width n</text>',
        f'<text x="14" y="{height // 2}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 14 {height // 2})">log10 value</text>',
    ]
    for n in spec.width_grid:
        lx = math.log10(n)
        px = box[0] + (lx - xa) / (xb - xa) * box[2]
        if box[0] - 1 <= px <= box[0] + box[2] + 1:
            parts.append(f'<line x1="{px:.2f}" y1="{box[1] + box[3]}" '
                         f'x2="{px:.2f}" y2="{box[1] + box[3] + 5}" '
                         'stroke="black"/>')
            parts.append(f'<text x="{px:.2f}" y="{box[1] + box[3] + 18}" '
                         f'text-anchor="middle" font-size="11">{n}</text>')
    for i in range(5):
        ly = ya + (yb - ya) * i / 4
        py = box[1] + box[3] - (ly - ya) / (yb - ya) * box[3]
        parts.append(f'<line x1="{box[0] - 5}" y1="{py:.2f}" x2="{box[0]}" '
                     f'y2="{py:.2f}" stroke="black"/>')
        parts.append(f'<text x="{box[0] - 8}" y="{py + 4:.2f}" '
                     f'text-anchor="end" font-size="11">{ly:.2f}</text>')
    for i, (label, dashed, pts) in enumerate(series):
        color = _SVG_COLORS[i % len(_SVG_COLORS)]
        dash = ' stroke-dasharray="6,4"' if dashed else ""
        pt_str = _svg_points([p[0] for p in pts], [p[1] for p in pts],
                             (xa, xb), (ya, yb), box)
        parts.append(f'<polyline points="{pt_str}" fill="none" '
                     f'stroke="{color}" stroke-width="1.5"{dash}/>')
        for p in pts:
            px = box[0] + (p[0] - xa) / (xb - xa) * box[2]
            py = box[1] + box[3] - (p[1] - ya) / (yb - ya) * box[3]
            parts.append(f'<circle cx="{px:.2f}" cy="{py:.2f}" r="2.5" '
                         f'fill="{color}"/>')
        ly = box[1] + 16 + 16 * i
        parts.append(f'<line x1="{box[0] + 10}" y1="{ly - 4}" '
                     f'x2="{box[0] + 34}" y2="{ly - 4}" stroke="{color}" '
                     f'stroke-width="1.5"{dash}/>')
        parts.append(f'<text x="{box[0] + 40}" y="{ly}" font-size="11">'
                     f'{label}</text>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
