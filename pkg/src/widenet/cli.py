"""Command-line interface: ``widenet kernel|sample|distance|bound|sweep|report``.

Exit codes: 0 success; 2 when every requested bound is precondition-
inapplicable (value infinite); 3 when ``sweep --check`` finds a dominance
violation (a finite bound below its paired empirical distance minus three
standard errors).
"""

from __future__ import annotations

import json
import math
import sys

import click
import numpy as np

from . import __version__
from .bounds import (BOUND_IDS, C_UNIVERSAL_DEFAULT, K_ROSENTHAL_DEFAULT,
                     evaluate_bound)
from .config import NetConfig
from .kernels import kernel_sequence
from .sampling import forward_sample, sampling_path
from .sweep import (DISTANCE_KINDS, _estimate_distances, _net_config_from_obj,
                    check_dominance, read_json, run_sweep,
                    sweep_spec_from_dict, write_csv, write_json, write_svg)


def _load_net_config(path: str) -> NetConfig:
    with open(path) as fh:
        obj = json.load(fh)
    return _net_config_from_obj(obj.get("net", obj))


def _emit(obj: dict, out: str = None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


@click.group()
@click.version_option(version=__version__, prog_name="widenet")
def main():
    """Finite-width random networks vs their Gaussian limits: exact limit
    covariances, seeded samplers, distance estimators, and every implemented
    distance bound."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--mode", type=click.Choice(["auto", "exact", "mc"]), default="auto",
              show_default=True, help="Layer-2 seeding: exact needs Gaussian weights.")
@click.option("--m", default=200_000, show_default=True,
              help="Monte Carlo draws for non-Gaussian layer-2 seeding.")
@click.option("--gh-nodes", default=64, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", default=None, type=click.Path())
def kernel(config_path, mode, m, gh_nodes, seed, out):
    """Compute the limit covariances K^(2)..K^(L+1)."""
    cfg = _load_net_config(config_path)
    ks = kernel_sequence(cfg, mode=mode, gh_nodes=gh_nodes, m=m, seed=seed)
    obj = json.loads(ks.to_json())
    _emit(obj, out)


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--layer", default=None, type=int,
              help="Layer to sample (default: the output layer L+1).")
@click.option("--m", default=100_000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", default=None, type=click.Path())
def sample(config_path, layer, m, seed, out):
    """Sample network outputs and report summary statistics."""
    cfg = _load_net_config(config_path)
    layer = cfg.depth + 1 if layer is None else layer
    batch = forward_sample(cfg, layer, m, seed)
    z = batch.values
    summary = []
    for i in range(z.shape[1]):
        col = z[:, i]
        var = float(np.var(col))
        summary.append({
            "input_index": i,
            "mean": float(np.mean(col)),
            "variance": var,
            "kurtosis": float(np.mean((col - col.mean()) ** 4) / var ** 2)
            if var > 0 else None,
            "limit_variance_exact_first_layer": cfg.first_layer_variance(i)
            if layer == 1 else None,
        })
    _emit({"layer": layer, "m": m, "seed": seed,
           "sampling_path": sampling_path(cfg, layer),
           "per_input": summary}, out)


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--kind", "kinds", multiple=True,
              type=click.Choice(list(DISTANCE_KINDS)),
              help="Repeatable; default picks by input count.")
@click.option("--m", default=100_000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--mode", type=click.Choice(["auto", "exact", "mc"]), default="auto",
              show_default=True, help="Kernel seeding mode.")
@click.option("--out", default=None, type=click.Path())
def distance(config_path, kinds, m, seed, mode, out):
    """Estimate distances between the sampled output and its Gaussian limit."""
    cfg = _load_net_config(config_path)
    if not kinds:
        kinds = (("kolmogorov", "wasserstein") if cfg.n_inputs == 1
                 else ("multivariate_kolmogorov", "halfspace"))
    ks = kernel_sequence(cfg, mode=mode, seed=seed)
    ests = _estimate_distances(cfg, ks, kinds, m, seed)
    _emit({"m": m, "seed": seed,
           "limit_variance": ks.variance(cfg.depth + 1, 0),
           "distances": ests}, out)


@main.command()
@click.option("--id", "bound_ids", multiple=True, required=True,
              type=click.Choice(list(BOUND_IDS) + ["all"]),
              help="Bound id (repeatable), or 'all'.")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--mode", type=click.Choice(["empirical", "theoretical"]),
              default="empirical", show_default=True,
              help="Plug-in source for semi-empirical bounds.")
@click.option("--m", default=100_000, show_default=True,
              help="Monte Carlo draws for empirical plug-ins.")
@click.option("--seed", default=0, show_default=True)
@click.option("--k-rosenthal", default=K_ROSENTHAL_DEFAULT, show_default=True)
@click.option("--c-universal", default=C_UNIVERSAL_DEFAULT, show_default=True)
@click.option("--out", default=None, type=click.Path())
def bound(bound_ids, config_path, mode, m, seed, k_rosenthal, c_universal, out):
    """Evaluate distance bounds; exits 2 if every one is inapplicable."""
    cfg = _load_net_config(config_path)
    if "all" in bound_ids:
        bound_ids = BOUND_IDS
    ks = kernel_sequence(cfg, seed=seed)
    reports = {}
    for bid in bound_ids:
        rep = evaluate_bound(bid, cfg, ks, mode=mode, m=m, seed=seed,
                             k_rosenthal=k_rosenthal, c_universal=c_universal)
        reports[bid] = rep.to_dict()
    _emit({"bounds": reports}, out)
    if all(not r["preconditions_ok"] for r in reports.values()):
        sys.exit(2)


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True),
              help="Sweep spec JSON (net + widths + distances + bounds ...).")
@click.option("--out", "out_dir", required=True, type=click.Path(),
              help="Output directory for sweep.csv/json/svg.")
@click.option("--workers", default=1, show_default=True)
@click.option("--seed", default=None, type=int, help="Override spec seed.")
@click.option("--mode", default=None,
              type=click.Choice(["empirical", "theoretical"]),
              help="Override spec bound mode.")
@click.option("--k-rosenthal", default=None, type=float)
@click.option("--c-universal", default=None, type=float)
@click.option("--force", is_flag=True, help="Override desk-scale caps.")
@click.option("--check", is_flag=True,
              help="Exit 3 if any finite bound falls below its paired "
                   "empirical distance minus 3 standard errors.")
@click.option("--svg/--no-svg", default=True, show_default=True)
@click.option("--include-timing", is_flag=True,
              help="Include wall times in JSON (breaks byte determinism).")
def sweep(config_path, out_dir, workers, seed, mode, k_rosenthal, c_universal,
          force, check, svg, include_timing):
    """Run a width/depth sweep and emit CSV/JSON/SVG reports."""
    import os
    from dataclasses import replace as dc_replace
    with open(config_path) as fh:
        spec = sweep_spec_from_dict(json.load(fh))
    overrides = {}
    if seed is not None:
        overrides["seed"] = seed
    if mode is not None:
        overrides["bound_mode"] = mode
    if k_rosenthal is not None:
        overrides["k_rosenthal"] = k_rosenthal
    if c_universal is not None:
        overrides["c_universal"] = c_universal
    if overrides:
        spec = dc_replace(spec, **overrides)
    result = run_sweep(spec, workers=workers, force=force)
    os.makedirs(out_dir, exist_ok=True)
    write_csv(result, os.path.join(out_dir, "sweep.csv"))
    write_json(result, os.path.join(out_dir, "sweep.json"),
               include_timing=include_timing)
    if svg:
        write_svg(result, os.path.join(out_dir, "sweep.svg"))
    for kind, fit in result.rate_fits.items():
        ci = "n/a" if fit.ci_halfwidth is None else f"{fit.ci_halfwidth:.3f}"
        click.echo(f"rate[{kind}]: slope={fit.slope:.4f} ci±{ci} r2={fit.r2:.4f}")
    if check:
        violations = check_dominance(result)
        for v in violations:
            click.echo(f"DOMINANCE VIOLATION: {v}", err=True)
        if violations:
            sys.exit(3)
    if spec.bounds and result.all_bounds_inapplicable():
        click.echo("all requested bounds inapplicable", err=True)
        sys.exit(2)


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True),
              help="A sweep.json produced by `widenet sweep`.")
@click.option("--format", "fmt", required=True,
              type=click.Choice(["csv", "json", "svg"]))
@click.option("--out", required=True, type=click.Path())
def report(input_path, fmt, out):
    """Re-emit a stored sweep result in another format."""
    result = read_json(input_path)
    if fmt == "csv":
        write_csv(result, out)
    elif fmt == "svg":
        write_svg(result, out)
    else:
        write_json(result, out)


if __name__ == "__main__":
    main()
