"""Experiment runner: deterministic CSV/JSON artifacts for each subcommand.

Every run requires a master seed, merges an optional JSON config file with
explicit flags (flags win, unknown config keys are rejected), and writes a
manifest listing the emitted artifacts with their parameters and SHA-256
digests. CSV bodies are byte-identical under a fixed configuration.
"""

from __future__ import annotations

import csv
import hashlib
import json
from fractions import Fraction
from pathlib import Path

import click
import numpy as np

from . import __version__
from . import amplitudes as amp
from . import bounds
from . import cayley
from . import circuits as circ
from . import interpolation as itp
from . import sampling as smp
from . import tomography as tom
from .linalg import haar_special_orthogonal, haar_unitary


def _load_config(config_path, allowed: set, provided: dict) -> dict:
    """Merge config-file values under explicitly provided flags."""
    merged = dict(provided)
    if config_path:
        raw = json.loads(Path(config_path).read_text())
        unknown = set(raw) - allowed
        if unknown:
            raise click.ClickException(f"unknown config keys: {sorted(unknown)}")
        for key, value in raw.items():
            if merged.get(key) is None:
                merged[key] = value
    return merged


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    return value


def _write_manifest(out: Path, command: str, params: dict, artifacts: list[Path]) -> None:
    entries = []
    for path in artifacts:
        digest = hashlib.sha256(path.read_bytes()).hexdigest()
        entries.append({"path": path.name, "sha256": digest})
    manifest = {
        "command": command,
        "package_version": __version__,
        "parameters": {k: v for k, v in sorted(params.items())},
        "artifacts": entries,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))


def _prepare_out(out_dir: str) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


@click.group()
def main():
    """Fermionic linear optics experiment runner."""


@main.command()
@click.option("--config", type=click.Path(exists=True), default=None)
@click.option("--quadruples", type=int, default=None)
@click.option("--sector", type=click.Choice(["passive", "active"]), default=None)
@click.option("--max-layers", type=int, default=None)
@click.option("--trials", type=int, default=None)
@click.option("--threshold", type=float, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--out", type=str, default="anticoncentration-run")
def anticoncentration(config, quadruples, sector, max_layers, trials, threshold, seed, out):
    """Depth scan of the Paley-Zygmund ratio over random brickwall circuits."""
    p = _load_config(config, {"quadruples", "sector", "max_layers", "trials",
                              "threshold", "seed", "out"},
                     dict(quadruples=quadruples, sector=sector, max_layers=max_layers,
                          trials=trials, threshold=threshold, seed=seed))
    p.setdefault("sector", None)
    p["sector"] = p["sector"] or "active"
    p["trials"] = p["trials"] or 26000
    p["threshold"] = 0.4 if p["threshold"] is None else p["threshold"]
    if p["seed"] is None:
        raise click.ClickException("a master seed is mandatory")
    if p["quadruples"] is None or p["max_layers"] is None:
        raise click.ClickException("quadruples and max-layers are required")
    out_dir = _prepare_out(out)
    found, rows = smp.min_depth_for_threshold(
        p["quadruples"], p["sector"], p["threshold"], p["max_layers"],
        p["trials"], p["seed"])
    csv_rows = [
        [r.n_quadruples, r.layers, r.trials, r.mean_x, r.mean_x2, r.ratio,
         r.stderr_ratio, r.seed]
        for r in rows
    ]
    curve = out_dir / "depth_curve.csv"
    _write_csv(curve, ["N", "L", "trials", "mean_X", "mean_X2", "ratio",
                       "stderr_ratio", "seed"], csv_rows)
    summary = out_dir / "min_depth.csv"
    _write_csv(summary, ["N", "threshold", "min_depth"],
               [[p["quadruples"], p["threshold"],
                 found if found is not None else "not reached"]])
    _write_manifest(out_dir, "anticoncentration", p, [curve, summary])
    click.echo(f"min depth: {found if found is not None else 'not reached'}")


@main.command()
@click.option("--config", type=click.Path(exists=True), default=None)
@click.option("--quadruples", type=int, default=None)
@click.option("--sector", type=click.Choice(["passive", "active"]), default=None)
@click.option("--shots", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--out", type=str, default="sample-run")
def sample(config, quadruples, sector, shots, seed, out):
    """Sample outcomes of one Haar-random circuit from its exact distribution."""
    p = _load_config(config, {"quadruples", "sector", "shots", "seed", "out"},
                     dict(quadruples=quadruples, sector=sector, shots=shots, seed=seed))
    p["sector"] = p["sector"] or "passive"
    if p["seed"] is None:
        raise click.ClickException("a master seed is mandatory")
    if p["quadruples"] is None or p["shots"] is None:
        raise click.ClickException("quadruples and shots are required")
    rng = np.random.default_rng(p["seed"])
    n = p["quadruples"]
    if p["sector"] == "passive":
        spec = amp.passive_spec(haar_unitary(4 * n, rng))
    else:
        spec = amp.active_spec(haar_special_orthogonal(8 * n, rng))
    outcomes = smp.sample_outcomes(spec, n, p["shots"], rng)
    out_dir = _prepare_out(out)
    path = out_dir / "samples.csv"
    _write_csv(path, ["shot", "outcome"],
               [[i, s.to_string()] for i, s in enumerate(outcomes)])
    _write_manifest(out_dir, "sample", p, [path])
    click.echo(f"wrote {len(outcomes)} samples")


@main.command(name="bounds-sweep")
@click.option("--config", type=click.Path(exists=True), default=None)
@click.option("--sector", type=click.Choice(["passive", "active"]), default=None)
@click.option("--max-n", type=int, default=None)
@click.option("--processes", type=int, default=None)
@click.option("--out", type=str, default="bounds-run")
def bounds_sweep(config, sector, max_n, processes, out):
    """Exact-arithmetic second-moment sweep against the published constants."""
    p = _load_config(config, {"sector", "max_n", "processes", "out"},
                     dict(sector=sector, max_n=max_n, processes=processes))
    if p["sector"] is None or p["max_n"] is None:
        raise click.ClickException("sector and max-n are required")
    rows = bounds.bound_sweep(p["sector"], p["max_n"], processes=p["processes"])
    out_dir = _prepare_out(out)
    path = out_dir / "bounds_sweep.csv"
    _write_csv(path, ["N", "value", "bound", "margin"],
               [[r["N"], r["value"], r["bound"], r["margin"]] for r in rows])
    _write_manifest(out_dir, "bounds-sweep", p, [path])
    bad = [r["N"] for r in rows if not r["holds"]]
    if bad:
        raise click.ClickException(f"bound violated at N={bad}")
    click.echo(f"bound holds for all N <= {p['max_n']}")


@main.command(name="cayley-tvd")
@click.option("--config", type=click.Path(exists=True), default=None)
@click.option("--group", type=click.Choice(["unitary", "orthogonal"]), default=None)
@click.option("--phases", "d_phases", type=int, default=None,
              help="number of generalized eigenphases d (matrix dim d or 2d)")
@click.option("--delta", type=float, multiple=True)
@click.option("--samples", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--out", type=str, default="tvd-run")
def cayley_tvd(config, group, d_phases, delta, samples, seed, out):
    """TVD between the Haar measure and its Cayley-path deformation."""
    p = _load_config(config, {"group", "phases", "delta", "samples", "seed", "out"},
                     dict(group=group, phases=d_phases,
                          delta=list(delta) if delta else None, samples=samples,
                          seed=seed))
    if p["seed"] is None:
        raise click.ClickException("a master seed is mandatory")
    if p["group"] is None or p["phases"] is None or not p["delta"]:
        raise click.ClickException("group, phases and delta are required")
    p["samples"] = p["samples"] or 2000
    rng = np.random.default_rng(p["seed"])
    rows = []
    for dl in p["delta"]:
        res = cayley.tvd_check(p["group"], p["phases"], dl, p["samples"], rng)
        rows.append([p["group"], p["phases"], dl, 1.0 - dl,
                     res["estimate"], res["bound"]])
    out_dir = _prepare_out(out)
    path = out_dir / "tvd.csv"
    _write_csv(path, ["group", "d", "Delta", "theta", "tvd_estimate", "bound"], rows)
    _write_manifest(out_dir, "cayley-tvd", p, [path])
    click.echo(f"wrote {len(rows)} TVD rows")


@main.command()
@click.option("--config", type=click.Path(exists=True), default=None)
@click.option("--sector", type=click.Choice(["passive", "active"]), default=None)
@click.option("--path", "which_path", type=click.Choice(["a", "b"]), default=None)
@click.option("--delta", type=float, default=None)
@click.option("--nodes", type=int, default=None)
@click.option("--corruption-rate", type=float, default=None)
@click.option("--trials", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--out", type=str, default="reduce-run")
def reduce(config, sector, which_path, delta, nodes, corruption_rate, trials, seed, out):
    """Worst-to-average-case reduction demo (exact decoder or float pipeline)."""
    p = _load_config(config, {"sector", "path", "delta", "nodes",
                              "corruption_rate", "trials", "seed", "out"},
                     dict(sector=sector, path=which_path, delta=delta, nodes=nodes,
                          corruption_rate=corruption_rate, trials=trials, seed=seed))
    if p["seed"] is None:
        raise click.ClickException("a master seed is mandatory")
    p["sector"] = p["sector"] or "passive"
    p["path"] = p["path"] or "b"
    p["trials"] = p["trials"] or 5
    p["delta"] = p["delta"] if p["delta"] is not None else 0.2
    rows = []
    if p["path"] == "a":
        d1, d2 = itp.degree_bounds(p["sector"], 1)
        rate = p["corruption_rate"] or 0.0
        nodes_n = p["nodes"] or (d1 + d2 + 2 * 3 + 1)
        t_budget = max((nodes_n - d1 - d2 - 1) // 2, 0)
        corruptions = int(rate * nodes_n)
        rng = np.random.default_rng(p["seed"])
        for trial in range(p["trials"]):
            res = itp.reduction_demo_exact(
                p["sector"], 1, Fraction(p["delta"]).limit_denominator(1000),
                nodes_n, corruptions, t_budget, rng)
            rows.append(["a", 1, p["delta"], nodes_n, corruptions,
                         float(res["recovered_p0"]), float(res["true_p0"]),
                         float(res["abs_error"])])
    else:
        nodes_n = p["nodes"] or 64
        for trial in range(p["trials"]):
            res = itp.reduction_demo_float(p["sector"], 1, p["delta"], nodes_n,
                                           seed=p["seed"] + trial)
            rows.append(["b", 1, p["delta"], nodes_n, 0,
                         res["recovered_p0"], res["true_p0"], res["abs_error"]])
    out_dir = _prepare_out(out)
    path = out_dir / "reduction.csv"
    _write_csv(path, ["path", "N", "Delta", "L", "corruptions", "recovered_p0",
                      "true_p0", "abs_error"], rows)
    _write_manifest(out_dir, "reduce", p, [path])
    click.echo(f"max abs error: {max(r[-1] for r in rows):.3e}")


@main.command()
@click.option("--config", type=click.Path(exists=True), default=None)
@click.option("--modes", type=int, default=None)
@click.option("--epsilon", type=float, default=None)
@click.option("--delta", type=float, default=None)
@click.option("--trials", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--out", type=str, default="tomography-run")
def tomography(config, modes, epsilon, delta, trials, seed, out):
    """Simulate the FLO tomography protocol at the certified sample budget."""
    p = _load_config(config, {"modes", "epsilon", "delta", "trials", "seed", "out"},
                     dict(modes=modes, epsilon=epsilon, delta=delta, trials=trials,
                          seed=seed))
    if p["seed"] is None:
        raise click.ClickException("a master seed is mandatory")
    if p["modes"] is None:
        raise click.ClickException("modes is required")
    p["epsilon"] = p["epsilon"] or 1.0
    p["delta"] = p["delta"] or 0.1
    p["trials"] = p["trials"] or 50
    rng = np.random.default_rng(p["seed"])
    o_true = haar_special_orthogonal(2 * p["modes"], rng)
    results = tom.run_protocol(o_true, p["epsilon"], p["delta"], p["trials"], rng)
    rows = [[p["modes"], r.rounds, r.trial, r.op_norm_error, r.diamond,
             int(r.success)] for r in results]
    out_dir = _prepare_out(out)
    path = out_dir / "tomography.csv"
    _write_csv(path, ["d", "r", "trial", "op_norm_error", "diamond_bound",
                      "success_flag"], rows)
    _write_manifest(out_dir, "tomography", p, [path])
    rate = sum(r.success for r in results) / len(results)
    click.echo(f"success rate: {rate:.3f}")
    if rate < 1.0 - p["delta"]:
        raise click.ClickException("success rate below 1 - delta")


@main.command()
@click.option("--config", type=click.Path(exists=True), default=None)
@click.option("--group", type=click.Choice(["passive", "active"]), default=None)
@click.option("--dim", type=int, default=None)
@click.option("--style", type=click.Choice(["brickwall", "triangle"]), default=None)
@click.option("--seed", type=int, default=None)
@click.option("--out", type=str, default="compile-run")
def compile(config, group, dim, style, seed, out):
    """Compile a Haar-random group element and report the round-trip error."""
    p = _load_config(config, {"group", "dim", "style", "seed", "out"},
                     dict(group=group, dim=dim, style=style, seed=seed))
    if p["seed"] is None:
        raise click.ClickException("a master seed is mandatory")
    if p["group"] is None or p["dim"] is None:
        raise click.ClickException("group and dim are required")
    p["style"] = p["style"] or "brickwall"
    rng = np.random.default_rng(p["seed"])
    if p["group"] == "passive":
        m = haar_unitary(p["dim"], rng)
        layout = circ.decompose_passive(m, p["style"])
    else:
        m = haar_special_orthogonal(p["dim"], rng)
        layout = circ.decompose_active(m, p["style"])
    err = float(np.linalg.norm(circ.reconstruct_layout(layout).matrix - m, ord=2))
    out_dir = _prepare_out(out)
    layout_path = out_dir / "layout.json"
    layout_path.write_text(layout.to_json())
    report = out_dir / "compile_report.csv"
    _write_csv(report, ["group", "dim", "style", "layers", "givens_count",
                        "roundtrip_error"],
               [[p["group"], p["dim"], p["style"], layout.num_layers,
                 layout.num_rotations, err]])
    _write_manifest(out_dir, "compile", p, [layout_path, report])
    click.echo(f"round-trip error: {err:.3e}")


if __name__ == "__main__":
    main()
