"""Config-driven experiment dispatch with bit-stable report emission.

``dglattice run config.json`` executes the configured study and writes, into
the output directory: ``report.json`` (deterministic, schema-versioned),
RFC-4180-style CSV tables, whitespace-delimited ``.dat`` plot data plus a
``plot.py`` stub, and ``run_info.json`` (timestamps and host facts, kept out
of the deterministic report so reruns are byte-identical).  Exit status: 0
success, 1 hypothesis violation, 2 config error, 3 numerical failure.
"""

from __future__ import annotations

import csv
import datetime
import io
import json
import math
import os
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .backend import BACKEND
from .errors import ConfigError, HypothesisError, NumericalError
from .experiments import (
    InitialFamily,
    identity_check,
    run_closeness,
    run_congruence,
    run_regime_verification,
    run_tail_study,
)
from .integrate import integrate_adaptive
from .lattice import Forcing, LatticeState, ModelParams, unit_site, zeros
from .regimes import classify_regime
from .schema import (
    CONFIG_SCHEMA,
    REPORT_SCHEMA,
    dumps_canonical,
    normalize_config,
    results_sha256,
)

OUTDIR_ENV = "DGLATTICE_OUTDIR"

_EXIT_HYPOTHESIS = 1
_EXIT_CONFIG = 2
_EXIT_NUMERICAL = 3


def _fmt(x, none: str = "") -> str:
    if x is None:
        return none
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _load_profile(path: Path) -> LatticeState:
    """Three-column text profile: site index, real part, imaginary part."""
    entries = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ConfigError(f"{path}:{lineno}: expected 'index re im'")
            try:
                idx = int(parts[0])
                re_part, im_part = float(parts[1]), float(parts[2])
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: {exc}") from None
            if idx in entries:
                raise ConfigError(f"{path}:{lineno}: duplicate site index {idx}")
            entries[idx] = complex(re_part, im_part)
    if not entries:
        raise ConfigError(f"{path}: empty profile")
    n_min, n_max = min(entries), max(entries)
    state = zeros(n_min, n_max)
    for idx, val in entries.items():
        state.values[idx - n_min] = val
    return state


def _state_from_block(block: dict, n_min: int, n_max: int, base_dir: Path) -> LatticeState:
    if block["kind"] == "single_site":
        state = unit_site(block["site"], n_min, n_max)
        state.values *= math.sqrt(block["norm2"])
        return state
    state = _load_profile(base_dir / block["path"])
    scale = block.get("scale_to_norm2")
    if scale is not None:
        current = state.norm2()
        if current == 0:
            raise ConfigError(f"cannot rescale a zero profile to norm2 {scale}")
        state.values *= math.sqrt(scale / current)
    try:
        return state.embedded(n_min, n_max)
    except ValueError as exc:
        raise ConfigError(f"profile support exceeds the lattice window: {exc}") from None


def _forcing_from_config(cfg: dict, base_dir: Path) -> Forcing:
    n = cfg["lattice"]["window_half_width"]
    block = cfg["forcing"]
    if block["kind"] == "single_site":
        return Forcing.single_site(block["target_norm2"], block["site"], -n, n)
    return Forcing.from_state(_state_from_block(block, -n, n, base_dir))


class _Artifacts:
    """Collects tables so every output format is emitted from one source."""

    def __init__(self):
        self.tables: list[tuple[str, list[str], list[list]]] = []

    def add_table(self, name: str, header: list[str], rows: list[list]):
        self.tables.append((name, header, rows))


def _dispatch(cfg: dict, base_dir: Path, threads: int, seed: int) -> tuple[dict, _Artifacts, int]:
    model = cfg["model"]
    params = ModelParams(model["alpha"], model["beta"], model["delta"], model["gamma"], model["mu"])
    n = cfg["lattice"]["window_half_width"]
    blowup_threshold = cfg["lattice"]["blowup_threshold"]
    forcing = _forcing_from_config(cfg, base_dir)
    integ = cfg["integrator"]
    tolerances = (integ["abs_tol"], integ["rel_tol"])
    stride = integ["sample_stride"]
    exp = cfg["experiment"]
    kind = exp["kind"]
    art = _Artifacts()
    exit_status = 0

    if kind == "simulate":
        initial = _state_from_block(exp["initial"], -n, n, base_dir)
        traj = integrate_adaptive(
            initial,
            params,
            forcing,
            exp["horizon"],
            tolerances=tolerances,
            sample_stride=stride,
            snapshot_every=exp["snapshot_every"],
            blowup_threshold=blowup_threshold,
        )
        results = {
            "experiment_kind": kind,
            "times": [float(t) for t in traj.times],
            "chi": [float(x) for x in traj.chi],
            "blowup_time": traj.blowup_time,
            "final_chi": float(traj.chi[-1]),
        }
        art.add_table(
            "timeseries", ["t", "chi"], [[t, x] for t, x in zip(results["times"], results["chi"])]
        )

    elif kind == "classify":
        report = classify_regime(
            params,
            forcing.norm2,
            v0_norm2=exp["v0_norm2"],
            capture_radius=exp["capture_radius"],
            absorb_margin=exp["absorb_margin"],
        )
        rc = report.constants
        results = {
            "experiment_kind": kind,
            "case_label": report.case_label,
            "a": rc.a,
            "b": rc.b,
            "c": rc.c,
            "d": rc.d,
            "k": rc.k,
            "r1": report.r1,
            "r2": report.r2,
            "restricted_radius_sq": report.restricted_radius_sq,
            "delta0": report.delta0,
            "rho_sq_ldgl": report.rho_sq_ldgl,
            "rho_sq_nldgl": report.rho_sq_nldgl,
            "nonescape_rho1": report.nonescape_rho1,
            "nonescape_r0_sq_printed": report.nonescape_r0_sq_printed,
            "nonescape_r0_sq_alt": report.nonescape_r0_sq_alt,
            "entry_time": report.entry_time,
        }
        keys = [k for k in results if k != "experiment_kind"]
        art.add_table("constants", keys, [[results[k] for k in keys]])

    elif kind == "closeness":
        phi = unit_site(exp["profile_site"], -n, n)
        psi = unit_site(exp["perturb_site"], -n, n)
        runs = []
        sups = []
        for i, eps in enumerate(exp["epsilons"]):
            family = InitialFamily(eps, exp["c0"], exp["cu0"], exp["cv0"], phi, psi)
            report = run_closeness(
                family,
                params,
                forcing,
                exp["horizon"],
                tolerances=tolerances,
                sample_stride=stride,
                threads=threads,
                blowup_threshold=blowup_threshold,
            )
            runs.append(
                {
                    "epsilon": eps,
                    "sup_distance_l2": report.sup_distance_l2,
                    "sup_distance_linf": report.sup_distance_linf,
                    "tail_window_limsup": report.tail_window_limsup,
                    "bound_used": report.bound_used,
                    "pass": report.passed,
                    "diagnostic": report.diagnostic,
                }
            )
            sups.append(report.sup_distance_l2)
            art.add_table(
                f"closeness_{i:02d}",
                ["t", "dist_l2", "dist_linf", "bound"],
                [
                    [t, d2, di, report.bound_used]
                    for t, d2, di in zip(report.times, report.dist_l2, report.dist_linf)
                ],
            )
            if report.diagnostic is not None:
                exit_status = _EXIT_NUMERICAL
        slope = None
        eps_arr = np.asarray(exp["epsilons"], dtype=float)
        if len(eps_arr) >= 2 and all(s > 0 for s in sups):
            slope = float(np.polyfit(np.log(eps_arr), np.log(np.asarray(sups)), 1)[0])
        results = {
            "experiment_kind": kind,
            "runs": runs,
            "loglog_slope": slope,
            "all_pass": all(r["pass"] for r in runs),
        }

    elif kind == "congruence":
        phi = unit_site(exp["profile_site"], -n, n)
        psi = unit_site(exp["perturb_site"], -n, n)
        template = InitialFamily(1.0, exp["c0"], exp["cu0"], exp["cv0"], phi, psi)
        table = run_congruence(
            params,
            forcing,
            exp["epsilons"],
            template,
            (exp["transient_cut"], exp["stride"], exp["horizon"]),
            tolerances=tolerances,
            threads=threads,
            blowup_threshold=blowup_threshold,
        )
        nonincreasing = all(
            table.distances[i + 1]
            <= table.distances[i]
            + table.sampling_tolerances[i]
            + table.sampling_tolerances[i + 1]
            + 1e-12
            for i in range(len(table.distances) - 1)
        )
        results = {
            "experiment_kind": kind,
            "epsilons": table.epsilons,
            "distances": table.distances,
            "sampling_tolerances": table.sampling_tolerances,
            "bounds": table.bounds,
            "c1": table.c1,
            "case_label": table.case_label,
            "within_bounds": all(
                d <= b for d, b in zip(table.distances, table.bounds)
            ),
            "nonincreasing_within_tolerance": nonincreasing,
        }
        art.add_table(
            "congruence",
            ["epsilon", "dist_v_to_u", "sampling_tolerance", "bound"],
            [
                list(row)
                for row in zip(
                    table.epsilons, table.distances, table.sampling_tolerances, table.bounds
                )
            ],
        )

    elif kind == "tail":
        initial = _state_from_block(exp["initial"], -n, n, base_dir)
        report = run_tail_study(
            params,
            forcing,
            initial,
            exp["horizon"],
            exp["xi"],
            exp["k_grid"],
            tolerances=tolerances,
            sample_stride=stride,
            blowup_threshold=blowup_threshold,
        )
        results = {
            "experiment_kind": kind,
            "xi": report.xi,
            "k_values": report.k_values,
            "trailing_times": [float(t) for t in report.trailing_times],
            "tail_masses": [[float(x) for x in row] for row in report.tail_masses],
            "min_k_passing": report.min_k_passing,
            "time_of_entry": report.time_of_entry,
            "hypothesis_ok": report.hypothesis_ok,
            "note": report.note,
        }
        art.add_table(
            "tail_masses",
            ["t"] + [f"mass_k{k}" for k in report.k_values],
            [
                [report.trailing_times[j]] + [report.tail_masses[i][j] for i in range(len(report.k_values))]
                for j in range(len(report.trailing_times))
            ],
        )
        if not report.hypothesis_ok:
            exit_status = _EXIT_HYPOTHESIS

    elif kind == "regime_verify":
        report = run_regime_verification(
            params,
            forcing,
            exp["chi0_grid"],
            exp["horizon"],
            tolerances=tolerances,
            sample_stride=stride,
            threads=threads,
            blowup_threshold=blowup_threshold,
        )
        points = [
            {
                "chi0": p.chi0,
                "monotone_nonincreasing": p.monotone_nonincreasing,
                "stays_in_annulus": p.stays_in_annulus,
                "terminal_chi": p.terminal_chi,
                "terminal_gap_to_r2": p.terminal_gap_to_r2,
                "riccati_envelope_ok": p.riccati_envelope_ok,
                "bernoulli_envelope_ok": p.bernoulli_envelope_ok,
                "blowup_time": p.blowup_time,
            }
            for p in report.points
        ]
        results = {
            "experiment_kind": kind,
            "case_label": report.case_label,
            "r1": report.r1,
            "r2": report.r2,
            "points": points,
        }
        header = list(points[0].keys())
        art.add_table("regime_points", header, [[p[h] for h in header] for p in points])

    elif kind == "identity_check":
        data = identity_check(exp["half_width"], exp["num_states"], seed)
        results = {"experiment_kind": kind, **data}
        keys = [k for k in results if k != "experiment_kind"]
        art.add_table("residuals", keys, [[results[k] for k in keys]])

    else:  # pragma: no cover - schema forbids
        raise ConfigError(f"unknown experiment kind {kind!r}", key="experiment.kind")

    return results, art, exit_status


def _write_outputs(out_dir: Path, cfg: dict, results: dict, art: _Artifacts, seed: int, threads: int):
    out_dir.mkdir(parents=True, exist_ok=True)
    formats = cfg["output"]["formats"]
    report = {
        "schema_version": 1,
        "config_echo": cfg,
        "results": results,
        "provenance": {
            "code_version": __version__,
            "seed": seed,
            "backend": BACKEND,
            "results_sha256": results_sha256(1, cfg, results),
        },
    }
    (out_dir / "report.json").write_text(dumps_canonical(report), encoding="utf-8")
    info = {
        "started_utc": _write_outputs.started,
        "finished_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "threads": threads,
        "argv": sys.argv[1:],
    }
    (out_dir / "run_info.json").write_text(json.dumps(info, indent=2) + "\n", encoding="utf-8")

    if "csv" in formats:
        for name, header, rows in art.tables:
            buf = io.StringIO()
            writer = csv.writer(buf)
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt(x) for x in row])
            (out_dir / f"{name}.csv").write_text(buf.getvalue(), encoding="utf-8")
    if "plot" in formats:
        for name, header, rows in art.tables:
            lines = ["# " + " ".join(header)]
            lines += [" ".join(_fmt(x, none="nan") for x in row) for row in rows]
            (out_dir / f"{name}.dat").write_text("\n".join(lines) + "\n", encoding="utf-8")
        stub = [
            "#!/usr/bin/env python3",
            '"""Generated plotting stub: renders each emitted .dat table."""',
            "import numpy as np",
            "import matplotlib.pyplot as plt",
            "",
        ]
        for name, header, _ in art.tables:
            stub += [
                f"data = np.loadtxt('{name}.dat', ndmin=2)",
                "fig, ax = plt.subplots()",
                "for col in range(1, data.shape[1]):",
                f"    ax.plot(data[:, 0], data[:, col], label={header!r}[col])",
                f"ax.set_xlabel({header[0]!r})",
                "ax.legend()",
                f"fig.savefig('{name}.png', dpi=150)",
                "plt.close(fig)",
                "",
            ]
        (out_dir / "plot.py").write_text("\n".join(stub), encoding="utf-8")
    return report


def _write_diagnostic(out_dir: Path, status: int, kind: str, message: str, key=None):
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        payload = {"exit_status": status, "error_kind": kind, "message": message, "key": key}
        (out_dir / "diagnostic.json").write_text(dumps_canonical(payload), encoding="utf-8")
    except OSError:  # diagnostics are best effort
        pass


@click.group()
def main():
    """Simulation and verification runner for discrete Ginzburg-Landau lattices."""


@main.command()
@click.argument("config_path", type=click.Path(path_type=Path))
@click.option("--out", "out_override", type=click.Path(path_type=Path), default=None, help="Output directory (overrides config and environment).")
@click.option("--threads", default=1, show_default=True, help="Worker threads for grid cells.")
@click.option("--seed", default=0, show_default=True, help="Deterministic seed recorded in provenance and used by randomized checks.")
def run(config_path: Path, out_override: Path | None, threads: int, seed: int):
    """Execute the experiment described by CONFIG_PATH (strict JSON)."""
    _write_outputs.started = datetime.datetime.now(datetime.timezone.utc).isoformat()
    out_dir = Path(out_override) if out_override else None
    try:
        try:
            raw = json.loads(config_path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        cfg = normalize_config(raw)
        if out_dir is None:
            configured = cfg["output"]["directory"]
            out_dir = Path(configured) if configured else Path(os.environ.get(OUTDIR_ENV, "."))
        results, art, status = _dispatch(cfg, config_path.parent, threads, seed)
        _write_outputs(out_dir, cfg, results, art, seed, threads)
        if status != 0:
            reason = "hypothesis violation" if status == _EXIT_HYPOTHESIS else "numerical failure"
            _write_diagnostic(out_dir, status, reason, f"run completed with {reason}; see report.json")
            click.echo(f"dglattice: {reason} (see report.json)", err=True)
        sys.exit(status)
    except ConfigError as exc:
        if out_dir is not None:
            _write_diagnostic(out_dir, _EXIT_CONFIG, "config", str(exc), getattr(exc, "key", None))
        click.echo(f"dglattice: config error: {exc}", err=True)
        sys.exit(_EXIT_CONFIG)
    except HypothesisError as exc:
        if out_dir is not None:
            _write_diagnostic(out_dir, _EXIT_HYPOTHESIS, "hypothesis", str(exc))
        click.echo(f"dglattice: hypothesis violation: {exc}", err=True)
        sys.exit(_EXIT_HYPOTHESIS)
    except NumericalError as exc:
        if out_dir is not None:
            _write_diagnostic(out_dir, _EXIT_NUMERICAL, "numerical", str(exc))
        click.echo(f"dglattice: numerical failure: {exc}", err=True)
        sys.exit(_EXIT_NUMERICAL)


@main.command()
def schema():
    """Print the strict run-configuration schema."""
    click.echo(dumps_canonical(CONFIG_SCHEMA), nl=False)


@main.command(name="report-schema")
def report_schema():
    """Print the report schema."""
    click.echo(dumps_canonical(REPORT_SCHEMA), nl=False)


@main.command()
def version():
    """Print the package version."""
    click.echo(__version__)
