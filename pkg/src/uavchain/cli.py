"""Command-line front door: single runs, sweeps, figure data, ledger audit."""

from __future__ import annotations

import argparse
import copy
import csv
import json
import os
import sys
import time
from pathlib import Path
from statistics import mean, stdev

from . import __version__, engine, ledger
from .config import (ConfigError, ScenarioConfig, apply_override,
                     config_to_flat_dict, load_config)
from .crypto import get_provider

# Figure catalog: output metrics per swept axis value. The performance
# figures pin adversaries to zero so forged timestamps and replays do not
# pollute the latency/throughput/energy bands; the resilience figure sweeps
# the compromised fraction and corrupts edges at the same rate as UAVs so
# the committee vote path is actually exercised.
_CLEAN = {"workload.compromised_fraction": 0.0}
FIGURES = {
    "latency": {
        "axis": "network.uav_count",
        "values": [20, 40, 60, 80, 100],
        "metrics": ["mean_latency_s"],
        "base_overrides": _CLEAN,
        "coupled": {},
    },
    "throughput": {
        "axis": "workload.arrival_rate_tps",
        "values": [10.0, 25.0, 50.0, 100.0, 200.0, 400.0, 600.0],
        "metrics": ["tps_committed", "tps_offered"],
        "base_overrides": _CLEAN,
        "coupled": {},
    },
    "energy": {
        "axis": "network.uav_count",
        "values": [20, 40, 60, 80, 100],
        "metrics": ["energy_per_committed_tx_j"],
        "base_overrides": _CLEAN,
        "coupled": {},
    },
    "success": {
        "axis": "network.uav_count",
        "values": [20, 40, 60, 80, 100],
        "metrics": ["validation_success_pct"],
        "base_overrides": _CLEAN,
        "coupled": {},
    },
    "compression": {
        "axis": "network.uav_count",
        "values": [20, 40, 60, 80, 100],
        "metrics": ["mean_omega"],
        "base_overrides": _CLEAN,
        "coupled": {},
    },
    "resilience": {
        "axis": "workload.compromised_fraction",
        "values": [0.0, 0.05, 0.10, 0.15, 0.20, 0.25],
        "metrics": ["validation_success_pct"],
        "base_overrides": {},
        "coupled": {"workload.malicious_edge_fraction": lambda v: v},
    },
}


def _load(config_path: str | None, seed: int | None) -> ScenarioConfig:
    if config_path is None:
        config = ScenarioConfig()
        config.validate()
    else:
        config = load_config(config_path)
    if seed is not None:
        config.sim.master_seed = seed
    return config


def _write_manifest(outdir: Path, config: ScenarioConfig,
                    outputs: list[str]) -> None:
    manifest = {
        "tool": "uavchain",
        "version": __version__,
        "created_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "master_seed": config.sim.master_seed,
        "config": config_to_flat_dict(config),
        "outputs": sorted(outputs),
    }
    with open(outdir / "manifest.json", "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, sort_keys=True, indent=1)
        handle.write("\n")


def write_run_outputs(result: engine.SimulationResult, outdir,
                      dump_ledger: bool = False) -> list[str]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    outputs = result.metrics.write_csvs(outdir)
    from .metrics import write_summary
    write_summary(outdir, result.summary)
    outputs.append("summary.json")
    if dump_ledger:
        ledger.dump_ledger(outdir / "ledger.json",
                           [result.segments[e] for e in sorted(result.segments)],
                           result.registry, result.config.crypto.scheme,
                           result.config.sim.master_seed)
        outputs.append("ledger.json")
    _write_manifest(outdir, result.config, outputs)
    return outputs


def cmd_run(args) -> int:
    config = _load(args.config, args.seed)
    result = engine.run(config)
    write_run_outputs(result, args.out, dump_ledger=args.dump_ledger)
    s = result.summary
    print(f"committed TPS      {s['tps_committed']:.2f}")
    print(f"mean latency       {s['mean_latency_s'] * 1000:.1f} ms")
    print(f"mean consensus dly {s['mean_delta_cons_s'] * 1000:.1f} ms")
    print(f"validation success {s['validation_success_pct']:.1f} %")
    print(f"mean compression   {s['mean_omega']:.3f}")
    print(f"energy/committed   {s['energy_per_committed_tx_j']:.3f} J")
    print(f"outputs in         {args.out}")
    return 0


def _write_sweep_csv(path: Path, rows: list[dict]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        header = list(rows[0].keys())
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v
                             for v in (row[k] for k in header)])


def cmd_sweep(args) -> int:
    config = _load(args.config, args.seed)
    values = []
    for raw in args.values.split(","):
        raw = raw.strip()
        try:
            values.append(int(raw))
        except ValueError:
            values.append(float(raw))
    rows = engine.sweep(config, args.axis, values,
                        replications=args.replications)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / f"sweep_{args.axis.replace('.', '_')}.csv"
    _write_sweep_csv(path, rows)
    print(f"wrote {path}")
    return 0


def run_figure(figure: str, config: ScenarioConfig, replications: int,
               duration: float | None = None) -> list[dict]:
    """Replicated sweep for one catalog figure; returns plot-data rows."""
    spec = FIGURES[figure]
    base = copy.deepcopy(config)
    if duration is not None:
        base.sim.duration_s = duration
    for key, value in spec["base_overrides"].items():
        apply_override(base, key, value)

    rows = []
    for value in spec["values"]:
        summaries = []
        for rep in range(replications):
            cfg = copy.deepcopy(base)
            apply_override(cfg, spec["axis"], value)
            for key, fn in spec["coupled"].items():
                apply_override(cfg, key, fn(value))
            cfg.sim.master_seed = base.sim.master_seed + rep
            cfg.validate()
            summaries.append(engine.run(cfg).summary)
        row = {"x": value}
        for metric in spec["metrics"]:
            samples = [s[metric] for s in summaries]
            row[f"{metric}_mean"] = mean(samples)
            row[f"{metric}_std"] = stdev(samples) if len(samples) > 1 else 0.0
        rows.append(row)
    return rows


def trust_leadership_table(result: engine.SimulationResult) -> list[dict]:
    """Committed-transaction share per trust decile (decile 1 = highest)."""
    scores = result.trust_scores
    uavs = sorted(scores, key=lambda u: (-scores[u], u))
    committed = [r.sender for r in result.metrics.transactions
                 if r.status == "committed"]
    total = len(committed) or 1
    per_decile = max(1, len(uavs) // 10)
    rows = []
    for decile in range(10):
        members = set(uavs[decile * per_decile:(decile + 1) * per_decile])
        if not members:
            break
        share = sum(1 for s in committed if s in members) / total
        rows.append({
            "decile": decile + 1,
            "mean_trust": mean(scores[u] for u in members),
            "committed_share_pct": 100.0 * share,
            "population_share_pct": 100.0 * len(members) / len(uavs),
        })
    return rows


def cmd_figures(args) -> int:
    if args.figure not in FIGURES and args.figure != "trustrank":
        print(f"unknown figure {args.figure!r}; choose from "
              f"{sorted(FIGURES) + ['trustrank']}", file=sys.stderr)
        return 2
    config = _load(args.config, args.seed)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / f"figure_{args.figure}.csv"
    if args.figure == "trustrank":
        if args.duration is not None:
            config.sim.duration_s = args.duration
        result = engine.run(config)
        rows = trust_leadership_table(result)
    else:
        rows = run_figure(args.figure, config, args.replications, args.duration)
    _write_sweep_csv(path, rows)
    print(f"wrote {path}")
    return 0


def cmd_audit(args) -> int:
    segments, registry, scheme, _ = ledger.load_ledger(args.ledger)
    provider = get_provider(scheme)
    failures = 0
    for segment in segments:
        findings = ledger.verify_segment(segment, registry, provider)
        status = "PASS" if not findings else "FAIL"
        print(f"{status} segment {segment.owner} "
              f"({len(segment.chain)} blocks)")
        for finding in findings:
            print(f"  {finding}")
        failures += len(findings)
    print(f"audit {'passed' if failures == 0 else 'FAILED'} "
          f"({len(segments)} segments, {failures} findings)")
    return 0 if failures == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uavchain",
        description="Trust-ranked, quantum-resilient UAV blockchain simulator")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario and write metrics")
    p_run.add_argument("--config", help="scenario file (dotted-key format)")
    p_run.add_argument("--seed", type=int, help="override sim.master_seed")
    p_run.add_argument("--out", default="out", help="output directory")
    p_run.add_argument("--dump-ledger", action="store_true",
                       help="also write the auditable ledger dump")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="sweep one config axis")
    p_sweep.add_argument("--config")
    p_sweep.add_argument("--seed", type=int)
    p_sweep.add_argument("--axis", required=True, help="dotted config key")
    p_sweep.add_argument("--values", required=True, help="comma-separated")
    p_sweep.add_argument("--replications", type=int, default=3)
    p_sweep.add_argument("--out", default="out")
    p_sweep.set_defaults(func=cmd_sweep)

    p_fig = sub.add_parser("figures", help="emit plot data for one figure")
    p_fig.add_argument("--figure", required=True,
                       help=f"one of {sorted(FIGURES) + ['trustrank']}")
    p_fig.add_argument("--config")
    p_fig.add_argument("--seed", type=int)
    p_fig.add_argument("--replications", type=int, default=5)
    p_fig.add_argument("--duration", type=float,
                       help="override sim.duration_s for the sweep")
    p_fig.add_argument("--out", default="out")
    p_fig.set_defaults(func=cmd_figures)

    p_audit = sub.add_parser("audit", help="re-verify a ledger dump")
    p_audit.add_argument("--ledger", required=True, help="ledger.json path")
    p_audit.set_defaults(func=cmd_audit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError, ledger.LedgerError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
