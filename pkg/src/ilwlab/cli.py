"""``ilwlab <experiment> --config path.json [--out dir] [--threads k]``.

Exit status: 0 on success, 2 for an invalid configuration, 3 when a run
blows up or the gauge exponential is under-resolved.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from ilwlab import experiments as ex
from ilwlab.evolution import BlowUpError
from ilwlab.gauge import ResolutionError
from ilwlab.io import save_trajectory

log = logging.getLogger("ilwlab")

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3


def _write_csv(path: Path, header, rows):
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def _write_json(path: Path, doc):
    path.write_text(json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n")


def _run(cfg: ex.ExperimentConfig, out: Path) -> dict:
    name = cfg.experiment
    if name == "deepwater":
        rep = ex.run_deepwater(cfg)
        _write_csv(out / "deepwater.csv", ("delta", "s", "sup_error", "runtime_seconds"), rep.rows)
        return rep.summary()
    if name == "scaling_check":
        return ex.run_scaling_check(cfg).summary()
    if name == "galilean_check":
        return ex.run_galilean_check(cfg).summary()
    if name == "gauge_check":
        rep = ex.run_gauge_check(cfg)
        for which, series in rep.series.items():
            _write_csv(out / f"residual_{which}.csv", ("t", "residual"), series.rows())
        return rep.summary()
    if name == "conserve":
        traj, rep = ex.run_conserve(cfg)
        _write_csv(out / "conservation.csv", ("t", "mean", "mass", "hamiltonian"), rep.rows())
        return rep.summary()
    if name == "symbols":
        table = ex.run_symbols(cfg)
        labels = list(table)
        xi = next(iter(table.values()))[0]
        header = ["xi"] + [f"{lab}_{part}" for lab in labels for part in ("re", "im")]
        rows = []
        for k, x in enumerate(xi):
            row = [x]
            for lab in labels:
                val = complex(table[lab][1][k])
                row += [val.real, val.imag]
            rows.append(row)
        _write_csv(out / "symbols.csv", header, rows)
        return {"symbols": labels, "n_frequencies": int(len(xi))}
    # solve
    traj = ex.run_solve(cfg)
    save_trajectory(out / "trajectory", traj)
    return {"snapshots": len(traj), "t_final": float(traj.times[-1])}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ilwlab", description="ILW / Benjamin-Ono pseudospectral experiments")
    p.add_argument("experiment", choices=ex.EXPERIMENTS)
    p.add_argument("--config", required=True, type=Path, help="JSON experiment configuration")
    p.add_argument("--out", type=Path, default=None, help="output directory (default: ./out)")
    p.add_argument("--threads", type=int, default=None, help="worker threads across depth values")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the message
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        doc = json.loads(args.config.read_text())
        if not isinstance(doc, dict):
            raise ex.ConfigError("configuration must be a JSON object")
        doc = dict(doc)
        if doc.setdefault("experiment", args.experiment) != args.experiment:
            raise ex.ConfigError(
                f"config names experiment {doc['experiment']!r} but {args.experiment!r} was requested")
        if args.threads is not None:
            doc["threads"] = args.threads
        if args.out is not None:
            doc["out_dir"] = str(args.out)
        cfg = ex.ExperimentConfig.from_dict(doc)
    except (OSError, json.JSONDecodeError, ex.ConfigError, TypeError) as exc:
        print(f"ilwlab: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(cfg.out_dir or "out")
    out.mkdir(parents=True, exist_ok=True)
    try:
        summary = _run(cfg, out)
    except (BlowUpError, ResolutionError) as exc:
        print(f"ilwlab: run aborted: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except ex.ConfigError as exc:
        print(f"ilwlab: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    summary = {"experiment": cfg.experiment, **summary}
    _write_json(out / "summary.json", summary)
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
