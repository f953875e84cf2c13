"""Command-line harness: ``essns run``, ``essns generate-truth``, ``essns evaluate``."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import platform
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import scipy
import sklearn

from . import __version__
from .config import MANIFEST_SCHEMA, ConfigError, FileTruth, RunConfig, load_config
from .firesim import simulate, simulate_burned
from .fitness import jaccard_fitness
from .io import read_pgm, write_matrix_csv, write_pgm
from .landscape import FireMap, Scenario, burned_at, validate_scenario
from .pipeline import PipelineConfig, accumulate_fire_lines, run_pipeline

logger = logging.getLogger("essns")

METRICS_HEADER = ["step", "kign", "calibration_fitness", "prediction_fitness", "generations",
                  "best_fitness", "wall_time_s"]
TRACE_HEADER = ["generation", "max_fitness", "mean_novelty", "archive_size",
                "bestset_min_fitness", "bestset_max_fitness"]


def generate_truth(cfg: RunConfig) -> list[FireMap]:
    """Fire lines at t_0..t_{steps-1} from the hidden reference scenario."""
    syn = cfg.truth
    if isinstance(syn, FileTruth):
        raise ConfigError("generate_truth needs a synthetic truth source")
    if not validate_scenario(syn.scenario):
        raise ConfigError(f"reference scenario is out of range: {syn.scenario}")
    ignition = FireMap.from_cells(cfg.grid, syn.ignition)
    horizon = cfg.steps * cfg.delta_t
    times = simulate(cfg.grid, cfg.model, syn.scenario, ignition, horizon)
    return [burned_at(times, i * cfg.delta_t) for i in range(cfg.steps)]


def load_truth(cfg: RunConfig) -> list[FireMap]:
    if isinstance(cfg.truth, FileTruth):
        maps = [read_pgm(p, cfg.grid.cell_size) for p in cfg.truth.paths[:cfg.steps]]
        for path, m in zip(cfg.truth.paths, maps):
            if m.grid != cfg.grid:
                raise ConfigError(f"{path}: grid {m.grid.shape} differs from configured {cfg.grid.shape}")
        return accumulate_fire_lines(maps)
    return generate_truth(cfg)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _versions() -> dict:
    return {"essns": __version__, "python": platform.python_version(),
            "numpy": np.__version__, "scipy": scipy.__version__, "scikit-learn": sklearn.__version__}


def write_truth(out: Path, truth: Sequence[FireMap]) -> list[str]:
    names = []
    for i, m in enumerate(truth):
        name = f"truth_{i:02d}.pgm"
        write_pgm(out / name, m)
        names.append(name)
    return names


def run(cfg: RunConfig) -> int:
    """Execute a full prediction run and write its artifacts to ``cfg.output_dir``."""
    truth = load_truth(cfg)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    outputs = write_truth(out, truth)

    pcfg = PipelineConfig(delta_t=cfg.delta_t, ga=cfg.ga, model=cfg.model, seed=cfg.seed,
                          workers=cfg.workers)
    results = run_pipeline(pcfg, truth)

    with open(out / "metrics.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(METRICS_HEADER)
        for r in results:
            writer.writerow([r.step_index, _fmt(r.kign), _fmt(r.calibration_fitness),
                             _fmt(r.prediction_fitness), r.generations_used, _fmt(r.best_fitness),
                             _fmt(r.wall_time) if cfg.record_timing else ""])
    outputs.append("metrics.csv")

    for r in results:
        prefix = f"step_{r.step_index:02d}"
        write_matrix_csv(out / f"{prefix}_probability.csv", r.matrix.prob)
        outputs.append(f"{prefix}_probability.csv")
        with open(out / f"{prefix}_trace.csv", "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(TRACE_HEADER)
            for g in r.history:
                writer.writerow([g.generation, _fmt(g.max_fitness), _fmt(g.mean_novelty),
                                 g.archive_size, _fmt(g.bestset_min_fitness),
                                 _fmt(g.bestset_max_fitness)])
        outputs.append(f"{prefix}_trace.csv")
        if r.has_prediction:
            write_pgm(out / f"{prefix}_predicted.pgm", r.predicted)
            write_matrix_csv(out / f"{prefix}_prediction_probability.csv", r.prediction_matrix.prob)
            outputs += [f"{prefix}_predicted.pgm", f"{prefix}_prediction_probability.csv"]

    manifest = {"schema": MANIFEST_SCHEMA, "config": cfg.to_dict(), "seed": cfg.seed,
                "versions": _versions(), "outputs": outputs}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    logger.info("wrote %d steps to %s", len(results), out)
    return 0


def evaluate_scenario(cfg: RunConfig, scenario: Scenario, step: int) -> float:
    """Fitness of one scenario on the interval [t_{step-1}, t_step]."""
    truth = load_truth(cfg)
    if not 1 <= step < len(truth):
        raise ConfigError(f"step must lie in 1..{len(truth) - 1}")
    start, target = truth[step - 1], truth[step]
    sim = simulate_burned(cfg.grid, cfg.model, scenario, start, cfg.delta_t)
    return jaccard_fitness(target, sim, start)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="essns", description=__doc__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run the prediction pipeline")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, help="evaluation processes (0 = all cores)")
    p.add_argument("--steps", type=int)
    p.add_argument("--out", dest="output_dir")

    p = sub.add_parser("generate-truth", help="write synthetic fire lines as PGM files")
    p.add_argument("--config", required=True)
    p.add_argument("--out", dest="output_dir", required=True)
    p.add_argument("--steps", type=int)

    p = sub.add_parser("evaluate", help="score one scenario against the truth")
    p.add_argument("--config", required=True)
    p.add_argument("--scenario", required=True, help="JSON object or path to a JSON file")
    p.add_argument("--step", type=int, default=1)
    return parser


def _parse_scenario(text: str) -> Scenario:
    path = Path(text)
    if not text.lstrip().startswith("{") and path.is_file():
        text = path.read_text()
    try:
        return Scenario.from_dict(json.loads(text))
    except (json.JSONDecodeError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid scenario: {exc}") from exc


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = load_config(args.config)
        if args.command == "run":
            cfg = cfg.with_overrides(seed=args.seed, workers=args.workers, steps=args.steps,
                                     output_dir=args.output_dir)
            return run(cfg)
        if args.command == "generate-truth":
            cfg = cfg.with_overrides(steps=args.steps, output_dir=args.output_dir)
            truth = generate_truth(cfg)
            out = Path(cfg.output_dir)
            out.mkdir(parents=True, exist_ok=True)
            for name in write_truth(out, truth):
                print(out / name)
            return 0
        if args.command == "evaluate":
            scenario = _parse_scenario(args.scenario)
            if not validate_scenario(scenario):
                raise ConfigError(f"scenario is out of range: {scenario}")
            print(repr(evaluate_scenario(cfg, scenario, args.step)))
            return 0
    except (ConfigError, OSError, ValueError, RuntimeError) as exc:
        print(f"essns: error: {exc}", file=sys.stderr)
        return 2
    return 1


if __name__ == "__main__":
    sys.exit(main())
