"""
Experiment harness: instances x solver configurations -> CSV

A suite description (TOML or YAML) lists instances, either problem files
or generator specs, and named solver configurations. Every pair is run
with its own solver stack; rows are written by a single writer, and
paired per-metric files feed scatter comparisons between configurations.
"""
from __future__ import annotations

import csv
import logging
import time
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable

import numpy as np
import yaml

from partial_omt.core.numbers import DeltaRational
from partial_omt.frontend.parser import Problem, parse_file
from partial_omt.solver.bnb import BnbConfig
from partial_omt.solver.omt import OmtConfig, OmtStatus, solve

from .generator import generate_sp

log = logging.getLogger(__name__)

FIELDS = ["instance", "config", "status", "ub", "iterations", "time_s", "seed"]
METRICS = ("time", "ub", "iterations")

_STATUS = {
    OmtStatus.OPTIMUM: "sat",
    OmtStatus.UNSAT: "unsat",
    OmtStatus.UNBOUNDED: "unbounded",
    OmtStatus.BUDGET_EXHAUSTED: "timeout",
}


@dataclass
class InstanceSpec:
    name: str
    path: str | None = None
    generator: str | None = None
    n: int = 0
    seed: int = 0
    encoding: str = "lra"

    def load(self) -> Problem:
        if self.path is not None:
            return parse_file(self.path)
        if self.generator == "sp":
            problem, _ = generate_sp(self.n, self.seed, self.encoding)
            return problem
        raise ValueError(f"instance '{self.name}' has neither a path nor a known generator")


@dataclass
class ConfigSpec:
    name: str
    reduction: str = "guided"
    lia: str = "truncated"
    block_lemma: bool = True
    timeout: float = 60.0
    seed: int = 0
    max_iterations: int | None = None
    proposal: str = "tableau"

    def to_omt(self) -> OmtConfig:
        return OmtConfig(
            strategy=self.reduction,
            lia_mode=BnbConfig(mode=self.lia),
            learn_block_lemma=self.block_lemma,
            time_budget=self.timeout,
            seed=self.seed,
            max_iterations=self.max_iterations,
            proposal=self.proposal,
        )


@dataclass
class Suite:
    instances: list[InstanceSpec]
    configs: list[ConfigSpec]
    workers: int = 1
    timings: bool = True

    @property
    def size(self) -> int:
        return len(self.instances) * len(self.configs)


@dataclass
class RunRecord:
    instance: str
    config: str
    status: str
    ub: DeltaRational | None = None
    iterations: int = 0
    time_s: float = field(default=0.0, compare=False)
    seed: int = 0
    error: str = field(default="", compare=False)

    def to_row(self, timings: bool = True) -> dict[str, str]:
        return {
            "instance": self.instance,
            "config": self.config,
            "status": self.status,
            "ub": "" if self.ub is None else str(self.ub),
            "iterations": str(self.iterations),
            "time_s": f"{self.time_s:.6f}" if timings else "",
            "seed": str(self.seed),
        }

    @classmethod
    def from_row(cls, row: dict[str, str]) -> RunRecord:
        return cls(
            instance=row["instance"],
            config=row["config"],
            status=row["status"],
            ub=DeltaRational.parse(row["ub"]) if row["ub"] else None,
            iterations=int(row["iterations"]),
            time_s=float(row["time_s"]) if row["time_s"] else 0.0,
            seed=int(row["seed"]),
        )


def _instance_name(entry: dict[str, Any]) -> str:
    if "name" in entry:
        return str(entry["name"])
    if "path" in entry:
        return Path(entry["path"]).stem
    return f"sp-{entry.get('encoding', 'lra')}-n{entry['n']}-s{entry.get('seed', 0)}"


def load_suite(path: str | Path) -> Suite:
    """Read a ``.toml`` or ``.yaml``/``.yml`` suite; relative instance paths resolve against it."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Suite file not found: {path}")
    if path.suffix in (".yaml", ".yml"):
        with open(path) as f:
            data = yaml.safe_load(f) or {}
    else:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    return suite_from_dict(data, path.parent)


def suite_from_dict(data: dict[str, Any], base: Path | None = None) -> Suite:
    base = base or Path.cwd()
    instances = []
    for entry in data.get("instances", []):
        name = _instance_name(entry)
        if "path" in entry:
            instances.append(InstanceSpec(name, path=str(base / entry["path"])))
        else:
            instances.append(
                InstanceSpec(
                    name,
                    generator=entry.get("generator", "sp"),
                    n=int(entry["n"]),
                    seed=int(entry.get("seed", 0)),
                    encoding=entry.get("encoding", "lra"),
                )
            )
    configs = [ConfigSpec(**entry) for entry in data.get("configs", [])]
    if not instances or not configs:
        raise ValueError("suite needs at least one instance and one config")
    names = [c.name for c in configs]
    if len(set(names)) != len(names):
        raise ValueError("config names must be unique")
    return Suite(
        instances, configs, int(data.get("workers", 1)), bool(data.get("timings", True))
    )


def run_one(instance: InstanceSpec, config: ConfigSpec) -> RunRecord:
    """
    One solve; failures come back as ``status=error`` records. ``ub`` is
    reported in the problem's own sign, so maximized objectives read as written.
    """
    start = time.perf_counter()
    try:
        problem = instance.load()
        outcome = solve(problem, config.to_omt())
    except Exception as e:
        log.warning("Run %s/%s failed: %s", instance.name, config.name, e)
        return RunRecord(
            instance.name, config.name, "error",
            time_s=time.perf_counter() - start, seed=config.seed, error=str(e),
        )
    ub = outcome.value
    if ub is not None and problem.maximize:
        ub = -ub
    return RunRecord(
        instance=instance.name,
        config=config.name,
        status=_STATUS[outcome.status],
        ub=ub,
        iterations=outcome.trace.iterations,
        time_s=time.perf_counter() - start,
        seed=config.seed,
    )


def _run_job(job: tuple[InstanceSpec, ConfigSpec]) -> RunRecord:
    return run_one(*job)


def run_suite(
    suite: Suite,
    output: str | Path,
    on_result: Callable[[int, int, RunRecord], None] | None = None,
) -> list[RunRecord]:
    """
    Run every (instance, config) pair and write one CSV row per run,
    flushed as results arrive. Rows keep suite order.
    """
    jobs = [(inst, cfg) for inst in suite.instances for cfg in suite.configs]
    total = len(jobs)
    output = Path(output)
    output.parent.mkdir(parents=True, exist_ok=True)

    if suite.workers > 1:
        executor = ProcessPoolExecutor(max_workers=suite.workers)
        results: Iterable[RunRecord] = executor.map(_run_job, jobs)
    else:
        executor = None
        results = map(_run_job, jobs)

    records: list[RunRecord] = []
    try:
        with open(output, "w", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=FIELDS)
            writer.writeheader()
            for i, record in enumerate(results, 1):
                writer.writerow(record.to_row(suite.timings))
                f.flush()
                records.append(record)
                if on_result is not None:
                    on_result(i, total, record)
    finally:
        if executor is not None:
            executor.shutdown()

    log.info("Suite finished: %d runs written to %s", total, output)
    return records


def read_results(path: str | Path) -> list[RunRecord]:
    with open(path, newline="") as f:
        return [RunRecord.from_row(row) for row in csv.DictReader(f)]


def _metric(record: RunRecord, metric: str) -> str:
    if metric == "time":
        return f"{record.time_s:.6f}"
    if metric == "iterations":
        return str(record.iterations)
    return "" if record.ub is None else str(record.ub)


def write_scatter(records: list[RunRecord], out_dir: str | Path) -> list[Path]:
    """``<metric>_<A>_vs_<B>.csv`` with columns instance,A,B for every ordered config pair."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    by_key = {(r.instance, r.config): r for r in records}
    instances = list(dict.fromkeys(r.instance for r in records))
    configs = list(dict.fromkeys(r.config for r in records))

    written = []
    for metric in METRICS:
        for a in configs:
            for b in configs:
                if a == b:
                    continue
                path = out_dir / f"{metric}_{a}_vs_{b}.csv"
                with open(path, "w", newline="") as f:
                    writer = csv.writer(f)
                    writer.writerow(["instance", a, b])
                    for inst in instances:
                        ra, rb = by_key.get((inst, a)), by_key.get((inst, b))
                        if ra is None or rb is None:
                            continue
                        writer.writerow([inst, _metric(ra, metric), _metric(rb, metric)])
                written.append(path)
    return written


def summarize(records: list[RunRecord]) -> dict[str, dict[str, float]]:
    """Per-config run counts, median iterations and mean ub (rational part, as float)."""
    summary: dict[str, dict[str, float]] = {}
    for config in dict.fromkeys(r.config for r in records):
        rows = [r for r in records if r.config == config]
        iterations = np.array([r.iterations for r in rows], dtype=float)
        ubs = np.array([float(r.ub.real) for r in rows if r.ub is not None], dtype=float)
        times = np.array([r.time_s for r in rows], dtype=float)
        summary[config] = {
            "runs": float(len(rows)),
            "sat": float(sum(r.status == "sat" for r in rows)),
            "timeout": float(sum(r.status == "timeout" for r in rows)),
            "median_iterations": float(np.median(iterations)) if len(rows) else 0.0,
            "mean_ub": float(np.mean(ubs)) if len(ubs) else float("nan"),
            "mean_time_s": float(np.mean(times)) if len(rows) else 0.0,
        }
    return summary

