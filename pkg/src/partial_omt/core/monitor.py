"""
Stage timing for the OMT pipeline
"""
from __future__ import annotations

import os
import time

import psutil


class PerformanceMonitor:
    """Accumulate wall-clock latency and RSS change per pipeline stage (sat, reduce, minimize)"""

    def __init__(self):
        self.metrics: dict[str, dict[str, float]] = {}
        self.process = psutil.Process(os.getpid())

    def measure(self, stage: str) -> TaskTimer:
        return TaskTimer(self, stage)

    def record(self, stage: str, duration: float, memory_diff: float):
        entry = self.metrics.setdefault(
            stage, {"calls": 0, "latency_sec": 0.0, "ram_change_mb": 0.0}
        )
        entry["calls"] += 1
        entry["latency_sec"] = round(entry["latency_sec"] + duration, 4)
        entry["ram_change_mb"] = round(entry["ram_change_mb"] + memory_diff, 2)

    def latency(self, stage: str) -> float:
        return self.metrics.get(stage, {}).get("latency_sec", 0.0)

    def get_summary(self) -> dict:
        return self.metrics


class TaskTimer:
    """Context manager for timing one stage"""

    def __init__(self, monitor: PerformanceMonitor, stage: str):
        self.monitor = monitor
        self.stage = stage
        self.start_time = 0.0
        self.start_ram = 0.0
        self.duration = 0.0

    def _rss_mb(self) -> float:
        return self.monitor.process.memory_info().rss / (1024 * 1024)

    def __enter__(self):
        self.start_time = time.perf_counter()
        self.start_ram = self._rss_mb()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.duration = time.perf_counter() - self.start_time
        self.monitor.record(self.stage, self.duration, self._rss_mb() - self.start_ram)
