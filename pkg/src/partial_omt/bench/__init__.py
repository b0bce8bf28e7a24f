"""
Strip-packing benchmarks, brute-force oracles and the experiment harness
"""
from .generator import Encoding, SpInstance, generate_sp, render_sp, sample_sp, sp_problem
from .oracle import OracleResult, OracleStatus, brute_force_omt, lp_vertex_minimum, parse_box
from .rng import SplitMix64
from .suite import (
    ConfigSpec,
    InstanceSpec,
    RunRecord,
    Suite,
    load_suite,
    read_results,
    run_suite,
    summarize,
    write_scatter,
)

__all__ = [
    "ConfigSpec",
    "Encoding",
    "InstanceSpec",
    "OracleResult",
    "OracleStatus",
    "RunRecord",
    "SpInstance",
    "SplitMix64",
    "Suite",
    "brute_force_omt",
    "generate_sp",
    "load_suite",
    "lp_vertex_minimum",
    "parse_box",
    "read_results",
    "render_sp",
    "run_suite",
    "sample_sp",
    "sp_problem",
    "summarize",
    "write_scatter",
]
