"""Gossip-based k-message multicast: simulators, bound checks and oracles."""

from .field import GF2, GF256, GF65536, CodingBuffer, FieldSpec, NotDecodable
from .graph import Topology, generate, parse_graph
from .engine import RunConfig, RunResult, run, run_tree
from .analysis import bound_rr, bound_thm1, bound_thm2, check_bounds, hindsight_time

__all__ = [
    "GF2", "GF256", "GF65536", "CodingBuffer", "FieldSpec", "NotDecodable",
    "Topology", "generate", "parse_graph",
    "RunConfig", "RunResult", "run", "run_tree",
    "bound_rr", "bound_thm1", "bound_thm2", "check_bounds", "hindsight_time",
]
