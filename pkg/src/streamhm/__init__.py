"""Heuristics Miner variants for streams of events.

The package provides the batch Heuristics Miner, two buffer-based baselines
(sliding window and periodic reset), the online miner over bounded
recency queues (stationary, aging and self-adapting weights), a Lossy
Counting miner, Hoeffding error intervals, a synthetic stream generator
and a small TCP stream source/client.
"""
from .bounds import BoundQuery, and_bounds, dependency_bounds, epsilon_pair, epsilon_triple
from .evaluation import EvalWindow, MetricSeries, window_fitness, window_precision
from .events import DecodeError, Event, ObservationPeriod, decode_line, decode_xes_fragment, encode_line
from .heuristics import CausalModel, Thresholds, count_log, export_dot, generate_model, mine_log
from .lossy import LossyMiner
from .online import OnlineMiner, WeightPolicy
from .window import WindowMiner, WindowMinerConfig

__version__ = "0.1.0"

__all__ = [
    "BoundQuery",
    "CausalModel",
    "DecodeError",
    "EvalWindow",
    "Event",
    "LossyMiner",
    "MetricSeries",
    "ObservationPeriod",
    "OnlineMiner",
    "Thresholds",
    "WeightPolicy",
    "WindowMiner",
    "WindowMinerConfig",
    "and_bounds",
    "count_log",
    "decode_line",
    "decode_xes_fragment",
    "dependency_bounds",
    "encode_line",
    "epsilon_pair",
    "epsilon_triple",
    "export_dot",
    "generate_model",
    "mine_log",
    "window_fitness",
    "window_precision",
]
