"""Cost-aware efficiency frontiers for context strategies."""

from ._core import (
    BackendError,
    ConfigError,
    DataError,
    __version__,
    analyze,
    answer_f1,
    crossover_weight,
    effective_tokens,
    efficiency_score,
    evaluate,
    normalize_answer,
    parse_strategy_list,
    reduction,
    run_cli,
    synthetic_dataset,
)

__all__ = [
    "BackendError",
    "ConfigError",
    "DataError",
    "__version__",
    "analyze",
    "answer_f1",
    "crossover_weight",
    "effective_tokens",
    "efficiency_score",
    "evaluate",
    "normalize_answer",
    "parse_strategy_list",
    "reduction",
    "run_cli",
    "synthetic_dataset",
]
