"""Chart parsing with supertag-based lexical pruning."""

from .chart import (DEFAULT_MAX_EDGES, Budget, ParseResult, ParseStats, parse)
from .deps import (best_triples, extract_triples, read_parse_results,
                   result_to_json, select_best, write_parse_results)
from .edges import ChartEdge
from .pruning import (LexicalChart, PruneConfig, build_lexical_chart,
                      compile_exceptions, load_exceptions, write_exceptions)

__all__ = [
    "DEFAULT_MAX_EDGES", "Budget", "ChartEdge", "LexicalChart", "ParseResult",
    "ParseStats", "PruneConfig", "best_triples", "build_lexical_chart",
    "compile_exceptions", "extract_triples", "load_exceptions", "parse",
    "read_parse_results", "result_to_json", "select_best", "write_exceptions",
    "write_parse_results",
]
