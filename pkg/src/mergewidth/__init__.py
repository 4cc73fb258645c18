"""Merge sequences, merge-models, ranked models and twin-models of finite binary structures."""

from .cliquewidth import CliqueExpression, eval_cliqueexpr, random_cliqueexpr
from .errors import InvalidInput, LimitExceeded, MergeWidthError, ParseError, Report, UnknownName
from .formats import dump, format_any, load, parse_text
from .lift import lift_model
from .model import MergeModel, compactify, interpret, is_compact, is_loopless, validate_model
from .ranked import (RankedMergeModel, cleaning, compactify_ranked, model_of_sequence,
                     ranked_width, sequence_of_model, validate_ranking)
from .sequence import MergeSequence, Step, greedy_sequence, mw_exact, validate_sequence, width
from .structures import BinaryStructure, Signature, biclique_number, gaifman, make_graph
from .treeorder import TreeOrder
from .twin import TwinModel, twin_interpret, twin_model_from_cliqueexpr, twin_to_merge

__all__ = [
    "BinaryStructure", "CliqueExpression", "InvalidInput", "LimitExceeded", "MergeModel",
    "MergeSequence", "MergeWidthError", "ParseError", "RankedMergeModel", "Report", "Signature",
    "Step", "TreeOrder", "TwinModel", "UnknownName", "biclique_number", "cleaning", "compactify",
    "compactify_ranked", "dump", "eval_cliqueexpr", "format_any", "gaifman", "greedy_sequence",
    "interpret", "is_compact", "is_loopless", "lift_model", "load", "make_graph",
    "model_of_sequence", "mw_exact", "parse_text", "random_cliqueexpr", "ranked_width",
    "sequence_of_model", "twin_interpret", "twin_model_from_cliqueexpr", "twin_to_merge",
    "validate_model", "validate_ranking", "validate_sequence", "width",
]
