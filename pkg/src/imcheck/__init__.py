"""Probability bounds for omega-regular properties in interval Markov chains."""

__version__ = "0.1.0"

from .automata import (RabinAutomaton, accepts_lasso, load_automaton, pair_count,
                       parse_dra_json, parse_hoa, serialize_dra_json, serialize_hoa)
from .engine import BoundResult, lower_bounds, upper_bounds_single_pair, \
    upper_bounds_via_complement, verify
from .errors import (ComplementRequiredError, ContractError, ImcheckError, ParseError,
                     ValidationError)
from .model import (Imc, Mc, contains_distribution, load_imc, parse_imc, parse_imc_json,
                    serialize_imc, serialize_imc_json, validate_imc, validate_mc)
from .product import ProductImc, build_product
from .reachability import (ReachQuery, ReachResult, extremal_distribution,
                           qualitative_one_states, qualitative_zero_states,
                           reach_probability)
from .search import (ClassifiedSets, EdgeGraph, find_largest_accepting_single_pair,
                     find_largest_nonaccepting, find_leaky, strongly_connected_components)

__all__ = [
    "__version__",
    "Imc", "Mc", "RabinAutomaton", "ProductImc", "BoundResult",
    "ClassifiedSets", "EdgeGraph", "ReachQuery", "ReachResult",
    "parse_imc", "parse_imc_json", "serialize_imc", "serialize_imc_json", "load_imc",
    "parse_hoa", "parse_dra_json", "serialize_hoa", "serialize_dra_json", "load_automaton",
    "validate_imc", "validate_mc", "contains_distribution", "accepts_lasso", "pair_count",
    "build_product", "find_largest_nonaccepting", "find_largest_accepting_single_pair",
    "find_leaky", "strongly_connected_components",
    "extremal_distribution", "reach_probability",
    "qualitative_zero_states", "qualitative_one_states",
    "lower_bounds", "upper_bounds_single_pair", "upper_bounds_via_complement", "verify",
    "ImcheckError", "ParseError", "ValidationError", "ContractError",
    "ComplementRequiredError",
]
