"""Pushdown automata and sequential process specifications.

Parse specifications and PDAs, explore their process graphs, transform
specifications into normal forms, convert between the two formalisms and
check the results with bisimulation.
"""

from .bisim import bounded_compare, k_bisimilar, partition_refine, stateless_bisimilar
from .convert import onestate_pda_to_spec, pda_to_signal_spec, signal_spec_to_pda, spec_to_pda
from .core import Action, Prop, Spec, Valuation
from .normal import classify, separate, to_aignf, to_gnf
from .parser import ParseError, format_expr, format_pda, format_spec, parse_expr, parse_pda, parse_spec, print_lts
from .pda import Pda, Transition
from .rewrite import decide_bisim_rf, hnf, reduce_hnf
from .semantics import Bounds, UnguardedError, check_guarded, explore

__all__ = [
    "Action", "Bounds", "Pda", "ParseError", "Prop", "Spec", "Transition", "UnguardedError", "Valuation",
    "bounded_compare", "check_guarded", "classify", "decide_bisim_rf", "explore", "format_expr", "format_pda",
    "format_spec", "hnf", "k_bisimilar", "onestate_pda_to_spec", "parse_expr", "parse_pda", "parse_spec",
    "partition_refine", "pda_to_signal_spec", "print_lts", "reduce_hnf", "separate", "signal_spec_to_pda",
    "spec_to_pda", "stateless_bisimilar", "to_aignf", "to_gnf",
]
