"""Syntax repair by intersecting a grammar with an edit-ball automaton
and decoding the finite intersection language."""

from . import automata, counting, decoder, grammar, gre, intersection, ngram, pipeline
from .decoder import Repair, RepairResult, reg_dcode
from .grammar import Cfg, CnfGrammar, cyk_accepts, parse_grammar, to_cnf
from .intersection import cfl_fixpt, led, reg_build
from .ngram import NGramModel, train
from .pipeline import RepairConfig, RepairInstance, load_grammar, repair

__all__ = [
    "automata",
    "counting",
    "decoder",
    "grammar",
    "gre",
    "intersection",
    "ngram",
    "pipeline",
    "Cfg",
    "CnfGrammar",
    "NGramModel",
    "Repair",
    "RepairConfig",
    "RepairInstance",
    "RepairResult",
    "cfl_fixpt",
    "cyk_accepts",
    "led",
    "load_grammar",
    "parse_grammar",
    "reg_build",
    "reg_dcode",
    "repair",
    "to_cnf",
    "train",
]

__version__ = "0.1.0"
