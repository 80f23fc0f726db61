"""A workbench for TTsec, a dependently typed calculus with information-flow
labels: parser, type checker, small-step evaluator, erasure, and a harness
that runs the noninterference metatheory as executable checks."""

from .erasure import erase_config, erase_store, erase_term, erase_typed, low_equiv
from .evaluator import Cell, Configuration, Fuel, Machine, Store, big_step, monadic_step
from .lattice import COMPARTMENT, TWO_POINT, LabelAlgebra, get_algebra, parse_label
from .parser import parse, parse_program, pretty
from .typechecker import Context, TypingError, check, elaborate, infer

__all__ = [
    "COMPARTMENT", "Cell", "Configuration", "Context", "Fuel", "LabelAlgebra",
    "Machine", "Store", "TWO_POINT", "TypingError", "big_step", "check",
    "elaborate", "erase_config", "erase_store", "erase_term", "erase_typed",
    "get_algebra", "infer", "low_equiv", "monadic_step", "parse", "parse_label",
    "parse_program", "pretty",
]
