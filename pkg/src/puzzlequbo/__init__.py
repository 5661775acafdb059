"""Exact QUBO encodings for queens-style placement puzzles and Takuzu/Tango."""

from .qubo import CONST0, CONST1, Literal, QuarterInt, Qubo, StructureError, export_qubo, import_qubo, neg, pos

__version__ = "0.1.0"
