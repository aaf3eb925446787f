"""Programmatic generators for the three benchmark domains."""
from .npuzzle import gen_npuzzle, is_solvable
from .plotting import gen_plotting
from .rushhour import gen_rushhour

__all__ = ["gen_npuzzle", "gen_plotting", "gen_rushhour", "is_solvable"]
