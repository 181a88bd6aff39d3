"""Decision circuits for influence diagrams."""

from ._dcc import Circuit, Diagram, Error, brute_force, compile

__all__ = ["Circuit", "Diagram", "Error", "brute_force", "compile"]
