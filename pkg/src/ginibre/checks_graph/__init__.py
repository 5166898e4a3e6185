"""Acceptance Checks Graph Module."""

from ginibre.checks_graph.graph import graph

__all__ = ["graph"]
