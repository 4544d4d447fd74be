"""Named example graphs used throughout the tests and demos."""

from __future__ import annotations

from .graph import MixedGraph, parse_graph

_SOURCES = {
    # latent projection of the instrumental-variable DAG
    "instrumental": """
        vertices: 1 2 3 4
        1 -> 2
        2 -> 3
        3 -> 4
        1 -> 3
        3 <-> 4
    """,
    "verma": """
        vertices: 1 2 3 4
        1 -> 2
        2 -> 3
        3 -> 4
        1 -> 3
        2 <-> 4
    """,
    "van_ommen_mooij": """
        vertices: 1 2 3 4
        2 -> 3
        3 -> 4
        1 <-> 3
        1 <-> 2
        2 <-> 4
    """,
    "four_node_dag": """
        vertices: 1 2 3 4
        1 -> 2
        2 -> 3
        2 -> 4
        3 -> 4
    """,
    # ancestral but not maximal: 3 and 5 cannot be separated
    "nonmaximal_ancestral": """
        vertices: 1 2 3 4 5
        1 -> 3
        2 -> 3
        2 -> 5
        4 -> 5
        1 <-> 4
        1 <-> 5
        1 <-> 2
        2 <-> 4
        3 <-> 4
    """,
    "ancestral_four": """
        vertices: 1 2 3 4
        1 -> 3
        2 -> 4
        1 <-> 4
        1 <-> 2
        2 <-> 3
    """,
    "ancestral_six": """
        vertices: 1 2 3 4 5 6
        1 -> 3
        2 -> 3
        4 -> 6
        5 -> 6
        1 <-> 4
        2 <-> 5
        1 <-> 5
        4 <-> 5
        1 <-> 2
        2 <-> 4
        1 <-> 6
        2 <-> 6
        3 <-> 5
        3 <-> 4
    """,
    "recursive_a": """
        vertices: 1 2 3 4
        1 -> 2
        2 -> 3
        2 -> 4
        1 <-> 3
        1 <-> 4
    """,
    "recursive_b": """
        vertices: 1 2 3 4
        1 -> 2
        2 -> 3
        3 -> 4
        1 <-> 4
        1 <-> 3
    """,
    "cyclic_four": """
        vertices: 1 2 3 4
        1 -> 2
        2 -> 3
        3 -> 4
        1 -> 3
        4 -> 2
    """,
    # two latent factors A, B loading on five observed variables
    "two_factor": """
        vertices: A B 1 2 3 4 5
        A -> 1
        A -> 2
        A -> 3
        A -> 4
        A -> 5
        B -> 1
        B -> 2
        B -> 3
        B -> 4
        B -> 5
    """,
    "bow": """
        vertices: 1 2
        1 -> 2
        1 <-> 2
    """,
}

NAMES = tuple(_SOURCES)


def source(name: str) -> str:
    lines = [ln.strip() for ln in _SOURCES[name].strip().splitlines()]
    return "\n".join(lines) + "\n"


def graph(name: str) -> MixedGraph:
    """Look up a named example graph."""
    try:
        return parse_graph(source(name))
    except KeyError:
        raise KeyError(f"unknown example graph {name!r}; choose from {', '.join(NAMES)}") from None
