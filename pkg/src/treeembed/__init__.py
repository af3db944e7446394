"""Tree embedding in dense graphs: tree partitions, regularity, pair and saturation embedders, exact oracle."""

from .errors import (
    ConstructionFailure,
    EmbedFailure,
    HostTooSparse,
    OracleTimeout,
    PreconditionError,
    ProofInvariantError,
    TreeEmbedError,
)
from .graph import Graph
from .trees import Tree

__all__ = [
    "ConstructionFailure",
    "EmbedFailure",
    "Graph",
    "HostTooSparse",
    "OracleTimeout",
    "PreconditionError",
    "ProofInvariantError",
    "Tree",
    "TreeEmbedError",
]
__version__ = "0.1.0"
