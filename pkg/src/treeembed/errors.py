"""Exception hierarchy shared across the package."""

from __future__ import annotations


class TreeEmbedError(Exception):
    """Base class for every error raised by this package."""


class PreconditionError(TreeEmbedError, ValueError):
    """An operation was called outside its documented domain."""


class EmptyGraphError(PreconditionError):
    """A statistic is undefined on the graph with no vertices."""


class Graph6Error(TreeEmbedError, ValueError):
    """Malformed graph6 input.  ``offset`` is the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class ConstructionFailure(TreeEmbedError):
    """A tree partition could not be built with the required properties."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class EmbedFailure(TreeEmbedError):
    """A candidate set emptied during an embedding.

    ``stuck`` is the tree vertex that could not be placed and ``state`` a
    snapshot of the partial map and frontier for debugging.
    """

    def __init__(self, message: str, stuck=None, state=None):
        super().__init__(message)
        self.stuck = stuck
        self.state = state or {}


class HostTooSparse(PreconditionError):
    """No cluster of the cleaned host qualifies as the hub cluster."""

    def __init__(self, message: str, best_fraction=None):
        super().__init__(message)
        self.best_fraction = best_fraction


class ProofInvariantError(TreeEmbedError, AssertionError):
    """A runtime check of a proof inequality failed.

    Distinct from :class:`PreconditionError`: this signals an implementation
    bug or a violated internal guarantee, not bad input.
    """

    def __init__(self, message: str, audit=None):
        super().__init__(message)
        self.audit = audit


class StructureError(ProofInvariantError):
    """The cluster-level structure needed by the embedding phases is missing."""


class NoEligibleTree(TreeEmbedError):
    """No unembedded microtree can be placed in the requested cluster pair."""


class OracleTimeout(TreeEmbedError):
    """The exact containment search ran past its node budget."""
