"""Exception and warning types shared across the package."""


class HeteroRecError(Exception):
    """Base class for all validation errors raised by this package."""


class MalformedRow(HeteroRecError):
    """A tabular input row has the wrong column count or a non-numeric field."""


class ProbabilityOutOfRange(HeteroRecError):
    """An invite or accept probability lies outside [0, 1]."""


class DuplicateEdge(HeteroRecError):
    """The same (src, dst) pair appears more than once."""


class SelfLoop(HeteroRecError):
    """An edge points from a node to itself."""


class DanglingEndpoint(HeteroRecError):
    """An edge references a node id that was never declared."""


class NoSuchEdge(HeteroRecError):
    """The queried (u, v) edge does not exist."""


class EmptyInviterSet(HeteroRecError):
    """An operation that needs at least one inviter received none."""


class UnknownNode(HeteroRecError):
    """A node id is outside the graph's node range."""


class UnknownSeed(UnknownNode):
    """A cascade seed is not a node of the graph."""


class GraphTooLargeForEnumeration(HeteroRecError):
    """Exact influence enumeration would exceed the configured edge limit."""


class InvalidCapacity(HeteroRecError):
    """Interaction capability w must be a positive integer."""


class InvalidParameters(HeteroRecError):
    """A numeric parameter violates its documented range."""


class EmptyGraph(HeteroRecError):
    """The graph has no nodes."""


class SameNode(HeteroRecError):
    """A pairwise query was asked about a node and itself."""


class UniverseMismatch(HeteroRecError):
    """Two score sets do not cover the same node universe."""


class InfeasibleConfig(HeteroRecError):
    """A synthetic-data configuration cannot be realized."""


class ClampedParameters(UserWarning):
    """A derived quantity was clamped to stay in a usable range."""


class UniformFallback(UserWarning):
    """Uniform source assignment was infeasible; fell back to random sources."""


class MismatchedGraph(UserWarning):
    """Recommended ids are absent from the event-log universe."""


class NoRelevantInviters(UserWarning):
    """No inviter had a relevant candidate; the metric defaults to zero."""
