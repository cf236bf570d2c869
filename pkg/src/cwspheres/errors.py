"""Exception types shared across the package."""


class CwError(Exception):
    """Base class for all package errors."""


class InvalidInput(CwError):
    """Malformed or out-of-domain input (shape mismatch, non-finite data, ...)."""


class InfeasibleParams(CwError):
    """Parameter set violates a feasibility inequality."""


class NotKvfAdmissible(CwError):
    """Metric parameters do not satisfy the admissibility relation a = b + c^2."""


class NotApplicable(CwError):
    """Operation requires a hypothesis (e.g. a non-reversible metric) that fails."""


class BranchUndefined(CwError):
    """Eigenvalue phase sits on the branch cut where the check is undefined."""


class TrackingFailed(CwError):
    """Eigenvalue path tracking could not resolve crossings within the step cap."""


class ResolutionTooCoarse(CwError):
    """Sampled sphere graph is too coarse (disconnected or target unreachable)."""
