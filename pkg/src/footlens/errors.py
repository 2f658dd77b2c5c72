"""Exception hierarchy shared by the whole pipeline.

Every error carries a process exit code so the command-line driver can map
failures onto its documented statuses: 2 for bad inputs, 3 for numerical
solver failures, 4 for layout assembly failures.
"""


class FootlensError(Exception):
    """Base class for all pipeline errors."""

    exit_code = 1


class InputError(FootlensError):
    """Invalid or degenerate input: geometry, files, configuration."""

    exit_code = 2


class BindingError(InputError):
    """Temporal series do not match the layout (missing facades, bad length)."""


class SolverError(FootlensError):
    """Numerical failure in the conformal-map machinery."""

    exit_code = 3


class ConvergenceError(SolverError):
    """Parameter problem did not reach the residual target."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class CrowdingError(SolverError):
    """Two prevertices collapsed below the crowding gap."""

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class NonConvergenceError(SolverError):
    """Inverse-map iteration failed for a specific point."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class LayoutError(FootlensError):
    """Ribbon/cell assembly produced an inconsistent layout."""

    exit_code = 4


class TopologyError(LayoutError):
    """Skeleton graph lacks the structure an operation requires."""


class PartitionError(LayoutError):
    """Cutlines cross or a split failed."""


class StitchError(LayoutError):
    """Contour endpoints could not be matched across a shared cutline."""

    def __init__(self, message, edge=None, d_w=None):
        super().__init__(message)
        self.edge = edge
        self.d_w = d_w
