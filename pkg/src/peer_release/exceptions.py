"""Exception types raised across the package."""


class InstanceError(ValueError):
    """Public weights or an assignment violate the load constraints."""


class InstanceTooLargeError(InstanceError):
    """An enumeration would exceed its configured size cap."""


class BoundsError(ValueError):
    """The bound scans could not assign a value to every index.

    This only happens when the public data is inconsistent, i.e. no valid
    assignment of the weights to the reviewers exists.
    """


class ConvergenceError(RuntimeError):
    """The projection solver did not converge within its iteration budget."""
