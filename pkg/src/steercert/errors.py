"""Exception hierarchy shared across the toolkit."""


class SteercertError(Exception):
    """Base class for all toolkit errors."""


class InputError(SteercertError, ValueError):
    """Malformed user input: bad dimensions, invalid scenario files, unphysical data."""


class NonMonotoneFamilyError(SteercertError):
    """A threshold scan found a feasible point above an infeasible one."""


class InternalCheckError(SteercertError, RuntimeError):
    """An internal invariant failed (verdict did not re-verify, pivot guard tripped).

    Reaching this is a bug in the solver or an unusable numerical regime,
    never a statement about the physics of the input.
    """
