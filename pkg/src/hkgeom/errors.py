"""Exception taxonomy shared by all modules.

The three classes map onto the CLI exit codes: rejected input (2),
internal inconsistency (3), inconclusive search (4).
"""


class InputError(ValueError):
    """A precondition on caller-supplied data failed; the input was rejected."""


class InconsistencyError(RuntimeError):
    """Internally contradictory data: a cross-check that must hold did not."""


class InconclusiveError(RuntimeError):
    """A bounded search gave up without a verdict (not a refutation)."""
