"""Exception hierarchy shared across the package."""


class PlanforgeError(Exception):
    """Base class for all errors raised by this package."""


class ModelError(PlanforgeError):
    """Invalid model construction: duplicate names, type mismatches, bad declarations."""


class OutOfRangeError(PlanforgeError):
    """An array access whose index lies outside the declared bounds.

    ``access`` holds the rendered offending access, e.g. ``at_robot[2][3]``.
    """

    def __init__(self, message: str, access: str | None = None):
        super().__init__(message)
        self.access = access


class CompilationError(PlanforgeError):
    """A compiler pass could not transform the problem."""


class PlanError(PlanforgeError):
    """Malformed plan step: unknown action, arity mismatch, or binding out of bounds."""


class SearchLimitExceeded(PlanforgeError):
    """Node or time cap hit before the search space was exhausted."""


class PddlError(PlanforgeError):
    """PDDL export failure, e.g. an unsanitizable name collision."""


class FormatError(PlanforgeError):
    """Unparseable problem, plan, or instance input."""
