class SuperpointError(Exception):
    """Base class for errors raised by the field-theory services."""

    default_message = "Computation failed"

    def __init__(self, message=None, **details):
        self.message = message or self.default_message
        self.details = details
        super().__init__(self.message)


class TableMismatchError(SuperpointError):
    default_message = "Polynomials live over different variable tables"


class VariableTableError(SuperpointError):
    default_message = "Invalid variable table"


class ParityError(SuperpointError):
    default_message = "Parity mismatch"


class IndexRangeError(SuperpointError):
    default_message = "Index out of range"


class UnsupportedSpaceError(SuperpointError):
    default_message = "Unsupported space"


class SpaceMismatchError(SuperpointError):
    default_message = "Forms live on different spaces"


class InfeasibleDegreeError(SuperpointError):
    default_message = "Infeasible form degree"


class DegreeMismatchError(SuperpointError):
    default_message = "Degree mismatch"


class NotClosedError(SuperpointError):
    default_message = "Form is not closed"


class ConstraintViolationError(SuperpointError):
    default_message = "Parameter constraint violated"


class CoactionShapeError(SuperpointError):
    default_message = "Coaction is not of cdga type"


class GradingError(SuperpointError):
    default_message = "Grading is not connective"


class RepresentationError(SuperpointError):
    default_message = "Representation is not multiplicative"


class SearchBoundError(SuperpointError):
    default_message = "Search bound too large"


class ResourceLimitError(SuperpointError):
    default_message = "Resource limit exceeded"


class WitnessError(SuperpointError):
    default_message = "Witness data is inconsistent"
