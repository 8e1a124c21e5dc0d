"""Exception types raised by the simulator.

Every error carries a machine-readable ``kind`` and an optional ``details``
mapping so the command line can serialize it without string parsing.
"""


class PropertimeError(Exception):
    kind = "error"
    exit_code = 1

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details

    def to_dict(self):
        return {
            "error": self.kind,
            "message": str(self),
            "exit_code": self.exit_code,
            "details": self.details,
        }


class InvalidParameterError(PropertimeError, ValueError):
    kind = "invalid-parameter"
    exit_code = 5


class NullModeError(PropertimeError, ValueError):
    kind = "null-mode"
    exit_code = 5


class RepresentationError(PropertimeError, ValueError):
    kind = "representation"
    exit_code = 5


class LatticeMismatchError(PropertimeError, ValueError):
    kind = "lattice-mismatch"
    exit_code = 5


class SpeciesMismatchError(PropertimeError, ValueError):
    kind = "species-mismatch"
    exit_code = 5


class SizeGuardError(PropertimeError, ValueError):
    kind = "size-guard"
    exit_code = 5


class ResolutionError(PropertimeError):
    """Packet or boosted field does not fit the lattice."""

    kind = "admissibility"
    exit_code = 3


class IllConditionedError(PropertimeError):
    """Indefinite norm too small relative to the L2 norm for normalized means."""

    kind = "ill-conditioned"
    exit_code = 4


class SchemaError(PropertimeError):
    kind = "schema"
    exit_code = 2


class NotProductFormError(PropertimeError, ValueError):
    kind = "not-product-form"
    exit_code = 5
