"""Exception hierarchy shared by the library and the CLI."""


class VlineqError(Exception):
    """Base class for all library errors."""


class FieldMismatchError(VlineqError, ValueError):
    pass


class DimensionMismatchError(VlineqError, ValueError):
    pass


class DomainError(VlineqError, ValueError):
    """An argument lies outside the set an operation is defined on.

    Raised e.g. for geometric means of elements outside the positive cone,
    lattice operations on complex elements, or invalid weight vectors.
    """


class FormError(VlineqError, ValueError):
    """A sesquilinear form violates a required structural property."""


class InstanceParseError(VlineqError):
    """An instance file could not be read or is not well-formed JSON."""


class InstanceValidationError(VlineqError):
    """An instance file parsed but violates a load-time invariant.

    ``pointer`` is a JSON-pointer-style path to the offending node.
    """

    def __init__(self, pointer: str, message: str):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer
        self.message = message
