"""Shared exception types."""


class InvalidArgument(ValueError):
    """An operation was called with arguments outside its contract."""


class InvalidInput(ValueError):
    """Input data (symbols, files) violates a declared precondition."""


class DecodeError(ValueError):
    """A bit stream is not a valid encoding.

    ``bit_offset`` is the position of the first offending bit when known.
    """

    def __init__(self, message: str, bit_offset: int | None = None):
        super().__init__(message if bit_offset is None
                         else f"{message} (bit offset {bit_offset})")
        self.bit_offset = bit_offset
