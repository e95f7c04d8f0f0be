"""Exception hierarchy shared by all modules."""


class XorDError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameter(XorDError, ValueError):
    pass


class InvalidArgument(XorDError, ValueError):
    pass


class InvalidGame(XorDError, ValueError):
    """The game has no colored edge or is otherwise unusable for a value computation."""


class Unsupported(XorDError):
    pass


class ResourceLimit(XorDError):
    """A computation would exceed its enumeration or size budget."""


class ParseError(XorDError, ValueError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
