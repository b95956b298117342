class ProxlatError(Exception):
    """Base class for library errors."""


class InvalidStructure(ProxlatError):
    """Input violates a structural invariant; carries a witness in the message."""


class SizeCapExceeded(ProxlatError):
    """A computation would exceed one of the configured size caps."""


class ParseError(ProxlatError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {msg}")
        self.line = line
        self.col = col
