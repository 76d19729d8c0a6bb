"""Exception hierarchy shared by all netforge modules."""


class NetforgeError(Exception):
    """Base class for every error raised by netforge."""


class WidthOverflowError(NetforgeError, OverflowError):
    """A quantity such as b**m exceeds the supported integer width (2**62)."""


class BudgetExceeded(NetforgeError):
    """A search or enumeration ran past its configured resource budget."""

    def __init__(self, message, nodes=None):
        super().__init__(message)
        self.nodes = nodes


class InvalidChoice(NetforgeError, ValueError):
    """A scripted greedy choice was not available at its step."""


class MalformedInput(NetforgeError, ValueError):
    """Structurally invalid input (bad family, bad file, wrong cardinality)."""
