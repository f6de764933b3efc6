"""Exception types shared across the package."""


class CapacityError(ValueError):
    """A joint profile space is too large to enumerate."""

    def __init__(self, members, size, cap):
        self.members = tuple(members)
        self.size = size
        self.cap = cap
        super().__init__(
            f"profile space of players {list(self.members)} has {size} profiles, "
            f"above the exhaustive cap of {cap}")


class NegativeWeightError(ValueError):
    """A linear decomposition carries a negative weight."""


class GameFormatError(ValueError):
    """A game or decomposition file could not be parsed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
