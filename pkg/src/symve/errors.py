"""Exception hierarchy shared by all symve modules."""


class SymveError(Exception):
    """Base class for every error raised by symve."""


class MissingVariable(SymveError, KeyError):
    """An assignment does not bind a variable that the operation needs."""


class UnknownVariable(SymveError, KeyError):
    """A variable id is not part of the factor or graph."""


class AlreadyEliminated(SymveError, ValueError):
    pass


class CardinalityMismatch(SymveError, ValueError):
    """The same variable id appears with two different cardinalities."""


class OutOfRange(SymveError, ValueError):
    pass


class NotAPermutation(SymveError, ValueError):
    pass


class InvalidConfig(SymveError, ValueError):
    pass


class TooLarge(SymveError):
    """A requested enumeration exceeds its configured limit."""


class NotSymmetric(SymveError, ValueError):
    """A declared group of interchangeable variables is contradicted by the table.

    ``witness`` holds two assignments (dicts var -> value) that are permutations
    of each other within ``group`` but map to different potentials.
    """

    def __init__(self, group, witness):
        self.group = tuple(group)
        self.witness = witness
        a, b = witness
        super().__init__(f"group {list(self.group)} is not interchangeable: {a} != {b}")


class ParseError(SymveError, ValueError):
    def __init__(self, line, reason):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class ValidationError(SymveError, ValueError):
    def __init__(self, factor_index, reason):
        self.factor_index = factor_index
        self.reason = reason
        where = "model" if factor_index is None else f"factor {factor_index}"
        super().__init__(f"{where}: {reason}")
