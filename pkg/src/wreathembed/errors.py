"""Exception hierarchy shared by all modules."""


class WreathEmbedError(Exception):
    """Base class; the CLI turns these into one-line diagnostics."""


class GroupError(WreathEmbedError):
    pass


class BackendMismatchError(GroupError):
    pass


class OrderUndetectedError(GroupError):
    pass


class ClosureOverflowError(GroupError):
    pass


class NotInDerivedSubgroupError(GroupError):
    pass


class DecompositionNotFoundError(GroupError):
    pass


class SequenceError(WreathEmbedError):
    pass


class CapacityError(SequenceError):
    def __init__(self, message, suggested_modulus=None):
        super().__init__(message)
        self.suggested_modulus = suggested_modulus


class BaseFunctionError(WreathEmbedError):
    pass


class PeriodicityError(BaseFunctionError):
    pass


class WreathError(WreathEmbedError):
    pass


class EmbeddingError(WreathEmbedError):
    pass


class SpecFileError(WreathEmbedError):
    def __init__(self, message, line=None, column=None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.column = column
