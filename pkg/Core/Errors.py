class ShapeError(ValueError):
    """
    Raised when tensor, mask or map dimensions do not fit an operation.
    """

class ContractError(ValueError):
    """
    Raised when an operation is called outside its preconditions.
    """

class EmptySeedError(ContractError):
    """
    Raised by the seeding loss when no pixel of the batch carries a seed label.
    """

class ConfigurationError(ValueError):
    """
    Raised when a configuration value, preset or override is invalid.
    """

class DataLoadError(OSError):
    """
    Returned by corpus and manifest loaders when a file is missing or malformed.
    """

class StageError(RuntimeError):

    def __init__(self, stage: str, message: str):
        super().__init__(f"stage '{stage}' failed: {message}")
        self.stage: str = stage
