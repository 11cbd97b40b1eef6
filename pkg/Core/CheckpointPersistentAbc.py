from abc import ABC, abstractmethod
from pathlib import Path

class CheckpointPersistentAbc(ABC):

    @abstractmethod
    def load_checkpoint_from_file(self, file_path: str | Path) -> Exception | None:
        """
        Loads every named parameter blob of the model from a CAMFORGE checkpoint file.
        """

    @abstractmethod
    def save_checkpoint(self, file_path: str | Path) -> Exception | None:
        """
        Saves every named parameter blob of the model to a CAMFORGE checkpoint file.
        """
