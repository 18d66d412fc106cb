from abc import ABC, abstractmethod

from photodistill.optics.matrices import ComplexMatrix


class UnitarySource(ABC):
    name: str

    @abstractmethod
    def matrix(self, n: int) -> ComplexMatrix:
        raise NotImplementedError
