from photodistill.optics.matrices import ComplexMatrix, fourier_matrix, hadamard_matrix
from photodistill.unitary.base import UnitarySource


class FourierSource(UnitarySource):
    name = "fourier"

    def matrix(self, n: int) -> ComplexMatrix:
        return fourier_matrix(n)


class HadamardSource(UnitarySource):
    name = "hadamard"

    def matrix(self, n: int) -> ComplexMatrix:
        return hadamard_matrix(n)
