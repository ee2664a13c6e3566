"""
🧮 Jets de primer orden

Un Jet guarda el valor de una cantidad (escalar, vector, matriz o tensor,
real o complejo) en un punto junto con sus primeras derivadas parciales
respecto de las coordenadas. El gradiente tiene forma ``value.shape + (n,)``:
el último eje es la derivada ∂/∂x_i.

Toda la aritmética puntual (productos, inversas, trazas, contracciones con
einsum) propaga derivadas exactas por regla del producto y de la cadena.
"""

from typing import Sequence, Union

import numpy as np

ArrayLike = Union[np.ndarray, float, complex, int]

# Letra reservada para el eje de derivadas dentro de jet_einsum
_GRAD_LETTER = "Z"


class Jet:
    """Valor más primeras derivadas en un punto"""

    __slots__ = ("value", "grad")
    __array_ufunc__ = None

    def __init__(self, value: ArrayLike, grad: ArrayLike):
        self.value = np.asarray(value)
        self.grad = np.asarray(grad)
        if self.grad.shape[:-1] != self.value.shape:
            raise ValueError(
                f"Forma de gradiente {self.grad.shape} incompatible con valor {self.value.shape}"
            )

    # =============================================================================
    # 🏗️ CONSTRUCTORES
    # =============================================================================

    @classmethod
    def constant(cls, value: ArrayLike, dim: int) -> "Jet":
        value = np.asarray(value)
        return cls(value, np.zeros(value.shape + (dim,), dtype=value.dtype if np.iscomplexobj(value) else float))

    @classmethod
    def variable(cls, point: Sequence[float], index: int) -> "Jet":
        """Coordenada x_index como Jet en el punto"""
        dim = len(point)
        grad = np.zeros(dim)
        grad[index] = 1.0
        return cls(float(point[index]), grad)

    # =============================================================================
    # 📐 PROPIEDADES
    # =============================================================================

    @property
    def dim(self) -> int:
        return self.grad.shape[-1]

    @property
    def shape(self):
        return self.value.shape

    @property
    def ndim(self) -> int:
        return self.value.ndim

    @property
    def T(self) -> "Jet":
        return self.transpose()

    @property
    def real(self) -> "Jet":
        return Jet(self.value.real, self.grad.real)

    @property
    def imag(self) -> "Jet":
        return Jet(self.value.imag, self.grad.imag)

    def conj(self) -> "Jet":
        return Jet(np.conj(self.value), np.conj(self.grad))

    def transpose(self) -> "Jet":
        if self.ndim != 2:
            raise ValueError("transpose solo para Jets matriciales")
        return Jet(self.value.T, np.swapaxes(self.grad, 0, 1))

    def __getitem__(self, index) -> "Jet":
        if index is Ellipsis or (isinstance(index, tuple) and Ellipsis in index):
            raise IndexError("Jet no admite Ellipsis")
        return Jet(self.value[index], self.grad[index])

    def __repr__(self) -> str:
        return f"Jet(value={self.value!r}, grad={self.grad!r})"

    # =============================================================================
    # ➕ ARITMÉTICA
    # =============================================================================

    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            return other
        return Jet.constant(other, self.dim)

    def __add__(self, other) -> "Jet":
        other = self._coerce(other)
        return Jet(self.value + other.value, self.grad + other.grad)

    __radd__ = __add__

    def __sub__(self, other) -> "Jet":
        other = self._coerce(other)
        return Jet(self.value - other.value, self.grad - other.grad)

    def __rsub__(self, other) -> "Jet":
        return self._coerce(other) - self

    def __neg__(self) -> "Jet":
        return Jet(-self.value, -self.grad)

    def __pos__(self) -> "Jet":
        return self

    def __mul__(self, other) -> "Jet":
        other = self._coerce(other)
        value = self.value * other.value
        grad = self.grad * other.value[..., None] + self.value[..., None] * other.grad
        return Jet(value, grad)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Jet":
        other = self._coerce(other)
        value = self.value / other.value
        grad = (self.grad - value[..., None] * other.grad) / other.value[..., None]
        return Jet(value, grad)

    def __rtruediv__(self, other) -> "Jet":
        return self._coerce(other) / self

    def __pow__(self, exponent: float) -> "Jet":
        if isinstance(exponent, Jet):
            raise TypeError("Solo se admiten exponentes constantes")
        value = self.value ** exponent
        if exponent == 0:
            return Jet.constant(np.ones_like(value), self.dim)
        factor = exponent * self.value ** (exponent - 1)
        return Jet(value, factor[..., None] * self.grad)

    def __matmul__(self, other) -> "Jet":
        return matmul(self, other)

    def __rmatmul__(self, other) -> "Jet":
        return matmul(other, self)

    # =============================================================================
    # 🔢 FUNCIONES ELEMENTALES Y ÁLGEBRA LINEAL
    # =============================================================================

    def _chain(self, value: np.ndarray, derivative: np.ndarray) -> "Jet":
        return Jet(value, np.asarray(derivative)[..., None] * self.grad)

    def sqrt(self) -> "Jet":
        value = np.sqrt(self.value)
        return self._chain(value, 0.5 / value)

    def exp(self) -> "Jet":
        value = np.exp(self.value)
        return self._chain(value, value)

    def log(self) -> "Jet":
        return self._chain(np.log(self.value), 1.0 / self.value)

    def sin(self) -> "Jet":
        return self._chain(np.sin(self.value), np.cos(self.value))

    def cos(self) -> "Jet":
        return self._chain(np.cos(self.value), -np.sin(self.value))

    def trace(self) -> "Jet":
        return Jet(np.trace(self.value), np.trace(self.grad, axis1=0, axis2=1))

    def inv(self) -> "Jet":
        """Inversa matricial: ∂(A⁻¹) = −A⁻¹ (∂A) A⁻¹"""
        inverse = np.linalg.inv(self.value)
        grad = -np.einsum("ij,jkZ,kl->ilZ", inverse, self.grad, inverse)
        return Jet(inverse, grad)


# =============================================================================
# 🧰 FUNCIONES DEL MÓDULO
# =============================================================================

def as_jet(x: Union[Jet, ArrayLike], dim: int) -> Jet:
    """Convertir un valor constante en Jet"""
    return x if isinstance(x, Jet) else Jet.constant(x, dim)


def jet_einsum(subscripts: str, *operands: Union[Jet, ArrayLike]) -> Jet:
    """
    Contracción einsum con regla del producto.

    Args:
        subscripts: notación einsum explícita ('ij,jk->ik'), sin la letra Z
        operands: Jets o arrays constantes (al menos un Jet)

    Returns:
        Jet del resultado
    """
    subscripts = subscripts.replace(" ", "")
    if _GRAD_LETTER in subscripts or "->" not in subscripts:
        raise ValueError(f"Subíndices inválidos para jet_einsum: {subscripts!r}")
    inputs, output = subscripts.split("->")
    terms = inputs.split(",")
    values = [op.value if isinstance(op, Jet) else np.asarray(op) for op in operands]
    value = np.einsum(subscripts, *values)

    grad = None
    for k, op in enumerate(operands):
        if not isinstance(op, Jet):
            continue
        lhs = ",".join(t + _GRAD_LETTER if i == k else t for i, t in enumerate(terms))
        args = [op.grad if i == k else values[i] for i in range(len(operands))]
        term = np.einsum(f"{lhs}->{output}{_GRAD_LETTER}", *args)
        grad = term if grad is None else grad + term
    if grad is None:
        raise ValueError("jet_einsum necesita al menos un Jet")
    return Jet(value, grad)


def matmul(a: Union[Jet, ArrayLike], b: Union[Jet, ArrayLike]) -> Jet:
    """Producto matricial (1-D o 2-D) entre Jets y/o arrays"""
    nd_a = a.ndim if isinstance(a, Jet) else np.ndim(a)
    nd_b = b.ndim if isinstance(b, Jet) else np.ndim(b)
    specs = {
        (2, 2): "ij,jk->ik",
        (2, 1): "ij,j->i",
        (1, 2): "j,jk->k",
        (1, 1): "j,j->",
    }
    if (nd_a, nd_b) not in specs:
        raise ValueError(f"matmul no soporta dimensiones {(nd_a, nd_b)}")
    return jet_einsum(specs[(nd_a, nd_b)], a, b)


def stack(jets: Sequence[Jet], axis: int = 0) -> Jet:
    """Apilar Jets de igual forma a lo largo de un eje del valor"""
    if axis < 0:
        raise ValueError("stack requiere un eje no negativo")
    return Jet(
        np.stack([j.value for j in jets], axis=axis),
        np.stack([j.grad for j in jets], axis=axis),
    )


def sqrt(x: Jet) -> Jet:
    return x.sqrt()


def exp(x: Jet) -> Jet:
    return x.exp()


def log(x: Jet) -> Jet:
    return x.log()


def sin(x: Jet) -> Jet:
    return x.sin()


def cos(x: Jet) -> Jet:
    return x.cos()


def identity(dim: int) -> Jet:
    """Matriz identidad constante como Jet"""
    return Jet.constant(np.eye(dim), dim)
