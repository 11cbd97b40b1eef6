import threading
import contextlib
import numpy as np
from typing import Callable, Iterator, Sequence, Tuple
from .Errors import ContractError, ShapeError

BackwardFn = Callable[[np.ndarray], Sequence[np.ndarray | None]]

_tape_state = threading.local()

def is_grad_enabled() -> bool:
    return getattr(_tape_state, "enabled", True)

@contextlib.contextmanager
def no_grad() -> Iterator[None]:
    """
    Summary:
        Disable tape recording for the current thread. Used by inference so that
        concurrent read-only forwards over a frozen model never touch shared state.
    """
    previous: bool = is_grad_enabled()
    _tape_state.enabled = False
    try:
        yield
    finally:
        _tape_state.enabled = previous

class Tensor:
    """
    Dense float array (float32 by default, float64 accepted for gradient checks)
    with an optional gradient buffer and a link to the operation that produced it.
    """

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data: np.ndarray | float, requires_grad: bool = False):

        array: np.ndarray = np.asarray(data)
        if array.dtype not in (np.float32, np.float64):
            array = array.astype(np.float32)
        if not np.all(np.isfinite(array)):
            raise ContractError("Tensor values must be finite.")

        self.data: np.ndarray = array
        self.grad: np.ndarray | None = None
        self.requires_grad: bool = requires_grad
        self._parents: Tuple["Tensor", ...] = ()
        self._backward: BackwardFn | None = None

    @staticmethod
    def from_op(data: np.ndarray, parents: Sequence["Tensor"], backward: BackwardFn) -> "Tensor":
        """
        Summary:
            Wrap the result of an operation. The tape link is only kept when some parent
            requires a gradient and recording is enabled.
        """
        out: Tensor = Tensor(data)
        if is_grad_enabled() and any(parent.requires_grad for parent in parents):
            out.requires_grad = True
            out._parents = tuple(parents)
            out._backward = backward
        return out

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def dims(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def dtype(self) -> np.dtype:
        return self.data.dtype

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        if self.data.size != 1:
            raise ContractError(f"item() requires a single-element tensor, got shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def detach(self) -> "Tensor":
        return Tensor(self.data)

    def zero_grad(self) -> None:
        self.grad = np.zeros_like(self.data)

    def backward(self) -> None:
        """
        Summary:
            Reverse-mode differentiation from this scalar. Gradients accumulate into
            the `grad` buffer of every reachable leaf that requires a gradient.
        """
        if self.data.size != 1:
            raise ContractError(f"backward() requires a scalar loss, got shape {self.shape}")

        pending: dict[int, np.ndarray] = {id(self): np.ones_like(self.data)}
        for node in reversed(self.__topological_order()):
            node_grad: np.ndarray | None = pending.pop(id(node), None)
            if node_grad is None:
                continue

            if node._backward is None:
                if node.requires_grad:
                    node_grad = node_grad.astype(node.data.dtype, copy = False)
                    node.grad = node_grad.copy() if node.grad is None else node.grad + node_grad
                continue

            for parent, parent_grad in zip(node._parents, node._backward(node_grad)):
                if parent_grad is None or not parent.requires_grad:
                    continue
                if parent_grad.shape != parent.shape:
                    raise ShapeError(f"gradient shape {parent_grad.shape} does not match tensor shape {parent.shape}")
                key: int = id(parent)
                pending[key] = parent_grad if key not in pending else pending[key] + parent_grad

    def __topological_order(self) -> list["Tensor"]:

        order: list[Tensor] = []
        visited: set[int] = set()
        stack: list[Tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                if id(parent) not in visited:
                    stack.append((parent, False))
        return order

    # * elementwise arithmetic, same-shape or scalar only

    def __add__(self, other: "Tensor | float") -> "Tensor":
        if isinstance(other, Tensor):
            if other.shape != self.shape:
                raise ShapeError(f"cannot add shapes {self.shape} and {other.shape}")
            return Tensor.from_op(self.data + other.data, (self, other), lambda g: (g, g))
        return Tensor.from_op(self.data + other, (self,), lambda g: (g,))

    def __radd__(self, other: float) -> "Tensor":
        return self.__add__(other)

    def __neg__(self) -> "Tensor":
        return Tensor.from_op(-self.data, (self,), lambda g: (-g,))

    def __sub__(self, other: "Tensor | float") -> "Tensor":
        return self + (-other)

    def __mul__(self, other: "Tensor | np.ndarray | float") -> "Tensor":
        if isinstance(other, Tensor):
            if other.shape != self.shape:
                raise ShapeError(f"cannot multiply shapes {self.shape} and {other.shape}")
            a: np.ndarray = self.data
            b: np.ndarray = other.data
            return Tensor.from_op(a * b, (self, other), lambda g: (g * b, g * a))

        constant: np.ndarray = np.asarray(other, dtype = self.data.dtype)
        if constant.ndim > 0 and constant.shape != self.shape:
            raise ShapeError(f"cannot multiply shape {self.shape} by constant of shape {constant.shape}")
        return Tensor.from_op(self.data * constant, (self,), lambda g: (g * constant,))

    def __rmul__(self, other: np.ndarray | float) -> "Tensor":
        return self.__mul__(other)

    def sum(self) -> "Tensor":
        total: np.ndarray = np.asarray(self.data.sum(dtype = np.float64), dtype = self.data.dtype)
        shape: Tuple[int, ...] = self.shape
        return Tensor.from_op(total, (self,), lambda g: (np.broadcast_to(g, shape).copy(),))

    def mean(self) -> "Tensor":
        count: int = max(self.data.size, 1)
        return self.sum() * (1.0 / count)

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, dtype={self.dtype}, requires_grad={self.requires_grad})"
