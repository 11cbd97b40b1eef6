import numpy as np
from dataclasses import dataclass, field
from .Tensor import Tensor
from .Errors import ContractError

@dataclass(slots = True)
class AdamState:
    step: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    weight_decay: float = 1e-4
    first_moments: list[np.ndarray] = field(default_factory = list)
    second_moments: list[np.ndarray] = field(default_factory = list)

class AdamOptimizer:
    """
    Adam with decoupled L2 weight decay:
        w <- w - lr * (m_hat / (sqrt(v_hat) + eps) + lambda * w)
    Decay applies only to the tensors flagged as decaying (conv/linear weights).
    """

    def __init__(self, parameters: list[tuple[Tensor, bool]], beta1: float = 0.9, beta2: float = 0.999, epsilon: float = 1e-8, weight_decay: float = 1e-4):

        assert len(parameters) > 0, "optimizer requires at least one parameter"
        assert 0.0 <= beta1 < 1.0 and 0.0 <= beta2 < 1.0, "betas must lie in [0, 1)"
        assert epsilon > 0, "epsilon must be positive"
        assert weight_decay >= 0, "weight decay must be non-negative"

        self.__parameters: list[Tensor] = [tensor for tensor, _ in parameters]
        self.__decays: list[bool] = [decays for _, decays in parameters]
        self.__state: AdamState = AdamState(
            beta1 = beta1,
            beta2 = beta2,
            epsilon = epsilon,
            weight_decay = weight_decay,
            first_moments = [np.zeros_like(tensor.data, dtype = np.float64) for tensor in self.__parameters],
            second_moments = [np.zeros_like(tensor.data, dtype = np.float64) for tensor in self.__parameters],
        )

    @property
    def state(self) -> AdamState:
        return self.__state

    def zero_grad(self) -> None:
        for tensor in self.__parameters:
            tensor.zero_grad()

    def step(self, lr: float) -> None:
        """
        Summary:
            Apply one update with learning rate `lr`. Parameters without a gradient are
            treated as having a zero gradient.
        """
        if lr < 0:
            raise ContractError(f"learning rate must be non-negative, got {lr}")

        state: AdamState = self.__state
        state.step += 1
        correction1: float = 1.0 - state.beta1 ** state.step
        correction2: float = 1.0 - state.beta2 ** state.step

        for index, tensor in enumerate(self.__parameters):
            grad: np.ndarray = np.zeros_like(tensor.data, dtype = np.float64) if tensor.grad is None else tensor.grad.astype(np.float64)
            m: np.ndarray = state.first_moments[index]
            v: np.ndarray = state.second_moments[index]
            m *= state.beta1
            m += (1.0 - state.beta1) * grad
            v *= state.beta2
            v += (1.0 - state.beta2) * grad * grad

            update: np.ndarray = (m / correction1) / (np.sqrt(v / correction2) + state.epsilon)
            if self.__decays[index] and state.weight_decay > 0:
                update = update + state.weight_decay * tensor.data
            tensor.data = (tensor.data - lr * update).astype(tensor.data.dtype)

def adam_step(optimizer: AdamOptimizer, lr: float) -> None:
    optimizer.step(lr)
