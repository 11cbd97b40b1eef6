import numpy as np
import pytest
from ptri_camforge.Core.Tensor import Tensor
from ptri_camforge.Core.AdamOptimizer import AdamOptimizer
from ptri_camforge.Core.PolyScheduler import Scheduler, poly_lr
from ptri_camforge.Core.Errors import ContractError

class TestPolyScheduler:

    def test_starts_at_initial_rate(self) -> None:
        assert poly_lr(Scheduler.create(1e-3, 0.9, 100)) == pytest.approx(1e-3)

    def test_midpoint(self) -> None:
        sched: Scheduler = Scheduler.create(1e-3, 0.9, 100)
        for _ in range(50):
            sched.advance()
        assert poly_lr(sched) == pytest.approx(1e-3 * 0.5 ** 0.9)

    def test_reaches_zero_at_max_itr(self) -> None:
        sched: Scheduler = Scheduler.create(0.01, 0.9, 3)
        for _ in range(3):
            sched.advance()
        assert poly_lr(sched) == 0.0

    def test_rates_never_increase(self) -> None:
        sched: Scheduler = Scheduler.create(0.01, 0.9, 20)
        rates: list[float] = []
        for _ in range(20):
            rates.append(poly_lr(sched))
            sched.advance()
        assert all(later <= earlier for earlier, later in zip(rates, rates[1:]))

    def test_advancing_past_max_itr_fails(self) -> None:
        sched: Scheduler = Scheduler.create(0.01, 0.9, 1)
        sched.advance()
        with pytest.raises(ContractError):
            sched.advance()

class TestAdamOptimizer:

    def test_first_step_moves_by_learning_rate(self) -> None:
        weights: Tensor = Tensor(np.array([1.0, -2.0, 3.0]), requires_grad = True)
        weights.grad = np.array([0.5, -4.0, 0.0])
        optimizer: AdamOptimizer = AdamOptimizer([(weights, False)], weight_decay = 0.0)
        optimizer.step(0.1)
        # bias-corrected first step is lr * sign(grad)
        assert np.allclose(weights.data, [0.9, -1.9, 3.0], atol = 1e-6)

    def test_decoupled_decay_applies_to_flagged_tensors_only(self) -> None:
        decaying: Tensor = Tensor(np.array([2.0]), requires_grad = True)
        exempt: Tensor = Tensor(np.array([2.0]), requires_grad = True)
        optimizer: AdamOptimizer = AdamOptimizer([(decaying, True), (exempt, False)], weight_decay = 0.1)
        optimizer.zero_grad()
        optimizer.step(0.5)
        assert decaying.data[0] == pytest.approx(2.0 - 0.5 * 0.1 * 2.0)
        assert exempt.data[0] == pytest.approx(2.0)

    def test_zero_learning_rate_freezes_weights(self, rng: np.random.Generator) -> None:
        weights: Tensor = Tensor(rng.normal(size = (3, 3)), requires_grad = True)
        before: np.ndarray = weights.data.copy()
        optimizer: AdamOptimizer = AdamOptimizer([(weights, True)])
        for _ in range(5):
            weights.grad = rng.normal(size = (3, 3))
            optimizer.step(0.0)
        assert np.array_equal(weights.data, before)
        assert optimizer.state.step == 5

    def test_negative_learning_rate_is_rejected(self) -> None:
        optimizer: AdamOptimizer = AdamOptimizer([(Tensor(np.zeros(2), requires_grad = True), True)])
        with pytest.raises(ContractError):
            optimizer.step(-1e-3)

    def test_minimizes_a_quadratic(self) -> None:
        weights: Tensor = Tensor(np.array([3.0, -2.0]), requires_grad = True)
        optimizer: AdamOptimizer = AdamOptimizer([(weights, False)], weight_decay = 0.0)
        sched: Scheduler = Scheduler.create(0.1, 0.9, 300)
        for _ in range(300):
            optimizer.zero_grad()
            (weights * weights).sum().backward()
            optimizer.step(poly_lr(sched))
            sched.advance()
        assert np.all(np.abs(weights.data) < 0.1)
