from dataclasses import dataclass
from .Errors import ContractError

@dataclass(slots = True)
class Scheduler:
    l_init: float
    gamma: float
    max_itr: int
    itr: int = 0

    @staticmethod
    def create(l_init: float, gamma: float, max_itr: int) -> "Scheduler":

        assert l_init > 0, "l_init must be positive"
        assert gamma > 0, "gamma must be positive"
        assert isinstance(max_itr, int) and max_itr >= 1, "max_itr must be a positive integer"
        return Scheduler(l_init, gamma, max_itr, 0)

    def advance(self) -> None:
        if self.itr >= self.max_itr:
            raise ContractError(f"scheduler already at max_itr {self.max_itr}")
        self.itr += 1

def poly_lr(sched: Scheduler) -> float:
    """
    Summary:
        l_init * (1 - itr / max_itr) ** gamma. Reaches exactly 0 at itr == max_itr.
    """
    if sched.itr < 0 or sched.itr > sched.max_itr:
        raise ContractError(f"itr {sched.itr} outside [0, {sched.max_itr}]")
    return sched.l_init * (1.0 - sched.itr / sched.max_itr) ** sched.gamma
