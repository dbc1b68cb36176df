from dataclasses import dataclass


@dataclass(frozen=True)
class CostEstimate:
    """Predicted flop counts for one column partition of an ``m x n`` matrix."""
    flops_full: float
    flops_mat: float
    bound: float
    P: int
    s: float
    k: int

    @property
    def predicted_speedup(self) -> float:
        return self.flops_full / self.flops_mat
