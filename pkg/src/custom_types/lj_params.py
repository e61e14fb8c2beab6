from dataclasses import dataclass


@dataclass(frozen=True)
class LJParams:
    epsilon: float = 1.0
    sigma: float = 1.0
    r_c: float = 2.5

    def __post_init__(self):
        if self.epsilon <= 0 or self.sigma <= 0 or self.r_c <= 0:
            raise ValueError(
                f"Lennard-Jones parameters must be positive: epsilon={self.epsilon}, "
                f"sigma={self.sigma}, r_c={self.r_c}"
            )
        if self.r_c <= self.sigma:
            raise ValueError(f"Cutoff {self.r_c} must exceed sigma {self.sigma}")

    @property
    def sigma2(self) -> float:
        return self.sigma * self.sigma

    @property
    def rc_sq(self) -> float:
        return self.r_c * self.r_c

    @property
    def cv(self) -> float:
        return 4.0 * self.epsilon

    @property
    def cf(self) -> float:
        # F_i = -grad_i V with dr = r_i - r_j
        return 48.0 * self.epsilon / self.sigma2
