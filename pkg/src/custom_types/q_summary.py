from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class QSummary:
    l: int
    mean: float
    count: int
    undefined: int
    bin_edges: np.ndarray = field(repr=False)
    histogram: np.ndarray = field(repr=False)
