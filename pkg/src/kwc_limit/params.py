"""Parameter blocks and sampled trajectories shared by every solver."""
from __future__ import annotations

from dataclasses import asdict, dataclass, replace

import numpy as np


@dataclass(frozen=True)
class ModelParams:
    """Constants of the reduced problem.

    ``a`` is the potential stiffness in F(v) = a^2 (v - 1)^2, ``b`` the jump of
    the orientation field, ``c`` and ``mu`` describe the initial profile
    v_0 = 1 - c exp(-mu |x| / epsilon) (well-prepared when mu == a).
    """

    a: float = 1.0
    b: float = 1.0
    c: float = 0.0
    mu: float | None = None
    tau1: float = 1.0
    L: float = 1.0
    epsilon: float = 1.0

    def __post_init__(self):
        if self.mu is None:
            object.__setattr__(self, "mu", self.a)
        if not self.a >= 0:
            raise ValueError("a must be nonnegative")
        if not self.b >= 0:
            raise ValueError("b must be nonnegative")
        if not self.mu >= 0:
            raise ValueError("mu must be nonnegative")
        for name in ("tau1", "L", "epsilon"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def well_prepared(self) -> bool:
        return self.mu == self.a

    @property
    def xi0(self) -> float:
        return 1.0 - self.c

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class TimeSeries:
    """Sampled trajectory (t_k, value_k) of a scalar quantity."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times.shape != self.values.shape or self.times.ndim != 1:
            raise ValueError("times and values must be 1-D arrays of equal length")
        if self.times.size > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("non-finite values in time series")

    def __len__(self):
        return self.times.size

    def window(self, t_min: float = -np.inf, t_max: float = np.inf) -> "TimeSeries":
        slack = 1e-9 * max(1.0, abs(t_max)) if np.isfinite(t_max) else 0.0
        keep = (self.times >= t_min) & (self.times <= t_max + slack)
        return TimeSeries(self.times[keep], self.values[keep])
