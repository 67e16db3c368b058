"""Adam and the warmup / inverse-square-root learning-rate schedule."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError
from ..numerics import Tensor


@dataclass(frozen=True)
class LRSchedule:
    peak_lr: float = 1e-3
    warmup_steps: int = 10_000

    def __post_init__(self):
        if self.peak_lr <= 0 or self.warmup_steps < 1:
            raise ConfigError("peak_lr must be positive and warmup_steps >= 1")

    def __call__(self, step: int) -> float:
        """Linear ramp ``peak * step / warmup`` (zero at step 0), then ``peak * sqrt(warmup / step)``."""
        if step < self.warmup_steps:
            return self.peak_lr * step / self.warmup_steps
        return self.peak_lr * math.sqrt(self.warmup_steps / step)


class Adam:
    def __init__(self, params: list[Tensor], betas=(0.9, 0.98), eps: float = 1e-8):
        self.params = list(params)
        self.b1, self.b2 = betas
        self.eps = eps
        self.t = 0
        self.m = [np.zeros(p.shape) for p in self.params]
        self.v = [np.zeros(p.shape) for p in self.params]

    def step(self, lr: float, active: list[bool] | None = None) -> None:
        """Update every parameter with a gradient; ``active[i] = False`` leaves tensor ``i`` untouched."""
        self.t += 1
        c1 = 1.0 - self.b1 ** self.t
        c2 = 1.0 - self.b2 ** self.t
        for i, p in enumerate(self.params):
            if p.grad is None or (active is not None and not active[i]):
                continue
            g = p.grad
            self.m[i] = self.b1 * self.m[i] + (1.0 - self.b1) * g
            self.v[i] = self.b2 * self.v[i] + (1.0 - self.b2) * g * g
            p.data = p.data - lr * (self.m[i] / c1) / (np.sqrt(self.v[i] / c2) + self.eps)

    def state(self) -> dict[str, np.ndarray]:
        out = {"t": np.array([self.t], dtype=np.float64)}
        for i in range(len(self.params)):
            out[f"m.{i}"] = self.m[i]
            out[f"v.{i}"] = self.v[i]
        return out
