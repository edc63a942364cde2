"""Additive noise mechanisms applied to the true sorted mean-weight vector."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np


class NoiseKind(str, enum.Enum):
    LAPLACE = "laplace"
    GAUSSIAN = "gaussian"
    NONE = "none"


@dataclass(frozen=True)
class NoiseMechanism:
    """``scale`` is the Laplace scale ``b`` or the Gaussian standard deviation."""

    kind: NoiseKind = NoiseKind.LAPLACE
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", NoiseKind(self.kind))
        if not (self.scale >= 0 and math.isfinite(self.scale)):
            raise ValueError(f"noise scale must be a finite nonnegative number, got {self.scale}")

    @classmethod
    def laplace_with_variance(cls, variance: float) -> "NoiseMechanism":
        # Var[Laplace(b)] = 2 b^2
        return cls(NoiseKind.LAPLACE, math.sqrt(variance / 2.0))

    @property
    def variance(self) -> float:
        if self.kind is NoiseKind.LAPLACE:
            return 2.0 * self.scale**2
        if self.kind is NoiseKind.GAUSSIAN:
            return self.scale**2
        return 0.0


def laplace_noise(scale: float, size, rng: np.random.Generator) -> np.ndarray:
    """Zero-mean Laplace draws by inverse CDF, one uniform per coordinate."""
    v = rng.random(size) - 0.5
    tail = np.maximum(1.0 - 2.0 * np.abs(v), np.finfo(float).tiny)
    return -scale * np.sign(v) * np.log(tail)


def sample_noise(mech: NoiseMechanism, size, rng_seed=None) -> np.ndarray:
    rng = np.random.default_rng(rng_seed)
    if mech.kind is NoiseKind.NONE or mech.scale == 0:
        return np.zeros(size)
    if mech.kind is NoiseKind.LAPLACE:
        return laplace_noise(mech.scale, size, rng)
    return rng.normal(0.0, mech.scale, size)


def noisy_release(theta_star, mech: NoiseMechanism, rng_seed=None) -> np.ndarray:
    """Return ``theta_star + noise``; the result need not be sorted."""
    theta = np.asarray(theta_star, dtype=float)
    if theta.ndim != 1 or not np.all(np.isfinite(theta)):
        raise ValueError("theta_star must be a finite 1-d vector")
    if np.any(np.diff(theta) < 0):
        raise ValueError("theta_star must be sorted")
    return theta + sample_noise(mech, theta.shape, rng_seed)
