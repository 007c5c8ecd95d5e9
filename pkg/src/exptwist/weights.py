"""Smooth compactly supported weights built from exp(-1/t)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _psi(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t, dtype=float)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def smooth_step(t) -> np.ndarray:
    """C-infinity step: 0 for t <= 0, 1 for t >= 1."""
    t = np.asarray(t, dtype=float)
    a, b = _psi(t), _psi(1.0 - t)
    return a / (a + b)


def bump01(t) -> np.ndarray:
    """exp(-1/(t(1-t))) on (0, 1), zero elsewhere."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = (t > 0) & (t < 1)
    ti = t[inside]
    out[inside] = np.exp(-1.0 / (ti * (1.0 - ti)))
    return out


@dataclass(frozen=True)
class SmoothWeight:
    """A smooth weight on [lo, hi].

    kind="bump":      scale * bump01((y - lo)/(hi - lo))
    kind="plateau":   1 on [lo + ramp, hi - ramp_hi], smooth steps down to 0 at lo and hi
                      (ramp_hi defaults to ramp)
    kind="symmetric": the plateau applied to |y|, i.e. 1 for |y| <= lo and 0 for |y| >= hi
    """

    kind: str
    lo: float
    hi: float
    ramp: float = 0.0
    scale: float = 1.0
    ramp_hi: float | None = None

    def __post_init__(self) -> None:
        if not self.hi > self.lo:
            raise ValueError("empty support")
        if self.kind == "plateau" and not (
                0 < self.ramp and 0 < self.right_ramp and self.ramp + self.right_ramp <= self.hi - self.lo):
            raise ValueError("ramps do not fit inside the support")
        if self.kind not in ("bump", "plateau", "symmetric"):
            raise ValueError(f"unknown weight kind {self.kind!r}")

    @property
    def right_ramp(self) -> float:
        return self.ramp if self.ramp_hi is None else self.ramp_hi

    @property
    def support(self) -> tuple[float, float]:
        if self.kind == "symmetric":
            return (-self.hi, self.hi)
        return (self.lo, self.hi)

    def __call__(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if self.kind == "bump":
            return self.scale * bump01((y - self.lo) / (self.hi - self.lo))
        if self.kind == "plateau":
            up = smooth_step((y - self.lo) / self.ramp)
            down = smooth_step((self.hi - y) / self.right_ramp)
            return self.scale * up * down
        return self.scale * smooth_step((self.hi - np.abs(y)) / (self.hi - self.lo))

    def scaled(self, factor: float) -> "SmoothWeight":
        return SmoothWeight(self.kind, self.lo, self.hi, self.ramp, self.scale * factor, self.ramp_hi)

    def describe(self) -> dict:
        out = {"kind": self.kind, "lo": self.lo, "hi": self.hi, "ramp": self.ramp, "scale": self.scale}
        if self.ramp_hi is not None:
            out["ramp_hi"] = self.ramp_hi
        return out


def plateau(lo: float = 1.0, hi: float = 2.0, ramp: float = 0.25, ramp_hi: float | None = None) -> SmoothWeight:
    return SmoothWeight("plateau", lo, hi, ramp, 1.0, ramp_hi)


def bump(lo: float, hi: float, peak: float = 1.0) -> SmoothWeight:
    """bump01 moved to [lo, hi] with maximum value `peak`."""
    return SmoothWeight("bump", lo, hi, scale=peak * np.exp(4.0))
