"""Nonlinearity families and derivative bounds.

Three families are supported, each with a fixed closed-form preset:

* ``F1`` (sublinear at infinity): ``f(s) = s**p`` with ``0 < p < 1``.
* ``F2`` (bounded, limit ``c`` at infinity): ``f(s) = c*s/(1+s)``.
* ``F3`` (singular at 0): ``f(s) = s**(-p)`` with ``p > 0``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DomainError

__all__ = ["Nonlinearity", "eval_f", "lipschitz_bound", "SAFETY"]

FAMILIES = ("F1", "F2", "F3")
SAFETY = 1.1


@dataclass(frozen=True)
class Nonlinearity:
    family: str
    p: float = None
    c: float = None
    l0: float = None
    l1: float = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigurationError(f"unknown nonlinearity family {self.family!r}")
        if self.family == "F1" and not (self.p is not None and 0.0 < self.p < 1.0):
            raise ConfigurationError(f"F1 needs 0 < p < 1, got p={self.p}")
        if self.family == "F2" and not (self.c is not None and 0.0 < self.c < np.inf):
            raise ConfigurationError(f"F2 needs a finite level c > 0, got c={self.c}")
        if self.family == "F3" and not (self.p is not None and self.p > 0.0):
            raise ConfigurationError(f"F3 needs p > 0, got p={self.p}")
        if (self.l0 is None) != (self.l1 is None):
            raise ConfigurationError("l0 and l1 must be given together")
        if self.l0 is not None and not (0.0 < self.l0 <= self.l1):
            raise ConfigurationError(f"need 0 < l0 <= l1, got ({self.l0}, {self.l1})")

    @classmethod
    def sublinear(cls, p):
        return cls("F1", p=p)

    @classmethod
    def saturating(cls, c):
        return cls("F2", c=c)

    @classmethod
    def singular(cls, p):
        return cls("F3", p=p)

    @property
    def sup(self):
        """``C := sup_{s>0} f(s)``; infinite for F1 and F3."""
        return float(self.c) if self.family == "F2" else np.inf

    def __call__(self, s):
        return eval_f(self, s)

    def derivative(self, s):
        s = np.asarray(s, dtype=float)
        if self.family == "F1":
            with np.errstate(divide="ignore"):
                return self.p * s ** (self.p - 1.0)
        if self.family == "F2":
            return self.c / (1.0 + s) ** 2
        return -self.p * s ** (-self.p - 1.0)

    def to_dict(self):
        return {k: v for k, v in self.__dict__.items() if v is not None}


def eval_f(f, s):
    """Evaluate the preset of ``f`` at ``s`` (scalar or array)."""
    arr = np.asarray(s)
    if arr.dtype != np.longdouble:
        arr = arr.astype(float)
    if f.family == "F3":
        if np.any(arr <= 0):
            raise DomainError("F3 nonlinearity evaluated at s <= 0")
        out = arr ** (-f.p)
    else:
        if np.any(arr < 0):
            raise DomainError(f"{f.family} nonlinearity evaluated at s < 0")
        out = arr**f.p if f.family == "F1" else f.c * arr / (1.0 + arr)
    return float(out) if np.ndim(s) == 0 else out


def lipschitz_bound(f, lo, hi):
    """Upper bound for ``sup |f'|`` on ``[lo, hi]``, with a 10% safety factor.

    ``lo`` and ``hi`` may be arrays (one interval per node).  Every preset
    has ``|f'|`` decreasing in ``s``, so the bound is taken at ``lo``.  For
    F1 with ``lo == 0`` the derivative is unbounded; the secant cap
    ``max(f(hi)/hi, f(1))`` is returned instead and the monotone scheme
    must be validated a posteriori.
    """
    lo_a = np.asarray(lo, dtype=float)
    hi_a = np.asarray(hi, dtype=float)
    if np.any(lo_a > hi_a):
        raise ConfigurationError(f"empty interval [{lo}, {hi}]")
    if f.family == "F1":
        with np.errstate(divide="ignore", invalid="ignore"):
            local = f.p * lo_a ** (f.p - 1.0)
            secant = np.where(hi_a > 0, hi_a ** (f.p - 1.0), 0.0)
        out = np.where(lo_a > 0, local, np.maximum(secant, 1.0))
    elif f.family == "F2":
        out = f.c / (1.0 + np.maximum(lo_a, 0.0)) ** 2
    else:
        if np.any(lo_a <= 0):
            raise DomainError("F3 derivative bound needs lo > 0")
        out = f.p * lo_a ** (-f.p - 1.0)
    out = SAFETY * out
    return float(out) if out.ndim == 0 else out
