"""Private delegation-cost laws.

Each user draws an idiosyncratic delegation cost ``c`` from one of a few
closed-form families. Closed forms for the CDF, density and quantile keep
every downstream equilibrium exactly checkable.

All three evaluators accept scalars or numpy arrays. Scalars come back as
plain floats.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import DomainError, UnboundedQuantile, ValidationError


class Family(str, enum.Enum):
    UNIFORM = "uniform"
    EXPONENTIAL = "exponential"
    LOGISTIC = "logistic"


def _out(x: np.ndarray) -> Any:
    return float(x) if np.ndim(x) == 0 else x


@dataclass(frozen=True)
class CostDistribution:
    """Law of the private delegation cost.

    Use the ``uniform``, ``exponential`` and ``logistic`` constructors rather
    than building the record by hand. ``params`` holds the family parameters
    in the order ``(lo, hi)``, ``(rate,)`` or ``(location, scale)``.
    """

    family: Family
    params: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", Family(self.family))
        p = tuple(float(x) for x in self.params)
        object.__setattr__(self, "params", p)
        if not all(math.isfinite(x) for x in p):
            raise ValidationError("cost", f"parameters must be finite, got {p}")
        if self.family is Family.UNIFORM:
            if len(p) != 2 or not p[0] < p[1]:
                raise ValidationError("cost", f"uniform needs lo < hi, got {p}")
        elif self.family is Family.EXPONENTIAL:
            if len(p) != 1 or p[0] <= 0:
                raise ValidationError("cost.rate", f"rate must be > 0, got {p}")
        elif len(p) != 2 or p[1] <= 0:
            raise ValidationError("cost.scale", f"logistic needs scale > 0, got {p}")

    @classmethod
    def uniform(cls, lo: float = 0.0, hi: float = 1.0) -> "CostDistribution":
        return cls(Family.UNIFORM, (lo, hi))

    @classmethod
    def exponential(cls, rate: float = 1.0) -> "CostDistribution":
        return cls(Family.EXPONENTIAL, (rate,))

    @classmethod
    def logistic(cls, location: float = 0.0, scale: float = 1.0) -> "CostDistribution":
        return cls(Family.LOGISTIC, (location, scale))

    @classmethod
    def from_dict(cls, spec: dict) -> "CostDistribution":
        """Build from the scenario-file form, e.g. ``{"family": "uniform", "lo": 0, "hi": 1}``."""
        family = spec.get("family")
        keys = {
            "uniform": ("lo", "hi"),
            "exponential": ("rate",),
            "logistic": ("location", "scale"),
        }
        if family not in keys:
            raise ValidationError("cost.family", f"unknown family {family!r}")
        values = []
        for key in keys[family]:
            if key not in spec:
                raise ValidationError(f"cost.{key}", "missing")
            value = spec[key]
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValidationError(f"cost.{key}", f"expected a number, got {value!r}")
            values.append(float(value))
        return cls(Family(family), tuple(values))

    def to_dict(self) -> dict:
        if self.family is Family.UNIFORM:
            return {"family": "uniform", "lo": self.params[0], "hi": self.params[1]}
        if self.family is Family.EXPONENTIAL:
            return {"family": "exponential", "rate": self.params[0]}
        return {"family": "logistic", "location": self.params[0], "scale": self.params[1]}

    @property
    def support_lo(self) -> float:
        if self.family is Family.UNIFORM:
            return self.params[0]
        if self.family is Family.EXPONENTIAL:
            return 0.0
        return -math.inf

    @property
    def support_hi(self) -> float:
        if self.family is Family.UNIFORM:
            return self.params[1]
        return math.inf

    def cdf(self, c):
        x = np.asarray(c, dtype=float)
        if self.family is Family.UNIFORM:
            lo, hi = self.params
            out = np.clip((x - lo) / (hi - lo), 0.0, 1.0)
        elif self.family is Family.EXPONENTIAL:
            (rate,) = self.params
            out = np.where(x > 0, -np.expm1(-rate * np.maximum(x, 0.0)), 0.0)
        else:
            loc, scale = self.params
            z = (x - loc) / scale
            # numerically stable logistic sigmoid on both tails
            ez = np.exp(-np.abs(z))
            out = np.where(z >= 0, 1.0 / (1.0 + ez), ez / (1.0 + ez))
        return _out(out)

    def pdf(self, c):
        x = np.asarray(c, dtype=float)
        if self.family is Family.UNIFORM:
            lo, hi = self.params
            out = np.where((x >= lo) & (x <= hi), 1.0 / (hi - lo), 0.0)
        elif self.family is Family.EXPONENTIAL:
            (rate,) = self.params
            out = np.where(x >= 0, rate * np.exp(-rate * np.maximum(x, 0.0)), 0.0)
        else:
            loc, scale = self.params
            ez = np.exp(-np.abs((x - loc) / scale))
            out = ez / (scale * (1.0 + ez) ** 2)
        return _out(out)

    def ppf(self, u):
        """Raw inverse CDF, vectorised and without endpoint checks.

        Endpoints map to the (possibly infinite) support bounds. Used by the
        sampler, where a draw of exactly 0 must not abort a whole batch.
        """
        q = np.asarray(u, dtype=float)
        with np.errstate(divide="ignore"):
            if self.family is Family.UNIFORM:
                lo, hi = self.params
                out = lo + q * (hi - lo)
            elif self.family is Family.EXPONENTIAL:
                (rate,) = self.params
                out = -np.log1p(-q) / rate
            else:
                loc, scale = self.params
                out = loc + scale * (np.log(q) - np.log1p(-q))
        return _out(out)

    def quantile(self, u: float) -> float:
        """Smallest cost whose CDF reaches ``u``.

        Raises:
            DomainError: ``u`` outside [0, 1].
            UnboundedQuantile: ``u`` sits at an endpoint whose support bound is infinite.
        """
        u = float(u)
        if not 0.0 <= u <= 1.0:
            raise DomainError(f"quantile level must lie in [0, 1], got {u}")
        if u == 0.0:
            if math.isinf(self.support_lo):
                raise UnboundedQuantile(f"{self.family.value} support is unbounded below")
            return self.support_lo
        if u == 1.0:
            if math.isinf(self.support_hi):
                raise UnboundedQuantile(f"{self.family.value} support is unbounded above")
            return self.support_hi
        return self.ppf(u)


def cdf(d: CostDistribution, c):
    return d.cdf(c)


def pdf(d: CostDistribution, c):
    return d.pdf(c)


def quantile(d: CostDistribution, u: float) -> float:
    return d.quantile(u)
