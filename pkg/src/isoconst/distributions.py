"""Coordinate laws for the random point models.

All three kinds are centered with unit variance: standard normal
coordinates, Rademacher signs, and the uniform law on [-sqrt(3), sqrt(3)].
Matrices of i.i.d. draws are produced by a counter-based (Philox) stream,
so a fixed (kind, rows, cols, seed) tuple always yields the same bits.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import SizeError

SQRT3 = math.sqrt(3.0)

# rows * cols guard for a single sample matrix
MAX_CELLS = 2**31

# 99% two-sided normal quantile, used for the condition-report intervals
Z99 = float(special.ndtri(0.995))

_SEED_MASK = 2**64 - 1


class DistributionSpec(enum.Enum):
    """The supported coordinate laws, keyed by their CLI names."""

    GAUSSIAN = "gaussian"
    RADEMACHER = "rademacher"
    UNIFORM = "uniform"

    @classmethod
    def from_name(cls, name):
        try:
            return cls(str(name).lower())
        except ValueError:
            known = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown distribution {name!r} (known: {known})") from None

    @property
    def fourth_moment(self):
        """Exact E X^4 of the law."""
        return {
            DistributionSpec.GAUSSIAN: 3.0,
            DistributionSpec.RADEMACHER: 1.0,
            DistributionSpec.UNIFORM: 9.0 / 5.0,
        }[self]

    @property
    def exp_square_moment(self):
        """Exact E exp(X^2 / 10), the sub-gaussian certificate value.

        Gaussian: (1 - 2/10)^(-1/2).  Rademacher: e^(1/10).  Uniform on
        [-sqrt(3), sqrt(3)]: sqrt(10 pi) erfi(sqrt(3/10)) / (2 sqrt(3)).
        """
        if self is DistributionSpec.GAUSSIAN:
            return 1.0 / math.sqrt(0.8)
        if self is DistributionSpec.RADEMACHER:
            return math.exp(0.1)
        return math.sqrt(10.0 * math.pi) * float(special.erfi(math.sqrt(0.3))) / (2.0 * SQRT3)


@dataclass(frozen=True)
class SampleMatrix:
    """A rows x cols matrix of i.i.d. coordinates plus its seed."""

    data: np.ndarray
    seed: int
    kind: DistributionSpec

    @property
    def rows(self):
        return self.data.shape[0]

    @property
    def cols(self):
        return self.data.shape[1]


@dataclass(frozen=True)
class ConditionReport:
    """Empirical check of the centering, variance and exponential-moment
    requirements on a coordinate law (99% normal-approximation intervals)."""

    kind: str
    samples: int
    mean: float
    mean_ci: tuple
    variance: float
    variance_ci: tuple
    exp_moment: float
    exp_moment_ci: tuple
    mean_ok: bool
    variance_ok: bool
    exp_moment_ok: bool

    @property
    def passed(self):
        return self.mean_ok and self.variance_ok and self.exp_moment_ok

    def to_dict(self):
        return {
            "kind": self.kind,
            "samples": self.samples,
            "mean": self.mean,
            "mean_ci": list(self.mean_ci),
            "variance": self.variance,
            "variance_ci": list(self.variance_ci),
            "exp_moment": self.exp_moment,
            "exp_moment_ci": list(self.exp_moment_ci),
            "mean_ok": self.mean_ok,
            "variance_ok": self.variance_ok,
            "exp_moment_ok": self.exp_moment_ok,
            "passed": self.passed,
        }


def _rng(seed, *extra):
    """Philox generator keyed by the seed (and optional extra words)."""
    words = [int(seed) & _SEED_MASK] + [int(x) & _SEED_MASK for x in extra]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(words)))


def _draw(spec, rng, shape):
    if spec is DistributionSpec.GAUSSIAN:
        return rng.standard_normal(shape)
    if spec is DistributionSpec.RADEMACHER:
        return 2.0 * rng.integers(0, 2, size=shape) - 1.0
    return rng.uniform(-SQRT3, SQRT3, size=shape)


def sample_matrix(spec, rows, cols, seed):
    """Draw a rows x cols matrix of i.i.d. coordinates from `spec`.

    Pure function of its arguments: the Philox stream is keyed by the
    seed alone and filled in row-major order in a single pass.
    """
    rows, cols = int(rows), int(cols)
    if rows < 1 or cols < 1:
        raise SizeError(f"need rows, cols >= 1, got {rows} x {cols}")
    if rows * cols > MAX_CELLS:
        raise SizeError(f"{rows} x {cols} exceeds the {MAX_CELLS} cell limit")
    data = _draw(spec, _rng(seed), (rows, cols))
    return SampleMatrix(data=data, seed=int(seed), kind=spec)


def validate_star_conditions(spec, m, seed):
    """Empirically verify mean 0, variance 1 and E exp(X^2/10) <= 10.

    Requires m >= 10^4 draws; always returns a report, never raises on a
    failed check.
    """
    m = int(m)
    if m < 10**4:
        raise ValueError(f"need at least 10^4 samples for the report, got {m}")
    x = _draw(spec, _rng(seed, 0x5747), m)

    mean = float(x.mean())
    se_mean = float(x.std(ddof=1)) / math.sqrt(m)
    mean_ci = (mean - Z99 * se_mean, mean + Z99 * se_mean)

    var = float(x.var(ddof=1))
    # normal-approximation se of the sample variance
    m4 = float(np.mean((x - mean) ** 4))
    se_var = math.sqrt(max(m4 - var**2, 0.0) / m)
    var_ci = (var - Z99 * se_var, var + Z99 * se_var)

    e = np.exp(x**2 / 10.0)
    expm = float(e.mean())
    se_exp = float(e.std(ddof=1)) / math.sqrt(m)
    exp_ci = (expm - Z99 * se_exp, expm + Z99 * se_exp)

    return ConditionReport(
        kind=spec.value,
        samples=m,
        mean=mean,
        mean_ci=mean_ci,
        variance=var,
        variance_ci=var_ci,
        exp_moment=expm,
        exp_moment_ci=exp_ci,
        mean_ok=mean_ci[0] <= 0.0 <= mean_ci[1],
        variance_ok=var_ci[0] <= 1.0 <= var_ci[1],
        exp_moment_ok=exp_ci[1] <= 10.0,
    )
