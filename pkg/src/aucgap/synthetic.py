"""Binormal synthetic cohorts with known per-group AUC.

Negatives score ``N(0, 1)`` and positives ``N(d', 1)``, so the population AUC
of a group is ``Phi(d' / sqrt(2))``.

Variates come from inverse-CDF sampling over a counter-based stream: each
group gets a Philox-4x64 generator keyed by a child of ``SeedSequence(seed)``,
53-bit integers ``k`` are mapped to ``u = (k + 0.5) / 2**53`` (never 0 or 1)
and then to ``Phi^-1(u)``. ``Phi`` and ``Phi^-1`` are the Cephes ``ndtr`` /
``ndtri`` routines (rational approximations, double precision).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike
from scipy import special

from aucgap.exceptions import ConfigError
from aucgap.grouping import EvaluationRecord

__all__ = [
    "GroupRecipe",
    "binormal_auc",
    "generate",
    "norm_cdf",
    "norm_ppf",
    "uniform_stream",
]

GROUP_ATTRIBUTE = "group"
_TWO_53 = float(2**53)


def norm_cdf(x: ArrayLike):
    """Standard normal CDF."""
    return special.ndtr(x)


def norm_ppf(p: ArrayLike):
    """Inverse of :func:`norm_cdf` on (0, 1)."""
    return special.ndtri(p)


def binormal_auc(d_prime: float) -> float:
    return float(norm_cdf(d_prime / math.sqrt(2.0)))


@dataclass(frozen=True)
class GroupRecipe:
    name: str
    n_pos: int
    n_neg: int
    d_prime: float

    def __post_init__(self):
        if self.n_pos < 1 or self.n_neg < 1:
            raise ConfigError(f"recipe {self.name!r}: n_pos and n_neg must be >= 1")
        if not math.isfinite(self.d_prime) or self.d_prime < 0:
            raise ConfigError(f"recipe {self.name!r}: d_prime must be finite and >= 0")

    @property
    def theoretical_auc(self) -> float:
        return binormal_auc(self.d_prime)


def uniform_stream(seed_seq: np.random.SeedSequence, n: int) -> np.ndarray:
    """``n`` uniforms strictly inside (0, 1) from a Philox stream."""
    rng = np.random.Generator(np.random.Philox(seed_seq))
    k = rng.integers(0, 2**53, size=n, dtype=np.uint64)
    return (k.astype(np.float64) + 0.5) / _TWO_53


def generate(recipes: Sequence[GroupRecipe], seed: int = 0) -> list[EvaluationRecord]:
    """Records for every recipe, in recipe order, positives before negatives.

    Each record carries ``attributes={"group": recipe.name}``. Output is
    bit-identical for identical ``(recipes, seed)``.
    """
    names = [r.name for r in recipes]
    if len(set(names)) != len(names):
        raise ConfigError("recipe group names must be unique")
    children = np.random.SeedSequence(seed).spawn(len(recipes))
    records: list[EvaluationRecord] = []
    for recipe, child in zip(recipes, children):
        z = norm_ppf(uniform_stream(child, recipe.n_pos + recipe.n_neg))
        pos = z[: recipe.n_pos] + recipe.d_prime
        neg = z[recipe.n_pos :]
        attrs = MappingProxyType({GROUP_ATTRIBUTE: recipe.name})
        records.extend(EvaluationRecord(float(s), True, attrs) for s in pos)
        records.extend(EvaluationRecord(float(s), False, attrs) for s in neg)
    return records
