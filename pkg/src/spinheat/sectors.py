"""Total-spin sector structure of n identical spin-s systems.

The collective dissipator conserves the total-spin quantum number J, so an
ensemble state is summarized by how much weight sits in each J sector.
Multiplicities are exact Python integers (no overflow for any n we care
about); weights coming from thermal product states are evaluated in log
space so deep initial temperatures are safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .special import log_sinh

__all__ = [
    "SpinEnsemble",
    "SectorTable",
    "BlockWeights",
    "sector_multiplicities",
    "log_block_partition_function",
    "block_partition_function",
    "thermal_product_weights",
    "symmetric_weights",
]


@dataclass(frozen=True)
class SpinEnsemble:
    """n identical spins of magnitude s = two_s / 2."""

    n: int
    two_s: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"need at least one spin, got n={self.n}")
        if self.two_s < 1:
            raise ValueError(f"need two_s >= 1, got two_s={self.two_s}")

    @property
    def s(self) -> float:
        return 0.5 * self.two_s

    @property
    def two_j_max(self) -> int:
        """Doubled total spin of the symmetric sector, 2*n*s."""
        return self.n * self.two_s

    @property
    def dim(self) -> int:
        """Product Hilbert-space dimension (2s+1)**n, exact."""
        return (self.two_s + 1) ** self.n


@dataclass(frozen=True)
class SectorTable:
    """Multiplicity l_J of every total-spin sector of an ensemble."""

    ensemble: SpinEnsemble
    multiplicities: dict[int, int]  # two_j -> l_J

    @property
    def two_j_min(self) -> int:
        return min(self.multiplicities)

    @property
    def two_j_max(self) -> int:
        return max(self.multiplicities)

    def dimension_total(self) -> int:
        """sum_J l_J (2J+1); equals ensemble.dim when the table is consistent."""
        return sum(l * (tj + 1) for tj, l in self.multiplicities.items())


@lru_cache(maxsize=None)
def sector_multiplicities(ensemble: SpinEnsemble) -> SectorTable:
    """Sector multiplicities by iterated angular-momentum coupling.

    Couples one spin at a time: a sector (two_j, count) feeds every
    two_j' in |two_j - two_s| .. two_j + two_s (step 2). Integer arithmetic
    throughout, so counts are exact for any n.
    """
    two_s = ensemble.two_s
    counts: dict[int, int] = {two_s: 1}
    for _ in range(ensemble.n - 1):
        nxt: dict[int, int] = {}
        for tj, c in counts.items():
            for tj2 in range(abs(tj - two_s), tj + two_s + 1, 2):
                nxt[tj2] = nxt.get(tj2, 0) + c
        counts = nxt
    return SectorTable(ensemble, dict(sorted(counts.items())))


def log_block_partition_function(two_j: int, b: float) -> float:
    """log Z_J(b), with Z_J(b) = sum_{m=-J..J} e^{-m b} = sinh((J+1/2)b)/sinh(b/2).

    Even in b. Log-space evaluation keeps (J+1/2)|b| in the hundreds finite.
    """
    if two_j < 0:
        raise ValueError("two_j must be >= 0")
    if two_j == 0:
        return 0.0
    half = 0.5 * abs(b)
    if (two_j + 1) * half < 1e-4:
        # series around b = 0: log(2J+1) + b^2 J(J+1)/6
        return math.log(two_j + 1.0) + b * b * two_j * (two_j + 2) / 24.0
    return log_sinh((two_j + 1) * half) - log_sinh(half)


def block_partition_function(two_j: int, b: float) -> float:
    """Partition function Z_J(b) of one spin-J ladder; >= 1, equals 2J+1 at b=0."""
    if two_j == 0:
        return 1.0
    if b == 0.0:
        return float(two_j + 1)
    return math.exp(log_block_partition_function(two_j, b))


@dataclass(frozen=True)
class BlockWeights:
    """Probability weight p_J carried by each total-spin sector.

    Degeneracy-aggregated: every quantity downstream depends on the
    multiplicity copies only through their summed weight.
    """

    ensemble: SpinEnsemble
    weights: dict[int, float]  # two_j -> p_J

    def __post_init__(self):
        ens = self.ensemble
        parity = ens.two_j_max % 2
        total = 0.0
        for tj, p in self.weights.items():
            if ens.n == 1:
                if tj != ens.two_s:
                    raise ValueError(f"single spin has only two_j={ens.two_s}, got {tj}")
            elif tj < 0 or tj > ens.two_j_max or tj % 2 != parity:
                raise ValueError(
                    f"two_j={tj} is not a sector of n={ens.n}, two_s={ens.two_s}"
                )
            if p < 0.0:
                raise ValueError(f"negative sector weight p[{tj}]={p}")
            total += p
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"sector weights must sum to 1, got {total!r}")

    def sorted_items(self) -> list[tuple[int, float]]:
        return sorted(self.weights.items())

    def max_two_j(self) -> int:
        return max(self.weights)


def thermal_product_weights(ensemble: SpinEnsemble, b0: float) -> BlockWeights:
    """Sector weights of the product Gibbs state at initial inverse temperature b0.

    p_J = l_J Z_J(b0) / Z_s(b0)^n, since the product thermal state puts
    population e^{-m b0}/Z_s^n on every ladder level regardless of sector.
    For ensembles prepared deep in a thermal state, |b0| >> 1, the weight
    concentrates on the symmetric sector J = n s.
    """
    table = sector_multiplicities(ensemble)
    log_zs = log_block_partition_function(ensemble.two_s, b0)
    logw = {
        tj: math.log(l) + log_block_partition_function(tj, b0) - ensemble.n * log_zs
        for tj, l in table.multiplicities.items()
    }
    shift = max(logw.values())
    w = {tj: math.exp(lv - shift) for tj, lv in logw.items()}
    norm = sum(w.values())
    return BlockWeights(ensemble, {tj: v / norm for tj, v in w.items()})


def symmetric_weights(ensemble: SpinEnsemble) -> BlockWeights:
    """All weight in the symmetric (maximal-J) sector: the best-case preparation."""
    return BlockWeights(ensemble, {ensemble.two_j_max: 1.0})
