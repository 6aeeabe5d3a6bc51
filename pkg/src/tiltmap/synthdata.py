"""Synthetic layers that preserve a reference layer's spatial autocorrelation.

New per-question layers are produced by permuting the reference layer's
display values over the areas (so the value histogram is identical) and then
hill-climbing on random pairwise swaps until the global Moran's I of the
arrangement is within tolerance of the reference's.  Random restarts handle
stalls; the search is deterministic for a given seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .errors import NoNeighbors, TargetUnreachable, UnknownArea, ZeroVariance
from .geodata import GeoMap
from .thematic import ThematicLayer

_MAX_RESTARTS = 10


@dataclass(eq=False)
class ContiguityWeights:
    """Binary contiguity weights from a map's adjacency, optionally row-standardized."""

    ids: tuple[str, ...]
    matrix: sparse.csr_matrix  # zero diagonal; symmetric before standardization
    row_standardized: bool
    s0: float = field(init=False)

    def __post_init__(self):
        self.s0 = float(self.matrix.sum())

    @classmethod
    def from_map(cls, gm: GeoMap, row_standardize: bool = True) -> "ContiguityWeights":
        ids = gm.ids()
        index = {aid: i for i, aid in enumerate(ids)}
        rows, cols = [], []
        for aid in ids:
            for nb in sorted(gm.neighbors(aid)):
                rows.append(index[aid])
                cols.append(index[nb])
        if not rows:
            raise NoNeighbors("adjacency has no neighbor pairs")
        data = np.ones(len(rows))
        w = sparse.csr_matrix((data, (rows, cols)), shape=(len(ids), len(ids)))
        if row_standardize:
            deg = np.asarray(w.sum(axis=1)).ravel()
            inv = np.divide(1.0, deg, out=np.zeros_like(deg), where=deg > 0)
            w = sparse.diags(inv) @ w
        return cls(ids=ids, matrix=w.tocsr(), row_standardized=row_standardize)

    def align(self, values: dict[str, float]) -> np.ndarray:
        try:
            return np.array([values[aid] for aid in self.ids], dtype=float)
        except KeyError as exc:
            raise UnknownArea(f"values missing area {exc.args[0]!r}") from exc


def _morans_i_vector(z: np.ndarray, weights: ContiguityWeights, ss: float) -> float:
    return len(z) / weights.s0 * float(z @ (weights.matrix @ z)) / ss


def morans_i(values: dict[str, float], weights: ContiguityWeights) -> float:
    """Global Moran's I of the values under the given contiguity weights."""
    x = weights.align(values)
    if len(x) < 2:
        raise ZeroVariance("need at least two areas")
    if weights.s0 <= 0:
        raise NoNeighbors("weights sum to zero")
    z = x - x.mean()
    ss = float(z @ z)
    if ss == 0.0:
        raise ZeroVariance("values have zero variance")
    return _morans_i_vector(z, weights, ss)


@dataclass(frozen=True)
class SynthConfig:
    target_tolerance: float = 0.01
    max_swaps: int = 200_000
    rng_seed: int = 0

    def __post_init__(self):
        if self.target_tolerance <= 0:
            raise ZeroVariance("tolerance must be positive")


@dataclass(frozen=True)
class SynthReport:
    reference_i: float
    achieved_i: float
    swaps_attempted: int
    swaps_accepted: int
    restarts: int

    def to_dict(self) -> dict:
        return {
            "referenceI": self.reference_i,
            "achievedI": self.achieved_i,
            "deltaI": abs(self.achieved_i - self.reference_i),
            "swapsAttempted": self.swaps_attempted,
            "swapsAccepted": self.swaps_accepted,
            "restarts": self.restarts,
        }


def synthesize(
    gm: GeoMap,
    reference: ThematicLayer,
    weights: ContiguityWeights,
    config: SynthConfig = SynthConfig(),
    rng: np.random.Generator | None = None,
) -> tuple[ThematicLayer, SynthReport]:
    """Permute the reference values until Moran's I matches within tolerance.

    Swaps are accepted only when they strictly reduce |I - I_ref|; a stalled
    climb restarts from a fresh random permutation (best arrangement so far
    is kept).  Raises TargetUnreachable once the swap budget is exhausted.
    """
    if rng is None:
        rng = np.random.default_rng(config.rng_seed)
    ref = weights.align(reference.values)
    i_ref = morans_i(reference.values, weights)
    n = len(ref)
    mean = ref.mean()
    ss = float((ref - mean) @ (ref - mean))
    stall_limit = max(2000, 20 * n)

    def current_i(v: np.ndarray) -> float:
        return _morans_i_vector(v - mean, weights, ss)

    best_v: np.ndarray | None = None
    best_delta = np.inf
    attempts = 0
    accepted = 0
    restarts = -1
    while attempts < config.max_swaps and restarts < _MAX_RESTARTS:
        restarts += 1
        v = ref[rng.permutation(n)]
        delta = abs(current_i(v) - i_ref)
        stall = 0
        while attempts < config.max_swaps:
            if delta < best_delta:
                best_delta, best_v = delta, v.copy()
            if delta <= config.target_tolerance:
                layer = ThematicLayer(
                    values={aid: float(val) for aid, val in zip(weights.ids, v)},
                    transform=reference.transform,
                    source_min=reference.source_min,
                    source_max=reference.source_max,
                )
                report = SynthReport(
                    reference_i=i_ref,
                    achieved_i=current_i(v),
                    swaps_attempted=attempts,
                    swaps_accepted=accepted,
                    restarts=restarts,
                )
                return layer, report
            a, b = int(rng.integers(n)), int(rng.integers(n))
            attempts += 1
            if a == b or v[a] == v[b]:
                stall += 1
            else:
                v[a], v[b] = v[b], v[a]
                cand = abs(current_i(v) - i_ref)
                if cand < delta:
                    delta = cand
                    accepted += 1
                    stall = 0
                else:
                    v[a], v[b] = v[b], v[a]
                    stall += 1
            if stall >= stall_limit:
                break
    raise TargetUnreachable(
        f"no arrangement within {config.target_tolerance} of I={i_ref:.4f} "
        f"after {attempts} swaps (best |dI|={best_delta:.5f})",
        best_delta=float(best_delta),
    )
