"""L1 similarity, full ranking against an index, and 1-NN classification.

All distances are computed in exact integer arithmetic on raw counts; ties
are broken by ascending image id so every downstream metric is deterministic.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .config import Descriptor
from .errors import ConfigMismatchError, EmptyIndexError
from .index_store import DatasetIndex


class RankedEntry(NamedTuple):
    image_id: int
    distance: int
    rank: int


def l1_distance(x: Descriptor, y: Descriptor) -> int:
    """Sum of absolute bin differences between two comparable descriptors."""
    if x.config != y.config or len(x) != len(y):
        raise ConfigMismatchError("descriptors were built under different configs")
    return int(np.abs(x.counts.astype(np.int64) - y.counts.astype(np.int64)).sum())


def _check_query(query: Descriptor, index: DatasetIndex) -> None:
    if len(index) == 0:
        raise EmptyIndexError("index has no entries")
    if query.config != index.config or len(query) != index.matrix.shape[1]:
        raise ConfigMismatchError("query was built under a different config")


def rank_all(
    query: Descriptor,
    index: DatasetIndex,
    include_self: bool = False,
    self_id: int | None = None,
) -> list[RankedEntry]:
    """Every index entry ranked by ascending L1 distance to the query.

    With include_self False and self_id given, that entry is left out; the
    leave-one-out protocol instead ranks with include_self True, putting the
    query itself at rank 1.
    """
    _check_query(query, index)
    dists = np.abs(index.matrix - query.counts.astype(np.int64)).sum(axis=1)
    ids = np.arange(len(index))
    if not include_self and self_id is not None:
        keep = ids != self_id
        ids, dists = ids[keep], dists[keep]
    order = np.lexsort((ids, dists))
    return [
        RankedEntry(int(ids[j]), int(dists[j]), rank)
        for rank, j in enumerate(order, start=1)
    ]


def nn_classify(query: Descriptor, gallery: DatasetIndex) -> int:
    """Label of the nearest gallery entry (the query is never in the gallery)."""
    ranked = rank_all(query, gallery, include_self=True)
    return int(gallery.labels[ranked[0].image_id])
