"""Random projection trees split at the median projection.

Each split sends exactly ceil(n/2) points left and floor(n/2) right, so
leaf sizes are guaranteed. Points whose projection equals the threshold
may sit on either side when values repeat. A query that lands exactly on
a threshold descends both children, so its candidates are a superset of
the leaf the build rule (ties go left) alone would reach, and every point
can find itself.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from utils.exceptions import ValidationError
from utils.validators import require_positive_int
from .similarity import cosine_to_all, rank_by_similarity


@dataclass
class RPLeaf:
    indices: np.ndarray


@dataclass
class RPNode:
    hyperplane: np.ndarray
    threshold: float
    left: Union['RPNode', RPLeaf]
    right: Union['RPNode', RPLeaf]
    n_left: int
    n_right: int


@dataclass
class RPTree:
    root: Union[RPNode, RPLeaf]
    points: np.ndarray
    leaf_capacity: int

    def leaves(self) -> List[RPLeaf]:
        found, stack = [], [self.root]
        while stack:
            node = stack.pop()
            if isinstance(node, RPLeaf):
                found.append(node)
            else:
                stack.extend((node.right, node.left))
        return found

    def nodes(self) -> List[RPNode]:
        found, stack = [], [self.root]
        while stack:
            node = stack.pop()
            if isinstance(node, RPNode):
                found.append(node)
                stack.extend((node.right, node.left))
        return found

    def candidates(self, q: np.ndarray) -> np.ndarray:
        q = np.asarray(q, dtype=np.float64)
        collected, stack = [], [self.root]
        while stack:
            node = stack.pop()
            if isinstance(node, RPLeaf):
                collected.append(node.indices)
                continue
            projection = float(_project(q, node.hyperplane))
            if projection <= node.threshold:
                stack.append(node.left)
            if projection >= node.threshold:
                stack.append(node.right)
        return np.unique(np.concatenate(collected))


def _project(points: np.ndarray, hyperplane: np.ndarray) -> np.ndarray:
    # shared by build and query: a stored point must reproduce its own projection exactly
    return np.sum(points * hyperplane, axis=-1)


def _random_direction(rng: np.random.Generator, d: int) -> np.ndarray:
    while True:
        direction = rng.standard_normal(d)
        if np.any(direction):
            return direction


def build_rp_tree(points, leaf_capacity: int, seed: Optional[int] = None) -> RPTree:
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or len(points) == 0:
        raise ValidationError("An RP tree needs a non-empty 2-D array of points")
    require_positive_int(leaf_capacity, 'leaf_capacity')
    rng = np.random.default_rng(seed)

    def _build(indices: np.ndarray) -> Union[RPNode, RPLeaf]:
        if len(indices) <= leaf_capacity:
            return RPLeaf(indices)
        hyperplane = _random_direction(rng, points.shape[1])
        projections = _project(points[indices], hyperplane)
        order = np.argsort(projections, kind='stable')
        n_left = (len(indices) + 1) // 2
        threshold = float(projections[order[n_left - 1]])
        left, right = indices[order[:n_left]], indices[order[n_left:]]
        return RPNode(hyperplane, threshold, _build(left), _build(right), len(left), len(right))

    return RPTree(_build(np.arange(len(points))), points, leaf_capacity)


@dataclass
class RPForest:
    trees: List[RPTree]

    @classmethod
    def build(cls, points, n_trees: int = 20, leaf_capacity: int = 256, seed: int = 0) -> 'RPForest':
        require_positive_int(n_trees, 'n_trees')
        return cls([build_rp_tree(points, leaf_capacity, seed=[seed, t]) for t in range(n_trees)])

    def query(self, q, k: int, exclude: Optional[int] = None) -> List[Tuple[int, float]]:
        return query(self.trees, q, k, exclude=exclude)


def query(trees: Sequence[RPTree], q, k: int, exclude: Optional[int] = None) -> List[Tuple[int, float]]:
    """Union the leaves `q` reaches in every tree, then rerank by exact cosine."""
    if not trees:
        raise ValidationError("Query needs at least one tree")
    require_positive_int(k, 'k')
    q = np.asarray(q, dtype=np.float64)
    ids = np.unique(np.concatenate([tree.candidates(q) for tree in trees]))
    if exclude is not None:
        ids = ids[ids != exclude]
    if len(ids) == 0:
        return []
    sims = cosine_to_all(trees[0].points[ids], q)
    return rank_by_similarity(ids, sims, k)
