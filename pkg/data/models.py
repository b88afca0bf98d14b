from dataclasses import dataclass, field, asdict
from typing import Optional, List, Dict, Any, Iterable, Iterator, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from utils.exceptions import ValidationError
from utils.tables import write_table
from utils.validators import require_same_length, require_side

POSITIVE = 1
NEGATIVE = 0


class EntityIndex:
    """Ordered bijection between names and dense indices 0..n-1."""

    def __init__(self, names: Iterable[str] = ()):
        self._names: List[str] = []
        self._index: Dict[str, int] = {}
        for name in names:
            self.add(name)

    def add(self, name: str) -> int:
        name = str(name)
        if name in self._index:
            raise ValidationError(f"Duplicate name: {name!r}", field_name='name', field_value=name)
        self._index[name] = len(self._names)
        self._names.append(name)
        return self._index[name]

    def get_or_add(self, name: str) -> int:
        name = str(name)
        idx = self._index.get(name)
        return self.add(name) if idx is None else idx

    def index(self, name: str) -> int:
        try:
            return self._index[str(name)]
        except KeyError:
            raise ValidationError(f"Unknown name: {name!r}", field_name='name', field_value=name) from None

    def name(self, index: int) -> str:
        return self._names[index]

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(self._names)

    def copy(self) -> 'EntityIndex':
        return EntityIndex(self._names)

    def __len__(self) -> int:
        return len(self._names)

    def __contains__(self, name: object) -> bool:
        return str(name) in self._index

    def __iter__(self) -> Iterator[str]:
        return iter(self._names)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, EntityIndex) and self._names == other._names

    def __repr__(self) -> str:
        return f"EntityIndex(n={len(self._names)})"


class InteractionSet:
    """Labelled (user, item, label) triples over dense entity indices."""

    def __init__(self, users: Sequence[int], items: Sequence[int], labels: Sequence[int]):
        self.users = np.asarray(users, dtype=np.int64).reshape(-1)
        self.items = np.asarray(items, dtype=np.int64).reshape(-1)
        self.labels = np.asarray(labels, dtype=np.int8).reshape(-1)

        require_same_length(self.users, self.items, self.labels, names=("users", "items", "labels"))
        if len(self.labels) and not np.isin(self.labels, (NEGATIVE, POSITIVE)).all():
            raise ValidationError("labels must be 0 (negative) or 1 (positive)")
        if len(self.users) and (self.users.min() < 0 or self.items.min() < 0):
            raise ValidationError("entity indices must be non-negative")
        self._check_conflicts()

    def _check_conflicts(self) -> None:
        if len(self) < 2:
            return
        labelled = np.unique(np.stack([self.users, self.items, self.labels.astype(np.int64)], axis=1), axis=0)
        pairs = np.unique(labelled[:, :2], axis=0)
        if len(pairs) != len(labelled):
            raise ValidationError("Interaction set contains a (user, item) pair with conflicting labels")

    @classmethod
    def from_triples(cls, triples: Iterable[Tuple[int, int, int]]) -> 'InteractionSet':
        triples = list(triples)
        if not triples:
            return cls.empty()
        users, items, labels = zip(*triples)
        return cls(users, items, labels)

    @classmethod
    def empty(cls) -> 'InteractionSet':
        return cls(np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0, np.int8))

    @classmethod
    def concat(cls, parts: Sequence['InteractionSet']) -> 'InteractionSet':
        parts = [p for p in parts if len(p)]
        if not parts:
            return cls.empty()
        return cls(
            np.concatenate([p.users for p in parts]),
            np.concatenate([p.items for p in parts]),
            np.concatenate([p.labels for p in parts])
        )

    def subset(self, indices: Sequence[int]) -> 'InteractionSet':
        indices = np.asarray(indices, dtype=np.int64)
        return InteractionSet(self.users[indices], self.items[indices], self.labels[indices])

    @property
    def positives(self) -> 'InteractionSet':
        return self.subset(np.flatnonzero(self.labels == POSITIVE))

    @property
    def negatives(self) -> 'InteractionSet':
        return self.subset(np.flatnonzero(self.labels == NEGATIVE))

    def pair_keys(self) -> set:
        return set(zip(self.users.tolist(), self.items.tolist()))

    def triples(self) -> Iterator[Tuple[int, int, int]]:
        return zip(self.users.tolist(), self.items.tolist(), self.labels.tolist())

    def __len__(self) -> int:
        return len(self.labels)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, InteractionSet)
            and np.array_equal(self.users, other.users)
            and np.array_equal(self.items, other.items)
            and np.array_equal(self.labels, other.labels)
        )

    def __repr__(self) -> str:
        return f"InteractionSet(n={len(self)}, positives={int(self.labels.sum())})"


@dataclass
class FeatureMapping:
    """Feature vocabularies plus the feature set f_u / f_i of every user and item."""

    user_features: EntityIndex
    item_features: EntityIndex
    users: EntityIndex
    items: EntityIndex
    user_feature_lists: List[np.ndarray]
    item_feature_lists: List[np.ndarray]

    def __post_init__(self):
        self.user_feature_lists = [np.unique(np.asarray(f, dtype=np.int64)) for f in self.user_feature_lists]
        self.item_feature_lists = [np.unique(np.asarray(f, dtype=np.int64)) for f in self.item_feature_lists]
        self.validate()

    @classmethod
    def build(
        cls,
        user_ids: Sequence[str],
        item_ids: Sequence[str],
        user_feature_names: Sequence[Sequence[str]],
        item_feature_names: Sequence[Sequence[str]]
    ) -> 'FeatureMapping':
        """Build vocabularies in order of first appearance."""
        user_features, item_features = EntityIndex(), EntityIndex()
        user_lists = [[user_features.get_or_add(n) for n in names] for names in user_feature_names]
        item_lists = [[item_features.get_or_add(n) for n in names] for names in item_feature_names]
        return cls(user_features, item_features, EntityIndex(user_ids), EntityIndex(item_ids), user_lists, item_lists)

    def validate(self) -> None:
        for side in ('user', 'item'):
            entities, lists, n_features = self.entities(side), self.feature_lists(side), self.n_features(side)
            if len(lists) != len(entities):
                raise ValidationError(f"{side} feature lists do not match the {side} vocabulary")
            for idx, features in enumerate(lists):
                if features.size == 0:
                    raise ValidationError(
                        f"{side} {entities.name(idx)!r} has an empty feature set",
                        field_name=f"{side}_features", field_value=entities.name(idx)
                    )
                if features[0] < 0 or features[-1] >= n_features:
                    raise ValidationError(f"{side} {entities.name(idx)!r} references an unknown feature")

    def features(self, side: str) -> EntityIndex:
        return self.user_features if require_side(side) == 'user' else self.item_features

    def entities(self, side: str) -> EntityIndex:
        return self.users if require_side(side) == 'user' else self.items

    def feature_lists(self, side: str) -> List[np.ndarray]:
        return self.user_feature_lists if require_side(side) == 'user' else self.item_feature_lists

    def n_features(self, side: str) -> int:
        return len(self.features(side))

    def feature_set(self, side: str, entity: int) -> np.ndarray:
        return self.feature_lists(side)[entity]

    def add_features(self, side: str, names: Sequence[str]) -> List[int]:
        vocabulary = self.features(side)
        duplicates = [n for n in names if n in vocabulary]
        if duplicates or len(set(names)) != len(names):
            raise ValidationError(f"Features already mapped: {duplicates or list(names)}", field_name='feature_names')
        return [vocabulary.add(n) for n in names]

    def add_entity(self, side: str, entity_id: str, feature_names: Sequence[str]) -> int:
        """Register a new user/item described only by already-known features."""
        vocabulary = self.features(side)
        indices = [vocabulary.index(n) for n in feature_names]
        if not indices:
            raise ValidationError(f"New {side} {entity_id!r} needs at least one feature")
        entity = self.entities(side).add(entity_id)
        self.feature_lists(side).append(np.unique(np.asarray(indices, dtype=np.int64)))
        return entity

    def indicator_matrix(self, side: str) -> sp.csr_matrix:
        """Binary entity x feature matrix (rows are f_u / f_i memberships)."""
        lists = self.feature_lists(side)
        indptr = np.zeros(len(lists) + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([len(f) for f in lists])
        indices = np.concatenate(lists) if lists else np.empty(0, np.int64)
        data = np.ones(len(indices), dtype=np.float64)
        return sp.csr_matrix((data, indices, indptr), shape=(len(lists), self.n_features(side)))

    def dump(self, side: str) -> List[str]:
        return [f"{idx}\t{name}" for idx, name in enumerate(self.features(side))]

    def copy(self) -> 'FeatureMapping':
        return FeatureMapping(
            self.user_features.copy(), self.item_features.copy(), self.users.copy(), self.items.copy(),
            [f.copy() for f in self.user_feature_lists], [f.copy() for f in self.item_feature_lists]
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "user_features": list(self.user_features.names),
            "item_features": list(self.item_features.names),
            "users": list(self.users.names),
            "items": list(self.items.names),
            "user_feature_lists": [f.tolist() for f in self.user_feature_lists],
            "item_feature_lists": [f.tolist() for f in self.item_feature_lists],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'FeatureMapping':
        return cls(
            EntityIndex(data["user_features"]), EntityIndex(data["item_features"]),
            EntityIndex(data["users"]), EntityIndex(data["items"]),
            data["user_feature_lists"], data["item_feature_lists"]
        )

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FeatureMapping) and self.to_dict() == other.to_dict()


@dataclass
class RawRating:
    user_id: str
    item_id: str
    rating: float
    timestamp: int = 0

    def __post_init__(self):
        if not 0.5 <= self.rating <= 5.0:
            raise ValidationError(f"Rating {self.rating} outside the 0.5-5.0 scale", field_name='rating', field_value=self.rating)


@dataclass
class TagAssignment:
    item_id: str
    tag: str
    relevance: float

    def __post_init__(self):
        if not 0.0 <= self.relevance <= 1.0:
            raise ValidationError(
                f"Relevance {self.relevance} for tag {self.tag!r} outside [0, 1]",
                field_name='relevance', field_value=self.relevance
            )


@dataclass
class RecommendationDataset:
    name: str
    interactions: InteractionSet
    users: EntityIndex
    items: EntityIndex
    item_tags: List[List[str]]
    user_tokens: Optional[List[List[str]]] = None
    # planted tag -> group assignment, synthetic fixtures only
    tag_groups: Optional[Dict[str, int]] = None

    def __post_init__(self):
        if len(self.item_tags) != len(self.items):
            raise ValidationError("item_tags must list the tags of every item")
        if self.user_tokens is not None and len(self.user_tokens) != len(self.users):
            raise ValidationError("user_tokens must list the tokens of every user")
        if len(self.interactions) and (
            self.interactions.users.max() >= len(self.users) or self.interactions.items.max() >= len(self.items)
        ):
            raise ValidationError("interactions reference users or items outside the dataset")

    @property
    def has_user_features(self) -> bool:
        return self.user_tokens is not None

    def summary(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "users": len(self.users),
            "items": len(self.items),
            "interactions": len(self.interactions),
            "positives": int(self.interactions.labels.sum()),
            "tags": len({t for tags in self.item_tags for t in tags}),
        }


SPLIT_KINDS = ('warm', 'cold')


@dataclass
class DatasetSplit:
    train: InteractionSet
    validation: InteractionSet
    test: InteractionSet
    kind: str
    seed: int

    def __post_init__(self):
        if self.kind not in SPLIT_KINDS:
            raise ValidationError(f"Unknown split kind {self.kind!r}", field_name='kind', field_value=self.kind)

    def check_disjoint(self) -> None:
        train, validation, test = self.train.pair_keys(), self.validation.pair_keys(), self.test.pair_keys()
        if train & validation or train & test or validation & test:
            raise ValidationError("Split parts overlap")
        if self.kind == 'cold' and np.intersect1d(self.train.items, self.test.items).size:
            raise ValidationError("Cold split leaks test items into training")

    def __len__(self) -> int:
        return len(self.train) + len(self.validation) + len(self.test)


@dataclass
class EpochRecord:
    epoch: int
    log_likelihood: float
    validation_auc: float


@dataclass
class TrainingHistory:
    records: List[EpochRecord] = field(default_factory=list)
    best_epoch: Optional[int] = None
    stopped_early: bool = False

    def append(self, epoch: int, log_likelihood: float, validation_auc: float) -> None:
        self.records.append(EpochRecord(epoch, log_likelihood, validation_auc))

    @property
    def best_auc(self) -> Optional[float]:
        if self.best_epoch is None:
            return None
        return next(r.validation_auc for r in self.records if r.epoch == self.best_epoch)

    def rows(self) -> List[Tuple[int, float, float]]:
        return [(r.epoch, r.log_likelihood, r.validation_auc) for r in self.records]

    def to_table(self, destination) -> None:
        write_table(self.rows(), destination, header=("epoch", "loglik", "val_auc"))

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def __len__(self) -> int:
        return len(self.records)


@dataclass
class ExperimentReport:
    model: str
    dataset: str
    split_kind: str
    aucs: List[float]
    seeds: List[int]
    latent_dim: Optional[int] = None

    @property
    def mean(self) -> float:
        return float(np.mean(self.aucs))

    @property
    def std(self) -> float:
        return float(np.std(self.aucs, ddof=1)) if len(self.aucs) > 1 else 0.0

    def to_dict(self) -> Dict[str, Any]:
        result = asdict(self)
        result.update(mean=self.mean, std=self.std)
        return result
