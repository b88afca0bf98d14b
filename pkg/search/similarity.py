from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

import numpy as np

from core.prediction import entity_representations
from core.state import ModelState
from data.models import EntityIndex, FeatureMapping
from utils.exceptions import SearchError, ValidationError

Query = Union[int, str]


def cosine_similarity(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    norm_a, norm_b = np.linalg.norm(a), np.linalg.norm(b)
    if norm_a == 0.0 or norm_b == 0.0:
        raise SearchError("Cosine similarity is undefined for a zero vector")
    return float(np.clip(a @ b / (norm_a * norm_b), -1.0, 1.0))


def cosine_to_all(vectors: np.ndarray, query: np.ndarray) -> np.ndarray:
    """Cosine of `query` against every row; zero rows score 0."""
    query_norm = np.linalg.norm(query)
    if query_norm == 0.0:
        raise SearchError("Cannot search with a zero query vector")
    norms = np.linalg.norm(vectors, axis=1) * query_norm
    dots = vectors @ query
    sims = np.divide(dots, norms, out=np.zeros_like(dots), where=norms > 0)
    return np.clip(sims, -1.0, 1.0)


def rank_by_similarity(ids: np.ndarray, sims: np.ndarray, k: int) -> List[Tuple[int, float]]:
    """Top-k by (similarity desc, id asc)."""
    order = np.lexsort((ids, -sims))[:k]
    return [(int(ids[j]), float(sims[j])) for j in order]


@dataclass
class EmbeddingTable:
    names: EntityIndex
    vectors: np.ndarray

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        if self.vectors.ndim != 2 or len(self.vectors) != len(self.names):
            raise ValidationError("Embedding table needs one vector per name")

    @classmethod
    def from_features(cls, model: ModelState, mapping: FeatureMapping, side: str = 'item') -> 'EmbeddingTable':
        """Raw feature embeddings (e.g. tags), for feature-to-feature similarity."""
        return cls(mapping.features(side).copy(), model.embeddings(side))

    @classmethod
    def from_entities(cls, model: ModelState, mapping: FeatureMapping, side: str = 'item') -> 'EmbeddingTable':
        """Summed entity representations, for related-item queries."""
        latents, _ = entity_representations(model, mapping, side)
        return cls(mapping.entities(side).copy(), latents)

    def resolve(self, query: Query) -> int:
        if isinstance(query, (int, np.integer)):
            if not 0 <= query < len(self.names):
                raise SearchError(f"Query index {query} outside a table of {len(self.names)}")
            return int(query)
        if query not in self.names:
            raise SearchError(f"Unknown query {query!r}", details={'query': str(query)})
        return self.names.index(query)

    def __len__(self) -> int:
        return len(self.names)


def top_k_exact(table: EmbeddingTable, query: Query, k: int) -> List[Tuple[int, float]]:
    """The k most cosine-similar rows to `query`, excluding the query itself."""
    index = table.resolve(query)
    if not 1 <= k < len(table):
        raise ValidationError(f"k must be in [1, {len(table) - 1}]", field_name='k', field_value=k)
    sims = cosine_to_all(table.vectors, table.vectors[index])
    ids = np.arange(len(table))
    keep = ids != index
    return rank_by_similarity(ids[keep], sims[keep], k)


def named(table: EmbeddingTable, results: Sequence[Tuple[int, float]]) -> List[Tuple[str, float]]:
    return [(table.names.name(i), sim) for i, sim in results]
