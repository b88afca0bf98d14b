from .state import ModelState, Representation, init_embeddings, DEFAULT_DTYPE, INITIAL_ACCUMULATOR
from .prediction import (
    sigmoid, combine_features, predict, predict_pairs, entity_representations,
    user_representations, item_representations, raw_score, scalar_sigmoid,
)
from .serialization import save_model, load_model, dump_feature_mapping, MAGIC, FORMAT_VERSION

__all__ = [
    "ModelState", "Representation", "init_embeddings", "DEFAULT_DTYPE", "INITIAL_ACCUMULATOR",
    "sigmoid", "combine_features", "predict", "predict_pairs", "entity_representations",
    "user_representations", "item_representations", "raw_score", "scalar_sigmoid",
    "save_model", "load_model", "dump_feature_mapping", "MAGIC", "FORMAT_VERSION",
]
