import numpy as np

from core.state import ModelState


def make_state(user_embeddings, item_embeddings, user_biases=None, item_biases=None, dtype=np.float64) -> ModelState:
    """Explicit parameter tables with fresh accumulators."""
    user_embeddings = np.asarray(user_embeddings, dtype=dtype)
    item_embeddings = np.asarray(item_embeddings, dtype=dtype)
    n_user, n_item = len(user_embeddings), len(item_embeddings)
    user_biases = np.zeros(n_user, dtype) if user_biases is None else np.asarray(user_biases, dtype=dtype)
    item_biases = np.zeros(n_item, dtype) if item_biases is None else np.asarray(item_biases, dtype=dtype)
    return ModelState(
        d=user_embeddings.shape[1],
        user_embeddings=user_embeddings,
        item_embeddings=item_embeddings,
        user_biases=user_biases,
        item_biases=item_biases,
        user_embedding_accumulators=np.ones_like(user_embeddings),
        item_embedding_accumulators=np.ones_like(item_embeddings),
        user_bias_accumulators=np.ones_like(user_biases),
        item_bias_accumulators=np.ones_like(item_biases),
    )
