"""LSI-UP: SVD of user profiles built from the content of positively rated items."""

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp
from sklearn.preprocessing import normalize

from data.models import InteractionSet
from utils.exceptions import ValidationError
from utils.logging_config import get_logger
from .svd import LatentFactorization, truncated_svd

logger = get_logger('baselines.lsi_up')


@dataclass
class LsiUpModel:
    factorization: LatentFactorization
    user_latents: np.ndarray
    item_latents: np.ndarray

    @property
    def feature_latents(self) -> np.ndarray:
        return self.factorization.right

    @property
    def d(self) -> int:
        return self.factorization.d

    def project(self, item_features) -> np.ndarray:
        return np.asarray(sp.csr_matrix(item_features) @ self.feature_latents)

    def score(self, users, items) -> np.ndarray:
        users = np.asarray(users, dtype=np.int64)
        items = np.asarray(items, dtype=np.int64)
        return np.einsum('ij,ij->i', self.user_latents[users], self.item_latents[items])


def user_profile_matrix(item_features, positives: InteractionSet, n_users: int) -> sp.csr_matrix:
    """Row u is the sum of the feature rows of the items u interacted positively with."""
    item_features = sp.csr_matrix(item_features, dtype=np.float64)
    membership = sp.csr_matrix(
        (np.ones(len(positives)), (positives.users, positives.items)),
        shape=(n_users, item_features.shape[0])
    )
    return sp.csr_matrix(membership @ item_features)


def train_lsi_up(
    item_features,
    train: InteractionSet,
    d: int,
    n_users: Optional[int] = None,
    seed: int = 0
) -> LsiUpModel:
    """Profiles are L2-normalised per user before the SVD.

    User latents are the left singular vectors; users without positives
    keep a zero profile and a zero latent, so they score every item 0.
    """
    item_features = sp.csr_matrix(item_features, dtype=np.float64)
    if len(train) and train.items.max() >= item_features.shape[0]:
        raise ValidationError("Training interactions reference items without a feature row")
    n_users = n_users if n_users is not None else (int(train.users.max()) + 1 if len(train) else 0)

    profiles = normalize(user_profile_matrix(item_features, train.positives, n_users), norm='l2', axis=1)
    factorization = truncated_svd(profiles, d, seed=seed)
    user_latents = factorization.left.copy()
    user_latents[profiles.getnnz(axis=1) == 0] = 0.0
    item_latents = np.asarray(item_features @ factorization.right)

    logger.info("Fitted LSI-UP", extra={'users': n_users, 'd': d})
    return LsiUpModel(factorization=factorization, user_latents=user_latents, item_latents=item_latents)
