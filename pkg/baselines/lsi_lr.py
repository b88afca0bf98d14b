"""LSI-LR: items projected onto SVD topics, then one logistic regression per user."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
import scipy.sparse as sp
from sklearn.linear_model import LogisticRegression

from data.models import InteractionSet
from utils.exceptions import ValidationError
from utils.logging_config import get_logger
from .svd import LatentFactorization, truncated_svd

REGULARIZATION_C = 1.0
BASE_RATE_CLIP = 1e-3

logger = get_logger('baselines.lsi_lr')


@dataclass
class LsiLrModel:
    factorization: LatentFactorization
    item_topics: np.ndarray
    weights: np.ndarray
    biases: np.ndarray

    @property
    def d(self) -> int:
        return self.factorization.d

    def project(self, item_features) -> np.ndarray:
        """Topic coordinates of arbitrary item-feature rows (e.g. items unseen in training)."""
        return np.asarray(sp.csr_matrix(item_features) @ self.factorization.right)

    def score(self, users, items) -> np.ndarray:
        users = np.asarray(users, dtype=np.int64)
        items = np.asarray(items, dtype=np.int64)
        return np.einsum('ij,ij->i', self.weights[users], self.item_topics[items]) + self.biases[users]


def prior_log_odds(labels: np.ndarray) -> float:
    rate = float(np.clip(np.mean(labels), BASE_RATE_CLIP, 1.0 - BASE_RATE_CLIP))
    return float(np.log(rate / (1.0 - rate)))


def user_objective(weights: np.ndarray, bias: float, topics: np.ndarray, labels: np.ndarray, C: float = REGULARIZATION_C) -> float:
    """0.5 ||w||^2 + C * sum of log-losses; the intercept is not penalised."""
    margins = topics @ weights + bias
    signs = np.where(labels == 1, 1.0, -1.0)
    return float(0.5 * weights @ weights + C * np.logaddexp(0.0, -signs * margins).sum())


def fit_user(topics: np.ndarray, labels: np.ndarray, C: float = REGULARIZATION_C) -> Tuple[np.ndarray, float]:
    d = topics.shape[1]
    if len(np.unique(labels)) < 2:
        # single-class users fall back to the prior: zero weights, clamped base-rate log-odds
        return np.zeros(d), prior_log_odds(labels)
    classifier = LogisticRegression(C=C, solver='lbfgs', tol=1e-8, max_iter=1000)
    classifier.fit(topics, labels)
    return classifier.coef_[0].astype(np.float64), float(classifier.intercept_[0])


def group_by_user(train: InteractionSet) -> Dict[int, np.ndarray]:
    order = np.argsort(train.users, kind='stable')
    users, starts = np.unique(train.users[order], return_index=True)
    return {int(u): chunk for u, chunk in zip(users, np.split(order, starts[1:]))}


def train_lsi_lr(
    item_features,
    train: InteractionSet,
    d: int,
    n_users: Optional[int] = None,
    seed: int = 0,
    C: float = REGULARIZATION_C,
    workers: int = 1
) -> LsiLrModel:
    item_features = sp.csr_matrix(item_features, dtype=np.float64)
    if len(train) and train.items.max() >= item_features.shape[0]:
        raise ValidationError("Training interactions reference items without a feature row")
    n_users = n_users if n_users is not None else (int(train.users.max()) + 1 if len(train) else 0)

    factorization = truncated_svd(item_features, d, seed=seed)
    topics = np.asarray(item_features @ factorization.right)
    weights = np.zeros((n_users, d))
    biases = np.zeros(n_users)

    groups = group_by_user(train)

    def _fit(user: int) -> Tuple[int, np.ndarray, float]:
        rows = groups[user]
        w, b = fit_user(topics[train.items[rows]], train.labels[rows].astype(np.int64), C)
        return user, w, b

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers, thread_name_prefix='lsi-lr') as pool:
            results = list(pool.map(_fit, sorted(groups)))
    else:
        results = [_fit(u) for u in sorted(groups)]
    for user, w, b in results:
        weights[user], biases[user] = w, b

    logger.info("Fitted LSI-LR", extra={'users': len(groups), 'd': d})
    return LsiLrModel(factorization=factorization, item_topics=topics, weights=weights, biases=biases)
