from typing import Dict

import numpy as np
from scipy.stats import rankdata

from data.models import InteractionSet
from utils.exceptions import EvaluationError


def user_auc(scores: np.ndarray, labels: np.ndarray) -> float:
    """Mann-Whitney AUC: P(positive scored above negative), ties count one half."""
    positives = labels == 1
    n_pos = int(positives.sum())
    n_neg = len(labels) - n_pos
    ranks = rankdata(scores, method='average')
    return float((ranks[positives].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def _groups(test: InteractionSet):
    order = np.argsort(test.users, kind='stable')
    users, starts = np.unique(test.users[order], return_index=True)
    return zip(users.tolist(), np.split(order, starts[1:]))


def has_qualifying_user(test: InteractionSet) -> bool:
    for _, rows in _groups(test):
        labels = test.labels[rows]
        if labels.min() == 0 and labels.max() == 1:
            return True
    return False


def per_user_auc(scores, test: InteractionSet) -> Dict[int, float]:
    """AUC of every user with at least one positive and one negative test pair."""
    scores = np.asarray(scores, dtype=np.float64).reshape(-1)
    if len(scores) != len(test):
        raise EvaluationError(f"{len(test)} test pairs but {len(scores)} scores", details={'unscored': len(test) - len(scores)})
    if not np.all(np.isfinite(scores)):
        raise EvaluationError("Scores contain NaN or Inf values")

    aucs = {}
    for user, rows in _groups(test):
        labels = test.labels[rows]
        if labels.min() == labels.max():
            continue
        aucs[user] = user_auc(scores[rows], labels)
    return aucs


def mean_auc(scores, test: InteractionSet) -> float:
    """Unweighted mean of per-user AUCs; single-class users are left out."""
    aucs = per_user_auc(scores, test)
    if not aucs:
        raise EvaluationError("No user has both a positive and a negative test interaction")
    return float(np.mean(list(aucs.values())))
