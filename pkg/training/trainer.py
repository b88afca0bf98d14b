"""Adagrad + asynchronous SGD on the Bernoulli log-likelihood of the data.

With y in {0, 1} and r = sigmoid(q_u . p_i + b_u + b_i), the negative
log-likelihood of one interaction is -y log r - (1 - y) log(1 - r), whose
derivative with respect to the raw score is simply (r - y). The chain rule
through the feature sums then gives:

    d/d e^U_j = (r - y) p_i     for every j in f_u
    d/d e^I_j = (r - y) q_u     for every j in f_i
    d/d b^U_j = d/d b^I_j = (r - y)

Every scalar parameter keeps its own Adagrad accumulator G (initialised to
1.0): theta <- theta - lr / sqrt(G) * grad, then G <- G + grad ** 2.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from core.prediction import predict_pairs, scalar_sigmoid
from core.state import ModelState
from data.models import FeatureMapping, InteractionSet, TrainingHistory
from evaluation.metrics import has_qualifying_user, mean_auc
from utils.exceptions import ValidationError
from utils.logging_config import get_logger
from .config import DEFAULT_SEED, TrainConfig

LOG_FLOOR = np.log(1e-12)

logger = get_logger('trainer')

Evaluator = Callable[[ModelState, FeatureMapping, InteractionSet], float]


@dataclass
class InteractionGradient:
    user_rows: np.ndarray
    item_rows: np.ndarray
    user_latent: np.ndarray
    item_latent: np.ndarray
    score: float

    @property
    def is_zero(self) -> bool:
        return self.score == 0.0


def _check_resolves(mapping: FeatureMapping, data: InteractionSet) -> None:
    if len(data) and (data.users.max() >= len(mapping.users) or data.items.max() >= len(mapping.items)):
        raise ValidationError("Interactions reference users or items missing from the feature mapping")


def log_likelihood(model: ModelState, mapping: FeatureMapping, data: InteractionSet) -> float:
    if len(data) == 0:
        raise ValidationError("Cannot compute the log-likelihood of an empty interaction set")
    _check_resolves(mapping, data)
    scores = predict_pairs(model, mapping, data.users, data.items)
    # log r = -log(1 + e^-x), log(1 - r) = -log(1 + e^x)
    log_positive = -np.logaddexp(0.0, -scores)
    log_negative = -np.logaddexp(0.0, scores)
    terms = np.where(data.labels == 1, log_positive, log_negative)
    return float(np.maximum(terms, LOG_FLOOR).sum())


def gradients(model: ModelState, mapping: FeatureMapping, interaction: Tuple[int, int, int]) -> InteractionGradient:
    """Analytic gradient of the negative log-likelihood of one (user, item, label) triple."""
    user, item, label = interaction
    user_rows = mapping.user_feature_lists[user]
    item_rows = mapping.item_feature_lists[item]
    q_u = model.user_embeddings[user_rows].sum(axis=0)
    p_i = model.item_embeddings[item_rows].sum(axis=0)
    raw = float(np.dot(q_u, p_i)) + float(model.user_biases[user_rows].sum()) + float(model.item_biases[item_rows].sum())
    g = scalar_sigmoid(raw) - label
    g_typed = model.dtype.type(g)
    return InteractionGradient(user_rows, item_rows, g_typed * p_i, g_typed * q_u, g)


def _adagrad(params: np.ndarray, accumulators: np.ndarray, rows: np.ndarray, gradient, learning_rate: float) -> None:
    params[rows] -= learning_rate / np.sqrt(accumulators[rows]) * gradient
    accumulators[rows] += gradient * gradient


def apply_gradient(model: ModelState, grad: InteractionGradient, learning_rate: float) -> None:
    if grad.is_zero:
        return
    g = model.dtype.type(grad.score)
    _adagrad(model.user_embeddings, model.user_embedding_accumulators, grad.user_rows, grad.user_latent, learning_rate)
    _adagrad(model.item_embeddings, model.item_embedding_accumulators, grad.item_rows, grad.item_latent, learning_rate)
    _adagrad(model.user_biases, model.user_bias_accumulators, grad.user_rows, g, learning_rate)
    _adagrad(model.item_biases, model.item_bias_accumulators, grad.item_rows, g, learning_rate)


def sgd_step(
    model: ModelState,
    mapping: FeatureMapping,
    interaction: Tuple[int, int, int],
    config: TrainConfig
) -> None:
    apply_gradient(model, gradients(model, mapping, interaction), config.base_learning_rate)


def _run_shard(model: ModelState, mapping: FeatureMapping, data: InteractionSet, order: np.ndarray, learning_rate: float) -> None:
    users, items, labels = data.users, data.items, data.labels
    for k in order:
        grad = gradients(model, mapping, (users[k], items[k], int(labels[k])))
        apply_gradient(model, grad, learning_rate)


def epoch_order(data: InteractionSet, config: TrainConfig, epoch_counter: int) -> np.ndarray:
    rng = np.random.default_rng([config.rng_seed, epoch_counter])
    return rng.permutation(len(data))


def train_epoch(model: ModelState, mapping: FeatureMapping, data: InteractionSet, config: TrainConfig) -> None:
    """One pass over `data` in a seeded shuffled order.

    threads == 1 is bit-reproducible. With more threads the permutation is cut
    into contiguous shards and the workers update the shared tables without
    locks (Hogwild); lost updates from races are accepted.
    """
    if len(data) == 0:
        raise ValidationError("Cannot train on an empty interaction set")
    _check_resolves(mapping, data)

    order = epoch_order(data, config, model.epoch_counter)
    if config.threads == 1:
        _run_shard(model, mapping, data, order, config.base_learning_rate)
    else:
        shards = np.array_split(order, config.threads)
        with ThreadPoolExecutor(max_workers=config.threads, thread_name_prefix='hogwild') as pool:
            futures = [pool.submit(_run_shard, model, mapping, data, shard, config.base_learning_rate) for shard in shards]
            for future in futures:
                future.result()
    model.epoch_counter += 1


def validation_auc(model: ModelState, mapping: FeatureMapping, validation: InteractionSet) -> float:
    scores = predict_pairs(model, mapping, validation.users, validation.items)
    return mean_auc(scores, validation)


def _restore(model: ModelState, snapshot: ModelState) -> None:
    for name, table in snapshot.tables().items():
        setattr(model, name, table)
    model.epoch_counter = snapshot.epoch_counter


def fit(
    model: ModelState,
    mapping: FeatureMapping,
    train: InteractionSet,
    validation: InteractionSet,
    config: TrainConfig,
    evaluator: Optional[Evaluator] = None
) -> TrainingHistory:
    """Train until validation AUC stalls for `early_stop_patience` epochs.

    Early stopping watches a held-out slice of the training data rather than
    the test set. On return `model` holds the best-validation snapshot.
    """
    if train.pair_keys() & validation.pair_keys():
        raise ValidationError("Train and validation interactions must be disjoint")
    # without a usable validation slice every epoch runs and the last one is kept
    monitor = len(validation) > 0 if evaluator else has_qualifying_user(validation)
    evaluator = evaluator or validation_auc

    history = TrainingHistory()
    best: Optional[ModelState] = None
    best_auc = -np.inf
    stale_epochs = 0

    for epoch in range(1, config.epochs_max + 1):
        train_epoch(model, mapping, train, config)
        loglik = log_likelihood(model, mapping, train)
        auc = evaluator(model, mapping, validation) if monitor else float('nan')
        history.append(epoch, loglik, auc)
        logger.info("Epoch finished", extra={'epoch': epoch, 'log_likelihood': loglik, 'validation_auc': auc})

        if not monitor:
            history.best_epoch = epoch
            continue
        if auc > best_auc:
            best_auc, best, stale_epochs = auc, model.copy(), 0
            history.best_epoch = epoch
        else:
            stale_epochs += 1
            if stale_epochs >= config.early_stop_patience:
                history.stopped_early = True
                break

    if best is not None:
        _restore(model, best)
    return history


def fold_in_features(
    model: ModelState,
    mapping: FeatureMapping,
    new_feature_names: Sequence[str],
    side: str,
    seed: int = DEFAULT_SEED
) -> List[int]:
    """Append fresh rows for never-seen features; existing parameters stay bit-identical.

    New rows start with accumulators at 1.0, i.e. the full base learning rate,
    while established features keep their shrunken Adagrad step sizes.
    """
    indices = mapping.add_features(side, list(new_feature_names))
    model.append_features(side, len(indices), seed=seed)
    logger.info("Folded in features", extra={'side': side, 'count': len(indices)})
    return indices


def fold_in_mapping(
    model: ModelState,
    base: FeatureMapping,
    incoming: FeatureMapping,
    seed: int = DEFAULT_SEED
) -> FeatureMapping:
    """Re-express `incoming` against the vocabularies of `base`, folding in unknown features.

    Used when resuming training on new data: the returned mapping keeps every
    index of `base` so restored parameters line up, and carries the entities
    and feature sets of `incoming`.
    """
    merged = base.copy()
    lists = {}
    for side in ('user', 'item'):
        names = incoming.features(side)
        unseen = [n for n in names if n not in merged.features(side)]
        if unseen:
            fold_in_features(model, merged, unseen, side, seed=seed)
        vocabulary = merged.features(side)
        lists[side] = [[vocabulary.index(names.name(j)) for j in f] for f in incoming.feature_lists(side)]
    return FeatureMapping(
        merged.user_features, merged.item_features, incoming.users.copy(), incoming.items.copy(),
        lists['user'], lists['item']
    )
