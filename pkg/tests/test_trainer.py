import math

import numpy as np
import pytest

from baselines.indicator import make_indicator_mapping
from core.prediction import predict, predict_pairs
from core.serialization import load_model, save_model
from core.state import ModelState
from data.models import FeatureMapping, InteractionSet
from evaluation.splits import train_validation_split
from extractors.features import build_feature_mapping
from training.config import TrainConfig
from training.trainer import (
    InteractionGradient, apply_gradient, epoch_order, fit, fold_in_features, fold_in_mapping,
    gradients, log_likelihood, sgd_step, train_epoch, validation_auc
)
from utils.exceptions import ValidationError
from .helpers import make_state


def logit(p):
    return math.log(p / (1.0 - p))


def random_instance(seed=0):
    """5 users and 5 items, each described by a random non-empty subset of 3 features."""
    rng = np.random.default_rng(seed)

    def subsets(prefix):
        lists = []
        for _ in range(5):
            chosen = [f"{prefix}{j}" for j in range(3) if rng.random() < 0.6]
            lists.append(chosen or [f"{prefix}{rng.integers(3)}"])
        return lists

    mapping = FeatureMapping.build(
        [f"u{k}" for k in range(5)], [f"i{k}" for k in range(5)], subsets('uf'), subsets('if')
    )
    model = ModelState.initialize(mapping.n_features('user'), mapping.n_features('item'), 3, seed=seed, dtype=np.float64)
    model.user_embeddings = rng.normal(scale=0.7, size=model.user_embeddings.shape)
    model.item_embeddings = rng.normal(scale=0.7, size=model.item_embeddings.shape)
    model.user_biases = rng.normal(scale=0.3, size=model.user_biases.shape)
    model.item_biases = rng.normal(scale=0.3, size=model.item_biases.shape)
    return model, mapping


def negative_log_likelihood(model, mapping, interaction):
    user, item, label = interaction
    return -log_likelihood(model, mapping, InteractionSet([user], [item], [label]))


def central_difference(model, mapping, interaction, table, index, step=1e-5):
    values = getattr(model, table)
    original = values[index]
    values[index] = original + step
    upper = negative_log_likelihood(model, mapping, interaction)
    values[index] = original - step
    lower = negative_log_likelihood(model, mapping, interaction)
    values[index] = original
    return (upper - lower) / (2 * step)


def close(analytic, numeric):
    return abs(analytic - numeric) <= 1e-4 * max(abs(analytic), abs(numeric)) + 1e-8


class TestLogLikelihood:

    def test_single_positive_at_one_half(self):
        model = make_state(np.zeros((1, 2)), np.zeros((1, 2)))
        mapping = make_indicator_mapping(1, 1)
        assert log_likelihood(model, mapping, InteractionSet([0], [0], [1])) == pytest.approx(math.log(0.5))

    def test_symmetric_pair(self):
        model = make_state(np.zeros((1, 1)), np.zeros((2, 1)), item_biases=[logit(0.9), logit(0.1)])
        mapping = make_indicator_mapping(1, 2)
        data = InteractionSet([0, 0], [0, 1], [1, 0])
        assert log_likelihood(model, mapping, data) == pytest.approx(2 * math.log(0.9))
        assert log_likelihood(model, mapping, data) == pytest.approx(-0.2107, abs=1e-4)

    def test_matches_term_by_term_evaluation(self, toy_model, toy_mapping, toy_interactions):
        expected = 0.0
        for user, item, label in toy_interactions.triples():
            r = predict(toy_model, toy_mapping.feature_set('user', user), toy_mapping.feature_set('item', item))
            expected += math.log(r) if label == 1 else math.log(1.0 - r)
        assert log_likelihood(toy_model, toy_mapping, toy_interactions) == pytest.approx(expected, abs=1e-10)

    def test_terms_are_floored(self):
        model = make_state(np.zeros((1, 1)), np.zeros((1, 1)), item_biases=[-200.0])
        mapping = make_indicator_mapping(1, 1)
        assert log_likelihood(model, mapping, InteractionSet([0], [0], [1])) == pytest.approx(math.log(1e-12))

    def test_empty_data_rejected(self, toy_model, toy_mapping):
        with pytest.raises(ValidationError):
            log_likelihood(toy_model, toy_mapping, InteractionSet.empty())

    def test_unresolvable_user(self, toy_model, toy_mapping):
        with pytest.raises(ValidationError):
            log_likelihood(toy_model, toy_mapping, InteractionSet([3], [0], [1]))


class TestGradients:

    @pytest.mark.parametrize('seed', [0, 1, 2])
    def test_matches_central_differences(self, seed):
        model, mapping = random_instance(seed)
        rng = np.random.default_rng(100 + seed)
        for _ in range(5):
            interaction = (int(rng.integers(5)), int(rng.integers(5)), int(rng.integers(2)))
            grad = gradients(model, mapping, interaction)
            user_rows, item_rows = set(grad.user_rows.tolist()), set(grad.item_rows.tolist())

            for j in range(model.n_features('user')):
                for k in range(model.d):
                    expected = grad.user_latent[k] if j in user_rows else 0.0
                    numeric = central_difference(model, mapping, interaction, 'user_embeddings', (j, k))
                    assert close(expected, numeric), ('user', j, k)
                expected = grad.score if j in user_rows else 0.0
                assert close(expected, central_difference(model, mapping, interaction, 'user_biases', j))

            for j in range(model.n_features('item')):
                for k in range(model.d):
                    expected = grad.item_latent[k] if j in item_rows else 0.0
                    numeric = central_difference(model, mapping, interaction, 'item_embeddings', (j, k))
                    assert close(expected, numeric), ('item', j, k)
                expected = grad.score if j in item_rows else 0.0
                assert close(expected, central_difference(model, mapping, interaction, 'item_biases', j))

    def test_bias_gradient_of_a_positive(self):
        model = ModelState.initialize(1, 1, 4, seed=5, dtype=np.float64)
        mapping = make_indicator_mapping(1, 1)
        grad = gradients(model, mapping, (0, 0, 1))
        r = predict(model, [0], [0])
        assert grad.score == pytest.approx(-(1.0 - r))

    def test_zero_gradient_leaves_everything_unchanged(self, toy_model):
        before = toy_model.copy()
        zero = InteractionGradient(np.array([0, 1]), np.array([0]), np.zeros(4), np.zeros(4), 0.0)
        apply_gradient(toy_model, zero, 0.05)
        assert toy_model == before

    def test_saturated_prediction_does_not_move_parameters(self):
        model = make_state(np.full((1, 3), 0.1), np.full((1, 3), 0.1), user_biases=[50.0], item_biases=[1.0], dtype=np.float32)
        mapping = make_indicator_mapping(1, 1)
        before = model.copy()
        sgd_step(model, mapping, (0, 0, 1), TrainConfig(threads=1))
        assert model == before

    def test_touched_accumulators_strictly_increase(self, toy_model, toy_mapping):
        before = toy_model.copy()
        sgd_step(toy_model, toy_mapping, (2, 1, 1), TrainConfig(threads=1))
        user_rows = toy_mapping.feature_set('user', 2)
        item_rows = toy_mapping.feature_set('item', 1)
        assert np.all(toy_model.user_embedding_accumulators[user_rows] > before.user_embedding_accumulators[user_rows])
        assert np.all(toy_model.item_embedding_accumulators[item_rows] > before.item_embedding_accumulators[item_rows])
        assert np.all(toy_model.user_bias_accumulators[user_rows] > before.user_bias_accumulators[user_rows])
        assert np.all(toy_model.item_bias_accumulators[item_rows] > before.item_bias_accumulators[item_rows])
        untouched = np.setdiff1d(np.arange(toy_model.n_features('user')), user_rows)
        np.testing.assert_array_equal(toy_model.user_embeddings[untouched], before.user_embeddings[untouched])

    def test_indicator_features_touch_one_row_per_side(self):
        mapping = make_indicator_mapping(4, 5)
        model = ModelState.initialize(4, 5, 3, seed=2)
        before = model.copy()
        sgd_step(model, mapping, (1, 3, 1), TrainConfig(threads=1))
        assert np.flatnonzero(np.any(model.user_embeddings != before.user_embeddings, axis=1)).tolist() == [1]
        assert np.flatnonzero(np.any(model.item_embeddings != before.item_embeddings, axis=1)).tolist() == [3]
        assert np.flatnonzero(model.user_biases != before.user_biases).tolist() == [1]
        assert np.flatnonzero(model.item_biases != before.item_biases).tolist() == [3]

    def test_effective_step_size_never_grows(self, toy_model, toy_mapping, toy_interactions):
        config = TrainConfig(threads=1, rng_seed=1)
        previous = toy_model.copy()
        for _ in range(3):
            train_epoch(toy_model, toy_mapping, toy_interactions, config)
            for name in ('user_embedding_accumulators', 'item_embedding_accumulators',
                         'user_bias_accumulators', 'item_bias_accumulators'):
                assert np.all(getattr(toy_model, name) >= getattr(previous, name))
            previous = toy_model.copy()


class TestTrainEpoch:

    def test_single_thread_is_reproducible(self, toy_mapping, toy_interactions, serial_config):
        first = ModelState.initialize(5, 3, 4, seed=11)
        second = ModelState.initialize(5, 3, 4, seed=11)
        for model in (first, second):
            train_epoch(model, toy_mapping, toy_interactions, serial_config)
            train_epoch(model, toy_mapping, toy_interactions, serial_config)
        assert first == second
        assert first.epoch_counter == 2

    def test_order_is_a_seeded_permutation(self, toy_interactions, serial_config):
        first = epoch_order(toy_interactions, serial_config, 0)
        assert sorted(first.tolist()) == list(range(len(toy_interactions)))
        np.testing.assert_array_equal(first, epoch_order(toy_interactions, serial_config, 0))

        data = InteractionSet(np.arange(50) % 5, np.arange(50), np.ones(50))
        a, b = epoch_order(data, serial_config, 0), epoch_order(data, serial_config, 1)
        assert not np.array_equal(a, b)
        assert sorted(a.tolist()) == sorted(b.tolist())

    def test_parallel_epoch(self, small_dataset):
        mapping = build_feature_mapping(small_dataset)
        model = ModelState.initialize(mapping.n_features('user'), mapping.n_features('item'), 8, seed=0)
        train_epoch(model, mapping, small_dataset.interactions, TrainConfig(threads=4, rng_seed=0))
        assert model.epoch_counter == 1
        assert model.is_finite()
        assert np.all(model.item_bias_accumulators > 1.0)

    def test_empty_data_rejected(self, toy_model, toy_mapping, serial_config):
        with pytest.raises(ValidationError):
            train_epoch(toy_model, toy_mapping, InteractionSet.empty(), serial_config)


class TestFit:

    def test_patience_stops_and_restores_best_snapshot(self, toy_model, toy_mapping, toy_interactions):
        train, validation = toy_interactions.subset([0, 1, 2, 3]), toy_interactions.subset([4, 5])
        sequence = iter([0.6, 0.7, 0.69, 0.68, 0.9])
        snapshots = []

        def evaluator(model, mapping, data):
            snapshots.append(model.copy())
            return next(sequence)

        config = TrainConfig(epochs_max=10, threads=1, early_stop_patience=2)
        history = fit(toy_model, toy_mapping, train, validation, config, evaluator=evaluator)

        assert len(history) == 4
        assert history.stopped_early
        assert history.best_epoch == 2
        assert history.best_auc == 0.7
        assert toy_model == snapshots[1]
        assert toy_model.epoch_counter == 2

    def test_epochs_max_caps_training(self, toy_model, toy_mapping, toy_interactions):
        config = TrainConfig(epochs_max=1, threads=1)
        history = fit(toy_model, toy_mapping, toy_interactions.subset([0, 1, 2, 3]),
                      toy_interactions.subset([4, 5]), config, evaluator=lambda *_: 0.5)
        assert len(history) == 1
        assert history.best_epoch == 1
        assert not history.stopped_early

    def test_without_usable_validation_all_epochs_run(self, toy_model, toy_mapping, toy_interactions):
        config = TrainConfig(epochs_max=3, threads=1)
        history = fit(toy_model, toy_mapping, toy_interactions, InteractionSet.empty(), config)
        assert len(history) == 3
        assert history.best_epoch == 3
        assert all(math.isnan(r.validation_auc) for r in history.records)
        assert toy_model.epoch_counter == 3

    def test_train_and_validation_must_be_disjoint(self, toy_model, toy_mapping, toy_interactions, serial_config):
        with pytest.raises(ValidationError):
            fit(toy_model, toy_mapping, toy_interactions, toy_interactions.subset([0]), serial_config)

    def test_best_snapshot_is_never_worse_than_earlier_epochs(self, small_dataset):
        mapping = build_feature_mapping(small_dataset)
        split = train_validation_split(small_dataset.interactions, 0.1, seed=4)
        model = ModelState.initialize(mapping.n_features('user'), mapping.n_features('item'), 8, seed=4)
        history = fit(model, mapping, split.train, split.validation, TrainConfig(epochs_max=6, threads=1, rng_seed=4))
        recorded = [r.validation_auc for r in history.records]
        assert history.best_auc == max(recorded)
        assert validation_auc(model, mapping, split.validation) == pytest.approx(history.best_auc)

    def test_log_likelihood_rises_on_separable_data(self, small_dataset):
        mapping = build_feature_mapping(small_dataset)
        model = ModelState.initialize(mapping.n_features('user'), mapping.n_features('item'), 16, seed=0)
        history = fit(model, mapping, small_dataset.interactions, InteractionSet.empty(),
                      TrainConfig(epochs_max=5, threads=1, rng_seed=0))
        logliks = [r.log_likelihood for r in history.records]
        drops = sum(1 for a, b in zip(logliks, logliks[1:]) if b < a)
        assert drops <= 1
        assert logliks[-1] > logliks[0]


class TestFoldIn:

    def test_append_only(self, toy_model, toy_mapping):
        before = toy_model.copy()
        indices = fold_in_features(toy_model, toy_mapping, ['d'], 'item', seed=1)
        assert indices == [3]
        assert toy_model.n_features('item') == 4
        assert toy_mapping.n_features('item') == 4
        np.testing.assert_array_equal(toy_model.item_embeddings[:3], before.item_embeddings)
        np.testing.assert_array_equal(toy_model.item_embedding_accumulators[:3], before.item_embedding_accumulators)
        np.testing.assert_array_equal(toy_model.user_embeddings, before.user_embeddings)
        assert np.all(toy_model.item_embedding_accumulators[3] == 1.0)
        assert toy_model.item_biases[3] == 0.0
        assert np.abs(toy_model.item_embeddings[3]).max() <= 0.5 / toy_model.d

    def test_default_seed_is_reproducible(self, toy_model, toy_mapping):
        first_model, second_model = toy_model.copy(), toy_model.copy()
        fold_in_features(first_model, toy_mapping.copy(), ['d', 'e'], 'item')
        fold_in_features(second_model, toy_mapping.copy(), ['d', 'e'], 'item')
        assert first_model == second_model
        explicit = toy_model.copy()
        fold_in_features(explicit, toy_mapping.copy(), ['d', 'e'], 'item', seed=TrainConfig().rng_seed)
        assert explicit == first_model

    def test_duplicate_name_rejected(self, toy_model, toy_mapping):
        with pytest.raises(ValidationError):
            fold_in_features(toy_model, toy_mapping, ['a'], 'item')
        assert toy_model.n_features('item') == 3

    def test_fold_in_then_round_trip(self, tmp_path, toy_model, toy_mapping):
        fold_in_features(toy_model, toy_mapping, ['young-adult', 'retired'], 'user', seed=2)
        save_model(toy_model, toy_mapping, tmp_path / 'model.bin')
        loaded, mapping = load_model(tmp_path / 'model.bin')
        assert loaded == toy_model
        assert mapping.features('user').index('retired') == 6

    def test_mapping_fold_in_keeps_existing_indices(self, toy_model, toy_mapping):
        incoming = FeatureMapping.build(
            ['u9', 'u0'], ['i0', 'i7'],
            [['user:u9'], ['user:u0', 'young']],
            [['c', 'd'], ['a']],
        )
        before = toy_model.copy()
        merged = fold_in_mapping(toy_model, toy_mapping, incoming, seed=3)

        assert merged.features('item').names == ('a', 'b', 'c', 'd')
        assert merged.features('user').names[:5] == toy_mapping.features('user').names
        assert merged.items.names == ('i0', 'i7')
        assert merged.feature_set('item', 0).tolist() == [2, 3]
        assert merged.feature_set('user', 1).tolist() == [0, 1]
        assert toy_model.n_features('user') == 6
        np.testing.assert_array_equal(toy_model.item_embeddings[:3], before.item_embeddings)

    def test_resumed_training_matches_uninterrupted(self, tmp_path, small_dataset):
        mapping = build_feature_mapping(small_dataset)
        config = TrainConfig(threads=1, rng_seed=5)
        data = small_dataset.interactions

        uninterrupted = ModelState.initialize(mapping.n_features('user'), mapping.n_features('item'), 8, seed=5)
        train_epoch(uninterrupted, mapping, data, config)
        train_epoch(uninterrupted, mapping, data, config)

        resumed = ModelState.initialize(mapping.n_features('user'), mapping.n_features('item'), 8, seed=5)
        train_epoch(resumed, mapping, data, config)
        save_model(resumed, mapping, tmp_path / 'checkpoint.bin')
        restored, restored_mapping = load_model(tmp_path / 'checkpoint.bin')
        train_epoch(restored, restored_mapping, data, config)

        assert restored == uninterrupted

    def test_scores_after_fold_in_are_unchanged_for_old_entities(self, toy_model, toy_mapping):
        users, items = np.array([0, 1, 2]), np.array([0, 1, 2])
        before = predict_pairs(toy_model, toy_mapping, users, items)
        fold_in_features(toy_model, toy_mapping, ['d'], 'item')
        np.testing.assert_array_equal(predict_pairs(toy_model, toy_mapping, users, items), before)
