import numpy as np
import pytest

from data.models import DatasetSplit, ExperimentReport, InteractionSet, RecommendationDataset
from evaluation.experiment_service import SWEEP_HEADER, ExperimentService, results_table, sweep_rows
from evaluation.metrics import has_qualifying_user, mean_auc, per_user_auc, user_auc
from evaluation.splits import MIN_COLD_ITEMS, cold_item_split, make_split, train_validation_split, warm_split
from evaluation.synthetic import generate_from_spec, generate_synthetic, tag_name
from evaluation.variants import FactorizationScorer, _lsi_dimension, get_variant, train_variant
from training.config import TrainConfig
from training.trainer import fit
from core.state import ModelState
from extractors.features import build_feature_mapping
from utils.exceptions import EvaluationError, ValidationError


def brute_force_mean_auc(scores, test):
    aucs = []
    for user in np.unique(test.users):
        rows = test.users == user
        pos = scores[rows][test.labels[rows] == 1]
        neg = scores[rows][test.labels[rows] == 0]
        if len(pos) == 0 or len(neg) == 0:
            continue
        wins = sum((p > n) + 0.5 * (p == n) for p in pos for n in neg)
        aucs.append(wins / (len(pos) * len(neg)))
    return float(np.mean(aucs))


def random_scored_set(rng):
    users, items, labels = [], [], []
    for user in range(int(rng.integers(1, 6))):
        n_items = int(rng.integers(2, 201))
        users += [user] * n_items
        items += list(range(n_items))
        labels += rng.integers(0, 2, size=n_items).tolist()
    # coarse scores so that ties actually occur
    scores = np.round(rng.normal(size=len(users)), int(rng.integers(0, 3)))
    return scores, InteractionSet(users, items, labels)


def grid(n_users, n_items):
    users = np.repeat(np.arange(n_users), n_items)
    items = np.tile(np.arange(n_items), n_users)
    return InteractionSet(users, items, (users + items) % 2)


def strip_user_tokens(dataset):
    return RecommendationDataset(dataset.name, dataset.interactions, dataset.users, dataset.items, dataset.item_tags)


class TestAuc:

    def test_perfect_ranking(self):
        assert user_auc(np.array([0.9, 0.1]), np.array([1, 0])) == 1.0

    def test_all_ties(self):
        assert user_auc(np.full(4, 0.3), np.array([1, 0, 1, 0])) == 0.5

    def test_one_concordant_one_discordant(self):
        assert user_auc(np.array([0.8, 0.2, 0.5]), np.array([1, 1, 0])) == 0.5

    def test_single_class_users_are_left_out(self):
        test = InteractionSet([0, 0, 1, 1], [0, 1, 0, 1], [1, 0, 1, 1])
        scores = np.array([0.9, 0.1, 0.0, 0.0])
        assert per_user_auc(scores, test) == {0: 1.0}
        assert mean_auc(scores, test) == 1.0
        assert has_qualifying_user(test)

    def test_no_qualifying_user(self):
        test = InteractionSet([0, 1], [0, 0], [1, 0])
        assert not has_qualifying_user(test)
        with pytest.raises(EvaluationError):
            mean_auc(np.array([0.5, 0.5]), test)

    def test_every_pair_must_be_scored(self):
        test = InteractionSet([0, 0, 0], [0, 1, 2], [1, 0, 0])
        with pytest.raises(EvaluationError) as excinfo:
            mean_auc(np.array([0.5, 0.5]), test)
        assert excinfo.value.details == {'unscored': 1}

    def test_non_finite_scores(self):
        test = InteractionSet([0, 0], [0, 1], [1, 0])
        with pytest.raises(EvaluationError):
            mean_auc(np.array([np.nan, 0.0]), test)

    def test_matches_all_pairs_comparison(self):
        rng = np.random.default_rng(0)
        checked = 0
        for _ in range(100):
            scores, test = random_scored_set(rng)
            if not has_qualifying_user(test):
                continue
            assert mean_auc(scores, test) == pytest.approx(brute_force_mean_auc(scores, test), abs=1e-10)
            checked += 1
        assert checked > 90

    @pytest.mark.parametrize('transform', [np.exp, lambda s: 3.0 * s - 7.0])
    def test_invariant_under_increasing_transforms(self, transform):
        scores, test = random_scored_set(np.random.default_rng(5))
        assert mean_auc(transform(scores), test) == pytest.approx(mean_auc(scores, test), abs=1e-12)


class TestSplits:

    def test_warm_fraction(self):
        data = grid(2, 5)
        split = warm_split(data, 0.2, seed=0, validation_fraction=0.0)
        assert len(split.test) == 2
        assert len(split.train) == 8
        assert len(split.validation) == 0

    def test_warm_keeps_every_user_and_item_in_train(self, small_dataset):
        split = warm_split(small_dataset.interactions, 0.2, seed=3)
        assert set(split.test.users.tolist()) <= set(split.train.users.tolist())
        assert set(split.test.items.tolist()) <= set(split.train.items.tolist())
        assert set(split.validation.items.tolist()) <= set(split.train.items.tolist())

    def test_warm_partitions_the_data(self, small_dataset):
        split = warm_split(small_dataset.interactions, 0.2, seed=3)
        split.check_disjoint()
        assert len(split) == len(small_dataset.interactions)
        assert len(split.validation) == round(0.1 * (len(split.train) + len(split.validation)))

    def test_warm_is_seeded(self, small_dataset):
        first = warm_split(small_dataset.interactions, seed=11)
        second = warm_split(small_dataset.interactions, seed=11)
        assert first.test == second.test
        assert first.validation == second.validation

    def test_warm_unsatisfiable(self):
        data = InteractionSet(range(5), range(5), [1, 0, 1, 0, 1])
        with pytest.raises(ValidationError):
            warm_split(data, 0.2, seed=0)

    @pytest.mark.parametrize('fraction', [0.0, 1.0, -0.1])
    def test_warm_fraction_range(self, fraction):
        with pytest.raises(ValidationError):
            warm_split(grid(2, 5), fraction)

    def test_cold_holds_out_whole_items(self):
        data = grid(3, 10)
        split = cold_item_split(data, 0.2, seed=4, validation_fraction=0.0)
        held_out = set(split.test.items.tolist())
        assert len(held_out) == 2
        assert len(split.test) == 6
        assert not held_out & set(split.train.items.tolist())
        split.check_disjoint()

    def test_cold_validation_comes_from_train_items(self, small_dataset):
        split = cold_item_split(small_dataset.interactions, 0.2, seed=1)
        assert not set(split.test.items.tolist()) & set(split.validation.items.tolist())
        assert len(split) == len(small_dataset.interactions)

    def test_cold_needs_enough_items(self):
        data = grid(3, MIN_COLD_ITEMS - 1)
        with pytest.raises(ValidationError):
            cold_item_split(data)

    def test_train_validation_only(self, small_dataset):
        split = train_validation_split(small_dataset.interactions, 0.1, seed=2)
        assert len(split.test) == 0
        assert len(split.validation) == round(0.1 * len(small_dataset.interactions))
        split.check_disjoint()

    def test_make_split(self, small_dataset):
        assert make_split(small_dataset.interactions, 'cold', seed=0).kind == 'cold'
        assert make_split(small_dataset.interactions, 'warm', seed=0).kind == 'warm'
        with pytest.raises(ValidationError):
            make_split(small_dataset.interactions, 'temporal', seed=0)

    def test_split_kind_is_checked(self):
        empty = InteractionSet.empty()
        with pytest.raises(ValidationError):
            DatasetSplit(empty, empty, empty, kind='cold_user', seed=0)


class TestSynthetic:

    def test_deterministic(self):
        first = generate_synthetic(n_users=30, n_items=20, n_tags=8, n_groups=2, seed=5)
        second = generate_synthetic(n_users=30, n_items=20, n_tags=8, n_groups=2, seed=5)
        assert first.interactions == second.interactions
        assert first.item_tags == second.item_tags
        assert first.user_tokens == second.user_tokens

    def test_shape(self, small_dataset):
        assert len(small_dataset.users) == 120
        assert len(small_dataset.items) == 60
        assert len(small_dataset.interactions) == 120 * 12
        assert all(len(tags) == 3 for tags in small_dataset.item_tags)
        assert all(len(tokens) == 3 for tokens in small_dataset.user_tokens)
        assert len(small_dataset.tag_groups) == 20

    def test_item_tags_share_one_group(self, small_dataset):
        for tags in small_dataset.item_tags:
            assert len({small_dataset.tag_groups[t] for t in tags}) == 1

    def test_both_labels_present(self, small_dataset):
        assert 0 < small_dataset.interactions.labels.sum() < len(small_dataset.interactions)

    def test_no_user_words(self):
        dataset = generate_from_spec({'n_users': 10, 'n_items': 10, 'n_tags': 4, 'n_groups': 2,
                                      'tags_per_item': 2, 'interactions_per_user': 5, 'words_per_user': 0})
        assert dataset.user_tokens is None
        assert tag_name(1, 0) in dataset.tag_groups

    @pytest.mark.parametrize('spec', [
        {'n_tags': 10, 'n_groups': 3},
        {'n_tags': 10, 'n_groups': 2, 'tags_per_item': 6},
        {'n_items': 10, 'interactions_per_user': 11},
        {'noise': -1.0},
    ])
    def test_invalid_spec(self, spec):
        with pytest.raises(ValidationError):
            generate_from_spec(spec)


class TestVariants:

    def test_unknown(self):
        with pytest.raises(ValidationError):
            get_variant('svd++')

    def test_about_needs_user_metadata(self, small_dataset):
        split = warm_split(small_dataset.interactions, seed=0)
        config = TrainConfig(epochs_max=1, threads=1)
        with pytest.raises(ValidationError):
            train_variant(get_variant('lightfm-tags-about'), strip_user_tokens(small_dataset), split, 4, config)

    def test_lsi_dimension_capped_by_shape(self):
        assert _lsi_dimension(64, 120, 20) == 20
        assert _lsi_dimension(8, 120, 20) == 8

    def test_factorization_scorer(self, small_dataset):
        split = warm_split(small_dataset.interactions, seed=0)
        config = TrainConfig(epochs_max=2, threads=1, rng_seed=0)
        scorer = train_variant(get_variant('lightfm-tags-ids'), small_dataset, split, 4, config)
        assert isinstance(scorer, FactorizationScorer)
        assert len(scorer.history) == 2
        assert scorer.mapping.n_features('item') == 20 + 60
        assert scorer.score(split.test.users, split.test.items).shape == (len(split.test),)

    @pytest.mark.parametrize('name', ['lsi-lr', 'lsi-up'])
    def test_lsi_variants_score_every_pair(self, small_dataset, name):
        split = cold_item_split(small_dataset.interactions, seed=0)
        scorer = train_variant(get_variant(name), small_dataset, split, 64, TrainConfig(threads=1))
        scores = scorer.score(split.test.users, split.test.items)
        assert np.all(np.isfinite(scores))
        assert scorer.d == 20


@pytest.fixture
def service():
    return ExperimentService(TrainConfig(epochs_max=3, threads=1, rng_seed=0), latent_dim=4)


class TestExperimentService:

    def test_one_auc_per_repetition(self, service, small_dataset):
        report = service.run_experiment('lightfm-tags', small_dataset, 'warm', repetitions=3)
        assert len(report.aucs) == 3
        assert report.seeds == [0, 1, 2]
        assert all(0.0 <= auc <= 1.0 for auc in report.aucs)
        assert report.mean == pytest.approx(np.mean(report.aucs))

    def test_seeds_count_up_from_the_training_seed(self, small_dataset):
        shifted = ExperimentService(TrainConfig(epochs_max=1, threads=1, rng_seed=5), latent_dim=4)
        report = shifted.run_experiment('lsi-up', small_dataset, 'warm', repetitions=2)
        assert report.seeds == [5, 6]

    def test_reproducible(self, service, small_dataset):
        first = service.run_experiment('mf', small_dataset, 'warm', repetitions=1, seeds=[9])
        second = service.run_experiment('mf', small_dataset, 'warm', repetitions=1, seeds=[9])
        assert first.aucs == second.aucs

    def test_parallel_repetitions_match_serial(self, service, small_dataset):
        serial = service.run_experiment('lightfm-tags', small_dataset, 'cold', repetitions=2)
        service.workers = 2
        parallel = service.run_experiment('lightfm-tags', small_dataset, 'cold', repetitions=2)
        assert parallel.aucs == serial.aucs

    def test_incompatible_variant(self, service, small_dataset):
        with pytest.raises(ValidationError):
            service.run_experiment('lightfm-tags-about', strip_user_tokens(small_dataset), 'cold', repetitions=1)

    def test_repetition_arguments(self, service, small_dataset):
        with pytest.raises(ValidationError):
            service.run_experiment('mf', small_dataset, 'warm', repetitions=0)
        with pytest.raises(ValidationError):
            service.run_experiment('mf', small_dataset, 'warm', repetitions=2, seeds=[1])

    def test_dimension_sweep(self, service, small_dataset):
        reports = service.dimension_sweep(['lsi-lr', 'lsi-up'], small_dataset, [2, 4], repetitions=2)
        rows = sweep_rows(reports)
        assert len(rows) == 4
        assert [(model, d) for model, d, _, _ in rows] == [('lsi-lr', 2), ('lsi-lr', 4), ('lsi-up', 2), ('lsi-up', 4)]
        assert len(SWEEP_HEADER) == len(rows[0])

    @pytest.mark.parametrize('dims', [[4, 2], [], [0, 4], [2, 2]])
    def test_sweep_dims_must_ascend(self, service, small_dataset, dims):
        with pytest.raises(ValidationError):
            service.dimension_sweep(['mf'], small_dataset, dims, repetitions=1)


class TestReports:

    def test_mean_and_std(self):
        report = ExperimentReport('mf', 'ml', 'cold', [0.7, 0.9], [0, 1])
        assert report.mean == pytest.approx(0.8)
        assert report.std == pytest.approx(np.sqrt(0.02))
        assert ExperimentReport('mf', 'ml', 'cold', [0.7], [0]).std == 0.0

    def test_results_table(self):
        reports = [
            ExperimentReport('mf', 'ml', 'cold', [0.5, 0.5], [0, 1]),
            ExperimentReport('lightfm-tags', 'ml', 'cold', [0.7, 0.9], [0, 1]),
            ExperimentReport('mf', 'ml', 'warm', [0.8], [0]),
        ]
        header, rows = results_table(reports)
        assert header == ['model', 'ml (cold)', 'ml (warm)']
        assert rows == [
            ['mf', '0.5000 ± 0.0000', '0.8000 ± 0.0000'],
            ['lightfm-tags', '0.8000 ± 0.1414', ''],
        ]


@pytest.fixture(scope='module')
def informative_dataset():
    return generate_synthetic(n_users=2000, n_items=500, n_tags=50, n_groups=5, seed=0, name='informative')


@pytest.fixture(scope='module')
def acceptance_service():
    return ExperimentService(TrainConfig(epochs_max=10, threads=1, rng_seed=0), latent_dim=16)


@pytest.mark.slow
class TestAcceptance:

    def test_mf_is_random_on_cold_items(self, acceptance_service, informative_dataset):
        report = acceptance_service.run_experiment('mf', informative_dataset, 'cold', repetitions=10)
        assert 0.48 <= report.mean <= 0.52

    def test_tags_beat_mf_and_match_lsi_lr_on_cold_items(self, acceptance_service, informative_dataset):
        tags = acceptance_service.run_experiment('lightfm-tags', informative_dataset, 'cold', repetitions=10)
        mf = acceptance_service.run_experiment('mf', informative_dataset, 'cold', repetitions=10)
        lsi_lr = acceptance_service.run_experiment('lsi-lr', informative_dataset, 'cold', repetitions=10)
        assert tags.mean > mf.mean + 0.2
        assert tags.mean >= lsi_lr.mean - 0.01

    def test_more_dimensions_do_not_hurt(self, acceptance_service, informative_dataset):
        reports = acceptance_service.dimension_sweep(['lightfm-tags', 'lsi-lr'], informative_dataset, [2, 16, 64], repetitions=3)
        auc = {(r.model, r.latent_dim): r.mean for r in reports}
        assert auc[('lightfm-tags', 64)] >= auc[('lightfm-tags', 2)] - 0.01
        assert auc[('lightfm-tags', 16)] >= auc[('lsi-lr', 16)]

    def test_parallel_training_matches_serial_quality(self):
        dataset = generate_synthetic(n_users=500, n_items=200, n_tags=20, n_groups=4, seed=6)
        split = warm_split(dataset.interactions, seed=6)
        mapping = build_feature_mapping(dataset)
        aucs = {}
        for threads in (1, 4):
            model = ModelState.initialize(mapping.n_features('user'), mapping.n_features('item'), 16, seed=6)
            config = TrainConfig(epochs_max=10, threads=threads, rng_seed=6)
            aucs[threads] = fit(model, mapping, split.train, split.validation, config).best_auc
        assert abs(aucs[4] - aucs[1]) <= 0.01
