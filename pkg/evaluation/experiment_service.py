"""Repeated train/evaluate runs, dimensionality sweeps and results tables."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Dict, List, Optional, Sequence, Tuple

from config.settings import Config
from data.models import DatasetSplit, ExperimentReport, RecommendationDataset
from training.config import TrainConfig
from utils.exceptions import ValidationError
from utils.logging_config import LoggerMixin
from .metrics import mean_auc
from .splits import make_split
from .variants import check_compatible, get_variant, train_variant

SWEEP_HEADER = ('model', 'd', 'mean_auc', 'std_auc')


class ExperimentService(LoggerMixin):

    def __init__(
        self,
        train_config: Optional[TrainConfig] = None,
        latent_dim: int = 64,
        test_fraction: float = 0.2,
        cold_item_fraction: float = 0.2,
        validation_fraction: float = 0.1,
        workers: int = 1
    ):
        super().__init__()
        self.train_config = train_config or TrainConfig()
        self.latent_dim = latent_dim
        self.test_fraction = test_fraction
        self.cold_item_fraction = cold_item_fraction
        self.validation_fraction = validation_fraction
        self.workers = workers

    @classmethod
    def from_settings(cls, settings: Config, **overrides) -> 'ExperimentService':
        return cls(
            train_config=TrainConfig.from_settings(settings, **overrides),
            latent_dim=settings.LATENT_DIM,
            test_fraction=settings.TEST_FRACTION,
            cold_item_fraction=settings.COLD_ITEM_FRACTION,
            validation_fraction=settings.VALIDATION_FRACTION,
        )

    def split(self, dataset: RecommendationDataset, kind: str, seed: int) -> DatasetSplit:
        return make_split(
            dataset.interactions, kind, seed,
            test_fraction=self.test_fraction,
            cold_item_fraction=self.cold_item_fraction,
            validation_fraction=self.validation_fraction,
        )

    def run_once(self, model_name: str, dataset: RecommendationDataset, split_kind: str, seed: int, d: int) -> float:
        """Split, train and score once; `seed` drives both the split and training."""
        variant = get_variant(model_name)
        split = self.split(dataset, split_kind, seed)
        config = replace(self.train_config, rng_seed=seed)
        scorer = train_variant(variant, dataset, split, d, config)
        auc = mean_auc(scorer.score(split.test.users, split.test.items), split.test)
        self.log_operation("run_once", model=model_name, dataset=dataset.name, split=split_kind, seed=seed, d=d, auc=auc)
        return auc

    def run_experiment(
        self,
        model_name: str,
        dataset: RecommendationDataset,
        split_kind: str,
        repetitions: int = 10,
        seeds: Optional[Sequence[int]] = None,
        latent_dim: Optional[int] = None
    ) -> ExperimentReport:
        check_compatible(get_variant(model_name), dataset)
        if repetitions < 1:
            raise ValidationError("repetitions must be at least 1", field_name='repetitions', field_value=repetitions)
        seeds = list(seeds) if seeds is not None else [self.train_config.rng_seed + r for r in range(repetitions)]
        if len(seeds) != repetitions:
            raise ValidationError(f"Got {len(seeds)} seeds for {repetitions} repetitions", field_name='seeds')
        d = latent_dim or self.latent_dim

        if self.workers > 1:
            with ThreadPoolExecutor(max_workers=self.workers, thread_name_prefix='experiment') as pool:
                aucs = list(pool.map(lambda s: self.run_once(model_name, dataset, split_kind, s, d), seeds))
        else:
            aucs = [self.run_once(model_name, dataset, split_kind, s, d) for s in seeds]

        report = ExperimentReport(model_name, dataset.name, split_kind, aucs, seeds, latent_dim=d)
        self.log_operation("run_experiment", model=model_name, dataset=dataset.name, split=split_kind,
                           mean_auc=report.mean, std_auc=report.std)
        return report

    def dimension_sweep(
        self,
        model_names: Sequence[str],
        dataset: RecommendationDataset,
        dims: Sequence[int],
        repetitions: int = 10,
        split_kind: str = 'cold'
    ) -> List[ExperimentReport]:
        dims = list(dims)
        if not dims or any(d < 1 for d in dims) or dims != sorted(set(dims)):
            raise ValidationError("dims must be positive and strictly ascending", field_name='dims', field_value=dims)
        for name in model_names:
            check_compatible(get_variant(name), dataset)
        return [
            self.run_experiment(name, dataset, split_kind, repetitions, latent_dim=d)
            for name in model_names
            for d in dims
        ]


def sweep_rows(reports: Sequence[ExperimentReport]) -> List[Tuple[str, int, float, float]]:
    return [(r.model, r.latent_dim, r.mean, r.std) for r in reports]


def results_table(reports: Sequence[ExperimentReport]) -> Tuple[List[str], List[List[str]]]:
    """Rows are models, columns are dataset x split kind, cells read `mean ± std`."""
    columns: List[Tuple[str, str]] = []
    cells: Dict[Tuple[str, Tuple[str, str]], str] = {}
    models: List[str] = []
    for report in reports:
        column = (report.dataset, report.split_kind)
        if column not in columns:
            columns.append(column)
        if report.model not in models:
            models.append(report.model)
        cells[(report.model, column)] = f"{report.mean:.4f} ± {report.std:.4f}"

    header = ['model'] + [f"{dataset} ({kind})" for dataset, kind in columns]
    rows = [[model] + [cells.get((model, column), '') for column in columns] for model in models]
    return header, rows


def run_experiment(
    model_name: str,
    dataset: RecommendationDataset,
    split_kind: str,
    repetitions: int = 10,
    seeds: Optional[Sequence[int]] = None,
    train_config: Optional[TrainConfig] = None,
    latent_dim: int = 64
) -> ExperimentReport:
    service = ExperimentService(train_config, latent_dim=latent_dim)
    return service.run_experiment(model_name, dataset, split_kind, repetitions, seeds)


def dimension_sweep(
    model_names: Sequence[str],
    dataset: RecommendationDataset,
    dims: Sequence[int],
    repetitions: int = 10,
    split_kind: str = 'cold',
    train_config: Optional[TrainConfig] = None
) -> List[ExperimentReport]:
    return ExperimentService(train_config).dimension_sweep(model_names, dataset, dims, repetitions, split_kind)
