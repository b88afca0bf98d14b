"""Command implementations; each returns an exit code and writes results to stdout."""

import argparse
import sys
from pathlib import Path
from typing import Any, Dict, Optional, TextIO

from config.schemas import RunConfigSchema, load_or_raise
from config.settings import Config
from core.serialization import dump_feature_mapping, load_model, save_model
from core.state import ModelState
from evaluation.experiment_service import ExperimentService, results_table, sweep_rows, SWEEP_HEADER
from evaluation.splits import train_validation_split
from evaluation.synthetic import generate_from_spec
from evaluation.variants import get_variant, check_compatible, variant_mapping
from extractors.dataset_io import read_dataset, write_dataset
from extractors.movielens_extractor import MovieLensExtractor
from extractors.stackexchange_extractor import StackExchangeExtractor
from search.lsh import LshIndex
from search.rp_tree import RPForest
from search.similarity import EmbeddingTable, named, top_k_exact
from training.config import TrainConfig
from training.trainer import fit, fold_in_mapping
from utils.logging_config import LoggerMixin
from utils.tables import write_table
from .console import Console


class CommandRunner(LoggerMixin):

    def __init__(self, settings: Config, stdout: Optional[TextIO] = None, console: Optional[Console] = None):
        super().__init__()
        self.settings = settings
        self._stdout = stdout
        self.console = console or Console()

    @property
    def stdout(self) -> TextIO:
        return self._stdout or sys.stdout

    def run(self, args: argparse.Namespace) -> int:
        handler = getattr(self, f"cmd_{args.command}")
        return handler(args)

    def _validate(self, args: argparse.Namespace, **payload: Any) -> Dict[str, Any]:
        payload = {k: v for k, v in payload.items() if v is not None}
        return load_or_raise(RunConfigSchema(), {'command': args.command, **payload})

    def _train_config(self, args: argparse.Namespace) -> TrainConfig:
        return TrainConfig.from_settings(self.settings)

    # ingest

    def cmd_ingest(self, args: argparse.Namespace) -> int:
        self._validate(args, out=args.out)
        if args.source == 'movielens':
            extractor = MovieLensExtractor(threshold=self.settings.TAG_THRESHOLD)
            dataset = extractor.build_dataset(args.ratings, args.genome, args.movies, args.tags, name=Path(args.out).name)
        else:
            dataset = StackExchangeExtractor().build_dataset(
                args.posts, args.users,
                negative_ratio=self.settings.NEGATIVE_RATIO,
                vocabulary_size=self.settings.ABOUT_VOCABULARY_SIZE,
                seed=self.settings.SEED,
                name=Path(args.out).name,
            )
        write_dataset(dataset, args.out)
        write_table(sorted(dataset.summary().items()), self.stdout)
        self.console.success(f"Dataset written to {args.out}")
        return 0

    # train

    def cmd_train(self, args: argparse.Namespace) -> int:
        self._validate(args, dataset=args.dataset, model_path=args.resume, out=args.out,
                       latent_dim=self.settings.LATENT_DIM, seed=self.settings.SEED)
        dataset = read_dataset(args.dataset)
        variant = get_variant(args.variant)
        check_compatible(variant, dataset)
        config = self._train_config(args)
        mapping = variant_mapping(variant, dataset)

        if args.resume:
            model, saved_mapping = load_model(args.resume)
            mapping = fold_in_mapping(model, saved_mapping, mapping, seed=self.settings.SEED)
            self.console.info(f"Resuming from {args.resume} at epoch {model.epoch_counter}")
        else:
            model = ModelState.initialize(
                mapping.n_features('user'), mapping.n_features('item'), self.settings.LATENT_DIM, seed=self.settings.SEED
            )

        split = train_validation_split(dataset.interactions, self.settings.VALIDATION_FRACTION, seed=self.settings.SEED)
        history = fit(model, mapping, split.train, split.validation, config)
        save_model(model, mapping, args.out)

        history.to_table(args.history or f"{args.out}.history.tsv")
        history.to_table(self.stdout)
        self.console.success(f"Model written to {args.out} (best epoch {history.best_epoch})")
        return 0

    # evaluation

    def _service(self, args: argparse.Namespace) -> ExperimentService:
        service = ExperimentService.from_settings(self.settings)
        service.workers = getattr(args, 'workers', 1) or 1
        return service

    def cmd_experiment(self, args: argparse.Namespace) -> int:
        self._validate(args, dataset=args.dataset, variants=args.variants, split=args.split, out=args.out,
                       repetitions=self.settings.REPETITIONS, seed=self.settings.SEED)
        dataset = read_dataset(args.dataset)
        service = self._service(args)
        reports = [
            service.run_experiment(name, dataset, args.split, self.settings.REPETITIONS)
            for name in args.variants
        ]
        header, rows = results_table(reports)
        write_table(rows, self.stdout, header=header)
        if args.out:
            write_table(rows, args.out, header=header)
        return 0

    def cmd_sweep(self, args: argparse.Namespace) -> int:
        self._validate(args, dataset=args.dataset, variants=args.variants, dims=args.dims, split=args.split,
                       out=args.out, repetitions=self.settings.REPETITIONS)
        dataset = read_dataset(args.dataset)
        reports = self._service(args).dimension_sweep(
            args.variants, dataset, args.dims, self.settings.REPETITIONS, split_kind=args.split
        )
        rows = sweep_rows(reports)
        write_table(rows, self.stdout, header=SWEEP_HEADER)
        if args.out:
            write_table(rows, args.out, header=SWEEP_HEADER)
        return 0

    # model inspection

    def cmd_similar(self, args: argparse.Namespace) -> int:
        self._validate(args, model_path=args.model_path, seed=self.settings.SEED)
        model, mapping = load_model(args.model_path)
        if args.tag is not None:
            table, query = EmbeddingTable.from_features(model, mapping, 'item'), args.tag
        else:
            table, query = EmbeddingTable.from_entities(model, mapping, 'item'), args.item

        index = table.resolve(query)
        if args.approximate == 'exact':
            results = top_k_exact(table, index, args.k)
        elif args.approximate == 'rp':
            forest = RPForest.build(table.vectors, args.trees, args.leaf_capacity, seed=self.settings.SEED)
            results = forest.query(table.vectors[index], args.k, exclude=index)
        else:
            results = LshIndex.build(table.vectors, args.bits, seed=self.settings.SEED).query(
                table.vectors[index], args.k, exclude=index
            )

        write_table(
            ((rank, name, sim) for rank, (name, sim) in enumerate(named(table, results), start=1)),
            self.stdout
        )
        return 0

    def cmd_features(self, args: argparse.Namespace) -> int:
        self._validate(args, model_path=args.model_path)
        _, mapping = load_model(args.model_path)
        dump_feature_mapping(mapping, args.side, self.stdout)
        return 0

    def cmd_synth(self, args: argparse.Namespace) -> int:
        self._validate(args, out=args.out)
        spec: Dict[str, Any] = {'seed': self.settings.SEED}
        spec.update(args.spec or {})
        for key in ('n_users', 'n_items', 'n_tags', 'n_groups', 'tags_per_item',
                    'interactions_per_user', 'noise', 'words_per_user'):
            if getattr(args, key) is not None:
                spec[key] = getattr(args, key)
        dataset = generate_from_spec(spec, name=Path(args.out).name)
        write_dataset(dataset, args.out)
        write_table(sorted(dataset.summary().items()), self.stdout)
        return 0

