"""Canonical on-disk dataset: tab-delimited interaction and feature files."""

from pathlib import Path
from typing import Dict, List, Optional, Union

from data.models import EntityIndex, InteractionSet, RecommendationDataset
from utils.exceptions import DataParseError
from utils.logging_config import get_logger
from utils.tables import read_table, write_table

INTERACTIONS_FILE = 'interactions.tsv'
ITEM_FEATURES_FILE = 'item_features.tsv'
USER_FEATURES_FILE = 'user_features.tsv'
TAG_GROUPS_FILE = 'tag_groups.tsv'

logger = get_logger('extractors.dataset_io')


def _entity_rows(entities: EntityIndex, features: List[List[str]]):
    # entities without features still get one row so they survive a round trip
    for entity, names in zip(entities, features):
        if names:
            for name in names:
                yield entity, name
        else:
            yield entity, ''


def write_dataset(dataset: RecommendationDataset, directory: Union[str, Path]) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    users, items = dataset.users, dataset.items
    write_table(
        ((users.name(u), items.name(i), label) for u, i, label in dataset.interactions.triples()),
        directory / INTERACTIONS_FILE
    )
    write_table(_entity_rows(items, dataset.item_tags), directory / ITEM_FEATURES_FILE)
    if dataset.user_tokens is not None:
        write_table(_entity_rows(users, dataset.user_tokens), directory / USER_FEATURES_FILE)
    if dataset.tag_groups:
        write_table(sorted(dataset.tag_groups.items()), directory / TAG_GROUPS_FILE)

    logger.info("Wrote dataset", extra={'directory': str(directory), 'interactions': len(dataset.interactions)})
    return directory


def _read_entity_features(path: Path, entities: EntityIndex) -> Dict[str, List[str]]:
    features: Dict[str, List[str]] = {}
    for line_number, row in enumerate(read_table(path), start=1):
        if len(row) != 2:
            raise DataParseError("Expected entity<TAB>feature", source=str(path), line_number=line_number)
        entity, name = row
        entities.get_or_add(entity)
        names = features.setdefault(entity, [])
        if name and name not in names:
            names.append(name)
    return features


def read_dataset(directory: Union[str, Path], name: Optional[str] = None) -> RecommendationDataset:
    directory = Path(directory)
    interactions_path = directory / INTERACTIONS_FILE
    if not interactions_path.exists():
        raise DataParseError(f"No {INTERACTIONS_FILE} in {directory}", source=str(directory))

    users, items = EntityIndex(), EntityIndex()
    item_features = _read_entity_features(directory / ITEM_FEATURES_FILE, items) \
        if (directory / ITEM_FEATURES_FILE).exists() else {}
    user_path = directory / USER_FEATURES_FILE
    user_features = _read_entity_features(user_path, users) if user_path.exists() else None

    triples = []
    for line_number, row in enumerate(read_table(interactions_path), start=1):
        if len(row) != 3 or row[2] not in ('0', '1'):
            raise DataParseError("Expected user<TAB>item<TAB>label with label 0 or 1",
                                 source=str(interactions_path), line_number=line_number)
        triples.append((users.get_or_add(row[0]), items.get_or_add(row[1]), int(row[2])))

    tag_groups = None
    if (directory / TAG_GROUPS_FILE).exists():
        tag_groups = {tag: int(group) for tag, group in read_table(directory / TAG_GROUPS_FILE)}

    dataset = RecommendationDataset(
        name=name or directory.name,
        interactions=InteractionSet.from_triples(triples),
        users=users,
        items=items,
        item_tags=[item_features.get(i, []) for i in items],
        user_tokens=[user_features.get(u, []) for u in users] if user_features is not None else None,
        tag_groups=tag_groups,
    )
    logger.info("Read dataset", extra={'directory': str(directory), 'interactions': len(dataset.interactions)})
    return dataset
