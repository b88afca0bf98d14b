"""MovieLens ratings, movie genres and Tag Genome relevance files."""

import re
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from data.models import EntityIndex, InteractionSet, RawRating, RecommendationDataset, TagAssignment, POSITIVE, NEGATIVE
from utils.exceptions import DataParseError, HybridFMError
from utils.logging_config import LoggerMixin

POSITIVE_RATING = 4.0
DEFAULT_TAG_THRESHOLD = 0.8
GENRE_PREFIX = 'genre:'
NO_GENRES = '(no genres listed)'

PathLike = Union[str, Path]


class MovieLensExtractor(LoggerMixin):

    def __init__(self, threshold: float = DEFAULT_TAG_THRESHOLD):
        super().__init__()
        self.threshold = threshold
        self.patterns = self._setup_regex_patterns()

    def _setup_regex_patterns(self) -> Dict[str, re.Pattern]:
        return {
            'double_colon': re.compile(r'::'),
            'tab': re.compile(r'\t'),
            'comma': re.compile(r','),
        }

    def _split(self, line: str) -> List[str]:
        delimiter = self.patterns['tab'] if '\t' in line else self.patterns['comma']
        return [f.strip().strip('"') for f in delimiter.split(line)]

    def _lines(self, path: PathLike):
        path = Path(path)
        if not path.exists():
            raise DataParseError(f"Input file not found: {path}", source=str(path))
        with open(path, 'r', encoding='utf-8', errors='replace') as handle:
            for line_number, line in enumerate(handle, start=1):
                line = line.rstrip('\r\n')
                if line.strip():
                    yield line_number, line

    def parse_ratings(self, path: PathLike) -> List[RawRating]:
        ratings = []
        for line_number, line in self._lines(path):
            fields = self.patterns['double_colon'].split(line)
            if len(fields) != 4:
                raise DataParseError(
                    f"Expected user::item::rating::timestamp, got {len(fields)} fields",
                    source=str(path), line_number=line_number
                )
            user_id, item_id, rating, timestamp = fields
            try:
                ratings.append(RawRating(user_id.strip(), item_id.strip(), float(rating), int(timestamp)))
            except (ValueError, HybridFMError) as e:
                raise DataParseError(f"Bad rating row: {e}", source=str(path), line_number=line_number) from e

        self.log_operation("parse_ratings", source=str(path), ratings=len(ratings))
        return ratings

    def binarize(self, ratings: List[RawRating]) -> Tuple[InteractionSet, EntityIndex, EntityIndex]:
        """Ratings >= 4.0 become positives, everything else negatives.

        A user who rated the same item more than once keeps the latest rating.
        """
        latest: Dict[Tuple[str, str], RawRating] = {}
        for rating in ratings:
            key = (rating.user_id, rating.item_id)
            if key not in latest or rating.timestamp >= latest[key].timestamp:
                latest[key] = rating

        users, items = EntityIndex(), EntityIndex()
        triples = []
        for (user_id, item_id), rating in latest.items():
            label = POSITIVE if rating.rating >= POSITIVE_RATING else NEGATIVE
            triples.append((users.get_or_add(user_id), items.get_or_add(item_id), label))

        interactions = InteractionSet.from_triples(triples)
        self.log_operation(
            "binarize", interactions=len(interactions), positives=int(interactions.labels.sum()),
            duplicates_dropped=len(ratings) - len(latest)
        )
        return interactions, users, items

    def parse_movies(self, path: PathLike) -> Dict[str, List[str]]:
        """`item::title::Genre1|Genre2` -> item id -> prefixed genre features."""
        genres = {}
        for line_number, line in self._lines(path):
            fields = self.patterns['double_colon'].split(line)
            if len(fields) < 3:
                raise DataParseError("Expected item::title::genres", source=str(path), line_number=line_number)
            item_id, raw_genres = fields[0].strip(), fields[-1].strip()
            genres[item_id] = [
                GENRE_PREFIX + g for g in raw_genres.split('|') if g and g != NO_GENRES
            ]
        self.log_operation("parse_movies", source=str(path), items=len(genres))
        return genres

    def parse_tag_names(self, path: PathLike) -> Dict[str, str]:
        """Tag id -> tag name from `id<TAB>name[...]` or `id,name` rows, header optional."""
        names = {}
        for line_number, line in self._lines(path):
            fields = self._split(line)
            if len(fields) < 2:
                raise DataParseError("Expected tag id and tag name", source=str(path), line_number=line_number)
            if line_number == 1 and not fields[0].strip().isdigit():
                continue
            names[fields[0].strip()] = fields[1].strip()
        return names

    def parse_tag_genome(
        self,
        path: PathLike,
        threshold: Optional[float] = None,
        tag_names: Optional[Dict[str, str]] = None
    ) -> Dict[str, List[str]]:
        """Item id -> tags whose relevance is at least `threshold`."""
        threshold = self.threshold if threshold is None else threshold
        kept: Dict[str, List[str]] = {}
        rows = dropped = 0
        for line_number, line in self._lines(path):
            fields = self._split(line)
            if len(fields) != 3:
                raise DataParseError("Expected item, tag, relevance", source=str(path), line_number=line_number)
            try:
                relevance = float(fields[2])
            except ValueError:
                if line_number == 1:
                    continue
                raise DataParseError(f"Relevance {fields[2]!r} is not a number", source=str(path), line_number=line_number)

            tag = tag_names.get(fields[1], fields[1]) if tag_names else fields[1]
            assignment = TagAssignment(fields[0], tag, relevance)
            rows += 1
            if assignment.relevance >= threshold:
                kept.setdefault(assignment.item_id, []).append(assignment.tag)
            else:
                dropped += 1

        self.log_operation("parse_tag_genome", source=str(path), rows=rows, dropped=dropped, threshold=threshold)
        return kept

    def build_dataset(
        self,
        ratings_path: PathLike,
        genome_path: Optional[PathLike] = None,
        movies_path: Optional[PathLike] = None,
        tags_path: Optional[PathLike] = None,
        name: str = 'movielens'
    ) -> RecommendationDataset:
        interactions, users, items = self.binarize(self.parse_ratings(ratings_path))
        genres = self.parse_movies(movies_path) if movies_path else {}
        tag_names = self.parse_tag_names(tags_path) if tags_path else None
        genome = self.parse_tag_genome(genome_path, tag_names=tag_names) if genome_path else {}

        item_tags = [
            list(dict.fromkeys(genres.get(item_id, []) + genome.get(item_id, [])))
            for item_id in items
        ]
        dataset = RecommendationDataset(name, interactions, users, items, item_tags)
        self.log_operation("build_dataset", **{f"dataset_{k}": v for k, v in dataset.summary().items()})
        return dataset


def parse_ratings(path: PathLike) -> List[RawRating]:
    return MovieLensExtractor().parse_ratings(path)


def binarize(ratings: List[RawRating]) -> Tuple[InteractionSet, EntityIndex, EntityIndex]:
    return MovieLensExtractor().binarize(ratings)


def parse_movies(path: PathLike) -> Dict[str, List[str]]:
    return MovieLensExtractor().parse_movies(path)


def parse_tag_genome(
    path: PathLike,
    threshold: float = DEFAULT_TAG_THRESHOLD,
    tag_names: Optional[Dict[str, str]] = None
) -> Dict[str, List[str]]:
    return MovieLensExtractor(threshold).parse_tag_genome(path, tag_names=tag_names)
