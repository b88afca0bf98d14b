"""StackExchange dump parsing: answers become positive (answerer, question) pairs."""

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Union

from data.models import EntityIndex, InteractionSet, RecommendationDataset, POSITIVE
from utils.exceptions import DataParseError
from utils.logging_config import LoggerMixin
from .negatives import sample_negatives
from .text import tokenize_about, build_about_vocabulary, restrict_tokens

QUESTION = '1'
ANSWER = '2'

PathLike = Union[str, Path]


@dataclass
class StackExchangeDump:
    positives: InteractionSet
    users: EntityIndex
    items: EntityIndex
    item_tags: List[List[str]]
    about_texts: Dict[str, str] = field(default_factory=dict)
    skipped_answers: int = 0


class StackExchangeExtractor(LoggerMixin):

    def __init__(self):
        super().__init__()
        self.patterns = self._setup_regex_patterns()

    def _setup_regex_patterns(self) -> Dict[str, re.Pattern]:
        return {
            'angle_tags': re.compile(r'<([^<>]+)>'),
        }

    def parse_tags(self, raw: Optional[str]) -> List[str]:
        """Accepts both `<a><b>` and `|a|b|` encodings."""
        if not raw:
            return []
        if '<' in raw:
            tags = self.patterns['angle_tags'].findall(raw)
        else:
            tags = raw.split('|')
        return list(dict.fromkeys(t.strip() for t in tags if t.strip()))

    def _rows(self, path: PathLike):
        path = Path(path)
        if not path.exists():
            raise DataParseError(f"Input file not found: {path}", source=str(path))
        try:
            for _, element in ET.iterparse(str(path), events=('end',)):
                if element.tag == 'row':
                    yield dict(element.attrib)
                    element.clear()
        except ET.ParseError as e:
            line_number = e.position[0] if getattr(e, 'position', None) else None
            raise DataParseError(f"Malformed XML: {e}", source=str(path), line_number=line_number) from e

    def parse_posts(self, posts_path: PathLike) -> StackExchangeDump:
        questions: Dict[str, List[str]] = {}
        answers = []
        for row in self._rows(posts_path):
            post_type = row.get('PostTypeId')
            if post_type == QUESTION:
                if 'Id' not in row:
                    raise DataParseError("Question row without Id", source=str(posts_path), details={'row': row})
                questions[row['Id']] = self.parse_tags(row.get('Tags'))
            elif post_type == ANSWER:
                answers.append((row.get('OwnerUserId'), row.get('ParentId')))

        items = EntityIndex(questions)
        users = EntityIndex()
        pairs = {}
        skipped = 0
        for owner, parent in answers:
            if not owner or parent not in questions:
                skipped += 1
                continue
            pairs[(users.get_or_add(owner), items.index(parent))] = POSITIVE

        if skipped:
            self.log_warning("Skipped answers without a known question or owner", skipped=skipped)
        positives = InteractionSet.from_triples((u, i, label) for (u, i), label in pairs.items())
        self.log_operation("parse_posts", questions=len(items), answers=len(answers), positives=len(positives))
        return StackExchangeDump(
            positives=positives,
            users=users,
            items=items,
            item_tags=[questions[q] for q in items],
            skipped_answers=skipped,
        )

    def parse_users(self, users_path: PathLike) -> Dict[str, str]:
        about = {}
        for row in self._rows(users_path):
            if 'Id' in row:
                about[row['Id']] = row.get('AboutMe', '')
        self.log_operation("parse_users", users=len(about))
        return about

    def parse(self, posts_path: PathLike, users_path: Optional[PathLike] = None) -> StackExchangeDump:
        dump = self.parse_posts(posts_path)
        if users_path:
            dump.about_texts = self.parse_users(users_path)
        return dump

    def build_dataset(
        self,
        posts_path: PathLike,
        users_path: Optional[PathLike] = None,
        negative_ratio: int = 3,
        vocabulary_size: int = 5000,
        seed: int = 0,
        name: str = 'stackexchange'
    ) -> RecommendationDataset:
        """Positives from answers, `negative_ratio` sampled negatives per positive,
        About-Me tokens restricted to the `vocabulary_size` most common ones."""
        dump = self.parse(posts_path, users_path)
        negatives = sample_negatives(dump.positives, len(dump.items), ratio=negative_ratio, seed=seed)
        interactions = InteractionSet.concat([dump.positives, negatives])

        user_tokens = None
        if users_path:
            tokens = [tokenize_about(dump.about_texts.get(u, '')) for u in dump.users]
            vocabulary = build_about_vocabulary(tokens, vocabulary_size)
            user_tokens = [restrict_tokens(t, vocabulary) for t in tokens]

        dataset = RecommendationDataset(name, interactions, dump.users, dump.items, dump.item_tags, user_tokens)
        self.log_operation("build_dataset", **{f"dataset_{k}": v for k, v in dataset.summary().items()})
        return dataset


def parse_stackexchange(posts_path: PathLike, users_path: Optional[PathLike] = None) -> StackExchangeDump:
    return StackExchangeExtractor().parse(posts_path, users_path)
