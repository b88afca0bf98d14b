import re
from collections import Counter
from typing import Iterable, List, Sequence

_HTML_TAG = re.compile(r'<[^>]*>')
_NON_ALPHA = re.compile(r'[^A-Za-z]+')


def tokenize_about(text: str) -> List[str]:
    """Strip HTML tags, blank out non-letters, lowercase, split.

    Character entities are not decoded: `&amp;` contributes the token `amp`.
    """
    if not text:
        return []
    text = _HTML_TAG.sub(' ', text)
    text = _NON_ALPHA.sub(' ', text)
    return text.lower().split()


def build_about_vocabulary(tokens_by_user: Iterable[Sequence[str]], max_size: int = 5000) -> List[str]:
    """Most frequent tokens first; equal counts ordered alphabetically."""
    counts = Counter(token for tokens in tokens_by_user for token in tokens)
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [token for token, _ in ranked[:max_size]]


def restrict_tokens(tokens: Sequence[str], vocabulary: Iterable[str]) -> List[str]:
    """Distinct in-vocabulary tokens in first-seen order."""
    allowed = set(vocabulary)
    return list(dict.fromkeys(t for t in tokens if t in allowed))
