from typing import Optional, Sequence

from data.models import FeatureMapping
from utils.exceptions import ValidationError
from utils.validators import require_positive_int


def indicator_name(side: str, entity_id) -> str:
    return f"{side}:{entity_id}"


def make_indicator_mapping(
    n_users: int,
    n_items: int,
    user_ids: Optional[Sequence[str]] = None,
    item_ids: Optional[Sequence[str]] = None
) -> FeatureMapping:
    """Every user and item gets exactly one feature of its own.

    Training the core model on this mapping is plain matrix factorisation
    with user and item biases and a sigmoid link.
    """
    require_positive_int(n_users, 'n_users')
    require_positive_int(n_items, 'n_items')
    user_ids = [str(u) for u in (user_ids if user_ids is not None else range(n_users))]
    item_ids = [str(i) for i in (item_ids if item_ids is not None else range(n_items))]
    if len(user_ids) != n_users or len(item_ids) != n_items:
        raise ValidationError("Entity id lists must match the entity counts")
    return FeatureMapping.build(
        user_ids,
        item_ids,
        [[indicator_name('user', u)] for u in user_ids],
        [[indicator_name('item', i)] for i in item_ids],
    )
