"""Feature-name construction for the model variants."""

from typing import List

from baselines.indicator import indicator_name
from data.models import FeatureMapping, RecommendationDataset
from utils.exceptions import ValidationError

ABOUT_PREFIX = 'about:'
# shared by items that carry no metadata at all, so every f_i stays non-empty
NO_FEATURES = '__no_features__'


def item_feature_names(dataset: RecommendationDataset, include_ids: bool = False) -> List[List[str]]:
    lists = []
    for item_id, tags in zip(dataset.items, dataset.item_tags):
        names = list(tags)
        if include_ids:
            names.append(indicator_name('item', item_id))
        lists.append(names or [NO_FEATURES])
    return lists


def user_feature_names(dataset: RecommendationDataset, include_about: bool = False) -> List[List[str]]:
    """Users always carry their indicator; About-Me tokens are added on request."""
    if include_about and not dataset.has_user_features:
        raise ValidationError(f"Dataset {dataset.name!r} has no user metadata", field_name='dataset')
    lists = [[indicator_name('user', user_id)] for user_id in dataset.users]
    if include_about:
        for names, tokens in zip(lists, dataset.user_tokens):
            names.extend(ABOUT_PREFIX + t for t in tokens)
    return lists


def build_feature_mapping(
    dataset: RecommendationDataset,
    item_ids: bool = False,
    user_about: bool = False
) -> FeatureMapping:
    return FeatureMapping.build(
        list(dataset.users),
        list(dataset.items),
        user_feature_names(dataset, include_about=user_about),
        item_feature_names(dataset, include_ids=item_ids),
    )
