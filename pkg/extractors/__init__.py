from .movielens_extractor import MovieLensExtractor, parse_ratings, binarize, parse_movies, parse_tag_genome
from .stackexchange_extractor import StackExchangeExtractor, StackExchangeDump, parse_stackexchange
from .text import tokenize_about, build_about_vocabulary, restrict_tokens
from .negatives import sample_negatives
from .features import build_feature_mapping, item_feature_names, user_feature_names
from .dataset_io import write_dataset, read_dataset

__all__ = [
    'MovieLensExtractor', 'parse_ratings', 'binarize', 'parse_movies', 'parse_tag_genome',
    'StackExchangeExtractor', 'StackExchangeDump', 'parse_stackexchange',
    'tokenize_about', 'build_about_vocabulary', 'restrict_tokens', 'sample_negatives',
    'build_feature_mapping', 'item_feature_names', 'user_feature_names',
    'write_dataset', 'read_dataset',
]
