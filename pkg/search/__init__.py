from .similarity import cosine_similarity, cosine_to_all, top_k_exact, EmbeddingTable, named
from .lsh import HyperplaneSet, LshIndex, lsh_code, lsh_codes, hamming_distance
from .rp_tree import RPTree, RPNode, RPLeaf, RPForest, build_rp_tree, query

__all__ = [
    'cosine_similarity', 'cosine_to_all', 'top_k_exact', 'EmbeddingTable', 'named',
    'HyperplaneSet', 'LshIndex', 'lsh_code', 'lsh_codes', 'hamming_distance',
    'RPTree', 'RPNode', 'RPLeaf', 'RPForest', 'build_rp_tree', 'query',
]
