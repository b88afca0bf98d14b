from .indicator import make_indicator_mapping, indicator_name
from .svd import LatentFactorization, build_sparse, item_feature_matrix, truncated_svd
from .lsi_lr import LsiLrModel, train_lsi_lr, user_objective, fit_user, prior_log_odds
from .lsi_up import LsiUpModel, train_lsi_up, user_profile_matrix

__all__ = [
    "make_indicator_mapping", "indicator_name",
    "LatentFactorization", "build_sparse", "item_feature_matrix", "truncated_svd",
    "LsiLrModel", "train_lsi_lr", "user_objective", "fit_user", "prior_log_odds",
    "LsiUpModel", "train_lsi_up", "user_profile_matrix",
]
