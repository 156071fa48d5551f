"""Content-based book recommending from rated examples.

Pipeline: pattern-based slot extraction -> tokenized vector-of-bags catalog
-> rating-weighted naive Bayes profile -> ranked recommendations with
feature-level explanations, plus a cross-validated evaluation harness and
an HTTP service for the interactive feedback loop.
"""

__version__ = "0.1.0"

from .corpus import Catalog, TokenizedBook, build_book, normalize_author, tokenize
from .extraction import (
    ExtractionRule,
    ExtractionRuleSet,
    RawBookRecord,
    extract_record,
    filter_adequate,
    parse_rule_config,
)
from .learner import Profile, RatedExample, rating_weights, train
from .recommender import explain_feature, explain_recommendation, rank, recommend_top

__all__ = [
    "Catalog",
    "ExtractionRule",
    "ExtractionRuleSet",
    "Profile",
    "RatedExample",
    "RawBookRecord",
    "TokenizedBook",
    "build_book",
    "explain_feature",
    "explain_recommendation",
    "extract_record",
    "filter_adequate",
    "normalize_author",
    "parse_rule_config",
    "rank",
    "rating_weights",
    "recommend_top",
    "tokenize",
    "train",
]
