"""Ranking a catalog under a trained profile, with two explanation views.

A recommendation is explained by the (slot, token) cues it contains,
weighted by how often each appears in the book; a cue is explained by the
rated training books that gave it positive mass.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Collection, Sequence

from .corpus import Catalog, TokenizedBook
from .learner import Profile, RatedExample

DEFAULT_EXPLANATION_ROWS = 20
DEFAULT_FEATURE_ROWS = 5


@dataclass(frozen=True)
class ExplanationRow:
    slot: str
    token: str
    strength: float
    count: int
    influence: float  # strength * count


@dataclass(frozen=True)
class RecommendationExplanation:
    book_id: str
    prior_log_odds: float
    score: float
    rows: tuple[ExplanationRow, ...]


@dataclass(frozen=True)
class FeatureSource:
    book_id: str
    title: str
    rating: int
    count: int
    contribution: float  # positive weight * in-book count


@dataclass(frozen=True)
class FeatureExplanation:
    slot: str
    token: str
    strength: float
    rows: tuple[FeatureSource, ...]


def rank(
    profile: Profile,
    catalog: Catalog,
    exclude: Collection[str] = frozenset(),
) -> list[tuple[str, float]]:
    """Score every non-excluded book, descending; ties break by ascending id."""
    exclude = set(exclude)
    entries = [
        (book.id, profile.log_odds(book)) for book in catalog if book.id not in exclude
    ]
    entries.sort(key=lambda entry: (-entry[1], entry[0]))
    return entries


def recommend_top(
    profile: Profile,
    catalog: Catalog,
    exclude: Collection[str] = frozenset(),
    n: int = 10,
) -> list[tuple[str, float]]:
    if n < 0:
        raise ValueError(f"recommendation count must be >= 0, got {n}")
    return rank(profile, catalog, exclude)[:n]


def bottom(
    profile: Profile,
    catalog: Catalog,
    exclude: Collection[str] = frozenset(),
    n: int = 10,
) -> list[tuple[str, float]]:
    """The tail of the ranking (disrecommendations), worst first."""
    if n < 0:
        raise ValueError(f"count must be >= 0, got {n}")
    tail = rank(profile, catalog, exclude)[-n:] if n else []
    return tail[::-1]


def explain_recommendation(
    profile: Profile,
    book: TokenizedBook,
    k: int | None = DEFAULT_EXPLANATION_ROWS,
) -> RecommendationExplanation:
    """Top-k cues by influence = strength * count-in-book.

    With ``k=None`` all rows are returned and the prior log-odds plus the
    row influences sum to the book's score.
    """
    rows: list[ExplanationRow] = []
    for slot in profile.slot_mask:
        table = profile.cond.get(slot)
        if not table:
            continue
        for token, count in book.bag(slot).items():
            pair = table.get(token)
            if pair is None:
                continue
            strength = pair[0] - pair[1]
            rows.append(
                ExplanationRow(
                    slot=slot,
                    token=token,
                    strength=strength,
                    count=count,
                    influence=strength * count,
                )
            )
    rows.sort(key=lambda row: (-row.influence, row.slot, row.token))
    if k is not None:
        rows = rows[:k]
    return RecommendationExplanation(
        book_id=book.id,
        prior_log_odds=profile.prior_log_odds,
        score=profile.log_odds(book),
        rows=tuple(rows),
    )


def explain_feature(
    profile: Profile,
    training: Sequence[RatedExample],
    slot: str,
    token: str,
    k: int | None = DEFAULT_FEATURE_ROWS,
) -> FeatureExplanation:
    """The training books that most pushed a cue positive.

    Contribution is the example's positive weight times the token's in-book
    count, the exact mass it added to the cue's positive estimate.
    """
    strength = profile.strength(slot, token)  # raises for unknown (slot, token)
    rows: list[FeatureSource] = []
    for ex in training:
        count = ex.book.bag(slot).get(token, 0)
        if count <= 0:
            continue
        rows.append(
            FeatureSource(
                book_id=ex.book.id,
                title=ex.book.title_display,
                rating=ex.rating,
                count=count,
                contribution=ex.alpha_pos * count,
            )
        )
    rows.sort(key=lambda row: (-row.contribution, row.book_id))
    if k is not None:
        rows = rows[:k]
    return FeatureExplanation(slot=slot, token=token, strength=strength, rows=tuple(rows))


def top_features(profile: Profile, n: int = 20) -> list[tuple[str, str, float]]:
    """The profile's strongest positive cues as (slot, token, strength)."""
    features = [
        (slot, token, pair[0] - pair[1])
        for slot in profile.slot_mask
        for token, pair in profile.cond.get(slot, {}).items()
    ]
    features.sort(key=lambda feat: (-feat[2], feat[0], feat[1]))
    return features[:n]
