"""Synthetic catalogs with a planted preference signal.

Generates books through the normal extraction record -> tokenized book
path. Every book gets background tokens drawn independently of its rating;
positively rated books (6..10) additionally receive marker tokens from a
dedicated pool, with the injection count growing with the rating, so a
learner that finds the markers can reproduce the rating order. The marker
slot is configurable, which makes corpora whose signal lives only in the
related-titles bag easy to build.
"""

from __future__ import annotations

import random

from .corpus import Catalog, build_book
from .extraction import RawBookRecord
from .learner import POSITIVE_THRESHOLD, RatedExample
from .slots import RELATED_TITLES, WORDS

MARKER_SLOTS = (WORDS, RELATED_TITLES)


def planted_corpus(
    n_books: int = 1000,
    n_markers: int = 200,
    marker_slot: str = WORDS,
    seed: int = 0,
    background_vocab: int = 1500,
    tokens_per_book: int = 30,
    author_pool: int = 40,
) -> tuple[Catalog, dict[str, int]]:
    """Build (catalog, ratings) with markers planted in positive books."""
    if marker_slot not in MARKER_SLOTS:
        raise ValueError(f"marker slot must be one of {MARKER_SLOTS}, got {marker_slot!r}")
    rng = random.Random(seed)
    markers = [f"marker{i:04d}" for i in range(n_markers)]
    background = [f"w{i:05d}" for i in range(background_vocab)]
    surnames = [f"penn{i:03d}" for i in range(author_pool)]

    records: list[RawBookRecord] = []
    ratings: dict[str, int] = {}
    for i in range(n_books):
        book_id = f"b{i:05d}"
        rating = rng.randint(1, 10)
        ratings[book_id] = rating

        synopsis_tokens = rng.choices(background, k=tokens_per_book)
        related_tokens = rng.choices(background, k=3)
        if rating >= POSITIVE_THRESHOLD:
            planted = rng.choices(markers, k=2 + 4 * (rating - POSITIVE_THRESHOLD + 1))
            if marker_slot == WORDS:
                synopsis_tokens += planted
            else:
                related_tokens += planted

        surname = rng.choice(surnames)
        fillers = {
            "title": [f"Planted Book {i:05d}"],
            "authors": [f"A. {surname.capitalize()}"],
            "synopses": [" ".join(synopsis_tokens)],
            "subjects": [" ".join(rng.choices(background, k=2))],
            "related-titles": [" ".join(related_tokens)],
            "related-authors": [f"B. {rng.choice(surnames).capitalize()}"],
        }
        records.append(RawBookRecord(id=book_id, fillers=fillers))

    catalog = Catalog(books=[build_book(rec) for rec in records])
    return catalog, ratings


def rated_examples(catalog: Catalog, ratings: dict[str, int]) -> list[RatedExample]:
    """Pair rated catalog books into training examples, ordered by id."""
    examples = []
    for book_id in sorted(ratings):
        book = catalog.get(book_id)
        if book is None:
            raise ValueError(f"rated id not in catalog: {book_id!r}")
        examples.append(RatedExample(book=book, rating=ratings[book_id]))
    return examples
