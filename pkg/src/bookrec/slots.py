"""Slot identifiers shared by the extractor, the corpus builder, and the learner.

A book record is a set of named slots. The extractor fills the raw slots
(plus a few pass-through extras that are stored but never learned from);
the corpus builder merges the free-text content slots into a single
``words`` bag, leaving six bags that the learner consumes.
"""

TITLE = "title"
AUTHORS = "authors"
SYNOPSES = "synopses"
REVIEWS = "reviews"
COMMENTS = "comments"
RELATED_AUTHORS = "related-authors"
RELATED_TITLES = "related-titles"
SUBJECTS = "subjects"
WORDS = "words"

# Slots the extractor recognizes for recommendation content.
RECOMMENDER_SLOTS = (
    TITLE,
    AUTHORS,
    SYNOPSES,
    REVIEWS,
    COMMENTS,
    RELATED_AUTHORS,
    RELATED_TITLES,
    SUBJECTS,
)

# Stored if extracted, but never tokenized into a profile.
EXTRA_SLOTS = ("publisher", "date", "isbn", "price")

# Every slot a rule file may mention.
RULE_SLOTS = RECOMMENDER_SLOTS + EXTRA_SLOTS

# Free-text slots merged into the single `words` bag.
CONTENT_SLOTS = (SYNOPSES, REVIEWS, COMMENTS)

# The six bags a trained profile can use, in canonical order.
LEARNER_SLOTS = (TITLE, AUTHORS, WORDS, RELATED_AUTHORS, RELATED_TITLES, SUBJECTS)

# Bags holding normalized author-name tokens; stopwords never apply here.
AUTHOR_NAME_SLOTS = frozenset({AUTHORS, RELATED_AUTHORS})

# Slots whose rules default to first-match unless the rule says `multi`.
SINGLE_MATCH_DEFAULT = frozenset({TITLE, *EXTRA_SLOTS})

_LEARNER_ORDER = {slot: i for i, slot in enumerate(LEARNER_SLOTS)}


def canonical_mask(slots) -> tuple[str, ...]:
    """Validate a slot mask and return it deduplicated in canonical order."""
    seen = set()
    for slot in slots:
        if slot not in _LEARNER_ORDER:
            raise ValueError(f"unknown learner slot: {slot!r}")
        seen.add(slot)
    if not seen:
        raise ValueError("slot mask must name at least one slot")
    return tuple(sorted(seen, key=_LEARNER_ORDER.__getitem__))
