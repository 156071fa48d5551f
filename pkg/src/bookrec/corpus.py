"""Tokenization and the vector-of-bags catalog.

Each book becomes one token multiset per learner slot. The free-text
content slots (synopses, reviews, comments) are merged into a single
``words`` bag; author names are collapsed to ``<initial>_<lastname>``
tokens; a book's own title and authors are folded into its related-titles
and related-authors bags so it is related to itself.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Collection, Iterable

from .extraction import RawBookRecord
from .slots import (
    AUTHORS,
    CONTENT_SLOTS,
    LEARNER_SLOTS,
    RELATED_AUTHORS,
    RELATED_TITLES,
    SUBJECTS,
    TITLE,
    WORDS,
)

Stopwords = frozenset  # set of canonical (lower-case) tokens

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)
_EDGE_PUNCT_RE = re.compile(r"^[\W_]+|[\W_]+$", re.UNICODE)


def parse_stopwords(text: str) -> frozenset[str]:
    words = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.lower())
    return frozenset(words)


def load_stopwords(path: str | Path) -> frozenset[str]:
    return parse_stopwords(Path(path).read_text(encoding="utf-8"))


def default_stopwords() -> frozenset[str]:
    """The packaged list of ~50 high-frequency English function words."""
    text = resources.files("bookrec").joinpath("data/stopwords.txt").read_text("utf-8")
    return parse_stopwords(text)


def tokenize(text: str, stop: Collection[str] = frozenset()) -> Counter:
    """Case-fold and split on non-alphanumeric boundaries; drop stopwords.

    Returns a multiset: multiplicities are preserved.
    """
    tokens = _TOKEN_RE.findall(text.lower())
    if stop:
        return Counter(t for t in tokens if t not in stop)
    return Counter(tokens)


def normalize_author(name: str) -> str:
    """Collapse a personal name to a single ``<initial>_<lastname>`` token.

    The last name is the final whitespace-delimited word after trimming edge
    punctuation; single-word names stay as-is. Suffixes such as "Jr." are not
    special-cased.
    """
    words = [w for w in (_EDGE_PUNCT_RE.sub("", part) for part in name.split()) if w]
    if not words:
        raise ValueError(f"author name has no usable word: {name!r}")
    if len(words) == 1:
        return words[0].lower()
    return f"{words[0][0].lower()}_{words[-1].lower()}"


@dataclass(frozen=True)
class TokenizedBook:
    """A book as one token multiset per learner slot; empty bags are omitted."""

    id: str
    title_display: str
    bags: dict[str, Counter]

    def bag(self, slot: str) -> Counter:
        return self.bags.get(slot) or Counter()

    def slot_length(self, slot: str) -> int:
        return sum(self.bag(slot).values())


def build_book(rec: RawBookRecord, stop: Collection[str] = frozenset()) -> TokenizedBook:
    """Turn an adequate raw record into its vector-of-bags representation."""
    title_bag = tokenize(" ".join(rec.get(TITLE)), stop)

    authors_bag: Counter = Counter()
    for name in rec.get(AUTHORS):
        try:
            authors_bag[normalize_author(name)] += 1
        except ValueError:
            continue

    words_bag: Counter = Counter()
    for slot in CONTENT_SLOTS:
        for filler in rec.get(slot):
            words_bag.update(tokenize(filler, stop))

    subjects_bag: Counter = Counter()
    for filler in rec.get(SUBJECTS):
        subjects_bag.update(tokenize(filler, stop))

    related_titles_bag: Counter = Counter()
    for filler in rec.get(RELATED_TITLES):
        related_titles_bag.update(tokenize(filler, stop))
    related_titles_bag.update(title_bag)  # a book is related to itself

    related_authors_bag: Counter = Counter()
    for name in rec.get(RELATED_AUTHORS):
        try:
            related_authors_bag[normalize_author(name)] += 1
        except ValueError:
            continue
    related_authors_bag.update(authors_bag)

    titles = rec.get(TITLE)
    bags = {
        TITLE: title_bag,
        AUTHORS: authors_bag,
        WORDS: words_bag,
        RELATED_AUTHORS: related_authors_bag,
        RELATED_TITLES: related_titles_bag,
        SUBJECTS: subjects_bag,
    }
    return TokenizedBook(
        id=rec.id,
        title_display=titles[0] if titles else rec.id,
        bags={slot: bag for slot, bag in bags.items() if bag},
    )


def _search_terms(book: TokenizedBook) -> set[str]:
    # Author tokens are indexed whole plus by surname and initial so plain
    # name queries still hit them.
    terms = set(book.bag(TITLE))
    for token in book.bag(AUTHORS):
        terms.add(token)
        if "_" in token:
            initial, surname = token.split("_", 1)
            terms.add(initial)
            terms.add(surname)
    return terms


@dataclass
class Catalog:
    """An immutable, id-indexed list of tokenized books."""

    books: list[TokenizedBook]
    _positions: dict[str, int] = field(init=False, repr=False)
    _postings: dict[str, set[int]] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self._positions = {}
        self._postings = {}
        for pos, book in enumerate(self.books):
            if book.id in self._positions:
                raise ValueError(f"duplicate book id: {book.id!r}")
            self._positions[book.id] = pos
            for term in _search_terms(book):
                self._postings.setdefault(term, set()).add(pos)

    def __len__(self) -> int:
        return len(self.books)

    def __iter__(self):
        return iter(self.books)

    def __contains__(self, book_id: str) -> bool:
        return book_id in self._positions

    def get(self, book_id: str) -> TokenizedBook | None:
        pos = self._positions.get(book_id)
        return None if pos is None else self.books[pos]

    def search(self, query: str, stop: Collection[str] | None = None) -> list[TokenizedBook]:
        """Books whose title or author terms contain every query token.

        An empty query (or one that is all stopwords) matches everything;
        results keep catalog order.
        """
        if stop is None:
            stop = default_stopwords()
        tokens = list(tokenize(query, stop))
        if not tokens:
            return list(self.books)
        postings = [self._postings.get(tok) for tok in tokens]
        if any(p is None for p in postings):
            return []
        hits = set.intersection(*postings)  # type: ignore[arg-type]
        return [self.books[pos] for pos in sorted(hits)]


def book_to_line(book: TokenizedBook) -> str:
    """Canonical one-line JSON form: fixed field order, sorted tokens."""
    bags = {}
    for slot in LEARNER_SLOTS:
        bag = book.bags.get(slot)
        if bag:
            bags[slot] = {tok: bag[tok] for tok in sorted(bag)}
    doc = {"id": book.id, "title_display": book.title_display, "bags": bags}
    return json.dumps(doc, ensure_ascii=False, separators=(",", ":"))


def book_from_line(line: str) -> TokenizedBook:
    doc = json.loads(line)
    bags: dict[str, Counter] = {}
    for slot, table in doc["bags"].items():
        if slot not in LEARNER_SLOTS:
            raise ValueError(f"unknown slot in catalog line: {slot!r}")
        bag: Counter = Counter()
        for token, count in table.items():
            if not isinstance(count, int) or isinstance(count, bool) or count <= 0:
                raise ValueError(f"bad count for token {token!r}: {count!r}")
            bag[token] = count
        if bag:
            bags[slot] = bag
    return TokenizedBook(id=doc["id"], title_display=doc["title_display"], bags=bags)


def dumps_catalog(catalog: Catalog) -> str:
    return "".join(book_to_line(book) + "\n" for book in catalog)


def loads_catalog(text: str) -> Catalog:
    books = [book_from_line(line) for line in text.splitlines() if line.strip()]
    return Catalog(books=books)


def write_catalog(catalog: Catalog, path: str | Path) -> None:
    Path(path).write_text(dumps_catalog(catalog), encoding="utf-8")


def read_catalog(path: str | Path) -> Catalog:
    return loads_catalog(Path(path).read_text(encoding="utf-8"))


def build_catalog(records: Iterable[RawBookRecord], stop: Collection[str] = frozenset()) -> Catalog:
    return Catalog(books=[build_book(rec, stop) for rec in records])


def validate_rating(value: object) -> int:
    """Ratings are integers 1..10; anything else is rejected."""
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"rating must be an integer 1..10, got {value!r}")
    if not 1 <= value <= 10:
        raise ValueError(f"rating out of range 1..10: {value!r}")
    return value


def read_ratings(path: str | Path) -> dict[str, int]:
    """Read a ratings JSON Lines file; the last entry for an id wins."""
    ratings: dict[str, int] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                doc = json.loads(line)
                ratings[str(doc["id"])] = validate_rating(doc["rating"])
            except (KeyError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad rating line: {exc}") from exc
    return ratings


def write_ratings(ratings: dict[str, int], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for book_id in sorted(ratings):
            doc = {"id": book_id, "rating": ratings[book_id]}
            fh.write(json.dumps(doc, ensure_ascii=False, separators=(",", ":")))
            fh.write("\n")
