import sys
from collections import Counter
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bookrec.corpus import TokenizedBook
from bookrec.learner import RatedExample


def make_book(book_id: str, title: str = "", **bags) -> TokenizedBook:
    """Bags given as slot=dict kwargs; hyphens/clashes spelled with a
    trailing-underscore escape (title_ is the title slot)."""
    fixed = {}
    for slot, bag in bags.items():
        if not bag:
            continue
        name = slot.rstrip("_").replace("_", "-") if slot.endswith("_") else slot.replace("_", "-")
        fixed[name] = Counter(bag)
    return TokenizedBook(id=book_id, title_display=title or f"Book {book_id}", bags=fixed)


@pytest.fixture
def toy_examples() -> list[RatedExample]:
    """Three rated books covering both classes and several slots."""
    return [
        RatedExample(
            book=make_book(
                "b1",
                title="Desert World",
                words={"desert": 2, "planet": 1, "spice": 3},
                title_={"desert": 1, "world": 1},
                authors={"f_herbert": 1},
                related_titles={"desert": 1, "world": 1, "dune": 1},
            ),
            rating=10,
        ),
        RatedExample(
            book=make_book(
                "b2",
                title="Star Voyage",
                words={"star": 2, "voyage": 1, "planet": 1},
                title_={"star": 1, "voyage": 1},
                authors={"a_clarke": 1},
                subjects={"space": 1},
            ),
            rating=7,
        ),
        RatedExample(
            book=make_book(
                "b3",
                title="Dull Tome",
                words={"tax": 4, "forms": 2},
                title_={"dull": 1, "tome": 1},
                authors={"b_bureaucrat": 1},
            ),
            rating=2,
        ),
    ]
