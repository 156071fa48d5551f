"""Rating-weighted multinomial naive Bayes over a vector of bags.

Every rated book contributes to both classes at once: a 1..10 rating r is
scaled to a positive weight a_pos = (r-1)/9 and a negative weight
a_neg = 1 - a_pos, and a token occurring n times counts as a_pos*n positive
and a_neg*n negative occurrences. Training estimates, per class:

    prior        = sum of weights / number of examples
    P(token | class, slot) = (weighted count + lambda)
                             / (weighted slot length + lambda * |slot vocab|)

with additive smoothing mass ``lambda`` spread over the slot's training
vocabulary. Scoring sums log conditional ratios over the tokens of the
masked slots (tokens unseen in a slot's vocabulary are skipped), yielding
the posterior log-odds of the positive class with the shared evidence term
dropped; ranking by that score equals ranking by the posterior.

Training and scoring are linear in the number of token occurrences.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import TokenizedBook
from .slots import LEARNER_SLOTS, canonical_mask

POSITIVE_THRESHOLD = 6  # ratings 1..5 are negative, 6..10 positive

PROFILE_FORMAT = "bookrec-profile"
PROFILE_VERSION = 1


class OutOfVocabularyError(LookupError):
    """A (slot, token) pair outside the trained vocabulary."""


def rating_weights(rating: int) -> tuple[float, float]:
    """Scale a 1..10 rating to (positive, negative) example weights.

    The endpoints are exact: 10 -> (1, 0) and 1 -> (0, 1).
    """
    if isinstance(rating, bool) or not isinstance(rating, int):
        raise ValueError(f"rating must be an integer 1..10, got {rating!r}")
    if not 1 <= rating <= 10:
        raise ValueError(f"rating out of range 1..10: {rating}")
    a_pos = (rating - 1) / 9.0
    return a_pos, 1.0 - a_pos


@dataclass(frozen=True)
class RatedExample:
    book: TokenizedBook
    rating: int

    def __post_init__(self) -> None:
        rating_weights(self.rating)

    @property
    def alpha_pos(self) -> float:
        return rating_weights(self.rating)[0]

    @property
    def alpha_neg(self) -> float:
        return rating_weights(self.rating)[1]

    @property
    def positive(self) -> bool:
        return self.rating >= POSITIVE_THRESHOLD


def _safe_log(p: float) -> float:
    return math.log(p) if p > 0.0 else float("-inf")


@dataclass
class Profile:
    """A trained user model; immutable once built and safe to share.

    ``cond`` maps slot -> token -> (log P(token|positive, slot),
    log P(token|negative, slot)), smoothed, so every stored value is finite.
    ``lengths`` holds the weighted token mass per (class, slot) before
    smoothing; ``vocab_sizes`` the per-slot training vocabulary size.
    """

    lam: float
    slot_mask: tuple[str, ...]
    n_examples: int
    prior_pos: float
    prior_neg: float
    lengths: dict[str, tuple[float, float]]
    vocab_sizes: dict[str, int]
    cond: dict[str, dict[str, tuple[float, float]]]
    prior_log_odds: float = field(init=False)

    def __post_init__(self) -> None:
        self.prior_log_odds = _safe_log(self.prior_pos) - _safe_log(self.prior_neg)

    def log_odds(self, book: TokenizedBook) -> float:
        """Posterior log-odds of the positive class, evidence term dropped."""
        score = self.prior_log_odds
        for slot in self.slot_mask:
            table = self.cond.get(slot)
            if not table:
                continue
            bag = book.bags.get(slot)
            if not bag:
                continue
            lookup = table.get
            for token, count in bag.items():
                pair = lookup(token)
                if pair is not None:
                    score += count * (pair[0] - pair[1])
        return score

    def classify(self, book: TokenizedBook) -> bool:
        """Positive only for strictly positive log-odds; a tie is negative."""
        return self.log_odds(book) > 0.0

    def strength(self, slot: str, token: str, base: float | None = None) -> float:
        """Log-ratio of the token's positive vs negative conditionals.

        Natural log; pass ``base`` to rescale for display.
        """
        try:
            pair = self.cond[slot][token]
        except KeyError:
            raise OutOfVocabularyError(f"not in trained vocabulary: {slot}:{token}") from None
        value = pair[0] - pair[1]
        if base is not None:
            return value / math.log(base)
        return value

    def vocabulary(self, slot: str) -> dict[str, tuple[float, float]]:
        return self.cond.get(slot, {})

    def learned_parameters(self) -> dict:
        """Canonical view of the estimated parameters.

        Slots with an empty training vocabulary carry no information and are
        dropped, so two profiles that behave identically compare equal here
        even when their configured masks differ.
        """
        slots = {}
        for slot in self.slot_mask:
            if self.vocab_sizes.get(slot, 0) > 0:
                slots[slot] = {
                    "lengths": self.lengths[slot],
                    "vocab_size": self.vocab_sizes[slot],
                    "cond": self.cond[slot],
                }
        return {
            "lambda": self.lam,
            "n_examples": self.n_examples,
            "priors": (self.prior_pos, self.prior_neg),
            "slots": slots,
        }

    def to_dict(self) -> dict:
        slots = {}
        for slot in self.slot_mask:
            table = self.cond.get(slot, {})
            lpos, lneg = self.lengths.get(slot, (0.0, 0.0))
            slots[slot] = {
                "length_pos": lpos,
                "length_neg": lneg,
                "vocab_size": self.vocab_sizes.get(slot, 0),
                "cond": {tok: [lp, ln] for tok, (lp, ln) in sorted(table.items())},
            }
        return {
            "format": PROFILE_FORMAT,
            "version": PROFILE_VERSION,
            "lambda": self.lam,
            "slot_mask": list(self.slot_mask),
            "n_examples": self.n_examples,
            "prior_pos": self.prior_pos,
            "prior_neg": self.prior_neg,
            "slots": slots,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, sort_keys=True)

    @classmethod
    def from_dict(cls, doc: dict) -> "Profile":
        if doc.get("format") != PROFILE_FORMAT:
            raise ValueError(f"not a profile document: format={doc.get('format')!r}")
        if doc.get("version") != PROFILE_VERSION:
            raise ValueError(f"unsupported profile version: {doc.get('version')!r}")
        lengths: dict[str, tuple[float, float]] = {}
        vocab_sizes: dict[str, int] = {}
        cond: dict[str, dict[str, tuple[float, float]]] = {}
        for slot, entry in doc["slots"].items():
            lengths[slot] = (entry["length_pos"], entry["length_neg"])
            vocab_sizes[slot] = entry["vocab_size"]
            cond[slot] = {tok: (lp, ln) for tok, (lp, ln) in entry["cond"].items()}
        return cls(
            lam=doc["lambda"],
            slot_mask=tuple(doc["slot_mask"]),
            n_examples=doc["n_examples"],
            prior_pos=doc["prior_pos"],
            prior_neg=doc["prior_neg"],
            lengths=lengths,
            vocab_sizes=vocab_sizes,
            cond=cond,
        )

    @classmethod
    def from_json(cls, text: str) -> "Profile":
        return cls.from_dict(json.loads(text))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "Profile":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def train(
    examples: Sequence[RatedExample],
    lam: float = 1.0,
    mask: Iterable[str] = LEARNER_SLOTS,
) -> Profile:
    """Estimate a profile from rated examples by weighted counting.

    One pass accumulates, per masked slot, the weighted token counts and
    weighted lengths for both classes; the slot vocabulary is the union of
    tokens seen in that slot across the whole training set. Deterministic:
    the same examples always produce a bit-identical profile.
    """
    if not examples:
        raise ValueError("training requires at least one rated example")
    lam = float(lam)
    if not lam > 0.0:
        raise ValueError(f"smoothing parameter must be positive, got {lam}")
    mask_t = canonical_mask(mask)

    n = len(examples)
    weights = [rating_weights(ex.rating) for ex in examples]
    prior_pos = sum(w[0] for w in weights) / n
    prior_neg = sum(w[1] for w in weights) / n

    lengths: dict[str, tuple[float, float]] = {}
    vocab_sizes: dict[str, int] = {}
    cond: dict[str, dict[str, tuple[float, float]]] = {}
    for slot in mask_t:
        count_pos: dict[str, float] = {}
        count_neg: dict[str, float] = {}
        len_pos = 0.0
        len_neg = 0.0
        for (a_pos, a_neg), ex in zip(weights, examples):
            bag = ex.book.bags.get(slot)
            if not bag:
                continue
            size = sum(bag.values())
            len_pos += a_pos * size
            len_neg += a_neg * size
            for token, count in bag.items():
                count_pos[token] = count_pos.get(token, 0.0) + a_pos * count
                count_neg[token] = count_neg.get(token, 0.0) + a_neg * count
        vocab = sorted(count_pos)
        v = len(vocab)
        denom_pos = len_pos + lam * v
        denom_neg = len_neg + lam * v
        table: dict[str, tuple[float, float]] = {}
        for token in vocab:
            table[token] = (
                math.log((count_pos[token] + lam) / denom_pos),
                math.log((count_neg[token] + lam) / denom_neg),
            )
        lengths[slot] = (len_pos, len_neg)
        vocab_sizes[slot] = v
        cond[slot] = table

    return Profile(
        lam=lam,
        slot_mask=mask_t,
        n_examples=n,
        prior_pos=prior_pos,
        prior_neg=prior_neg,
        lengths=lengths,
        vocab_sizes=vocab_sizes,
        cond=cond,
    )
