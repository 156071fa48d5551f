import math
import random
from collections import Counter

import pytest

from bookrec.learner import (
    OutOfVocabularyError,
    Profile,
    RatedExample,
    rating_weights,
    train,
)
from bookrec.slots import LEARNER_SLOTS, WORDS

from conftest import make_book
from corpora import random_corpus
from nb_reference import (
    reference_odds,
    reference_posterior,
    reference_train,
)


class TestRatingWeights:
    def test_endpoints(self):
        assert rating_weights(10) == (1.0, 0.0)
        assert rating_weights(1) == (0.0, 1.0)

    def test_midpoint(self):
        a_pos, a_neg = rating_weights(5)
        assert a_pos == pytest.approx(4 / 9)
        assert a_neg == pytest.approx(5 / 9)

    def test_weights_sum_to_one(self):
        for r in range(1, 11):
            a_pos, a_neg = rating_weights(r)
            assert a_pos + a_neg == 1.0
            assert 0.0 <= a_pos <= 1.0

    @pytest.mark.parametrize("bad", [0, 11, -3, 7.5, "7", True])
    def test_rejects_bad_ratings(self, bad):
        with pytest.raises(ValueError):
            rating_weights(bad)

    def test_positive_label_threshold(self):
        book = make_book("x", words={"a": 1})
        assert RatedExample(book=book, rating=6).positive
        assert not RatedExample(book=book, rating=5).positive


class TestTrain:
    def test_priors_from_extreme_ratings(self):
        examples = [
            RatedExample(book=make_book("a", words={"x": 1}), rating=10),
            RatedExample(book=make_book("b", words={"y": 1}), rating=1),
        ]
        profile = train(examples)
        assert profile.prior_pos == 0.5
        assert profile.prior_neg == 0.5

    def test_smoothed_conditional_single_book(self):
        examples = [RatedExample(book=make_book("a", words={"a": 2, "b": 1}), rating=10)]
        profile = train(examples, lam=1.0, mask=[WORDS])
        # positive class: (2 + 1) / (3 + 2)
        assert math.exp(profile.cond[WORDS]["a"][0]) == pytest.approx(0.6, abs=1e-12)
        assert math.exp(profile.cond[WORDS]["b"][0]) == pytest.approx(0.4, abs=1e-12)
        # negative class got no mass: 1 / (0 + 2)
        assert math.exp(profile.cond[WORDS]["a"][1]) == pytest.approx(0.5, abs=1e-12)

    def test_empty_examples_rejected(self):
        with pytest.raises(ValueError):
            train([])

    def test_nonpositive_smoothing_rejected(self, toy_examples):
        with pytest.raises(ValueError):
            train(toy_examples, lam=0.0)
        with pytest.raises(ValueError):
            train(toy_examples, lam=-1.0)

    def test_unknown_mask_slot_rejected(self, toy_examples):
        with pytest.raises(ValueError):
            train(toy_examples, mask=["synopses"])

    def test_toy_corpus_matches_reference(self, toy_examples):
        profile = train(toy_examples, lam=1.0)
        ref = reference_train(toy_examples, 1.0, LEARNER_SLOTS)
        assert profile.prior_pos == pytest.approx(float(ref["priors"][0]), rel=1e-12)
        assert profile.prior_neg == pytest.approx(float(ref["priors"][1]), rel=1e-12)
        for slot in LEARNER_SLOTS:
            entry = ref["slots"][slot]
            assert profile.vocab_sizes[slot] == entry["vocab_size"]
            assert profile.lengths[slot][0] == pytest.approx(float(entry["lengths"][0]), abs=1e-12)
            assert profile.lengths[slot][1] == pytest.approx(float(entry["lengths"][1]), abs=1e-12)
            for token, (p_pos, p_neg) in entry["cond"].items():
                lp, ln = profile.cond[slot][token]
                assert math.exp(lp) == pytest.approx(float(p_pos), rel=1e-9)
                assert math.exp(ln) == pytest.approx(float(p_neg), rel=1e-9)

    def test_weight_degeneracy(self):
        examples = [
            RatedExample(book=make_book("a", words={"x": 3}), rating=10),
            RatedExample(book=make_book("b", words={"y": 2}), rating=1),
        ]
        profile = train(examples, lam=1.0, mask=[WORDS])
        # rated 10: zero counts and zero length in the negative class
        assert profile.lengths[WORDS] == (3.0, 2.0)
        # x has zero negative count: P(x|neg) = lam / (2 + 2*lam)
        assert math.exp(profile.cond[WORDS]["x"][1]) == pytest.approx(0.25, abs=1e-12)
        # y has zero positive count: P(y|pos) = lam / (3 + 2*lam)
        assert math.exp(profile.cond[WORDS]["y"][0]) == pytest.approx(0.2, abs=1e-12)

    def test_normalization_all_slots(self, toy_examples):
        profile = train(toy_examples, lam=0.7)
        assert profile.prior_pos + profile.prior_neg == pytest.approx(1.0, abs=1e-9)
        for slot in LEARNER_SLOTS:
            table = profile.cond[slot]
            if not table:
                continue
            assert math.fsum(math.exp(lp) for lp, _ in table.values()) == pytest.approx(1.0, abs=1e-9)
            assert math.fsum(math.exp(ln) for _, ln in table.values()) == pytest.approx(1.0, abs=1e-9)

    def test_prior_identity(self):
        rng = random.Random(11)
        for _ in range(20):
            examples, _ = random_corpus(rng)
            profile = train(examples)
            expected = sum((ex.rating - 1) / 9 for ex in examples) / len(examples)
            assert profile.prior_pos == expected

    def test_deterministic_bit_identical(self, toy_examples):
        a = train(toy_examples, lam=1.0)
        b = train(toy_examples, lam=1.0)
        assert a.to_json() == b.to_json()
        assert a.cond == b.cond

    def test_masked_slot_not_trained(self, toy_examples):
        profile = train(toy_examples, mask=[WORDS, "title"])
        assert set(profile.cond) == {WORDS, "title"}
        assert profile.slot_mask == ("title", WORDS)

    def test_all_finite_log_probabilities(self, toy_examples):
        profile = train(toy_examples)
        for table in profile.cond.values():
            for lp, ln in table.values():
                assert math.isfinite(lp) and math.isfinite(ln)


class TestLogOdds:
    def test_all_unseen_tokens_gives_prior_odds(self, toy_examples):
        profile = train(toy_examples)
        stranger = make_book("s", words={"zzz": 4}, title_={"qqq": 1})
        assert profile.log_odds(stranger) == profile.prior_log_odds

    def test_equal_priors_empty_book_scores_zero(self):
        examples = [
            RatedExample(book=make_book("a", words={"x": 1}), rating=10),
            RatedExample(book=make_book("b", words={"y": 1}), rating=1),
        ]
        profile = train(examples)
        assert profile.log_odds(make_book("empty")) == 0.0

    def test_posterior_matches_reference(self, toy_examples):
        profile = train(toy_examples, lam=1.0)
        ref = reference_train(toy_examples, 1.0, profile.slot_mask)
        heldout = make_book(
            "h",
            words={"desert": 1, "planet": 2, "tax": 1},
            title_={"star": 1},
            authors={"f_herbert": 1},
        )
        log_odds = profile.log_odds(heldout)
        posterior = math.exp(log_odds) / (1.0 + math.exp(log_odds))
        assert posterior == pytest.approx(float(reference_posterior(ref, heldout)), rel=1e-9)

    def test_fuzzed_odds_match_reference(self):
        rng = random.Random(23)
        for _ in range(40):
            examples, heldout = random_corpus(rng)
            profile = train(examples, lam=1.0)
            ref = reference_train(examples, 1.0, profile.slot_mask)
            for book in heldout:
                got = profile.log_odds(book)
                odds = reference_odds(ref, book)
                if odds is None:
                    assert got == math.inf
                elif odds == 0:
                    assert got == -math.inf
                else:
                    assert abs(got - math.log(odds)) <= 1e-9

    def test_classify_sign_rule(self, toy_examples):
        profile = train(toy_examples)
        positive_book = make_book("p", words={"spice": 5})
        negative_book = make_book("n", words={"tax": 5})
        assert profile.log_odds(positive_book) > 0
        assert profile.classify(positive_book) is True
        assert profile.log_odds(negative_book) < 0
        assert profile.classify(negative_book) is False

    def test_classify_tie_is_negative(self):
        examples = [
            RatedExample(book=make_book("a", words={"x": 1}), rating=10),
            RatedExample(book=make_book("b", words={"y": 1}), rating=1),
        ]
        profile = train(examples)
        book = make_book("empty")
        assert profile.log_odds(book) == 0.0
        assert profile.classify(book) is False


class TestStrength:
    def test_symmetric_token_has_zero_strength(self):
        examples = [
            RatedExample(book=make_book("a", words={"w": 2}), rating=10),
            RatedExample(book=make_book("b", words={"w": 2}), rating=1),
        ]
        profile = train(examples, mask=[WORDS])
        assert profile.strength(WORDS, "w") == pytest.approx(0.0, abs=1e-12)

    def test_positive_only_evidence(self):
        # w needs company in the vocabulary, else both conditionals are 1
        examples = [RatedExample(book=make_book("a", words={"w": 3, "x": 1}), rating=10)]
        profile = train(examples, lam=1e-6, mask=[WORDS])
        assert profile.strength(WORDS, "w") > 0.0

    def test_matches_reference_ratio(self, toy_examples):
        profile = train(toy_examples, lam=1.0)
        ref = reference_train(toy_examples, 1.0, profile.slot_mask)
        for slot in profile.slot_mask:
            for token, (p_pos, p_neg) in ref["slots"][slot]["cond"].items():
                expected = math.log(float(p_pos) / float(p_neg))
                assert profile.strength(slot, token) == pytest.approx(expected, abs=1e-9)

    def test_out_of_vocabulary_rejected(self, toy_examples):
        profile = train(toy_examples)
        with pytest.raises(OutOfVocabularyError):
            profile.strength(WORDS, "nope")
        with pytest.raises(OutOfVocabularyError):
            profile.strength("subjects", "desert")  # wrong slot

    def test_display_base(self, toy_examples):
        profile = train(toy_examples)
        nat = profile.strength(WORDS, "spice")
        assert profile.strength(WORDS, "spice", base=2.0) == pytest.approx(nat / math.log(2))

    def test_monotone_under_new_positive_evidence(self):
        # appending a rated-10 example whose bag is just the token, all else
        # fixed, never lowers that token's strength
        rng = random.Random(5)
        for _ in range(25):
            examples, _ = random_corpus(rng, max_books=6, max_tokens=20)
            profile = train(examples, lam=1.0)
            token_slots = [
                (slot, token)
                for slot in profile.slot_mask
                for token in profile.cond[slot]
            ]
            if not token_slots:
                continue
            slot, token = rng.choice(token_slots)
            before = profile.strength(slot, token)
            extra = RatedExample(
                book=make_book("extra", **{slot.replace("-", "_"): {token: rng.randint(1, 4)}}),
                rating=10,
            )
            after = train(list(examples) + [extra], lam=1.0).strength(slot, token)
            assert after >= before - 1e-12


class TestProfileSerialization:
    def test_roundtrip_scores_bit_exact(self, toy_examples):
        profile = train(toy_examples, lam=0.5)
        clone = Profile.from_json(profile.to_json())
        assert clone.to_json() == profile.to_json()
        books = [ex.book for ex in toy_examples] + [make_book("h", words={"desert": 1})]
        for book in books:
            assert clone.log_odds(book) == profile.log_odds(book)

    def test_save_load(self, tmp_path, toy_examples):
        profile = train(toy_examples)
        path = tmp_path / "profile.json"
        profile.save(path)
        loaded = Profile.load(path)
        assert loaded.slot_mask == profile.slot_mask
        assert loaded.cond == profile.cond
        assert loaded.prior_log_odds == profile.prior_log_odds

    def test_wrong_format_rejected(self):
        with pytest.raises(ValueError):
            Profile.from_json('{"format": "something-else"}')

    def test_learned_parameters_drop_empty_slots(self, toy_examples):
        full = train(toy_examples, mask=LEARNER_SLOTS)
        # toy corpus has no related-authors bags anywhere
        assert full.vocab_sizes["related-authors"] == 0
        reduced = train(toy_examples, mask=[s for s in LEARNER_SLOTS if s != "related-authors"])
        assert full.learned_parameters() == reduced.learned_parameters()
