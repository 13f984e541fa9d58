"""Tests for n-gram estimation, scoring, perplexity and ARPA files."""

import math

import pytest

from seqshift.errors import ArpaParseError, EmptyCorpusError, ZeroProbabilityError
from seqshift.lm import (
    NGramModel,
    Smoothing,
    count_ngrams,
    estimate_ngram,
    evaluate_perplexity,
    lm_logprob,
    load_arpa,
    perplexity,
    read_arpa,
    renormalize_subword_ppl,
    save_arpa,
    train_ngram,
    write_arpa,
)
from seqshift.text import BOS_ID, EOS_ID, Corpus, Vocabulary


def corpus(*lines: str) -> Corpus:
    return Corpus.from_texts(lines)


@pytest.fixture
def ab_vocab():
    return Vocabulary.from_words(["a", "b"])


@pytest.fixture
def mle_bigram(ab_vocab):
    return train_ngram(corpus("a a b"), ab_vocab, 2, Smoothing.MLE)


def total_mass(model: NGramModel, context: tuple[int, ...]) -> float:
    return sum(10.0 ** model.score(context, w) for w in model.predictable_ids)


class TestCounts:
    def test_bigrams_with_boundaries(self, ab_vocab):
        a, b = ab_vocab.lookup("a"), ab_vocab.lookup("b")
        counts = count_ngrams(corpus("a b a"), ab_vocab, 2)
        assert dict(counts.tables[1]) == {
            (BOS_ID, a): 1,
            (a, b): 1,
            (b, a): 1,
            (a, EOS_ID): 1,
        }

    def test_unigrams(self, ab_vocab):
        a, b = ab_vocab.lookup("a"), ab_vocab.lookup("b")
        counts = count_ngrams(corpus("a a b"), ab_vocab, 1)
        assert dict(counts.tables[0]) == {(a,): 2, (b,): 1, (EOS_ID,): 1}

    def test_empty_corpus(self, ab_vocab):
        assert count_ngrams(corpus(), ab_vocab, 3).is_empty

    def test_oov_maps_to_unknown(self, ab_vocab):
        counts = count_ngrams(corpus("zz"), ab_vocab, 1)
        assert counts.tables[0][(ab_vocab.lookup("<unk>"),)] == 1

    def test_order_must_be_positive(self, ab_vocab):
        with pytest.raises(ValueError):
            count_ngrams(corpus("a"), ab_vocab, 0)


class TestEstimate:
    def test_mle_bigram(self, ab_vocab, mle_bigram):
        a, b = ab_vocab.lookup("a"), ab_vocab.lookup("b")
        assert 10.0 ** mle_bigram.score((a,), a) == pytest.approx(0.5)
        assert 10.0 ** mle_bigram.score((a,), b) == pytest.approx(0.5)
        assert 10.0 ** mle_bigram.score((BOS_ID,), a) == pytest.approx(1.0)

    def test_mle_unigram(self, ab_vocab):
        model = train_ngram(corpus("a"), ab_vocab, 1, Smoothing.MLE)
        assert 10.0 ** model.score((), ab_vocab.lookup("a")) == pytest.approx(0.5)
        assert 10.0 ** model.score((), EOS_ID) == pytest.approx(0.5)

    def test_discounted_unigram_sums_to_one(self, ab_vocab):
        model = train_ngram(corpus("a a b"), ab_vocab, 1, discount=0.5)
        assert total_mass(model, ()) == pytest.approx(1.0, abs=1e-6)
        # only <unk> is unseen, so it receives all discounted mass
        assert 10.0 ** model.score((), ab_vocab.lookup("<unk>")) == pytest.approx(0.5 * 3 / 4)

    def test_normalized_in_every_context(self):
        vocab = Vocabulary.from_words(["a", "b", "c", "d"])
        text = corpus("a b c a", "b b d", "c a b", "a")
        model = train_ngram(text, vocab, 3)
        contexts = [(), *model.backoffs, (vocab.lookup("d"), vocab.lookup("d"))]
        for context in contexts:
            assert total_mass(model, context) == pytest.approx(1.0, abs=1e-6)

    def test_stored_logprobs_not_positive(self):
        vocab = Vocabulary.from_words(["a", "b"])
        model = train_ngram(corpus("a b b", "b a"), vocab, 2)
        for table in model.probs:
            assert all(logp <= 0.0 for logp in table.values())

    def test_bad_discount(self, ab_vocab):
        counts = count_ngrams(corpus("a"), ab_vocab, 1)
        with pytest.raises(ValueError, match="discount"):
            estimate_ngram(counts, Smoothing.ABSOLUTE_DISCOUNT, discount=1.0)

    def test_empty_counts(self, ab_vocab):
        with pytest.raises(EmptyCorpusError):
            estimate_ngram(count_ngrams(corpus(), ab_vocab, 1))


class TestLogprob:
    def test_mle_bigram_query(self, ab_vocab, mle_bigram):
        logp, state = lm_logprob(mle_bigram, (ab_vocab.lookup("a"),), "b")
        assert logp == pytest.approx(math.log10(0.5))
        assert state == (ab_vocab.lookup("b"),)

    def test_uniform(self, ab_vocab):
        model = NGramModel.uniform(ab_vocab)
        for token in ("a", "b", "</s>", "<unk>"):
            logp, state = lm_logprob(model, (), token)
            assert logp == pytest.approx(math.log10(1 / 4))
            assert state == ()

    def test_unknown_string_maps_to_unk(self, ab_vocab):
        model = NGramModel.uniform(ab_vocab)
        assert lm_logprob(model, (), "zzz") == lm_logprob(model, (), "<unk>")

    def test_unseen_bigram_backs_off(self, ab_vocab):
        model = train_ngram(corpus("a a b"), ab_vocab, 2)
        a, b = ab_vocab.lookup("a"), ab_vocab.lookup("b")
        assert (b, a) not in model.probs[1]
        expected = model.backoffs[(b,)] + model.probs[0][(a,)]
        assert model.score((b,), a) == pytest.approx(expected)
        assert model.backoffs[(b,)] == pytest.approx(math.log10(0.7))

    def test_state_keeps_order_minus_one(self, ab_vocab):
        model = train_ngram(corpus("a b a b"), ab_vocab, 3)
        state = model.initial_state()
        for token in ("a", "b", "a"):
            _, state = lm_logprob(model, state, token)
        assert len(state) == 2


class TestPerplexity:
    def test_uniform_equals_predictable_symbols(self):
        vocab = Vocabulary.from_words(["a", "b", "c"])
        model = NGramModel.uniform(vocab)
        assert perplexity(model, corpus("a b", "c zz a")) == pytest.approx(5.0)

    def test_mle_own_corpus(self, ab_vocab):
        model = train_ngram(corpus("a"), ab_vocab, 1, Smoothing.MLE)
        assert perplexity(model, corpus("a")) == pytest.approx(2.0)

    def test_counts_and_oov(self, ab_vocab):
        model = NGramModel.uniform(ab_vocab)
        result = evaluate_perplexity(model, corpus("a zz", "b"))
        assert result.num_tokens == 5
        assert result.num_oov == 1
        assert result.num_sentences == 2
        assert result.logprob == pytest.approx(5 * math.log10(1 / 4))

    def test_zero_probability(self, ab_vocab):
        model = train_ngram(corpus("a"), ab_vocab, 1, Smoothing.MLE)
        with pytest.raises(ZeroProbabilityError, match="zero probability"):
            perplexity(model, corpus("b"))

    def test_empty_corpus(self, ab_vocab):
        with pytest.raises(EmptyCorpusError):
            perplexity(NGramModel.uniform(ab_vocab), corpus())

    def test_mle_fits_training_data_better(self):
        vocab = Vocabulary.from_words(["a", "b", "c"])
        text = corpus("a b c", "a b", "c c a b")
        mle = train_ngram(text, vocab, 2, Smoothing.MLE)
        smoothed = train_ngram(text, vocab, 2)
        assert perplexity(mle, text) <= perplexity(smoothed, text)


class TestRenormalize:
    def test_identity_ratio(self):
        assert renormalize_subword_ppl(37.5, 12, 12) == pytest.approx(37.5)

    def test_exponent_two(self):
        assert renormalize_subword_ppl(10.0, 20, 10) == pytest.approx(100.0)

    def test_zero_words(self):
        with pytest.raises(ValueError):
            renormalize_subword_ppl(10.0, 5, 0)

    def test_matches_total_logprob(self):
        # PPL_word = 10^(-logprob / words) for the same total log-probability
        vocab = Vocabulary.from_words(["x", "y"])
        model = train_ngram(corpus("x y x", "y"), vocab, 2)
        result = evaluate_perplexity(model, corpus("x y x", "y"))
        words = 3
        direct = 10.0 ** (-result.logprob / words)
        assert renormalize_subword_ppl(
            result.perplexity, result.num_tokens, words
        ) == pytest.approx(direct)


class TestArpa:
    def test_round_trip_mle_bigram(self, ab_vocab, mle_bigram):
        restored = read_arpa(write_arpa(mle_bigram))
        ids = [ab_vocab.lookup(w) for w in ("<s>", "a", "b")]
        for context in ids:
            for token in ("a", "b", "</s>"):
                expected, _ = lm_logprob(mle_bigram, (context,), token)
                actual, _ = lm_logprob(restored, (context,), token)
                assert actual == pytest.approx(expected, abs=1e-6)

    def test_round_trip_file(self, tmp_path):
        vocab = Vocabulary.from_words(["a", "b", "c"])
        model = train_ngram(corpus("a b c", "c b a", "a a"), vocab, 3)
        save_arpa(model, tmp_path / "lm.arpa")
        restored = load_arpa(tmp_path / "lm.arpa")
        assert restored.vocab == model.vocab
        assert restored.order == 3
        for context in [(), *model.backoffs]:
            for w in model.predictable_ids:
                assert restored.score(context, w) == pytest.approx(
                    model.score(context, w), abs=1e-6
                )

    def test_six_decimals(self, mle_bigram):
        text = write_arpa(mle_bigram)
        assert "-0.301030 a b" in text
        assert text.startswith("\\data\\\n")
        assert text.endswith("\\end\\\n")

    def test_empty_data_section(self):
        with pytest.raises(ArpaParseError, match="empty"):
            read_arpa("\\data\\\n\n\\end\\\n")

    def test_count_mismatch_names_section(self):
        text = "\\data\\\nngram 1=3\n\n\\1-grams:\n-0.3 a\n-0.3 </s>\n\n\\end\\\n"
        with pytest.raises(ArpaParseError, match="1-grams") as info:
            read_arpa(text)
        assert info.value.line_no == 4

    def test_bad_section_header(self):
        text = "\\data\\\nngram 1=1\n\n\\2-grams:\n-0.3 a\n\n\\end\\\n"
        with pytest.raises(ArpaParseError, match="line 4"):
            read_arpa(text)
