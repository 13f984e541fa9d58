"""Tests for posteriorgrams, priors, ILMs and the acoustic scores."""

import math

import numpy as np
import pytest

from seqshift.acoustic import (
    BLANK,
    ContextPrior,
    FactoredScores,
    Posteriorgram,
    PositionLabelScorer,
    PosteriorTransducerScorer,
    StepPosterior,
    ctc_score,
    estimate_context_prior,
    estimate_ilm,
    fh_score,
    load_posteriorgram,
    log_softmax,
    save_posteriorgram,
    transducer_score,
)
from seqshift.acoustic.posteriorgram import write_pgrm
from seqshift.errors import (
    EmptyCorpusError,
    PosteriorgramFormatError,
    SeqshiftValidationError,
    UnknownLabelError,
)
from seqshift.lm import LN10, Smoothing, train_ngram
from seqshift.text import Corpus, Vocabulary


def uniform_factors(labels: tuple[str, ...], frames: int, triphone: bool) -> FactoredScores:
    size = len(labels)
    half = math.log(1.0 / size)
    return FactoredScores(
        labels=labels,
        left=np.full((frames, size), half),
        center=np.full((frames, size, size), half),
        right=np.full((frames, size, size, size), half) if triphone else None,
    )


def step_posterior(labels: tuple[str, ...], probs: list[float]) -> StepPosterior:
    return StepPosterior(
        labels=labels,
        log_probs=np.log(np.array(probs)),
        index={label: i for i, label in enumerate(labels)},
    )


@pytest.fixture
def ilm_quarter_a():
    """Order-0 ILM with P(a) = 1/4 and P(b) = 3/4."""
    return estimate_ilm([["a", "b", "b", "b"]], "0")


class TestPosteriorgram:
    def test_file_round_trip(self, tmp_path):
        rng = np.random.default_rng(0)
        matrix = log_softmax(rng.normal(size=(3, 4))).astype(np.float32).astype(np.float64)
        pg = Posteriorgram(labels=("a", "b", "c", BLANK), log_probs=matrix)
        save_posteriorgram(pg, tmp_path / "x.pgrm")
        loaded = load_posteriorgram(tmp_path / "x.pgrm")
        assert loaded.labels == pg.labels
        np.testing.assert_array_equal(loaded.log_probs, pg.log_probs)

    def test_truncated_file(self, tmp_path):
        pg = Posteriorgram.from_logits(("a", "b"), np.zeros((2, 2)))
        save_posteriorgram(pg, tmp_path / "x.pgrm")
        data = (tmp_path / "x.pgrm").read_bytes()
        (tmp_path / "x.pgrm").write_bytes(data[:-3])
        with pytest.raises(PosteriorgramFormatError, match="unexpected end"):
            load_posteriorgram(tmp_path / "x.pgrm")

    def test_unnormalized_row(self, tmp_path):
        write_pgrm(("a", "b"), np.log(np.array([[0.4, 0.4]])), tmp_path / "x.pgrm")
        with pytest.raises(PosteriorgramFormatError, match="row not normalized"):
            load_posteriorgram(tmp_path / "x.pgrm")

    def test_magic_mismatch(self, tmp_path):
        (tmp_path / "x.pgrm").write_bytes(b"NOPE" + bytes(12))
        with pytest.raises(PosteriorgramFormatError, match="magic"):
            load_posteriorgram(tmp_path / "x.pgrm")

    def test_trailing_bytes(self, tmp_path):
        pg = Posteriorgram.from_logits(("a", "b"), np.zeros((1, 2)))
        save_posteriorgram(pg, tmp_path / "x.pgrm")
        with open(tmp_path / "x.pgrm", "ab") as f:
            f.write(b"\0")
        with pytest.raises(PosteriorgramFormatError, match="trailing"):
            load_posteriorgram(tmp_path / "x.pgrm")

    def test_needs_a_frame(self):
        with pytest.raises(PosteriorgramFormatError):
            Posteriorgram(labels=("a",), log_probs=np.zeros((0, 1)))

    def test_unknown_label(self):
        pg = Posteriorgram.from_logits(("a", "b"), np.zeros((1, 2)))
        with pytest.raises(UnknownLabelError):
            pg.log_prob(0, "c")


class TestFactored:
    def test_triphone_with_uniform_prior(self):
        factors = uniform_factors(("a", "b"), 1, triphone=True)
        prior = ContextPrior.uniform(("a", "b"), 3)
        assert fh_score(factors, prior, 0, "a", "b", "a", 1.0) == pytest.approx(0.0)
        assert fh_score(factors, prior, 0, "a", "b", "a", 0.0) == pytest.approx(math.log(0.125))

    def test_diphone_with_uniform_prior(self):
        factors = uniform_factors(("a", "b"), 1, triphone=False)
        prior = ContextPrior.uniform(("a", "b"), 2)
        assert fh_score(factors, prior, 0, "b", "a", None, 1.0) == pytest.approx(0.0)

    def test_chain_sums_to_one(self):
        rng = np.random.default_rng(3)
        labels = ("a", "b", "c")
        factors = FactoredScores(
            labels=labels,
            left=log_softmax(rng.normal(size=(2, 3))),
            center=log_softmax(rng.normal(size=(2, 3, 3))),
            right=log_softmax(rng.normal(size=(2, 3, 3, 3))),
        )
        prior = ContextPrior.uniform(labels, 3)
        for t in range(2):
            total = sum(
                math.exp(fh_score(factors, prior, t, left, center, right, 0.0))
                for left in labels
                for center in labels
                for right in labels
            )
            assert total == pytest.approx(1.0, abs=1e-5)

    def test_unknown_label(self):
        factors = uniform_factors(("a", "b"), 1, triphone=False)
        with pytest.raises(UnknownLabelError):
            fh_score(factors, ContextPrior.uniform(("a", "b"), 2), 0, "a", "z", None, 0.0)

    def test_unnormalized_factor(self):
        with pytest.raises(PosteriorgramFormatError, match="center"):
            FactoredScores(
                labels=("a", "b"),
                left=np.full((1, 2), math.log(0.5)),
                center=np.full((1, 2, 2), math.log(0.4)),
            )

    def test_file_round_trip(self, tmp_path):
        factors = uniform_factors(("a", "b"), 2, triphone=True)
        factors.save(tmp_path / "utt")
        loaded = FactoredScores.load(tmp_path / "utt")
        assert loaded.is_triphone
        assert loaded.chain(1, 0, 1, 0) == pytest.approx(factors.chain(1, 0, 1, 0), abs=1e-6)

    def test_diphone_file_has_no_right_factor(self, tmp_path):
        uniform_factors(("a", "b"), 2, triphone=False).save(tmp_path / "utt")
        assert not FactoredScores.load(tmp_path / "utt").is_triphone


class TestCtcScore:
    @pytest.fixture
    def pg(self):
        return Posteriorgram(labels=("a", BLANK), log_probs=np.log(np.array([[0.5, 0.5]])))

    @pytest.fixture
    def prior(self):
        return ContextPrior.uniform(("a", BLANK), 1)

    @pytest.mark.parametrize(
        ("alpha", "expected"),
        [(1.0, 0.0), (0.0, math.log(0.5)), (0.5, math.log(0.5 / math.sqrt(0.5)))],
    )
    def test_prior_division(self, pg, prior, alpha, expected):
        assert ctc_score(pg, prior, 0, "a", alpha) == pytest.approx(expected)

    def test_monotone_in_alpha(self, prior):
        pg = Posteriorgram(labels=("a", BLANK), log_probs=np.log(np.array([[0.8, 0.2]])))
        scores = [ctc_score(pg, prior, 0, "a", alpha) for alpha in (0.0, 0.5, 1.0)]
        assert scores == sorted(scores)
        assert scores[0] == pytest.approx(math.log(0.8))


class TestTransducerScore:
    labels = (BLANK, "a", "b")

    def test_ilm_division(self, ilm_quarter_a):
        step = step_posterior(self.labels, [0.25, 0.5, 0.25])
        assert transducer_score(step, ilm_quarter_a, "a", [], 1.0) == pytest.approx(math.log(2.0))
        assert transducer_score(step, ilm_quarter_a, "a", [], 0.0) == pytest.approx(math.log(0.5))

    @pytest.mark.parametrize("alpha", [0.0, 0.3, 1.0, 2.5])
    def test_blank_is_exempt(self, ilm_quarter_a, alpha):
        step = step_posterior(self.labels, [0.25, 0.5, 0.25])
        assert transducer_score(step, ilm_quarter_a, BLANK, ["a"], alpha) == pytest.approx(
            math.log(0.25)
        )

    def test_history_outside_label_set(self):
        ilm = estimate_ilm([["a", "b"]], "1")
        step = step_posterior(self.labels, [0.25, 0.5, 0.25])
        with pytest.raises(UnknownLabelError):
            transducer_score(step, ilm, "a", ["zz"], 1.0)

    @pytest.mark.parametrize("alpha", [0.0, 1.0])
    @pytest.mark.parametrize("label", ["a", BLANK])
    def test_history_checked_without_ilm(self, alpha, label):
        step = step_posterior(self.labels, [0.25, 0.5, 0.25])
        with pytest.raises(UnknownLabelError, match="zz"):
            transducer_score(step, None, label, ["a", "zz"], alpha)


class TestPriorEstimation:
    def test_single_tuple(self):
        prior = estimate_context_prior([[("a", "b")] * 4], 2, labels=("a", "b"))
        assert prior.prob(("a", "b")) == pytest.approx(1.0 - 3 * prior.floor)
        assert prior.prob(("b", "a")) == pytest.approx(prior.floor)
        assert prior.probs.sum() == pytest.approx(1.0, abs=1e-6)

    def test_relative_frequency(self):
        prior = estimate_context_prior([["a", "a", "b"], ["a"]], 1)
        assert prior.prob(("a",)) == pytest.approx(0.75)
        assert prior.prob(("b",)) == pytest.approx(0.25)

    def test_triphone_counts(self):
        alignment = [("a", "b", "a"), ("b", "a", "b"), ("a", "b", "a"), ("a", "b", "b")]
        prior = estimate_context_prior([alignment[:2], alignment[2:]], 3, labels=("a", "b"))
        counts = {t: alignment.count(t) / len(alignment) for t in set(alignment)}
        for context, expected in counts.items():
            assert prior.prob(context) == pytest.approx(expected, abs=1e-7)
        assert prior.probs.sum() == pytest.approx(1.0, abs=1e-6)

    def test_empty_alignments(self):
        with pytest.raises(SeqshiftValidationError, match="empty"):
            estimate_context_prior([[]], 1)

    def test_wrong_tuple_length(self):
        with pytest.raises(SeqshiftValidationError):
            estimate_context_prior([[("a", "b")]], 3)

    def test_file_round_trip(self, tmp_path):
        prior = estimate_context_prior([[("a", "b"), ("b", "b")]], 2)
        prior.save(tmp_path / "x.prior")
        loaded = ContextPrior.load(tmp_path / "x.prior")
        assert loaded.labels == prior.labels
        np.testing.assert_allclose(loaded.probs, prior.probs)

    def test_missing_header(self, tmp_path):
        (tmp_path / "x.prior").write_text("a\t1.0\n")
        with pytest.raises(SeqshiftValidationError, match="header"):
            ContextPrior.load(tmp_path / "x.prior")


class TestIlm:
    def test_zero_order_relative_frequency(self):
        ilm = estimate_ilm([["a", "b", "a"]], "0")
        assert math.exp(ilm.logprob("a", ["b", "b"])) == pytest.approx(2 / 3)
        assert math.exp(ilm.logprob("b", [])) == pytest.approx(1 / 3)

    def test_first_order_mle(self):
        ilm = estimate_ilm([["a", "b", "a", "b"]], "1", smoothing=Smoothing.MLE)
        assert math.exp(ilm.logprob("b", ["b", "a"])) == pytest.approx(1.0)

    def test_unbounded_matches_ngram(self):
        transcripts = [["a", "b", "c"], ["b", "b", "a"], ["c", "a"]]
        ilm = estimate_ilm(transcripts, "inf", ngram_order=3)
        lm = train_ngram(
            Corpus(lines=tuple(tuple(t) for t in transcripts)),
            Vocabulary.from_words(["a", "b", "c"]),
            3,
        )
        vocab = lm.vocab
        for history in ([], ["a"], ["b", "c"], ["c", "a", "b"]):
            ids = tuple(vocab.lookup(y) for y in history)
            context = (0, *ids)[-2:]
            for label in ("a", "b", "c", "</s>"):
                expected = lm.score(context, vocab.lookup(label)) * LN10
                assert ilm.logprob(label, history) == pytest.approx(expected)

    def test_normalized_per_context(self):
        ilm = estimate_ilm([["a", "b", "c"], ["c", "c"]], "1")
        for history in ([], ["a"], ["c"]):
            total = np.exp(ilm.log_distribution([*ilm.labels, "</s>", "<unk>"], history)).sum()
            assert total == pytest.approx(1.0, abs=1e-6)

    def test_empty_transcripts(self):
        with pytest.raises(EmptyCorpusError):
            estimate_ilm([[]], "1")

    def test_bad_order(self):
        with pytest.raises(ValueError):
            estimate_ilm([["a"]], "2")  # type: ignore[arg-type]


class TestScorers:
    def test_transducer_scorer_without_bias(self):
        pg = Posteriorgram.from_logits((BLANK, "a", "b"), np.array([[0.0, 1.0, 2.0]]))
        scorer = PosteriorTransducerScorer(pg)
        np.testing.assert_allclose(scorer.step(0, ["a"]).log_probs, pg.log_probs[0])
        assert scorer.context_size == 0

    def test_transducer_bias_favors_internal_lm(self, ilm_quarter_a):
        pg = Posteriorgram.from_logits((BLANK, "a", "b"), np.zeros((1, 3)))
        step = PosteriorTransducerScorer(pg, ilm_quarter_a, weight=1.0).step(0, [])
        assert np.exp(step.log_probs).sum() == pytest.approx(1.0)
        assert step.log_prob("b") - step.log_prob("a") == pytest.approx(math.log(3.0))
        assert step.log_prob(BLANK) > step.log_prob("a")

    def test_transducer_scorer_needs_blank(self):
        pg = Posteriorgram.from_logits(("a", "b"), np.zeros((1, 2)))
        with pytest.raises(UnknownLabelError):
            PosteriorTransducerScorer(pg)

    def test_position_scorer_reads_rows(self):
        table = Posteriorgram.from_logits(
            ("a", "b", "</s>"), np.array([[5.0, 0.0, 0.0], [0.0, 5.0, 0.0], [0.0, 0.0, 5.0]])
        )
        scorer = PositionLabelScorer(table)
        assert scorer.expected_length == 2
        assert int(np.argmax(scorer.step([]).log_probs)) == 0
        assert int(np.argmax(scorer.step(["a"]).log_probs)) == 1
        assert int(np.argmax(scorer.step(["a", "b", "a", "b"]).log_probs)) == 2
