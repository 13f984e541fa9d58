"""Decoder tests against exhaustive-search oracles."""

import itertools
import math

import numpy as np
import pytest

from seqshift.acoustic import (
    BLANK,
    ContextPrior,
    FactoredScores,
    PositionLabelScorer,
    Posteriorgram,
    PosteriorTransducerScorer,
    estimate_ilm,
    log_softmax,
)
from seqshift.errors import (
    LexiconError,
    LmGranularityError,
    NoHypothesisError,
    NoTerminatedHypothesisError,
    SeqshiftValidationError,
)
from seqshift.lexicon import SILENCE, Lexicon, build_prefix_tree
from seqshift.lm import LanguageModel, NGramModel, train_ngram
from seqshift.models import DecodeConfig, ModelKind, VocabMode
from seqshift.search import (
    decode_label_sync,
    decode_time_sync,
    decode_transducer,
    length_normalized,
    max_label_steps,
)
from seqshift.text import (
    END_OF_WORD,
    SENTENCE_END,
    Corpus,
    Vocabulary,
    bpe_apply_corpus,
    bpe_learn,
)
from seqshift.topology import Topology, TransitionModel, expand_labels, viterbi_align

WIDE = 100_000
UNITS = ("a", "a#", "b", "b#")


def config(**overrides) -> DecodeConfig:
    values = {"lm_scale": 1.0, "prior_scale": 0.0, "beam_size": WIDE} | overrides
    return DecodeConfig(**values)


@pytest.fixture
def lexicon() -> Lexicon:
    return Lexicon.from_pronunciations(
        {"w1": [["a"]], "w2": [["b"]], "w3": [["a", "b"]], "w4": [["b", "a"]]}
    )


@pytest.fixture
def bigram(lexicon) -> NGramModel:
    text = Corpus.from_texts(["w1 w3", "w2 w4 w1", "w3", "w4 w2", "w1 w1"])
    return train_ngram(text, lexicon.vocab, 2)


def word_sequences(lexicon: Lexicon, max_labels: int) -> list[tuple[str, ...]]:
    """Every non-empty word sequence whose pronunciation fits into `max_labels`."""
    found: list[tuple[str, ...]] = []

    def grow(prefix: tuple[str, ...], length: int) -> None:
        if prefix:
            found.append(prefix)
        for word in lexicon.words:
            size = len(lexicon.pronunciations(word)[0])
            if length + size <= max_labels:
                grow((*prefix, word), length + size)

    grow((), 0)
    return found


def spelled(lexicon: Lexicon, words: tuple[str, ...]) -> tuple[str, ...]:
    return tuple(unit for word in words for unit in lexicon.pronunciations(word)[0])


def lm_ln(lm: LanguageModel, tokens: tuple[str, ...]) -> float:
    state = lm.initial_state()
    total = 0.0
    for token in (*tokens, SENTENCE_END):
        logp, state = lm.ln_logprob(state, lm.vocab.lookup(token))
        total += logp
    return total


def fh_path_score(
    factors: FactoredScores, labels: tuple[str, ...], trans: TransitionModel, triphone: bool
) -> float:
    """Best single-state-per-label segmentation under the factored context chain."""
    ids = [factors.index(label) for label in labels]
    boundary = factors.index(SILENCE)
    frames, count = factors.num_frames, len(ids)
    best = -math.inf
    for cuts in itertools.combinations(range(1, frames), count - 1):
        bounds = (0, *cuts, frames)
        score = (frames - count) * trans.loop + count * trans.forward
        for k, center in enumerate(ids):
            left = ids[k - 1] if k else boundary
            right = ids[k + 1] if k + 1 < count else boundary
            for t in range(bounds[k], bounds[k + 1]):
                score += factors.chain(t, left, center, right if triphone else None)
        best = max(best, score)
    return best


def transducer_path_score(pg: Posteriorgram, labels: tuple[str, ...]) -> float:
    """Best placement of one label per chosen frame, blank elsewhere."""
    best = -math.inf
    for frames in itertools.combinations(range(pg.num_frames), len(labels)):
        emitted = dict(zip(frames, labels, strict=True))
        score = sum(pg.log_prob(t, emitted.get(t, BLANK)) for t in range(pg.num_frames))
        best = max(best, score)
    return best


def oracle(candidates: dict[tuple[str, ...], float]) -> tuple[tuple[str, ...], float]:
    words, score = max(candidates.items(), key=lambda item: item[1])
    return words, score


def random_factors(seed: int, frames: int) -> FactoredScores:
    rng = np.random.default_rng(seed)
    labels = (*UNITS, SILENCE)
    size = len(labels)
    return FactoredScores(
        labels=labels,
        left=log_softmax(rng.normal(size=(frames, size))),
        center=log_softmax(rng.normal(size=(frames, size, size))),
        right=log_softmax(rng.normal(size=(frames, size, size, size))),
    )


def random_pg(seed: int, labels: tuple[str, ...], frames: int, sharpness: float = 1.5):
    rng = np.random.default_rng(seed)
    return Posteriorgram.from_logits(labels, sharpness * rng.normal(size=(frames, len(labels))))


class TestTimeSync:
    trans = TransitionModel.from_loop_prob(0.5)

    def test_acoustics_only(self):
        lexicon = Lexicon.from_pronunciations({"w1": [["a"]], "w2": [["b"]]})
        pg = Posteriorgram(
            labels=("a#", "b#", BLANK), log_probs=np.log(np.array([[0.9, 0.05, 0.05]]))
        )
        result = decode_time_sync(
            pg,
            build_prefix_tree(lexicon),
            NGramModel.uniform(lexicon.vocab),
            None,
            self.trans,
            config(lm_scale=0.0),
            ModelKind.CTC,
        )
        assert result.words == ("w1",)
        assert result.score == pytest.approx(math.log(0.9))

    def test_lm_flips_argmax(self):
        lexicon = Lexicon.from_pronunciations({"w1": [["a"]], "w2": [["b"]]})
        lm = train_ngram(Corpus.from_texts(["w2"] * 9 + ["w1"]), lexicon.vocab, 2)
        pg = Posteriorgram(
            labels=("a#", "b#", BLANK), log_probs=np.log(np.array([[0.50, 0.48, 0.02]]))
        )
        tree = build_prefix_tree(lexicon)
        args = (pg, tree, lm, None, self.trans)
        assert decode_time_sync(*args, config(lm_scale=0.0), "ctc").words == ("w1",)
        assert decode_time_sync(*args, config(lm_scale=5.0), "ctc").words == ("w2",)

    @pytest.mark.parametrize("seed", range(50))
    def test_ctc_matches_oracle(self, seed, lexicon, bigram):
        frames = 3 + seed % 2
        pg = random_pg(seed, (*UNITS, BLANK), frames)
        candidates = {}
        for words in word_sequences(lexicon, frames):
            graph = expand_labels(Topology.CTC, spelled(lexicon, words))
            acoustic = viterbi_align(graph, pg).score
            if acoustic > -math.inf:
                candidates[words] = acoustic + lm_ln(bigram, words)
        expected_words, expected_score = oracle(candidates)

        tree = build_prefix_tree(lexicon)
        result = decode_time_sync(pg, tree, bigram, None, self.trans, config(), "ctc")
        assert result.words == expected_words
        assert result.score == pytest.approx(expected_score, abs=1e-6)

    @pytest.mark.parametrize("kind", [ModelKind.FH_TRI, ModelKind.FH_DI])
    @pytest.mark.parametrize("seed", range(50))
    def test_factored_matches_oracle(self, kind, seed, lexicon, bigram):
        frames = 3 + seed % 2
        factors = random_factors(seed, frames)
        trans = TransitionModel.from_loop_prob(0.6)
        triphone = kind is ModelKind.FH_TRI
        candidates = {
            words: fh_path_score(factors, spelled(lexicon, words), trans, triphone)
            + lm_ln(bigram, words)
            for words in word_sequences(lexicon, frames)
        }
        expected_words, expected_score = oracle(candidates)

        tree = build_prefix_tree(lexicon)
        result = decode_time_sync(factors, tree, bigram, None, trans, config(), kind)
        assert result.words == expected_words
        assert result.score == pytest.approx(expected_score, abs=1e-6)

    @pytest.mark.parametrize("seed", range(20))
    def test_zero_lm_scale_ignores_lm(self, seed, lexicon, bigram):
        pg = random_pg(100 + seed, (*UNITS, BLANK), 4)
        tree = build_prefix_tree(lexicon)
        cfg = config(lm_scale=0.0, beam_size=4)
        with_bigram = decode_time_sync(pg, tree, bigram, None, self.trans, cfg, "ctc")
        with_uniform = decode_time_sync(
            pg, tree, NGramModel.uniform(lexicon.vocab), None, self.trans, cfg, "ctc"
        )
        assert with_bigram == with_uniform

    @pytest.mark.parametrize("seed", range(20))
    def test_zero_prior_scale_ignores_prior(self, seed, lexicon, bigram):
        factors = random_factors(100 + seed, 4)
        tree = build_prefix_tree(lexicon)
        rng = np.random.default_rng(seed)
        counts = rng.integers(1, 9, size=(5, 5, 5))
        prior = ContextPrior(labels=factors.labels, order=3, probs=counts / counts.sum())
        cfg = config(prior_scale=0.0, beam_size=4)
        plain = decode_time_sync(factors, tree, bigram, None, self.trans, cfg, "fh_tri")
        with_prior = decode_time_sync(factors, tree, bigram, prior, self.trans, cfg, "fh_tri")
        assert plain == with_prior

    def test_narrow_beam_never_beats_oracle(self, lexicon, bigram):
        pg = random_pg(3, (*UNITS, BLANK), 4)
        tree = build_prefix_tree(lexicon)
        wide = decode_time_sync(pg, tree, bigram, None, self.trans, config(), "ctc")
        narrow = decode_time_sync(pg, tree, bigram, None, self.trans, config(beam_size=1), "ctc")
        assert narrow.score <= wide.score + 1e-9

    def test_deterministic(self, lexicon, bigram):
        factors = random_factors(8, 4)
        tree = build_prefix_tree(lexicon)
        runs = [
            decode_time_sync(factors, tree, bigram, None, self.trans, config(beam_size=3), "fh_di")
            for _ in range(3)
        ]
        assert runs[0] == runs[1] == runs[2]

    def test_optional_silence(self):
        lexicon = Lexicon.from_pronunciations({"w1": [["a"]], "w2": [["b"]]})
        labels = ("a#", "b#", SILENCE)
        targets = ["a#", SILENCE, "b#"]
        center = np.full((3, 3, 3), 0.05)
        for t, target in enumerate(targets):
            center[t, :, labels.index(target)] = 0.9
        factors = FactoredScores(
            labels=labels,
            left=np.full((3, 3), math.log(1 / 3)),
            center=np.log(center),
        )
        tree = build_prefix_tree(lexicon)
        lm = NGramModel.uniform(lexicon.vocab)
        result = decode_time_sync(
            factors, tree, lm, None, self.trans, config(lm_scale=0.0), "fh_di", silence=True
        )
        assert result.words == ("w1", "w2")
        assert result.labels == ("a#", SILENCE, "b#")

    def test_no_word_end(self):
        lexicon = Lexicon.from_pronunciations({"w3": [["a", "b"]]})
        pg = random_pg(0, ("a", "b#", BLANK), 1)
        with pytest.raises(NoHypothesisError):
            decode_time_sync(
                pg,
                build_prefix_tree(lexicon),
                NGramModel.uniform(lexicon.vocab),
                None,
                self.trans,
                config(),
                "ctc",
            )

    def test_lm_must_cover_lexicon(self, lexicon):
        pg = random_pg(0, (*UNITS, BLANK), 2)
        lm = NGramModel.uniform(Vocabulary.from_words(["w1"]))
        with pytest.raises(LexiconError):
            decode_time_sync(pg, build_prefix_tree(lexicon), lm, None, self.trans, config(), "ctc")

    def test_closed_vocabulary_only(self, lexicon, bigram):
        pg = random_pg(0, (*UNITS, BLANK), 2)
        cfg = config(vocab_mode=VocabMode.OPEN)
        with pytest.raises(SeqshiftValidationError):
            decode_time_sync(pg, build_prefix_tree(lexicon), bigram, None, self.trans, cfg, "ctc")

    def test_prior_required_when_scaled(self, lexicon, bigram):
        pg = random_pg(0, (*UNITS, BLANK), 2)
        cfg = config(prior_scale=0.5)
        with pytest.raises(SeqshiftValidationError, match="prior"):
            decode_time_sync(pg, build_prefix_tree(lexicon), bigram, None, self.trans, cfg, "ctc")


class TestTransducer:
    @pytest.mark.parametrize("seed", range(50))
    @pytest.mark.parametrize("lm_scale", [0.0, 1.0])
    def test_closed_matches_oracle(self, seed, lm_scale, lexicon, bigram):
        frames = 3 + seed % 2
        pg = random_pg(seed, (BLANK, *UNITS), frames)
        candidates = {
            words: transducer_path_score(pg, spelled(lexicon, words))
            + lm_scale * lm_ln(bigram, words)
            for words in word_sequences(lexicon, frames)
        }
        expected_words, expected_score = oracle(candidates)

        result = decode_transducer(
            PosteriorTransducerScorer(pg),
            None,
            bigram,
            build_prefix_tree(lexicon),
            config(lm_scale=lm_scale),
        )
        assert result.words == expected_words
        assert result.score == pytest.approx(expected_score, abs=1e-6)

    @pytest.mark.parametrize("seed", range(50))
    def test_open_matches_oracle(self, seed):
        text = Corpus.from_texts(["ab ba", "ba ab ab"])
        bpe = bpe_learn(text, 0)
        tokens = tuple(sorted(bpe.vocab))
        lm = train_ngram(bpe_apply_corpus(bpe, text), Vocabulary.from_words(tokens), 2)
        pg = random_pg(seed, (BLANK, *tokens), 3)
        candidates = {
            sequence: transducer_path_score(pg, sequence) + lm_ln(lm, sequence)
            for size in range(1, 4)
            for sequence in itertools.product(tokens, repeat=size)
            if sequence[-1].endswith(END_OF_WORD)
        }
        expected_labels, expected_score = oracle(candidates)

        cfg = config(vocab_mode=VocabMode.OPEN)
        result = decode_transducer(PosteriorTransducerScorer(pg), None, lm, bpe, cfg)
        assert result.labels == expected_labels
        assert result.score == pytest.approx(expected_score, abs=1e-6)

    def test_closed_and_open_agree_on_peaked_input(self):
        text = Corpus.from_texts(["ab ba"])
        bpe = bpe_learn(text, 0)
        lexicon = Lexicon.from_bpe(["ab", "ba"], bpe)
        tokens = tuple(sorted(bpe.vocab))
        labels = (BLANK, *tokens)
        spoken = ["a", "b</w>", BLANK, "b", "a</w>", BLANK]
        probs = np.full((len(spoken), len(labels)), 0.1 / (len(labels) - 1))
        for t, label in enumerate(spoken):
            probs[t, labels.index(label)] = 0.9
        pg = Posteriorgram(labels=labels, log_probs=np.log(probs))

        closed = decode_transducer(
            PosteriorTransducerScorer(pg),
            None,
            NGramModel.uniform(lexicon.vocab),
            build_prefix_tree(lexicon),
            config(lm_scale=0.0),
        )
        opened = decode_transducer(
            PosteriorTransducerScorer(pg),
            None,
            NGramModel.uniform(Vocabulary.from_words(tokens)),
            bpe,
            config(lm_scale=0.0, vocab_mode=VocabMode.OPEN),
        )
        assert closed.words == opened.words == ("ab", "ba")

    def test_open_mode_ends_on_word_final_subword(self):
        bpe = bpe_learn(Corpus.from_texts(["aa"]), 0)
        assert bpe.vocab >= {"a", "a</w>"}
        labels = (BLANK, "a", "a</w>")
        pg = Posteriorgram(labels=labels, log_probs=np.log(np.array([[0.05, 0.9, 0.05]] * 2)))
        lm = NGramModel.uniform(Vocabulary.from_words(["a", "a</w>"]))
        cfg = config(lm_scale=0.0, vocab_mode=VocabMode.OPEN)
        result = decode_transducer(PosteriorTransducerScorer(pg), None, lm, bpe, cfg)
        assert result.labels == ("a", "a</w>")
        assert result.words == ("aa",)
        assert result.score == pytest.approx(math.log(0.9 * 0.05))

    def test_open_mode_without_word_end(self):
        bpe = bpe_learn(Corpus.from_texts(["aa"]), 0)
        pg = Posteriorgram(labels=(BLANK, "a"), log_probs=np.log(np.array([[0.1, 0.9]])))
        lm = NGramModel.uniform(Vocabulary.from_words(["a"]))
        cfg = config(lm_scale=0.0, vocab_mode=VocabMode.OPEN)
        with pytest.raises(NoHypothesisError):
            decode_transducer(PosteriorTransducerScorer(pg), None, lm, bpe, cfg)

    def test_ties_broken_by_label_id(self):
        bpe = bpe_learn(Corpus.from_texts(["a b"]), 0)
        labels = (BLANK, "b</w>", "a</w>")
        pg = Posteriorgram(labels=labels, log_probs=np.log(np.full((1, 3), 1 / 3)))
        lm = NGramModel.uniform(Vocabulary.from_words(["a</w>", "b</w>"]))
        cfg = config(lm_scale=0.0, vocab_mode=VocabMode.OPEN)
        result = decode_transducer(PosteriorTransducerScorer(pg), None, lm, bpe, cfg)
        assert result.labels == ("b</w>",)

    def test_open_mode_rejects_word_lm(self):
        bpe = bpe_learn(Corpus.from_texts(["ab ba"]), 0)
        pg = random_pg(0, (BLANK, *sorted(bpe.vocab)), 2)
        word_lm = NGramModel.uniform(Vocabulary.from_words(["ab", "ba"]))
        cfg = config(vocab_mode=VocabMode.OPEN)
        with pytest.raises(LmGranularityError, match="LM granularity mismatch"):
            decode_transducer(PosteriorTransducerScorer(pg), None, word_lm, bpe, cfg)

    def test_ilm_required_when_scaled(self, lexicon, bigram):
        pg = random_pg(0, (BLANK, *UNITS), 2)
        with pytest.raises(SeqshiftValidationError, match="ILM"):
            decode_transducer(
                PosteriorTransducerScorer(pg),
                None,
                bigram,
                build_prefix_tree(lexicon),
                config(prior_scale=0.3),
            )

    @pytest.mark.parametrize("seed", range(20))
    def test_zero_ilm_scale_ignores_ilm(self, seed, lexicon, bigram):
        rng = np.random.default_rng(seed)
        pg = random_pg(100 + seed, (BLANK, *UNITS), 4)
        tree = build_prefix_tree(lexicon)
        transcripts = [[str(u) for u in rng.choice(UNITS, size=3)] for _ in range(4)]
        ilm = estimate_ilm(transcripts, "1", labels=UNITS)
        cfg = config(prior_scale=0.0, beam_size=4)
        plain = decode_transducer(PosteriorTransducerScorer(pg), None, bigram, tree, cfg)
        with_ilm = decode_transducer(PosteriorTransducerScorer(pg), ilm, bigram, tree, cfg)
        assert plain == with_ilm

    def test_ilm_subtraction_matches_oracle(self, lexicon, bigram):
        pg = random_pg(6, (BLANK, *UNITS), 4)
        ilm = estimate_ilm([["a", "b#"], ["b", "a#"], ["a#"], ["b#", "a#"]], "1", labels=UNITS)
        alpha = 0.4

        def ilm_ln(labels: tuple[str, ...]) -> float:
            return sum(ilm.logprob(label, labels[:i]) for i, label in enumerate(labels))

        candidates = {}
        for words in word_sequences(lexicon, 4):
            labels = spelled(lexicon, words)
            candidates[words] = (
                transducer_path_score(pg, labels) - alpha * ilm_ln(labels) + lm_ln(bigram, words)
            )
        expected_words, expected_score = oracle(candidates)

        result = decode_transducer(
            PosteriorTransducerScorer(pg),
            ilm,
            bigram,
            build_prefix_tree(lexicon),
            config(prior_scale=alpha),
        )
        assert result.words == expected_words
        assert result.score == pytest.approx(expected_score, abs=1e-6)


A, B = "a</w>", "b</w>"


class TestLabelSync:
    labels = (A, B, SENTENCE_END)

    @pytest.fixture
    def lm(self):
        return NGramModel.uniform(Vocabulary.from_words([A, B]))

    def test_step_limit(self):
        cfg = DecodeConfig()
        assert max_label_steps(cfg, 4) == 2 + 6
        assert max_label_steps(DecodeConfig(max_label_steps=3), 4) == 3

    def test_length_normalization_prefers_shorter(self):
        short = length_normalized(-2.0, 2, 1.0)
        long = length_normalized(-2.0, 4, 1.0)
        assert short - long == pytest.approx(math.log(2))
        assert length_normalized(-2.0, 4, 0.0) == -2.0

    @pytest.mark.parametrize("seed", range(50))
    def test_matches_oracle(self, seed):
        labels = ("a", A, B, SENTENCE_END)
        table = random_pg(seed, labels, 3)
        rows = table.log_probs

        def path_score(sequence: tuple[str, ...]) -> float:
            steps = [*sequence, SENTENCE_END]
            return sum(float(rows[min(m, 2), labels.index(label)]) for m, label in enumerate(steps))

        candidates = {
            sequence: path_score(sequence)
            for size in range(1, 4)
            for sequence in itertools.product(labels[:3], repeat=size)
            if sequence[-1].endswith(END_OF_WORD)
        }
        expected_labels, expected_score = oracle(candidates)

        lm = NGramModel.uniform(Vocabulary.from_words(labels[:3]))
        cfg = config(lm_scale=0.0, max_label_steps=4)
        result = decode_label_sync(PositionLabelScorer(table), None, lm, cfg)
        assert result.labels == expected_labels
        assert result.score == pytest.approx(expected_score, abs=1e-6)
        assert result.normalized_score == pytest.approx(result.score)

    def test_end_only_after_word_final_subword(self):
        labels = ("a", A, SENTENCE_END)
        probs = np.array([[0.8, 0.1, 0.1], [0.1, 0.1, 0.8], [0.1, 0.1, 0.8]])
        table = Posteriorgram(labels=labels, log_probs=np.log(probs))
        lm = NGramModel.uniform(Vocabulary.from_words(["a", A]))
        cfg = config(lm_scale=0.0, max_label_steps=4)
        result = decode_label_sync(PositionLabelScorer(table), None, lm, cfg)
        assert result.labels == (A,)
        assert result.words == ("a",)
        assert result.score == pytest.approx(math.log(0.1 * 0.8))

    def test_length_norm_changes_winner(self, lm):
        probs = np.array([[0.7, 0.2, 0.1], [0.8, 0.1, 0.1], [0.1, 0.1, 0.8]])
        table = Posteriorgram(labels=self.labels, log_probs=np.log(probs))
        plain = decode_label_sync(
            PositionLabelScorer(table), None, lm, config(lm_scale=0.0, max_label_steps=4)
        )
        assert plain.labels == (A, A)
        assert plain.words == ("a", "a")
        assert plain.normalized_score == pytest.approx(plain.score)
        normalized = decode_label_sync(
            PositionLabelScorer(table),
            None,
            lm,
            config(lm_scale=0.0, max_label_steps=4, length_norm=3.0),
        )
        assert normalized.labels == (A,)
        assert normalized.score == pytest.approx(math.log(0.7 * 0.1))

    def test_ties_broken_by_label_id(self):
        labels = (B, A, SENTENCE_END)
        probs = np.array([[0.4, 0.4, 0.2], [0.1, 0.1, 0.8]])
        table = Posteriorgram(labels=labels, log_probs=np.log(probs))
        lm = NGramModel.uniform(Vocabulary.from_words([A, B]))
        cfg = config(lm_scale=0.0, max_label_steps=2)
        result = decode_label_sync(PositionLabelScorer(table), None, lm, cfg)
        assert result.labels == (B,)

    def test_no_terminated_hypothesis(self, lm):
        table = random_pg(0, self.labels, 3)
        cfg = config(lm_scale=0.0, max_label_steps=1)
        with pytest.raises(NoTerminatedHypothesisError, match="no terminated hypothesis"):
            decode_label_sync(PositionLabelScorer(table), None, lm, cfg)

    def test_word_lm_rejected(self):
        table = random_pg(0, self.labels, 3)
        word_lm = NGramModel.uniform(Vocabulary.from_words(["ab"]))
        with pytest.raises(LmGranularityError):
            decode_label_sync(PositionLabelScorer(table), None, word_lm, config())

    @pytest.mark.parametrize("seed", range(20))
    def test_zero_lm_scale_ignores_lm(self, seed, lm):
        table = random_pg(100 + seed, self.labels, 3)
        rng = np.random.default_rng(seed)
        text = [" ".join(rng.choice([A, B], size=3)) for _ in range(4)]
        other = train_ngram(Corpus.from_texts(text), lm.vocab, 2)
        cfg = config(lm_scale=0.0, length_norm=0.5, beam_size=2)
        first = decode_label_sync(PositionLabelScorer(table), None, lm, cfg)
        second = decode_label_sync(PositionLabelScorer(table), None, other, cfg)
        assert first == second
