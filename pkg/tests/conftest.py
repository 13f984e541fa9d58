"""Shared fixtures."""

import pytest

from seqshift.harness.toy import ToySettings, build_toy_world, write_toy_world
from seqshift.lexicon import Lexicon
from seqshift.lm import NGramModel, train_ngram
from seqshift.models import DecodeConfig, DecodeGrid
from seqshift.text import Corpus, Vocabulary


@pytest.fixture
def small_lexicon() -> Lexicon:
    """Three words over two phonemes; 'ab' and 'ba' share no prefix."""
    return Lexicon.from_pronunciations({"ab": [["a", "b"]], "ba": [["b", "a"]], "a": [["a"]]})


@pytest.fixture
def small_vocab(small_lexicon) -> Vocabulary:
    return small_lexicon.vocab


@pytest.fixture
def uniform_lm(small_vocab) -> NGramModel:
    return NGramModel.uniform(small_vocab)


@pytest.fixture
def small_bigram(small_vocab) -> NGramModel:
    text = Corpus.from_texts(["ab ba", "a ab", "ba a ab", "ab"])
    return train_ngram(text, small_vocab, 2)


@pytest.fixture
def plain_config() -> DecodeConfig:
    """No LM, no prior, no length normalization, wide beam."""
    return DecodeConfig(lm_scale=0.0, prior_scale=0.0, length_norm=0.0, beam_size=64)


@pytest.fixture(scope="session")
def toy_settings() -> ToySettings:
    return ToySettings(
        domain_words=6,
        shared_words=2,
        train_sentences=80,
        eval_sentences=4,
        prior_sentences=20,
        grid=DecodeGrid(lm_scale=[0.5], prior_scale=[0.0, 0.3], length_norm=[1.0], beam_size=4),
    )


@pytest.fixture(scope="session")
def toy_world(toy_settings):
    return build_toy_world(seed=0, settings=toy_settings)


@pytest.fixture(scope="session")
def toy_experiment_path(toy_world, tmp_path_factory):
    return write_toy_world(toy_world, tmp_path_factory.mktemp("toy"))
