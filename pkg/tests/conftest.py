import pytest

from curricula import CorpusSpec, generate_corpus


@pytest.fixture(scope="session")
def separable_corpus():
    """Noiseless corpus: a linear classifier can reach zero training error."""
    spec = CorpusSpec(
        n_utterances=80,
        vocab_size=6,
        feature_dim=10,
        token_length_range=(3, 9),
        noise_sigma_range=(0.0, 0.0),
        frame_seconds=0.5,
        prototype_scale=3.0,
    )
    return generate_corpus(spec, seed=101)


@pytest.fixture(scope="session")
def noisy_corpus():
    spec = CorpusSpec(
        n_utterances=120,
        vocab_size=10,
        feature_dim=12,
        token_length_range=(3, 12),
        noise_sigma_range=(0.1, 0.6),
        frame_seconds=0.5,
        prototype_scale=3.0,
    )
    return generate_corpus(spec, seed=202)
