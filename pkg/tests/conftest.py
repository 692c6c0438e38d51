from typing import Callable, List

import numpy as np
import pytest

from transverse.braid import BraidWord
from transverse.config import TransverseConfig

RandomWords = Callable[..., List[BraidWord]]


@pytest.fixture
def config() -> TransverseConfig:
    return TransverseConfig()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(TransverseConfig.RANDOM_SEED)


@pytest.fixture
def random_words(rng: np.random.Generator) -> RandomWords:
    """Seeded random braid words with 1..max_letters letters"""

    def make(count: int, strands: int, max_letters: int, min_letters: int = 1) -> List[BraidWord]:
        words = []
        for _ in range(count):
            length = int(rng.integers(min_letters, max_letters + 1))
            indices = rng.integers(1, strands, size=length)
            signs = rng.choice([-1, 1], size=length)
            words.append(BraidWord(strands, tuple(int(i * s) for i, s in zip(indices, signs))))
        return words

    return make
