import os

import numpy as np
import pytest

from doudizhu.combos import action_space

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")
REPLAY_CORPUS = os.path.join(DATA_DIR, "replay_corpus.txt")
ARTIFACT_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "artifacts")


@pytest.fixture(scope="session")
def space():
    return action_space()


@pytest.fixture()
def rng():
    return np.random.default_rng(0)


def artifact(name: str) -> str:
    return os.path.abspath(os.path.join(ARTIFACT_DIR, name))
