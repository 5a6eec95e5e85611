"""Pytest fixtures shared by the suite."""

import pytest


@pytest.fixture
def demo_corpus_path():
    from importlib import resources

    with resources.as_file(
        resources.files("trustan").joinpath("data/demo_corpus.jsonl")
    ) as path:
        yield path
