import pytest

from stparse import data
from stparse.corpus import Corpus, Sentence


def sent(id, text, pos=None, tags=None, triples=None):
    forms = text.split()
    return Sentence.from_forms(id, forms, pos or ["X"] * len(forms), tags, triples)


@pytest.fixture(scope="session")
def toy_grammar():
    return data.toy_grammar()


@pytest.fixture(scope="session")
def toy_corpus():
    return data.toy_corpus()


@pytest.fixture(scope="session")
def toy_splits():
    return data.toy_splits()


@pytest.fixture(scope="session")
def separable_corpus():
    """Two tags, each decided by the form alone."""
    words = {"ant": "A", "bee": "B", "cat": "A", "dog": "B", "eel": "A", "fox": "B"}
    sents = []
    for k in range(12):
        forms = [list(words)[(k + j) % 6] for j in range(3 + k % 3)]
        sents.append(Sentence.from_forms(str(k), forms, ["NN"] * len(forms),
                                         [words[f] for f in forms]))
    return Corpus("separable", tuple(sents))


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
