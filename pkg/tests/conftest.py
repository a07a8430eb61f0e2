import pytest

from assocmine.transactions import build_vocabulary, encode

# Four hand-checkable transactions over items a, b, c.
TOY = [["a", "b", "c"], ["a", "b"], ["a", "c"], ["b"]]


@pytest.fixture
def toy():
    vocab = build_vocabulary(TOY)
    return vocab, encode(TOY, vocab)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
