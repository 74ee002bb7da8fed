"""Shared fixtures and the acceptance-verdict summary hook."""

import pytest

from politopics.corpus import Corpus

from synthdata import ACCEPTANCE_LINES, make_docs


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)


@pytest.fixture
def tiny_corpus():
    return Corpus(
        make_docs(
            [
                ("d1", "Sobre la vacuna obligatoria", ["Vaccine_1"]),
                ("d2", "Texto sobre turismo y empleo", ["Tourism_1", "Labor_1"]),
                ("d3", "Sin etiquetas", []),
            ]
        )
    )
