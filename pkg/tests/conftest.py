import pytest

from gridbot.grid import parse_map


@pytest.fixture
def empty3():
    return parse_map("S..\n...\n..G")


@pytest.fixture
def empty5():
    return parse_map("S....\n.....\n.....\n.....\n....G")


def grid_from(text: str):
    return parse_map(text)
