from __future__ import annotations

import pytest

from qmaze.maze import Maze

# The canonical 2x2 example: start (0,0), goal (1,1), unique solution S->E.
# Passages: (0,0)-(1,0), (1,0)-(1,1), (0,0)-(0,1).
EXAMPLE_SIDES = ((0b0110, 0b0001), (0b1100, 0b0001))


@pytest.fixture
def example_maze() -> Maze:
    return Maze(size=2, open_sides=EXAMPLE_SIDES, start=(0, 0), goal=(1, 1))
