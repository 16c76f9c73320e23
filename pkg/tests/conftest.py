import random

import pytest

from tilejep.core import ColoredGraph
from tilejep.unary import PALETTE_STAGE1


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)


def random_colored_graph(rng, n_max=12, edge_p=0.28, palette=PALETTE_STAGE1,
                         multicolor_p=0.08, uncolored_p=0.10, n_min=1):
    """Random colored graph over the stage-1 palette; occasionally leaves a
    vertex uncolored or gives it two colors so the disjointness machinery is
    exercised."""
    n = rng.randint(n_min, n_max)
    verts = list(range(n))
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < edge_p]
    colors = {}
    for v in verts:
        r = rng.random()
        if r < uncolored_p:
            continue
        if r < uncolored_p + multicolor_p:
            colors[v] = rng.sample(list(palette), 2)
        else:
            colors[v] = [rng.choice(list(palette))]
    return ColoredGraph(verts, edges, colors)


def random_single_colored(rng, n_max=7, palette=("c0", "c1", "c2"), edge_p=0.35, n_min=1):
    """Random graph whose colors partition the vertices (one color each)."""
    n = rng.randint(n_min, n_max)
    verts = list(range(n))
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < edge_p]
    colors = {v: [rng.choice(list(palette))] for v in verts}
    return ColoredGraph(verts, edges, colors)
