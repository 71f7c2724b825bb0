import pytest

from ffbm import network_from_edges


@pytest.fixture
def path3():
    """Path graph 0-1-2."""
    return network_from_edges(3, [(0, 1), (1, 2)])


@pytest.fixture
def bowtie():
    """Two triangles sharing vertex 2: 5 vertices, 6 edges."""
    return network_from_edges(5, [(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4)])


def random_multigraph(rng, num_vertices, num_edges, loops=True):
    """Uniformly random endpoints with multiplicities; used across tests."""
    edges = []
    while len(edges) < num_edges:
        u = int(rng.integers(0, num_vertices))
        v = int(rng.integers(0, num_vertices))
        if not loops and u == v:
            continue
        edges.append((u, v, int(rng.integers(1, 3))))
    return network_from_edges(num_vertices, edges)


def two_cliques(size):
    """Two disjoint complete graphs of the given size."""
    edges = []
    for base in (0, size):
        for i in range(size):
            for j in range(i + 1, size):
                edges.append((base + i, base + j))
    return network_from_edges(2 * size, edges)
