import random

from hypothesis import strategies as st

from levers import Controllability, Factor, FcmGraph, Influence, Sign, Strength


def make_graph(edges, ids=(), title="test", controllability=None, signs=None):
    """Small-graph builder: edges as (source, target) pairs, ids added as needed."""
    all_ids = sorted(set(ids) | {x for e in edges for x in e})
    controllability = controllability or {}
    signs = signs or {}
    factors = [
        Factor(
            id=i,
            name=i.upper(),
            controllability=controllability.get(i, Controllability.MEDIUM),
        )
        for i in all_ids
    ]
    influences = [
        Influence(
            source=s,
            target=t,
            sign=signs.get((s, t), Sign.POSITIVE),
            strength=Strength.MEDIUM,
        )
        for s, t in edges
    ]
    return FcmGraph.create(factors, influences, title=title)


def random_digraph(rng: random.Random, n: int, p: float, self_loops: bool = False):
    ids = [f"n{i:02d}" for i in range(n)]
    edges = [
        (u, v)
        for u in ids
        for v in ids
        if (u != v or self_loops) and rng.random() < p
    ]
    return make_graph(edges, ids=ids)


def acceptance_corpus(per_cell: int = 16):
    """Deterministic random-digraph corpus: N in [2,12] x p in {0.1,0.25,0.5}."""
    graphs = []
    for n in range(2, 13):
        for p in (0.1, 0.25, 0.5):
            for seed in range(per_cell):
                rng = random.Random((n, int(p * 100), seed).__hash__())
                graphs.append(random_digraph(rng, n, p))
    return graphs


@st.composite
def digraphs(draw, max_nodes=10, self_loops=False):
    n = draw(st.integers(min_value=1, max_value=max_nodes))
    ids = [f"n{i:02d}" for i in range(n)]
    pairs = [(u, v) for u in ids for v in ids if u != v or self_loops]
    edges = draw(
        st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs))
        if pairs
        else st.just([])
    )
    return make_graph(edges, ids=ids)
