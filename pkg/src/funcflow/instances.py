"""Ready-made instances and random generators for experiments and tests."""

from __future__ import annotations

from fractions import Fraction

from .embedding import enumerate_embeddings
from .errors import TooMany
from .network import Alphabet, Edge, Network
from .tree import ComputationTree


def add_tree(kappa=2, op="add-mod-q"):
    """Left-deep tree combining kappa sources with one operator."""
    if kappa == 1:
        return ComputationTree(2, [(1, 2)])
    nodes = 2 * kappa
    edges = [(1, kappa + 1), (2, kappa + 1)]
    for l in range(3, kappa + 1):
        edges.append((l, kappa + l - 1))
    combine_nodes = list(range(kappa + 1, 2 * kappa))
    for idx, v in enumerate(combine_nodes):
        edges.append((v, kappa + idx + 2))
    edges.sort()
    # relabel edges canonically: source edges first, then by tail
    ordered = edges[:]
    ops = {v: op for v in combine_nodes}
    return ComputationTree(nodes, ordered, ops)


def line_instance(cap1=1, cap2=1, q=5):
    """s1 -> s2 -> t computing X1 + X2; the two embeddings compute at s2 or t."""
    net = Network(3, [Edge(0, 1, Fraction(cap1), True),
                      Edge(1, 2, Fraction(cap2), True)],
                  sources=(0, 1), terminal=2, alphabet=Alphabet(q))
    tree = ComputationTree(4, [(1, 3), (2, 3), (3, 4)], {3: "add-mod-q"})
    return net, tree


def diamond_instance(q=5):
    """Directed s1->a, s2->a, a->t with unit capacities; optimum rate 1."""
    net = Network(4, [Edge(0, 2, Fraction(1), True), Edge(1, 2, Fraction(1), True),
                      Edge(2, 3, Fraction(1), True)],
                  sources=(0, 1), terminal=3, alphabet=Alphabet(q))
    tree = ComputationTree(4, [(1, 3), (2, 3), (3, 4)], {3: "add-mod-q"})
    return net, tree


def butterfly_instance():
    """Directed butterfly with one terminal wanting X xor Y, unit capacities.

    Two relays feed a shared bottleneck whose output branches to two receiver
    nodes, each also fed directly by one source; both receivers forward to the
    terminal.  Best embedding packing achieves rate 3/2.
    """
    s1, s2, a, b, t1, t2, t = range(7)
    arcs = [(s1, a), (s2, a), (a, b), (b, t1), (b, t2), (s1, t1), (s2, t2),
            (t1, t), (t2, t)]
    net = Network(7, [Edge(u, v, Fraction(1), True) for u, v in arcs],
                  sources=(s1, s2), terminal=t, alphabet=Alphabet(2))
    tree = ComputationTree(4, [(1, 3), (2, 3), (3, 4)], {3: "xor"})
    return net, tree


def relay_instance(q=5):
    """Two-relay network computing X + Y with two natural embeddings.

    Node ids: s1=0, s2=1, v=2, u=3, w=4, t=5.  Capacities admit flow 1 on the
    compute-at-v embedding plus flow 1/2 on the detour-through-u embedding,
    which saturates the terminal link of capacity 3/2.
    """
    edges = [
        Edge(0, 2, Fraction(1)),        # s1 - v
        Edge(1, 2, Fraction(1)),        # s2 - v
        Edge(2, 4, Fraction(1)),        # v - w
        Edge(4, 5, Fraction(3, 2)),     # w - t
        Edge(0, 3, Fraction(1, 2)),     # s1 - u
        Edge(3, 4, Fraction(1, 2)),     # u - w
        Edge(1, 4, Fraction(1, 2)),     # s2 - w
    ]
    net = Network(6, edges, sources=(0, 1), terminal=5, alphabet=Alphabet(q))
    tree = ComputationTree(4, [(1, 3), (2, 3), (3, 4)], {3: "add-mod-q"})
    return net, tree


def relay_embeddings():
    """The two hand-drawn embeddings of relay_instance, in canonical order."""
    from .embedding import Embedding
    b1 = Embedding(((0, 2), (1, 2), (2, 4, 5)))         # compute X+Y at v
    b2 = Embedding(((0, 3, 4), (1, 4), (4, 5)))         # compute X+Y at w
    return b1, b2


def product_sum_instance(cap=2, q=5):
    """Network for X1*X2 + X3 with a multiply relay and an add relay."""
    edges = [Edge(0, 2, Fraction(cap)), Edge(1, 2, Fraction(cap)),
             Edge(2, 4, Fraction(cap)), Edge(3, 4, Fraction(cap)),
             Edge(4, 5, Fraction(cap))]
    net = Network(6, edges, sources=(0, 1, 3), terminal=5, alphabet=Alphabet(q))
    tree = ComputationTree(
        6, [(1, 4), (2, 4), (3, 5), (4, 5), (5, 6)],
        {4: "mul-mod-q", 5: "add-mod-q"})
    return net, tree


_CAP_CHOICES = (Fraction(1, 2), Fraction(1), Fraction(1), Fraction(3, 2),
                Fraction(2), Fraction(1, 3), Fraction(3))


def random_network(rng, n_max=8, m_max=14, kappa_max=3, q=5,
                   cap_choices=_CAP_CHOICES, directed_prob=0.0):
    n = rng.randint(2, n_max)
    edges = set()
    for v in range(1, n):
        u = rng.randrange(v)
        edges.add((u, v))
    m_target = rng.randint(n - 1, max(n - 1, min(m_max, n * (n - 1) // 2)))
    tries = 0
    while len(edges) < m_target and tries < 200:
        tries += 1
        u, v = rng.randrange(n), rng.randrange(n)
        if u == v:
            continue
        edges.add((min(u, v), max(u, v)))
    kappa = rng.randint(1, min(kappa_max, n - 1))
    nodes = list(range(n))
    rng.shuffle(nodes)
    sources = tuple(nodes[:kappa])
    terminal = nodes[kappa]
    edge_objs = [Edge(u, v, rng.choice(cap_choices),
                      directed=rng.random() < directed_prob)
                 for (u, v) in sorted(edges)]
    return Network(n, edge_objs, sources, terminal, Alphabet(q))


def random_tree(rng, kappa, q=5):
    ops = ["add-mod-q", "mul-mod-q", "min", "max"]
    if q & (q - 1) == 0:
        ops.append("xor")
    if kappa == 1:
        return ComputationTree(2, [(1, 2)])
    if kappa == 2:
        return ComputationTree(4, [(1, 3), (2, 3), (3, 4)], {3: rng.choice(ops)})
    if kappa == 3:
        if rng.random() < 0.5:
            return ComputationTree(5, [(1, 4), (2, 4), (3, 4), (4, 5)],
                                   {4: rng.choice(ops)})
        return ComputationTree(6, [(1, 4), (2, 4), (3, 5), (4, 5), (5, 6)],
                               {4: rng.choice(ops), 5: rng.choice(ops)})
    raise ValueError(f"no random tree shape for kappa={kappa}")


def random_instance(rng, n_max=8, m_max=14, kappa_max=3, q=5,
                    max_embeddings=400, directed_prob=0.0, min_embeddings=1):
    """A random (network, tree) pair whose embedding set is enumerably small."""
    while True:
        net = random_network(rng, n_max=n_max, m_max=m_max, kappa_max=kappa_max,
                             q=q, directed_prob=directed_prob)
        tree = random_tree(rng, net.kappa, q=q)
        try:
            embs = enumerate_embeddings(net, tree, cap=max_embeddings)
        except TooMany:
            continue
        if len(embs) >= min_embeddings:
            return net, tree


def random_lengths(rng, count, zero_prob=0.15):
    choices = (Fraction(1), Fraction(2), Fraction(1, 2), Fraction(3),
               Fraction(1, 3), Fraction(5, 2))
    return [Fraction(0) if rng.random() < zero_prob else rng.choice(choices)
            for _ in range(count)]
