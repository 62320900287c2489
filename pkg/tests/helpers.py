"""Shared test machinery: seeded random model builders and independent
brute-force checkers that the library results are compared against."""

import itertools
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from xbool.models import (
    DecisionList,
    DecisionSet,
    DecisionTree,
    DtInner,
    DtLeaf,
    Ensemble,
    Obdd,
    ObddNode,
    classify,
    complete_obdd,
    model_features,
)
from xbool.gadgets import MccInstance, vertex_feature
from xbool.explain import ExplanationQuery, Witness, is_explanation, oracle_min


def all_examples(feats: Sequence[str]):
    feats = tuple(feats)
    for bits in itertools.product((0, 1), repeat=len(feats)):
        yield dict(zip(feats, bits))


def models_equal(a, b, feats) -> bool:
    return all(classify(a, e) == classify(b, e) for e in all_examples(feats))


# ---------------------------------------------------------------------------
# Random models


def rand_dt(rng, feats: Sequence[str], split: float = 0.75) -> DecisionTree:
    """Random tree without repeated features along any path."""
    counter = itertools.count()
    nodes = {}

    def build(avail: Tuple[str, ...]) -> str:
        nid = f"n{next(counter)}"
        if avail and rng.random() < split:
            f = avail[rng.randrange(len(avail))]
            rest = tuple(g for g in avail if g != f)
            nodes[nid] = DtInner(f, build(rest), build(rest))
        else:
            nodes[nid] = DtLeaf(rng.randint(0, 1))
        return nid

    root = build(tuple(feats))
    return DecisionTree(nodes, root)


def rand_ordered_dt(rng, feats: Sequence[str], split: float = 0.8) -> DecisionTree:
    """Random tree whose every path tests features in the given order."""
    counter = itertools.count()
    nodes = {}

    def build(lo: int) -> str:
        nid = f"n{next(counter)}"
        if lo < len(feats) and rng.random() < split:
            at = rng.randrange(lo, len(feats))
            nodes[nid] = DtInner(feats[at], build(at + 1), build(at + 1))
        else:
            nodes[nid] = DtLeaf(rng.randint(0, 1))
        return nid

    root = build(0)
    return DecisionTree(nodes, root)


def rand_term(rng, feats: Sequence[str], max_len: int) -> List[Tuple[str, int]]:
    size = rng.randint(1, max(1, min(max_len, len(feats))))
    chosen = rng.sample(list(feats), size)
    return [(f, rng.randint(0, 1)) for f in chosen]


def rand_ds(rng, feats, max_terms: int = 4, max_len: int = 3) -> DecisionSet:
    terms = [rand_term(rng, feats, max_len) for _ in range(rng.randint(0, max_terms))]
    return DecisionSet(terms, rng.randint(0, 1))


def rand_dl(rng, feats, max_rules: int = 5, max_len: int = 3) -> DecisionList:
    rules = [
        (rand_term(rng, feats, max_len), rng.randint(0, 1))
        for _ in range(rng.randint(0, max_rules - 1))
    ]
    rules.append(([], rng.randint(0, 1)))
    return DecisionList(rules)


def rand_obdd(rng, feats: Sequence[str], width: int = 4) -> Obdd:
    """Random complete diagram with at most `width` nodes per level."""
    order = tuple(feats)
    n = len(order)
    nodes: Dict[str, ObddNode] = {}
    below: List[str] = ["t0", "t1"]
    for lv in range(n - 1, -1, -1):
        layer = []
        for idx in range(1 if lv == 0 else rng.randint(1, width)):
            nid = f"n{lv}.{idx}"
            nodes[nid] = ObddNode(order[lv], rng.choice(below), rng.choice(below))
            layer.append(nid)
        below = layer
    source = below[0] if n else rng.choice(("t0", "t1"))
    keep = set()
    stack = [source]
    while stack:
        nid = stack.pop()
        if nid in ("t0", "t1") or nid in keep:
            continue
        keep.add(nid)
        stack.append(nodes[nid].zero)
        stack.append(nodes[nid].one)
    return Obdd(
        {k: v for k, v in nodes.items() if k in keep}, source, "t0", "t1", order
    )


def rand_sparse_obdd(rng, feats: Sequence[str]) -> Obdd:
    """Random diagram whose arcs may skip levels (not complete)."""
    order = tuple(feats)
    n = len(order)
    layers: List[List[str]] = [[] for _ in range(n)]
    nodes: Dict[str, ObddNode] = {}
    for lv in range(n - 1, -1, -1):
        targets = ["t0", "t1"] + [nid for L in layers[lv + 1 :] for nid in L]
        for idx in range(1 if lv == 0 else rng.randint(0, 2)):
            nid = f"n{lv}.{idx}"
            nodes[nid] = ObddNode(order[lv], rng.choice(targets), rng.choice(targets))
            layers[lv].append(nid)
    source = layers[0][0] if n and layers[0] else rng.choice(("t0", "t1"))
    keep = set()
    stack = [source]
    while stack:
        nid = stack.pop()
        if nid in ("t0", "t1") or nid in keep:
            continue
        keep.add(nid)
        stack.append(nodes[nid].zero)
        stack.append(nodes[nid].one)
    return Obdd(
        {k: v for k, v in nodes.items() if k in keep}, source, "t0", "t1", order
    )


def rand_example(rng, feats) -> Dict[str, int]:
    return {f: rng.randint(0, 1) for f in feats}


# ---------------------------------------------------------------------------
# Brute-force reference checks


def min_hitting_set(universe, sets) -> Optional[int]:
    universe = list(universe)
    for size in range(len(universe) + 1):
        for combo in itertools.combinations(universe, size):
            chosen = set(combo)
            if all(chosen & set(s) for s in sets):
                return size
    return None


def has_multicolored_clique(g: MccInstance) -> bool:
    parts = [g.part_members(i) for i in range(g.k)]
    if any(not p for p in parts):
        return False
    for combo in itertools.product(*parts):
        if all(g.has_edge(u, v) for u, v in itertools.combinations(combo, 2)):
            return True
    return False


def random_mcc(rng, n: int, k: int, density: float = 0.5) -> MccInstance:
    labels = [i % k for i in range(n)]
    rng.shuffle(labels)
    verts = [(f"v{i}", labels[i]) for i in range(n)]
    part = dict(verts)
    edges = [
        (u, v)
        for (u, _), (v, _) in itertools.combinations(verts, 2)
        if part[u] != part[v] and rng.random() < density
    ]
    return MccInstance(verts, edges)


def zero_example(model) -> Dict[str, int]:
    return {f: 0 for f in model_features(model)}


def hom_bruteforce(model) -> bool:
    """True iff the model is homogeneous (every example matches e0)."""
    feats = sorted(model_features(model))
    e0 = {f: 0 for f in feats}
    c = classify(model, e0)
    return all(classify(model, e) == c for e in all_examples(feats))


def p_hom_bruteforce(model, k: int) -> bool:
    """True iff some example with at most k ones flips the class of e0."""
    feats = sorted(model_features(model))
    e0 = {f: 0 for f in feats}
    c = classify(model, e0)
    for size in range(0, min(k, len(feats)) + 1):
        for combo in itertools.combinations(feats, size):
            e = dict(e0)
            for f in combo:
                e[f] = 1
            if classify(model, e) != c:
                return True
    return False


def hom_statements(model) -> List[bool]:
    """The nine equivalent homogeneity formulations, each evaluated
    through the public query machinery rather than one shared shortcut."""
    feats = sorted(model_features(model))
    e0 = {f: 0 for f in feats}
    c = classify(model, e0)
    empty_set = Witness(features=())
    empty_tau = Witness(assignment=())
    return [
        hom_bruteforce(model),
        is_explanation(model, ExplanationQuery("lAXp", "subset", e0), empty_set),
        oracle_min(model, ExplanationQuery("lCXp", "subset", e0)) is None,
        is_explanation(model, ExplanationQuery("gAXp", "subset", c), empty_tau),
        is_explanation(model, ExplanationQuery("gCXp", "subset", 1 - c), empty_tau),
        oracle_min(model, ExplanationQuery("lAXp", "cardinality", e0, k=0)) is not None,
        oracle_min(model, ExplanationQuery("lCXp", "cardinality", e0, k=len(feats)))
        is None,
        oracle_min(model, ExplanationQuery("gAXp", "cardinality", c, k=0)) is not None,
        oracle_min(model, ExplanationQuery("gCXp", "cardinality", 1 - c, k=0))
        is not None,
    ]


def gaxp_within(tree: DecisionTree, k: int) -> bool:
    """Branch over accepting paths: a size-k class-0 abductive assignment
    exists iff k contradictions can cut every path to a 1-leaf."""
    paths = []
    stack = [(tree.root, [])]
    while stack:
        nid, alpha = stack.pop()
        node = tree.nodes[nid]
        if isinstance(node, DtLeaf):
            if node.label == 1:
                paths.append(dict(alpha))
            continue
        stack.append((node.zero, alpha + [(node.feature, 0)]))
        stack.append((node.one, alpha + [(node.feature, 1)]))

    def cut(tau: Dict[str, int], depth: int) -> bool:
        for path in paths:
            if all(tau.get(f, v) == v for f, v in path.items()):
                if depth == 0:
                    return False
                for f, v in path.items():
                    if f not in tau:
                        tau2 = dict(tau)
                        tau2[f] = 1 - v
                        if cut(tau2, depth - 1):
                            return True
                return False
        return True

    return cut({}, k)
