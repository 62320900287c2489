"""Explanation algorithms for complete ordered binary decision diagrams.

The primitive here is sink reachability under a partial assignment:
drop every arc that disagrees with the assignment and see which sinks
survive.  Completeness makes the diagram leveled, which turns the
minimum contrastive search into a per-level dynamic program and the
ensemble product into a lockstep walk.
"""

from __future__ import annotations

import itertools
from collections import deque
from typing import Dict, List, Optional, Tuple

from .errors import (
    BudgetExceeded,
    Homogeneous,
    ModelError,
    NotOrdered,
    UndefinedFeature,
)
from .explain import ExplanationQuery, Witness
from .models import (
    DecisionTree,
    DtInner,
    DtLeaf,
    Ensemble,
    Example,
    Obdd,
    ObddNode,
    classify,
    complete_obdd,
    is_complete,
    reachable_sinks,
)

DEFAULT_NODE_CAP = 10**6


def obdd_check(o: Obdd, q: ExplanationQuery, w: Witness) -> bool:
    """Polynomial witness check via sink reachability; no lCXp variant."""
    if q.kind == "lCXp":
        raise ModelError("lCXp has no reachability test; use obdd_min_lcxp")
    if q.k is not None and w.size > q.k:
        return False
    o = complete_obdd(o)
    if q.kind == "lAXp":
        e = q.target
        tau = {f: e[f] for f in w.features}
        return reachable_sinks(o, tau) == {classify(o, e)}
    labels = reachable_sinks(o, dict(w.assignment))
    if q.kind == "gAXp":
        return labels == {q.target}
    return q.target not in labels


def obdd_lcxp_check(o: Obdd, e: Example, features) -> bool:
    """True iff flipping inside the set can change the class: fix the
    example outside it and ask whether the opposite sink stays reachable."""
    names = frozenset(str(f) for f in features)
    if not names:
        return False
    o = complete_obdd(o)
    for f in o.order:
        if f not in e:
            raise UndefinedFeature(f"example does not assign feature {f!r}")
    tau = {f: e[f] for f in o.order if f not in names}
    return (1 - classify(o, e)) in reachable_sinks(o, tau)


def _can_reach(o: Obdd, label: int) -> set:
    """Node ids (and the sink) from which the sink labeled `label` is reachable."""
    target = o.t1 if label == 1 else o.t0
    hit = {target}
    # arcs only go forward in the order, so one reverse sweep suffices
    for nid in sorted(o.nodes, key=lambda n: -o.level(n)):
        node = o.nodes[nid]
        if node.zero in hit or node.one in hit:
            hit.add(nid)
    return hit


def _least_path(o: Obdd, label: int) -> Optional[Dict[str, int]]:
    """Full assignment along the 0-preferring path to the given sink."""
    hit = _can_reach(o, label)
    if o.source not in hit:
        return None
    alpha: Dict[str, int] = {}
    nid = o.source
    while nid in o.nodes:
        node = o.nodes[nid]
        bit = 0 if node.zero in hit else 1
        alpha[node.feature] = bit
        nid = node.zero if bit == 0 else node.one
    return alpha


def _greedy_shrink(valid, items: List[str]) -> List[str]:
    kept = list(items)
    for f in sorted(items):
        trial = [g for g in kept if g != f]
        if valid(trial):
            kept = trial
    return kept


def obdd_subset_min(o: Obdd, q: ExplanationQuery) -> Optional[Witness]:
    """Greedy subset-minimal witness; deletions tried in ascending name order."""
    o = complete_obdd(o)
    if q.kind == "lCXp":
        try:
            return obdd_min_lcxp(o, q.target)
        except Homogeneous:
            return None
    if q.kind == "lAXp":
        e = q.target
        c = classify(o, e)

        def valid(names):
            return reachable_sinks(o, {f: e[f] for f in names}) == {c}

        return Witness.of_features(_greedy_shrink(valid, sorted(o.features())))
    # global kinds: seed with a full path into the right sink, then shrink
    seed = _least_path(o, q.target if q.kind == "gAXp" else 1 - q.target)
    if seed is None:
        return None
    if q.kind == "gAXp":
        def valid(names):
            return reachable_sinks(o, {f: seed[f] for f in names}) == {q.target}
    else:
        def valid(names):
            return q.target not in reachable_sinks(o, {f: seed[f] for f in names})
    kept = _greedy_shrink(valid, sorted(seed))
    return Witness.of_assignment({f: seed[f] for f in kept})


def obdd_min_lcxp(o: Obdd, e: Example) -> Witness:
    """Cheapest flip set driving the walk into the opposite sink.

    Arcs agreeing with the example cost nothing, disagreeing arcs cost
    one flip; a level-by-level relaxation finds the minimum, breaking
    ties toward the lexicographically least sorted flip set.
    """
    o = complete_obdd(o)
    for f in sorted(o.features()):
        if f not in e:
            raise UndefinedFeature(f"example does not assign feature {f!r}")
    c = classify(o, e)
    target = o.t0 if c == 1 else o.t1
    best: Dict[str, Tuple[int, Tuple[str, ...]]] = {o.source: (0, ())}
    for nid in sorted(o.nodes, key=o.level):
        if nid not in best:
            continue
        cost, flips = best[nid]
        node = o.nodes[nid]
        for bit, child in ((0, node.zero), (1, node.one)):
            if bit == e[node.feature]:
                key = (cost, flips)
            else:
                key = (cost + 1, tuple(sorted(flips + (node.feature,))))
            if child not in best or key < best[child]:
                best[child] = key
    if target not in best:
        raise Homogeneous(f"every input is classified {c}")
    return Witness.of_features(best[target][1])


def obdd_xp_search(o: Obdd, q: ExplanationQuery) -> Optional[Witness]:
    """Exhaustive size-bounded search matching the oracle's tie-break."""
    if q.k is None:
        raise ModelError("xp search needs a cardinality query with budget k")
    o = complete_obdd(o)
    names = sorted(o.features())
    limit = min(q.k, len(names))
    if q.kind == "lCXp":
        try:
            w = obdd_min_lcxp(o, q.target)
        except Homogeneous:
            return None
        return w if w.size <= limit else None
    for size in range(0, limit + 1):
        for combo in itertools.combinations(names, size):
            if q.kind == "lAXp":
                w = Witness.of_features(combo)
                if obdd_check(o, q, w):
                    return w
            else:
                for values in itertools.product((0, 1), repeat=size):
                    w = Witness.of_assignment(dict(zip(combo, values)))
                    if obdd_check(o, q, w):
                        return w
    return None


def obdd_ensemble_product(ens: Ensemble, node_cap: int = DEFAULT_NODE_CAP) -> Obdd:
    """Single complete diagram computing the ensemble vote.

    Elements are first rebuilt over the ensemble's shared order (their
    own orders must be subsequences of it) and completed, so the walk
    can advance all members one level at a time.  A product state is a
    tuple of member nodes; all-sink states collapse into the two sinks
    by majority vote.  Size is bounded by the product of member sizes.
    """
    if any(el.kind != "obdd" for el in ens.elements):
        raise ModelError("expected an ensemble of diagrams")
    if ens.shared_order is not None:
        order = ens.shared_order
    else:
        orders = {el.order for el in ens.elements}
        if len(orders) > 1:
            raise NotOrdered("elements disagree on the variable order")
        order = orders.pop()
    elems = [
        complete_obdd(Obdd(dict(el.nodes), el.source, el.t0, el.t1, order))
        for el in ens.elements
    ]
    majority = len(elems) // 2 + 1
    depth = len(order)

    def resolve(state: Tuple[str, ...]) -> Optional[str]:
        votes = 0
        for el, nid in zip(elems, state):
            label = el.sink_label(nid)
            if label is None:
                return None
            votes += label
        return "t1" if votes >= majority else "t0"

    start = tuple(el.source for el in elems)
    source = resolve(start)
    ids: Dict[Tuple[str, ...], str] = {}
    nodes: Dict[str, ObddNode] = {}
    if source is None:
        ids[start] = source = "m0"
        queue = deque([start])
        while queue:
            state = queue.popleft()
            level = elems[0].level(state[0])
            feature = order[level]
            children = []
            for bit in (0, 1):
                nxt = tuple(
                    el.nodes[nid].one if bit else el.nodes[nid].zero
                    for el, nid in zip(elems, state)
                )
                sink = resolve(nxt)
                if sink is not None:
                    children.append(sink)
                    continue
                if nxt not in ids:
                    if len(ids) >= node_cap:
                        raise BudgetExceeded(f"product would exceed {node_cap} nodes")
                    ids[nxt] = f"m{len(ids)}"
                    queue.append(nxt)
                children.append(ids[nxt])
            nodes[ids[state]] = ObddNode(feature, children[0], children[1])
    return Obdd(nodes, source, "t0", "t1", order)


def dt_to_obdd(t: DecisionTree) -> Obdd:
    """Rebuild an ordered tree as a complete diagram over a consistent order.

    The order is the topological sort of the parent-before-child feature
    constraints, smallest name first among the unconstrained; a cycle
    means no single order fits every branch and raises NotOrdered.
    """
    after: Dict[str, set] = {f: set() for f in t.features()}
    indegree = {f: 0 for f in after}
    for node in t.nodes.values():
        if not isinstance(node, DtInner):
            continue
        for child_id in (node.zero, node.one):
            child = t.nodes[child_id]
            if isinstance(child, DtInner) and child.feature not in after[node.feature]:
                after[node.feature].add(child.feature)
                indegree[child.feature] += 1
    order: List[str] = []
    ready = sorted(f for f, d in indegree.items() if d == 0)
    while ready:
        f = ready.pop(0)
        order.append(f)
        for g in sorted(after[f]):
            indegree[g] -= 1
            if indegree[g] == 0:
                ready.append(g)
        ready.sort()
    if len(order) < len(after):
        raise NotOrdered("branches test features in conflicting orders")
    t0, t1 = "t0", "t1"
    while t0 in t.nodes:
        t0 += "~"
    while t1 in t.nodes:
        t1 += "~"

    def slot(nid: str) -> str:
        node = t.nodes[nid]
        if isinstance(node, DtLeaf):
            return t1 if node.label == 1 else t0
        return nid

    nodes = {
        nid: ObddNode(node.feature, slot(node.zero), slot(node.one))
        for nid, node in t.nodes.items()
        if isinstance(node, DtInner)
    }
    return complete_obdd(Obdd(nodes, slot(t.root), t0, t1, tuple(order)))
