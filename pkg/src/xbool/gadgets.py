"""Deterministic generators for structurally hard explanation instances.

Each generator encodes a combinatorial problem (multicolored clique,
hitting set, DNF tautology) into a model whose explanation queries
answer the original question.  Constructions are seedless: identical
inputs give identical models, so generated files are golden-testable.
"""

from __future__ import annotations

import itertools
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Set, Tuple

from .errors import BudgetExceeded, ModelError, SharedFeature
from .models import (
    DecisionList,
    DecisionSet,
    DecisionTree,
    DtInner,
    DtLeaf,
    Ensemble,
    Example,
    Obdd,
    ObddNode,
    classify,
    complete_obdd,
)
from .obdd import obdd_ensemble_product


class MccInstance:
    """Vertex-colored graph for multicolored-clique reductions.

    Vertices come with their part index; edges must join different
    parts (the coloring is proper).  Input order is preserved and
    drives every generator's naming and iteration order.
    """

    def __init__(
        self,
        vertices: Sequence[Tuple[str, int]],
        edges: Sequence[Tuple[str, str]] = (),
    ):
        names = []
        part: Dict[str, int] = {}
        for name, idx in vertices:
            name = str(name)
            if name in part:
                raise ModelError(f"duplicate vertex {name!r}")
            if not isinstance(idx, int) or isinstance(idx, bool) or idx < 0:
                raise ModelError(f"part of {name!r} must be a non-negative integer")
            names.append(name)
            part[name] = idx
        if not names:
            raise ModelError("graph needs at least one vertex")
        pos = {v: i for i, v in enumerate(names)}
        seen: Set[Tuple[str, str]] = set()
        ordered = []
        for u, v in edges:
            if u not in part or v not in part:
                raise ModelError(f"edge ({u!r}, {v!r}) uses an unknown vertex")
            if u == v:
                raise ModelError(f"self-loop at {u!r}")
            if part[u] == part[v]:
                raise ModelError(f"edge ({u!r}, {v!r}) stays inside one part")
            pair = (u, v) if pos[u] < pos[v] else (v, u)
            if pair not in seen:
                seen.add(pair)
                ordered.append(pair)
        self.vertices: Tuple[str, ...] = tuple(names)
        self.part = part
        self.k = max(part.values()) + 1
        self.edges: Tuple[Tuple[str, str], ...] = tuple(ordered)
        self._edge_set = frozenset(ordered)
        self._pos = pos

    def has_edge(self, u: str, v: str) -> bool:
        pair = (u, v) if self._pos[u] < self._pos[v] else (v, u)
        return pair in self._edge_set

    def part_members(self, i: int) -> Tuple[str, ...]:
        return tuple(v for v in self.vertices if self.part[v] == i)

    def neighbors(self, v: str) -> Tuple[str, ...]:
        return tuple(u for u in self.vertices if u != v and self.has_edge(u, v))


def mcc_to_json(g: MccInstance) -> Dict:
    return {
        "vertices": [[v, g.part[v]] for v in g.vertices],
        "edges": [[u, v] for u, v in g.edges],
    }


def mcc_from_json(data: Mapping) -> MccInstance:
    return MccInstance(
        [(v, p) for v, p in data["vertices"]],
        [(u, v) for u, v in data.get("edges", ())],
    )


def _check_k(g: MccInstance, k: Optional[int], at_least: int = 1) -> int:
    if k is None:
        k = g.k
    if k != g.k:
        raise ModelError(f"graph has {g.k} parts, not {k}")
    if k < at_least:
        raise ModelError(f"need at least {at_least} parts")
    return k


def vertex_feature(v: str) -> str:
    return f"f.{v}"


# ---------------------------------------------------------------------------
# Decision trees accepting an explicit example set

_LEAF, _NODE = "L", "N"


def _shape_from_examples(examples: Sequence[Example], order: Sequence[str]):
    """Tree shape accepting exactly the given examples, tagging the
    accepting leaf of example i with tag i.  Every path tests a prefix
    of the order, so the result is ordered and repeat-free."""
    order = tuple(order)
    shape = (_LEAF, 0, None)
    for tag, e in enumerate(examples):
        path = []
        cur = shape
        while cur[0] == _NODE:
            bit = e[cur[1]]
            if bit not in (0, 1):
                raise ModelError(f"example value for {cur[1]!r} must be 0 or 1")
            path.append((cur, bit))
            cur = cur[3] if bit else cur[2]
        if cur[1] == 1:
            continue
        new = (_LEAF, 1, tag)
        for f in reversed(order[len(path):]):
            bit = e[f]
            if bit not in (0, 1):
                raise ModelError(f"example value for {f!r} must be 0 or 1")
            off = (_LEAF, 0, None)
            new = (_NODE, f, off, new) if bit else (_NODE, f, new, off)
        for node, bit in reversed(path):
            new = (_NODE, node[1], node[2], new) if bit else (_NODE, node[1], new, node[3])
        shape = new
    return shape


def _replace_tag(shape, tag: int, sub):
    if shape[0] == _LEAF:
        return sub if shape[2] == tag else shape
    return (
        _NODE,
        shape[1],
        _replace_tag(shape[2], tag, sub),
        _replace_tag(shape[3], tag, sub),
    )


def _shape_leaves(shape) -> int:
    if shape[0] == _LEAF:
        return 1
    return _shape_leaves(shape[2]) + _shape_leaves(shape[3])


def _shape_to_dt(shape) -> DecisionTree:
    counter = itertools.count()
    nodes: Dict[str, object] = {}
    inner: List[Tuple[str, str, Dict[str, str]]] = []
    root_slot: Dict[str, str] = {}
    work = [(shape, root_slot, "root")]
    while work:
        s, slot, key = work.pop()
        nid = f"n{next(counter)}"
        slot[key] = nid
        if s[0] == _LEAF:
            nodes[nid] = DtLeaf(s[1])
        else:
            fields: Dict[str, str] = {}
            inner.append((nid, s[1], fields))
            work.append((s[3], fields, "one"))
            work.append((s[2], fields, "zero"))
    for nid, feature, fields in inner:
        nodes[nid] = DtInner(feature, fields["zero"], fields["one"])
    return DecisionTree(nodes, root_slot["root"])


def dt_from_examples(examples: Sequence[Example], order: Sequence[str]) -> DecisionTree:
    """Ordered tree classifying exactly the listed examples positively.

    Examples must be total over the order.  Leaf count stays within
    2 * len(examples) * len(order) + 1.
    """
    for e in examples:
        for f in order:
            if f not in e:
                raise ModelError(f"example does not assign feature {f!r}")
    return _shape_to_dt(_shape_from_examples(examples, order))


# ---------------------------------------------------------------------------
# Hitting set -> smallest local abductive set on a tree


def gen_hitting_set_laxp(
    universe: Sequence, sets: Sequence[Sequence], k: Optional[int] = None
) -> Tuple[DecisionTree, Dict[str, int], int]:
    """Tree accepting one example per set; hitting sets of the family
    and abductive sets for the all-zero example coincide size for size."""
    ground = [str(u) for u in universe]
    if len(set(ground)) != len(ground):
        raise ModelError("universe has duplicates")
    if not sets:
        raise ModelError("need at least one set")
    order = tuple(f"f{u}" for u in ground)
    examples = []
    for s in sets:
        members = {str(u) for u in s}
        if not members:
            raise ModelError("sets must be non-empty")
        if not members <= set(ground):
            raise ModelError("set element outside the universe")
        examples.append({f"f{u}": int(u in members) for u in ground})
    tree = dt_from_examples(examples, order)
    e0 = {f: 0 for f in order}
    if k is None:
        k = len(ground)
    return tree, e0, k


# ---------------------------------------------------------------------------
# Multicolored clique -> small global abductive set on a tree


def gen_mcc_gaxp_dt(
    g: MccInstance,
    k: Optional[int] = None,
    max_k: int = 10,
    node_cap: int = 10**6,
) -> Tuple[DecisionTree, int, int]:
    """Tree whose class-0 global abductive sets of size <= k mark cliques.

    The graph part sits in trees T[i][j]: accept when part i is all
    zero, or when exactly one of its vertices v is picked and none of
    v's part-j neighbours is.  A clique assignment cuts every accepting
    path.  Fresh auxiliary features fan the T[i][j] out 2^k times so no
    small abductive set can avoid them all without spending its budget
    on the graph features.
    """
    k = _check_k(g, k, at_least=2)
    if k > max_k:
        raise BudgetExceeded(f"k={k} exceeds the generator cap of {max_k}")
    aux = itertools.count()

    def fresh() -> str:
        return f"aux{next(aux)}"

    pair_shapes = []
    for i in range(k):
        members = g.part_members(i)
        order_i = tuple(vertex_feature(v) for v in members)
        zero_i = {f: 0 for f in order_i}
        examples = [dict(zero_i)]
        for v in members:
            e = dict(zero_i)
            e[vertex_feature(v)] = 1
            examples.append(e)
        for j in range(k):
            if j == i:
                continue
            shape = _shape_from_examples(examples, order_i)
            for tag, v in enumerate(members, start=1):
                hood = tuple(
                    vertex_feature(u) for u in g.neighbors(v) if g.part[u] == j
                )
                sub = _shape_from_examples([{f: 0 for f in hood}], hood)
                shape = _replace_tag(shape, tag, sub)
            pair_shapes.append(shape)

    slots = len(pair_shapes)
    depth = max(1, (slots - 1).bit_length()) if slots else 1
    per_fan = sum(_shape_leaves(s) for s in pair_shapes) + (2**depth - slots)
    total = (2**k) * per_fan
    if total > node_cap:
        raise BudgetExceeded(f"{total} leaves exceed the cap of {node_cap}")

    def fan(height: int, leaf_source) -> tuple:
        if height == 0:
            return leaf_source()
        f = fresh()
        zero = fan(height - 1, leaf_source)
        one = fan(height - 1, leaf_source)
        return (_NODE, f, zero, one)

    def make_branch() -> tuple:
        remaining = list(pair_shapes)

        def leaf_source():
            if remaining:
                return remaining.pop(0)
            return (_LEAF, 0, None)

        return fan(depth, leaf_source)

    pool = [make_branch() for _ in range(2**k)]

    def upper_leaf():
        return pool.pop(0)

    tree = _shape_to_dt(fan(k, upper_leaf))
    return tree, 0, k


# ---------------------------------------------------------------------------
# Multicolored clique -> homogeneity of a tree ensemble


def gen_mcc_dt_ensemble(g: MccInstance, k: Optional[int] = None) -> Ensemble:
    """Ensemble voting 1 exactly on multicolored cliques.

    One tree per part accepts the unit examples of that part, one tree
    per part pair accepts the edge examples across it, and constant-0
    trees pad the vote so a positive needs every non-constant tree.
    Element count is 2 * (k + C(k, 2)) - 1.
    """
    k = _check_k(g, k, at_least=2)
    elements = []
    for i in range(k):
        members = g.part_members(i)
        order = tuple(vertex_feature(v) for v in members)
        examples = []
        for v in members:
            e = {f: 0 for f in order}
            e[vertex_feature(v)] = 1
            examples.append(e)
        elements.append(dt_from_examples(examples, order))
    for i, j in itertools.combinations(range(k), 2):
        left, right = g.part_members(i), g.part_members(j)
        order = tuple(vertex_feature(v) for v in left + right)
        examples = []
        for v in left:
            for u in right:
                if not g.has_edge(v, u):
                    continue
                e = {f: 0 for f in order}
                e[vertex_feature(v)] = 1
                e[vertex_feature(u)] = 1
                examples.append(e)
        elements.append(dt_from_examples(examples, order))
    pad = k + k * (k - 1) // 2 - 1
    for _ in range(pad):
        elements.append(DecisionTree({"z": DtLeaf(0)}, "z"))
    return Ensemble(elements)


# ---------------------------------------------------------------------------
# Multicolored clique -> homogeneity of constant-size-element ensembles


def _hom_elements_dt(f1f2_pairs, singles, zeros, ones):
    out = []
    for f1, f2 in f1f2_pairs:
        out.append(
            DecisionTree(
                {
                    "a": DtInner(f1, "p", "b"),
                    "b": DtInner(f2, "q", "r"),
                    "p": DtLeaf(1),
                    "q": DtLeaf(1),
                    "r": DtLeaf(0),
                },
                "a",
            )
        )
    for f in singles:
        out.append(
            DecisionTree(
                {"a": DtInner(f, "p", "q"), "p": DtLeaf(0), "q": DtLeaf(1)}, "a"
            )
        )
    out.extend(DecisionTree({"z": DtLeaf(0)}, "z") for _ in range(zeros))
    out.extend(DecisionTree({"o": DtLeaf(1)}, "o") for _ in range(ones))
    return Ensemble(out)


def _hom_elements_ds(f1f2_pairs, singles, zeros, ones):
    out = []
    for f1, f2 in f1f2_pairs:
        out.append(DecisionSet([[(f1, 1), (f2, 1)]], 1))
    for f in singles:
        out.append(DecisionSet([[(f, 1)]], 0))
    out.extend(DecisionSet([], 0) for _ in range(zeros))
    out.extend(DecisionSet([], 1) for _ in range(ones))
    return Ensemble(out)


def _hom_elements_obdd(f1f2_pairs, singles, zeros, ones, shared_order):
    out = []
    for f1, f2 in f1f2_pairs:
        out.append(
            Obdd(
                {
                    "a": ObddNode(f1, "t1", "b"),
                    "b": ObddNode(f2, "t1", "t0"),
                },
                "a",
                "t0",
                "t1",
                (f1, f2),
            )
        )
    for f in singles:
        out.append(Obdd({"a": ObddNode(f, "t0", "t1")}, "a", "t0", "t1", (f,)))
    out.extend(Obdd({}, "t0", "t0", "t1", ()) for _ in range(zeros))
    out.extend(Obdd({}, "t1", "t0", "t1", ()) for _ in range(ones))
    return Ensemble(out, shared_order=shared_order)


def gen_maj_hom(g: MccInstance, k: Optional[int] = None, family: str = "dt") -> Ensemble:
    """Constant-size-element ensemble that is non-constant iff the graph
    has a multicolored clique, discoverable within k flips of all-zero.

    Per non-edge a not-both gadget, per vertex a positive-iff-set
    gadget, and enough always-negative elements to put the vote
    threshold at (#non-edges) + k.  When that padding count would go
    negative, matched always-positive elements restore the balance
    without moving the decision boundary.
    """
    k = _check_k(g, k)
    names = g.vertices
    n = len(names)
    pairs = []
    for a, b in itertools.combinations(names, 2):
        if not g.has_edge(a, b):
            pairs.append((vertex_feature(a), vertex_feature(b)))
    singles = [vertex_feature(v) for v in names]
    base = len(pairs) - n + 2 * k - 1
    zeros, ones = max(0, base), max(0, -base)
    if family == "dt":
        return _hom_elements_dt(pairs, singles, zeros, ones)
    if family == "ds":
        return _hom_elements_ds(pairs, singles, zeros, ones)
    if family == "obdd":
        return _hom_elements_obdd(pairs, singles, zeros, ones, tuple(singles))
    raise ModelError(f"unknown family {family!r}")


# ---------------------------------------------------------------------------
# DNF tautology and clique encodings on decision sets


def gen_taut_ds(terms: Sequence[Sequence[Tuple[str, int]]]) -> DecisionSet:
    """Set with the DNF's terms and default 0: it computes the formula,
    so the formula is a tautology iff the model is constant.  When the
    all-zero assignment falsifies the formula the instance is already a
    trivial non-tautology; the model still gets built."""
    return DecisionSet(terms, 0)


def gen_mcc_ds(g: MccInstance, k: Optional[int] = None) -> DecisionSet:
    """Positive exactly on multicolored cliques: a blocking term per
    non-adjacent vertex pair and an all-zero term per part."""
    k = _check_k(g, k)
    terms = []
    for a, b in itertools.combinations(g.vertices, 2):
        if not g.has_edge(a, b):
            terms.append([(vertex_feature(a), 1), (vertex_feature(b), 1)])
    for i in range(k):
        terms.append([(vertex_feature(v), 0) for v in g.part_members(i)])
    return DecisionSet(terms, 1)


def gen_mcc_ds_ensemble(g: MccInstance, k: Optional[int] = None) -> Ensemble:
    """2k+1 sets with terms of at most two literals; the vote is
    positive exactly on multicolored cliques."""
    k = _check_k(g, k)
    cross = []
    for a, b in itertools.combinations(g.vertices, 2):
        if not g.has_edge(a, b):
            cross.append([(vertex_feature(a), 1), (vertex_feature(b), 1)])
    elements = [DecisionSet(cross, 1)]
    for i in range(k):
        elements.append(
            DecisionSet([[(vertex_feature(v), 1)] for v in g.part_members(i)], 0)
        )
    elements.extend(DecisionSet([], 0) for _ in range(k))
    return Ensemble(elements)


# ---------------------------------------------------------------------------
# Counter-style OBDD primitives

PRIMITIVE_KINDS = ("exactly_one", "exists", "iff_exists", "all_equal")


def _track_obdd(feats: Sequence[str], start: int, step, accept, flip_sinks=False) -> Obdd:
    """Leveled diagram over feats: walk tracks via step(pos, track, bit),
    accept at the end iff the final track is in accept.  Only reachable
    track states are materialized, which keeps widths tight."""
    feats = tuple(feats)
    n = len(feats)
    t_yes, t_no = ("t0", "t1") if flip_sinks else ("t1", "t0")
    if n == 0:
        src = t_yes if start in accept else t_no
        return Obdd({}, src, "t0", "t1", ())
    nodes: Dict[str, ObddNode] = {}
    level: Set[int] = {start}
    for pos in range(n):
        nxt: Set[int] = set()
        for track in sorted(level):
            kids = []
            for bit in (0, 1):
                after = step(pos, track, bit)
                if pos + 1 == n:
                    kids.append(t_yes if after in accept else t_no)
                else:
                    nxt.add(after)
                    kids.append(f"g{pos + 1}.{after}")
            nodes[f"g{pos}.{track}"] = ObddNode(feats[pos], kids[0], kids[1])
        level = nxt
    return Obdd(nodes, f"g0.{start}", "t0", "t1", feats)


def obdd_primitive(
    kind: str, features: Sequence[str], f: Optional[str] = None
) -> Obdd:
    """Width-3 counting diagrams used by the clique encodings.

    exactly_one / exists count set features with saturation at two;
    all_equal tracks all-zero vs all-one vs mismatch; iff_exists reads
    the extra feature f last and accepts iff it matches the exists bit.
    """
    feats = tuple(features)
    if len(set(feats)) != len(feats):
        raise ModelError("duplicate features")
    if kind == "iff_exists":
        if f is None:
            raise ModelError("iff_exists needs the extra feature")
        if f in feats:
            raise SharedFeature(f"{f!r} cannot appear in the counted set")
        n = len(feats)

        def step(pos, track, bit):
            if pos < n:
                after = min(track + bit, 2)
                return min(after, 1) if pos == n - 1 else after
            return 1 if bit == track else 0

        return _track_obdd(feats + (f,), 0, step, {1})
    if f is not None:
        raise ModelError(f"{kind} takes no extra feature")
    if not feats:
        raise ModelError(f"{kind} needs at least one feature")
    if kind == "exactly_one":
        return _track_obdd(feats, 0, lambda p, t, b: min(t + b, 2), {1})
    if kind == "exists":
        return _track_obdd(feats, 0, lambda p, t, b: min(t + b, 2), {1, 2})
    if kind == "all_equal":

        def step(pos, track, bit):
            if pos == 0:
                return bit
            return track if track != 2 and bit == track else 2

        return _track_obdd(feats, 0, step, {0, 1})
    raise ModelError(f"unknown primitive {kind!r}")


def obdd_conjoin(pieces: Sequence[Obdd]) -> Obdd:
    """Serial conjunction of feature-disjoint complete diagrams.

    Accepting one block continues into the next; rejecting drops onto a
    bypass track that rides every remaining level into the 0-sink, so
    completeness is preserved and width grows by at most one.
    """
    pieces = [complete_obdd(p) for p in pieces]
    seen: Set[str] = set()
    full_order: List[str] = []
    for p in pieces:
        for feat in p.order:
            if feat in seen:
                raise SharedFeature(f"feature {feat!r} appears in two pieces")
            seen.add(feat)
            full_order.append(feat)
    order = tuple(full_order)
    constant = [p for p in pieces if not p.order]
    pieces = [p for p in pieces if p.order]
    if any(p.sink_label(p.source) == 0 for p in constant):
        return complete_obdd(Obdd({}, "t0", "t0", "t1", order))
    if not pieces:
        return complete_obdd(Obdd({}, "t1", "t0", "t1", order))
    offsets = []
    at = 0
    for p in pieces:
        offsets.append(at)
        at += len(p.order)
    total = at
    nodes: Dict[str, ObddNode] = {}
    first_bypass = len(pieces[0].order)
    for lv in range(first_bypass, total):
        follow = f"byp@{lv + 1}" if lv + 1 < total else "t0"
        nodes[f"byp@{lv}"] = ObddNode(order[lv], follow, follow)

    def landing(idx: int, sink_label: int) -> str:
        if sink_label == 1:
            if idx + 1 == len(pieces):
                return "t1"
            return f"b{idx + 1}.{pieces[idx + 1].source}"
        if idx + 1 == len(pieces):
            return "t0"
        return f"byp@{offsets[idx + 1]}"

    for idx, p in enumerate(pieces):
        for nid, node in p.nodes.items():
            kids = []
            for child in (node.zero, node.one):
                label = p.sink_label(child)
                if label is None:
                    kids.append(f"b{idx}.{child}")
                else:
                    kids.append(landing(idx, label))
            nodes[f"b{idx}.{nid}"] = ObddNode(node.feature, kids[0], kids[1])
    source = f"b0.{pieces[0].source}"
    keep = set()
    stack = [source]
    while stack:
        nid = stack.pop()
        if nid in ("t0", "t1") or nid in keep:
            continue
        keep.add(nid)
        stack.append(nodes[nid].zero)
        stack.append(nodes[nid].one)
    return Obdd({k: v for k, v in nodes.items() if k in keep}, source, "t0", "t1", order)


# ---------------------------------------------------------------------------
# Multicolored clique -> homogeneity of three majority-voted OBDDs


def gen_mcc_obdd_maj(g: MccInstance, k: Optional[int] = None) -> Ensemble:
    """Three diagrams over different orders whose majority is positive
    exactly on clique selections.

    The first checks that every feature group (a vertex with its k+1
    copies, an edge with its two directed copies) is set uniformly; the
    second, grouped the other way, checks one vertex per part, one edge
    per part pair, and that a vertex copy is set iff a selected edge
    leaves it toward that part; the third always votes no.  Positive
    examples carry exactly 3*C(k,2) + k*(k+2) ones.  Part pairs without
    edges (or empty parts) make the verifier unsatisfiable, so it
    degenerates to a constant no vote.
    """
    k = _check_k(g, k, at_least=2)
    fv = lambda a: f"v.{a}"
    fw = lambda a: f"w.{a}"
    fc = lambda a, j: f"c.{a}.{j}"
    fp = lambda a, b: f"p.{a}.{b}"
    fq = lambda a, b: f"q.{a}.{b}"
    uniform = []
    for a in g.vertices:
        group = (fv(a), fw(a)) + tuple(fc(a, j) for j in range(k))
        uniform.append(obdd_primitive("all_equal", group))
    for a, b in g.edges:
        uniform.append(obdd_primitive("all_equal", (fp(a, b), fq(a, b), fq(b, a))))
    o1 = obdd_conjoin(uniform)
    verify = []
    satisfiable = True
    for i in range(k):
        members = g.part_members(i)
        if not members:
            satisfiable = False
            break
        verify.append(obdd_primitive("exactly_one", tuple(fw(a) for a in members)))
    if satisfiable:
        for i, j in itertools.combinations(range(k), 2):
            cross = tuple(
                fp(a, b)
                for a, b in g.edges
                if {g.part[a], g.part[b]} == {i, j}
            )
            if not cross:
                satisfiable = False
                break
            verify.append(obdd_primitive("exactly_one", cross))
    if satisfiable:
        for a in g.vertices:
            i = g.part[a]
            for j in range(k):
                if j == i:
                    continue
                hood = tuple(
                    fq(a, b) for b in g.neighbors(a) if g.part[b] == j
                )
                verify.append(obdd_primitive("iff_exists", hood, fc(a, j)))
        o2 = obdd_conjoin(verify)
    else:
        o2 = Obdd({}, "t0", "t0", "t1", ())
    o3 = Obdd({}, "t0", "t0", "t1", ())
    return Ensemble([o1, o2, o3])


# ---------------------------------------------------------------------------
# Agreement counter and the local-to-global lift


def obdd_agreement_counter(
    e: Example, k: int, order: Sequence[str], out_class: int = 1
) -> Obdd:
    """Classifies e' as out_class iff e and e' agree on at least k of
    the order's features; width stays within k+1."""
    order = tuple(order)
    if not 0 <= k <= len(order):
        raise ModelError(f"threshold {k} out of range for {len(order)} features")
    for f in order:
        if f not in e:
            raise ModelError(f"example does not assign feature {f!r}")
    bits = {f: e[f] for f in order}

    def step(pos, track, bit):
        return min(track + (1 if bit == bits[order[pos]] else 0), k)

    return _track_obdd(order, 0, step, {k}, flip_sinks=(out_class == 0))


def gen_laxp_to_gaxp(
    o: Obdd, e: Example, k: int, node_cap: int = 10**6
) -> Tuple[Obdd, int, int]:
    """Product diagram turning a size-k local abductive query into the
    matching global one: majority of the original diagram, an
    agreement counter around e, and a constant drag vote for the other
    class.  Budgets above the feature count clamp to it, which keeps
    the equivalence tight."""
    if k < 0:
        raise ModelError("budget must be non-negative")
    o = complete_obdd(o)
    c = classify(o, e)
    threshold = min(k, len(o.order))
    counter = obdd_agreement_counter(e, threshold, o.order, out_class=c)
    drag = Obdd({}, "t1" if c == 0 else "t0", "t0", "t1", ())
    ens = Ensemble([o, counter, drag], shared_order=o.order)
    return obdd_ensemble_product(ens, node_cap), c, k
