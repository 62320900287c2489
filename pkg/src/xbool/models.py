"""Transparent binary classifiers over named 0/1 features.

Five model families share one example algebra: decision trees, decision
sets, decision lists, ordered binary decision diagrams, and odd-size
majority ensembles of a single family.  Values are validated when
constructed and treated as immutable afterwards; every operation here is
pure, so models can be shared freely across threads.

Classification requires the example to cover the model's feature
universe.  Extra features are ignored: ensemble elements typically read
only a slice of the shared universe and still get handed the full
example.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Sequence, Tuple, Union

from .errors import (
    ContradictoryTerm,
    EvenEnsemble,
    ModelError,
    NotOrdered,
    UndefinedFeature,
)

Example = Mapping[str, int]
PartialExample = Mapping[str, int]
Literal = Tuple[str, int]
Term = FrozenSet[Literal]


def _bit(value, what: str) -> int:
    if value not in (0, 1):
        raise ModelError(f"{what} must be 0 or 1, got {value!r}")
    return int(value)


def _lookup(e: Example, feature: str) -> int:
    try:
        value = e[feature]
    except KeyError:
        raise UndefinedFeature(f"example does not assign feature {feature!r}") from None
    return _bit(value, f"value of feature {feature!r}")


def make_term(literals: Iterable[Literal]) -> Term:
    term = frozenset((str(f), _bit(z, f"literal on {f!r}")) for f, z in literals)
    by_feature: Dict[str, int] = {}
    for f, z in term:
        if by_feature.setdefault(f, z) != z:
            raise ContradictoryTerm(f"term assigns feature {f!r} both ways")
    return term


def term_applies(term: Term, e: Example) -> bool:
    return all(_lookup(e, f) == z for f, z in term)


# ---------------------------------------------------------------------------
# Decision trees


@dataclass(frozen=True)
class DtLeaf:
    label: int


@dataclass(frozen=True)
class DtInner:
    feature: str
    zero: str
    one: str


DtNode = Union[DtLeaf, DtInner]


class DecisionTree:
    """Rooted binary tree; inner nodes test a feature, leaves carry a class."""

    kind = "dt"

    def __init__(self, nodes: Mapping[str, DtNode], root: str):
        nodes = dict(nodes)
        if root not in nodes:
            raise ModelError(f"root {root!r} is not a node")
        parent: Dict[str, str] = {}
        for nid, node in nodes.items():
            if isinstance(node, DtLeaf):
                _bit(node.label, "leaf label")
            elif isinstance(node, DtInner):
                for child in (node.zero, node.one):
                    if child not in nodes:
                        raise ModelError(f"child {child!r} of {nid!r} is not a node")
                    if child in parent:
                        raise ModelError(f"node {child!r} has two parents")
                    parent[child] = nid
            else:
                raise ModelError(f"node {nid!r} is neither leaf nor inner")
        if root in parent:
            raise ModelError("root must not have a parent")
        # unique parents rule out sharing; a full walk rules out stray components
        seen = 0
        stack = [root]
        while stack:
            node = nodes[stack.pop()]
            seen += 1
            if isinstance(node, DtInner):
                stack.append(node.zero)
                stack.append(node.one)
        if seen != len(nodes):
            raise ModelError("tree contains nodes unreachable from the root")
        self.nodes: Dict[str, DtNode] = nodes
        self.root = root

    def features(self) -> FrozenSet[str]:
        return frozenset(
            n.feature for n in self.nodes.values() if isinstance(n, DtInner)
        )

    def leaves(self) -> Tuple[Tuple[str, int], ...]:
        return tuple(
            (nid, n.label) for nid, n in self.nodes.items() if isinstance(n, DtLeaf)
        )


def _classify_dt(t: DecisionTree, e: Example) -> int:
    node = t.nodes[t.root]
    while isinstance(node, DtInner):
        node = t.nodes[node.one if _lookup(e, node.feature) else node.zero]
    return node.label


def _dt_has_repeats(t: DecisionTree) -> bool:
    stack = [(t.root, frozenset())]
    while stack:
        nid, seen = stack.pop()
        node = t.nodes[nid]
        if isinstance(node, DtInner):
            if node.feature in seen:
                return True
            seen = seen | {node.feature}
            stack.append((node.zero, seen))
            stack.append((node.one, seen))
    return False


def _project_dt(t: DecisionTree, fixed: Mapping[str, int], accumulate: bool) -> DecisionTree:
    """Rebuild t, short-circuiting nodes whose feature is already decided.

    With accumulate=True every branch decision joins the context, which
    removes repeated tests; with accumulate=False only `fixed` is applied.
    """
    counter = itertools.count()
    leaves: Dict[str, DtLeaf] = {}
    inner: Dict[str, Tuple[str, Dict[str, str]]] = {}
    root_slot: Dict[str, str] = {}
    work = [(t.root, dict(fixed), root_slot, "root")]
    while work:
        orig, ctx, slot, key = work.pop()
        node = t.nodes[orig]
        while isinstance(node, DtInner) and node.feature in ctx:
            node = t.nodes[node.one if ctx[node.feature] else node.zero]
        nid = f"n{next(counter)}"
        slot[key] = nid
        if isinstance(node, DtLeaf):
            leaves[nid] = node
        else:
            fields: Dict[str, str] = {}
            inner[nid] = (node.feature, fields)
            ctx1 = dict(ctx)
            ctx0 = ctx
            if accumulate:
                ctx0 = dict(ctx)
                ctx0[node.feature] = 0
                ctx1[node.feature] = 1
            work.append((node.one, ctx1, fields, "one"))
            work.append((node.zero, ctx0, fields, "zero"))
    nodes: Dict[str, DtNode] = dict(leaves)
    for nid, (feature, fields) in inner.items():
        nodes[nid] = DtInner(feature, fields["zero"], fields["one"])
    return DecisionTree(nodes, root_slot["root"])


def simplify_dt(t: DecisionTree) -> DecisionTree:
    """Drop re-tests of features already decided on the path; same classifier."""
    if not _dt_has_repeats(t):
        return t
    return _project_dt(t, {}, accumulate=True)


def restrict_dt(t: DecisionTree, tau: PartialExample) -> DecisionTree:
    """Keep only the tau(f)-subtree below every node testing f in dom(tau)."""
    if not tau:
        return t
    fixed = {str(f): _bit(z, f"assignment of {f!r}") for f, z in tau.items()}
    return _project_dt(t, fixed, accumulate=False)


# ---------------------------------------------------------------------------
# Decision sets and decision lists


class DecisionSet:
    """Unordered terms plus a default class; any applicable term flips it."""

    kind = "ds"

    def __init__(self, terms: Iterable[Iterable[Literal]], default: int):
        self.terms: Tuple[Term, ...] = tuple(make_term(t) for t in terms)
        self.default = _bit(default, "default class")

    def features(self) -> FrozenSet[str]:
        return frozenset(f for term in self.terms for f, _ in term)


def _classify_ds(s: DecisionSet, e: Example) -> int:
    if any(term_applies(term, e) for term in s.terms):
        return 1 - s.default
    return s.default


@dataclass(frozen=True)
class Rule:
    term: Term
    label: int


class DecisionList:
    """Ordered rules; the first applicable term decides.  Last term is empty."""

    kind = "dl"

    def __init__(self, rules: Iterable[Tuple[Iterable[Literal], int]]):
        built = tuple(
            Rule(make_term(term), _bit(label, "rule class")) for term, label in rules
        )
        if not built:
            raise ModelError("decision list needs at least the default rule")
        if built[-1].term:
            raise ModelError("the last rule's term must be empty")
        self.rules: Tuple[Rule, ...] = built

    def features(self) -> FrozenSet[str]:
        return frozenset(f for rule in self.rules for f, _ in rule.term)


def _classify_dl(dl: DecisionList, e: Example) -> int:
    for rule in dl.rules:
        if term_applies(rule.term, e):
            return rule.label
    raise AssertionError("unreachable: last rule always applies")


# ---------------------------------------------------------------------------
# Ordered binary decision diagrams


@dataclass(frozen=True)
class ObddNode:
    feature: str
    zero: str
    one: str


class Obdd:
    """DAG reading features along a fixed order, ending in sinks t0/t1.

    The `order` is the feature universe: completion pads every path so it
    reads each feature of the order exactly once.  Every node must be
    reachable from the source, and arcs must move strictly forward in the
    order, which also guarantees acyclicity.
    """

    kind = "obdd"

    def __init__(
        self,
        nodes: Mapping[str, ObddNode],
        source: str,
        t0: str,
        t1: str,
        order: Sequence[str],
    ):
        nodes = dict(nodes)
        order = tuple(str(f) for f in order)
        if len(set(order)) != len(order):
            raise ModelError("feature order has duplicates")
        if t0 == t1:
            raise ModelError("t0 and t1 must differ")
        for sink in (t0, t1):
            if sink in nodes:
                raise ModelError(f"sink {sink!r} also appears as an inner node")
        index = {f: i for i, f in enumerate(order)}
        sinks = {t0, t1}
        if source not in nodes and source not in sinks:
            raise ModelError(f"source {source!r} is not a node")
        for nid, node in nodes.items():
            if node.feature not in index:
                raise NotOrdered(f"feature {node.feature!r} of {nid!r} is not in the order")
            for child in (node.zero, node.one):
                if child in sinks:
                    continue
                if child not in nodes:
                    raise ModelError(f"child {child!r} of {nid!r} is not a node")
                if index[nodes[child].feature] <= index[node.feature]:
                    raise NotOrdered(
                        f"arc {nid!r} -> {child!r} does not advance in the order"
                    )
        reached = set()
        stack = [source]
        while stack:
            nid = stack.pop()
            if nid in sinks or nid in reached:
                continue
            reached.add(nid)
            node = nodes[nid]
            stack.append(node.zero)
            stack.append(node.one)
        if reached != set(nodes):
            raise ModelError("OBDD contains nodes unreachable from the source")
        self.nodes: Dict[str, ObddNode] = nodes
        self.source = source
        self.t0 = t0
        self.t1 = t1
        self.order: Tuple[str, ...] = order
        self._index = index

    def features(self) -> FrozenSet[str]:
        return frozenset(self.order)

    def level(self, nid: str) -> int:
        if nid == self.t0 or nid == self.t1:
            return len(self.order)
        return self._index[self.nodes[nid].feature]

    def sink_label(self, nid: str) -> Optional[int]:
        if nid == self.t0:
            return 0
        if nid == self.t1:
            return 1
        return None

    def present_sinks(self) -> Tuple[str, ...]:
        referenced = {self.source}
        for node in self.nodes.values():
            referenced.add(node.zero)
            referenced.add(node.one)
        return tuple(s for s in (self.t0, self.t1) if s in referenced)

    def size(self) -> int:
        return len(self.nodes) + len(self.present_sinks())


def _classify_obdd(o: Obdd, e: Example) -> int:
    nid = o.source
    label = o.sink_label(nid)
    while label is None:
        node = o.nodes[nid]
        nid = node.one if _lookup(e, node.feature) else node.zero
        label = o.sink_label(nid)
    return label


def is_complete(o: Obdd) -> bool:
    if o.level(o.source) != 0 and len(o.order) > 0:
        return False
    for nid, node in o.nodes.items():
        lv = o.level(nid)
        if o.level(node.zero) != lv + 1 or o.level(node.one) != lv + 1:
            return False
    return True


def complete_obdd(o: Obdd) -> Obdd:
    """Pad skipped levels so every path reads the whole order; same classifier."""
    if is_complete(o):
        return o
    n = len(o.order)
    extra: Dict[str, ObddNode] = {}
    memo: Dict[Tuple[str, int], str] = {}

    def fresh(target: str, lv: int) -> str:
        nid = f"pad:{target}:{lv}"
        while nid in o.nodes or nid in extra:
            nid += "~"
        return nid

    def pad(target: str, lv: int) -> str:
        # node at level lv whose both arcs lead onward to target
        if lv >= o.level(target):
            return target
        key = (target, lv)
        if key not in memo:
            nxt = pad(target, lv + 1)
            nid = fresh(target, lv)
            extra[nid] = ObddNode(o.order[lv], nxt, nxt)
            memo[key] = nid
        return memo[key]

    rebuilt: Dict[str, ObddNode] = {}
    for nid, node in o.nodes.items():
        lv = o.level(nid)
        rebuilt[nid] = ObddNode(
            node.feature, pad(node.zero, lv + 1), pad(node.one, lv + 1)
        )
    source = pad(o.source, 0)
    rebuilt.update(extra)
    return Obdd(rebuilt, source, o.t0, o.t1, o.order)


def reachable_sinks(o: Obdd, tau: PartialExample) -> FrozenSet[int]:
    """Labels of sinks reachable once arcs disagreeing with tau are removed."""
    fixed = {str(f): _bit(z, f"assignment of {f!r}") for f, z in tau.items()}
    labels = set()
    seen = set()
    stack = [o.source]
    while stack:
        nid = stack.pop()
        if nid in seen:
            continue
        seen.add(nid)
        label = o.sink_label(nid)
        if label is not None:
            labels.add(label)
            continue
        node = o.nodes[nid]
        if node.feature in fixed:
            stack.append(node.one if fixed[node.feature] else node.zero)
        else:
            stack.append(node.zero)
            stack.append(node.one)
    return frozenset(labels)


# ---------------------------------------------------------------------------
# Ensembles

Model = Union[DecisionTree, DecisionSet, DecisionList, Obdd, "Ensemble"]


def _is_subsequence(sub: Sequence[str], full: Sequence[str]) -> bool:
    it = iter(full)
    return all(any(x == y for y in it) for x in sub)


class Ensemble:
    """Odd-size majority vote over elements of a single model family."""

    kind = "ensemble"

    def __init__(self, elements: Sequence[Model], shared_order: Optional[Sequence[str]] = None):
        elements = tuple(elements)
        if not elements:
            raise ModelError("ensemble needs at least one element")
        if len(elements) % 2 == 0:
            raise EvenEnsemble(f"ensemble of {len(elements)} elements can tie")
        kinds = {el.kind for el in elements}
        if kinds - {"dt", "ds", "dl", "obdd"}:
            raise ModelError("ensemble elements must be plain models")
        if len(kinds) != 1:
            raise ModelError(f"ensemble mixes model kinds {sorted(kinds)}")
        if shared_order is not None:
            shared_order = tuple(str(f) for f in shared_order)
            if len(set(shared_order)) != len(shared_order):
                raise ModelError("shared order has duplicates")
            if kinds != {"obdd"}:
                raise ModelError("shared order only applies to OBDD ensembles")
            allowed = set(shared_order)
            for i, el in enumerate(elements):
                if not set(el.order) <= allowed:
                    raise ModelError(f"element {i} reads outside the shared order")
                if not _is_subsequence(el.order, shared_order):
                    raise NotOrdered(f"element {i} does not respect the shared order")
        self.elements: Tuple[Model, ...] = elements
        self.shared_order = shared_order

    def features(self) -> FrozenSet[str]:
        out: FrozenSet[str] = frozenset()
        for el in self.elements:
            out = out | el.features()
        return out


def _classify_ensemble(ens: Ensemble, e: Example) -> int:
    votes = sum(classify(el, e) for el in ens.elements)
    return 1 if votes >= len(ens.elements) // 2 + 1 else 0


# ---------------------------------------------------------------------------
# Shared entry points

_CLASSIFIERS = {
    "dt": _classify_dt,
    "ds": _classify_ds,
    "dl": _classify_dl,
    "obdd": _classify_obdd,
    "ensemble": _classify_ensemble,
}


def classify(model: Model, e: Example) -> int:
    return _CLASSIFIERS[model.kind](model, e)


def model_features(model: Model) -> FrozenSet[str]:
    return model.features()


def feature_order(model: Model) -> Tuple[str, ...]:
    """Canonical feature indexing: names sorted ascending."""
    return tuple(sorted(model.features()))


def flip(e: Example, features: Iterable[str]) -> Dict[str, int]:
    flipped = dict(e)
    for f in features:
        flipped[f] = 1 - _lookup(e, f)
    return flipped


# ---------------------------------------------------------------------------
# Table-style parameter measurement


@dataclass
class Parameters:
    ens_size: Optional[int] = None
    mnl_size: Optional[int] = None
    terms_elem: Optional[int] = None
    term_size: Optional[int] = None
    width_elem: Optional[int] = None
    size_elem: Optional[int] = None
    xp_size: Optional[int] = None

    def to_json(self) -> Dict[str, int]:
        out = {}
        for name in (
            "ens_size",
            "mnl_size",
            "terms_elem",
            "term_size",
            "width_elem",
            "size_elem",
            "xp_size",
        ):
            value = getattr(self, name)
            if value is not None:
                out[name] = value
        return out


def dt_mnl(t: DecisionTree) -> int:
    labels = [label for _, label in t.leaves()]
    return min(labels.count(0), labels.count(1))


def dt_size(t: DecisionTree) -> int:
    return len(t.leaves())


def ds_size(s: DecisionSet) -> int:
    return sum(len(t) for t in s.terms) + 1


def dl_size(dl: DecisionList) -> int:
    return sum(len(r.term) + 1 for r in dl.rules)


def obdd_width(o: Obdd) -> int:
    full = complete_obdd(o)
    per_feature: Dict[str, int] = {}
    for node in full.nodes.values():
        per_feature[node.feature] = per_feature.get(node.feature, 0) + 1
    return max(per_feature.values(), default=0)


def measure_parameters(model: Model) -> Parameters:
    elements = model.elements if isinstance(model, Ensemble) else (model,)
    kind = elements[0].kind
    params = Parameters(ens_size=len(elements))
    if kind == "dt":
        params.mnl_size = max(dt_mnl(t) for t in elements)
        params.size_elem = max(dt_size(t) for t in elements)
    elif kind == "ds":
        params.terms_elem = max(len(s.terms) for s in elements)
        params.term_size = max(
            (len(t) for s in elements for t in s.terms), default=0
        )
        params.size_elem = max(ds_size(s) for s in elements)
    elif kind == "dl":
        params.terms_elem = max(len(dl.rules) for dl in elements)
        params.term_size = max(
            len(r.term) for dl in elements for r in dl.rules
        )
        params.size_elem = max(dl_size(dl) for dl in elements)
    elif kind == "obdd":
        params.width_elem = max(obdd_width(o) for o in elements)
        params.size_elem = max(o.size() for o in elements)
    return params


# ---------------------------------------------------------------------------
# JSON interchange


def model_to_json(model: Model) -> Dict:
    if isinstance(model, DecisionTree):
        nodes = {}
        for nid, node in model.nodes.items():
            if isinstance(node, DtLeaf):
                nodes[nid] = {"leaf": node.label}
            else:
                nodes[nid] = {"feature": node.feature, "zero": node.zero, "one": node.one}
        return {"kind": "dt", "root": model.root, "nodes": nodes}
    if isinstance(model, DecisionSet):
        return {
            "kind": "ds",
            "terms": [[[f, z] for f, z in sorted(t)] for t in model.terms],
            "default": model.default,
        }
    if isinstance(model, DecisionList):
        return {
            "kind": "dl",
            "rules": [[[[f, z] for f, z in sorted(r.term)], r.label] for r in model.rules],
        }
    if isinstance(model, Obdd):
        nodes = {
            nid: {"feature": n.feature, "zero": n.zero, "one": n.one}
            for nid, n in model.nodes.items()
        }
        return {
            "kind": "obdd",
            "nodes": nodes,
            "source": model.source,
            "t0": model.t0,
            "t1": model.t1,
            "order": list(model.order),
        }
    if isinstance(model, Ensemble):
        data: Dict = {
            "kind": "ensemble",
            "elements": [model_to_json(el) for el in model.elements],
        }
        if model.shared_order is not None:
            data["shared_order"] = list(model.shared_order)
        return data
    raise ModelError(f"cannot serialize {type(model).__name__}")


def _require(data: Mapping, key: str):
    if key not in data:
        raise ModelError(f"model object misses {key!r}")
    return data[key]


def model_from_json(data: Mapping) -> Model:
    kind = _require(data, "kind")
    if kind == "dt":
        raw = _require(data, "nodes")
        nodes: Dict[str, DtNode] = {}
        for nid, spec in raw.items():
            if "leaf" in spec:
                nodes[nid] = DtLeaf(_bit(spec["leaf"], "leaf label"))
            else:
                nodes[nid] = DtInner(
                    str(_require(spec, "feature")),
                    str(_require(spec, "zero")),
                    str(_require(spec, "one")),
                )
        return simplify_dt(DecisionTree(nodes, str(_require(data, "root"))))
    if kind == "ds":
        return DecisionSet(_require(data, "terms"), _require(data, "default"))
    if kind == "dl":
        return DecisionList(
            [(term, label) for term, label in _require(data, "rules")]
        )
    if kind == "obdd":
        raw = _require(data, "nodes")
        nodes = {
            nid: ObddNode(
                str(_require(spec, "feature")),
                str(_require(spec, "zero")),
                str(_require(spec, "one")),
            )
            for nid, spec in raw.items()
        }
        source = str(_require(data, "source"))
        t0 = str(_require(data, "t0"))
        t1 = str(_require(data, "t1"))
        order = data.get("order")
        if order is None:
            order = _infer_order(nodes, source, t0, t1)
        return Obdd(nodes, source, t0, t1, order)
    if kind == "ensemble":
        elements = [model_from_json(el) for el in _require(data, "elements")]
        if any(isinstance(el, Ensemble) for el in elements):
            raise ModelError("ensembles cannot nest")
        return Ensemble(elements, data.get("shared_order"))
    raise ModelError(f"unknown model kind {kind!r}")


def _infer_order(nodes: Mapping[str, ObddNode], source: str, t0: str, t1: str):
    # walk the 0-arcs once, then append the leftover features sorted; the
    # Obdd constructor re-checks the guess against every arc
    order = []
    nid = source
    while nid not in (t0, t1):
        if nid not in nodes:
            raise ModelError(f"node {nid!r} missing while inferring the order")
        node = nodes[nid]
        if node.feature in order:
            raise NotOrdered("feature repeats along the first path")
        order.append(node.feature)
        nid = node.zero
    rest = sorted(
        {n.feature for n in nodes.values()} - set(order)
    )
    return order + rest


def example_from_json(data: Mapping) -> Dict[str, int]:
    return {str(f): _bit(z, f"value of feature {f!r}") for f, z in data.items()}


def example_to_json(e: Example) -> Dict[str, int]:
    return {f: int(z) for f, z in sorted(e.items())}


def dumps_canonical(data) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def dumps_model(model: Model) -> str:
    return dumps_canonical(model_to_json(model))


def loads_model(text: str) -> Model:
    return model_from_json(json.loads(text))
