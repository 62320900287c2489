"""Explanation queries, witnesses, and the brute-force ground-truth oracle.

Four query kinds over a model M with feature set F:

* lAXp(e): a set A of features such that every example agreeing with e
  on A gets the same class as e.
* lCXp(e): a set A such that some example differing from e only inside
  A gets a different class (the empty set is never one).
* gAXp(c): a partial assignment forcing class c on all completions.
* gCXp(c): a partial assignment forcing class != c on all completions.

The oracle enumerates candidate witnesses smallest-first with a fixed
tie-break (lexicographic over the sorted feature universe, assignments
counted binary with the first chosen feature most significant), so its
answers are deterministic and usable as frozen expected values.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Mapping, Optional, Tuple, Union

from .errors import ModelError, TooLarge, UndefinedFeature
from .models import Example, Model, _bit, classify, example_to_json, model_features

KINDS = ("lAXp", "lCXp", "gAXp", "gCXp")
LOCAL_KINDS = ("lAXp", "lCXp")
GLOBAL_KINDS = ("gAXp", "gCXp")
DEFAULT_GUARD = 20


@dataclass(frozen=True)
class ExplanationQuery:
    kind: str
    minimality: str
    target: Union[Mapping[str, int], int]
    k: Optional[int] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ModelError(f"unknown query kind {self.kind!r}")
        if self.minimality not in ("subset", "cardinality"):
            raise ModelError(f"unknown minimality {self.minimality!r}")
        if (self.k is not None) != (self.minimality == "cardinality"):
            raise ModelError("budget k goes with cardinality queries only")
        if self.k is not None and (isinstance(self.k, bool) or not isinstance(self.k, int) or self.k < 0):
            raise ModelError(f"budget must be a non-negative integer, got {self.k!r}")
        if self.kind in LOCAL_KINDS:
            if not isinstance(self.target, Mapping):
                raise ModelError("local queries target an example")
            example = {
                str(f): _bit(z, f"value of feature {f!r}") for f, z in self.target.items()
            }
            object.__setattr__(self, "target", example)
        else:
            object.__setattr__(self, "target", _bit(self.target, "target class"))

    @property
    def is_local(self) -> bool:
        return self.kind in LOCAL_KINDS


@dataclass(frozen=True)
class Witness:
    features: Optional[Tuple[str, ...]] = None
    assignment: Optional[Tuple[Tuple[str, int], ...]] = None

    def __post_init__(self):
        if (self.features is None) == (self.assignment is None):
            raise ModelError("witness carries either a feature set or an assignment")

    @classmethod
    def of_features(cls, features: Iterable[str]) -> "Witness":
        return cls(features=tuple(sorted(set(str(f) for f in features))))

    @classmethod
    def of_assignment(cls, tau: Mapping[str, int]) -> "Witness":
        items = tuple(
            sorted((str(f), _bit(z, f"assignment of {f!r}")) for f, z in tau.items())
        )
        if len({f for f, _ in items}) != len(items):
            raise ModelError("assignment repeats a feature")
        return cls(assignment=items)

    @property
    def size(self) -> int:
        payload = self.features if self.features is not None else self.assignment
        return len(payload)


class FunctionOracle:
    """Brute-force query evaluation for an arbitrary total 0/1 classifier.

    Classifications are memoized per feature vector, so repeated candidate
    checks against the same function stay cheap.
    """

    def __init__(self, features: Iterable[str], classify_fn: Callable[[Dict[str, int]], int], guard: int = DEFAULT_GUARD):
        feats = tuple(sorted(set(str(f) for f in features)))
        if len(feats) > guard:
            raise TooLarge(
                f"{len(feats)} features exceed the exhaustive-check guard of {guard}"
            )
        self.features = feats
        self._pos = {f: i for i, f in enumerate(feats)}
        self._fn = classify_fn
        self._memo: Dict[Tuple[int, ...], int] = {}

    # -- plumbing

    def label(self, bits: Tuple[int, ...]) -> int:
        got = self._memo.get(bits)
        if got is None:
            got = _bit(
                self._fn({f: bits[i] for i, f in enumerate(self.features)}),
                "classifier output",
            )
            self._memo[bits] = got
        return got

    def bits_of(self, e: Example) -> Tuple[int, ...]:
        try:
            return tuple(_bit(e[f], f"value of feature {f!r}") for f in self.features)
        except KeyError as missing:
            raise UndefinedFeature(f"example does not assign feature {missing}") from None

    def _completions(self, fixed: Dict[int, int]):
        free = [i for i in range(len(self.features)) if i not in fixed]
        base = [fixed.get(i, 0) for i in range(len(self.features))]
        for values in itertools.product((0, 1), repeat=len(free)):
            for i, v in zip(free, values):
                base[i] = v
            yield tuple(base)

    def _check_features(self, names: Iterable[str]):
        for f in names:
            if f not in self._pos:
                raise UndefinedFeature(f"witness mentions unknown feature {f!r}")

    # -- the four definitions

    def _laxp(self, e_bits: Tuple[int, ...], fixed_features: Iterable[str]) -> bool:
        c = self.label(e_bits)
        fixed = {self._pos[f]: e_bits[self._pos[f]] for f in fixed_features}
        return all(self.label(b) == c for b in self._completions(fixed))

    def _lcxp(self, e_bits: Tuple[int, ...], free_features: Iterable[str]) -> bool:
        c = self.label(e_bits)
        free = {self._pos[f] for f in free_features}
        fixed = {i: e_bits[i] for i in range(len(self.features)) if i not in free}
        return any(self.label(b) != c for b in self._completions(fixed))

    def _global(self, kind: str, c: int, tau: Mapping[str, int]) -> bool:
        fixed = {self._pos[f]: z for f, z in tau.items()}
        if kind == "gAXp":
            return all(self.label(b) == c for b in self._completions(fixed))
        return all(self.label(b) != c for b in self._completions(fixed))

    # -- public checks

    def holds(self, q: ExplanationQuery, w: Witness) -> bool:
        if q.is_local:
            if w.features is None:
                raise ModelError("local queries take a feature-set witness")
            self._check_features(w.features)
            e_bits = self.bits_of(q.target)
            if q.kind == "lAXp":
                return self._laxp(e_bits, w.features)
            return self._lcxp(e_bits, w.features)
        if w.assignment is None:
            raise ModelError("global queries take an assignment witness")
        tau = dict(w.assignment)
        self._check_features(tau)
        return self._global(q.kind, q.target, tau)

    def minimum(self, q: ExplanationQuery) -> Optional[Witness]:
        n = len(self.features)
        limit = n if q.k is None else min(q.k, n)
        if q.is_local:
            e_bits = self.bits_of(q.target)
            start = 1 if q.kind == "lCXp" else 0
            for size in range(start, limit + 1):
                for combo in itertools.combinations(range(n), size):
                    names = [self.features[i] for i in combo]
                    if q.kind == "lAXp":
                        ok = self._laxp(e_bits, names)
                    else:
                        ok = self._lcxp(e_bits, names)
                    if ok:
                        return Witness.of_features(names)
            return None
        for size in range(0, limit + 1):
            for combo in itertools.combinations(range(n), size):
                for values in itertools.product((0, 1), repeat=size):
                    tau = {self.features[i]: v for i, v in zip(combo, values)}
                    if self._global(q.kind, q.target, tau):
                        return Witness.of_assignment(tau)
        return None

    def subset_minimal(self, q: ExplanationQuery, w: Witness) -> bool:
        if not self.holds(q, w):
            return False
        if q.is_local:
            for f in w.features:
                rest = [g for g in w.features if g != f]
                if self.holds(q, Witness.of_features(rest)):
                    return False
            return True
        tau = dict(w.assignment)
        for f in list(tau):
            rest = {g: z for g, z in tau.items() if g != f}
            if self.holds(q, Witness.of_assignment(rest)):
                return False
        return True


def _oracle_for(model: Model, guard: int) -> FunctionOracle:
    return FunctionOracle(model_features(model), lambda e: classify(model, e), guard)


def is_explanation(model: Model, q: ExplanationQuery, w: Witness, guard: int = DEFAULT_GUARD) -> bool:
    if q.k is not None and w.size > q.k:
        return False
    return _oracle_for(model, guard).holds(q, w)


def oracle_min(model: Model, q: ExplanationQuery, guard: int = DEFAULT_GUARD) -> Optional[Witness]:
    return _oracle_for(model, guard).minimum(q)


def verify_subset_minimal(model: Model, q: ExplanationQuery, w: Witness, guard: int = DEFAULT_GUARD) -> bool:
    if q.k is not None and w.size > q.k:
        return False
    return _oracle_for(model, guard).subset_minimal(q, w)


# ---------------------------------------------------------------------------
# JSON interchange


def query_to_json(q: ExplanationQuery) -> Dict:
    data: Dict = {"kind": q.kind, "minimality": q.minimality}
    data["target"] = example_to_json(q.target) if q.is_local else q.target
    if q.k is not None:
        data["k"] = q.k
    return data


def query_from_json(data: Mapping) -> ExplanationQuery:
    for key in ("kind", "minimality", "target"):
        if key not in data:
            raise ModelError(f"query object misses {key!r}")
    return ExplanationQuery(
        kind=data["kind"],
        minimality=data["minimality"],
        target=data["target"],
        k=data.get("k"),
    )


def witness_to_json(w: Witness):
    if w.features is not None:
        return list(w.features)
    return {f: z for f, z in w.assignment}


def witness_from_json(data) -> Witness:
    if isinstance(data, Mapping):
        return Witness.of_assignment(data)
    if isinstance(data, (list, tuple)):
        return Witness.of_features(data)
    raise ModelError("witness must be a feature array or a feature->bit object")
