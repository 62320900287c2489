"""Branch-and-bound search for minimum contrastive sets on rule lists.

A flip set A is contrastive iff after flipping A some rule of the
opposite class becomes the first applicable one.  The search tries each
opposite-class rule as that classifying rule: seed with the flips the
rule's own term forces, then repeatedly knock out the earliest earlier
rule that still fires, branching on which of its features to flip.
Ensembles do the same with one candidate rule per member, keeping only
combinations that flip the majority.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .errors import ModelError, UndefinedFeature
from .explain import Witness
from .models import (
    DecisionList,
    DecisionSet,
    Ensemble,
    Example,
    Rule,
    classify,
    flip,
    term_applies,
)


def ds_to_dl(s: DecisionSet) -> DecisionList:
    """Equivalent list: one rule per term for class 1 - default, then default."""
    rules: List[Tuple[tuple, int]] = [(tuple(t), 1 - s.default) for t in s.terms]
    rules.append(((), s.default))
    return DecisionList(rules)


@dataclass
class BranchStats:
    """Recursion-leaf counts, one entry per candidate rule examined."""

    leaves_per_rule: List[int] = field(default_factory=list)


def _require_total(features, e: Example) -> None:
    for f in sorted(features):
        if f not in e:
            raise UndefinedFeature(f"example does not assign feature {f!r}")


def _seed(term, e: Example) -> FrozenSet[str]:
    return frozenset(f for f, v in term if v != e[f])


def _branch(
    rules: Sequence[Rule],
    e: Example,
    k: int,
    j: int,
    fixed: FrozenSet[str],
    flips: FrozenSet[str],
    leaves: List[int],
) -> Optional[FrozenSet[str]]:
    """Smallest extension of `flips` (size ≤ k) that lets rule j classify."""
    if len(flips) > k:
        leaves[0] += 1
        return None
    moved = flip(e, flips)
    blocker = None
    for l in range(j):
        if term_applies(rules[l].term, moved):
            blocker = l
            break
    if blocker is None:
        leaves[0] += 1
        return flips
    branch = sorted({f for f, _ in rules[blocker].term} - flips - fixed)
    if not branch or len(flips) == k:
        leaves[0] += 1
        return None
    best = None
    for f in branch:
        got = _branch(rules, e, k, j, fixed, flips | {f}, leaves)
        if got is not None and (best is None or len(got) < len(best)):
            best = got
    return best


def dl_min_lcxp_branch(
    dl: DecisionList,
    e: Example,
    k: int,
    stats: Optional[BranchStats] = None,
) -> Optional[Witness]:
    """Minimum flip set of size ≤ k changing the list's verdict, or None.

    Candidate rules are tried in list order and only a strictly smaller
    result replaces the current best, so ties go to the earliest rule.
    """
    if k < 0:
        raise ModelError("budget must be non-negative")
    _require_total(dl.features(), e)
    c = classify(dl, e)
    best: Optional[FrozenSet[str]] = None
    for j, rule in enumerate(dl.rules):
        if rule.label == c:
            continue
        fixed = frozenset(f for f, _ in rule.term)
        leaves = [0]
        got = _branch(dl.rules, e, k, j, fixed, _seed(rule.term, e), leaves)
        if stats is not None:
            stats.leaves_per_rule.append(leaves[0])
        if got is not None and (best is None or len(got) < len(best)):
            best = got
    return None if best is None else Witness.of_features(best)


def _branch_ensemble(
    lists: Sequence[DecisionList],
    e: Example,
    k: int,
    combo: Tuple[int, ...],
    fixed: FrozenSet[str],
    flips: FrozenSet[str],
    leaves: List[int],
) -> Optional[FrozenSet[str]]:
    if len(flips) > k:
        leaves[0] += 1
        return None
    moved = flip(e, flips)
    blocker = None
    for i, dl in enumerate(lists):
        for l in range(combo[i]):
            if term_applies(dl.rules[l].term, moved):
                blocker = dl.rules[l].term
                break
        if blocker is not None:
            break
    if blocker is None:
        leaves[0] += 1
        return flips
    branch = sorted({f for f, _ in blocker} - flips - fixed)
    if not branch or len(flips) == k:
        leaves[0] += 1
        return None
    best = None
    for f in branch:
        got = _branch_ensemble(lists, e, k, combo, fixed, flips | {f}, leaves)
        if got is not None and (best is None or len(got) < len(best)):
            best = got
    return best


def dle_min_lcxp_branch(
    ens: Ensemble,
    e: Example,
    k: int,
    stats: Optional[BranchStats] = None,
) -> Optional[Witness]:
    """Minimum flip set of size ≤ k changing the ensemble vote, or None.

    One classifying rule is guessed per member, in lexicographic
    rule-index order; a combination survives only if the guessed labels
    outvote the current class and the guessed terms do not contradict
    each other.
    """
    if k < 0:
        raise ModelError("budget must be non-negative")
    lists = ens.elements
    if any(dl.kind != "dl" for dl in lists):
        raise ModelError("expected an ensemble of decision lists")
    _require_total(ens.features(), e)
    c = classify(ens, e)
    best: Optional[FrozenSet[str]] = None
    for combo in itertools.product(*(range(len(dl.rules)) for dl in lists)):
        flipped = sum(1 for i, j in enumerate(combo) if lists[i].rules[j].label != c)
        if flipped <= len(lists) - flipped:
            continue
        union: Dict[str, int] = {}
        conflict = False
        for i, j in enumerate(combo):
            for f, v in lists[i].rules[j].term:
                if union.setdefault(f, v) != v:
                    conflict = True
                    break
            if conflict:
                break
        if conflict:
            continue
        seed = frozenset(f for f, v in union.items() if v != e[f])
        leaves = [0]
        got = _branch_ensemble(lists, e, k, combo, frozenset(union), seed, leaves)
        if stats is not None:
            stats.leaves_per_rule.append(leaves[0])
        if got is not None and (best is None or len(got) < len(best)):
            best = got
    return None if best is None else Witness.of_features(best)
