import pytest

from xbool.models import (
    DecisionList,
    DecisionTree,
    DtInner,
    DtLeaf,
    Obdd,
    ObddNode,
)


@pytest.fixture
def fig1() -> DecisionList:
    """The running-example list: (x ∧ y → 0), (x̄ ∧ z̄ → 1), (ȳ ∧ z → 0), else 1."""
    return DecisionList(
        [
            ([("x", 1), ("y", 1)], 0),
            ([("x", 0), ("z", 0)], 1),
            ([("y", 0), ("z", 1)], 0),
            ([], 1),
        ]
    )


@pytest.fixture
def fig1_e():
    return {"x": 0, "y": 0, "z": 1}


@pytest.fixture
def and_tree() -> DecisionTree:
    return DecisionTree(
        {
            "r": DtInner("f1", "z", "a"),
            "a": DtInner("f2", "z2", "one"),
            "z": DtLeaf(0),
            "z2": DtLeaf(0),
            "one": DtLeaf(1),
        },
        "r",
    )


@pytest.fixture
def xor_obdd() -> Obdd:
    return Obdd(
        {
            "s": ObddNode("f1", "a", "b"),
            "a": ObddNode("f2", "t0", "t1"),
            "b": ObddNode("f2", "t1", "t0"),
        },
        "s",
        "t0",
        "t1",
        ("f1", "f2"),
    )


@pytest.fixture
def and_obdd() -> Obdd:
    return Obdd(
        {"s": ObddNode("f1", "t0", "a"), "a": ObddNode("f2", "t0", "t1")},
        "s",
        "t0",
        "t1",
        ("f1", "f2"),
    )
