"""Explanations for transparent binary classifiers.

Decision trees, decision sets, decision lists, complete OBDDs, and odd
majority ensembles, together with subset-minimal and cardinality-minimal
local/global abductive/contrastive explanation algorithms, circuit
compilers, and deterministic hard-instance generators.
"""

from .errors import (
    BudgetExceeded,
    ContradictoryTerm,
    EvenEnsemble,
    Homogeneous,
    ModelError,
    NotOrdered,
    SharedFeature,
    TooLarge,
    UndefinedFeature,
    UnassignedInput,
)
from .models import (
    DecisionList,
    DecisionSet,
    DecisionTree,
    DtInner,
    DtLeaf,
    Ensemble,
    Obdd,
    ObddNode,
    Parameters,
    Rule,
    classify,
    complete_obdd,
    feature_order,
    flip,
    is_complete,
    loads_model,
    dumps_model,
    measure_parameters,
    model_features,
    model_from_json,
    model_to_json,
    reachable_sinks,
    restrict_dt,
    simplify_dt,
)
from .explain import (
    DEFAULT_GUARD,
    ExplanationQuery,
    FunctionOracle,
    Witness,
    is_explanation,
    oracle_min,
    query_from_json,
    query_to_json,
    verify_subset_minimal,
    witness_from_json,
    witness_to_json,
)
from .dt import (
    dt_check,
    dt_ensemble_to_dt,
    dt_lcxp_check,
    dt_min_lcxp,
    dt_subset_min,
    dt_xp_search,
)
from .obdd import (
    dt_to_obdd,
    obdd_check,
    obdd_ensemble_product,
    obdd_lcxp_check,
    obdd_min_lcxp,
    obdd_subset_min,
    obdd_xp_search,
)
from .dslist import (
    BranchStats,
    dl_min_lcxp_branch,
    dle_min_lcxp_branch,
    ds_to_dl,
)
from .circuits import (
    Circuit,
    Gate,
    circuit_explain_bruteforce,
    circuit_from_json,
    circuit_to_dot,
    circuit_to_json,
    compile_dl,
    compile_dl_ensemble,
    compile_dt,
    compile_dt_ensemble,
    compile_obdd,
    compile_obdd_ensemble_ordered,
    dumps_circuit,
    eval_circuit,
)
from . import gadgets

__all__ = [
    "BudgetExceeded",
    "ContradictoryTerm",
    "EvenEnsemble",
    "Homogeneous",
    "ModelError",
    "NotOrdered",
    "SharedFeature",
    "TooLarge",
    "UndefinedFeature",
    "UnassignedInput",
    "DecisionList",
    "DecisionSet",
    "DecisionTree",
    "DtInner",
    "DtLeaf",
    "Ensemble",
    "Obdd",
    "ObddNode",
    "Parameters",
    "Rule",
    "classify",
    "complete_obdd",
    "feature_order",
    "flip",
    "is_complete",
    "loads_model",
    "dumps_model",
    "measure_parameters",
    "model_features",
    "model_from_json",
    "model_to_json",
    "reachable_sinks",
    "restrict_dt",
    "simplify_dt",
    "DEFAULT_GUARD",
    "ExplanationQuery",
    "FunctionOracle",
    "Witness",
    "is_explanation",
    "oracle_min",
    "query_from_json",
    "query_to_json",
    "verify_subset_minimal",
    "witness_from_json",
    "witness_to_json",
    "dt_check",
    "dt_ensemble_to_dt",
    "dt_lcxp_check",
    "dt_min_lcxp",
    "dt_subset_min",
    "dt_xp_search",
    "dt_to_obdd",
    "obdd_check",
    "obdd_ensemble_product",
    "obdd_lcxp_check",
    "obdd_min_lcxp",
    "obdd_subset_min",
    "obdd_xp_search",
    "BranchStats",
    "dl_min_lcxp_branch",
    "dle_min_lcxp_branch",
    "ds_to_dl",
    "Circuit",
    "Gate",
    "circuit_explain_bruteforce",
    "circuit_from_json",
    "circuit_to_dot",
    "circuit_to_json",
    "compile_dl",
    "compile_dl_ensemble",
    "compile_dt",
    "compile_dt_ensemble",
    "compile_obdd",
    "compile_obdd_ensemble_ordered",
    "dumps_circuit",
    "eval_circuit",
    "gadgets",
]
