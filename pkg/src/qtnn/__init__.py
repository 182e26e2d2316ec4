"""Tunable quantum neural networks built from multi-controlled X gates.

Boolean functions are learned through the identification between a
function's algebraic normal form and a circuit of multi-controlled X gates
acting on a single readout qubit.
"""

from qtnn.boolean_core import (
    Anf,
    BooleanFunction,
    anf_from_truth_table,
    eval_monomial,
    format_anf,
    parse_function,
    transform_matrix,
    truth_table_from_anf,
    xor_functions,
)
from qtnn.learner import QtMode, TrainReport, train
from qtnn.statevector import GateOp, StateVector
from qtnn.tnn import Oracle, TnnConfig, apply_oracle, apply_tnn, phi, phi_inverse

__all__ = [
    "Anf",
    "BooleanFunction",
    "GateOp",
    "Oracle",
    "QtMode",
    "StateVector",
    "TnnConfig",
    "TrainReport",
    "anf_from_truth_table",
    "apply_oracle",
    "apply_tnn",
    "eval_monomial",
    "format_anf",
    "parse_function",
    "phi",
    "phi_inverse",
    "train",
    "transform_matrix",
    "truth_table_from_anf",
    "xor_functions",
]
