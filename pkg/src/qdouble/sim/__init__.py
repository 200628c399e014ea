from .register import QuditRegister, StateVector
from .ops import OperatorHandle, OperatorSum
from .circuit import AdaptiveCircuit, CircuitBuilder
from .engine import DepthReport, apply, apply_general, enumerate_runs, expectation, measure, run

__all__ = [
    "QuditRegister", "StateVector", "OperatorHandle", "OperatorSum",
    "AdaptiveCircuit", "CircuitBuilder", "DepthReport",
    "apply", "apply_general", "enumerate_runs", "expectation", "measure", "run",
]
