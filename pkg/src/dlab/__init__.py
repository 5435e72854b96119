"""Certified numerical checks for linear-independence criteria on sequences of linear forms."""

__version__ = "0.1.0"

from .numerics import RealInterval, Verdict, certified_compare, certified_sign, enclose_constant  # noqa: E402
from .forms import EvaluationPoint, FormSequence, LinearForm, evaluate_form, verify_hypotheses_main  # noqa: E402
from .bounds import SequenceBounds  # noqa: E402
from .generators import GeneratorSpec, build_sequence, generate  # noqa: E402
from .criteria import estimate_exponents, main_conclusion_check, nesterenko_dim_bound  # noqa: E402
from .minkowski import build_body, find_lattice_point, proof_chain_check, replay  # noqa: E402

__all__ = [
    "EvaluationPoint", "FormSequence", "GeneratorSpec", "LinearForm", "RealInterval", "SequenceBounds",
    "Verdict", "__version__", "build_body", "build_sequence", "certified_compare", "certified_sign",
    "enclose_constant", "estimate_exponents", "evaluate_form", "find_lattice_point", "generate",
    "main_conclusion_check", "nesterenko_dim_bound", "proof_chain_check", "replay", "verify_hypotheses_main",
]
