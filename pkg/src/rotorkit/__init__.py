"""Homological rotor codes: exact Clifford algebra, integer lattices, number-phase
mappings and truncated-state simulation for planar rotors."""

from __future__ import annotations

from .clifford import (
    Atom,
    GeneratorWord,
    JosephsonHamiltonian,
    SymplecticRotorOp,
    act_on_pauli,
    compose,
    generator,
    group_law_suite,
    hn_decompose,
    inverse,
    is_normal_conjugate,
    is_passive,
    synthesize_generators,
    transform_josephson,
    transform_nullifier,
)
from .codes import (
    CSSViolation,
    HomologicalRotorCode,
    LogicalOperators,
    RotorGkpCode,
    codeword_state,
    encoding_circuit,
    logical_operators,
)
from .gkp_repetition import RepetitionConfig, TrialOutcome, monte_carlo, run_trial, verify_circuit, wrap
from .lattice import HomologyResult, SmithDecomposition, homology, same_equivalence_class, smith_normal_form
from .number_phase import NumberPhaseCode, OrientationFlip, find_orientation, np_logicals, to_number_phase
from .pauli import ExactAngle, PauliVector, commutes, symplectic_phase
from .simulator import TruncatedRotorState, apply_atom, apply_word, coherent_state, phase_distribution, wigner
from .theta import jacobi_theta, qec_overlap

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
