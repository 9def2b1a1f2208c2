"""Answer set solving with learned choice-point policies."""

from .core import (
    Atom,
    CardinalityTest,
    DecisionSequence,
    ExtendedLiteral,
    GroundProgram,
    Literal,
    PartialAnswerSet,
    Rule,
)
from .policy import Policy, TrainingRecord, best_choice_points, learn_policy, merge, occurrence_count
from .postp import augment, mock_ground, postprocess
from .propagate import enumerate_stable_models, expand, verify_stable
from .search import choose_literal, replay, solve_baseline, solve_dspec, solve_tracking
from .textio import parse_program, render_program

__version__ = "0.1.0"
