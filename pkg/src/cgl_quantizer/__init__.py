"""Quantize symmetric integral Poisson-CGL extensions into quantum-CGL presentations over Q[q, q^-1]."""

from .errors import *  # noqa: F401,F403
from .scalars import (
    ONE,
    Q,
    Q_MINUS_ONE,
    ZERO,
    QLaurent,
    QRational,
    divide_by_q_minus_one,
    eval_at_one,
    format_scalar,
    is_in_L,
    parse_scalar,
    q_power,
    to_laurent,
)
from .poisson import (
    CommLaurent,
    ExtensionSpec,
    ValidationReport,
    bracket,
    make_spec,
    parse_comm,
    validate_spec,
)
from .commutative import (
    LevelSets,
    PoissonMatrix,
    YSequence,
    compute_b,
    compute_d_chain,
    compute_level_sets,
    compute_y_sequence,
    poisson_matrix,
    prepend_data,
)
from .ore import (
    OreElement,
    OrePresentation,
    QTorusPresentation,
    TorusElement,
    TorusEmbedding,
    apply_delta,
    apply_sigma,
    embed_to_torus,
    ore_multiply,
    parse_ore,
    parse_torus,
    torus_multiply,
    torus_to_ore,
)
from .quantum import QYSequence, check_normality, compute_B, compute_D_chain, compute_Y_sequence
from .quantizer import QuantumPresentation, from_presentation, quantize, recover_epsilon, scaled_variant
from .verifier import (
    CheckResult,
    VerificationReport,
    distinguished_checks,
    nilpotency_check,
    run_verification,
    semiclassical_check,
    structure_checks,
    y_congruence_check,
)
from .cli_io import load_fixture, parse_spec, print_spec, run_pipeline

__version__ = "0.1.0"
