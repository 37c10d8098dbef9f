"""Layered bilayer deformations: constructions, energies and convergence checks."""

from ._core import (
    BilayerError,
    Field,
    LimitDeformation,
    analyze_sweep,
    decompose_me1,
    dyadic_eps,
    energy_sweep,
    in_me1,
    multi_jump,
    optimal_translation_gap,
    parallel_recovery,
    recompose,
    rotation_from_angle,
    run_property_suite,
    run_scenario,
    single_jump_general,
    single_jump_limit,
    single_jump_variant_i,
    single_jump_variant_ii,
    single_jump_variant_iii,
    weak_star_gaps,
)

__all__ = [
    "BilayerError",
    "Field",
    "LimitDeformation",
    "analyze_sweep",
    "decompose_me1",
    "dyadic_eps",
    "energy_sweep",
    "in_me1",
    "multi_jump",
    "optimal_translation_gap",
    "parallel_recovery",
    "recompose",
    "rotation_from_angle",
    "run_property_suite",
    "run_scenario",
    "single_jump_general",
    "single_jump_limit",
    "single_jump_variant_i",
    "single_jump_variant_ii",
    "single_jump_variant_iii",
    "weak_star_gaps",
]
