"""Two-phase torsional rigidity on concentric balls.

Closed-form shape-derivative analysis of the energy E = int sigma |grad u|^2
for the state problem -div(sigma grad u) = 1 on the unit ball with a
concentric core of radius R and conductivity sigma: per-mode transmission
profiles, the per-degree quadratic form of the second variation, stability
classification, and two independent numerical oracles (a small linear-system
solve per mode and a finite-difference solver on perturbed domains).
"""

from .exact_state import StateTraces, baseline_energy, sphere_area, traces, u_value
from .params import (
    Constraint,
    ModeIndex,
    PerturbationSpec,
    ProblemParams,
    ValidationVerdict,
    eigenvalue,
    multiplicity,
    spec_from_pairs,
    validate,
)
from .pde_oracle import (
    JOBS_ENV_VAR,
    AngularProfile,
    InterfaceOrderingError,
    OracleRun,
    PerturbedDomainFamily,
    SolveError,
    differentiate_energy,
    enclosed_areas,
    family_from_config,
    run_from_config,
    solve_energy,
)
from .reporting import (
    SUITES,
    CheckResult,
    FidelityEntry,
    FidelityReport,
    FidelityVerdict,
    build_fidelity_report,
    emit_spectrum_csv,
    presets,
    run_coefficients_suite,
    run_monotonicity_suite,
    run_pde_suite,
    run_secondvar_suite,
)
from .second_variation import (
    ResonanceAnalysis,
    SecondVariationSpectrum,
    SpectrumPath,
    assemble_spectrum,
    factored_discriminant,
    first_variation,
    g_factor,
    monotonicity_functions,
    printed_spectrum,
    resonance_analysis,
    spectrum,
    total_second_variation,
)
from .stability import (
    Channel,
    Classification,
    StabilityVerdict,
    classify,
    positive_mode_set,
)
from .transmission import (
    ModeKind,
    ModeProfile,
    TransmissionSolveError,
    closed_form_mode,
    denom_F,
    harmonic_value,
    solve_mode_oracle,
    u_prime_value,
)

__version__ = "0.1.0"

__all__ = [
    "AngularProfile",
    "Channel",
    "CheckResult",
    "Classification",
    "Constraint",
    "FidelityEntry",
    "FidelityReport",
    "FidelityVerdict",
    "InterfaceOrderingError",
    "JOBS_ENV_VAR",
    "ModeIndex",
    "ModeKind",
    "ModeProfile",
    "OracleRun",
    "PerturbationSpec",
    "PerturbedDomainFamily",
    "ProblemParams",
    "ResonanceAnalysis",
    "SUITES",
    "SecondVariationSpectrum",
    "SolveError",
    "SpectrumPath",
    "StabilityVerdict",
    "StateTraces",
    "TransmissionSolveError",
    "ValidationVerdict",
    "assemble_spectrum",
    "baseline_energy",
    "build_fidelity_report",
    "classify",
    "closed_form_mode",
    "denom_F",
    "differentiate_energy",
    "eigenvalue",
    "emit_spectrum_csv",
    "enclosed_areas",
    "factored_discriminant",
    "family_from_config",
    "first_variation",
    "g_factor",
    "harmonic_value",
    "monotonicity_functions",
    "multiplicity",
    "positive_mode_set",
    "presets",
    "printed_spectrum",
    "resonance_analysis",
    "run_coefficients_suite",
    "run_from_config",
    "run_monotonicity_suite",
    "run_pde_suite",
    "run_secondvar_suite",
    "solve_energy",
    "solve_mode_oracle",
    "spec_from_pairs",
    "spectrum",
    "sphere_area",
    "total_second_variation",
    "traces",
    "u_value",
    "validate",
]
