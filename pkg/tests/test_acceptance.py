"""Acceptance criteria, one test per criterion.

Each test enforces one acceptance property at its stated tolerance, so a
verbose pytest run emits exactly one pass/fail line per criterion.  The
finite-difference oracle runs that criteria 9-12 share are computed once in
session fixtures.
"""

import math
import time

import numpy as np
import pytest

from twophase_torsion.exact_state import baseline_energy
from twophase_torsion.params import ModeIndex, PerturbationSpec, ProblemParams
from twophase_torsion.pde_oracle import (
    PerturbedDomainFamily,
    differentiate_energy,
    solve_energy,
)
from twophase_torsion.reporting import build_fidelity_report, FidelityVerdict
from twophase_torsion.second_variation import (
    SpectrumPath,
    assemble_spectrum,
    monotonicity_functions,
    resonance_analysis,
    total_second_variation,
)
from twophase_torsion.stability import Classification, classify
from twophase_torsion.transmission import (
    ModeKind,
    closed_form_mode,
    denom_F,
    solve_mode_oracle,
)

GRID_DIMS = (2, 3, 4)
GRID_SIGMAS = (0.1, 0.5, 1.0, 2.0, 10.0)
GRID_RADII = (0.2, 0.5, 0.8)
GRID_DEGREES = range(1, 21)

GRID = [
    ProblemParams(dim, radius, sigma)
    for dim in GRID_DIMS
    for sigma in GRID_SIGMAS
    for radius in GRID_RADII
]

SIGMA2 = ProblemParams(2, 0.5, 2.0)


@pytest.fixture(scope="session")
def baseline_solves():
    """Unperturbed energies at 512x64 and 256x64 for sigma in {1, 2}."""
    results = {}
    for sigma in (1.0, 2.0):
        params = ProblemParams(2, 0.5, sigma)
        family = PerturbedDomainFamily.from_spec(params, PerturbationSpec({}))
        results[sigma] = {
            "exact": baseline_energy(params),
            "fine": solve_energy(family, 512, 64),
            "mid": solve_energy(family, 256, 64),
        }
    return results


@pytest.fixture(scope="session")
def sigma2_oracle_runs():
    """Finite-difference runs at (N=2, R=0.5, sigma=2): degrees 1-3, both
    channels, plus the coupled degree-2 run; shared by criteria 10 and 11."""
    start = time.perf_counter()
    runs = {}
    for degree in (1, 2, 3):
        for channel, alpha in (("inner", (1.0, 0.0)), ("outer", (0.0, 1.0))):
            spec = PerturbationSpec({ModeIndex(degree, 1): alpha})
            family = PerturbedDomainFamily.from_spec(SIGMA2, spec)
            runs[(degree, channel)] = differentiate_energy(family)
    coupled = PerturbationSpec({ModeIndex(2, 1): (1.0, 1.0)})
    runs[(2, "coupled")] = differentiate_energy(
        PerturbedDomainFamily.from_spec(SIGMA2, coupled)
    )
    elapsed = time.perf_counter() - start
    return runs, elapsed


@pytest.fixture(scope="session")
def saddle_witness_runs():
    """Classifier verdict at sigma = 0.5 plus oracle runs on both witnesses."""
    params = ProblemParams(2, 0.5, 0.5)
    verdict = classify(params, k_max=30)
    runs = {}
    for label, witness in (
        ("positive", verdict.witness_positive),
        ("negative", verdict.witness_negative),
    ):
        family = PerturbedDomainFamily.from_spec(params, witness)
        runs[label] = differentiate_energy(family)
    return params, verdict, runs


def test_criterion_01_transmission_residuals():
    # the solver raises when any interface or boundary condition is met
    # worse than 1e-12 relative, so completing the sweep is the assertion
    start = time.perf_counter()
    for params in GRID:
        for degree in GRID_DEGREES:
            for kind in ModeKind:
                profile = solve_mode_oracle(params, degree, kind)
                assert profile.denom > 0.0
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0, f"transmission sweep took {elapsed:.1f} s"


def test_criterion_02_denominator_positivity():
    start = time.perf_counter()
    for params in GRID:
        for degree in GRID_DEGREES:
            assert denom_F(params, degree) > 0.0, (params, degree)
    rng = np.random.default_rng(12345)
    for _ in range(1000):
        params = ProblemParams(
            dim=int(rng.integers(2, 7)),
            core_radius=float(rng.uniform(0.05, 0.95)),
            sigma=float(np.exp(rng.uniform(np.log(0.05), np.log(20.0)))),
        )
        degree = int(rng.integers(1, 51))
        assert denom_F(params, degree) > 0.0, (params, degree)
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0, f"positivity sweep took {elapsed:.1f} s"


def test_criterion_03_closed_form_fidelity():
    for params in GRID:
        for degree in GRID_DEGREES:
            printed = closed_form_mode(params, degree, ModeKind.INNER)
            oracle = solve_mode_oracle(params, degree, ModeKind.INNER)
            scale = max(
                abs(oracle.inner_coeff),
                abs(oracle.outer_sing),
                abs(oracle.outer_reg),
                1e-300,
            )
            assert abs(printed.outer_sing - oracle.outer_sing) <= 1e-10 * scale
            assert abs(printed.outer_reg - oracle.outer_reg) <= 1e-10 * scale
    # the inner r^k coefficient is reported either way, never patched
    report = build_fidelity_report()
    entry = report.entry("B_in")
    assert entry.verdict in (FidelityVerdict.MATCH, FidelityVerdict.MISMATCH)
    if entry.verdict is FidelityVerdict.MISMATCH:
        assert entry.note, "a mismatch must carry a documentation pointer"
        assert entry.printed_value != entry.reference_value


def test_criterion_04_translation_invariance():
    for params in GRID:
        values = assemble_spectrum(params, 1)
        scale = max(abs(values.e_in), abs(values.e_out), 1e-300)
        assert abs(values.e_in - values.e_out) <= 1e-12 * scale, params


def test_criterion_05_single_phase_degeneracy():
    for dim in GRID_DIMS:
        for radius in GRID_RADII:
            params = ProblemParams(dim, radius, 1.0)
            for degree in range(1, 51):
                values = assemble_spectrum(params, degree)
                assert abs(values.e_in) <= 1e-12, (params, degree)
                if degree == 1:
                    assert abs(values.e_out) <= 1e-12, params
                else:
                    assert values.e_out < 0.0, (params, degree)


def test_criterion_06_spectrum_monotonicity():
    for params in GRID:
        previous = None
        for degree in range(1, 51):
            values = assemble_spectrum(params, degree)
            if previous is not None:
                assert values.e_out < previous.e_out, (params, degree)
                if params.sigma != 1.0:
                    assert values.e_in < previous.e_in, (params, degree)
            previous = values


def test_criterion_07_proof_function_negativity():
    start = time.perf_counter()
    x_grid = np.geomspace(1e-3, 50.0, 40)
    combos = [
        (dim, float(radius))
        for dim in range(2, 7)
        for radius in np.linspace(0.05, 0.95, 21)
    ]
    assert len(combos) >= 100
    for dim, radius in combos:
        params = ProblemParams(dim, radius, 1.0)
        for x in x_grid:
            a, b, c = monotonicity_functions(params, float(x))
            assert a < 0.0 and b < 0.0 and c < 0.0, (dim, radius, x)
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0, f"negativity sweep took {elapsed:.1f} s"


def test_criterion_08_resonance_structure():
    t_values = np.concatenate([np.linspace(-10.0, 10.0, 98), [-1.0, 1.0]])
    assert len(t_values) == 100
    for dim in GRID_DIMS:
        for radius in GRID_RADII:
            for sigma in (1.5, 2.0, 10.0):
                params = ProblemParams(dim, radius, sigma)
                for degree in range(1, 51):
                    analysis = resonance_analysis(
                        params, degree, SpectrumPath.ASSEMBLED
                    )
                    scale = max(
                        analysis.q_linear**2,
                        abs(4.0 * analysis.q_leading * analysis.q_constant),
                    )
                    if degree == 1:
                        assert abs(analysis.discriminant) <= 1e-10 * scale, params
                        combined = PerturbationSpec({ModeIndex(1, 1): (1.0, 1.0)})
                        total = total_second_variation(
                            combined, params, SpectrumPath.ASSEMBLED
                        )
                        assert abs(total) <= 1e-10, (params, total)
                    else:
                        assert analysis.discriminant <= 1e-10 * scale, (params, degree)
                        q_samples = analysis.q_value(t_values)
                        assert np.all(q_samples < 0.0), (params, degree)


def test_criterion_09_pde_baseline(baseline_solves):
    for sigma, result in baseline_solves.items():
        fine_error = abs(result["fine"] - result["exact"]) / abs(result["exact"])
        mid_error = abs(result["mid"] - result["exact"]) / abs(result["exact"])
        assert fine_error <= 1e-6, f"sigma={sigma}: relative error {fine_error:.3e}"
        order = math.log2(mid_error / fine_error)
        assert 1.5 <= order <= 2.5, f"sigma={sigma}: observed order {order:.2f}"


def test_criterion_10_first_variation_vanishes(sigma2_oracle_runs):
    runs, elapsed = sigma2_oracle_runs
    for degree in (1, 2, 3):
        for channel in ("inner", "outer"):
            run = runs[(degree, channel)]
            bound = 1e-4 * abs(run.energy_at(0.0))
            assert abs(run.d1) < bound, (
                f"k={degree} {channel}: |d1|={abs(run.d1):.3e} vs bound {bound:.3e}"
            )
    assert elapsed < 180.0, f"oracle runs took {elapsed:.1f} s"


def test_criterion_11_second_variation_match(sigma2_oracle_runs):
    runs, elapsed = sigma2_oracle_runs
    values = assemble_spectrum(SIGMA2, 2)
    inner_dev = abs(runs[(2, "inner")].d2 - values.e_in) / abs(values.e_in)
    outer_dev = abs(runs[(2, "outer")].d2 - values.e_out) / abs(values.e_out)
    assert inner_dev <= 0.02, f"inner: {inner_dev:.3e}"
    assert outer_dev <= 0.02, f"outer: {outer_dev:.3e}"
    cross = (
        runs[(2, "coupled")].d2 - runs[(2, "inner")].d2 - runs[(2, "outer")].d2
    )
    cross_dev = abs(cross - values.e_res) / abs(values.e_res)
    assert cross_dev <= 0.05, f"cross term: {cross_dev:.3e}"
    assert elapsed < 300.0, f"oracle runs took {elapsed:.1f} s"


def test_criterion_12_classifier_reproduction(saddle_witness_runs):
    harder = classify(SIGMA2, k_max=30)
    assert harder.classification is Classification.LOCAL_MAXIMUM

    params, verdict, runs = saddle_witness_runs
    assert verdict.classification is Classification.SADDLE
    positive_value = total_second_variation(
        verdict.witness_positive, params, SpectrumPath.ASSEMBLED
    )
    negative_value = total_second_variation(
        verdict.witness_negative, params, SpectrumPath.ASSEMBLED
    )
    assert positive_value > 0.0
    assert negative_value < 0.0
    for label, analytic in (("positive", positive_value), ("negative", negative_value)):
        d2 = runs[label].d2
        deviation = abs(d2 - analytic) / abs(analytic)
        assert deviation <= 0.05, f"{label} witness: deviation {deviation:.3e}"
        assert d2 * analytic > 0.0, f"{label} witness: sign disagreement"
