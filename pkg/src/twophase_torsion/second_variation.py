"""First and second shape variation of the energy on the concentric balls.

The second variation diagonalizes over spherical-harmonic degrees: for a
perturbation with normal traces sum alpha_in Y_{k,i} on the interface and
sum alpha_out Y_{k,i} on the outer boundary,

    E''(Phi) = sum_{k,i} { alpha_in^2 e_in(k) + alpha_out^2 e_out(k)
                           + alpha_in alpha_out e_res(k) }.

Two computation paths are provided.  The Assembled path reduces the
boundary-integral formula for E'' per mode using oracle-validated profiles:

    E'' = +2 int_{|x|=1} grad u . grad u' (h.n) + 2 int_{|x|=1} d_n u d_nn u (h.n)^2
          -2 int_{|x|=R} [sigma grad u . grad u'] (h.n)
          -2 int_{|x|=R} sigma d_n u_- [d_nn u] (h.n)^2,

with u radial, so grad u . grad u' = (d_r u)(d_r u') on each sphere, and the
surface integrals of Y^2 contributing R^{N-1} at the interface and 1 at the
boundary.  The PrintedFormula path evaluates the closed-form spectrum
verbatim.  The two paths are compared in the fidelity report; downstream
classification consumes the Assembled path, which is the one that is
self-consistent (translation invariance e_in(1) = e_out(1)) and confirmed by
the PDE oracle.

Also provided: the resonance quadratic Q(t) = e_in t^2 + e_res t + e_out with
its discriminant and factored form, the proof functions a, b, c certifying
monotone decrease of the spectrum, and the first variation.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass

from .exact_state import sphere_area, traces
from .params import ModeIndex, PerturbationSpec, ProblemParams
from .transmission import ModeKind, denom_F, solve_mode_oracle


class SpectrumPath(enum.Enum):
    ASSEMBLED = "Assembled"
    PRINTED = "PrintedFormula"


@dataclass(frozen=True)
class SecondVariationSpectrum:
    """Per-degree quadratic-form coefficients of the second variation."""

    degree: int
    e_in: float
    e_out: float
    e_res: float
    source: SpectrumPath


@functools.lru_cache(maxsize=None)
def assemble_spectrum(params: ProblemParams, degree: int) -> SecondVariationSpectrum:
    """Assemble e_in, e_out, e_res from the boundary-integral formula.

    With w the radial profile of the mode (from the transmission solve) and
    Dw' := w'_+(R) - w'_-(R) the derivative jump at the interface:

        e_in  = (2 R^N / N) Dw'_in  + 2 R^N (1-sigma) / (N^2 sigma)
        e_out = -(2/N) w'_out(1) + 2/N^2
        e_res = -(2/N) w'_in(1)  + (2 R^N / N) Dw'_out

    Cached per (params, degree); the cache only memoizes a pure function.
    """
    if degree < 1:
        raise ValueError("degree must be >= 1")
    n, radius, sigma = params.dim, params.core_radius, params.sigma
    inner = solve_mode_oracle(params, degree, ModeKind.INNER)
    outer = solve_mode_oracle(params, degree, ModeKind.OUTER)

    jump_in = inner.outer_derivative(params, radius) - inner.inner_derivative(
        params, radius
    )
    jump_out = outer.outer_derivative(params, radius) - outer.inner_derivative(
        params, radius
    )
    r_pow = radius**n

    e_in = (2.0 * r_pow / n) * jump_in + 2.0 * r_pow * (1.0 - sigma) / (
        n * n * sigma
    )
    e_out = -(2.0 / n) * outer.outer_derivative(params, 1.0) + 2.0 / (n * n)
    e_res = -(2.0 / n) * inner.outer_derivative(params, 1.0) + (
        2.0 * r_pow / n
    ) * jump_out
    return SecondVariationSpectrum(
        degree=degree, e_in=e_in, e_out=e_out, e_res=e_res, source=SpectrumPath.ASSEMBLED
    )


def printed_spectrum(params: ProblemParams, degree: int) -> SecondVariationSpectrum:
    """Evaluate the closed-form spectrum expressions verbatim.

    Reference values for the fidelity report; see assemble_spectrum for the
    path consumed downstream.
    """
    if degree < 1:
        raise ValueError("degree must be >= 1")
    n, radius, sigma = params.dim, params.core_radius, params.sigma
    k = degree
    f_denom = denom_F(params, k)
    rho = radius ** (2 - n - 2 * k)

    e_in = (
        (2.0 * radius**n / n)
        * ((1.0 - sigma) / sigma)
        * (f_denom - k * (k * (1.0 - sigma) + (n - 2 + k) * (1.0 - sigma) * rho))
        / f_denom
    )
    e_out = (
        (2.0 / n)
        * (f_denom - k * ((-n + 2 - k) * (1.0 - sigma) + (n - 2 + k + k * sigma) * rho))
        / f_denom
    )
    e_res = (
        (4.0 * (sigma - 1.0) * radius ** (1 - k) / n)
        * ((n - 2) * k + 2 * k * k)
        / f_denom
    )
    return SecondVariationSpectrum(
        degree=degree, e_in=e_in, e_out=e_out, e_res=e_res, source=SpectrumPath.PRINTED
    )


def spectrum(
    params: ProblemParams, degree: int, path: SpectrumPath
) -> SecondVariationSpectrum:
    if path is SpectrumPath.ASSEMBLED:
        return assemble_spectrum(params, degree)
    return printed_spectrum(params, degree)


def total_second_variation(
    spec: PerturbationSpec, params: ProblemParams, path: SpectrumPath
) -> float:
    """Quadratic form E''(Phi) summed over the modes stored in the spec."""
    total = 0.0
    for index, (alpha_in, alpha_out) in spec.sorted_items():
        if index.degree == 0:
            raise ValueError(
                "degree-0 modes are not volume preserving; the second "
                "variation is defined on volume-preserving perturbations"
            )
        index.check_order(params.dim)
        values = spectrum(params, index.degree, path)
        total += (
            alpha_in * alpha_in * values.e_in
            + alpha_out * alpha_out * values.e_out
            + alpha_in * alpha_out * values.e_res
        )
    return total


@dataclass(frozen=True)
class ResonanceAnalysis:
    """The coupled-mode quadratic Q(t) = e_in t^2 + e_res t + e_out.

    t is the ratio alpha_in/alpha_out of same-mode coefficients.  The
    discriminant field is q_linear^2 - 4 q_leading q_constant; the factored
    field evaluates the closed-form factorization of the discriminant, which
    tracks the assembled-path discriminant.
    """

    degree: int
    q_leading: float
    q_linear: float
    q_constant: float
    discriminant: float
    g_factor: float
    discriminant_factored: float

    def q_value(self, t: float) -> float:
        return self.q_leading * t * t + self.q_linear * t + self.q_constant


def g_factor(params: ProblemParams, degree: int) -> float:
    """G = (sigma-1) k (N-1+k)(R^{2-N-2k} - 1) + (N-2+2k) R^{2-N-2k}."""
    n, radius, sigma = params.dim, params.core_radius, params.sigma
    k = degree
    rho = radius ** (2 - n - 2 * k)
    return (sigma - 1.0) * k * (n - 1 + k) * (rho - 1.0) + (n - 2 + 2 * k) * rho


def factored_discriminant(params: ProblemParams, degree: int) -> float:
    """Closed-form factorization of the discriminant of Q:

    Delta = -16 (sigma-1)(k-1) R^N / (sigma N^2 F^2)
            * (sigma k (R^{2-N-2k} - 1) + (N-2+k) R^{2-N-2k} + k) * G.
    """
    n, radius, sigma = params.dim, params.core_radius, params.sigma
    k = degree
    rho = radius ** (2 - n - 2 * k)
    f_denom = denom_F(params, k)
    bracket = sigma * k * (rho - 1.0) + (n - 2 + k) * rho + k
    prefactor = -16.0 * (sigma - 1.0) * (k - 1) * radius**n / (
        sigma * n * n * f_denom * f_denom
    )
    return prefactor * bracket * g_factor(params, degree)


def resonance_analysis(
    params: ProblemParams, degree: int, path: SpectrumPath
) -> ResonanceAnalysis:
    """Q coefficients, discriminant (direct and factored), and G for degree k."""
    if degree < 1:
        raise ValueError("degree must be >= 1")
    values = spectrum(params, degree, path)
    discriminant = values.e_res * values.e_res - 4.0 * values.e_in * values.e_out
    return ResonanceAnalysis(
        degree=degree,
        q_leading=values.e_in,
        q_linear=values.e_res,
        q_constant=values.e_out,
        discriminant=discriminant,
        g_factor=g_factor(params, degree),
        discriminant_factored=factored_discriminant(params, degree),
    )


def monotonicity_functions(
    params: ProblemParams, x: float
) -> tuple[float, float, float]:
    """The proof functions a, b, c certifying strict decrease of the spectrum.

    With L = 1/R, lambda = log L, M = N-2, P = L^{2x+M}:

        a(x) = x^2 P^{-1} + M(2x+M) - (x+M)^2 P - 2 lambda (2x^3 + 3Mx^2 + M^2 x)
        b(x) = -2x^2 P^{-1} - M(2x+M) - 2(Mx + x^2) P + 2 lambda M (Mx + 2x^2)
        c(x) = P^{-1} - P + 2 lambda (M + 2x)

    All three are strictly negative for x > 0, which forces the spectrum to
    decrease in the degree.
    """
    if not x > 0.0:
        raise ValueError("x must be positive")
    big_l = 1.0 / params.core_radius
    lam = math.log(big_l)
    m = params.dim - 2
    p = big_l ** (2.0 * x + m)
    a = (
        x * x / p
        + m * (2.0 * x + m)
        - (x + m) ** 2 * p
        - 2.0 * lam * (2.0 * x**3 + 3.0 * m * x * x + m * m * x)
    )
    b = (
        -2.0 * x * x / p
        - m * (2.0 * x + m)
        - 2.0 * (m * x + x * x) * p
        + 2.0 * lam * m * (m * x + 2.0 * x * x)
    )
    c = 1.0 / p - p + 2.0 * lam * (m + 2.0 * x)
    return a, b, c


def first_variation(spec: PerturbationSpec, params: ProblemParams) -> float:
    """First variation of the energy.

    E'(Phi) = -int_{|x|=R} [sigma |grad u|^2] h_in.n + int_{|x|=1} |grad u|^2 h_out.n.

    Both bracketed quantities are constant on their spheres, so only the mean
    (degree-0) coefficients survive:

        E' = -jump_sigma_gradsq * R^{N-1} * sqrt(omega) * alpha_in[0]
             + (1/N^2) * sqrt(omega) * alpha_out[0],

    with omega the unit-sphere area (the sqrt comes from integrating the
    normalized constant harmonic).  Zero for volume-preserving perturbations.
    """
    n = params.dim
    omega = sphere_area(n)
    state = traces(params)
    alpha_in0, alpha_out0 = spec.coefficients(ModeIndex(0, 1))
    inner_term = (
        -state.jump_sigma_gradsq
        * params.core_radius ** (n - 1)
        * math.sqrt(omega)
        * alpha_in0
    )
    outer_term = (1.0 / (n * n)) * math.sqrt(omega) * alpha_out0
    return inner_term + outer_term
