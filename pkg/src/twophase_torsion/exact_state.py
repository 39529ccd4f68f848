"""The explicit unperturbed state and its derived quantities.

On the concentric configuration the state function solving
-div(sigma grad u) = 1 with zero boundary data is radial:

    u(r) = (1 - R^2)/(2N) + (R^2 - r^2)/(2N sigma)   for r <= R,
    u(r) = (1 - r^2)/(2N)                            for R < r <= 1.

Everything downstream (interface traces, jumps, curvatures, baseline energy)
is an elementary function of (N, R, sigma) and is kept in closed form here;
quadrature lives only in the PDE oracle so the two paths stay independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .params import ProblemParams


def sphere_area(dim: int) -> float:
    """Surface area of the unit sphere S^{N-1}: 2 pi^{N/2} / Gamma(N/2)."""
    if dim < 2:
        raise ValueError("dim must be >= 2")
    if dim == 2:
        return 2.0 * math.pi
    if dim == 3:
        return 4.0 * math.pi
    return 2.0 * math.pi ** (dim / 2.0) / math.gamma(dim / 2.0)


def u_value(params: ProblemParams, r: float) -> float:
    """Evaluate the radial state function; continuous at r = R."""
    if not 0.0 <= r <= 1.0:
        raise ValueError("r must lie in [0,1]")
    n, radius, sigma = params.dim, params.core_radius, params.sigma
    outer = (1.0 - radius * radius) / (2.0 * n)
    if r <= radius:
        return outer + (radius * radius - r * r) / (2.0 * n * sigma)
    return (1.0 - r * r) / (2.0 * n)


@dataclass(frozen=True)
class StateTraces:
    """Normal derivatives, jumps, and curvatures of u on the two spheres.

    Jump convention [f] := f_+ - f_- (outside minus inside).
    """

    dn_u_inner_interface: float
    dn_u_outer_interface: float
    dn_u_boundary: float
    dnn_u_inner: float
    dnn_u_outer: float
    dnn_u_boundary: float
    jump_dn: float
    jump_sigma_gradsq: float
    curvature_interface: float
    curvature_boundary: float


def traces(params: ProblemParams) -> StateTraces:
    """Interface and boundary traces of u, differentiated in closed form."""
    n, radius, sigma = params.dim, params.core_radius, params.sigma
    dn_inner = -radius / (n * sigma)
    dn_outer = -radius / n
    return StateTraces(
        dn_u_inner_interface=dn_inner,
        dn_u_outer_interface=dn_outer,
        dn_u_boundary=-1.0 / n,
        dnn_u_inner=-1.0 / (n * sigma),
        dnn_u_outer=-1.0 / n,
        dnn_u_boundary=-1.0 / n,
        jump_dn=radius * (1.0 - sigma) / (n * sigma),
        jump_sigma_gradsq=radius * radius * (sigma - 1.0) / (n * n * sigma),
        curvature_interface=(n - 1.0) / radius,
        curvature_boundary=float(n - 1),
    )


def baseline_energy(params: ProblemParams) -> float:
    """Energy of the concentric configuration.

    E = integral of sigma |grad u|^2 = omega_{N-1}/(N^2 (N+2)) *
        (1 - R^{N+2} + R^{N+2}/sigma).
    """
    n, radius, sigma = params.dim, params.core_radius, params.sigma
    r_pow = radius ** (n + 2)
    return sphere_area(n) / (n * n * (n + 2)) * (1.0 - r_pow + r_pow / sigma)
