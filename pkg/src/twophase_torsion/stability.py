"""Stability classification of the concentric configuration.

The classification scans the assembled second-variation spectrum over
degrees 1..k_max under the volume and barycenter constraints (outer degree-1
modes excluded) and reports:

    LocalMaximum        every admissible direction strictly negative,
    Saddle              strictly positive and strictly negative directions,
    NeutralSinglePhase  sigma = 1: the inner spectrum vanishes identically,
                        so inner directions are second-order neutral.

A LocalMaximum verdict is a finite certificate: degrees 1..k_max checked
directly, degrees beyond covered by the strict decrease of the spectrum in
the degree.  The verdict records k_max for that reason.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from .params import (
    Constraint,
    ModeIndex,
    PerturbationSpec,
    ProblemParams,
    validate,
)
from .second_variation import (
    SpectrumPath,
    assemble_spectrum,
    resonance_analysis,
    total_second_variation,
)
from .tolerances import ABS_FLOOR


class Channel(enum.Enum):
    INNER_ALONE = "InnerAlone"
    OUTER_ALONE = "OuterAlone"
    COUPLED = "Coupled"


class Classification(enum.Enum):
    LOCAL_MAXIMUM = "LocalMaximum"
    SADDLE = "Saddle"
    NEUTRAL_SINGLE_PHASE = "NeutralSinglePhase"


@dataclass(frozen=True)
class StabilityVerdict:
    """Classification plus the evidence: positive modes, witnesses, spectrum."""

    classification: Classification
    k_max: int
    positive_modes: tuple[tuple[int, Channel], ...]
    witness_positive: Optional[PerturbationSpec]
    witness_negative: Optional[PerturbationSpec]
    mode_table: tuple[tuple[int, float, float, float, float], ...]
    note: str = ""

    def to_document(self) -> dict:
        """JSON-style document: classification, scanned range, witnesses,
        per-mode table."""

        def spec_doc(spec: Optional[PerturbationSpec]):
            if spec is None:
                return None
            return {
                "allow_mean": spec.allow_mean,
                "modes": [
                    {
                        "degree": index.degree,
                        "order": index.order,
                        "alpha_in": alpha_in,
                        "alpha_out": alpha_out,
                    }
                    for index, (alpha_in, alpha_out) in spec.sorted_items()
                ],
            }

        return {
            "classification": self.classification.value,
            "scanned_degrees": [1, self.k_max],
            "positive_modes": [
                {"degree": degree, "channel": channel.value}
                for degree, channel in self.positive_modes
            ],
            "witness_positive": spec_doc(self.witness_positive),
            "witness_negative": spec_doc(self.witness_negative),
            "mode_table": [
                {
                    "degree": degree,
                    "e_in": e_in,
                    "e_out": e_out,
                    "e_res": e_res,
                    "delta": delta,
                }
                for degree, e_in, e_out, e_res, delta in self.mode_table
            ],
            "note": self.note,
        }


def _coupled_supremum_positive(e_in: float, e_res: float, e_out: float) -> bool:
    """Whether Q(t) = e_in t^2 + e_res t + e_out attains values > ABS_FLOOR."""
    if e_in > ABS_FLOOR:
        return True
    if abs(e_in) <= ABS_FLOOR:
        return abs(e_res) > ABS_FLOOR or e_out > ABS_FLOOR
    vertex_value = e_out - e_res * e_res / (4.0 * e_in)
    return vertex_value > ABS_FLOOR


def positive_mode_set(
    params: ProblemParams, k_max: int
) -> list[tuple[int, Channel]]:
    """All (degree, channel) with strictly positive assembled second variation,
    restricted to barycenter-admissible channels (no outer degree-1)."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    positive: list[tuple[int, Channel]] = []
    for degree in range(1, k_max + 1):
        values = assemble_spectrum(params, degree)
        if values.e_in > ABS_FLOOR:
            positive.append((degree, Channel.INNER_ALONE))
        if degree >= 2:
            if values.e_out > ABS_FLOOR:
                positive.append((degree, Channel.OUTER_ALONE))
            if _coupled_supremum_positive(values.e_in, values.e_res, values.e_out):
                positive.append((degree, Channel.COUPLED))
    return positive


def _unit_spec(degree: int, channel: Channel) -> PerturbationSpec:
    alpha = {
        Channel.INNER_ALONE: (1.0, 0.0),
        Channel.OUTER_ALONE: (0.0, 1.0),
        Channel.COUPLED: (1.0, 1.0),
    }[channel]
    return PerturbationSpec(modes={ModeIndex(degree, 1): alpha})


def _negative_witness(params: ProblemParams, k_max: int) -> Optional[PerturbationSpec]:
    """Smallest degree with a strictly negative channel, preferring inner."""
    for degree in range(1, k_max + 1):
        values = assemble_spectrum(params, degree)
        if values.e_in < -ABS_FLOOR:
            return _unit_spec(degree, Channel.INNER_ALONE)
        if degree >= 2 and values.e_out < -ABS_FLOOR:
            return _unit_spec(degree, Channel.OUTER_ALONE)
    return None


def classify(params: ProblemParams, k_max: int) -> StabilityVerdict:
    """Classify the concentric configuration from the assembled spectrum.

    The verdict is derived from the computed spectrum, not from the sign of
    sigma - 1: for sigma > 1 the per-mode negativity (including coupled modes
    via the resonance discriminant) is checked degree by degree, and for
    sigma < 1 the degree-1 inner channel supplies the positive witness.
    """
    if k_max < 2:
        raise ValueError("k_max must be >= 2")

    mode_table = []
    for degree in range(1, k_max + 1):
        values = assemble_spectrum(params, degree)
        analysis = resonance_analysis(params, degree, SpectrumPath.ASSEMBLED)
        mode_table.append(
            (degree, values.e_in, values.e_out, values.e_res, analysis.discriminant)
        )

    positive = tuple(positive_mode_set(params, k_max))
    witness_negative = _negative_witness(params, k_max)
    note = ""

    if params.sigma == 1.0:
        classification = Classification.NEUTRAL_SINGLE_PHASE
        witness_positive = None
        if witness_negative is None:
            witness_negative = _unit_spec(2, Channel.OUTER_ALONE)
        note = (
            "single-phase case: the inner spectrum vanishes identically, so "
            "inner perturbations are second-order neutral; outer modes of "
            "degree >= 2 are strictly negative"
        )
    elif positive:
        classification = Classification.SADDLE
        degree, channel = positive[0]
        witness_positive = _unit_spec(degree, channel)
    else:
        classification = Classification.LOCAL_MAXIMUM
        witness_positive = None

    for witness in (witness_positive, witness_negative):
        if witness is not None:
            verdict = validate(witness, Constraint.VOLUME_AND_BARYCENTER)
            if not verdict.ok:
                raise AssertionError("witness must satisfy both constraints")

    if classification is Classification.SADDLE:
        positive_value = total_second_variation(
            witness_positive, params, SpectrumPath.ASSEMBLED
        )
        negative_value = total_second_variation(
            witness_negative, params, SpectrumPath.ASSEMBLED
        )
        if not (positive_value > 0.0 and negative_value < 0.0):
            raise AssertionError("saddle witnesses must have opposite signs")

    return StabilityVerdict(
        classification=classification,
        k_max=k_max,
        positive_modes=positive,
        witness_positive=witness_positive,
        witness_negative=witness_negative,
        mode_table=tuple(mode_table),
        note=note,
    )
