"""Closed-form probabilities for interrogation rounds.

Everything here is computed exactly from the amplitudes (no sampling except
where a quantity is defined over random arrays, and then only the array draw
is stochastic).  These values are the ground truth against which the sampled
paths are validated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .core import (
    CONSTRUCT_TOL,
    PhotonModeState,
    PixelArray,
    RoundDistribution,
    build_reference_state,
    overlap_probability,
    prepare_uniform_superposition,
    transmission_distribution,
)

__all__ = [
    "MisIdProfile",
    "exact_round_distribution",
    "exact_expected_absorptions_per_round",
    "exact_misidentification_probability",
    "exact_overlap_tail",
]


@dataclass(frozen=True)
class MisIdProfile:
    """Probability that, given survive-and-eigenvalue-0, the which-beam result
    lands on a non-defective pixel.  ``defects`` lists (index, alpha,
    alpha_actual) for the differing pixels."""

    n: int
    defects: tuple[tuple[int, complex, complex], ...]
    p_misid: float


def exact_round_distribution(
    theoretical: PixelArray,
    actual: PixelArray,
    active: Optional[Iterable[int]] = None,
) -> RoundDistribution:
    """Exact outcome probabilities of one round through ``actual`` with the
    reference built from ``theoretical``.

    With a uniform probe over the active pixels:
    ``p_absorb[i] = (1/k)(1 - |alpha'_i|^2)`` on the k active pixels,
    the survive-and-projection-1 mass is ``p_survive * overlap``, and the
    survive-and-projection-0 mass splits over beams as the squared amplitudes
    of the normalized component of the conditioned state orthogonal to the
    reference.  If the conditioned state matches the reference to within the
    1e-12 construction tolerance the projection-0 masses are exactly zero,
    mirroring the deterministic branch of ``measure_projection``.
    """
    if theoretical.n != actual.n:
        raise ValueError(f"dimension mismatch: {theoretical.n} != {actual.n}")
    n = actual.n
    if active is None:
        probe = prepare_uniform_superposition(n)
        reference = build_reference_state(theoretical)
    else:
        idx = np.array(sorted({int(i) for i in active}), dtype=int)
        if idx.size == 0:
            raise ValueError("active pixel set must not be empty")
        if idx[0] < 0 or idx[-1] >= n:
            raise ValueError(f"active pixel index out of range for n = {n}")
        amplitudes = np.zeros(n, dtype=np.complex128)
        amplitudes[idx] = 1.0
        probe = PhotonModeState(amplitudes)
        reference = build_reference_state(theoretical, idx)

    p_absorb, p_survive, conditioned = transmission_distribution(probe, actual)
    zeros = np.zeros(n)
    if conditioned is None:
        return RoundDistribution(p_absorb, 0.0, zeros)
    overlap = overlap_probability(conditioned, reference)
    if overlap >= 1.0 - CONSTRUCT_TOL:
        return RoundDistribution(p_absorb, p_survive, zeros)
    inner = np.vdot(reference.amplitudes, conditioned.amplitudes)
    residual = conditioned.amplitudes - inner * reference.amplitudes
    beam_weights = np.abs(residual) ** 2
    beam_weights = beam_weights / beam_weights.sum()
    return RoundDistribution(
        p_absorb, p_survive * overlap, p_survive * (1.0 - overlap) * beam_weights
    )


def exact_expected_absorptions_per_round(actual: PixelArray) -> float:
    """Expected absorptions of one uniform-probe pass: ``1 - mean(|alpha'_i|^2)``."""
    return float(1.0 - np.mean(actual.transmission_probs()))


def exact_misidentification_probability(
    theoretical: PixelArray, actual: PixelArray, defect_indices: Iterable[int]
) -> MisIdProfile:
    """Share of the projection-0 beam mass carried by non-defective pixels.

    Requires that ``defect_indices`` is exactly the set of differing pixels
    and that the projection-0 probability is nonzero (otherwise the
    conditional is undefined).
    """
    if theoretical.n != actual.n:
        raise ValueError(f"dimension mismatch: {theoretical.n} != {actual.n}")
    n = actual.n
    defects = sorted({int(i) for i in defect_indices})
    if any(i < 0 or i >= n for i in defects):
        raise ValueError(f"defect index out of range for n = {n}")
    differs = theoretical.transparencies != actual.transparencies
    if set(np.flatnonzero(differs)) != set(defects):
        raise ValueError("defect_indices must be exactly the pixels where the arrays differ")

    dist = exact_round_distribution(theoretical, actual)
    total = float(dist.p_survive_proj0_beam.sum())
    if total <= 0.0:
        raise ValueError("projection-0 probability is zero; the conditional is undefined")
    good = np.ones(n, dtype=bool)
    good[defects] = False
    p_misid = float(dist.p_survive_proj0_beam[good].sum() / total)
    triples = tuple(
        (i, complex(theoretical.transparencies[i]), complex(actual.transparencies[i]))
        for i in defects
    )
    return MisIdProfile(n=n, defects=triples, p_misid=min(max(p_misid, 0.0), 1.0))


def exact_overlap_tail(
    n: int, pattern: PixelArray, samples: int, rng: np.random.Generator
) -> float:
    """Fraction of random arrays whose conditioned output state has squared
    overlap with the pattern state strictly above ``1/sqrt(n)``.

    Arrays are drawn like ``sample_random_array`` (transparencies uniform on
    the complex unit disc); each overlap is then computed exactly, so the
    array draw is the only stochastic element.  The threshold comparison is
    strict, which pins the n = 1 boundary (overlap exactly 1) to fraction 0.
    """
    from .protocols import sample_random_array  # sibling module layered above

    if pattern.n != n:
        raise ValueError(f"pattern has {pattern.n} pixels, expected {n}")
    if samples < 1:
        raise ValueError("samples must be a positive integer")
    psi0 = build_reference_state(pattern).amplitudes
    threshold = 1.0 / math.sqrt(n)
    exceed = 0
    for _ in range(samples):
        draw = sample_random_array(n, rng).transparencies
        norm = float(np.linalg.norm(draw))
        if norm == 0.0:
            continue  # measure-zero: fully opaque draw has no conditioned state
        # Uniform probe: the conditioned state is proportional to the
        # transparencies themselves.
        overlap = min(float(abs(np.vdot(psi0, draw / norm)) ** 2), 1.0)
        if overlap > threshold:
            exceed += 1
    return exceed / samples
