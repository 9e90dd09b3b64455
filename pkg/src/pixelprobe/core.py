"""Single-photon probe states, the lossy pixel-array channel, and its measurements.

An array of N semi-transparent pixels acts on a one-photon probe as a
non-unitary channel: the component in beam i keeps amplitude ``a_i * alpha_i``
and is absorbed at pixel i with probability ``|a_i|^2 * (1 - |alpha_i|^2)``.
Pixel indices are 0-based everywhere.

States are stored normalized (the constructor absorbs any overall constant),
probabilities are pure functions of the amplitudes, and every sampling
operation consumes a caller-supplied ``numpy.random.Generator``, so all
randomness is owned by the caller and runs are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Union

import numpy as np

__all__ = [
    "CONSTRUCT_TOL",
    "NORM_TOL",
    "PixelArray",
    "PhotonModeState",
    "Absorbed",
    "Transmitted",
    "TransmissionOutcome",
    "RoundDistribution",
    "prepare_uniform_superposition",
    "build_reference_state",
    "transmission_distribution",
    "sample_transmission",
    "overlap_probability",
    "measure_projection",
    "measure_which_beam",
]

# Repo-wide tolerances: constructive checks (unit-disc bound, exact-overlap
# clamp) and allowed norm drift on stored states.
CONSTRUCT_TOL = 1e-12
NORM_TOL = 1e-9


def _as_complex_vector(values, label: str) -> np.ndarray:
    vec = np.array(values, dtype=np.complex128, copy=True)
    if vec.ndim != 1 or vec.size == 0:
        raise ValueError(f"{label} must be a nonempty one-dimensional sequence")
    if not np.all(np.isfinite(vec)):
        raise ValueError(f"{label} must contain only finite entries")
    return vec


@dataclass(frozen=True, eq=False)
class PixelArray:
    """Complex per-pixel transparencies; ``|alpha_i|^2`` is the probability
    that a photon in beam i is transmitted rather than absorbed."""

    transparencies: np.ndarray

    def __post_init__(self):
        vec = _as_complex_vector(self.transparencies, "transparencies")
        if np.any(np.abs(vec) > 1.0 + CONSTRUCT_TOL):
            worst = int(np.argmax(np.abs(vec)))
            raise ValueError(
                f"transparency magnitude exceeds 1 at pixel {worst} "
                f"(|alpha| = {abs(vec[worst]):.6g})"
            )
        vec.setflags(write=False)
        object.__setattr__(self, "transparencies", vec)

    @property
    def n(self) -> int:
        return self.transparencies.size

    def transmission_probs(self) -> np.ndarray:
        """``|alpha_i|^2`` clipped to [0, 1] (magnitudes may carry 1e-12 slack)."""
        return np.clip(np.abs(self.transparencies) ** 2, 0.0, 1.0)

    def absorption_probs(self) -> np.ndarray:
        """``1 - |alpha_i|^2``, the per-pixel absorption probability."""
        return 1.0 - self.transmission_probs()


@dataclass(frozen=True, eq=False)
class PhotonModeState:
    """Normalized complex amplitude vector of a single photon over N beams.

    The constructor divides out the input norm, so any overall normalization
    constant is absorbed; a zero vector is rejected.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        vec = _as_complex_vector(self.amplitudes, "amplitudes")
        norm = float(np.linalg.norm(vec))
        if norm <= 0.0 or not math.isfinite(norm):
            raise ValueError("state amplitudes must not all be zero")
        vec = vec / norm
        vec.setflags(write=False)
        object.__setattr__(self, "amplitudes", vec)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def beam_probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class Absorbed:
    """Photon absorbed at ``pixel_index`` (the pixel is left excited)."""

    pixel_index: int


@dataclass(frozen=True, eq=False)
class Transmitted:
    """Photon survived; ``state`` is the renormalized transmitted state."""

    state: PhotonModeState


TransmissionOutcome = Union[Absorbed, Transmitted]


@dataclass(frozen=True, eq=False)
class RoundDistribution:
    """Exact outcome probabilities of one interrogation round.

    One round is: prepare probe, pass through the array, check photon number,
    on survival project onto the reference state, and on eigenvalue 0 look at
    which beam holds the photon.  Outcomes are indexed by a flat code used by
    the samplers and the CLI: codes ``0..n-1`` = absorbed at pixel i, ``n`` =
    survived with projection eigenvalue 1, ``n+1+i`` = survived, eigenvalue 0,
    photon found in beam i.
    """

    p_absorb: np.ndarray
    p_survive_proj1: float
    p_survive_proj0_beam: np.ndarray

    def __post_init__(self):
        p_abs = np.array(self.p_absorb, dtype=float, copy=True)
        p_beam = np.array(self.p_survive_proj0_beam, dtype=float, copy=True)
        p1 = float(self.p_survive_proj1)
        if p_abs.ndim != 1 or p_beam.shape != p_abs.shape:
            raise ValueError("absorption and beam probability vectors must have equal length")
        entries = np.concatenate([p_abs, [p1], p_beam])
        if np.any(entries < -CONSTRUCT_TOL) or np.any(entries > 1.0 + CONSTRUCT_TOL):
            raise ValueError("round probabilities must lie in [0, 1]")
        total = float(entries.sum())
        if abs(total - 1.0) > NORM_TOL:
            raise ValueError(f"round probabilities sum to {total!r}, not 1")
        p_abs.setflags(write=False)
        p_beam.setflags(write=False)
        object.__setattr__(self, "p_absorb", p_abs)
        object.__setattr__(self, "p_survive_proj1", p1)
        object.__setattr__(self, "p_survive_proj0_beam", p_beam)

    @property
    def n(self) -> int:
        return self.p_absorb.size

    def total(self) -> float:
        return float(self.p_absorb.sum() + self.p_survive_proj1 + self.p_survive_proj0_beam.sum())

    def as_vector(self) -> np.ndarray:
        """Flat probability vector in outcome-code order (length 2n + 1)."""
        return np.concatenate(
            [self.p_absorb, [self.p_survive_proj1], self.p_survive_proj0_beam]
        )


def _check_same_dim(left: int, right: int) -> None:
    if left != right:
        raise ValueError(f"dimension mismatch: {left} != {right}")


def prepare_uniform_superposition(n: int) -> PhotonModeState:
    """Equal-weight probe: every beam amplitude is ``1/sqrt(n)``."""
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
        raise ValueError(f"number of beams must be a positive integer, got {n!r}")
    return PhotonModeState(np.full(int(n), 1.0 / math.sqrt(n), dtype=np.complex128))


def build_reference_state(
    array: PixelArray, active: Optional[Iterable[int]] = None
) -> PhotonModeState:
    """State with amplitudes proportional to the transparencies on the active
    pixels and zero elsewhere.

    This is the transmitted state the array would produce from a uniform probe
    if every active pixel took its listed transparency.  ``active=None`` means
    all pixels.  Raises if the restriction is identically zero (degenerate
    reference).
    """
    amplitudes = np.zeros(array.n, dtype=np.complex128)
    if active is None:
        idx = np.arange(array.n)
    else:
        idx = np.array(sorted({int(i) for i in active}), dtype=int)
        if idx.size == 0:
            raise ValueError("active pixel set must not be empty")
        if idx[0] < 0 or idx[-1] >= array.n:
            raise ValueError(f"active pixel index out of range for n = {array.n}")
    amplitudes[idx] = array.transparencies[idx]
    if not np.any(amplitudes):
        raise ValueError("degenerate reference: all active transparencies are zero")
    return PhotonModeState(amplitudes)


def transmission_distribution(
    state: PhotonModeState, array: PixelArray
) -> tuple[np.ndarray, float, Optional[PhotonModeState]]:
    """Exact absorb/survive statistics of one pass through the array.

    Returns ``(p_absorb, p_survive, conditioned)`` with
    ``p_absorb[i] = |a_i|^2 (1 - |alpha_i|^2)``,
    ``p_survive = sum_i |a_i alpha_i|^2``, and, when survival has nonzero
    probability, the renormalized transmitted state with amplitudes
    proportional to ``a_i alpha_i`` (otherwise None).
    """
    _check_same_dim(state.dim, array.n)
    beam = state.beam_probabilities()
    p_absorb = beam * array.absorption_probs()
    scaled = state.amplitudes * array.transparencies
    p_survive = float(np.sum(np.abs(scaled) ** 2))
    conditioned = PhotonModeState(scaled) if p_survive > 0.0 else None
    return p_absorb, p_survive, conditioned


def _draw_index(rng: np.random.Generator, weights: np.ndarray) -> int:
    """One categorical draw over nonnegative weights (single uniform consumed)."""
    edges = np.cumsum(weights)
    total = edges[-1]
    if not total > 0.0:
        raise ValueError("categorical weights must have positive total")
    k = int(np.searchsorted(edges, rng.random() * total, side="right"))
    return min(k, weights.size - 1)


def sample_transmission(
    state: PhotonModeState, array: PixelArray, rng: np.random.Generator
) -> TransmissionOutcome:
    """Draw one pass through the array.

    The absorb-at-pixel-i / transmit decision is a single categorical draw
    over the N+1 outcomes (one uniform consumed per pass), so runs are
    reproducible with one RNG consumption point.
    """
    p_absorb, p_survive, conditioned = transmission_distribution(state, array)
    edges = np.cumsum(p_absorb)
    total = edges[-1] + p_survive
    k = int(np.searchsorted(edges, rng.random() * total, side="right"))
    if k >= array.n:
        if conditioned is not None:
            return Transmitted(conditioned)
        k = int(np.argmax(p_absorb))  # rounding landed past a fully absorbing mass
    return Absorbed(k)


def overlap_probability(state: PhotonModeState, reference: PhotonModeState) -> float:
    """``|<reference|state>|^2``, clipped into [0, 1]; symmetric in its arguments."""
    _check_same_dim(state.dim, reference.dim)
    inner = np.vdot(reference.amplitudes, state.amplitudes)
    return min(float(abs(inner) ** 2), 1.0)


def measure_projection(
    state: PhotonModeState, reference: PhotonModeState, rng: np.random.Generator
) -> tuple[int, PhotonModeState]:
    """Von Neumann measurement of the projector onto ``reference``.

    Eigenvalue 1 occurs with probability ``overlap_probability(state,
    reference)`` and leaves the reference state; eigenvalue 0 leaves the
    normalized component of ``state`` orthogonal to the reference.  When the
    overlap is 1 within 1e-12 the result is deterministically eigenvalue 1
    (no RNG consumed): the orthogonal branch has probability zero and its
    post-state would be numerically meaningless.
    """
    p1 = overlap_probability(state, reference)
    if p1 >= 1.0 - CONSTRUCT_TOL:
        return 1, reference
    if rng.random() < p1:
        return 1, reference
    inner = np.vdot(reference.amplitudes, state.amplitudes)
    residual = state.amplitudes - inner * reference.amplitudes
    if float(np.linalg.norm(residual)) < CONSTRUCT_TOL:
        raise ValueError("projection residual is numerically zero; branch unreachable")
    return 0, PhotonModeState(residual)


def measure_which_beam(state: PhotonModeState, rng: np.random.Generator) -> int:
    """Project onto the beam basis: returns i with probability ``|a_i|^2``."""
    return _draw_index(rng, state.beam_probabilities())
