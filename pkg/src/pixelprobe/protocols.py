"""Interrogation protocols: quantum defect testing and rare-pattern search,
each with a classical photon-counting baseline and full absorption accounting.

All protocol executions are pure functions of (inputs, rng): they never seed
themselves, and a report is a plain value.  Absorption counts are the cost
metric throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from .core import (
    Absorbed,
    PhotonModeState,
    PixelArray,
    _draw_index,
    build_reference_state,
    measure_projection,
    measure_which_beam,
    prepare_uniform_superposition,
    sample_transmission,
)
from .oracle import exact_round_distribution

__all__ = [
    "PATTERN_PRESENT",
    "PATTERN_ABSENT",
    "DefectScenario",
    "DefectTestConfig",
    "DefectTestReport",
    "RareSearchConfig",
    "RareSearchReport",
    "required_rounds_quantum",
    "validate_defect_inputs",
    "quantum_defect_test",
    "classical_intensity_margin",
    "classical_shots_per_pixel",
    "classical_defect_test",
    "required_successes",
    "required_successes_base_n",
    "quantum_rare_search",
    "classical_pixel_budget",
    "classical_rare_search",
    "sample_random_array",
    "sample_round_codes",
]

PATTERN_PRESENT = "pattern_present"
PATTERN_ABSENT = "pattern_absent"

# Problem sizes above this (round budget x pixels) switch the defect test to
# the blocked sampler; below it the literal per-round loop is just as fast.
_AUTO_BLOCKED_THRESHOLD = 100_000


def _uniform_disc(rng: np.random.Generator, shape) -> np.ndarray:
    """i.i.d. complex values uniform on the unit disc: radius sqrt(u), angle
    uniform on [0, 2*pi)."""
    radius = np.sqrt(rng.random(shape))
    angle = 2.0 * math.pi * rng.random(shape)
    return radius * np.exp(1j * angle)


def sample_random_array(n: int, rng: np.random.Generator) -> PixelArray:
    """Array with transparencies drawn independently and uniformly on the
    complex unit disc."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    return PixelArray(_uniform_disc(rng, int(n)))


@dataclass(frozen=True, eq=False)
class DefectScenario:
    """Ground truth for one defect experiment: the assumed transparencies, the
    actual ones, and which pixels differ (used only for scoring)."""

    theoretical: PixelArray
    actual: PixelArray
    defect_indices: frozenset[int]

    def __post_init__(self):
        if self.theoretical.n != self.actual.n:
            raise ValueError(
                f"dimension mismatch: {self.theoretical.n} != {self.actual.n}"
            )
        indices = frozenset(int(i) for i in self.defect_indices)
        if any(i < 0 or i >= self.n for i in indices):
            raise ValueError(f"defect index out of range for n = {self.n}")
        object.__setattr__(self, "defect_indices", indices)
        untouched = np.ones(self.n, dtype=bool)
        untouched[list(indices)] = False
        if not np.array_equal(
            self.theoretical.transparencies[untouched],
            self.actual.transparencies[untouched],
        ):
            raise ValueError("non-defect pixels must keep their theoretical transparency")

    @property
    def n(self) -> int:
        return self.theoretical.n

    @classmethod
    def from_defects(
        cls, theoretical: PixelArray, defects: Mapping[int, complex]
    ) -> "DefectScenario":
        """Build the actual array by overwriting the listed pixels."""
        values = theoretical.transparencies.copy()
        for index, value in defects.items():
            i = int(index)
            if i < 0 or i >= theoretical.n:
                raise ValueError(f"defect index {i} out of range for n = {theoretical.n}")
            values[i] = complex(value)
        return cls(theoretical, PixelArray(values), frozenset(int(i) for i in defects))


@dataclass(frozen=True)
class DefectTestConfig:
    """Statistical parameters of a defect test.

    ``epsilon`` is the minimum amplitude distance of a defect, ``delta`` the
    allowed failure probability, ``max_defects`` the promised bound on the
    number of altered pixels.  ``round_constant_cq`` scales the quantum round
    budget, ``id_confirmations`` is how many which-beam hits a pixel needs
    before it is declared defective and excluded, and ``calibration_error``
    bounds the error of the assumed theoretical transparencies.
    """

    epsilon: float
    delta: float
    max_defects: int
    round_constant_cq: float = 4.0
    id_confirmations: int = 1
    calibration_error: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.epsilon <= 2.0):
            raise ValueError(f"epsilon must lie in (0, 2], got {self.epsilon!r}")
        if not (0.0 < self.delta < 1.0):
            raise ValueError(f"delta must lie in (0, 1), got {self.delta!r}")
        if not isinstance(self.max_defects, (int, np.integer)) or self.max_defects < 0:
            raise ValueError(f"max_defects must be a nonnegative integer, got {self.max_defects!r}")
        if not self.round_constant_cq > 0.0:
            raise ValueError("round_constant_cq must be positive")
        if not isinstance(self.id_confirmations, (int, np.integer)) or self.id_confirmations < 1:
            raise ValueError("id_confirmations must be a positive integer")
        if self.calibration_error < 0.0:
            raise ValueError("calibration_error must be nonnegative")


@dataclass(frozen=True)
class DefectTestReport:
    defect_found: bool
    identified_pixels: tuple[int, ...]
    rounds_used: int
    photons_absorbed: int
    per_pixel_absorptions: tuple[int, ...]

    def __post_init__(self):
        if self.photons_absorbed != sum(self.per_pixel_absorptions):
            raise ValueError("photons_absorbed must equal the per-pixel total")
        if self.photons_absorbed > self.rounds_used:
            raise ValueError("each round absorbs at most one photon")


def required_rounds_quantum(n: int, epsilon: float, delta: float, cq: float = 4.0) -> int:
    """Round budget ``ceil(cq * n * epsilon^-2 * ln(1/delta))``.

    ``delta = 1`` is accepted as the degenerate boundary (no confidence asked,
    zero rounds).
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    if not (0.0 < epsilon <= 2.0):
        raise ValueError(f"epsilon must lie in (0, 2], got {epsilon!r}")
    if not (0.0 < delta <= 1.0):
        raise ValueError(f"delta must lie in (0, 1], got {delta!r}")
    if not cq > 0.0:
        raise ValueError("cq must be positive")
    return math.ceil(cq * n * math.log(1.0 / delta) / (epsilon * epsilon))


def validate_defect_inputs(scenario: DefectScenario, config: DefectTestConfig) -> None:
    """Check that a scenario is admissible under a config: defect count within
    ``max_defects``, every defect at amplitude distance >= epsilon, and the
    calibration error small against ``max_defects * epsilon / n``."""
    if len(scenario.defect_indices) > config.max_defects:
        raise ValueError(
            f"scenario has {len(scenario.defect_indices)} defects, "
            f"config allows at most {config.max_defects}"
        )
    for i in sorted(scenario.defect_indices):
        gap = abs(scenario.actual.transparencies[i] - scenario.theoretical.transparencies[i])
        if gap < config.epsilon - 1e-12:
            raise ValueError(
                f"pixel {i}: |alpha' - alpha| = {gap:.6g} is below epsilon = {config.epsilon:.6g}"
            )
    if config.max_defects >= 1:
        bound = config.max_defects * config.epsilon / (10.0 * scenario.n)
        if config.calibration_error > bound + 1e-15:
            raise ValueError(
                f"calibration_error = {config.calibration_error:.6g} exceeds the "
                f"admissible bound max_defects*epsilon/(10n) = {bound:.6g}"
            )


def _assumed_theoretical(
    theoretical: PixelArray, calibration_error: float, rng: np.random.Generator
) -> PixelArray:
    """Theoretical transparencies as the tester believes them: exact when the
    calibration error is zero, otherwise perturbed once per run by offsets
    uniform in the disc of radius ``calibration_error`` (clipped back into the
    unit disc)."""
    if calibration_error == 0.0:
        return theoretical
    perturbed = theoretical.transparencies + calibration_error * _uniform_disc(
        rng, theoretical.n
    )
    magnitudes = np.abs(perturbed)
    over = magnitudes > 1.0
    if np.any(over):
        perturbed[over] = perturbed[over] / magnitudes[over]
    return PixelArray(perturbed)


def _uniform_over(active: np.ndarray) -> PhotonModeState:
    k = int(active.sum())
    amplitudes = np.where(active, 1.0 / math.sqrt(k), 0.0).astype(np.complex128)
    return PhotonModeState(amplitudes)


def quantum_defect_test(
    scenario: DefectScenario,
    config: DefectTestConfig,
    rng: np.random.Generator,
    *,
    method: str = "auto",
) -> DefectTestReport:
    """Superposition-probe defect test with which-beam identification.

    Each round prepares a uniform superposition over the not-yet-excluded
    pixels and sends it through the actual array.  An absorbed photon ends the
    round (counted per pixel).  A transmitted photon is projected onto the
    reference state built from the assumed theoretical transparencies of the
    active pixels; eigenvalue 0 proves some transparency is off, so the
    which-beam measurement is applied and the hit pixel accumulates one
    identification.  A pixel reaching ``id_confirmations`` hits is appended to
    the identified list and excluded (probe and reference are rebuilt over the
    remaining pixels).  The run stops when the round budget is spent, when
    ``max_defects`` pixels have been identified (for max_defects >= 1), or
    when every pixel has been excluded.

    ``method`` selects the sampler: "rounds" draws every round one by one;
    "blocked" draws the gap to the next eigenvalue-0 event geometrically and
    allocates the intervening rounds with one multinomial per segment, which
    is distribution-identical and much faster for large budgets.  "auto"
    switches on problem size.  The two methods consume the RNG differently,
    so per-seed outputs differ while statistics agree.
    """
    validate_defect_inputs(scenario, config)
    budget = required_rounds_quantum(
        scenario.n, config.epsilon, config.delta, config.round_constant_cq
    )
    assumed = _assumed_theoretical(scenario.theoretical, config.calibration_error, rng)
    if method == "auto":
        method = "blocked" if budget * scenario.n > _AUTO_BLOCKED_THRESHOLD else "rounds"
    if method == "rounds":
        return _defect_test_rounds(assumed, scenario.actual, config, budget, rng)
    if method == "blocked":
        return _defect_test_blocked(assumed, scenario.actual, config, budget, rng)
    raise ValueError(f"unknown method {method!r}; expected 'auto', 'rounds' or 'blocked'")


def _defect_test_rounds(
    assumed: PixelArray,
    actual: PixelArray,
    config: DefectTestConfig,
    budget: int,
    rng: np.random.Generator,
) -> DefectTestReport:
    n = actual.n
    active = np.ones(n, dtype=bool)
    id_hits = np.zeros(n, dtype=np.int64)
    absorptions = np.zeros(n, dtype=np.int64)
    identified: list[int] = []
    defect_found = False
    rounds_used = 0
    probe = prepare_uniform_superposition(n)
    reference = build_reference_state(assumed)

    for _ in range(budget):
        if config.max_defects > 0 and len(identified) >= config.max_defects:
            break
        rounds_used += 1
        outcome = sample_transmission(probe, actual, rng)
        if isinstance(outcome, Absorbed):
            absorptions[outcome.pixel_index] += 1
            continue
        eigenvalue, post = measure_projection(outcome.state, reference, rng)
        if eigenvalue == 1:
            continue
        defect_found = True
        beam = measure_which_beam(post, rng)
        id_hits[beam] += 1
        if (
            config.max_defects > 0
            and id_hits[beam] >= config.id_confirmations
            and beam not in identified
        ):
            identified.append(beam)
            active[beam] = False
            if not active.any():
                break
            probe = _uniform_over(active)
            reference = build_reference_state(assumed, np.flatnonzero(active))

    return DefectTestReport(
        defect_found=defect_found,
        identified_pixels=tuple(identified),
        rounds_used=rounds_used,
        photons_absorbed=int(absorptions.sum()),
        per_pixel_absorptions=tuple(int(x) for x in absorptions),
    )


def _defect_test_blocked(
    assumed: PixelArray,
    actual: PixelArray,
    config: DefectTestConfig,
    budget: int,
    rng: np.random.Generator,
) -> DefectTestReport:
    # Rounds between eigenvalue-0 events are i.i.d. over a fixed distribution,
    # so each segment is sampled exactly as: geometric gap to the next event,
    # multinomial split of the intervening rounds over absorb/projection-1.
    n = actual.n
    active = np.ones(n, dtype=bool)
    id_hits = np.zeros(n, dtype=np.int64)
    absorptions = np.zeros(n, dtype=np.int64)
    identified: list[int] = []
    defect_found = False
    rounds_used = 0
    rounds_left = budget

    while rounds_left > 0:
        if config.max_defects > 0 and len(identified) >= config.max_defects:
            break
        if not active.any():
            break
        dist = exact_round_distribution(assumed, actual, active=np.flatnonzero(active))
        q0 = float(dist.p_survive_proj0_beam.sum())
        clean = np.append(dist.p_absorb, dist.p_survive_proj1)
        clean_pvals = clean / clean.sum()

        if q0 > 0.0:
            # Geometric by inversion: robust for q0 anywhere in (0, 1]; the
            # ratio may overflow for subnormal q0, which just means the event
            # falls far beyond the remaining budget.
            log_ratio = math.log(1.0 - rng.random()) / math.log1p(-q0)
            gap = rounds_left + 1 if log_ratio >= rounds_left else math.floor(log_ratio) + 1
        else:
            gap = rounds_left + 1  # eigenvalue 0 never occurs in this segment

        if gap > rounds_left:
            counts = rng.multinomial(rounds_left, clean_pvals)
            absorptions += counts[:n]
            rounds_used += rounds_left
            rounds_left = 0
            break

        if gap > 1:
            counts = rng.multinomial(gap - 1, clean_pvals)
            absorptions += counts[:n]
        defect_found = True
        beam = _draw_index(rng, dist.p_survive_proj0_beam)
        rounds_used += gap
        rounds_left -= gap
        id_hits[beam] += 1
        if (
            config.max_defects > 0
            and id_hits[beam] >= config.id_confirmations
            and beam not in identified
        ):
            identified.append(beam)
            active[beam] = False

    return DefectTestReport(
        defect_found=defect_found,
        identified_pixels=tuple(identified),
        rounds_used=rounds_used,
        photons_absorbed=int(absorptions.sum()),
        per_pixel_absorptions=tuple(int(x) for x in absorptions),
    )


def classical_intensity_margin(theoretical: PixelArray, epsilon: float) -> float:
    """Intensity-gap lower bound for an amplitude gap of ``epsilon``:
    ``epsilon * max(min_i |alpha_i|, epsilon / 2)``.

    The classical counter observes intensities, so the amplitude defect size
    has to be mapped to an intensity margin; this uses the smallest
    theoretical magnitude, with the ``epsilon/2`` floor covering arrays that
    contain (near-)opaque pixels.
    """
    if not (0.0 < epsilon <= 2.0):
        raise ValueError(f"epsilon must lie in (0, 2], got {epsilon!r}")
    smallest = float(np.abs(theoretical.transparencies).min())
    return epsilon * max(smallest, epsilon / 2.0)


def classical_shots_per_pixel(n: int, delta: float, margin: float) -> int:
    """Hoeffding budget ``ceil(ln(2n/delta) / (2 margin^2))`` shots per pixel:
    enough that a per-pixel intensity estimate off by more than ``margin``
    has probability at most ``delta / n``."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    if not (0.0 < delta < 1.0):
        raise ValueError(f"delta must lie in (0, 1), got {delta!r}")
    if not margin > 0.0:
        raise ValueError("margin must be positive")
    return math.ceil(math.log(2.0 * n / delta) / (2.0 * margin * margin))


def classical_defect_test(
    scenario: DefectScenario, config: DefectTestConfig, rng: np.random.Generator
) -> DefectTestReport:
    """Photon-counting baseline: estimate every pixel's transmitted fraction
    independently and flag pixels whose estimate strays from the theoretical
    intensity by more than the margin.

    Flagging at the full margin keeps the family false-flag probability below
    ``delta`` while a defect (intensity gap >= margin by construction of the
    margin) at twice the gap is still caught with probability >= 1 - delta/n.
    ``rounds_used`` counts every photon fired.
    """
    validate_defect_inputs(scenario, config)
    n = scenario.n
    margin = classical_intensity_margin(scenario.theoretical, config.epsilon)
    shots = classical_shots_per_pixel(n, config.delta, margin)
    transmitted = rng.binomial(shots, scenario.actual.transmission_probs())
    estimates = transmitted / shots
    flagged = np.abs(estimates - scenario.theoretical.transmission_probs()) > margin
    absorbed = shots - transmitted
    return DefectTestReport(
        defect_found=bool(flagged.any()),
        identified_pixels=tuple(int(i) for i in np.flatnonzero(flagged)),
        rounds_used=n * shots,
        photons_absorbed=int(absorbed.sum()),
        per_pixel_absorptions=tuple(int(x) for x in absorbed),
    )


@dataclass(frozen=True, eq=False)
class RareSearchConfig:
    """Rare-pattern search parameters: prior probability of the pattern,
    allowed failure probability, and the pattern transparencies themselves.

    Construction enforces the operating regime exp(-sqrt(n)) <= delta*p/10,
    under which a random array almost never mimics the pattern state.
    """

    prior_p: float
    delta: float
    pattern: PixelArray

    def __post_init__(self):
        if not (0.0 < self.prior_p < 1.0):
            raise ValueError(f"prior_p must lie in (0, 1), got {self.prior_p!r}")
        if not (0.0 < self.delta < 1.0):
            raise ValueError(f"delta must lie in (0, 1), got {self.delta!r}")
        guard = math.exp(-math.sqrt(self.pattern.n))
        if guard > self.delta * self.prior_p / 10.0:
            raise ValueError(
                f"operating regime violated: exp(-sqrt(n)) = {guard:.3g} exceeds "
                f"delta*p/10 = {self.delta * self.prior_p / 10.0:.3g}"
            )


@dataclass(frozen=True)
class RareSearchReport:
    verdict: str
    successes_observed: int
    photons_absorbed: int
    rounds_used: int

    def __post_init__(self):
        if self.verdict not in (PATTERN_PRESENT, PATTERN_ABSENT):
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.successes_observed > self.rounds_used:
            raise ValueError("successes_observed cannot exceed rounds_used")


def required_successes(n: int, delta: float, p: float) -> int:
    """Smallest x with ``(1/sqrt(n))^x <= delta * p`` (at least 1).

    A 1e-9 slack absorbs float noise when the ratio sits exactly on an
    integer threshold.  ``delta * p >= 1`` needs a single test.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    if not (delta > 0.0 and p > 0.0):
        raise ValueError("delta and p must be positive")
    dp = delta * p
    if dp >= 1.0:
        return 1
    if n == 1:
        raise ValueError("n = 1 cannot reach confidence below 1 (overlap threshold is 1)")
    ratio = math.log(dp) / math.log(n ** -0.5)
    return max(1, math.ceil(ratio - 1e-9))


def required_successes_base_n(n: int, delta: float, p: float) -> int:
    """Coarse base-n variant ``max(ceil(-log(delta p)/log n), 1)`` kept as a
    reference point for scaling studies; verdicts use ``required_successes``."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    if not (delta > 0.0 and p > 0.0):
        raise ValueError("delta and p must be positive")
    dp = delta * p
    if dp >= 1.0:
        return 1
    if n == 1:
        raise ValueError("n = 1 has no base-n threshold")
    return max(1, math.ceil(-math.log(dp) / math.log(n) - 1e-9))


def quantum_rare_search(
    actual: PixelArray,
    config: RareSearchConfig,
    rng: np.random.Generator,
    *,
    max_rounds: Optional[int] = None,
) -> RareSearchReport:
    """Decide whether ``actual`` carries the pattern by repeated projection.

    Rounds run until ``required_successes`` projection-1 results accumulate or
    a single projection-0 occurs: each round sends the uniform probe through
    the array, discards absorbed photons (counted, uninformative), and on
    survival projects onto the pattern state.  Any eigenvalue 0 settles the
    verdict as pattern_absent; the full quota of successes settles it as
    pattern_present.  ``max_rounds`` (optional) guards against non-termination
    on heavily absorbing arrays and raises RuntimeError when exceeded.
    """
    if actual.n != config.pattern.n:
        raise ValueError(f"dimension mismatch: {actual.n} != {config.pattern.n}")
    quota = required_successes(actual.n, config.delta, config.prior_p)
    probe = prepare_uniform_superposition(actual.n)
    pattern_state = build_reference_state(config.pattern)
    successes = 0
    absorbed = 0
    rounds = 0
    while successes < quota:
        if max_rounds is not None and rounds >= max_rounds:
            raise RuntimeError(
                f"rare search did not settle within {max_rounds} rounds "
                f"({successes}/{quota} successes)"
            )
        rounds += 1
        outcome = sample_transmission(probe, actual, rng)
        if isinstance(outcome, Absorbed):
            absorbed += 1
            continue
        eigenvalue, _ = measure_projection(outcome.state, pattern_state, rng)
        if eigenvalue == 0:
            return RareSearchReport(PATTERN_ABSENT, successes, absorbed, rounds)
        successes += 1
    return RareSearchReport(PATTERN_PRESENT, successes, absorbed, rounds)


def classical_pixel_budget(n: int, delta_p: float) -> tuple[int, float, int]:
    """Pixel count, per-pixel tolerance and per-pixel shots of the classical
    rare-search strategy.

    The tolerance ``e^(-1/2)`` minimizes (pixels * shots) subject to
    tolerance^pixels = delta*p; when the implied pixel count exceeds n it is
    capped at n and the tolerance tightened to ``(delta p)^(1/n)`` so the
    joint confidence is preserved.  Shots per pixel follow ``ceil(tol^-2)``.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    if not (0.0 < delta_p < 1.0):
        raise ValueError(f"delta*p must lie in (0, 1), got {delta_p!r}")
    tolerance = math.exp(-0.5)
    pixels = max(1, math.ceil(math.log(delta_p) / math.log(tolerance) - 1e-9))
    if pixels > n:
        pixels = n
        tolerance = delta_p ** (1.0 / n)
    shots = math.ceil(tolerance ** -2)
    return pixels, tolerance, shots


def classical_rare_search(
    actual: PixelArray,
    config: RareSearchConfig,
    rng: np.random.Generator,
    *,
    shots_per_pixel: Optional[int] = None,
) -> RareSearchReport:
    """Photon-counting baseline for the rare-pattern search.

    Estimates the transmitted intensity on the first r pixels (r from
    ``classical_pixel_budget``) and declares the pattern present iff every
    estimate falls within the tolerance band around the pattern intensity
    ``|alpha_i^0|^2``.  ``successes_observed`` counts in-band pixels,
    ``rounds_used`` counts photons fired.  ``shots_per_pixel`` overrides the
    default budget for higher-confidence runs.
    """
    if actual.n != config.pattern.n:
        raise ValueError(f"dimension mismatch: {actual.n} != {config.pattern.n}")
    pixels, tolerance, shots = classical_pixel_budget(
        actual.n, config.delta * config.prior_p
    )
    if shots_per_pixel is not None:
        if shots_per_pixel < 1:
            raise ValueError("shots_per_pixel must be a positive integer")
        shots = int(shots_per_pixel)
    transmitted = rng.binomial(shots, actual.transmission_probs()[:pixels])
    estimates = transmitted / shots
    in_band = (
        np.abs(estimates - config.pattern.transmission_probs()[:pixels]) <= tolerance
    )
    verdict = PATTERN_PRESENT if bool(in_band.all()) else PATTERN_ABSENT
    return RareSearchReport(
        verdict=verdict,
        successes_observed=int(in_band.sum()),
        photons_absorbed=int((shots - transmitted).sum()),
        rounds_used=pixels * shots,
    )


def sample_round_codes(
    theoretical: PixelArray,
    actual: PixelArray,
    rounds: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Sample full interrogation rounds through the measurement operations and
    return flat outcome codes (see ``RoundDistribution``): ``0..n-1`` absorbed
    at pixel i, ``n`` survive/projection-1, ``n+1+i`` survive/projection-0
    with the photon found in beam i.

    This is the sampled counterpart of ``exact_round_distribution`` and stays
    independent of it: every round walks through ``sample_transmission``,
    ``measure_projection`` and ``measure_which_beam``.
    """
    if theoretical.n != actual.n:
        raise ValueError(f"dimension mismatch: {theoretical.n} != {actual.n}")
    if rounds < 1:
        raise ValueError("rounds must be a positive integer")
    n = actual.n
    probe = prepare_uniform_superposition(n)
    reference = build_reference_state(theoretical)
    codes = np.empty(rounds, dtype=np.int64)
    for j in range(rounds):
        outcome = sample_transmission(probe, actual, rng)
        if isinstance(outcome, Absorbed):
            codes[j] = outcome.pixel_index
            continue
        eigenvalue, post = measure_projection(outcome.state, reference, rng)
        if eigenvalue == 1:
            codes[j] = n
        else:
            codes[j] = n + 1 + measure_which_beam(post, rng)
    return codes
