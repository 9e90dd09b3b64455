"""Deterministic Monte Carlo experiment runner and sweep statistics.

The harness owns all randomness: every trial gets its own generator derived
from (master seed, trial index) by key, never by sequential draws, so serial,
batched and reordered executions produce identical statistics.  Success and
absorption counts are aggregated as exact integers, which makes batch merging
associative to the bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist
from typing import Callable, Sequence, Union

import numpy as np

from .core import PixelArray
from .protocols import (
    PATTERN_PRESENT,
    DefectScenario,
    DefectTestConfig,
    RareSearchConfig,
    classical_defect_test,
    classical_intensity_margin,
    classical_rare_search,
    classical_shots_per_pixel,
    quantum_defect_test,
    quantum_rare_search,
    required_rounds_quantum,
)

__all__ = [
    "TrialOutcome",
    "TrialCounts",
    "TrialStats",
    "SweepTemplate",
    "SweepRow",
    "wilson_interval",
    "trial_rng",
    "run_trial_range",
    "run_trials",
    "defect_experiment",
    "rare_search_experiment",
    "template_scenario",
    "scaling_sweep",
    "least_squares_slope",
    "validation_scenario",
]

SeedLike = Union[int, Sequence[int]]


@dataclass(frozen=True)
class TrialOutcome:
    """What one protocol run contributes to the statistics."""

    success: bool
    absorptions: int


TrialFn = Callable[[np.random.Generator], TrialOutcome]


@dataclass(frozen=True)
class TrialCounts:
    """Mergeable integer aggregate of a batch of trials."""

    trials: int
    successes: int
    absorbed_total: int
    absorbed_square_total: int

    def merge(self, other: "TrialCounts") -> "TrialCounts":
        return TrialCounts(
            self.trials + other.trials,
            self.successes + other.successes,
            self.absorbed_total + other.absorbed_total,
            self.absorbed_square_total + other.absorbed_square_total,
        )

    def finalize(self, confidence: float = 0.95) -> "TrialStats":
        if self.trials < 1:
            raise ValueError("cannot finalize zero trials")
        point = self.successes / self.trials
        ci_low, ci_high = wilson_interval(self.successes, self.trials, confidence)
        mean = self.absorbed_total / self.trials
        if self.trials > 1:
            variance = (
                self.absorbed_square_total - self.absorbed_total**2 / self.trials
            ) / (self.trials - 1)
            z = NormalDist().inv_cdf(0.5 + confidence / 2.0)
            half = z * math.sqrt(max(variance, 0.0) / self.trials)
        else:
            half = 0.0
        return TrialStats(
            trials=self.trials,
            successes=self.successes,
            point_estimate=point,
            ci_low=ci_low,
            ci_high=ci_high,
            mean_absorptions=mean,
            absorption_ci=(mean - half, mean + half),
            confidence=confidence,
        )


@dataclass(frozen=True)
class TrialStats:
    trials: int
    successes: int
    point_estimate: float
    ci_low: float
    ci_high: float
    mean_absorptions: float
    absorption_ci: tuple[float, float]
    confidence: float


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a Bernoulli rate.

    Behaves sensibly at 0 and ``trials`` successes (which occur by design in
    the exact-soundness experiments), always containing the point estimate.
    """
    if trials < 1:
        raise ValueError("trials must be a positive integer")
    if not 0 <= successes <= trials:
        raise ValueError(f"successes must lie in [0, {trials}], got {successes}")
    if not (0.0 < confidence < 1.0):
        raise ValueError("confidence must lie in (0, 1)")
    z = NormalDist().inv_cdf(0.5 + confidence / 2.0)
    phat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = phat + z2 / (2.0 * trials)
    radius = z * math.sqrt(phat * (1.0 - phat) / trials + z2 / (4.0 * trials * trials))
    low = max(0.0, (center - radius) / denom)
    high = min(1.0, (center + radius) / denom)
    # guarantee containment of the point estimate against rounding noise
    return min(low, phat), max(high, phat)


def _seed_key(master_seed: SeedLike) -> list[int]:
    if isinstance(master_seed, (int, np.integer)):
        key = [int(master_seed)]
    else:
        key = [int(v) for v in master_seed]
    if not key or any(v < 0 for v in key):
        raise ValueError("master seed must be a nonnegative integer or a sequence of them")
    return key


def trial_rng(master_seed: SeedLike, index: int) -> np.random.Generator:
    """Generator for one trial, keyed on (master seed, trial index)."""
    if index < 0:
        raise ValueError("trial index must be nonnegative")
    return np.random.default_rng(_seed_key(master_seed) + [int(index)])


def run_trial_range(
    experiment: TrialFn, master_seed: SeedLike, start: int, stop: int
) -> TrialCounts:
    """Run trials ``start..stop-1``; counts from disjoint ranges merge into
    exactly the single-range result."""
    if not 0 <= start <= stop:
        raise ValueError("need 0 <= start <= stop")
    successes = 0
    absorbed_total = 0
    absorbed_square_total = 0
    for index in range(start, stop):
        outcome = experiment(trial_rng(master_seed, index))
        successes += bool(outcome.success)
        a = int(outcome.absorptions)
        if a < 0:
            raise ValueError("absorptions must be nonnegative")
        absorbed_total += a
        absorbed_square_total += a * a
    return TrialCounts(stop - start, successes, absorbed_total, absorbed_square_total)


def run_trials(
    experiment: TrialFn,
    trials: int,
    master_seed: SeedLike,
    confidence: float = 0.95,
) -> TrialStats:
    """Aggregate ``trials`` independent runs of ``experiment``.

    Bit-identical for identical (experiment, trials, master_seed) regardless
    of batching or execution order.
    """
    if trials < 1:
        raise ValueError("trials must be a positive integer")
    return run_trial_range(experiment, master_seed, 0, trials).finalize(confidence)


def defect_experiment(
    scenario: DefectScenario, config: DefectTestConfig, *, classical: bool = False
) -> TrialFn:
    """Trial function for a defect test; success means defect_found."""

    def run(rng: np.random.Generator) -> TrialOutcome:
        if classical:
            report = classical_defect_test(scenario, config, rng)
        else:
            report = quantum_defect_test(scenario, config, rng)
        return TrialOutcome(report.defect_found, report.photons_absorbed)

    return run


def rare_search_experiment(
    actual: PixelArray,
    config: RareSearchConfig,
    *,
    classical: bool = False,
    max_rounds: int | None = None,
    shots_per_pixel: int | None = None,
) -> TrialFn:
    """Trial function for a rare-pattern search; success means
    verdict pattern_present."""

    def run(rng: np.random.Generator) -> TrialOutcome:
        if classical:
            report = classical_rare_search(actual, config, rng, shots_per_pixel=shots_per_pixel)
        else:
            report = quantum_rare_search(actual, config, rng, max_rounds=max_rounds)
        return TrialOutcome(report.verdict == PATTERN_PRESENT, report.photons_absorbed)

    return run


@dataclass(frozen=True)
class SweepTemplate:
    """Size-independent defect scenario: a uniform fill transparency with one
    defective pixel planted at the fixed relative position (n-1)//2."""

    fill: complex
    defect: complex


@dataclass(frozen=True)
class SweepRow:
    n: int
    quantum_absorptions: float
    classical_absorptions: float
    ratio: float
    rounds: int
    shots: int


def template_scenario(template: SweepTemplate, n: int) -> DefectScenario:
    """Instantiate the template at size n (defect at index (n-1)//2 so the
    geometry stays comparable across sizes)."""
    theoretical = PixelArray(np.full(int(n), complex(template.fill)))
    return DefectScenario.from_defects(theoretical, {(int(n) - 1) // 2: complex(template.defect)})


def scaling_sweep(
    ns: Sequence[int],
    template: SweepTemplate,
    config: DefectTestConfig,
    trials: int,
    master_seed: SeedLike,
) -> list[SweepRow]:
    """Mean absorption cost of both protocols across array sizes.

    For each n the quantum and classical defect tests run ``trials`` times on
    the instantiated template scenario; a row records the two means, their
    quantum/classical ratio, the quantum round budget and the classical shot
    total.  Per-(n, protocol) seeds derive from the master seed by key.
    """
    sizes = [int(v) for v in ns]
    if not sizes:
        raise ValueError("ns must not be empty")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("ns must be strictly increasing")
    key = _seed_key(master_seed)
    rows = []
    for n in sizes:
        scenario = template_scenario(template, n)
        quantum = run_trials(
            defect_experiment(scenario, config), trials, key + [n, 0]
        )
        classical = run_trials(
            defect_experiment(scenario, config, classical=True), trials, key + [n, 1]
        )
        if classical.mean_absorptions <= 0.0:
            raise ValueError(f"classical baseline absorbed nothing at n = {n}")
        margin = classical_intensity_margin(scenario.theoretical, config.epsilon)
        rows.append(
            SweepRow(
                n=n,
                quantum_absorptions=quantum.mean_absorptions,
                classical_absorptions=classical.mean_absorptions,
                ratio=quantum.mean_absorptions / classical.mean_absorptions,
                rounds=required_rounds_quantum(
                    n, config.epsilon, config.delta, config.round_constant_cq
                ),
                shots=n * classical_shots_per_pixel(n, config.delta, margin),
            )
        )
    return rows


def least_squares_slope(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """Ordinary least squares slope of y on x and its standard error."""
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1 or xs.size < 3:
        raise ValueError("need at least three paired points")
    dx = xs - xs.mean()
    sxx = float(np.dot(dx, dx))
    if sxx <= 0.0:
        raise ValueError("x values must not be constant")
    slope = float(np.dot(dx, ys) / sxx)
    intercept = float(ys.mean() - slope * xs.mean())
    resid = ys - (intercept + slope * xs)
    dof = xs.size - 2
    stderr = math.sqrt(float(np.dot(resid, resid)) / dof / sxx)
    return slope, stderr


def validation_scenario(n: int) -> DefectScenario:
    """Canonical oracle-validation scenario: unit transparencies with pixel
    n//2 halved (at n = 2 this is the two-pixel worked case with absorption
    probability 3/8 at the defective pixel)."""
    if n < 2:
        raise ValueError("validation scenario needs at least two pixels")
    theoretical = PixelArray(np.ones(int(n), dtype=np.complex128))
    return DefectScenario.from_defects(theoretical, {int(n) // 2: 0.5 + 0.0j})
