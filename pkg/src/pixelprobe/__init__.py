"""Quantum interrogation of semi-transparent pixel arrays.

Simulates single-photon superposition probing of an N-pixel array, the
defect-test and rare-pattern-search protocols with their classical
photon-counting baselines, exact small-N probability oracles, and a
seed-reproducible Monte Carlo harness for verifying the absorption-cost
advantage.
"""

from .core import (
    Absorbed,
    PhotonModeState,
    PixelArray,
    RoundDistribution,
    Transmitted,
    TransmissionOutcome,
    build_reference_state,
    measure_projection,
    measure_which_beam,
    overlap_probability,
    prepare_uniform_superposition,
    sample_transmission,
    transmission_distribution,
)
from .harness import (
    SweepRow,
    SweepTemplate,
    TrialCounts,
    TrialOutcome,
    TrialStats,
    defect_experiment,
    least_squares_slope,
    rare_search_experiment,
    run_trial_range,
    run_trials,
    scaling_sweep,
    template_scenario,
    trial_rng,
    validation_scenario,
    wilson_interval,
)
from .oracle import (
    MisIdProfile,
    exact_expected_absorptions_per_round,
    exact_misidentification_probability,
    exact_overlap_tail,
    exact_round_distribution,
)
from .protocols import (
    PATTERN_ABSENT,
    PATTERN_PRESENT,
    DefectScenario,
    DefectTestConfig,
    DefectTestReport,
    RareSearchConfig,
    RareSearchReport,
    classical_defect_test,
    classical_intensity_margin,
    classical_pixel_budget,
    classical_rare_search,
    classical_shots_per_pixel,
    quantum_defect_test,
    quantum_rare_search,
    required_rounds_quantum,
    required_successes,
    required_successes_base_n,
    sample_random_array,
    sample_round_codes,
    validate_defect_inputs,
)
from .scenario import Scenario, ScenarioError, load_scenario, parse_scenario

__version__ = "0.1.0"
