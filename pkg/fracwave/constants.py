VERSION = "0.1.0"

## Grid and time integration defaults
DEFAULT_GRID_POINTS = 512
MIN_GRID_POINTS = 8
DEFAULT_REL_TOL = 1e-9
DEFAULT_ABS_TOL = 1e-9
MAX_TOLERANCE = 1e-3
DEFAULT_SAMPLE_DT = 1.0

## Fourier bookkeeping
SYMMETRY_TOL = 1e-12
SYNTHESIS_IMAG_TOL = 1e-10
NONNEGATIVE_TOL = 1e-12

## Damping profiles
# Amplitudes used for the reported experiments: chi1, chi2, chi3.
DEFAULT_NU = {
    "chi1": 0.25,
    "chi2": 1.0,
    "chi3": 0.25,
    "constant": 1.0,
    "zero": 0.0,
    "custom": 1.0,
}
CHI3_STEEPNESS = 20.0
CHI3_HALF_WIDTH = 0.25
DEGENERACY_THRESHOLD = 1e-8
DEGENERACY_FIT_POINTS = 8
DEGENERACY_SLOPE_TOL = 0.25
LOCALIZED_RUN_POINTS = 3

## Initial data
LOCALIZED_IC_FREQUENCY = 10

## Resonances and resolvent
DEFAULT_MODES = 12
NU_SWEEP = (0.125, 0.25, 0.5, 1.0)
SYMMETRY_PAIR_TOL = 1e-8
ZERO_RESONANCE_TOL = 1e-6
NEAR_RESONANCE_SIGMA = 1e-14
DEFAULT_SWEEP_STEPS = 200
DEFAULT_ASYMPTOTIC_MODES = 4
DEFAULT_TRANSPORT_MODES = 12

## Decay fits
MIN_FIT_SAMPLES = 10
ENERGY_FLOOR = 1e-12

## Environment
THREADS_ENV = "FRACWAVE_THREADS"
