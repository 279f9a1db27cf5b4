"""Physical constants and numerical defaults shared across the package."""

SPEED_OF_LIGHT = 299_792_458.0  # m/s, exact by definition

# Far-field thresholds standing in for the qualitative "much greater than"
# conditions of the detection geometry. Both are overridable per run.
DEFAULT_MIN_DETECTOR_RATIO = 100.0  # min over emitters of |r - R_n| / d
DEFAULT_MIN_SEPARATION_RATIO = 10.0  # d / wavelength

# Adaptive integrator tolerances for the master-equation oracle.
ODE_RTOL = 1e-10
ODE_ATOL = 1e-12

# Comparison tolerance when classifying a CH74 bound violation.
BELL_BOUND_TOL = 1e-12
