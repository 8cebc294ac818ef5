"""Frozen regression thresholds for the batch experiments.

The concentration statements only assert "some universal constant", so
every numeric cap/floor here is calibrated once from a pilot run and
frozen: caps sit at 1.5x the pilot's 99th percentile, floors at the
pilot's 1st percentile divided by 1.5.  Regenerate with
`isoconst.experiments.run_pilot_calibration()` (same seed reproduces the
same numbers bit for bit).
"""

THRESHOLDS_VERSION = "v1"

# pilot cell used for calibration
PILOT = {
    "distribution": "gaussian",
    "n": 6,
    "N": 24,
    "trials": 1000,
    "master_seed": 1729,
    "subset_draws": 100,
    "rule": "caps = 1.5 * q99, floors = q01 / 1.5",
}

# frozen output of run_pilot_calibration() with the PILOT settings above
DEFAULT_THRESHOLDS = {
    "l_k_cap": 0.4421,
    "l_t_cap": 0.4187,
    "r2_floor": 2.05,
    "r3_floor": 0.2894,
    "r4_cap": 4.181,
    "lemma_subset_mean_cap": 2.221,
    "lemma_global_mean_cap": 0.8526,
    "lemma_quadratic_cap": 4.136,
}
