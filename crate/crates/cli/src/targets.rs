//! Reference maxima the reproduction report checks against.

/// Per-type grid maxima for `d = 4`, `5`, `6` with the absolute tolerance used.
pub struct GridTargets {
    pub dim: usize,
    pub tolerance: f64,
    pub rows: &'static [(&'static str, f64)],
}

pub const GRID: [GridTargets; 4] = [
    GridTargets {
        dim: 3,
        tolerance: 1e-8,
        rows: &[("{}", 0.04), ("{2}", 0.04)],
    },
    GridTargets {
        dim: 4,
        tolerance: 1e-6,
        rows: &[
            ("{}", 0.00456416),
            ("{2}", 0.00456416),
            ("{3}", 0.00457936),
            ("{2,3}", 0.00457936),
        ],
    },
    GridTargets {
        dim: 5,
        tolerance: 1e-6,
        rows: &[
            ("{}", 0.000402464),
            ("{2}", 0.000402464),
            ("{3}", 0.00040419),
            ("{4}", 0.000404818),
            ("{2,3,4}", 0.000404818),
            ("{2,3}", 0.000404815),
            ("{2,4}", 0.000405335),
            ("{3,4}", 0.000405335),
        ],
    },
    GridTargets {
        dim: 6,
        tolerance: 1e-9,
        rows: &[("{2,3,5}", 0.0000291323), ("{4,5}", 0.0000291323)],
    },
];

/// High-precision value of the `d = 4` maximum.
pub const GRID_D4_PRECISE: f64 = 0.004_579_364_805_943_86;
pub const GRID_D4_PRECISE_TOL: f64 = 1e-12;

/// Diagonal catalog entries whose maximum is `1/25`; all others reach `1/27`.
pub const DIAG3_TOP_ENTRIES: [usize; 3] = [1, 10, 13];
pub const DIAG3_TOL: f64 = 1e-9;

pub const FSL_TOL: f64 = 1e-9;
