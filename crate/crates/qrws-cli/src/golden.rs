//! Embedded reference values the report command compares against. Peak
//! probabilities and the shell breakdown were frozen from an independent
//! implementation of the same pipeline; the interval-stability spot values
//! are the published rounded figures, hence their looser tolerance.

use qrws::coin::DependenceLaw;

/// Success probabilities at φ = ζ = π (identical for every law at that
/// point).
pub struct PeakReference {
    pub m: usize,
    pub p_w: f64,
    pub p_f: f64,
    pub p_s: f64,
}

pub const PEAK_TOLERANCE: f64 = 1e-4;

pub const PEAK_REFERENCES: &[PeakReference] = &[
    PeakReference {
        m: 6,
        p_w: 0.41176545167342693,
        p_f: 0.89135105341414922,
        p_s: 0.97281815248483094,
    },
    PeakReference {
        m: 8,
        p_w: 0.43447149924737977,
        p_f: 0.91409112471889387,
        p_s: 0.9743952808524341,
    },
    PeakReference {
        m: 10,
        p_w: 0.43343097152837073,
        p_f: 0.91231258835992635,
        p_s: 0.97143148056514905,
    },
    PeakReference {
        m: 11,
        p_w: 0.44145667706408265,
        p_f: 0.92786308697803599,
        p_s: 0.97986622654319033,
    },
];

/// Shell-resolved breakdown of the m = 6 peak state.
pub struct ShellReference {
    pub m: usize,
    pub p_marked: f64,
    pub p_first_sum: f64,
    pub p_second_sum: f64,
    pub residue: f64,
    pub counts: [usize; 4],
}

pub const M6_SHELL_REFERENCE: ShellReference = ShellReference {
    m: 6,
    p_marked: 0.41176545167342693,
    p_first_sum: 0.47958560174072234,
    p_second_sum: 0.081467099070681739,
    residue: 0.027181847515168445,
    counts: [1, 6, 15, 42],
};

/// Interval-stability spot values (rounded reference figures).
pub struct LambdaReference {
    pub m: usize,
    pub law: DependenceLaw,
    /// 1 for the first-neighbor average, 2 for the second-neighbor one.
    pub which: u8,
    pub value: f64,
}

pub const LAMBDA_TOLERANCE: f64 = 1.5e-3;

pub const LAMBDA_REFERENCES: &[LambdaReference] = &[
    LambdaReference {
        m: 6,
        law: DependenceLaw::Linear,
        which: 1,
        value: 0.003793,
    },
    LambdaReference {
        m: 6,
        law: DependenceLaw::NlFixed,
        which: 2,
        value: 0.007295,
    },
    LambdaReference {
        m: 10,
        law: DependenceLaw::Linear,
        which: 1,
        value: 0.0002006,
    },
];

/// Iteration budgets the search is expected to use.
pub const ITERATION_REFERENCES: &[(usize, usize)] = &[(4, 5), (6, 9), (10, 36)];
