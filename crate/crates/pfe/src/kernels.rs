//! 2D auditory-masking kernels.
//!
//! A kernel is a small coefficient grid over (frequency-bin offset Δf,
//! past-frame offset Δt). The center tap carries the temporal-integration
//! boost; every off-center tap is a negative masking coefficient, so a single
//! correlation sum of kernel against spectrogram yields the filtered cell
//! directly. The emission ("OAE") variant flips the off-center taps positive
//! and scales them by a strength parameter.

use crate::error::{Error, Result};

/// Frequency-offset range, in bins. Row Δf contributes the masker at bin
/// f + Δf of the cell being produced.
pub const DF_MIN: i32 = -1;
pub const DF_MAX: i32 = 5;
/// Temporal reach into past frames. Column Δt = c reads the frame c hops in
/// the past; there is no future-frame reach (forward masking only).
pub const DT_MAX: usize = 16;

const N_DF: usize = (DF_MAX - DF_MIN + 1) as usize;
const N_DT: usize = DT_MAX + 1;

// Shipped coefficient grids, rows df = -1..=5, columns dt = 0..=16.
// The center slot (df = 0, dt = 0) is a placeholder; kernel construction
// writes 1 + alpha_ti there.
const LOW_BAND_COEFFS: [[f64; N_DT]; N_DF] = [
    // df = -1
    [-0.0137, -0.0065, -0.005, -0.0041, -0.0034, -0.0029, -0.0025, -0.0022, -0.0019,
     -0.0017, -0.0014, -0.0012, -0.001, -0.0008, -0.0007, -0.0005, -0.0004],
    // df = 0
    [0.0, -0.4736, -0.3622, -0.2971, -0.2508, -0.215, -0.1857, -0.1609, -0.1395,
     -0.1205, -0.1036, -0.0883, -0.0743, -0.0614, -0.0495, -0.0384, -0.0281],
    // df = 1
    [-0.0914, -0.0433, -0.0331, -0.0272, -0.0229, -0.0196, -0.017, -0.0147, -0.0127,
     -0.011, -0.0095, -0.0081, -0.0068, -0.0056, -0.0045, -0.0035, -0.0026],
    // df = 2
    [-0.1757, -0.0832, -0.0636, -0.0522, -0.0441, -0.0378, -0.0326, -0.0283, -0.0245,
     -0.0212, -0.0182, -0.0155, -0.0131, -0.0108, -0.0087, -0.0068, -0.0049],
    // df = 3
    [-0.2386, -0.113, -0.0864, -0.0709, -0.0598, -0.0513, -0.0443, -0.0384, -0.0333,
     -0.0288, -0.0247, -0.0211, -0.0177, -0.0147, -0.0118, -0.0092, -0.0067],
    // df = 4
    [-0.2129, -0.1008, -0.0771, -0.0632, -0.0534, -0.0458, -0.0395, -0.0343, -0.0297,
     -0.0257, -0.0221, -0.0188, -0.0158, -0.0131, -0.0105, -0.0082, -0.0060],
    // df = 5
    [-0.0986, -0.0467, -0.0357, -0.0293, -0.0247, -0.0212, -0.0183, -0.0159, -0.0138,
     -0.0119, -0.0102, -0.0087, -0.0073, -0.0061, -0.0049, -0.0038, -0.0028],
];

const HIGH_BAND_COEFFS: [[f64; N_DT]; N_DF] = [
    // df = -1
    [-0.0137, -0.0060, -0.0046, -0.0037, -0.0031, -0.0026, -0.0023, -0.0019, -0.0017,
     -0.0014, -0.0012, -0.0010, -0.0008, -0.0007, -0.0005, -0.0004, -0.0002],
    // df = 0
    [0.0, -0.4375, -0.3321, -0.2705, -0.2268, -0.1929, -0.1651, -0.1417, -0.1214,
     -0.1035, -0.0875, -0.0730, -0.0598, -0.0476, -0.0364, -0.0259, -0.0161],
    // df = 1
    [-0.0914, -0.0400, -0.0304, -0.0247, -0.0207, -0.0176, -0.0151, -0.0130, -0.0111,
     -0.0095, -0.0080, -0.0067, -0.0055, -0.0044, -0.0033, -0.0024, -0.0015],
    // df = 2
    [-0.1757, -0.0769, -0.0584, -0.0475, -0.0398, -0.0339, -0.0290, -0.0249, -0.0213,
     -0.0182, -0.0154, -0.0128, -0.0105, -0.0084, -0.0064, -0.0045, -0.0028],
    // df = 3
    [-0.2386, -0.1044, -0.0792, -0.0645, -0.0541, -0.0460, -0.0394, -0.0338, -0.0290,
     -0.0247, -0.0209, -0.0174, -0.0143, -0.0114, -0.0087, -0.0062, -0.0038],
    // df = 4
    [-0.2129, -0.0931, -0.0707, -0.0576, -0.0483, -0.0411, -0.0352, -0.0302, -0.0258,
     -0.0220, -0.0186, -0.0155, -0.0127, -0.0101, -0.0077, -0.0055, -0.0034],
    // df = 5
    [-0.0986, -0.0431, -0.0327, -0.0267, -0.0224, -0.0190, -0.0163, -0.0140, -0.0120,
     -0.0102, -0.0086, -0.0072, -0.0059, -0.0047, -0.0036, -0.0026, -0.0016],
];

/// Which half of the spectrum a kernel is tuned for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Band {
    Low,
    High,
}

impl std::str::FromStr for Band {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "low" => Ok(Band::Low),
            "high" => Ok(Band::High),
            other => Err(Error::InvalidArgument(format!(
                "unknown band '{other}' (expected low or high)"
            ))),
        }
    }
}

fn band_coeffs(band: Band) -> &'static [[f64; N_DT]; N_DF] {
    match band {
        Band::Low => &LOW_BAND_COEFFS,
        Band::High => &HIGH_BAND_COEFFS,
    }
}

/// Temporal-integration center boost per band and frame speech state.
pub fn temporal_integration_alpha(band: Band, speech: bool) -> f64 {
    match (band, speech) {
        (Band::Low, true) => 4.0,
        (Band::Low, false) => 3.0,
        (Band::High, true) => 3.0,
        (Band::High, false) => 2.0,
    }
}

/// Offset extents of a kernel grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelGeometry {
    pub df_min: i32,
    pub df_max: i32,
    /// Largest past-frame offset.
    pub dt_max: usize,
    /// Future-frame reach; zero for every shipped kernel (causal filter).
    pub dt_back: usize,
}

impl KernelGeometry {
    pub const fn shipped() -> Self {
        Self {
            df_min: DF_MIN,
            df_max: DF_MAX,
            dt_max: DT_MAX,
            dt_back: 0,
        }
    }
}

/// Anything that exposes a coefficient grid over (Δf, Δt) offsets.
pub trait MaskingGrid {
    fn geometry(&self) -> KernelGeometry;
    /// Coefficient at the given offsets; zero outside the geometry.
    fn coeff(&self, df: i32, dt: usize) -> f64;
}

#[inline]
fn grid_index(geometry: &KernelGeometry, df: i32, dt: usize) -> Option<usize> {
    if df < geometry.df_min || df > geometry.df_max || dt > geometry.dt_max {
        return None;
    }
    Some((df - geometry.df_min) as usize * (geometry.dt_max + 1) + dt)
}

/// Masking filter kernel: negative off-center taps from the shipped tables
/// plus the 1 + alpha_ti center.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskKernel {
    pub geometry: KernelGeometry,
    pub band: Band,
    pub speech: bool,
    /// Center boost before normalization.
    pub center_ti: f64,
    pub normalized: bool,
    coeffs: Vec<f64>,
}

impl MaskingGrid for MaskKernel {
    fn geometry(&self) -> KernelGeometry {
        self.geometry
    }

    #[inline]
    fn coeff(&self, df: i32, dt: usize) -> f64 {
        match grid_index(&self.geometry, df, dt) {
            Some(i) => self.coeffs[i],
            None => 0.0,
        }
    }
}

/// Build the masking kernel for a band and speech state. Unnormalized, the
/// center tap is 1 + alpha_ti and every other tap is the table value;
/// normalized, all taps are divided by 1 + alpha_ti so the center is 1.
pub fn psycho_kernel(band: Band, speech: bool, normalize: bool) -> MaskKernel {
    debug_assert!(low_dominates_high());
    let geometry = KernelGeometry::shipped();
    let alpha_ti = temporal_integration_alpha(band, speech);
    let center = 1.0 + alpha_ti;
    let scale = if normalize { 1.0 / center } else { 1.0 };

    let table = band_coeffs(band);
    let mut coeffs = Vec::with_capacity(N_DF * N_DT);
    for (row, df) in (DF_MIN..=DF_MAX).enumerate() {
        for dt in 0..N_DT {
            let raw = if df == 0 && dt == 0 {
                center
            } else {
                table[row][dt]
            };
            coeffs.push(raw * scale);
        }
    }

    MaskKernel {
        geometry,
        band,
        speech,
        center_ti: alpha_ti,
        normalized: normalize,
        coeffs,
    }
}

/// Emission kernel: center tap 1, off-center taps +mu * |table value|.
#[derive(Debug, Clone, PartialEq)]
pub struct OaeKernel {
    pub geometry: KernelGeometry,
    pub band: Band,
    pub mu: f64,
    coeffs: Vec<f64>,
}

impl MaskingGrid for OaeKernel {
    fn geometry(&self) -> KernelGeometry {
        self.geometry
    }

    #[inline]
    fn coeff(&self, df: i32, dt: usize) -> f64 {
        match grid_index(&self.geometry, df, dt) {
            Some(i) => self.coeffs[i],
            None => 0.0,
        }
    }
}

pub fn oae_kernel(band: Band, mu: f64) -> Result<OaeKernel> {
    if !(mu >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "emission strength mu must be >= 0, got {mu}"
        )));
    }
    let geometry = KernelGeometry::shipped();
    let table = band_coeffs(band);
    let mut coeffs = Vec::with_capacity(N_DF * N_DT);
    for (row, df) in (DF_MIN..=DF_MAX).enumerate() {
        for dt in 0..N_DT {
            let v = if df == 0 && dt == 0 {
                1.0
            } else {
                mu * table[row][dt].abs()
            };
            coeffs.push(v);
        }
    }
    Ok(OaeKernel {
        geometry,
        band,
        mu,
        coeffs,
    })
}

/// Identity grid: center tap 1, everything else 0. Useful as a reference in
/// frequency-response analysis.
pub fn identity_kernel() -> OaeKernel {
    oae_kernel(Band::High, 0.0).expect("mu = 0 is valid")
}

/// Sum of absolute coefficient values.
pub fn kernel_l1_mass<G: MaskingGrid>(kernel: &G) -> f64 {
    let g = kernel.geometry();
    let mut sum = 0.0;
    for df in g.df_min..=g.df_max {
        for dt in 0..=g.dt_max {
            sum += kernel.coeff(df, dt).abs();
        }
    }
    sum
}

/// Sum of signed coefficient values (the filter's response to a field that
/// is constant over both axes).
pub fn kernel_coefficient_sum<G: MaskingGrid>(kernel: &G) -> f64 {
    let g = kernel.geometry();
    let mut sum = 0.0;
    for df in g.df_min..=g.df_max {
        for dt in 0..=g.dt_max {
            sum += kernel.coeff(df, dt);
        }
    }
    sum
}

/// Every low-band magnitude dominates the high-band one at matching offsets
/// with dt >= 1 (the shipped tables share the dt = 0 column).
fn low_dominates_high() -> bool {
    for row in 0..N_DF {
        for dt in 1..N_DT {
            if LOW_BAND_COEFFS[row][dt].abs() < HIGH_BAND_COEFFS[row][dt].abs() {
                return false;
            }
        }
    }
    true
}
