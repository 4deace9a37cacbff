//! Globally adaptive Gauss-Kronrod (10/21 point) quadrature with mandatory
//! breakpoints.
//!
//! The interval with the largest error estimate is bisected until the summed
//! error falls below `max(abs_tol, rel_tol * |integral|)`.

use crate::error::{Error, Result};

/// Kronrod abscissae on `[0, 1)`; odd indices are the 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_745_761_561,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_subdivisions: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Segment {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    for (j, (&x, &wk)) in XGK.iter().zip(WGK.iter()).take(10).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += wk * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Segment {
        lo,
        hi,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

impl Integrator {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    /// Integrate `f` over `[lo, hi]`. Breakpoints strictly inside the
    /// interval become fixed segment edges, which is where kinks and jumps of
    /// the integrand belong.
    pub fn integrate<F>(&self, f: F, lo: f64, hi: f64, breakpoints: &[f64]) -> Result<Integral>
    where
        F: Fn(f64) -> f64,
    {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::Domain(format!(
                "integration limits must be finite, got [{lo}, {hi}]"
            )));
        }
        if hi <= lo {
            return Ok(Integral {
                value: 0.0,
                abs_error: 0.0,
                subdivisions: 0,
            });
        }

        let mut edges = vec![lo];
        let mut inner: Vec<f64> = breakpoints
            .iter()
            .copied()
            .filter(|b| b.is_finite() && *b > lo && *b < hi)
            .collect();
        inner.sort_by(f64::total_cmp);
        inner.dedup();
        edges.extend(inner);
        edges.push(hi);

        let mut segments: Vec<Segment> = edges
            .windows(2)
            .map(|w| gauss_kronrod(&f, w[0], w[1]))
            .collect();

        loop {
            let value: f64 = segments.iter().map(|s| s.value).sum();
            let error: f64 = segments.iter().map(|s| s.error).sum();
            let target = self.abs_tol.max(self.rel_tol * value.abs());
            if !(value.is_finite() && error.is_finite()) {
                return Err(Error::Domain(format!(
                    "integrand produced a non-finite value on [{lo}, {hi}]"
                )));
            }
            if error <= target {
                return Ok(Integral {
                    value,
                    abs_error: error,
                    subdivisions: segments.len(),
                });
            }

            let (worst, _) = segments
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.error.total_cmp(&b.1.error))
                .expect("at least one segment");
            let seg = segments[worst];
            let mid = 0.5 * (seg.lo + seg.hi);
            // no room left to split in floating point
            let exhausted = mid <= seg.lo || mid >= seg.hi;
            if segments.len() >= self.max_subdivisions || exhausted {
                return Err(Error::Quadrature {
                    lo,
                    hi,
                    estimate: value,
                    abs_error: error,
                    subdivisions: segments.len(),
                });
            }
            segments[worst] = gauss_kronrod(&f, seg.lo, mid);
            segments.push(gauss_kronrod(&f, mid, seg.hi));
        }
    }
}
