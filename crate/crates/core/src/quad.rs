//! Adaptive Gauss-Kronrod quadrature for complex-valued radial integrands,
//! with zero-crossing partitioning for oscillatory kernels and tail
//! truncation helpers.

#![allow(clippy::excessive_precision)]

use num_complex::Complex64;

use crate::error::{CfsError, Result};

// 15-point Kronrod abscissae with the embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: Complex64,
    pub abs_err: f64,
    pub evals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
}

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut resabs = fc.norm() * WGK[7];
    let mut fv = [Complex64::new(0.0, 0.0); 15];
    fv[7] = fc;
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv[j] = f1;
        fv[14 - j] = f2;
        let sum = f1 + f2;
        kronrod += sum * WGK[j];
        resabs += WGK[j] * (f1.norm() + f2.norm());
        if j % 2 == 1 {
            gauss += sum * WG[j / 2];
        }
    }
    let mean = kronrod * 0.5;
    let mut resasc = WGK[7] * (fc - mean).norm();
    for j in 0..7 {
        resasc += WGK[j] * ((fv[j] - mean).norm() + (fv[14 - j] - mean).norm());
    }
    resasc *= half.abs();
    resabs *= half.abs();
    let raw_err = ((kronrod - gauss) * half).norm();
    let mut err = raw_err;
    if resasc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / resasc).powf(1.5);
        err = if scale < 1.0 { resasc * scale } else { resasc };
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (kronrod * half, err)
}

/// Adaptive quadrature of a complex integrand on [a, b].
pub fn adaptive<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult {
            value: Complex64::new(0.0, 0.0),
            abs_err: 0.0,
            evals: 0,
        });
    }
    let max_panels = 4000usize;
    let (v0, e0) = gk15(&f, a, b);
    let mut panels = vec![Panel {
        a,
        b,
        value: v0,
        err: e0,
    }];
    let mut evals = 15usize;
    loop {
        let total: Complex64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.err).sum();
        let target = abs_tol.max(rel_tol * total.norm());
        if err <= target {
            return Ok(QuadResult {
                value: total,
                abs_err: err,
                evals,
            });
        }
        if panels.len() >= max_panels {
            return Err(CfsError::NumericalFailure {
                requested_tol: target,
                reached_err: err,
                subdivisions: panels.len(),
                a,
                b,
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.partial_cmp(&y.1.err).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            // interval no longer splittable in f64; accept its estimate
            panels.push(p);
            let total: Complex64 = panels.iter().map(|p| p.value).sum();
            let err: f64 = panels.iter().map(|p| p.err).sum();
            return Ok(QuadResult {
                value: total,
                abs_err: err,
                evals,
            });
        }
        let (v1, e1) = gk15(&f, p.a, mid);
        let (v2, e2) = gk15(&f, mid, p.b);
        evals += 30;
        panels.push(Panel {
            a: p.a,
            b: mid,
            value: v1,
            err: e1,
        });
        panels.push(Panel {
            a: mid,
            b: p.b,
            value: v2,
            err: e2,
        });
    }
}

pub fn adaptive_real<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadResult> {
    adaptive(|x| Complex64::new(f(x), 0.0), a, b, abs_tol, rel_tol)
}

/// Quadrature of an oscillatory radial integrand on [0, kmax]. The integrand
/// is partitioned at the half-period breakpoints of its fastest phase
/// (total rate `freq`, e.g. |xi| + |t| for e^{i k r} j-kernels) and each
/// piece is integrated adaptively.
pub fn oscillatory<F: Fn(f64) -> Complex64>(
    f: F,
    kmax: f64,
    freq: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadResult> {
    if kmax <= 0.0 {
        return Ok(QuadResult {
            value: Complex64::new(0.0, 0.0),
            abs_err: 0.0,
            evals: 0,
        });
    }
    let step = if freq > 0.0 {
        std::f64::consts::PI / freq
    } else {
        kmax
    };
    let pieces = (kmax / step).ceil() as usize;
    if pieces <= 1 {
        return adaptive(f, 0.0, kmax, abs_tol, rel_tol);
    }
    if pieces > 200_000 {
        return Err(CfsError::NumericalFailure {
            requested_tol: abs_tol,
            reached_err: f64::INFINITY,
            subdivisions: pieces,
            a: 0.0,
            b: kmax,
        });
    }
    let per_tol = abs_tol / (pieces as f64).sqrt().max(1.0);
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut evals = 0;
    let mut a = 0.0;
    for i in 1..=pieces {
        let b = (i as f64 * step).min(kmax);
        let r = adaptive(&f, a, b, per_tol, rel_tol)?;
        value += r.value;
        err += r.abs_err;
        evals += r.evals;
        a = b;
    }
    Ok(QuadResult {
        value,
        abs_err: err,
        evals,
    })
}

/// Radius beyond which `weight(r)` stays below `cut` times its observed peak,
/// scanned on a geometric-then-linear grid out to `hard_max`.
pub fn tail_radius<W: Fn(f64) -> f64>(weight: W, seed_radius: f64, cut: f64, hard_max: f64) -> f64 {
    let n_scan = 600;
    let rmax = hard_max.max(seed_radius);
    let mut peak = 0.0f64;
    let mut samples = Vec::with_capacity(n_scan + 1);
    for i in 0..=n_scan {
        let r = rmax * (i as f64) / (n_scan as f64);
        let w = weight(r).abs();
        samples.push((r, w));
        peak = peak.max(w);
    }
    if peak == 0.0 {
        return seed_radius;
    }
    let threshold = peak * cut;
    let mut last_above = 0.0;
    for &(r, w) in &samples {
        if w > threshold {
            last_above = r;
        }
    }
    // one grid step of margin
    (last_above + rmax / n_scan as f64).min(rmax)
}
