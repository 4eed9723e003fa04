//! Globally adaptive Gauss-Kronrod (7/15) quadrature.

// Coefficient tables are kept as published.
#![allow(clippy::excessive_precision)]

use super::Tolerance;
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
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

// Gauss weights for the odd Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    lo: T,
    hi: T,
    value: T,
    error: T,
}

fn kronrod15<T: Real, F: Fn(T) -> T>(f: &F, lo: T, hi: T) -> Result<Segment<T>> {
    let half = (hi - lo) * lit(0.5);
    let center = lo + half;

    let fc = f(center);
    let mut kronrod = fc * lit(WGK[7]);
    let mut gauss = fc * lit(WG[3]);
    let mut finite = fc.is_finite();

    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * lit(x);
        let pair = f(center - dx) + f(center + dx);
        finite &= pair.is_finite();
        kronrod = kronrod + pair * lit(w);
        if j % 2 == 1 {
            gauss = gauss + pair * lit(WG[j / 2]);
        }
    }
    if !finite {
        return Err(Error::Domain(format!(
            "integrand not finite on [{}, {}]",
            to_f64(lo),
            to_f64(hi)
        )));
    }

    Ok(Segment {
        lo,
        hi,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    })
}

/// Integrates `f` over `[lo, hi]`.
///
/// The interval with the largest local error estimate is bisected until the
/// summed estimate satisfies `err <= max(tol.abs, tol.rel * |I|)`. At most
/// `tol.max_iter` bisections are performed; running out is an error rather
/// than a partial result.
pub fn integrate<T, F>(f: F, lo: T, hi: T, tol: Tolerance<T>) -> Result<T>
where
    T: Real,
    F: Fn(T) -> T,
{
    tol.validate()?;
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidInterval {
            lo: to_f64(lo),
            hi: to_f64(hi),
        });
    }
    if lo == hi {
        return Ok(T::zero());
    }

    let mut segments = vec![kronrod15(&f, lo, hi)?];
    let mut subdivisions = 0;
    loop {
        let total = segments.iter().fold(T::zero(), |acc, s| acc + s.value);
        let error = segments.iter().fold(T::zero(), |acc, s| acc + s.error);
        if error <= tol.abs.max(tol.rel * total.abs()) {
            return Ok(total);
        }
        if subdivisions >= tol.max_iter {
            return Err(Error::QuadratureNoConvergence {
                subdivisions,
                estimate: to_f64(total),
                error: to_f64(error),
            });
        }

        let (worst, _) =
            segments
                .iter()
                .enumerate()
                .fold((0, T::neg_infinity()), |(bi, be), (i, s)| {
                    if s.error > be {
                        (i, s.error)
                    } else {
                        (bi, be)
                    }
                });
        let seg = segments.swap_remove(worst);
        let mid = seg.lo + (seg.hi - seg.lo) * lit(0.5);
        if mid <= seg.lo || mid >= seg.hi {
            // interval no longer splittable in this precision
            return Err(Error::QuadratureNoConvergence {
                subdivisions,
                estimate: to_f64(total),
                error: to_f64(error),
            });
        }
        segments.push(kronrod15(&f, seg.lo, mid)?);
        segments.push(kronrod15(&f, mid, seg.hi)?);
        subdivisions += 1;
    }
}
