//! Order-2 cylinder functions at complex argument.
//!
//! Power series (with the logarithmic series for Y) for |z| <= CROSSOVER and the
//! Hankel large-argument expansions beyond it. Arguments with Re z < 0 in the
//! asymptotic region are reflected to -z so the expansions stay away from the
//! Stokes lines.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::{NumericsError, Result, C64};

const CROSSOVER: f64 = 12.0;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselKind {
    J2,
    Y2,
    H1_2,
}

pub fn cyl_bessel(kind: BesselKind, z: C64) -> Result<C64> {
    Ok(pick(kind, order_n(2, z, kind != BesselKind::J2)?))
}

/// Derivative with respect to z, from Z₂' = Z₁ − (2/z) Z₂.
pub fn cyl_bessel_deriv(kind: BesselKind, z: C64) -> Result<C64> {
    if z == C64::new(0.0, 0.0) {
        return match kind {
            BesselKind::J2 => Ok(C64::new(0.0, 0.0)),
            _ => Err(NumericsError::Domain("Y2'/H1_2' undefined at z = 0".into())),
        };
    }
    let need_y = kind != BesselKind::J2;
    let z1 = pick(kind, order_n(1, z, need_y)?);
    let z2 = pick(kind, order_n(2, z, need_y)?);
    Ok(z1 - z2 * 2.0 / z)
}

struct Triple {
    j: C64,
    y: C64,
    h1: C64,
}

fn pick(kind: BesselKind, t: Triple) -> C64 {
    match kind {
        BesselKind::J2 => t.j,
        BesselKind::Y2 => t.y,
        BesselKind::H1_2 => t.h1,
    }
}

fn order_n(n: u32, z: C64, need_y: bool) -> Result<Triple> {
    if !z.is_finite() {
        return Err(NumericsError::Domain(format!("non-finite Bessel argument {z}")));
    }
    if z.norm() <= CROSSOVER {
        let j = jn_series(n, z);
        if !need_y {
            return Ok(Triple { j, y: C64::new(f64::NAN, 0.0), h1: C64::new(f64::NAN, 0.0) });
        }
        if z == C64::new(0.0, 0.0) {
            return Err(NumericsError::Domain("Y/H of order 2 is singular at z = 0".into()));
        }
        let y = yn_series(n, z, j);
        return Ok(Triple { j, y, h1: j + C64::i() * y });
    }
    if z.re >= 0.0 {
        let (h1, h2) = hankel_asym(n, z);
        let j = (h1 + h2) * 0.5;
        let y = (h1 - h2) / C64::new(0.0, 2.0);
        return Ok(Triple { j, y, h1 });
    }
    // z = w e^{iπ}: J_n(z) = (−1)^n J_n(w), Y_n(z) = (−1)^n (Y_n(w) + 2i J_n(w)),
    // H1_n(z) = −(−1)^n H2_n(w)
    let w = -z;
    let (h1w, h2w) = hankel_asym(n, w);
    let jw = (h1w + h2w) * 0.5;
    let yw = (h1w - h2w) / C64::new(0.0, 2.0);
    let s = if n % 2 == 0 { 1.0 } else { -1.0 };
    Ok(Triple { j: jw * s, y: (yw + C64::i() * jw * 2.0) * s, h1: -h2w * s })
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(|v| v as f64).product()
}

fn jn_series(n: u32, z: C64) -> C64 {
    let half = z * 0.5;
    let q = -(half * half);
    let mut term = half.powu(n) / factorial(n);
    let mut sum = term;
    let mut k = 0u32;
    loop {
        k += 1;
        term = term * q / (k as f64 * (k + n) as f64);
        sum += term;
        if k as f64 > z.norm() && term.norm() <= 1e-17 * sum.norm() {
            break;
        }
        if k > 400 {
            break;
        }
    }
    sum
}

fn yn_series(n: u32, z: C64, jn: C64) -> C64 {
    let half = z * 0.5;
    let q = half * half;
    let mut head = C64::new(0.0, 0.0);
    for k in 0..n {
        head += q.powu(k) * (factorial(n - k - 1) / factorial(k));
    }
    head = -head / (half.powu(n) * PI);

    let log_term = half.ln() * jn * (2.0 / PI);

    let harmonic = |m: u32| -> f64 { (1..=m).map(|v| 1.0 / v as f64).sum() };
    let mut term = C64::new(1.0 / factorial(n), 0.0);
    let mut sum = term * (harmonic(0) + harmonic(n) - 2.0 * EULER_GAMMA);
    let mut k = 0u32;
    loop {
        k += 1;
        term = term * (-q) / (k as f64 * (k + n) as f64);
        let t = term * (harmonic(k) + harmonic(k + n) - 2.0 * EULER_GAMMA);
        sum += t;
        if k as f64 > z.norm() && t.norm() <= 1e-17 * sum.norm() {
            break;
        }
        if k > 400 {
            break;
        }
    }
    let tail = -half.powu(n) * sum / PI;
    head + log_term + tail
}

/// Hankel expansions H1, H2 of integer order n, valid for Re z >= 0, |z| large.
fn hankel_asym(n: u32, z: C64) -> (C64, C64) {
    let mu = 4.0 * (n * n) as f64;
    let pre = (C64::new(2.0 / PI, 0.0) / z).sqrt();
    let chi = z - (n as f64) * FRAC_PI_2 - FRAC_PI_4;
    let mut s1 = C64::new(1.0, 0.0);
    let mut s2 = C64::new(1.0, 0.0);
    let mut a = C64::new(1.0, 0.0);
    let mut last = f64::INFINITY;
    for k in 1..200u32 {
        let odd = (2 * k - 1) as f64;
        a = a * ((mu - odd * odd) / (8.0 * k as f64)) / z;
        let mag = a.norm();
        if mag > last {
            break;
        }
        let ik = C64::i().powu(k);
        s1 += a * ik;
        s2 += a * ik.conj();
        last = mag;
        if mag < 1e-17 {
            break;
        }
    }
    let e1 = (C64::i() * chi).exp();
    let e2 = (-C64::i() * chi).exp();
    (pre * e1 * s1, pre * e2 * s2)
}

#[cfg(test)]
mod tests {
    use super::*;

    // mpmath.besselj(2, z), mpmath.bessely(2, z) at 30 digits
    const ORACLE: [(C64, C64, C64); 10] = [
        (C64::new(1.0, 0.0), C64::new(0.114_903_484_931_900_48, 0.0), C64::new(-1.650_682_606_816_254_4, 0.0)),
        (C64::new(3.0, 2.0), C64::new(1.221_309_098_878_201_3, 0.125_946_272_384_649_72), C64::new(-0.184_232_345_651_093_81, 1.170_448_544_195_522_8)),
        (C64::new(11.5, 0.5), C64::new(0.028_759_929_893_380_193, -0.121_358_970_085_147_32), C64::new(0.264_593_321_218_389_29, 0.008_456_075_978_169_106_5)),
        (C64::new(-8.0, 6.0), C64::new(-7.198_365_053_119_595, -45.041_356_219_526_04), C64::new(45.040_877_660_132_838, -7.198_877_945_548_921_3)),
        (C64::new(12.5, 1.0), C64::new(-0.271_148_979_054_317_81, -0.158_563_644_223_931_79), C64::new(0.215_691_676_718_812_04, -0.209_054_705_416_869_5)),
        (C64::new(20.0, 1.5), C64::new(-0.367_799_565_494_395_42, 0.180_927_413_616_771_42), C64::new(-0.197_305_050_367_132_76, -0.331_169_811_351_601_32)),
        (C64::new(-60.0, 2.0), C64::new(0.352_151_877_603_778_13, -0.154_600_051_438_760_96), C64::new(0.148_390_869_236_398_32, 0.364_649_027_880_164_2)),
        (C64::new(100.0, 1.5), C64::new(-0.051_853_492_354_873_855, -0.163_162_908_565_044_06), C64::new(0.180_346_970_238_804_6, -0.047_177_555_609_185_974)),
        (C64::new(0.5, 7.0), C64::new(-109.682_238_752_453_95, 57.970_443_229_145_297), C64::new(-57.970_143_372_924_457, -109.682_053_992_072_84)),
        (C64::new(-2.0, 0.3), C64::new(0.357_902_019_121_692_79, -0.068_255_840_770_918_076), C64::new(-0.470_278_926_673_839_98, 0.566_475_015_191_362_3)),
    ];

    #[test]
    fn oracle_values() {
        for (z, j, y) in ORACLE {
            let gj = cyl_bessel(BesselKind::J2, z).unwrap();
            let gy = cyl_bessel(BesselKind::Y2, z).unwrap();
            assert!((gj - j).norm() <= 1e-10 * j.norm(), "J2({z}) = {gj}, want {j}");
            assert!((gy - y).norm() <= 1e-10 * y.norm(), "Y2({z}) = {gy}, want {y}");
        }
    }

    #[test]
    fn small_argument_limit() {
        let z = C64::new(1e-4, 0.0);
        let v = cyl_bessel(BesselKind::J2, z).unwrap() / (z * z);
        assert!((v.re - 0.125).abs() < 1e-8);
    }

    #[test]
    fn zero_argument() {
        let z = C64::new(0.0, 0.0);
        assert_eq!(cyl_bessel(BesselKind::J2, z).unwrap(), z);
        assert!(cyl_bessel(BesselKind::Y2, z).is_err());
        assert!(cyl_bessel(BesselKind::H1_2, z).is_err());
    }

    #[test]
    fn wronskian() {
        for z in [C64::new(0.5, 0.0), C64::new(1.0, 1.0), C64::new(10.0, 3.0)] {
            let h = 1e-4 * z.norm();
            let d = |k: BesselKind| {
                let f = |s: f64| cyl_bessel(k, z + h * s).unwrap();
                (f(-2.0) - f(-1.0) * 8.0 + f(1.0) * 8.0 - f(2.0)) / (12.0 * h)
            };
            let j = cyl_bessel(BesselKind::J2, z).unwrap();
            let y = cyl_bessel(BesselKind::Y2, z).unwrap();
            let w = j * d(BesselKind::Y2) - y * d(BesselKind::J2);
            assert!((z * w - 2.0 / PI).norm() <= 1e-8, "{z}: {}", z * w);
        }
    }

    #[test]
    fn derivative_matches_difference() {
        for z in [C64::new(0.7, 0.2), C64::new(14.0, 2.0), C64::new(-20.0, 1.0)] {
            for k in [BesselKind::J2, BesselKind::Y2, BesselKind::H1_2] {
                let h = 1e-4 * z.norm();
                let f = |s: f64| cyl_bessel(k, z + h * s).unwrap();
                let fd = (f(-2.0) - f(-1.0) * 8.0 + f(1.0) * 8.0 - f(2.0)) / (12.0 * h);
                let d = cyl_bessel_deriv(k, z).unwrap();
                assert!((d - fd).norm() <= 1e-8 * d.norm().max(1.0), "{k:?} {z}");
            }
        }
    }

    #[test]
    fn hankel_composition() {
        for z in [C64::new(2.0, 0.5), C64::new(11.9, 0.1), C64::new(30.0, 2.0), C64::new(-40.0, 0.5)] {
            let j = cyl_bessel(BesselKind::J2, z).unwrap();
            let y = cyl_bessel(BesselKind::Y2, z).unwrap();
            let h = cyl_bessel(BesselKind::H1_2, z).unwrap();
            assert!((h - j - C64::i() * y).norm() <= 1e-12 * j.norm().max(y.norm()));
        }
    }

    #[test]
    fn branches_agree_at_crossover() {
        for arg in [0.0, 0.4, 1.2, 2.0, 2.9] {
            let z = C64::from_polar(CROSSOVER, arg);
            let series_j = jn_series(2, z);
            let series_y = yn_series(2, z, series_j);
            let (h1, h2) = if z.re >= 0.0 { hankel_asym(2, z) } else {
                let (a, b) = hankel_asym(2, -z);
                let jw = (a + b) * 0.5;
                let yw = (a - b) / C64::new(0.0, 2.0);
                let (j, y) = (jw, yw + C64::i() * jw * 2.0);
                (j + C64::i() * y, j - C64::i() * y)
            };
            let aj = (h1 + h2) * 0.5;
            let ay = (h1 - h2) / C64::new(0.0, 2.0);
            assert!((series_j - aj).norm() <= 1e-10 * aj.norm().max(1e-300), "J arg {arg}");
            assert!((series_y - ay).norm() <= 1e-10 * ay.norm(), "Y arg {arg}");
        }
    }
}
