use std::f64::consts::PI;

use crate::{NumericsError, Result, C64};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const LN_PI: f64 = 1.144_729_885_849_400_2;

/// Principal branch of log Γ(z).
pub fn log_gamma(z: C64) -> Result<C64> {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Err(NumericsError::Domain(format!("log_gamma pole at {}", z.re)));
    }
    if z.re < 0.5 {
        // log Γ(z) = log π − log sin(πz) − log Γ(1−z), with the 2πi branch
        // shift that keeps the result continuous (principal log Γ).
        let shift = (0.5 * z.re + 0.25).floor() * 2.0 * PI * z.im.signum();
        let shift = if z.im == 0.0 { 0.0 } else { shift };
        let rest = log_gamma(C64::new(1.0, 0.0) - z)?;
        return Ok(C64::new(LN_PI, shift) - sinpi(z).ln() - rest);
    }
    let zm = z - 1.0;
    let mut a = C64::new(LANCZOS[0], 0.0);
    for (k, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (zm + k as f64);
    }
    let t = zm + LANCZOS_G + 0.5;
    Ok(LN_SQRT_2PI + (zm + 0.5) * t.ln() - t + a.ln())
}

fn sinpi(z: C64) -> C64 {
    // reduce the real part so sin(πz) keeps relative accuracy near integers
    let r = z.re - 2.0 * (0.5 * z.re).round();
    (C64::new(r, z.im) * PI).sin()
}

pub fn gamma(z: C64) -> Result<C64> {
    Ok(log_gamma(z)?.exp())
}
