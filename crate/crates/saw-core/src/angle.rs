//! Angle parsing, validation, and shared trigonometric constants.
//!
//! Tilt angles are accepted as `pi`, `pi/<int>`, `<int>pi/<int>`, or a plain
//! decimal radian value, and must lie strictly inside (0, pi). The narrower
//! band [pi/3, 2pi/3], where all local weights are nonnegative, is checked
//! separately because several routines are only probabilistically meaningful
//! there.

use crate::error::{Result, SawError};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

/// Lower edge of the nonnegative-weight band.
pub const THETA_MIN: f64 = PI / 3.0;
/// Upper edge of the nonnegative-weight band.
pub const THETA_MAX: f64 = 2.0 * PI / 3.0;

/// Critical surface fugacity of the half-plane walk: 1 + sqrt(2).
pub const Y_STAR: f64 = 2.414_213_562_373_095_0;
/// cos(3*pi/8), the coefficient multiplying the arc partition sum.
pub const COS_3PI_8: f64 = 0.382_683_432_365_089_77;
/// 1 / cos(3*pi/8), the limiting value of the arc partition series.
pub const INV_COS_3PI_8: f64 = 2.613_125_929_752_753_1;
/// cos(pi/8), the winding factor of a walk ending on a slanted boundary edge.
pub const COS_PI_8: f64 = 0.923_879_532_511_286_76;
/// cos(pi/4).
pub const COS_PI_4: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Parse one angle token: `pi`, `pi/<int>`, `<int>pi/<int>`, or decimal radians.
pub fn parse_angle(token: &str) -> Result<f64> {
    let t = token.trim();
    let err = || SawError::AngleParse { token: t.to_string() };
    if t.is_empty() {
        return Err(err());
    }
    if let Some(pos) = t.find("pi") {
        let (num_s, rest) = t.split_at(pos);
        let rest = &rest[2..];
        let num: f64 = if num_s.is_empty() {
            1.0
        } else {
            num_s.parse::<i64>().map_err(|_| err())? as f64
        };
        let den: f64 = if rest.is_empty() {
            1.0
        } else {
            let d = rest.strip_prefix('/').ok_or_else(err)?;
            let d: i64 = d.parse().map_err(|_| err())?;
            if d == 0 {
                return Err(err());
            }
            d as f64
        };
        Ok(num * PI / den)
    } else {
        t.parse::<f64>().map_err(|_| err())
    }
}

/// Parse a comma-separated list of angle tokens.
pub fn parse_angle_list(s: &str) -> Result<Vec<f64>> {
    let angles: Vec<f64> = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(parse_angle)
        .collect::<Result<_>>()?;
    if angles.is_empty() {
        return Err(SawError::EmptyAngleSequence);
    }
    Ok(angles)
}

/// Parse an angle file: one token per line, `#` starts a comment.
pub fn parse_angle_file(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SawError::Invalid(format!("cannot read {}: {e}", path.display())))?;
    let mut angles = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        angles.push(parse_angle(line)?);
    }
    if angles.is_empty() {
        return Err(SawError::EmptyAngleSequence);
    }
    Ok(angles)
}

/// Require theta strictly inside (0, pi), where a rhombus is nondegenerate.
pub fn check_tilt(theta: f64) -> Result<()> {
    if theta.is_finite() && theta > 0.0 && theta < PI {
        Ok(())
    } else {
        Err(SawError::AngleRange { value: theta })
    }
}

/// True iff theta lies in the closed band [pi/3, 2pi/3] (up to rounding).
pub fn in_weight_band(theta: f64) -> bool {
    (THETA_MIN - 1e-12..=THETA_MAX + 1e-12).contains(&theta)
}

/// Deterministic sample of `n` tilts uniform on (lo, hi), for randomized checks.
pub fn sample_tilts(seed: u64, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

/// Render an angle list back to the comma-separated token form (decimal radians).
pub fn format_angle_list(angles: &[f64]) -> String {
    let mut s = String::new();
    for (i, a) in angles.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        let _ = write!(s, "{a:.17}");
    }
    s
}
