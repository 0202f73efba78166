//! Noise cross-correlations: the covariance positivity test and the PQRS
//! boundary path in the plane Γ_AB = Γ_AC.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::Qubit;

/// Slack on [`psd_value`] that still admits boundary points.
pub const PSD_TOL: f64 = 1e-12;

/// Local rate `gamma` shared by all qubits plus the three pairwise
/// cross-correlations, all in the same inverse-time units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSpec {
    pub gamma: f64,
    pub gamma_ab: f64,
    pub gamma_ac: f64,
    pub gamma_bc: f64,
}

impl CorrelationSpec {
    pub fn new(gamma: f64, gamma_ab: f64, gamma_ac: f64, gamma_bc: f64) -> Self {
        Self { gamma, gamma_ab, gamma_ac, gamma_bc }
    }

    pub fn uncorrelated(gamma: f64) -> Self {
        Self::new(gamma, 0.0, 0.0, 0.0)
    }

    /// Spec from normalized coordinates `(Γ_AB/γ, Γ_AC/γ, Γ_BC/γ)`.
    pub fn from_coords(gamma: f64, coords: [f64; 3]) -> Self {
        Self::new(gamma, gamma * coords[0], gamma * coords[1], gamma * coords[2])
    }

    pub fn coords(&self) -> [f64; 3] {
        [self.gamma_ab / self.gamma, self.gamma_ac / self.gamma, self.gamma_bc / self.gamma]
    }

    /// Cross-correlation between two distinct qubits (symmetric).
    pub fn pair(&self, i: Qubit, j: Qubit) -> f64 {
        match (i.0.min(j.0), i.0.max(j.0)) {
            (0, 1) => self.gamma_ab,
            (0, 2) => self.gamma_ac,
            (1, 2) => self.gamma_bc,
            _ => panic!("no cross-correlation for qubits {i} and {j}"),
        }
    }

    /// Noise covariance `K` with `K_ii = γ` and `K_ij = Γ_ij`.
    pub fn covariance(&self) -> [[f64; 3]; 3] {
        let g = self.gamma;
        [
            [g, self.gamma_ab, self.gamma_ac],
            [self.gamma_ab, g, self.gamma_bc],
            [self.gamma_ac, self.gamma_bc, g],
        ]
    }

    pub fn is_valid(&self) -> bool {
        is_valid(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(Error::InvalidCorrelation(format!("gamma must be positive, got {}", self.gamma)));
        }
        for (name, v) in [("AB", self.gamma_ab), ("AC", self.gamma_ac), ("BC", self.gamma_bc)] {
            if !v.is_finite() || v.abs() > self.gamma {
                return Err(Error::InvalidCorrelation(format!("|Gamma_{name}| = {} exceeds gamma = {}", v.abs(), self.gamma)));
            }
        }
        let det = psd_value(self);
        if det < -PSD_TOL {
            return Err(Error::InvalidCorrelation(format!("covariance not positive semi-definite (determinant {det:e})")));
        }
        Ok(())
    }
}

impl fmt::Display for CorrelationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.coords();
        write!(f, "gamma={} ({a}, {b}, {c})", self.gamma)
    }
}

/// `γ³ − γΓ_AB² − γΓ_AC² − γΓ_BC² + 2Γ_AB Γ_AC Γ_BC`, the determinant of
/// the noise covariance.
pub fn psd_value(spec: &CorrelationSpec) -> f64 {
    let CorrelationSpec { gamma: g, gamma_ab: ab, gamma_ac: ac, gamma_bc: bc } = *spec;
    g * g * g - g * ab * ab - g * ac * ac - g * bc * bc + 2.0 * ab * ac * bc
}

/// Every pairwise correlation within `[-γ, γ]` and a non-negative
/// covariance determinant.
pub fn is_valid(spec: &CorrelationSpec) -> bool {
    let g = spec.gamma;
    g > 0.0
        && [spec.gamma_ab, spec.gamma_ac, spec.gamma_bc].iter().all(|v| v.abs() <= g)
        && psd_value(spec) >= -PSD_TOL
}

/// Named points on the PQRS path, plus the uncorrelated origin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NamedPoint {
    P,
    Q,
    R,
    S,
    Origin,
}

impl NamedPoint {
    pub const ALL: [NamedPoint; 5] = [NamedPoint::P, NamedPoint::Q, NamedPoint::R, NamedPoint::S, NamedPoint::Origin];

    pub fn coords(self) -> [f64; 3] {
        match self {
            NamedPoint::P => [0.0, 0.0, -1.0],
            NamedPoint::Q => [1.0, 1.0, 1.0],
            NamedPoint::R => [-1.0, -1.0, 1.0],
            NamedPoint::S => [-0.5, -0.5, -0.5],
            NamedPoint::Origin => [0.0, 0.0, 0.0],
        }
    }

    /// Path parameter of the point, `None` for the origin.
    pub fn path_s(self) -> Option<f64> {
        match self {
            NamedPoint::P => Some(0.0),
            NamedPoint::Q => Some(S_Q),
            NamedPoint::R => Some(S_R),
            NamedPoint::S => Some(1.0),
            NamedPoint::Origin => None,
        }
    }

    pub fn spec(self, gamma: f64) -> CorrelationSpec {
        CorrelationSpec::from_coords(gamma, self.coords())
    }
}

impl fmt::Display for NamedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            NamedPoint::P => "P",
            NamedPoint::Q => "Q",
            NamedPoint::R => "R",
            NamedPoint::S => "S",
            NamedPoint::Origin => "O",
        };
        f.write_str(name)
    }
}

impl FromStr for NamedPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "P" => Ok(NamedPoint::P),
            "Q" => Ok(NamedPoint::Q),
            "R" => Ok(NamedPoint::R),
            "S" => Ok(NamedPoint::S),
            "O" | "0" | "ORIGIN" => Ok(NamedPoint::Origin),
            other => Err(Error::Config(format!("unknown correlation point {other:?}"))),
        }
    }
}

/// Path parameter of Q.
pub const S_Q: f64 = 2.0 / 7.0;
/// Path parameter of R.
pub const S_R: f64 = 6.0 / 7.0;

/// Total |Δx| of the three legs (1 + 2 + 1/2).
const PATH_LENGTH: f64 = 3.5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathPoint {
    pub s: f64,
    /// `(Γ_AB/γ, Γ_AC/γ, Γ_BC/γ)`
    pub coords: [f64; 3],
}

impl PathPoint {
    pub fn spec(&self, gamma: f64) -> CorrelationSpec {
        CorrelationSpec::from_coords(gamma, self.coords)
    }
}

/// Point on the boundary curve P → Q → R → S.
///
/// With `x = Γ_AB/γ = Γ_AC/γ` the boundary splits into `z = 2x² − 1` and
/// `z = 1`. The legs are P→Q on the parabola (x: 0 → 1), Q→R on the line
/// (x: 1 → −1) and R→S on the parabola (x: −1 → −½); `s` is proportional to
/// the cumulative `|Δx|`.
pub fn path_pqrs(s: f64) -> Result<PathPoint> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::OutOfRange(format!("path parameter s = {s} outside [0, 1]")));
    }
    let snap = |v: f64, target: f64| if (v - target).abs() <= 4.0 * f64::EPSILON { target } else { v };
    let len = snap(snap(s * PATH_LENGTH, 1.0), 3.0);
    let (x, on_parabola) = if len <= 1.0 {
        (len, true)
    } else if len <= 3.0 {
        (2.0 - len, false)
    } else {
        (len - 4.0, true)
    };
    let z = if on_parabola { 2.0 * x * x - 1.0 } else { 1.0 };
    Ok(PathPoint { s, coords: [x, x, z] })
}

/// `n` uniform samples of `s` on `[0, 1]` merged with the parameters of Q
/// and R, so that all four named points are always on the grid.
pub fn path_grid(n: usize) -> Vec<f64> {
    let mut grid: Vec<f64> = match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|k| k as f64 / (n - 1) as f64).collect(),
    };
    grid.extend([0.0, S_Q, S_R, 1.0]);
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    grid
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn det3(m: [[f64; 3]; 3]) -> f64 {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    #[test]
    fn psd_examples() {
        assert_eq!(psd_value(&CorrelationSpec::new(1.0, 0.0, 0.0, 0.0)), 1.0);
        assert_eq!(psd_value(&CorrelationSpec::new(1.0, 1.0, 1.0, 1.0)), 0.0);
        assert_eq!(psd_value(&CorrelationSpec::new(1.0, -1.0, -1.0, -1.0)), -4.0);
    }

    #[test]
    fn validity_examples() {
        assert!(is_valid(&NamedPoint::P.spec(1.0)));
        assert!(is_valid(&NamedPoint::P.spec(2.5)));
        assert!(!is_valid(&CorrelationSpec::new(1.0, 1.0, 1.0, -1.0)));
        assert!(is_valid(&CorrelationSpec::new(1.0, 0.5, 0.5, 0.5)));
        assert!(!is_valid(&CorrelationSpec::new(1.0, 1.2, 0.0, 0.0)));
        assert!(!is_valid(&CorrelationSpec::new(0.0, 0.0, 0.0, 0.0)));
        for p in NamedPoint::ALL {
            assert!(p.spec(1.0).validate().is_ok(), "{p}");
        }
        assert!(CorrelationSpec::new(1.0, -1.0, -1.0, -1.0).validate().is_err());
    }

    #[test]
    fn path_named_points() {
        assert_eq!(path_pqrs(0.0).unwrap().coords, [0.0, 0.0, -1.0]);
        assert_eq!(path_pqrs(2.0 / 7.0).unwrap().coords, [1.0, 1.0, 1.0]);
        assert_eq!(path_pqrs(6.0 / 7.0).unwrap().coords, [-1.0, -1.0, 1.0]);
        assert_eq!(path_pqrs(1.0).unwrap().coords, [-0.5, -0.5, -0.5]);
        for p in [NamedPoint::P, NamedPoint::Q, NamedPoint::R, NamedPoint::S] {
            assert_eq!(path_pqrs(p.path_s().unwrap()).unwrap().coords, p.coords());
        }
        assert!(path_pqrs(-0.01).is_err());
        assert!(path_pqrs(1.01).is_err());
    }

    #[test]
    fn grid_contains_named_points() {
        let g = path_grid(41);
        assert_eq!(g.len(), 43);
        for s in [0.0, S_Q, S_R, 1.0] {
            assert!(g.contains(&s));
        }
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    proptest! {
        #[test]
        fn path_lies_on_boundary(s in 0.0f64..=1.0) {
            let p = path_pqrs(s).unwrap();
            prop_assert_eq!(p.coords[0], p.coords[1]);
            let spec = p.spec(1.0);
            prop_assert!(psd_value(&spec).abs() <= 1e-12);
            prop_assert!(is_valid(&spec));
        }

        // Leg speeds are 3.5 in x and up to 4·3.5 = 14 in z on the parabolic legs.
        #[test]
        fn path_is_lipschitz(s in 0.0f64..0.999, delta in 1e-9f64..1e-3) {
            let a = path_pqrs(s).unwrap().coords;
            let b = path_pqrs((s + delta).min(1.0)).unwrap().coords;
            prop_assert!((a[0] - b[0]).abs() <= 3.5 * delta + 1e-12);
            prop_assert!((a[2] - b[2]).abs() <= 14.0 * delta + 1e-12);
        }

        #[test]
        fn psd_matches_determinant(g in 0.01f64..10.0, a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0) {
            let spec = CorrelationSpec::from_coords(g, [a, b, c]);
            let det = det3(spec.covariance());
            prop_assert!((psd_value(&spec) - det).abs() <= 1e-12 * g.powi(3).max(1.0));
        }
    }
}
