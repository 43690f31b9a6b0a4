//! The `(<A3 B1>, <A3 B2>, <A3>)` slice of the 3x2 qubit scenario over the
//! fixed CHSH-optimal block, scanned for projective and POVM third
//! measurements on Alice's side.
//!
//! Every attainable point sits in the solid bicone
//! `sqrt(x^2 + y^2) + |z| <= 1`. A third observable `alpha I + v . sigma`
//! contributes `z = alpha` (the reduced state is maximally mixed) and maps
//! the in-plane part of `v` isometrically onto `(x, y)`. Projective
//! measurements therefore reach only `z in {-1, 0, +1}`: the two apices and
//! the `z = 0` disk, with the equator circle attained by in-plane unit
//! vectors. POVM observables fill the rest of the cone surface, including the
//! interpolation axis `(0, 0, 2 lambda - 1)`.

use std::fmt;

use nalgebra::{DMatrix, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::realize::{chsh_realization, expectation, pauli_basis, Observable};
use crate::numerics::DenseComplexMatrix;

/// Classification tolerance used when scans label their points.
pub const DEFAULT_CLASS_EPS: f64 = 1e-6;

/// Parameter slack for the admissibility constraint `|alpha| + |bloch| <= 1`.
const PARAM_EPS: f64 = 1e-12;

/// Third measurement on Alice's qubit: `A3 = alpha I + bloch . sigma`.
///
/// Admissible when `|alpha| + |bloch| <= 1`, which keeps the spectrum
/// `alpha +- |bloch|` inside `[-1, 1]`. Projective exactly when the spectrum
/// is `{-1, +1}` (unit `bloch`, zero `alpha`) or the observable is `+-I`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThirdMeasurement {
    pub alpha: f64,
    pub bloch: [f64; 3],
}

impl ThirdMeasurement {
    pub fn new(alpha: f64, bloch: [f64; 3]) -> Result<Self> {
        let t = Self { alpha, bloch };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() || self.bloch.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidMeasurement("non-finite parameters".into()));
        }
        let reach = self.alpha.abs() + self.bloch_norm();
        if reach > 1.0 + PARAM_EPS {
            return Err(Error::InvalidMeasurement(format!(
                "|alpha| + |bloch| = {reach} exceeds 1"
            )));
        }
        Ok(())
    }

    pub fn bloch_norm(&self) -> f64 {
        self.bloch.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Spectrum contained in `{-1, +1}` within `1e-10`.
    pub fn is_projective(&self) -> bool {
        let norm = self.bloch_norm();
        let unit_bloch = self.alpha.abs() <= 1e-10 && (norm - 1.0).abs() <= 1e-10;
        let constant = norm <= 1e-10 && (self.alpha.abs() - 1.0).abs() <= 1e-10;
        unit_bloch || constant
    }

    /// Materialize `alpha I + bloch . sigma`.
    pub fn observable(&self) -> Result<Observable> {
        self.validate()?;
        let [sx, sy, sz] = pauli_basis();
        let mut m: DenseComplexMatrix = DMatrix::identity(2, 2) * Complex64::new(self.alpha, 0.0);
        m += sx * Complex64::new(self.bloch[0], 0.0);
        m += sy * Complex64::new(self.bloch[1], 0.0);
        m += sz * Complex64::new(self.bloch[2], 0.0);
        Observable::new(m)
    }
}

/// A point of the scanned slice: `x = <A3 B1>`, `y = <A3 B2>`, `z = <A3>`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConePoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl ConePoint {
    /// Distance from the z-axis.
    pub fn radial(&self) -> f64 {
        self.x.hypot(self.y)
    }

    /// `sqrt(x^2 + y^2) + |z|`; at most 1 for attainable points.
    pub fn cone_coordinate(&self) -> f64 {
        self.radial() + self.z.abs()
    }
}

/// Where a point sits relative to the bicone boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurfaceClass {
    Apex,
    Equator,
    LateralSurface,
    Interior,
    Exterior,
}

impl fmt::Display for SurfaceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SurfaceClass::Apex => "apex",
            SurfaceClass::Equator => "equator",
            SurfaceClass::LateralSurface => "lateral-surface",
            SurfaceClass::Interior => "interior",
            SurfaceClass::Exterior => "exterior",
        };
        f.write_str(s)
    }
}

/// Classify against the bicone `sqrt(x^2+y^2) + |z| = 1` within `eps`.
pub fn classify_point(p: &ConePoint, eps: f64) -> SurfaceClass {
    let radial = p.radial();
    let height = p.z.abs();
    if (height - 1.0).abs() <= eps && radial <= eps {
        SurfaceClass::Apex
    } else if height <= eps && (radial - 1.0).abs() <= eps {
        SurfaceClass::Equator
    } else if (radial + height - 1.0).abs() <= eps {
        SurfaceClass::LateralSurface
    } else if radial + height < 1.0 {
        SurfaceClass::Interior
    } else {
        SurfaceClass::Exterior
    }
}

/// One evaluated scan sample: parameters, image point and classification.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub alpha: f64,
    pub bloch: [f64; 3],
    pub point: ConePoint,
    pub class: SurfaceClass,
}

/// The POVM observable `(2 lambda - 1) I` interpolating the two apices.
pub fn interpolation_observable(lambda: f64) -> Result<ThirdMeasurement> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidInput(format!("lambda must lie in [0, 1], got {lambda}")));
    }
    ThirdMeasurement::new(2.0 * lambda - 1.0, [0.0; 3])
}

/// The fixed block: CHSH-optimal state and Bob observables, plus the
/// computed correlation plane.
pub struct ConeSection {
    state: nalgebra::DVector<Complex64>,
    b1: DenseComplexMatrix,
    b2: DenseComplexMatrix,
    identity_b: DenseComplexMatrix,
    plane: [Vector3<f64>; 2],
}

impl Default for ConeSection {
    fn default() -> Self {
        Self::new()
    }
}

impl ConeSection {
    pub fn new() -> Self {
        let block = chsh_realization();
        let state = block.state.clone();
        let b1 = block.bob_obs[0].matrix().clone();
        let b2 = block.bob_obs[1].matrix().clone();
        let identity_b = DMatrix::identity(2, 2);

        // Linear maps bloch -> (x, y) evaluated on the sigma basis; their
        // span is the correlation plane, orthonormalized here rather than
        // assumed from the block's convention.
        let paulis = pauli_basis();
        let image = |b: &DenseComplexMatrix| {
            Vector3::from_fn(|k, _| {
                expectation(&state, &paulis[k], b).expect("Pauli expectations are real")
            })
        };
        let t1 = image(&b1);
        let t2 = image(&b2);
        let u1 = t1 / t1.norm();
        let mut u2 = t2 - u1 * t2.dot(&u1);
        let n2 = u2.norm();
        assert!(n2 > 1e-9, "degenerate correlation plane");
        u2 /= n2;

        Self { state, b1, b2, identity_b, plane: [u1, u2] }
    }

    /// Orthonormal basis of the plane the in-plane Bloch directions map onto.
    pub fn correlation_plane(&self) -> [Vector3<f64>; 2] {
        self.plane
    }

    /// Evaluate the three expectations for one third measurement.
    pub fn cone_point(&self, t: &ThirdMeasurement) -> Result<ConePoint> {
        let obs = t.observable()?;
        let a = obs.matrix();
        Ok(ConePoint {
            x: expectation(&self.state, a, &self.b1)?,
            y: expectation(&self.state, a, &self.b2)?,
            z: expectation(&self.state, a, &self.identity_b)?,
        })
    }

    fn evaluate(&self, params: Vec<ThirdMeasurement>) -> Result<Vec<ScanPoint>> {
        params
            .into_par_iter()
            .map(|t| {
                let point = self.cone_point(&t)?;
                Ok(ScanPoint {
                    alpha: t.alpha,
                    bloch: t.bloch,
                    point,
                    class: classify_point(&point, DEFAULT_CLASS_EPS),
                })
            })
            .collect()
    }

    /// All projective third measurements on a grid: the two degenerate
    /// observables `+-I`, a Fibonacci sphere of `grid_density^2` unit Bloch
    /// vectors, and `grid_density` in-plane directions that land exactly on
    /// the equator.
    pub fn projective_scan(&self, grid_density: usize) -> Result<Vec<ScanPoint>> {
        check_grid(grid_density)?;
        let mut params = Vec::new();
        params.push(ThirdMeasurement { alpha: 1.0, bloch: [0.0; 3] });
        params.push(ThirdMeasurement { alpha: -1.0, bloch: [0.0; 3] });
        for d in fibonacci_sphere(grid_density * grid_density) {
            params.push(ThirdMeasurement { alpha: 0.0, bloch: d });
        }
        for theta in angles(grid_density) {
            params.push(ThirdMeasurement { alpha: 0.0, bloch: self.in_plane(1.0, theta) });
        }
        self.evaluate(params)
    }

    /// POVM grid over `|alpha| + |bloch| <= 1`: the interpolation axis, the
    /// lateral-surface family `alpha = +-(1 - r)` with in-plane radius `r`,
    /// an interior in-plane shell at half radius, and the full projective
    /// `alpha = 0` slice.
    pub fn povm_scan(&self, grid_density: usize) -> Result<Vec<ScanPoint>> {
        check_grid(grid_density)?;
        let g = grid_density;
        let mut params = Vec::new();

        // Interpolation axis between the apices.
        for k in 0..=2 * g {
            let alpha = (k as f64 - g as f64) / g as f64;
            params.push(ThirdMeasurement { alpha, bloch: [0.0; 3] });
        }

        // Lateral-surface family.
        for sign in [1.0, -1.0] {
            for i in 0..=g {
                let r = i as f64 / g as f64;
                let alpha = sign * (1.0 - r);
                for theta in angles(g) {
                    params.push(ThirdMeasurement { alpha, bloch: self.in_plane(r, theta) });
                }
            }
        }

        // Interior shell at half the admissible radius.
        for i in 0..=g {
            let alpha = (2.0 * i as f64 - g as f64) / g as f64;
            let r = 0.5 * (1.0 - alpha.abs());
            for theta in angles(g) {
                params.push(ThirdMeasurement { alpha, bloch: self.in_plane(r, theta) });
            }
        }

        // The alpha = 0 slice shared with the projective scan.
        for d in fibonacci_sphere(g * g) {
            params.push(ThirdMeasurement { alpha: 0.0, bloch: d });
        }

        self.evaluate(params)
    }

    fn in_plane(&self, radius: f64, theta: f64) -> [f64; 3] {
        let v = self.plane[0] * (radius * theta.cos()) + self.plane[1] * (radius * theta.sin());
        [v[0], v[1], v[2]]
    }
}

fn check_grid(grid_density: usize) -> Result<()> {
    if grid_density < 2 {
        return Err(Error::InvalidInput(format!(
            "grid density must be at least 2, got {grid_density}"
        )));
    }
    Ok(())
}

fn angles(count: usize) -> impl Iterator<Item = f64> {
    let n = count.max(1);
    (0..n).map(move |j| 2.0 * std::f64::consts::PI * j as f64 / n as f64)
}

/// Golden-angle spiral covering the unit sphere with `count` directions.
fn fibonacci_sphere(count: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
    (0..count)
        .map(|i| {
            let y = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
            let r = (1.0 - y * y).max(0.0).sqrt();
            let theta = golden * i as f64;
            [r * theta.cos(), y, r * theta.sin()]
        })
        .collect()
}
