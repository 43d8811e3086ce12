//! Built-in manifolds addressable by name from configuration files.

use serde::{Deserialize, Serialize};

use super::manifold::{ChartManifold, CubicSpline, Profile};
use crate::scalar::Real;

/// Names accepted by [`ManifoldSpec`].
pub const MANIFOLD_NAMES: &[(&str, &str)] = &[
    ("sphere", "round sphere (radius) in colatitude/longitude"),
    ("flat_torus", "flat torus (periods)"),
    ("revolution", "surface of revolution (profile: cosh | polynomial | spline)"),
    ("perturbed_torus", "flat torus with a conformal bump (amplitude, center, width)"),
    ("ellipsoid", "ellipsoid (a, b, c) in colatitude/longitude"),
];

fn one() -> f64 {
    1.0
}

fn unit_periods() -> [f64; 2] {
    [1.0, 1.0]
}

fn default_z_range() -> [f64; 2] {
    [-3.0, 3.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileSpec {
    Cosh,
    Polynomial { coeffs: Vec<f64> },
    Spline { z: Vec<f64>, r: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum ManifoldSpec {
    Sphere {
        #[serde(default = "one")]
        radius: f64,
    },
    FlatTorus {
        #[serde(default = "unit_periods")]
        periods: [f64; 2],
    },
    Revolution {
        profile: ProfileSpec,
        #[serde(default = "default_z_range")]
        z_range: [f64; 2],
        #[serde(default)]
        curvature_bound: Option<f64>,
        #[serde(default)]
        injectivity_floor: Option<f64>,
    },
    PerturbedTorus {
        #[serde(default = "unit_periods")]
        periods: [f64; 2],
        amplitude: f64,
        center: [f64; 2],
        width: f64,
    },
    Ellipsoid {
        a: f64,
        b: f64,
        c: f64,
    },
}

impl ManifoldSpec {
    /// Instantiates the manifold; fails on inconsistent parameters.
    pub fn build<T: Real>(&self) -> Result<ChartManifold<T>, String> {
        let t = T::lit;
        let positive = |x: f64, what: &str| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(format!("{what} must be positive, got {x}"))
            }
        };
        Ok(match self {
            ManifoldSpec::Sphere { radius } => {
                positive(*radius, "radius")?;
                ChartManifold::sphere(t(*radius))
            }
            ManifoldSpec::FlatTorus { periods } => {
                positive(periods[0], "period")?;
                positive(periods[1], "period")?;
                ChartManifold::flat_torus([t(periods[0]), t(periods[1])])
            }
            ManifoldSpec::Revolution { profile, z_range, curvature_bound, injectivity_floor } => {
                if z_range[1] <= z_range[0] {
                    return Err("z_range must be increasing".into());
                }
                let range = (t(z_range[0]), t(z_range[1]));
                match profile {
                    ProfileSpec::Cosh => {
                        let mut m = ChartManifold::catenoid(range);
                        if let Some(k) = curvature_bound {
                            m.curvature_bound = t(*k);
                        }
                        if let Some(i) = injectivity_floor {
                            m.injectivity_floor = t(*i);
                            m.horizon = Some(t(*i));
                        }
                        m
                    }
                    other => {
                        let (Some(k), Some(i)) = (curvature_bound, injectivity_floor) else {
                            return Err("polynomial and spline profiles must declare curvature_bound and injectivity_floor".into());
                        };
                        positive(*i, "injectivity_floor")?;
                        let p = match other {
                            ProfileSpec::Polynomial { coeffs } => {
                                Profile::Polynomial(coeffs.iter().map(|&c| t(c)).collect())
                            }
                            ProfileSpec::Spline { z, r } => Profile::Spline(
                                CubicSpline::new(z.iter().map(|&x| t(x)).collect(), r.iter().map(|&x| t(x)).collect())
                                    .ok_or("spline needs >= 3 increasing knots with matching values")?,
                            ),
                            ProfileSpec::Cosh => unreachable!(),
                        };
                        // the profile must stay positive on the working range
                        for i in 0..=256 {
                            let z = z_range[0] + (z_range[1] - z_range[0]) * i as f64 / 256.0;
                            if p.eval(t(z)).0 <= T::zero() {
                                return Err(format!("profile is not positive at z = {z}"));
                            }
                        }
                        ChartManifold::revolution(p, range, t(*k), t(*i))
                    }
                }
            }
            ManifoldSpec::PerturbedTorus { periods, amplitude, center, width } => {
                positive(periods[0], "period")?;
                positive(periods[1], "period")?;
                positive(*width, "width")?;
                if *amplitude <= -1.0 {
                    return Err("amplitude must exceed -1".into());
                }
                ChartManifold::perturbed_torus(
                    [t(periods[0]), t(periods[1])],
                    t(*amplitude),
                    [t(center[0]), t(center[1])],
                    t(*width),
                )
            }
            ManifoldSpec::Ellipsoid { a, b, c } => {
                positive(*a, "a")?;
                positive(*b, "b")?;
                positive(*c, "c")?;
                ChartManifold::ellipsoid(t(*a), t(*b), t(*c))
            }
        })
    }
}
