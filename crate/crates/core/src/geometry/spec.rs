//! JSON domain spec files.
//!
//! ```json
//! { "ambient": {"center": [0, 0], "radius": 1},
//!   "obstacles": [ {"type": "segment", "a": [0.5, 0], "b": [0.9, 0]},
//!                  {"type": "arc", "center": [0.5, 0], "radius": 0.1, "theta": [-3.0, 3.0]},
//!                  {"type": "disk", "center": [0, 0.5], "radius": 0.05},
//!                  {"type": "polygon", "vertices": [[0,0],[0.1,0],[0,0.1]], "filled": true} ],
//!   "label": "example" }
//! ```
//!
//! Segments too short to survive the endpoint form (both endpoints round to
//! the same float) are written as `{"type": "segment", "center": [..],
//! "direction": theta, "half_length": h}`, and arcs whose gap is too narrow
//! for the angle form as `{"type": "arc", "center": [..], "radius": r,
//! "gap_direction": [x, y], "gap_half_angle": g}`. Either form is accepted
//! on input.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Arc, Domain, Obstacle, Point, Segment};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmbientSpec {
    pub center: Point,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ObstacleSpec {
    Disk {
        center: Point,
        radius: f64,
    },
    Segment {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        a: Option<Point>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        b: Option<Point>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Point>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        direction: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        half_length: Option<f64>,
    },
    Arc {
        center: Point,
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theta: Option<[f64; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gap_direction: Option<Point>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gap_half_angle: Option<f64>,
    },
    Polygon {
        vertices: Vec<Point>,
        #[serde(default)]
        filled: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub ambient: AmbientSpec,
    #[serde(default)]
    pub obstacles: Vec<ObstacleSpec>,
    #[serde(default)]
    pub label: String,
}

impl ObstacleSpec {
    pub fn build(&self) -> Result<Obstacle> {
        match self {
            ObstacleSpec::Disk { center, radius } => Obstacle::disk(*center, *radius),
            ObstacleSpec::Segment {
                a,
                b,
                center,
                direction,
                half_length,
            } => match (a, b, center, direction, half_length) {
                (Some(a), Some(b), None, None, None) => Obstacle::segment(*a, *b),
                (None, None, Some(c), Some(t), Some(h)) => Segment::centered(*c, *t, *h).map(Obstacle::Segment),
                _ => Err(Error::InvalidObstacle(
                    "segment needs either `a`/`b` or `center`/`direction`/`half_length`".into(),
                )),
            },
            ObstacleSpec::Arc {
                center,
                radius,
                theta,
                gap_direction,
                gap_half_angle,
            } => match (theta, gap_direction, gap_half_angle) {
                (Some(t), None, None) => Obstacle::arc(*center, *radius, t[0], t[1]),
                (None, Some(g), Some(h)) => Arc::with_gap(*center, *radius, *g, *h).map(Obstacle::Arc),
                _ => Err(Error::InvalidObstacle(
                    "arc needs either `theta` or `gap_direction`/`gap_half_angle`".into(),
                )),
            },
            ObstacleSpec::Polygon { vertices, filled } => Obstacle::polygon(vertices.clone(), *filled),
        }
    }

    pub fn from_obstacle(o: &Obstacle) -> Self {
        match o {
            Obstacle::Disk { center, radius } => ObstacleSpec::Disk {
                center: *center,
                radius: *radius,
            },
            Obstacle::Segment(s) => {
                let (a, b) = (s.a(), s.b());
                let exact = Segment::new(a, b).map(|t| {
                    (t.half_length() - s.half_length()).abs() <= 1e-12 * s.half_length()
                        && t.mid().dist(s.mid()) <= 1e-12 * s.half_length()
                });
                if exact.unwrap_or(false) {
                    ObstacleSpec::Segment {
                        a: Some(a),
                        b: Some(b),
                        center: None,
                        direction: None,
                        half_length: None,
                    }
                } else {
                    ObstacleSpec::Segment {
                        a: None,
                        b: None,
                        center: Some(s.mid()),
                        direction: Some(s.direction().angle()),
                        half_length: Some(s.half_length()),
                    }
                }
            }
            Obstacle::Arc(arc) => {
                let theta = [arc.theta_min(), arc.theta_max()];
                let exact = Arc::new(arc.center(), arc.radius(), theta[0], theta[1]).map(|t| {
                    (t.half_gap() - arc.half_gap()).abs() <= 1e-12 * arc.half_gap()
                        && t.gap_direction().dist(arc.gap_direction()) <= 1e-12 * arc.half_gap()
                });
                if exact.unwrap_or(false) {
                    ObstacleSpec::Arc {
                        center: arc.center(),
                        radius: arc.radius(),
                        theta: Some(theta),
                        gap_direction: None,
                        gap_half_angle: None,
                    }
                } else {
                    ObstacleSpec::Arc {
                        center: arc.center(),
                        radius: arc.radius(),
                        theta: None,
                        gap_direction: Some(arc.gap_direction()),
                        gap_half_angle: Some(arc.half_gap()),
                    }
                }
            }
            Obstacle::Polygon(p) => ObstacleSpec::Polygon {
                vertices: p.vertices().to_vec(),
                filled: p.filled(),
            },
        }
    }
}

impl DomainSpec {
    pub fn build(&self) -> Result<Domain> {
        let obstacles = self
            .obstacles
            .iter()
            .map(ObstacleSpec::build)
            .collect::<Result<Vec<_>>>()?;
        Domain::new(self.ambient.center, self.ambient.radius, obstacles, self.label.clone())
    }

    pub fn from_domain(d: &Domain) -> Self {
        DomainSpec {
            ambient: AmbientSpec {
                center: d.ambient_center(),
                radius: d.ambient_radius(),
            },
            obstacles: d.obstacles().iter().map(ObstacleSpec::from_obstacle).collect(),
            label: d.label().to_string(),
        }
    }
}

impl Domain {
    pub fn from_json(text: &str) -> Result<Domain> {
        let spec: DomainSpec = serde_json::from_str(text)?;
        spec.build()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&DomainSpec::from_domain(self))?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Domain> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Domain::from_json(&text).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}
