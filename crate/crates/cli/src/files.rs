//! On-disk formats.
//!
//! Cylinders are stored frame-free as a direction and a list of generator
//! points. Reports carry a `verified` flag for human readers only; every
//! command that loads a report recomputes it.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use stabbing::{ConvexPolygon, Cylinder3, GenSpec, LineCover, Point2, RoundedBody, TransversalReport};

/// Input instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FamilyFile {
    Family {
        cylinders: Vec<Cylinder3>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        meta: Option<GenSpec>,
    },
    Bipartite {
        f: Vec<Cylinder3>,
        g: Vec<Cylinder3>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        meta: Option<GenSpec>,
    },
    Rounded {
        #[serde(rename = "D")]
        d: f64,
        bodies: Vec<RoundedBody>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        meta: Option<GenSpec>,
    },
}

impl FamilyFile {
    pub fn kind(&self) -> &'static str {
        match self {
            FamilyFile::Family { .. } => "family",
            FamilyFile::Bipartite { .. } => "bipartite",
            FamilyFile::Rounded { .. } => "rounded",
        }
    }

    /// Schema checks serde cannot express.
    pub fn validate(&self) -> Result<(), String> {
        let cylinders = |name: &str, cs: &[Cylinder3]| -> Result<(), String> {
            if cs.is_empty() {
                return Err(format!("{name} is empty"));
            }
            for (i, c) in cs.iter().enumerate() {
                c.validate().map_err(|e| format!("{name}[{i}]: {e}"))?;
            }
            Ok(())
        };
        match self {
            FamilyFile::Family { cylinders: cs, .. } => cylinders("cylinders", cs),
            FamilyFile::Bipartite { f, g, .. } => {
                cylinders("f", f)?;
                cylinders("g", g)
            }
            FamilyFile::Rounded { d, bodies, .. } => {
                if !d.is_finite() || *d < 1.0 {
                    return Err(format!("D must be a finite number at least 1, got {d}"));
                }
                if bodies.is_empty() {
                    return Err("bodies is empty".into());
                }
                for (i, b) in bodies.iter().enumerate() {
                    b.validate().map_err(|e| format!("bodies[{i}]: {e}"))?;
                }
                Ok(())
            }
        }
    }
}

/// Solver output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ReportFile {
    Transversal {
        solver: String,
        report: TransversalReport,
        verified: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        timing_ms: Option<f64>,
    },
    Cover {
        solver: String,
        cover: LineCover,
        verified: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        timing_ms: Option<f64>,
    },
}

/// Polygon input for `pierce`: a bare vertex list or `{"vertices": [...]}`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum PolygonFile {
    Bare(Vec<Point2>),
    Wrapped { vertices: Vec<Point2> },
}

impl PolygonFile {
    pub fn points(&self) -> &[Point2] {
        match self {
            PolygonFile::Bare(v) | PolygonFile::Wrapped { vertices: v } => v,
        }
    }
}

pub fn solver_id() -> String {
    format!("stabbing {}", env!("CARGO_PKG_VERSION"))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Writes `bytes` to `path` through a temporary file in the same
/// directory, so a failed run never leaves a partial file behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), String> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let fail = |e: std::io::Error| format!("{}: {e}", path.display());
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(bytes).map_err(fail)?;
    tmp.as_file().sync_all().map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), String> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn polygon_of(file: &PolygonFile) -> Result<ConvexPolygon, String> {
    stabbing::convex_hull(file.points(), Default::default()).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use stabbing::{generate, GenKind, Instance};

    fn file_of(spec: GenSpec) -> FamilyFile {
        let meta = Some(spec.clone());
        match generate(&spec).unwrap() {
            Instance::Family(cylinders) => FamilyFile::Family { cylinders, meta },
            Instance::Bipartite(f, g) => FamilyFile::Bipartite { f, g, meta },
            Instance::Rounded { d, bodies } => FamilyFile::Rounded { d, bodies, meta },
        }
    }

    #[test]
    fn family_files_round_trip() {
        for kind in [
            GenKind::CommonPoint,
            GenKind::CoplanarLines,
            GenKind::Hyperboloid,
            GenKind::Stack,
            GenKind::Rounded,
        ] {
            let file = file_of(GenSpec::new(kind, 28, 6));
            let text = serde_json::to_string_pretty(&file).unwrap();
            let back: FamilyFile = serde_json::from_str(&text).unwrap();
            assert_eq!(back, file);
            assert_eq!(serde_json::to_string_pretty(&back).unwrap(), text);
        }
    }

    #[test]
    fn report_files_round_trip() {
        let Instance::Family(cylinders) = generate(&GenSpec::new(GenKind::CommonPoint, 56, 1)).unwrap() else {
            unreachable!()
        };
        let report = stabbing::solve(&cylinders, Default::default()).unwrap();
        let file = ReportFile::Transversal {
            solver: solver_id(),
            report,
            verified: true,
            timing_ms: None,
        };
        let text = serde_json::to_string_pretty(&file).unwrap();
        let back: ReportFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back, file);
    }

    #[test]
    fn polygons_accept_both_layouts() {
        let bare: PolygonFile = serde_json::from_str("[[0, 0], [1, 0], [0, 1]]").unwrap();
        let wrapped: PolygonFile = serde_json::from_str(r#"{"vertices": [[0, 0], [1, 0], [0, 1]]}"#).unwrap();
        assert_eq!(bare.points(), wrapped.points());
        assert_eq!(polygon_of(&bare).unwrap().len(), 3);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{"kind": "family", "cylinders": [], "colour": "red"}"#;
        assert!(serde_json::from_str::<FamilyFile>(text).is_err());
        let empty: FamilyFile = serde_json::from_str(r#"{"kind": "family", "cylinders": []}"#).unwrap();
        assert!(empty.validate().is_err());
    }
}
