//! Report types and deterministic JSON output.
//!
//! Floats are written with 17 significant digits in exponent form so that
//! identical runs produce byte-identical files. Non-finite values become `null`.

use std::collections::BTreeMap;
use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::{CurvError, Result};
use crate::hermitian::ClassificationReport;
use crate::verify::{HermitianStatus, IdentityResult, SchurStatistics, Session, Tag};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManifoldInfo {
    pub name: String,
    pub dimension: usize,
    pub parameters: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportConfig {
    pub points: usize,
    pub planes: usize,
    pub vectors: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub suite: String,
}

/// Worst-case spec invariants over the sampled points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationSummary {
    pub points: usize,
    pub symmetry_residual: f64,
    pub positive_definite: bool,
    /// `None` when the manifold has no `J`.
    pub hermitian_residual: Option<f64>,
    pub hermitian_compatible: Option<bool>,
    pub passed: bool,
}

impl ValidationSummary {
    pub fn from_session(session: &Session<'_>) -> ValidationSummary {
        let symmetry_residual = session
            .points
            .iter()
            .map(|p| p.validation.symmetry_residual)
            .fold(0.0, f64::max);
        let positive_definite = session
            .points
            .iter()
            .all(|p| p.validation.positive_definite);
        let (hermitian_residual, hermitian_compatible) = match session.hermitian_status {
            HermitianStatus::Absent => (None, None),
            HermitianStatus::Compatible(r) => (Some(r), Some(true)),
            HermitianStatus::Incompatible(r) => (Some(r), Some(false)),
        };
        let riemannian_ok = session.points.iter().all(|p| p.validation.riemannian_ok());
        ValidationSummary {
            points: session.points.len(),
            symmetry_residual,
            positive_definite,
            hermitian_residual,
            hermitian_compatible,
            passed: riemannian_ok && hermitian_compatible != Some(false),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Skipped {
    pub tag: Tag,
    pub reason: String,
    pub hypothesis_note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub manifold: ManifoldInfo,
    pub config: ReportConfig,
    pub validation: ValidationSummary,
    pub classification: Option<ClassificationReport>,
    pub identities: Vec<IdentityResult>,
    pub schur: Option<SchurStatistics>,
    pub skipped: Vec<Skipped>,
    pub warnings: Vec<String>,
    pub all_passed: bool,
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        to_json_string(self)
    }

    /// Human-readable summary, one line per check.
    pub fn summary_lines(&self) -> Vec<String> {
        let mut out = vec![format!(
            "manifold {} (dimension {}), {} points, seed {}, tol {:e}",
            self.manifold.name,
            self.manifold.dimension,
            self.config.points,
            self.config.seed,
            self.config.tolerance
        )];
        let v = &self.validation;
        out.push(format!(
            "validation: {} (symmetry {:.3e}, positive definite {}, hermitian {})",
            if v.passed { "PASS" } else { "FAIL" },
            v.symmetry_residual,
            v.positive_definite,
            match v.hermitian_residual {
                None => "n/a".to_string(),
                Some(r) => format!("{r:.3e}"),
            }
        ));
        if let Some(c) = &self.classification {
            for (name, r) in c.entries() {
                out.push(format!(
                    "class {name:<14} {:<13} residual {:.3e}",
                    format!("{:?}", r.verdict).to_uppercase(),
                    r.residual
                ));
            }
        }
        for r in &self.identities {
            out.push(format!(
                "{:<6} {} max residual {:.3e} over {} samples",
                r.tag.as_str(),
                if r.pass { "PASS" } else { "FAIL" },
                r.max_residual,
                r.samples
            ));
        }
        if let Some(s) = &self.schur {
            out.push(format!(
                "schur  {} spreads: nu {:.3e}, tau {:.3e}, tau' {:.3e}, (n+1)tau-3tau' {:.3e}",
                if s.pass { "PASS" } else { "FAIL" },
                s.spread_nu_formula,
                s.spread_tau,
                s.spread_tau_prime,
                s.spread_lemma_quantity
            ));
        }
        for s in &self.skipped {
            out.push(format!("{:<6} SKIPPED: {}", s.tag.as_str(), s.reason));
        }
        for w in &self.warnings {
            out.push(format!("warning: {w}"));
        }
        out
    }
}

/// Pretty printer with fixed 17-significant-digit floats.
pub struct FixedFloatFormatter<'a> {
    inner: PrettyFormatter<'a>,
}

impl Default for FixedFloatFormatter<'_> {
    fn default() -> Self {
        FixedFloatFormatter {
            inner: PrettyFormatter::new(),
        }
    }
}

impl Formatter for FixedFloatFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object_value(writer)
    }
}

pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloatFormatter::default());
    value
        .serialize(&mut ser)
        .map_err(|e| CurvError::Io(e.to_string()))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| CurvError::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Sample {
        a: f64,
        b: Vec<f64>,
        c: Option<f64>,
    }

    #[test]
    fn floats_use_seventeen_digits() {
        let s = to_json_string(&Sample {
            a: 0.1,
            b: vec![24.0, -0.25],
            c: None,
        })
        .unwrap();
        assert!(s.contains("\"a\": 1.0000000000000001e-1"), "{s}");
        assert!(s.contains("2.4000000000000000e1"), "{s}");
        assert!(s.contains("-2.5000000000000000e-1"), "{s}");
        assert!(s.contains("\"c\": null"), "{s}");
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["a"].as_f64().unwrap(), 0.1);
    }

    #[test]
    fn non_finite_values_become_null() {
        let s = to_json_string(&vec![f64::NAN, f64::INFINITY, 1.0]).unwrap();
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert!(back[0].is_null() && back[1].is_null());
        assert_eq!(back[2].as_f64(), Some(1.0));
    }
}
