//! Certificate data and its JSON form.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::algebra::{ExactElement, Measure};
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::rational::{format_rational, parse_rational, Rational};

pub const CERTIFICATE_VERSION: &str = "ptc-1";

#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub weight: Rational,
    pub xi: ExactElement,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Metadata {
    /// `"sdp"` or `"zuk"`.
    pub source: String,
    pub solver_iterations: usize,
    pub denom_cap: u64,
    pub pivot_shift: Rational,
    pub threads: usize,
    pub tool_version: String,
    pub config: BTreeMap<String, String>,
}

impl Metadata {
    pub fn new(source: &str) -> Self {
        Self {
            source: source.to_string(),
            solver_iterations: 0,
            denom_cap: 0,
            pivot_shift: Rational::zero(),
            threads: 1,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config: BTreeMap::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub spec_digest: String,
    pub mu: Measure,
    pub radius: usize,
    pub ball_digest: String,
    pub kappa_input: Rational,
    pub witnesses: Vec<Witness>,
    pub residual_bound: Rational,
    pub kappa_certified: Rational,
    pub metadata: Metadata,
}

/// Serialized form; everything rational is a `"p/q"` string and group
/// elements are element keys.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateFile {
    pub version: String,
    pub spec_digest: String,
    pub mu: Vec<(String, String)>,
    pub radius: usize,
    pub ball_digest: String,
    pub kappa_input: String,
    pub witnesses: Vec<WitnessFile>,
    pub residual_bound: String,
    pub kappa_certified: String,
    pub metadata: MetadataFile,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessFile {
    pub weight: String,
    pub xi: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetadataFile {
    pub source: String,
    pub solver_iterations: usize,
    pub denom_cap: u64,
    pub pivot_shift: String,
    pub threads: usize,
    pub tool_version: String,
    #[serde(default)]
    pub config: BTreeMap<String, String>,
}

impl CertificateFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Malformed(format!("certificate: {e}")))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificate serializes");
        s.push('\n');
        s
    }

    /// Parses every field against `spec`. Does not check any mathematical
    /// claim; see [`super::verify`].
    pub fn decode(&self, spec: &GroupSpec) -> Result<Certificate> {
        if self.version != CERTIFICATE_VERSION {
            return Err(Error::Malformed(format!("unsupported certificate version {:?}", self.version)));
        }
        let mu = Measure::from_pairs(spec, &self.mu)?;
        let witnesses = self
            .witnesses
            .iter()
            .map(|w| Ok(Witness { weight: parse_rational(&w.weight)?, xi: ExactElement::from_pairs(spec, &w.xi)? }))
            .collect::<Result<Vec<_>>>()?;
        Ok(Certificate {
            spec_digest: self.spec_digest.clone(),
            mu,
            radius: self.radius,
            ball_digest: self.ball_digest.clone(),
            kappa_input: parse_rational(&self.kappa_input)?,
            witnesses,
            residual_bound: parse_rational(&self.residual_bound)?,
            kappa_certified: parse_rational(&self.kappa_certified)?,
            metadata: Metadata {
                source: self.metadata.source.clone(),
                solver_iterations: self.metadata.solver_iterations,
                denom_cap: self.metadata.denom_cap,
                pivot_shift: parse_rational(&self.metadata.pivot_shift)?,
                threads: self.metadata.threads,
                tool_version: self.metadata.tool_version.clone(),
                config: self.metadata.config.clone(),
            },
        })
    }
}

impl Certificate {
    pub fn encode(&self) -> CertificateFile {
        CertificateFile {
            version: CERTIFICATE_VERSION.to_string(),
            spec_digest: self.spec_digest.clone(),
            mu: self.mu.to_pairs(),
            radius: self.radius,
            ball_digest: self.ball_digest.clone(),
            kappa_input: format_rational(&self.kappa_input),
            witnesses: self
                .witnesses
                .iter()
                .map(|w| WitnessFile { weight: format_rational(&w.weight), xi: w.xi.to_pairs(None) })
                .collect(),
            residual_bound: format_rational(&self.residual_bound),
            kappa_certified: format_rational(&self.kappa_certified),
            metadata: MetadataFile {
                source: self.metadata.source.clone(),
                solver_iterations: self.metadata.solver_iterations,
                denom_cap: self.metadata.denom_cap,
                pivot_shift: format_rational(&self.metadata.pivot_shift),
                threads: self.metadata.threads,
                tool_version: self.metadata.tool_version.clone(),
                config: self.metadata.config.clone(),
            },
        }
    }

    pub fn to_json(&self) -> String {
        self.encode().to_json()
    }

    pub fn from_json(spec: &GroupSpec, text: &str) -> Result<Self> {
        CertificateFile::from_json(text)?.decode(spec)
    }
}
