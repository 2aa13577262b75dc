//! Run configuration documents and their load-time validation.

use std::path::Path;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::bbform::{BBDoc, BeauvilleBogomolovForm};
use crate::candyn::KsOptions;
use crate::dynsys::{OrbitOptions, System, SystemDoc, DEFAULT_BIT_CAP};
use crate::error::{Error, Result};
use crate::exactreal::{IntPolynomial, RationalInterval};
use crate::heights::{bits_for_tolerance, MultiProjPoint};
use crate::nslattice::{LatticeDoc, PullbackMap, RationalCone, TopIntersectionForm};
use crate::projbundle::{dichotomy_classify, BundleDoc, BundleEndoData};
use crate::serde_util::{BigIntRepr, RationalRepr};

/// A point as a list of projective factors.
pub type PointDoc = Vec<Vec<BigIntRepr>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunOptions {
    pub orbit_n: usize,
    pub tate_n: usize,
    pub window_radius: usize,
    /// Eigenvector enclosure width `10^-eigen_digits`.
    pub eigen_digits: u32,
    /// Logarithm enclosure width `10^-log_digits`.
    pub log_digits: u32,
    /// House bound for point enumeration.
    pub house_bound: u64,
    pub max_period: usize,
    /// Logarithmic height above which an orbit counts as escaped.
    pub escape_height: f64,
    pub cap_bits: u64,
    /// Worker threads for sweeps; 0 picks the number of cores.
    pub workers: usize,
    pub fibered_slack: f64,
    /// Divisor classes as weights on the factor hyperplane classes.
    pub classes: Vec<Vec<RationalRepr>>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            orbit_n: 25,
            tate_n: 8,
            window_radius: 2,
            eigen_digits: 8,
            log_digits: 12,
            house_bound: 3,
            max_period: 6,
            escape_height: 30.0,
            cap_bits: DEFAULT_BIT_CAP,
            workers: 0,
            fibered_slack: 0.05,
            classes: Vec::new(),
        }
    }
}

impl RunOptions {
    pub fn log_bits(&self) -> u32 {
        bits_for_tolerance(10f64.powi(-(self.log_digits as i32)))
    }

    pub fn eigen_eps(&self) -> BigRational {
        crate::scalar::ten_pow_neg(self.eigen_digits)
    }

    pub fn orbit_options(&self) -> OrbitOptions {
        OrbitOptions {
            cap_bits: self.cap_bits,
            log_bits: self.log_bits(),
            classes: self
                .classes
                .iter()
                .map(|c| c.iter().map(|x| RationalInterval::point(x.0.clone())).collect())
                .collect(),
        }
    }
}

/// Machine-checkable facts asserted when a config is loaded.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Invariants {
    /// Characteristic polynomial of the pullback, low degree first.
    pub char_poly: Option<Vec<i64>>,
    /// A polynomial vanishing at `λ₁`, low degree first.
    pub lambda1_root_of: Option<Vec<i64>>,
    pub automorphism: Option<bool>,
    /// Every bundle entry describes data some endomorphism can realize.
    pub bundles_consistent: Option<bool>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub system: Option<SystemDoc>,
    #[serde(default)]
    pub points: Vec<PointDoc>,
    #[serde(default)]
    pub options: RunOptions,
    #[serde(default)]
    pub lattice: Option<LatticeDoc>,
    #[serde(default)]
    pub bb: Option<BBDoc>,
    #[serde(default)]
    pub bundles: Vec<BundleDoc>,
    #[serde(default)]
    pub invariants: Invariants,
}

/// A validated configuration with every document built.
#[derive(Clone, Debug)]
pub struct LoadedConfig {
    pub doc: RunConfig,
    pub system: Option<System>,
    pub points: Vec<MultiProjPoint>,
    pub lattice: Option<(TopIntersectionForm, PullbackMap, RationalCone)>,
    pub bb: Option<BeauvilleBogomolovForm>,
    pub bundles: Vec<BundleEndoData>,
}

fn config_err(msg: impl std::fmt::Display) -> Error {
    Error::InvalidInput(format!("config: {msg}"))
}

impl RunConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(config_err)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        Self::from_json(&s)
    }

    /// Build every document and assert the declared invariants.
    pub fn validate(self) -> Result<LoadedConfig> {
        let system = self.system.as_ref().map(SystemDoc::build).transpose()?;
        let points = self
            .points
            .iter()
            .map(|p| MultiProjPoint::new(p.iter().map(|f| f.iter().map(|x| x.0.clone()).collect()).collect()))
            .collect::<Result<Vec<_>>>()?;
        if let Some(s) = &system {
            for p in &points {
                s.check_locus(p).map_err(|e| config_err(format!("point {p}: {e}")))?;
            }
            let k = s.factor_count();
            if let Some(c) = self.options.classes.iter().find(|c| c.len() != k) {
                return Err(config_err(format!("divisor class {c:?} needs {k} weights")));
            }
        } else if !points.is_empty() {
            return Err(config_err("points given without a system"));
        }
        if let (Some(SystemDoc::Wehler { .. }), Some(System::Wehler(w))) = (&self.system, &system) {
            if let Some(cone) = self.system.as_ref().and_then(SystemDoc::cone) {
                if cone.ambient_dim() != w.gram().rows() {
                    return Err(config_err("cone dimension does not match the lattice"));
                }
            }
        }
        let lattice = self.lattice.as_ref().map(LatticeDoc::build).transpose()?;
        let bb = self.bb.as_ref().map(BBDoc::build).transpose()?;
        let bundles = self.bundles.iter().map(BundleDoc::build).collect::<Result<Vec<_>>>()?;
        self.check_invariants(system.as_ref(), &bundles)?;
        Ok(LoadedConfig {
            doc: self,
            system,
            points,
            lattice,
            bb,
            bundles,
        })
    }

    fn check_invariants(&self, system: Option<&System>, bundles: &[BundleEndoData]) -> Result<()> {
        let inv = &self.invariants;
        let needs_system = inv.char_poly.is_some() || inv.lambda1_root_of.is_some() || inv.automorphism.is_some();
        let sys = match system {
            Some(s) => s,
            None if needs_system => return Err(config_err("invariants refer to a missing system")),
            None => return self.check_bundles(bundles),
        };
        if let Some(cp) = &inv.char_poly {
            let got = sys.pullback_matrix()?.matrix.charpoly();
            if got != IntPolynomial::from_i64(cp) {
                return Err(config_err(format!("characteristic polynomial is {}, expected {cp:?}", got.pretty())));
            }
        }
        if let Some(q) = &inv.lambda1_root_of {
            if !sys.lambda1()?.is_root_of(&IntPolynomial::from_i64(q)) {
                return Err(config_err(format!("λ₁ is not a root of {q:?}")));
            }
        }
        if let Some(a) = inv.automorphism {
            if sys.is_automorphism() != a {
                return Err(config_err(format!("automorphism flag is {}, expected {a}", sys.is_automorphism())));
            }
        }
        self.check_bundles(bundles)
    }

    fn check_bundles(&self, bundles: &[BundleEndoData]) -> Result<()> {
        if let Some(want) = self.invariants.bundles_consistent {
            for (i, b) in bundles.iter().enumerate() {
                if dichotomy_classify(b).consistent != want {
                    return Err(config_err(format!("bundle {i}: consistency differs from {want}")));
                }
            }
        }
        Ok(())
    }
}

impl LoadedConfig {
    pub fn load(path: &Path) -> Result<Self> {
        RunConfig::read(path)?.validate()
    }

    pub fn load_doc(doc: RunConfig) -> Result<Self> {
        doc.validate()
    }

    pub fn options(&self) -> &RunOptions {
        &self.doc.options
    }

    pub fn system(&self) -> Result<&System> {
        self.system.as_ref().ok_or_else(|| config_err("no system given"))
    }

    pub fn point(&self, i: usize) -> Result<&MultiProjPoint> {
        self.points.get(i).ok_or_else(|| config_err(format!("no point with index {i}")))
    }

    /// Options for the KSC report. Wehler systems bring their lattice and cone.
    pub fn ks_options(&self) -> Result<KsOptions> {
        let o = self.options();
        let mut ks = KsOptions {
            orbit_n: o.orbit_n,
            tate_n: o.tate_n,
            eigen_eps: o.eigen_eps(),
            orbit: o.orbit_options(),
            cone: None,
            form: None,
        };
        if let Some(System::Wehler(w)) = &self.system {
            ks.form = Some(TopIntersectionForm::from_gram(&w.gram().to_rational())?);
            ks.cone = self.doc.system.as_ref().and_then(SystemDoc::cone).cloned();
        }
        if let Some((form, _, cone)) = &self.lattice {
            ks.form.get_or_insert_with(|| form.clone());
            ks.cone.get_or_insert_with(|| cone.clone());
        }
        Ok(ks)
    }
}

/// Integer helper for documents.
pub fn int_point(p: &MultiProjPoint) -> PointDoc {
    p.factors()
        .iter()
        .map(|f| f.iter().cloned().map(BigIntRepr).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_explicit() {
        let c = RunConfig::from_json("{}").unwrap();
        assert_eq!(c.options, RunOptions::default());
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.contains("\"cap_bits\":1000000") && s.contains("\"tate_n\":8"));
    }

    #[test]
    fn unknown_keys_and_bad_invariants_are_rejected() {
        assert!(RunConfig::from_json(r#"{"sytem": null}"#).is_err());
        let c = RunConfig::from_json(
            r#"{"system": {"type": "power", "degree": 2, "dim": 1}, "invariants": {"char_poly": [-3, 1]}}"#,
        )
        .unwrap();
        assert!(matches!(c.validate(), Err(Error::InvalidInput(_))));
        let c = RunConfig::from_json(
            r#"{"system": {"type": "power", "degree": 2, "dim": 1}, "points": [[[1, 2, 3]]]}"#,
        )
        .unwrap();
        assert!(c.validate().is_err());
    }
}
