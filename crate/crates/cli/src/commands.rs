use std::cmp::Ordering;

use arithdyn::bbform::{induced_top_form, isometry_check, isotropy_and_bigness_report, signature, IsotropyReport, Signature};
use arithdyn::candyn::{
    alpha_estimate, canonical_window, functional_equation_residual, ks_report, periodicity_test, AlphaEstimate,
    CanonicalHeightResult, CanonicalInputs, KsReport, Periodicity,
};
use arithdyn::config::{int_point, LoadedConfig, PointDoc};
use arithdyn::dynsys::{iterate_orbit, OrbitRecord, System};
use arithdyn::exactreal::width_f64;
use arithdyn::heights::{enumerate_bounded_points, MultiProjPoint};
use arithdyn::nslattice::{
    condition_a, condition_b, eigenvector_pair, hilbert_extension, middle_index_ell, spectral_radius, ConditionAReport,
    ConditionBReport, DivisorClass, EigenvectorPair, MiddleIndexReport, PullbackMap, RationalCone, TopIntersectionForm,
};
use arithdyn::projbundle::{bundle_report, BundleReport, HNType};
use arithdyn::serde_util::{BigIntRepr, RationalRepr};
use arithdyn::{Error, IntPolynomial, RationalInterval, RealAlgebraicNumber, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

fn poly_repr(p: &IntPolynomial) -> Vec<BigIntRepr> {
    p.coeffs().iter().cloned().map(BigIntRepr).collect()
}

fn dyadic(bits: u32) -> BigRational {
    BigRational::new(BigInt::from(1), BigInt::from(1) << bits as usize)
}

fn digits_eps(digits: u32) -> BigRational {
    arithdyn::scalar::ten_pow_neg(digits)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lambda1Report {
    pub system: String,
    pub is_automorphism: bool,
    /// Low degree first.
    pub char_poly: Vec<BigIntRepr>,
    /// Linear factors over ℚ followed by the remaining cofactor.
    pub char_poly_factors: Vec<Vec<BigIntRepr>>,
    /// The factor vanishing at `λ₁`.
    pub char_poly_factor: Vec<BigIntRepr>,
    pub lambda1: RealAlgebraicNumber,
    pub interval: RationalInterval,
    pub interval_width: f64,
}

fn lambda1_of(source: &str, m: &PullbackMap, auto: bool, digits: u32) -> Result<Lambda1Report> {
    let cp = m.matrix.charpoly();
    let lambda1 = spectral_radius(m)?;
    let (linear, rest) = cp.split_rational_roots();
    let mut factors = linear;
    if rest.degree().unwrap_or(0) > 0 {
        factors.push(rest);
    }
    let factor = factors
        .iter()
        .find(|f| lambda1.is_root_of(f))
        .cloned()
        // λ₁ is a modulus of a complex eigenvalue
        .unwrap_or_else(|| lambda1.poly().clone());
    let interval = lambda1.refine(&digits_eps(digits));
    Ok(Lambda1Report {
        system: source.to_string(),
        is_automorphism: auto,
        char_poly: poly_repr(&cp),
        char_poly_factors: factors.iter().map(poly_repr).collect(),
        char_poly_factor: poly_repr(&factor),
        interval_width: width_f64(&interval),
        lambda1,
        interval,
    })
}

pub fn lambda1(cfg: &LoadedConfig, digits: u32) -> Result<Lambda1Report> {
    if let Some(s) = &cfg.system {
        return lambda1_of(s.kind(), &s.pullback_matrix()?, s.is_automorphism(), digits);
    }
    if let Some((_, m, _)) = &cfg.lattice {
        return lambda1_of("lattice", m, m.is_automorphism, digits);
    }
    Err(Error::InvalidInput("config: lambda1 needs a system or a lattice".into()))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitRow {
    pub n: i64,
    pub houses: Vec<String>,
    pub h: RationalInterval,
    pub h_plus: RationalInterval,
    pub class_heights: Vec<RationalInterval>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitTable {
    pub system: String,
    pub point: PointDoc,
    pub steps_requested: i64,
    pub rows: Vec<OrbitRow>,
    pub stopped: Option<String>,
}

pub fn orbit_rows(orbit: &OrbitRecord) -> Vec<OrbitRow> {
    orbit
        .entries
        .iter()
        .map(|e| OrbitRow {
            n: e.n,
            houses: e.heights.houses.iter().map(|h| h.to_string()).collect(),
            h: e.h.clone(),
            h_plus: e.h_plus.clone(),
            class_heights: e.class_heights.clone(),
        })
        .collect()
}

pub fn orbit_csv(rows: &[OrbitRow]) -> (Vec<String>, Vec<Vec<String>>) {
    let classes = rows.first().map_or(0, |r| r.class_heights.len());
    let mut header: Vec<String> = ["n", "houses", "h_lo", "h_hi", "h_plus_lo", "h_plus_hi"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for i in 0..classes {
        header.push(format!("class{i}_lo"));
        header.push(format!("class{i}_hi"));
    }
    let body = rows
        .iter()
        .map(|r| {
            let mut v = vec![
                r.n.to_string(),
                r.houses.join(";"),
                r.h.lo().to_string(),
                r.h.hi().to_string(),
                r.h_plus.lo().to_string(),
                r.h_plus.hi().to_string(),
            ];
            for c in &r.class_heights {
                v.push(c.lo().to_string());
                v.push(c.hi().to_string());
            }
            v
        })
        .collect();
    (header, body)
}

pub fn orbit(cfg: &LoadedConfig, point: usize, steps: i64) -> Result<(OrbitTable, OrbitRecord)> {
    let sys = cfg.system()?;
    let p = cfg.point(point)?;
    let rec = iterate_orbit(sys, p, steps, &cfg.options().orbit_options())?;
    let table = OrbitTable {
        system: sys.kind().to_string(),
        point: int_point(p),
        steps_requested: steps,
        rows: orbit_rows(&rec),
        stopped: rec.stopped.as_ref().map(|e| e.to_string()),
    };
    Ok((table, rec))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphaReport {
    pub system: String,
    pub point: PointDoc,
    pub lambda1: RealAlgebraicNumber,
    pub lambda1_interval: RationalInterval,
    pub steps_requested: i64,
    pub steps_used: usize,
    pub alpha: AlphaEstimate,
    /// Every ratio `h⁺(f^{k+1}P)/h⁺(f^k P)` stays below `λ₁ (1 + 0.05)` once `k ≥ 1`.
    pub ratios_below_lambda1: bool,
    pub stopped: Option<String>,
}

pub fn alpha(cfg: &LoadedConfig, point: usize, steps: i64) -> Result<(AlphaReport, OrbitRecord)> {
    let (table, rec) = orbit(cfg, point, steps)?;
    let sys = cfg.system()?;
    let lambda1 = sys.lambda1()?;
    let lambda1_interval = lambda1.refine(&dyadic(48));
    let a = alpha_estimate(&rec, None)?;
    let cap = lambda1_interval.hi().clone() * BigRational::new(BigInt::from(105), BigInt::from(100));
    let ratios_below_lambda1 = rec.entries.windows(2).skip(1).all(|w| {
        w[1].h_plus.div(&w[0].h_plus).map_or(true, |r| r.lo() <= &cap)
    });
    Ok((
        AlphaReport {
            system: table.system.clone(),
            point: table.point.clone(),
            lambda1,
            lambda1_interval,
            steps_requested: steps,
            steps_used: rec.len() - 1,
            alpha: a,
            ratios_below_lambda1,
            stopped: table.stopped.clone(),
        },
        rec,
    ))
}

/// Eigen-classes for the Tate limits: the leading eigenvector pair for
/// automorphisms with a cone, `O(1, …, 1)` for power maps, or the first
/// configured class.
fn canonical_inputs(cfg: &LoadedConfig) -> Result<(CanonicalInputs, Option<EigenvectorPair>)> {
    let sys = cfg.system()?;
    let bits = cfg.options().log_bits() + 16;
    if sys.is_automorphism() {
        let ks = cfg.ks_options()?;
        let cone = ks
            .cone
            .ok_or_else(|| Error::Precondition("canonical heights need a cone for the eigenvectors".into()))?;
        let pair = eigenvector_pair(&sys.pullback_matrix()?, &cone, &cfg.options().eigen_eps())?;
        return Ok((CanonicalInputs::from_pair(&pair, bits), Some(pair)));
    }
    let lambda_plus = sys.lambda1()?;
    let weights_plus = match (sys, cfg.options().orbit_options().classes.first()) {
        (_, Some(c)) => c.clone(),
        (System::Power(_), None) => vec![RationalInterval::from_int(1); sys.factor_count()],
        _ => {
            return Err(Error::Precondition(
                "supply an eigen-class of the pullback in options.classes".into(),
            ))
        }
    };
    Ok((
        CanonicalInputs {
            lambda_plus,
            weights_plus,
            minus: None,
        },
        None,
    ))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowEntry {
    pub k: i64,
    pub result: CanonicalHeightResult,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResidualEntry {
    pub n: i64,
    pub residual: RationalInterval,
    pub width: f64,
    pub tolerance: f64,
    pub contains_zero: bool,
    pub within_tolerance: bool,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatioCheck {
    /// `ĥ₊(fP) / ĥ₊(P)`
    pub enclosure: RationalInterval,
    pub lambda_interval: RationalInterval,
    pub overlaps: bool,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CanhReport {
    pub system: String,
    pub point: PointDoc,
    pub lambda_plus: RealAlgebraicNumber,
    pub lambda_minus: Option<RealAlgebraicNumber>,
    pub iterations_requested: usize,
    pub iterations_used: usize,
    pub window: Vec<WindowEntry>,
    pub residuals: Vec<ResidualEntry>,
    pub ratio: Option<RatioCheck>,
    pub empirical: bool,
    pub stopped: Option<String>,
}

pub fn canh(cfg: &LoadedConfig, point: usize, n: usize, radius: usize) -> Result<CanhReport> {
    let sys = cfg.system()?;
    let p = cfg.point(point)?;
    let (inputs, _) = canonical_inputs(cfg)?;
    let w = canonical_window(sys, p, &inputs, n, radius, &cfg.options().orbit_options())?;
    let center = w.center();
    let scale = center.hhat.mid_f64().abs().max(1.0);
    let tolerance = 1e-3 * scale;
    let ns: Vec<i64> = if inputs.minus.is_some() {
        (-(radius as i64)..=radius as i64).collect()
    } else {
        (0..=radius as i64).collect()
    };
    let residuals = ns
        .into_iter()
        .map(|k| {
            let r = functional_equation_residual(&w, k)?;
            let width = width_f64(&r);
            Ok(ResidualEntry {
                n: k,
                contains_zero: r.contains_zero(),
                within_tolerance: r.contains_zero() && width <= tolerance,
                width,
                tolerance,
                residual: r,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let ratio = match (w.at(0), w.at(1)) {
        (Some(a), Some(b)) => b.plus_enclosure().div(&a.plus_enclosure()).map(|e| RatioCheck {
            overlaps: e.overlaps(&w.lambda_plus),
            enclosure: e,
            lambda_interval: w.lambda_plus.clone(),
        }),
        _ => None,
    };
    Ok(CanhReport {
        system: sys.kind().to_string(),
        point: int_point(p),
        lambda_plus: inputs.lambda_plus.clone(),
        lambda_minus: inputs.minus.as_ref().map(|(l, _)| l.clone()),
        iterations_requested: n,
        iterations_used: w.iterations_used,
        window: w
            .values
            .iter()
            .map(|(k, r)| WindowEntry { k: *k, result: r.clone() })
            .collect(),
        residuals,
        ratio,
        empirical: true,
        stopped: w.stopped.clone(),
    })
}

pub fn ks_verify(cfg: &LoadedConfig, point: usize) -> Result<KsReport> {
    ks_report(cfg.system()?, cfg.point(point)?, &cfg.ks_options()?)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodicPoint {
    pub point: PointDoc,
    pub period: usize,
    pub hhat: Option<RationalInterval>,
    pub error_bound: Option<RationalInterval>,
    /// `ĥ` widened by its error bound contains 0.
    pub hhat_zero_within_error: Option<bool>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFailure {
    pub point: PointDoc,
    pub error: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepReport {
    pub system: String,
    pub house_bound: u64,
    pub max_period: usize,
    pub escape_height: f64,
    pub points_enumerated: usize,
    pub points_on_locus: usize,
    pub periodic: Vec<PeriodicPoint>,
    /// Orbits that neither repeat nor escape within `max_period` steps, e.g.
    /// strictly preperiodic points.
    pub bounded_not_periodic: Vec<PointDoc>,
    pub failures: Vec<SweepFailure>,
}

enum Outcome {
    Periodic(PeriodicPoint),
    Bounded(PointDoc),
    Escaped,
    Failed(SweepFailure),
}

fn sort_key(p: &PointDoc) -> Vec<Vec<BigInt>> {
    p.iter().map(|f| f.iter().map(|x| x.0.clone()).collect()).collect()
}

pub fn sweep_periodic(cfg: &LoadedConfig, bound: u64, max_period: usize) -> Result<SweepReport> {
    let sys = cfg.system()?;
    let opts = cfg.options();
    let candidates: Vec<MultiProjPoint> = enumerate_bounded_points(&sys.space(), bound).collect();
    let enumerated = candidates.len();
    let on_locus: Vec<MultiProjPoint> = candidates.into_iter().filter(|p| sys.check_locus(p).is_ok()).collect();
    let inputs = match canonical_inputs(cfg) {
        Ok((i, _)) => Some(i),
        Err(Error::Precondition(_)) => None,
        Err(e) => return Err(e),
    };
    let orbit_opts = opts.orbit_options();
    let test = |p: &MultiProjPoint| -> Outcome {
        let doc = int_point(p);
        match periodicity_test(sys, p, opts.escape_height, max_period, opts.cap_bits) {
            Ok(Periodicity::Periodic { period }) => {
                let hh = inputs
                    .as_ref()
                    .map(|i| canonical_window(sys, p, i, opts.tate_n, 0, &orbit_opts).map(|w| w.center().clone()));
                match hh {
                    Some(Err(e)) => Outcome::Failed(SweepFailure {
                        point: doc,
                        error: e.to_string(),
                    }),
                    other => {
                        let r = other.map(|r| r.expect("errors handled above"));
                        Outcome::Periodic(PeriodicPoint {
                            point: doc,
                            period,
                            hhat_zero_within_error: r.as_ref().map(|r| r.enclosure().contains_zero()),
                            hhat: r.as_ref().map(|r| r.hhat.clone()),
                            error_bound: r.map(|r| r.error_bound),
                        })
                    }
                }
            }
            Ok(Periodicity::BoundedOrbitCandidate) => Outcome::Bounded(doc),
            Ok(Periodicity::NotPeriodic { .. }) => Outcome::Escaped,
            Err(e) => Outcome::Failed(SweepFailure {
                point: doc,
                error: e.to_string(),
            }),
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| Error::ResourceLimit(format!("worker pool: {e}")))?;
    let outcomes: Vec<Outcome> = pool.install(|| on_locus.par_iter().map(test).collect());
    let mut periodic = Vec::new();
    let mut bounded = Vec::new();
    let mut failures = Vec::new();
    for o in outcomes {
        match o {
            Outcome::Periodic(p) => periodic.push(p),
            Outcome::Bounded(p) => bounded.push(p),
            Outcome::Failed(f) => failures.push(f),
            Outcome::Escaped => {}
        }
    }
    periodic.sort_by(|a, b| (a.period, sort_key(&a.point)).cmp(&(b.period, sort_key(&b.point))));
    bounded.sort_by_key(sort_key);
    failures.sort_by(|a, b| sort_key(&a.point).cmp(&sort_key(&b.point)));
    Ok(SweepReport {
        system: sys.kind().to_string(),
        house_bound: bound,
        max_period,
        escape_height: opts.escape_height,
        points_enumerated: enumerated,
        points_on_locus: on_locus.len(),
        periodic,
        bounded_not_periodic: bounded,
        failures,
    })
}

/// `[(r1,d1),(r2,d2)]` or `[[r1,d1],[r2,d2]]`.
pub fn parse_hn(s: &str) -> Result<HNType> {
    let cleaned: String = s
        .chars()
        .map(|c| if "[]()".contains(c) { ' ' } else { c })
        .collect();
    let nums = cleaned
        .split(',')
        .map(|t| t.trim())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<i64>().map_err(|e| Error::InvalidInput(format!("bad HN entry {t:?}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    if nums.is_empty() || nums.len() % 2 != 0 {
        return Err(Error::InvalidInput("HN type must be a list of (rank, degree) pairs".into()));
    }
    let pieces = nums
        .chunks(2)
        .map(|c| {
            u32::try_from(c[0])
                .map(|r| (r, c[1]))
                .map_err(|_| Error::InvalidInput(format!("rank {} must be positive", c[0])))
        })
        .collect::<Result<Vec<_>>>()?;
    HNType::from_i64(&pieces)
}

pub struct BundleArgs {
    pub n: Option<usize>,
    pub deg_g: Option<i64>,
    pub delta: Option<String>,
    pub hn: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BundleOutput {
    One(Box<BundleReport>),
    Many(Vec<BundleReport>),
}

pub fn bundle(cfg: &LoadedConfig, args: &BundleArgs, bits: u32) -> Result<BundleOutput> {
    let given = args.hn.is_some() || args.deg_g.is_some() || args.delta.is_some();
    if !given {
        if cfg.doc.bundles.is_empty() {
            return Err(Error::InvalidInput("bundle analyze needs --hn/--deg-g/--delta or config bundles".into()));
        }
        let reports = cfg
            .doc
            .bundles
            .iter()
            .map(|b| bundle_report(&b.hn, b.deg_g.0.clone(), b.delta.0.clone(), bits))
            .collect::<Result<Vec<_>>>()?;
        return Ok(BundleOutput::Many(reports));
    }
    let missing = |what: &str| Error::InvalidInput(format!("bundle analyze: missing --{what}"));
    let hn = parse_hn(args.hn.as_deref().ok_or_else(|| missing("hn"))?)?;
    let deg_g = args.deg_g.ok_or_else(|| missing("deg-g"))?;
    let delta = arithdyn::serde_util::parse_rational(args.delta.as_deref().ok_or_else(|| missing("delta"))?)
        .map_err(Error::InvalidInput)?;
    if let Some(n) = args.n {
        if n != hn.rank() {
            return Err(Error::InvalidInput(format!("--n {n} differs from the HN rank {}", hn.rank())));
        }
    }
    Ok(BundleOutput::One(Box::new(bundle_report(&hn, deg_g.into(), delta, bits)?)))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Quadratic {
    pub exact_zero: bool,
    pub enclosure: RationalInterval,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenSummary {
    pub lambda_plus: RealAlgebraicNumber,
    pub lambda_minus: RealAlgebraicNumber,
    pub shared_lambda: bool,
    pub nu_plus: DivisorClass,
    pub nu_minus: DivisorClass,
    pub cone_invariant: bool,
    /// Top self-intersection of `ν₊`.
    pub self_power_plus: Quadratic,
    pub self_power_minus: Quadratic,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeReport {
    pub source: String,
    pub rank: usize,
    pub dim_x: usize,
    pub lambda1: RealAlgebraicNumber,
    pub preserves_form: bool,
    pub condition_a: Option<ConditionAReport>,
    pub eigenvectors: Option<EigenSummary>,
    pub condition_b: Option<ConditionBReport>,
    pub middle_index: Option<MiddleIndexReport>,
    pub hilbert_lambda1_equal: Option<bool>,
    pub warnings: Vec<String>,
}

fn self_power(form: &TopIntersectionForm, pair: &EigenvectorPair, plus: bool, bits: u32) -> Quadratic {
    let d = if plus { &pair.nu_plus } else { &pair.nu_minus };
    let args: Vec<&[IntPolynomial]> = (0..form.dim()).map(|_| d.exact_coords()).collect();
    Quadratic {
        exact_zero: pair.exact_sign(form, &args) == Some(Ordering::Equal),
        enclosure: form.self_power_interval(&d.enclosure_at(bits).coords),
    }
}

pub fn lattice(cfg: &LoadedConfig, digits: u32) -> Result<LatticeReport> {
    let (source, form, map, cone): (String, TopIntersectionForm, PullbackMap, Option<RationalCone>) =
        match (&cfg.lattice, &cfg.system) {
            (Some((f, m, c)), _) => ("lattice".into(), f.clone(), m.clone(), Some(c.clone())),
            (None, Some(s @ System::Wehler(w))) => (
                s.kind().into(),
                w.form()?,
                s.pullback_matrix()?,
                cfg.ks_options()?.cone,
            ),
            _ => return Err(Error::InvalidInput("config: lattice needs a lattice or a Wehler system".into())),
        };
    let bits = arithdyn::heights::bits_for_tolerance(10f64.powi(-(digits as i32))).max(64);
    let eps = cfg.options().eigen_eps();
    let mut warnings = Vec::new();
    let lambda1 = spectral_radius(&map)?;
    let preserves_form = map.preserves_form(&form);
    let mut report = LatticeReport {
        source,
        rank: form.rank(),
        dim_x: form.dim(),
        lambda1,
        preserves_form,
        condition_a: None,
        eigenvectors: None,
        condition_b: None,
        middle_index: None,
        hilbert_lambda1_equal: None,
        warnings: Vec::new(),
    };
    if !map.is_automorphism {
        warnings.push("not an automorphism: Conditions A and B are not evaluated".into());
        report.warnings = warnings;
        return Ok(report);
    }
    let ca = condition_a(&map)?;
    let hilbert = hilbert_extension(&map)?;
    report.hilbert_lambda1_equal = Some(spectral_radius(&hilbert)?.cmp_value(&report.lambda1) == Ordering::Equal);
    match cone {
        Some(cone) if ca.holds => {
            let pair = eigenvector_pair(&map, &cone, &eps)?;
            report.eigenvectors = Some(EigenSummary {
                lambda_plus: pair.lambda_plus.clone(),
                lambda_minus: pair.lambda_minus.clone(),
                shared_lambda: pair.shared_lambda,
                nu_plus: pair.nu_plus.class.clone(),
                nu_minus: pair.nu_minus.class.clone(),
                cone_invariant: pair.nu_plus.cone_invariant && pair.nu_minus.cone_invariant,
                self_power_plus: self_power(&form, &pair, true, bits),
                self_power_minus: self_power(&form, &pair, false, bits),
            });
            report.condition_b = Some(condition_b(&form, &pair, &cone)?);
            report.middle_index = Some(middle_index_ell(&form, &pair, bits)?);
        }
        Some(_) => warnings.push("Condition A fails: no eigenvector pair".into()),
        None => warnings.push("no cone supplied: eigenvectors not computed".into()),
    }
    report.condition_a = Some(ca);
    report.warnings = warnings;
    Ok(report)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsometryPart {
    pub preserves_form: bool,
    pub lambda1: RealAlgebraicNumber,
    pub isotropy: Option<IsotropyReport>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChowReport {
    pub rank: usize,
    pub half_dim: usize,
    pub fujiki_c: RationalRepr,
    pub signature: Signature,
    pub hyperbolic: bool,
    /// Dimension of the variety carrying the induced top form.
    pub top_form_dim: usize,
    pub isometry: Option<IsometryPart>,
    pub warnings: Vec<String>,
}

pub fn chow(cfg: &LoadedConfig, digits: u32) -> Result<ChowReport> {
    let doc = cfg
        .doc
        .bb
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("config: chow needs a bb section".into()))?;
    let bb = cfg.bb.as_ref().expect("validated with the document");
    let bits = arithdyn::heights::bits_for_tolerance(10f64.powi(-(digits as i32))).max(64);
    let mut warnings = Vec::new();
    let isometry = match doc.isometry_map()? {
        Some(m) => {
            let preserves_form = isometry_check(&m, bb);
            let lambda1 = spectral_radius(&m)?;
            let isotropy = match (&doc.cone, preserves_form && m.is_automorphism) {
                (Some(cone), true) => {
                    let pair = eigenvector_pair(&m, cone, &cfg.options().eigen_eps())?;
                    Some(isotropy_and_bigness_report(bb, &pair, bits)?)
                }
                (None, _) => {
                    warnings.push("no cone supplied: isotropy not evaluated".into());
                    None
                }
                (_, false) => {
                    warnings.push("the map is not an automorphic isometry".into());
                    None
                }
            };
            Some(IsometryPart {
                preserves_form,
                lambda1,
                isotropy,
            })
        }
        None => None,
    };
    Ok(ChowReport {
        rank: bb.rank(),
        half_dim: bb.half_dim(),
        fujiki_c: RationalRepr(bb.fujiki_c().clone()),
        signature: signature(bb.gram())?,
        hyperbolic: bb.is_hyperbolic(),
        top_form_dim: induced_top_form(bb).dim(),
        isometry,
        warnings,
    })
}
