//! Canonical heights by Tate limits, arithmetic-degree estimators,
//! functional-equation residuals, periodicity and the comparison report
//! between arithmetic and dynamical degrees.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::dynsys::{iterate_orbit, OrbitOptions, OrbitPoint, OrbitRecord, System};
use crate::error::{Error, Result};
use crate::exactreal::algebraic::width_f64;
use crate::exactreal::{RationalInterval, RealAlgebraicNumber};
use crate::heights::{h_plus, FactoredCoord, MultiProjPoint};
use crate::linalg::Matrix;
use crate::nslattice::{condition_a, condition_b, eigenvector_pair, EigenvectorPair, RationalCone, TopIntersectionForm, Verdict};

fn dyadic(bits: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << bits as usize)
}

/// Working precision for interval products.
const GRID_BITS: u32 = 96;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlphaEstimate {
    pub n: usize,
    /// `(h⁺(f^N P) / h⁺(P))^{1/N}`.
    pub root_estimate: RationalInterval,
    /// `h⁺(f^N P)^{1/N}`.
    pub root_estimate_raw: RationalInterval,
    /// `h⁺(f^N P) / h⁺(f^{N-1} P)`.
    pub ratio_estimate: RationalInterval,
}

fn class_h_plus(orbit: &OrbitRecord, k: usize, class: Option<usize>) -> Result<RationalInterval> {
    let e = &orbit.entries[k];
    match class {
        None => Ok(e.h_plus.clone()),
        Some(c) => e
            .class_heights
            .get(c)
            .map(h_plus)
            .ok_or_else(|| Error::invalid(format!("orbit has no class {c}"))),
    }
}

/// Estimators for `α_f(P)` from the last entries of an orbit, using the
/// ample class `O(1, ..., 1)` when `class` is `None`.
pub fn alpha_estimate(orbit: &OrbitRecord, class: Option<usize>) -> Result<AlphaEstimate> {
    if orbit.len() < 3 {
        return Err(Error::invalid("alpha estimates need an orbit of length at least 3"));
    }
    let n = orbit.len() - 1;
    let tol = dyadic(48);
    let last = class_h_plus(orbit, n, class)?;
    let prev = class_h_plus(orbit, n - 1, class)?;
    let first = class_h_plus(orbit, 0, class)?;
    let ratio = last.div(&prev).expect("h⁺ ≥ 1").round_outward(GRID_BITS);
    let norm = last.div(&first).expect("h⁺ ≥ 1").round_outward(GRID_BITS);
    Ok(AlphaEstimate {
        n,
        root_estimate: norm.nth_root(n as u32, &tol).expect("positive"),
        root_estimate_raw: last.nth_root(n as u32, &tol).expect("positive"),
        ratio_estimate: ratio,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Backward,
}

/// `λ^{-N} h_D(f^{±N} P)` with the empirical Tate bound.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TateLimit {
    pub value: RationalInterval,
    pub error_bound: RationalInterval,
    /// `max_k |h_D(f^{k+1} P) - λ h_D(f^k P)|` over the computed orbit.
    pub tate_constant_estimate: RationalInterval,
    pub iterations_requested: usize,
    pub iterations_used: usize,
    pub empirical: bool,
    pub stopped: Option<String>,
}

impl TateLimit {
    /// The value widened by the error bound.
    pub fn enclosure(&self) -> RationalInterval {
        widen(&self.value, &self.error_bound)
    }
}

fn widen(v: &RationalInterval, err: &RationalInterval) -> RationalInterval {
    let e = err.hi().clone();
    RationalInterval::new(v.lo() - &e, v.hi() + &e)
}

fn lambda_interval(lambda: &RealAlgebraicNumber, n: usize) -> RationalInterval {
    lambda.refine(&dyadic(GRID_BITS + 8 * n as u32))
}

/// Tate data from a height sequence `hs[k] = h_D(f^k P)` at step `n`.
struct TateData {
    value: RationalInterval,
    c: RationalInterval,
    error: RationalInterval,
}

fn tate_from_heights(hs: &[RationalInterval], lam: &RationalInterval, n: usize) -> TateData {
    let c = hs
        .windows(2)
        .map(|w| (w[1].clone() - lam.clone() * w[0].clone()).abs())
        .reduce(|a, b| a.max(&b))
        .unwrap_or_else(RationalInterval::zero)
        .round_outward(GRID_BITS);
    let inv_pow = lam.powz(-(n as i64)).expect("λ > 1").round_outward(GRID_BITS + 8 * n as u32);
    let value = (inv_pow.clone() * hs[n].clone()).round_outward(GRID_BITS);
    // λ / (λ - 1) = 1 / (1 - λ^{-1})
    let geom = lam
        .div(&(lam.clone() - RationalInterval::one()))
        .expect("λ > 1");
    let error = (c.clone() * inv_pow * geom).round_outward(GRID_BITS);
    TateData { value, c, error }
}

fn check_lambda(lambda: &RealAlgebraicNumber) -> Result<()> {
    if lambda.cmp_rational(&BigRational::one()) != Ordering::Greater {
        return Err(Error::precondition("Tate limits need λ > 1"));
    }
    Ok(())
}

/// `λ^{-N} h_D(f^{±N} P)` for the class with factor weights `weights`.
pub fn tate_limit(
    system: &System,
    p: &MultiProjPoint,
    weights: &[RationalInterval],
    lambda: &RealAlgebraicNumber,
    n: usize,
    direction: Direction,
    opts: &OrbitOptions,
) -> Result<TateLimit> {
    check_lambda(lambda)?;
    let steps = match direction {
        Direction::Forward => n as i64,
        Direction::Backward => -(n as i64),
    };
    let o = OrbitOptions {
        classes: vec![weights.to_vec()],
        ..opts.clone()
    };
    let orbit = iterate_orbit(system, p, steps, &o)?;
    let hs: Vec<RationalInterval> = orbit.entries.iter().map(|e| e.class_heights[0].clone()).collect();
    let used = hs.len() - 1;
    if used == 0 {
        return Err(orbit.stopped.unwrap_or_else(|| Error::ResourceLimit("no iterate computed".into())));
    }
    let lam = lambda_interval(lambda, used);
    let t = tate_from_heights(&hs, &lam, used);
    Ok(TateLimit {
        value: t.value,
        error_bound: t.error,
        tate_constant_estimate: t.c,
        iterations_requested: n,
        iterations_used: used,
        empirical: true,
        stopped: orbit.stopped.map(|e| e.to_string()),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CanonicalHeightResult {
    pub hhat_plus: RationalInterval,
    pub hhat_minus: RationalInterval,
    pub hhat: RationalInterval,
    pub iterations_used: usize,
    pub tate_constant_estimate: RationalInterval,
    /// `C λ^{-N} / (1 - λ^{-1})`, summed over both directions.
    pub error_bound: RationalInterval,
    pub plus_error: RationalInterval,
    pub minus_error: RationalInterval,
    pub empirical: bool,
}

impl CanonicalHeightResult {
    pub fn enclosure(&self) -> RationalInterval {
        widen(&self.hhat, &self.error_bound)
    }

    pub fn plus_enclosure(&self) -> RationalInterval {
        widen(&self.hhat_plus, &self.plus_error)
    }
}

/// Eigenvalues and factor weights of the classes `D₊`, `D₋`.
#[derive(Clone, Debug)]
pub struct CanonicalInputs {
    pub lambda_plus: RealAlgebraicNumber,
    pub weights_plus: Vec<RationalInterval>,
    /// Absent for non-invertible maps, where `ĥ₋ := 0`.
    pub minus: Option<(RealAlgebraicNumber, Vec<RationalInterval>)>,
}

impl CanonicalInputs {
    pub fn from_pair(pair: &EigenvectorPair, bits: u32) -> Self {
        CanonicalInputs {
            lambda_plus: pair.lambda_plus.clone(),
            weights_plus: pair.nu_plus.enclosure_at(bits).coords,
            minus: Some((pair.lambda_minus.clone(), pair.nu_minus.enclosure_at(bits).coords)),
        }
    }
}

/// Canonical heights of `f^k P` for `|k| ≤ radius`, all from one forward and
/// one backward orbit of length `N + radius`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CanonicalWindow {
    pub lambda_plus: RationalInterval,
    pub lambda_minus: Option<RationalInterval>,
    pub radius: usize,
    pub iterations_requested: usize,
    pub iterations_used: usize,
    pub values: BTreeMap<i64, CanonicalHeightResult>,
    pub stopped: Option<String>,
}

impl CanonicalWindow {
    pub fn at(&self, k: i64) -> Option<&CanonicalHeightResult> {
        self.values.get(&k)
    }

    pub fn center(&self) -> &CanonicalHeightResult {
        &self.values[&0]
    }
}

pub fn canonical_window(
    system: &System,
    p: &MultiProjPoint,
    inputs: &CanonicalInputs,
    n: usize,
    radius: usize,
    opts: &OrbitOptions,
) -> Result<CanonicalWindow> {
    check_lambda(&inputs.lambda_plus)?;
    let len = (n + radius) as i64;
    let fwd = iterate_orbit(
        system,
        p,
        len,
        &OrbitOptions {
            classes: vec![inputs.weights_plus.clone()],
            ..opts.clone()
        },
    )?;
    let hp: Vec<RationalInterval> = fwd.entries.iter().map(|e| e.class_heights[0].clone()).collect();
    let mut stopped = fwd.stopped.as_ref().map(|e| e.to_string());
    let mut avail = hp.len() - 1;
    let hm = match &inputs.minus {
        Some((lm, wm)) => {
            check_lambda(lm)?;
            let bwd = iterate_orbit(
                system,
                p,
                -len,
                &OrbitOptions {
                    classes: vec![wm.clone()],
                    ..opts.clone()
                },
            )?;
            if stopped.is_none() {
                stopped = bwd.stopped.as_ref().map(|e| e.to_string());
            }
            let hm: Vec<RationalInterval> = bwd.entries.iter().map(|e| e.class_heights[0].clone()).collect();
            avail = avail.min(hm.len() - 1);
            Some(hm)
        }
        None => None,
    };
    if avail <= radius {
        return Err(Error::ResourceLimit(format!(
            "only {avail} iterates available for a window of radius {radius}: {}",
            stopped.unwrap_or_default()
        )));
    }
    let used = (avail - radius).min(n);
    let lp = lambda_interval(&inputs.lambda_plus, used + radius);
    let lm = inputs.minus.as_ref().map(|(l, _)| lambda_interval(l, used + radius));
    let mut values = BTreeMap::new();
    for k in -(radius as i64)..=radius as i64 {
        // ĥ₊(f^k P) from f^{N+k} P, ĥ₋(f^k P) from f^{k-N} P
        let ip = (used as i64 + k) as usize;
        let tp = tate_from_heights(&hp[..=ip.max(used)], &lp, used);
        let tp_value = if ip == used {
            tp.value.clone()
        } else {
            (lp.powz(-(used as i64)).expect("λ > 1").round_outward(GRID_BITS + 8 * used as u32) * hp[ip].clone())
                .round_outward(GRID_BITS)
        };
        let (m_value, m_c, m_err) = match (&hm, &lm) {
            (Some(hm), Some(lm)) => {
                let im = (used as i64 - k) as usize;
                let tm = tate_from_heights(&hm[..=im.max(used)], lm, used);
                let v = (lm.powz(-(used as i64)).expect("λ > 1").round_outward(GRID_BITS + 8 * used as u32)
                    * hm[im].clone())
                .round_outward(GRID_BITS);
                (v, tm.c, tm.error)
            }
            _ => (RationalInterval::zero(), RationalInterval::zero(), RationalInterval::zero()),
        };
        let hhat = tp_value.clone() + m_value.clone();
        values.insert(
            k,
            CanonicalHeightResult {
                hhat_plus: tp_value,
                hhat_minus: m_value,
                hhat,
                iterations_used: used,
                tate_constant_estimate: tp.c.max(&m_c),
                error_bound: tp.error.clone() + m_err.clone(),
                plus_error: tp.error,
                minus_error: m_err,
                empirical: true,
            },
        );
    }
    Ok(CanonicalWindow {
        lambda_plus: lp,
        lambda_minus: lm,
        radius,
        iterations_requested: n,
        iterations_used: used,
        values,
        stopped,
    })
}

/// `ĥ₊`, `ĥ₋`, `ĥ` of `P` at Tate depth `N`.
pub fn canonical_pair(
    system: &System,
    p: &MultiProjPoint,
    pair: &EigenvectorPair,
    n: usize,
    opts: &OrbitOptions,
) -> Result<CanonicalHeightResult> {
    let inputs = CanonicalInputs::from_pair(pair, opts.log_bits + 16);
    Ok(canonical_window(system, p, &inputs, n, 0, opts)?.center().clone())
}

/// `ĥ(f^n P) + ĥ(f^{-n} P) - (λ^n + λ^{-n}) ĥ(P)` with every canonical
/// height widened by its error bound. Without backward data this is
/// `ĥ(f^n P) - λ^n ĥ(P)`.
pub fn functional_equation_residual(w: &CanonicalWindow, n: i64) -> Result<RationalInterval> {
    if n == 0 {
        return Ok(RationalInterval::zero());
    }
    let get = |k: i64| {
        w.at(k)
            .map(|r| r.enclosure())
            .ok_or_else(|| Error::invalid(format!("window of radius {} has no iterate {k}", w.radius)))
    };
    let c = get(0)?;
    match &w.lambda_minus {
        Some(_) => {
            let ln = w.lambda_plus.powz(n).expect("λ > 1");
            let lnm = w.lambda_plus.powz(-n).expect("λ > 1");
            Ok(get(n)? + get(-n)? - (ln + lnm) * c)
        }
        None => {
            if n < 0 {
                return Err(Error::precondition("backward iterates need an invertible map"));
            }
            Ok(get(n)? - w.lambda_plus.powz(n).expect("λ > 1") * c)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum Periodicity {
    Periodic { period: usize },
    /// Every iterate with `|n| ≤ max_period` stays under the bound and none
    /// repeats; inconsistent with the Northcott property if it persists.
    BoundedOrbitCandidate,
    NotPeriodic { escaped_at: i64 },
}

/// Exact periodicity test: repetition of the orbit, or escape of the height
/// above `height_bound` (logarithmic, for `O(1, ..., 1)`).
pub fn periodicity_test(system: &System, p: &MultiProjPoint, height_bound: f64, max_period: usize, cap_bits: u64) -> Result<Periodicity> {
    system.check_locus(p)?;
    let bound = BigRational::from_float(height_bound).ok_or_else(|| Error::invalid("height bound must be finite"))?;
    let escaped = |q: &MultiProjPoint| q.heights().total(24).lo() > &bound;
    if escaped(p) {
        return Ok(Periodicity::NotPeriodic { escaped_at: 0 });
    }
    let mut q = p.clone();
    for k in 1..=max_period {
        q = match system.apply_capped(&q, cap_bits) {
            Ok(q) => q,
            Err(Error::ResourceLimit(_)) => return Ok(Periodicity::NotPeriodic { escaped_at: k as i64 }),
            Err(e) => return Err(e),
        };
        if &q == p {
            return Ok(Periodicity::Periodic { period: k });
        }
        if escaped(&q) {
            return Ok(Periodicity::NotPeriodic { escaped_at: k as i64 });
        }
    }
    if system.is_automorphism() {
        let inv = system.inverse()?;
        let mut q = p.clone();
        for k in 1..=max_period {
            q = match inv.apply_capped(&q, cap_bits) {
                Ok(q) => q,
                Err(Error::ResourceLimit(_)) => return Ok(Periodicity::NotPeriodic { escaped_at: -(k as i64) }),
                Err(e) => return Err(e),
            };
            if escaped(&q) {
                return Ok(Periodicity::NotPeriodic { escaped_at: -(k as i64) });
            }
        }
    }
    Ok(Periodicity::BoundedOrbitCandidate)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DensityHeuristic {
    pub label: String,
    pub passed: bool,
}

/// Screening for a Zariski-dense orbit. Never a certificate.
pub fn density_heuristic(system: &System, orbit: &OrbitRecord) -> DensityHeuristic {
    if let (System::Monomial(m), Some(OrbitPoint::Factored(fp))) = (system, orbit.entries.first().map(|e| &e.point)) {
        // coordinates x_i as exponent vectors; independence means no
        // multiplicative relation among them
        let rows: Vec<Vec<BigRational>> = fp
            .factors
            .iter()
            .map(|f| match (&f[0], &f[1]) {
                (FactoredCoord::Unit { exps: a, .. }, FactoredCoord::Unit { exps: b, .. }) => a
                    .iter()
                    .zip(b)
                    .map(|(x, y)| BigRational::from_integer(x - y))
                    .collect(),
                _ => vec![BigRational::zero(); fp.atoms.len()],
            })
            .collect();
        let rank = if fp.atoms.is_empty() {
            0
        } else {
            Matrix::from_rows(rows).map(|r| r.rank()).unwrap_or(0)
        };
        return DensityHeuristic {
            label: format!(
                "multiplicative independence screening: rank {rank} of {} coordinates (heuristic)",
                m.dim()
            ),
            passed: rank == m.dim(),
        };
    }
    let mut seen = std::collections::BTreeSet::new();
    let mut repeated = false;
    for e in &orbit.entries {
        let key = e.point.to_string();
        if !seen.insert(key) {
            repeated = true;
            break;
        }
    }
    let growing = orbit.len() >= 3 && {
        let a = &orbit.entries[orbit.len() - 1].h;
        let b = &orbit.entries[orbit.len() - 2].h;
        a.lo() > b.hi()
    };
    DensityHeuristic {
        label: format!(
            "no repetition among {} iterates{} (heuristic, no invariant subvariety search)",
            orbit.len(),
            if growing { ", heights increasing" } else { "" }
        ),
        passed: !repeated && growing,
    }
}

#[derive(Clone, Debug)]
pub struct KsOptions {
    pub orbit_n: usize,
    pub tate_n: usize,
    pub eigen_eps: BigRational,
    pub orbit: OrbitOptions,
    pub cone: Option<RationalCone>,
    pub form: Option<TopIntersectionForm>,
}

impl Default for KsOptions {
    fn default() -> Self {
        KsOptions {
            orbit_n: 25,
            tate_n: 8,
            eigen_eps: BigRational::new(BigInt::one(), BigInt::from(100_000_000)),
            orbit: OrbitOptions::default(),
            cone: None,
            form: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KsVerdict {
    ExactMatch,
    EmpiricallyConsistent,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Conditions {
    #[serde(rename = "A")]
    pub a: Option<bool>,
    #[serde(rename = "B")]
    pub b: Option<Verdict>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CanonicalSummary {
    pub hhat_plus: RationalInterval,
    pub hhat_minus: RationalInterval,
    pub hhat: RationalInterval,
    pub error_bound: RationalInterval,
    pub iterations_used: usize,
    pub empirical: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiberedCheck {
    pub alpha_f: RationalInterval,
    pub alpha_g: RationalInterval,
    pub slack: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KsReport {
    pub lambda1: RealAlgebraicNumber,
    pub lambda1_interval: RationalInterval,
    pub alpha: Option<AlphaEstimate>,
    pub canonical: Option<CanonicalSummary>,
    pub canonical_alpha: Option<RealAlgebraicNumber>,
    pub conditions: Conditions,
    pub density_heuristic: Option<DensityHeuristic>,
    pub fibered: Option<FiberedCheck>,
    pub verdict: KsVerdict,
    pub warnings: Vec<String>,
}

fn within(est: &RationalInterval, target: &RationalInterval, rel: f64) -> bool {
    let t = target.mid_f64();
    (est.mid_f64() - t).abs() <= rel * t
}

/// Fibered inequality `α̂_f(P) ≥ α̂_g(π P) - slack` on one orbit of a
/// product system, with the base estimate read off the projected orbit.
/// Both sides use `h⁺(f^N P)^{1/N}`; the one-step ratio oscillates on
/// monomial factors with non-real leading eigenvalues.
pub fn fibered_check(system: &System, orbit: &OrbitRecord, slack: f64) -> Result<Option<FiberedCheck>> {
    let System::Product(prod) = system else {
        return Ok(None);
    };
    let k = prod.left.factor_count();
    let base = OrbitRecord {
        entries: orbit
            .entries
            .iter()
            .map(|e| {
                let point = e.point.project_prefix(k)?;
                let heights = point.heights();
                let h = heights.total(orbit.log_bits);
                Ok(crate::dynsys::OrbitEntry {
                    n: e.n,
                    point,
                    heights,
                    h_plus: h_plus(&h),
                    h,
                    class_heights: Vec::new(),
                })
            })
            .collect::<Result<_>>()?,
        stopped: None,
        log_bits: orbit.log_bits,
    };
    let af = alpha_estimate(orbit, None)?.root_estimate_raw;
    let ag = alpha_estimate(&base, None)?.root_estimate_raw;
    let s = BigRational::from_float(slack).unwrap_or_else(BigRational::zero);
    let holds = af.hi() >= &(ag.lo() - s);
    Ok(Some(FiberedCheck {
        alpha_f: af,
        alpha_g: ag,
        slack,
        holds,
    }))
}

pub fn ks_report(system: &System, p: &MultiProjPoint, opts: &KsOptions) -> Result<KsReport> {
    let mut warnings = Vec::new();
    let lambda1 = system.lambda1()?;
    let lambda1_interval = lambda1.refine(&dyadic(48));
    let orbit = iterate_orbit(system, p, opts.orbit_n as i64, &opts.orbit)?;
    if let Some(e) = &orbit.stopped {
        warnings.push(format!("orbit stopped after {} iterates: {e}", orbit.len() - 1));
    }
    let alpha = match alpha_estimate(&orbit, None) {
        Ok(a) => Some(a),
        Err(e) => {
            warnings.push(format!("alpha estimates unavailable: {e}"));
            None
        }
    };
    let density = (orbit.len() >= 3).then(|| density_heuristic(system, &orbit));
    let fibered = if orbit.len() >= 3 { fibered_check(system, &orbit, 0.05)? } else { None };

    let mut conditions = Conditions { a: None, b: None };
    let mut canonical = None;
    let mut canonical_alpha = None;
    if system.is_automorphism() {
        let m = system.pullback_matrix()?;
        let ca = condition_a(&m)?;
        conditions.a = Some(ca.holds);
        match (&opts.cone, &opts.form) {
            (Some(cone), Some(form)) if ca.holds => {
                let pair = eigenvector_pair(&m, cone, &opts.eigen_eps)?;
                let cb = condition_b(form, &pair, cone)?;
                conditions.b = Some(cb.verdict);
                match canonical_pair(system, p, &pair, opts.tate_n, &opts.orbit) {
                    Ok(r) => {
                        if r.iterations_used < opts.tate_n {
                            warnings.push(format!(
                                "Tate depth reduced from {} to {} by the coordinate cap",
                                opts.tate_n, r.iterations_used
                            ));
                        }
                        if cb.verdict == Verdict::True && r.plus_enclosure().is_positive() {
                            canonical_alpha = Some(lambda1.clone());
                        }
                        canonical = Some(CanonicalSummary {
                            hhat_plus: r.hhat_plus.clone(),
                            hhat_minus: r.hhat_minus.clone(),
                            hhat: r.hhat.clone(),
                            error_bound: r.error_bound.clone(),
                            iterations_used: r.iterations_used,
                            empirical: true,
                        });
                    }
                    Err(e) => warnings.push(format!("canonical heights unavailable: {e}")),
                }
            }
            (None, _) | (_, None) => warnings.push("no cone or intersection form supplied; Conditions B not checked".into()),
            _ => {}
        }
    }
    let verdict = if canonical_alpha.is_some() {
        KsVerdict::ExactMatch
    } else {
        match &alpha {
            Some(a) if within(&a.ratio_estimate, &lambda1_interval, 0.05) => KsVerdict::EmpiricallyConsistent,
            _ => KsVerdict::Inconclusive,
        }
    };
    if let Some(a) = &alpha {
        let cap = lambda1_interval.hi().clone() * BigRational::new(BigInt::from(105), BigInt::from(100));
        if a.ratio_estimate.mid() > cap || a.root_estimate.mid() > cap {
            warnings.push("an α estimate exceeds λ₁ by more than 5%".into());
        }
    }
    Ok(KsReport {
        lambda1,
        lambda1_interval,
        alpha,
        canonical,
        canonical_alpha,
        conditions,
        density_heuristic: density,
        fibered,
        verdict,
        warnings,
    })
}

/// Width of an interval as a float, for reports.
pub fn width(iv: &RationalInterval) -> f64 {
    width_f64(iv)
}
