//! Inequality chains linking ν, σ, Sym and Θ, checked in interval
//! arithmetic so that a reported violation is never rounding noise.
//!
//! Ratios are cleared of denominators (`m1·ν ≤ σ` rather than
//! `m1 ≤ σ/ν`) so the checks stay meaningful when ν or 1 − Sym vanish.

use std::fmt;

use crate::cones::Cone;
use crate::interval::Interval;
use crate::linalg::{norm2, Matrix};
use crate::norms::NormSpec;

use super::exact::{self, DistLp, Normalize};
use super::{
    normalizers, nu, ratio_oracle, sigma, sym_measure, theta, CertifiedValue, Ctx, MeasureError,
    Method, ProblemInstance, Witness,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Holds,
    Violated,
    Inconclusive,
}

impl CheckStatus {
    pub fn name(self) -> &'static str {
        match self {
            CheckStatus::Holds => "HOLDS",
            CheckStatus::Violated => "VIOLATED",
            CheckStatus::Inconclusive => "INCONCLUSIVE",
        }
    }
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One inequality `lhs ≤ rhs` between intervals.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub lhs: Interval,
    pub rhs: Interval,
    /// Guaranteed margin `rhs.lo − lhs.hi`; negative unless the check holds
    /// without tolerance.
    pub slack: f64,
    pub status: CheckStatus,
}

impl Check {
    /// Holds if `lhs.hi ≤ rhs.lo + tol`, is violated if `lhs.lo > rhs.hi +
    /// tol`, and is inconclusive otherwise.
    pub fn new(name: impl Into<String>, lhs: Interval, rhs: Interval, tol: f64) -> Check {
        let status = if lhs.hi <= rhs.lo + tol {
            CheckStatus::Holds
        } else if lhs.lo > rhs.hi + tol {
            CheckStatus::Violated
        } else {
            CheckStatus::Inconclusive
        };
        Check {
            name: name.into(),
            lhs,
            rhs,
            slack: rhs.lo - lhs.hi,
            status,
        }
    }
}

/// Quantities entering the chains.
#[derive(Debug, Clone)]
pub struct BoundValues {
    pub nu: CertifiedValue,
    pub sigma: CertifiedValue,
    pub sym: CertifiedValue,
    pub theta: CertifiedValue,
    /// `min{‖u‖* : u ∈ K*, v ∈ K, ‖v‖ = 1, ⟨u, v⟩ = 1}`.
    pub pair_norm: CertifiedValue,
    /// `min_{u ∈ K*, ‖u‖* = 1} max_{v ∈ K, ‖v‖ = 1} ⟨u, v⟩`.
    pub pairing: CertifiedValue,
}

impl BoundValues {
    pub fn named(&self) -> Vec<(&'static str, &CertifiedValue)> {
        vec![
            ("nu", &self.nu),
            ("sigma", &self.sigma),
            ("sym", &self.sym),
            ("theta", &self.theta),
            ("pair_norm_min", &self.pair_norm),
            ("pairing_min_max", &self.pairing),
        ]
    }
}

#[derive(Debug, Clone)]
pub struct BoundsReport {
    pub values: BoundValues,
    pub checks: Vec<Check>,
}

impl BoundsReport {
    pub fn violated(&self) -> bool {
        self.checks
            .iter()
            .any(|c| c.status == CheckStatus::Violated)
    }
}

pub fn verify_bounds(inst: &ProblemInstance, tol: f64) -> Result<BoundsReport, MeasureError> {
    let values = bound_values(inst, tol)?;
    let checks = check_bounds(inst, &values, tol);
    Ok(BoundsReport { values, checks })
}

pub fn bound_values(inst: &ProblemInstance, tol: f64) -> Result<BoundValues, MeasureError> {
    Ok(BoundValues {
        nu: nu(inst, tol)?,
        sigma: sigma(inst, tol)?,
        sym: sym_measure(inst, tol)?,
        theta: theta(inst),
        pair_norm: pair_norm_min(inst, tol)?,
        pairing: pairing_min_max(inst, tol)?,
    })
}

/// True when the norm is linear on `K`, the case where the lower symmetry
/// bound on σ is attained.
fn linear_on_cone(inst: &ProblemInstance) -> bool {
    matches!((inst.cone, &inst.norm), (Cone::Orthant(_), NormSpec::L1))
}

pub fn check_bounds(inst: &ProblemInstance, v: &BoundValues, tol: f64) -> Vec<Check> {
    let one = Interval::point(1.0);
    let nu = v.nu.interval();
    let sigma = v.sigma.interval();
    let s = v.sym.interval();
    let m1 = v.pair_norm.interval();
    let m2 = v.pairing.interval();
    let s_ratio = s.div(one.add(s));
    let one_minus_s = one.sub(s);
    let mut out = vec![
        Check::new("1 <= pair_norm_min", one, m1, tol),
        Check::new("pair_norm_min*nu <= sigma", m1.mul(nu), sigma, tol),
        Check::new("pairing_min_max*sigma <= nu", m2.mul(sigma), nu, tol),
    ];
    if let NormSpec::L2 = inst.norm {
        let th = v.theta.interval();
        let cos = Interval::new(th.hi.cos().next_down(), th.lo.cos().next_up());
        out.push(Check::new(
            "cos(theta)*sigma <= nu",
            cos.mul(sigma),
            nu,
            tol,
        ));
        out.push(Check::new(
            "cos(theta)*sym/(1+sym) <= nu",
            cos.mul(s_ratio),
            nu,
            tol,
        ));
    }
    out.extend([
        Check::new("sym/(1+sym) <= sigma", s_ratio, sigma, tol),
        Check::new("sigma*(1-sym) <= sym", sigma.mul(one_minus_s), s, tol),
        Check::new(
            "pairing_min_max*sym/(1+sym) <= nu",
            m2.mul(s_ratio),
            nu,
            tol,
        ),
        Check::new("nu*(1-sym) <= sym", nu.mul(one_minus_s), s, tol),
        Check::new("0 <= sym", Interval::point(0.0), s, tol),
        Check::new("sym <= 1", s, one, tol),
    ]);
    if linear_on_cone(inst) {
        out.push(Check::new(
            "sigma*(1+sym) <= sym",
            sigma.mul(one.add(s)),
            s,
            tol,
        ));
    }
    out
}

/// `min{‖u‖* : u ∈ K*, h(u) ≥ 1}`, where `h` is the support function of
/// `K ∩ B`.
pub fn pair_norm_min(inst: &ProblemInstance, tol: f64) -> Result<CertifiedValue, MeasureError> {
    let cx = Ctx::new(inst, tol)?;
    // ‖·‖ₑ: h(u) = ⟨u, e⟩ = ‖u‖* on K*. ℓ2: attained at a unit u ∈ K ∩ K*.
    if inst.induced_e().is_some() || matches!(inst.norm, NormSpec::L2) {
        return Ok(CertifiedValue::exact(
            1.0,
            Method::ExactAngle,
            Witness::default(),
        ));
    }
    let cap = cx.cap();
    if cx.polyhedral() {
        if let (Some(verts), Some((rows, sum_type))) =
            (cap.vertices(), cx.norm().polyhedral_dual_rows(cx.n))
        {
            let gens = cx.gens();
            let empty = Matrix::zeros(cx.n, 0);
            let lp = DistLp {
                gens: &gens,
                rows: &rows,
                sum_type,
                perp: &empty,
            };
            let bs: Vec<Vec<f64>> = verts.iter().filter(|w| norm2(w) > 0.0).cloned().collect();
            let sol = lp.min_over(&bs, Normalize::U)?;
            let w = Witness {
                u: Some(sol.u),
                ..Witness::default()
            };
            return Ok(CertifiedValue::exact(sol.value, Method::ExactLP, w));
        }
    }
    let norm = cx.norm();
    let r = ratio_oracle(
        &cx.domain(),
        |u| Ok(super::padded(norm.dual_value(u)?)),
        |u| cap.support(u),
        (cx.radius(), cx.radius()),
        &cx.opts,
    )?;
    Ok(CertifiedValue::from_oracle(r, tol, Witness::default()))
}

/// `min{h(u) : u ∈ K*, ‖u‖* = 1}`; `cos Θ` for ℓ2 and 1 for `‖·‖ₑ`.
pub fn pairing_min_max(inst: &ProblemInstance, tol: f64) -> Result<CertifiedValue, MeasureError> {
    let cx = Ctx::new(inst, tol)?;
    if inst.induced_e().is_some() {
        return Ok(CertifiedValue::exact(
            1.0,
            Method::ExactAngle,
            Witness::default(),
        ));
    }
    if let NormSpec::L2 = inst.norm {
        return Ok(CertifiedValue::exact(
            inst.cone.theta().cos(),
            Method::ExactAngle,
            Witness::default(),
        ));
    }
    let cap = cx.cap();
    if cx.polyhedral() {
        if let (Some(verts), Some(pts)) = (cap.vertices(), cx.norm().polyhedral_ball_points(cx.n)) {
            let bs = normalizers(&cx.cone(), pts);
            let (v, u) = exact::min_cap_support(&cx.gens(), verts, &bs)?;
            let w = Witness {
                u: Some(u),
                ..Witness::default()
            };
            return Ok(CertifiedValue::exact(v, Method::ExactLP, w));
        }
    }
    let norm = cx.norm();
    let r = ratio_oracle(
        &cx.domain(),
        |u| cap.support(u),
        |u| Ok(super::padded(norm.dual_value(u)?)),
        (cx.radius(), cx.radius()),
        &cx.opts,
    )?;
    Ok(CertifiedValue::from_oracle(r, tol, Witness::default()))
}
