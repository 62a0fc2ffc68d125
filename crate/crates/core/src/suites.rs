//! Seeded verification suites. Each part draws its own instances, evaluates
//! the measures and records every inequality as a [`Check`]; trial `i` uses
//! seed `seed + i`, so a run is reproducible and trials are independent.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::cones::Cone;
use crate::instance::{
    generate, ConeKind, GenRequest, InstanceFile, NormFile, Require, SubspaceForm,
};
use crate::interval::Interval;
use crate::linalg::{dot, svec, Matrix};
use crate::measures::{
    self, bound_values, check_bounds, nu, nu_angle_oracle, nu_bar_ext, nu_ext, nu_oracle, sigma,
    sigma_oracle, sym_measure, BoundValues, CertifiedValue, Check, Form, ProblemInstance,
};
use crate::norms::{Lp, NormSpec};
use crate::oracle::OracleOptions;
use crate::par;
use crate::renegar::distance_bounds;
use crate::report::{CheckRow, MeasureRow, Report};
use crate::subspace::Subspace;

type BoxError = Box<dyn std::error::Error + Send + Sync>;

#[derive(Debug, Error)]
#[error("{part} (seed {seed}): {message}")]
pub struct SuiteError {
    pub part: &'static str,
    pub seed: u64,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub parallel: bool,
    /// Overwrite the symmetry value with 2 before the bounds are checked,
    /// to exercise the failure path.
    pub corrupt_bounds: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            trials: 20,
            seed: 0,
            tol: 1e-6,
            parallel: par::available(),
            corrupt_bounds: false,
        }
    }
}

/// Width asked of the oracle when it is the reference for an exact value.
const ORACLE_TOL: f64 = 5e-5;
const MAX_ORACLE_WIDTH: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Holder,
    PropNu,
    RenegarSandwich,
    NuSigma,
    Symmetry,
    ExampleWedge,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::ExampleWedge,
        Suite::Holder,
        Suite::PropNu,
        Suite::NuSigma,
        Suite::Symmetry,
        Suite::RenegarSandwich,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Holder => "holder",
            Suite::PropNu => "prop-nu",
            Suite::RenegarSandwich => "renegar-sandwich",
            Suite::NuSigma => "nu-sigma",
            Suite::Symmetry => "symmetry",
            Suite::ExampleWedge => "example-wedge",
        }
    }

    pub fn parts(self) -> &'static [Part] {
        match self {
            Suite::Holder => &[Part::Holder],
            Suite::PropNu => &[
                Part::NuLpVsOracle,
                Part::NuAngleIdentity,
                Part::NuProperties,
                Part::PsdSmoke,
            ],
            Suite::RenegarSandwich => &[Part::RenegarImage, Part::RenegarKernel],
            Suite::NuSigma => &[
                Part::ChainWedgeL2,
                Part::ChainOrthantL1,
                Part::SelfDualL2,
                Part::OrthantLinf,
            ],
            Suite::Symmetry => &[Part::SymPolyhedral, Part::SymOrthantL1, Part::SymInfeasible],
            Suite::ExampleWedge => &[Part::WedgeExample],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    /// The planar wedge with `L` its axis, at fixed apertures.
    WedgeExample,
    /// Hölder, attainment and subgradient identities per norm kind; `trials`
    /// samples each.
    Holder,
    /// Orthant(3) with ℓ∞: the LP value against the oracle bracket.
    NuLpVsOracle,
    /// ℓ2: the definitional oracle against the angle oracle.
    NuAngleIdentity,
    /// Range, monotonicity, basis invariance and the feasibility witness.
    NuProperties,
    PsdSmoke,
    RenegarImage,
    RenegarKernel,
    ChainWedgeL2,
    ChainOrthantL1,
    SelfDualL2,
    OrthantLinf,
    SymPolyhedral,
    SymOrthantL1,
    SymInfeasible,
}

impl Part {
    pub fn name(self) -> &'static str {
        match self {
            Part::WedgeExample => "wedge-example",
            Part::Holder => "holder",
            Part::NuLpVsOracle => "nu-lp-vs-oracle",
            Part::NuAngleIdentity => "nu-angle",
            Part::NuProperties => "nu-properties",
            Part::PsdSmoke => "psd-smoke",
            Part::RenegarImage => "renegar-image",
            Part::RenegarKernel => "renegar-kernel",
            Part::ChainWedgeL2 => "chain-wedge-l2",
            Part::ChainOrthantL1 => "chain-orthant-l1",
            Part::SelfDualL2 => "self-dual-l2",
            Part::OrthantLinf => "orthant-linf",
            Part::SymPolyhedral => "sym-polyhedral",
            Part::SymOrthantL1 => "sym-orthant-l1",
            Part::SymInfeasible => "sym-infeasible",
        }
    }
}

pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<Report, SuiteError> {
    let mut report = Report::default();
    for &part in suite.parts() {
        report.extend(run_part(part, cfg)?);
    }
    Ok(report)
}

pub fn run_part(part: Part, cfg: &SuiteConfig) -> Result<Report, SuiteError> {
    match part {
        Part::WedgeExample => wedge_example(cfg),
        Part::Holder => holder(cfg),
        _ => {
            let seeds: Vec<u64> = (0..cfg.trials as u64)
                .map(|i| cfg.seed.wrapping_add(i))
                .collect();
            let results = par::map(seeds, cfg.parallel, |seed| {
                let mut t = Trial::new(part, seed, cfg);
                trial(part, &mut t).map(|()| t).map_err(|e| SuiteError {
                    part: part.name(),
                    seed,
                    message: e.to_string(),
                })
            });
            let mut report = Report::default();
            for t in results {
                report.extend(t?.into_report());
            }
            Ok(report)
        }
    }
}

/// Rows and checks gathered for one seeded instance.
struct Trial<'a> {
    part: Part,
    seed: u64,
    cfg: &'a SuiteConfig,
    measures: Vec<MeasureRow>,
    checks: Vec<CheckRow>,
}

impl<'a> Trial<'a> {
    fn new(part: Part, seed: u64, cfg: &'a SuiteConfig) -> Self {
        Trial {
            part,
            seed,
            cfg,
            measures: Vec::new(),
            checks: Vec::new(),
        }
    }

    fn label(&self, name: &str) -> String {
        format!("{name} [seed {}]", self.seed)
    }

    fn timed<E>(
        &mut self,
        name: &str,
        f: impl FnOnce() -> Result<CertifiedValue, E>,
    ) -> Result<CertifiedValue, E> {
        let start = Instant::now();
        let v = f()?;
        self.record(name, &v, ms(start));
        Ok(v)
    }

    fn record(&mut self, name: &str, v: &CertifiedValue, wall_ms: f64) {
        let row = MeasureRow::new(self.part.name(), self.label(name), v, v.tol, wall_ms);
        self.measures.push(row);
    }

    fn check(&mut self, name: &str, lhs: Interval, rhs: Interval, tol: f64) {
        let c = Check::new(self.label(name), lhs, rhs, tol);
        self.checks.push(CheckRow::new(self.part.name(), &c));
    }

    fn push(&mut self, c: &Check) {
        let c = Check {
            name: self.label(&c.name),
            ..c.clone()
        };
        self.checks.push(CheckRow::new(self.part.name(), &c));
    }

    /// `|a − b| ≤ within`, with `a` and `b` as enclosures.
    fn close(&mut self, name: &str, a: Interval, b: Interval, within: f64) {
        self.check(name, abs_gap(a, b), Interval::point(within), 0.0);
    }

    fn bounds(&mut self, inst: &ProblemInstance) -> Result<(), BoxError> {
        let start = Instant::now();
        let mut values = bound_values(inst, self.cfg.tol)?;
        let wall = ms(start);
        for (name, v) in values.named() {
            self.record(name, v, wall);
        }
        if self.cfg.corrupt_bounds {
            corrupt(&mut values);
        }
        for c in check_bounds(inst, &values, self.cfg.tol) {
            self.push(&c);
        }
        Ok(())
    }

    fn into_report(self) -> Report {
        Report {
            measures: self.measures,
            checks: self.checks,
        }
    }
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Enclosure of `|a − b|` over `a × b`.
fn abs_gap(a: Interval, b: Interval) -> Interval {
    let d = a.sub(b);
    let hi = d.lo.abs().max(d.hi.abs());
    let lo = if d.lo <= 0.0 && d.hi >= 0.0 {
        0.0
    } else {
        d.lo.abs().min(d.hi.abs())
    };
    Interval::new(lo, hi)
}

/// Distance between two enclosures; zero when they overlap.
fn separation(a: Interval, b: Interval) -> f64 {
    (a.lo - b.hi).max(b.lo - a.hi).max(0.0)
}

fn corrupt(v: &mut BoundValues) {
    v.sym = CertifiedValue::exact(2.0, v.sym.method, v.sym.witness.clone());
}

fn opts(cfg: &SuiteConfig, tol: f64) -> OracleOptions {
    OracleOptions {
        parallel: cfg.parallel,
        ..OracleOptions::with_tol(tol)
    }
}

fn instance(req: GenRequest) -> Result<(InstanceFile, ProblemInstance), BoxError> {
    let file = generate(&req)?;
    let inst = file.to_instance()?;
    Ok((file, inst))
}

fn trial(part: Part, t: &mut Trial) -> Result<(), BoxError> {
    let seed = t.seed;
    let tol = t.cfg.tol;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0f7e57);
    match part {
        Part::NuLpVsOracle => {
            let k = rng.gen_range(1..=2);
            let (_, inst) = instance(
                GenRequest::new(seed, ConeKind::Orthant, 3, k, Require::Either)
                    .norm(NormFile::Linf),
            )?;
            let exact = t.timed("nu", || nu(&inst, 1e-9))?;
            let orc = t.timed("nu_oracle", || nu_oracle(&inst, &opts(t.cfg, ORACLE_TOL)))?;
            t.check(
                "oracle lower <= lp value",
                pt(orc.lower),
                pt(exact.estimate),
                1e-12,
            );
            t.check(
                "lp value <= oracle upper",
                pt(exact.estimate),
                pt(orc.upper),
                1e-12,
            );
            t.check(
                "oracle width <= 1e-4",
                pt(orc.width()),
                pt(MAX_ORACLE_WIDTH),
                0.0,
            );
        }
        Part::NuAngleIdentity => {
            let (kind, n) = [
                (ConeKind::Wedge, 2),
                (ConeKind::Orthant, 2),
                (ConeKind::Orthant, 3),
                (ConeKind::Orthant, 4),
            ][(seed % 4) as usize];
            let k = rng.gen_range(1..n);
            let (_, inst) = instance(GenRequest::new(seed, kind, n, k, Require::Feasible))?;
            let def = t.timed("nu_definitional", || {
                nu_oracle(&inst, &opts(t.cfg, ORACLE_TOL))
            })?;
            let ang = t.timed("nu_angle", || {
                nu_angle_oracle(&inst, &opts(t.cfg, ORACLE_TOL))
            })?;
            let exact = t.timed("nu", || nu(&inst, tol))?;
            let widths = def.width() + ang.width();
            t.check(
                "|definitional - angle| <= 2*widths",
                pt((def.estimate - ang.estimate).abs()),
                pt(2.0 * widths),
                1e-12,
            );
            t.check(
                "definitional width <= 1e-4",
                pt(def.width()),
                pt(MAX_ORACLE_WIDTH),
                0.0,
            );
            t.check(
                "angle width <= 1e-4",
                pt(ang.width()),
                pt(MAX_ORACLE_WIDTH),
                0.0,
            );
            t.check(
                "face value inside definitional bracket",
                pt(separation(exact.interval(), def.interval())),
                pt(0.0),
                1e-9,
            );
        }
        Part::NuProperties => nu_properties(t, &mut rng)?,
        Part::PsdSmoke => {
            let identity =
                Subspace::from_span(&Matrix::from_cols(3, &[svec(&Matrix::identity(2))]));
            let inst = ProblemInstance::new(
                Cone::Psd(2),
                NormSpec::induced_canonical(Cone::Psd(2))?,
                identity,
            )?;
            let v = t.timed("nu span{I}", || nu(&inst, 1e-7))?;
            t.close("nu(span{I}) = 1", v.interval(), pt(1.0), 1e-6);
            let (_, inst) = instance(
                GenRequest::new(seed, ConeKind::Psd, 2, 2, Require::Either)
                    .norm(NormFile::Induced { e: None }),
            )?;
            let v = t.timed("nu", || nu(&inst, 1e-4))?;
            t.check("bracket width <= 1e-3", pt(v.width()), pt(1e-3), 0.0);
            // every oracle cell runs a cutting-plane solve here, so the
            // independent cross-check is done once per run
            if seed == t.cfg.seed {
                let req = GenRequest::new(seed, ConeKind::Psd, 2, 2, Require::Feasible)
                    .norm(NormFile::Induced { e: None });
                let (_, inst) = instance(req)?;
                let v = t.timed("nu feasible", || nu(&inst, 1e-4))?;
                let orc = t.timed("nu_oracle feasible", || {
                    nu_oracle(&inst, &opts(t.cfg, 8e-4))
                })?;
                t.check("oracle width <= 1e-3", pt(orc.width()), pt(1e-3), 0.0);
                t.check(
                    "nu agrees with oracle bracket",
                    pt(separation(v.interval(), orc.interval())),
                    pt(0.0),
                    tol,
                );
            }
        }
        Part::RenegarImage | Part::RenegarKernel => renegar_trial(t, part == Part::RenegarImage)?,
        Part::ChainWedgeL2 => {
            let (_, inst) = instance(GenRequest::new(
                seed,
                ConeKind::Wedge,
                2,
                1,
                Require::Either,
            ))?;
            t.bounds(&inst)?;
        }
        Part::ChainOrthantL1 => {
            let n = rng.gen_range(2..=3);
            let k = rng.gen_range(1..n);
            let (_, inst) = instance(
                GenRequest::new(seed, ConeKind::Orthant, n, k, Require::Either).norm(NormFile::L1),
            )?;
            t.bounds(&inst)?;
        }
        Part::SelfDualL2 => {
            let (kind, n) = [
                (ConeKind::Orthant, 2),
                (ConeKind::Orthant, 3),
                (ConeKind::Soc, 3),
            ][(seed % 3) as usize];
            let k = rng.gen_range(1..n);
            let (_, inst) = instance(GenRequest::new(seed, kind, n, k, Require::Either))?;
            let nu_v = t.timed("nu", || nu(&inst, tol))?;
            let sig = t.timed("sigma", || sigma(&inst, tol))?;
            let within = nu_v.width() + sig.width() + tol;
            t.check(
                "|sigma - nu| <= widths",
                pt((sig.estimate - nu_v.estimate).abs()),
                pt(within),
                0.0,
            );
        }
        Part::OrthantLinf => {
            let k = rng.gen_range(1..=2);
            let (_, inst) = instance(
                GenRequest::new(seed, ConeKind::Orthant, 3, k, Require::Either)
                    .norm(NormFile::Linf),
            )?;
            let nu_v = t.timed("nu", || nu(&inst, tol))?;
            let sig = t.timed("sigma", || sigma(&inst, tol))?;
            let same = nu_v.method == sig.method && nu_v.estimate == sig.estimate;
            t.check(
                "sigma and nu share a path and value",
                pt(if same { 0.0 } else { 1.0 }),
                pt(0.0),
                0.0,
            );
            let orc = t.timed("sigma_oracle", || {
                sigma_oracle(&inst, &opts(t.cfg, ORACLE_TOL))
            })?;
            t.check(
                "|sigma oracle - nu| <= 1e-4",
                pt(separation(pt(nu_v.estimate), orc.interval())),
                pt(MAX_ORACLE_WIDTH),
                0.0,
            );
        }
        Part::SymPolyhedral => {
            let (kind, n) = [
                (ConeKind::Orthant, 2),
                (ConeKind::Orthant, 3),
                (ConeKind::Wedge, 2),
            ][(seed % 3) as usize];
            let norm =
                [NormFile::L1, NormFile::L2, NormFile::Linf][((seed / 3) % 3) as usize].clone();
            let k = rng.gen_range(1..n);
            let (_, inst) =
                instance(GenRequest::new(seed, kind, n, k, Require::Either).norm(norm))?;
            t.bounds(&inst)?;
        }
        Part::SymOrthantL1 => {
            let n = rng.gen_range(2..=3);
            let k = rng.gen_range(1..n);
            let (_, inst) = instance(
                GenRequest::new(seed, ConeKind::Orthant, n, k, Require::Either).norm(NormFile::L1),
            )?;
            let s = t.timed("sym", || sym_measure(&inst, tol))?;
            let sig = t.timed("sigma", || sigma(&inst, tol))?;
            let si = s.interval();
            let ratio = si.div(Interval::point(1.0).add(si));
            t.close("sigma = sym/(1+sym)", sig.interval(), ratio, 1e-8);
        }
        Part::SymInfeasible => {
            let (kind, n) = [
                (ConeKind::Orthant, 2),
                (ConeKind::Orthant, 3),
                (ConeKind::Wedge, 2),
            ][(seed % 3) as usize];
            let k = rng.gen_range(1..n);
            let (_, inst) = instance(GenRequest::new(seed, kind, n, k, Require::Infeasible))?;
            let s = t.timed("sym", || sym_measure(&inst, tol))?;
            t.check(
                "sym = 0",
                pt(s.estimate.abs().max(s.lower.abs())),
                pt(0.0),
                0.0,
            );
        }
        Part::WedgeExample | Part::Holder => unreachable!("not seeded per trial"),
    }
    Ok(())
}

fn pt(v: f64) -> Interval {
    Interval::point(v)
}

fn nu_properties(t: &mut Trial, rng: &mut ChaCha8Rng) -> Result<(), BoxError> {
    let seed = t.seed;
    let tol = t.cfg.tol;
    let (kind, n, norm) = [
        (ConeKind::Orthant, 3, NormFile::L1),
        (ConeKind::Wedge, 2, NormFile::Linf),
        (ConeKind::Soc, 3, NormFile::L2),
        (ConeKind::Orthant, 3, NormFile::Induced { e: None }),
        (ConeKind::Psd, 2, NormFile::Induced { e: None }),
    ][(seed % 5) as usize]
        .clone();
    let k = rng.gen_range(1..n);
    let (file, inst) = instance(GenRequest::new(seed, kind, n, k, Require::Either).norm(norm))?;
    let v = t.timed("nu", || nu(&inst, tol))?;
    t.check("0 <= nu", pt(0.0), v.interval(), tol);
    t.check("nu <= 1", v.interval(), pt(1.0), tol);

    let basis = to_matrix(&file.subspace.matrix);
    let dim = inst.dim();
    if k >= 2 {
        let smaller = ProblemInstance::new(
            inst.cone,
            inst.norm.clone(),
            Subspace::from_span(&basis.select_cols(&[0])),
        )?;
        let w = t.timed("nu smaller L", || nu(&smaller, tol))?;
        t.check("nu(smaller L) <= nu(L)", w.interval(), v.interval(), tol);
    }
    let mix: Vec<f64> = (0..k * k).map(|_| StandardNormal.sample(rng)).collect();
    let rebased = basis.matmul(&Matrix::from_vec(k, k, mix)?);
    let other = ProblemInstance::new(inst.cone, inst.norm.clone(), Subspace::from_span(&rebased))?;
    let w = t.timed("nu other basis", || nu(&other, tol))?;
    t.close(
        "nu independent of the basis",
        v.interval(),
        w.interval(),
        tol,
    );

    let orc = t.timed("nu_oracle", || nu_oracle(&inst, &opts(t.cfg, 1e-3)))?;
    t.check(
        "nu agrees with oracle bracket",
        pt(separation(v.interval(), orc.interval())),
        pt(0.0),
        tol,
    );

    if v.lower > tol {
        let (lambda, x) = measures::feasibility_witness(&inst)?;
        t.check("0 <= lambda_e(witness)", pt(0.0), lambda, 0.0);
        let residual =
            inst.subspace.residual(&x) / x.iter().map(|c| c.abs()).fold(0.0, f64::max).max(1e-300);
        t.check("witness lies in L", pt(residual), pt(1e-9), 0.0);
        debug_assert_eq!(x.len(), dim);
    }
    Ok(())
}

fn to_matrix(rows: &[Vec<f64>]) -> Matrix {
    Matrix::from_rows(rows)
}

fn renegar_trial(t: &mut Trial, image: bool) -> Result<(), BoxError> {
    let seed = t.seed;
    let tol = t.cfg.tol;
    let (req, form) = if image {
        let (n, m) = [(2, 2), (3, 2)][(seed % 2) as usize];
        (
            GenRequest::new(seed, ConeKind::Orthant, n, m, Require::Feasible),
            Form::Image,
        )
    } else {
        let (m, n) = [(1, 2), (1, 3), (2, 3)][(seed % 3) as usize];
        (
            GenRequest::new(seed, ConeKind::Orthant, n, n - m, Require::Feasible)
                .form(SubspaceForm::Kernel),
            Form::Kernel,
        )
    };
    let (file, inst) = instance(req)?;
    let map = file.data_map(form)?;
    let start = Instant::now();
    let db = distance_bounds(&map, &inst, tol)?;
    let wall = ms(start);
    let measure = if image { "nu" } else { "nu_bar" };
    t.record("dist", &db.dist, wall);
    t.record(measure, &db.measure, wall);
    t.record("op_norm", &db.op_norm, wall);
    t.record("inv_norm", &db.inv_norm, wall);

    let cert = &db.certificate;
    t.check(
        "dist lower <= dist upper",
        pt(db.dist.lower),
        pt(db.dist.upper),
        0.0,
    );
    let cap = db.measure.upper * db.op_norm.upper * (1.0 + 1e-6);
    t.check(
        &format!("|dA| <= {measure}*|A|*(1+1e-6)"),
        cert.norm,
        pt(cap),
        0.0,
    );
    t.check(
        "certificate residual <= 1e-9",
        pt(cert.residual),
        pt(1e-9),
        0.0,
    );

    let ext = if image {
        let inst = inst
            .clone()
            .with_second_norm(NormSpec::image(map.a.clone(), Lp::L2)?)?;
        t.timed("nu_ext", || nu_ext(&inst, tol))?
    } else {
        let inst = inst
            .clone()
            .with_second_norm(NormSpec::kernel(map.a.clone(), Lp::L2)?)?;
        t.timed("nu_bar_ext", || nu_bar_ext(&inst, tol))?
    };
    let name = if image { "V" } else { "V_bar" };
    t.check(
        &format!("dist lower <= {name}"),
        pt(db.dist.lower),
        ext.interval(),
        tol,
    );
    t.check(
        &format!("{name} <= dist upper"),
        ext.interval(),
        pt(db.dist.upper),
        tol,
    );
    Ok(())
}

const WEDGE_APERTURES: [f64; 7] = [
    PI / 16.0,
    PI / 8.0,
    3.0 * PI / 16.0,
    0.24 * PI,
    PI / 4.0,
    PI / 3.0,
    0.45 * PI,
];

fn wedge_example(cfg: &SuiteConfig) -> Result<Report, SuiteError> {
    let part = Part::WedgeExample;
    let results = par::map(WEDGE_APERTURES.to_vec(), cfg.parallel, |phi| {
        let mut t = Trial::new(part, 0, cfg);
        wedge_case(&mut t, phi).map(|()| t).map_err(|e| SuiteError {
            part: part.name(),
            seed: 0,
            message: format!("phi = {phi}: {e}"),
        })
    });
    let mut report = Report::default();
    for (t, phi) in results.into_iter().zip(WEDGE_APERTURES) {
        let mut r = t?.into_report();
        let tag = format!("[phi {phi:.6}]");
        r.measures
            .iter_mut()
            .for_each(|m| m.name = m.name.replace("[seed 0]", &tag));
        r.checks
            .iter_mut()
            .for_each(|c| c.name = c.name.replace("[seed 0]", &tag));
        report.extend(r);
    }
    Ok(report)
}

fn wedge_case(t: &mut Trial, phi: f64) -> Result<(), BoxError> {
    let tol = t.cfg.tol;
    let axis = Subspace::from_span(&Matrix::from_cols(2, &[vec![0.0, 1.0]]));
    let inst = ProblemInstance::new(Cone::Wedge(phi), NormSpec::L2, axis)?;
    let nu_v = t.timed("nu", || nu(&inst, tol))?;
    let sig = t.timed("sigma", || sigma(&inst, tol))?;
    let th = measures::theta(&inst);
    t.record("theta", &th, 0.0);
    let narrow = phi < PI / 4.0;
    let (sigma_expected, theta_expected) = if narrow {
        (1.0 / (2.0 * phi.cos()), PI / 2.0 - 2.0 * phi)
    } else {
        (phi.sin(), 0.0)
    };
    t.close("nu = sin(phi)", nu_v.interval(), pt(phi.sin()), tol);
    t.close("sigma = expected", sig.interval(), pt(sigma_expected), tol);
    t.close("theta = expected", th.interval(), pt(theta_expected), tol);
    if narrow {
        let ti = th.interval();
        let cos = Interval::new(ti.hi.cos(), ti.lo.cos());
        t.close(
            "sigma*cos(theta) = nu",
            sig.interval().mul(cos),
            nu_v.interval(),
            tol.max(1e-8),
        );
    }
    t.bounds(&inst)
}

/// Norm kinds exercised by the Hölder suite, on small ambient spaces.
fn holder_norms() -> Result<Vec<(String, NormSpec, usize)>, BoxError> {
    let image = Matrix::from_rows(&[vec![1.0, 0.5], vec![-0.5, 1.0], vec![0.25, 2.0]]);
    let kernel = Matrix::from_rows(&[vec![1.0, 2.0, 0.0], vec![0.0, 1.0, -1.0]]);
    Ok(vec![
        ("l1".into(), NormSpec::L1, 3),
        ("l2".into(), NormSpec::L2, 3),
        ("linf".into(), NormSpec::Linf, 3),
        (
            "induced-orthant".into(),
            NormSpec::induced(Cone::Orthant(3), vec![1.0, 2.0, 0.5])?,
            3,
        ),
        (
            "induced-wedge".into(),
            NormSpec::induced(Cone::Wedge(0.6), vec![0.1, 1.0])?,
            2,
        ),
        (
            "induced-soc".into(),
            NormSpec::induced(Cone::SecondOrder(3), vec![0.0, 0.0, 1.5])?,
            3,
        ),
        (
            "induced-psd".into(),
            NormSpec::induced_canonical(Cone::Psd(2))?,
            3,
        ),
        (
            "image-l1".into(),
            NormSpec::image(image.clone(), Lp::L1)?,
            3,
        ),
        ("image-linf".into(), NormSpec::image(image, Lp::Linf)?, 3),
        (
            "kernel-l2".into(),
            NormSpec::kernel(kernel.clone(), Lp::L2)?,
            3,
        ),
        ("kernel-l1".into(), NormSpec::kernel(kernel, Lp::L1)?, 3),
    ])
}

/// Worst violations over `trials` samples of one norm.
#[derive(Default)]
struct HolderStats {
    holder: f64,
    attained_gap: f64,
    attainer_norm: f64,
    subgradient_gap: f64,
    subgradient_dual: f64,
    triangle: f64,
    homogeneity: f64,
}

fn holder(cfg: &SuiteConfig) -> Result<Report, SuiteError> {
    let err = |seed, e: BoxError| SuiteError {
        part: Part::Holder.name(),
        seed,
        message: e.to_string(),
    };
    let norms = holder_norms().map_err(|e| err(cfg.seed, e))?;
    let jobs: Vec<(usize, (String, NormSpec, usize))> = norms.into_iter().enumerate().collect();
    let results = par::map(jobs, cfg.parallel, |(idx, (name, norm, n))| {
        let seed = cfg.seed.wrapping_add(idx as u64);
        holder_stats(&norm, n, seed, cfg.trials)
            .map(|s| (name, s))
            .map_err(|e| err(seed, e))
    });
    let part = Part::Holder.name();
    let mut report = Report::default();
    for r in results {
        let (name, s) = r?;
        let rows = [
            ("<u,x> - |u|*|x|", s.holder),
            ("|<u,attainer> - |u|*|", s.attained_gap),
            ("|attainer| - 1", s.attainer_norm),
            ("|<g,x> - |x||", s.subgradient_gap),
            ("|g|* - 1", s.subgradient_dual),
            ("|x+y| - |x| - |y|", s.triangle),
            ("||t x| - |t||x||", s.homogeneity),
        ];
        for (what, worst) in rows {
            let c = Check::new(
                format!("{what} <= 1e-9 relative [{name}, {} samples]", cfg.trials),
                pt(worst),
                pt(1e-9),
                0.0,
            );
            report.checks.push(CheckRow::new(part, &c));
        }
    }
    Ok(report)
}

fn holder_stats(
    norm: &NormSpec,
    n: usize,
    seed: u64,
    samples: usize,
) -> Result<HolderStats, BoxError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = HolderStats::default();
    let domain = norm.domain_basis().cloned();
    let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        let scale = 10f64.powf(rng.gen_range(-2.0..2.0));
        let g: Vec<f64> = (0..n)
            .map(|_| scale * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng))
            .collect();
        match &domain {
            Some(b) => b.matvec(&b.tr_matvec(&g)),
            None => g,
        }
    };
    for _ in 0..samples {
        let x = draw(&mut rng);
        let y = draw(&mut rng);
        let u: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let (nx, ny, du) = (norm.value(&x)?, norm.value(&y)?, norm.dual_value(&u)?);
        let rel = |v: f64, scale: f64| v / scale.max(1e-300);

        s.holder = s.holder.max(rel(dot(&u, &x) - du * nx, du * nx));
        let a = norm.dual_attainer(&u)?;
        s.attained_gap = s.attained_gap.max(rel((dot(&u, &a) - du).abs(), du));
        s.attainer_norm = s.attainer_norm.max(norm.value(&a)? - 1.0);
        let g = norm.subgradient(&x)?;
        s.subgradient_gap = s.subgradient_gap.max(rel((dot(&g, &x) - nx).abs(), nx));
        s.subgradient_dual = s.subgradient_dual.max(norm.dual_value(&g)? - 1.0);
        let xy: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        s.triangle = s.triangle.max(rel(norm.value(&xy)? - nx - ny, nx + ny));
        let c: f64 = rng.gen_range(-3.0..3.0);
        let cx: Vec<f64> = x.iter().map(|v| c * v).collect();
        s.homogeneity = s
            .homogeneity
            .max(rel((norm.value(&cx)? - c.abs() * nx).abs(), c.abs() * nx));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(trials: usize) -> SuiteConfig {
        SuiteConfig {
            trials,
            ..SuiteConfig::default()
        }
    }

    #[test]
    fn wedge_example_holds() {
        let r = run_part(
            Part::WedgeExample,
            &SuiteConfig {
                tol: 1e-9,
                ..small(1)
            },
        )
        .unwrap();
        assert!(
            r.checks.iter().all(|c| c.status == "HOLDS"),
            "{}",
            r.summary()
        );
        assert_eq!(r.violated(), 0);
    }

    #[test]
    fn corruption_is_detected() {
        let cfg = SuiteConfig {
            corrupt_bounds: true,
            ..small(2)
        };
        let r = run_part(Part::ChainWedgeL2, &cfg).unwrap();
        assert!(r.violated() >= 2, "{}", r.summary());
    }

    #[test]
    fn quick_parts_hold() {
        for part in [
            Part::Holder,
            Part::SymInfeasible,
            Part::SymOrthantL1,
            Part::OrthantLinf,
            Part::ChainOrthantL1,
        ] {
            let r = run_part(part, &small(6)).unwrap();
            assert_eq!(r.violated(), 0, "{part:?}\n{}", r.summary());
            assert!(!r.checks.is_empty());
        }
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let a = run_part(
            Part::SymPolyhedral,
            &SuiteConfig {
                parallel: true,
                ..small(4)
            },
        )
        .unwrap();
        let b = run_part(
            Part::SymPolyhedral,
            &SuiteConfig {
                parallel: false,
                ..small(4)
            },
        )
        .unwrap();
        assert_eq!(a.checks, b.checks);
    }
}
