//! Certified global minimization of ratio objectives `N(u)/D(u)` by
//! Lipschitz branch and bound.
//!
//! `N ≥ 0` and `D ≥ 0` are evaluated as intervals (so inexact inner solves
//! compose) and carry ℓ2 Lipschitz constants valid on the whole ambient
//! space. Over a cell of ℓ2 radius `r` around `c` this gives
//!
//! ```text
//! N/D ≥ max(0, N_lo(c) − L_N·r) / (D_hi(c) + L_D·r)
//! ```
//!
//! Objectives must be invariant under positive scaling of `u`; the domains
//! then cover the relevant set of rays.
//!
//! * `ConeBase`: the slice `{u ∈ C : ⟨g, u⟩ = 1}` for `g ∈ int C*`, boxed in
//!   coordinates of `g⊥`. Cells whose centre lies farther from `C` than
//!   their radius are discarded.
//! * `SubspaceSphere`: the faces of the cube `‖z‖∞ = 1` in coordinates of an
//!   orthonormal basis.
//!
//! Children are evaluated in batches; with the `parallel` feature a batch
//! is spread over the rayon pool. Reduction is by min/max, and batch
//! composition depends only on the deterministic queue order, so results
//! do not depend on scheduling.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::cones::{Cone, ConeError};
use crate::interval::Interval;
use crate::linalg::{complement_basis, dot, norm2, Matrix};
use crate::norms::NormError;

pub const MAX_DIM: usize = 6;
pub const DEFAULT_BUDGET: usize = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("oracle limited to ambient dimension {MAX_DIM}, got {0}")]
    DimensionTooLarge(usize),
    #[error("empty domain")]
    EmptyDomain,
    #[error("domain normal is not interior to the dual cone")]
    UnboundedDomain,
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error("{0}")]
    Objective(String),
}

#[derive(Debug, Clone, Copy)]
pub struct Ratio {
    pub num: Interval,
    pub den: Interval,
}

impl Ratio {
    pub fn value(num: Interval) -> Ratio {
        Ratio {
            num,
            den: Interval::point(1.0),
        }
    }

    /// Rigorous upper bound of the ratio at this point.
    fn upper(&self) -> f64 {
        if self.den.lo <= 0.0 {
            f64::INFINITY
        } else {
            (self.num.hi / self.den.lo).next_up()
        }
    }
}

pub trait Objective: Sync {
    fn eval(&self, u: &[f64]) -> Result<Ratio, OracleError>;
    /// `(L_N, L_D)` with respect to ℓ2 on the ambient space.
    fn lipschitz(&self) -> (f64, f64);
}

/// Objective from a closure.
pub struct FnObjective<F> {
    pub f: F,
    pub lip_num: f64,
    pub lip_den: f64,
}

impl<F> Objective for FnObjective<F>
where
    F: Fn(&[f64]) -> Result<Ratio, OracleError> + Sync,
{
    fn eval(&self, u: &[f64]) -> Result<Ratio, OracleError> {
        (self.f)(u)
    }

    fn lipschitz(&self) -> (f64, f64) {
        (self.lip_num, self.lip_den)
    }
}

#[derive(Debug, Clone)]
pub enum Domain {
    ConeBase { cone: Cone, normal: Vec<f64> },
    SubspaceSphere { basis: Matrix },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    BudgetExhausted,
}

#[derive(Debug, Clone)]
pub struct CertifiedExtremum {
    pub lo: f64,
    pub hi: f64,
    /// Domain point attaining `hi` (empty if none was found).
    pub witness: Vec<f64>,
    pub cells_evaluated: usize,
    pub lipschitz_const: f64,
    pub status: Status,
}

impl CertifiedExtremum {
    pub fn interval(&self) -> Interval {
        Interval::new(self.lo, self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone)]
pub struct OracleOptions {
    pub tol: f64,
    pub budget: usize,
    pub batch: usize,
    pub parallel: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            tol: 1e-6,
            budget: DEFAULT_BUDGET,
            batch: 64,
            parallel: true,
        }
    }
}

impl OracleOptions {
    pub fn with_tol(tol: f64) -> Self {
        OracleOptions {
            tol,
            ..Default::default()
        }
    }
}

struct Param {
    offset: Vec<f64>,
    /// Orthonormal columns.
    frame: Matrix,
    cone: Option<Cone>,
}

impl Param {
    fn map(&self, p: &[f64]) -> Vec<f64> {
        let mut u = self.frame.matvec(p);
        for (a, b) in u.iter_mut().zip(&self.offset) {
            *a += b;
        }
        u
    }
}

#[derive(Debug, Clone)]
struct Cell {
    center: Vec<f64>,
    half: Vec<f64>,
    lower: f64,
    id: u64,
}

impl Cell {
    fn radius(&self) -> f64 {
        norm2(&self.half)
    }
}

// min-heap on (lower, id)
impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .lower
            .total_cmp(&self.lower)
            .then_with(|| other.id.cmp(&self.id))
    }
}

struct Evaluated {
    cell: Option<Cell>,
    candidate: Option<(f64, Vec<f64>)>,
}

fn setup(domain: &Domain) -> Result<(Param, Vec<Cell>), OracleError> {
    match domain {
        Domain::ConeBase { cone, normal } => {
            let n = cone.ambient_dim();
            if n > MAX_DIM {
                return Err(OracleError::DimensionTooLarge(n));
            }
            let gg = dot(normal, normal);
            let r_in = cone.dual().inradius(normal)?;
            if !(r_in > 0.0) {
                return Err(OracleError::UnboundedDomain);
            }
            // ⟨g, u⟩ ≥ r_in‖u‖ on C, so the slice sits inside ‖u‖ ≤ 1/r_in
            let big_r = 1.0 / r_in;
            let half = (big_r * big_r - 1.0 / gg).max(0.0).sqrt() * (1.0 + 1e-12);
            let g_unit = Matrix::from_cols(n, &[normal.iter().map(|v| v / gg.sqrt()).collect()]);
            let frame = complement_basis(&g_unit);
            let offset: Vec<f64> = normal.iter().map(|v| v / gg).collect();
            let d = frame.cols();
            let cells = vec![Cell {
                center: vec![0.0; d],
                half: vec![half; d],
                lower: f64::NEG_INFINITY,
                id: 0,
            }];
            Ok((
                Param {
                    offset,
                    frame,
                    cone: Some(*cone),
                },
                cells,
            ))
        }
        Domain::SubspaceSphere { basis } => {
            let n = basis.rows();
            if n > MAX_DIM {
                return Err(OracleError::DimensionTooLarge(n));
            }
            let m = basis.cols();
            if m == 0 {
                return Err(OracleError::EmptyDomain);
            }
            let mut cells = Vec::new();
            for k in 0..m {
                for s in [1.0, -1.0] {
                    let mut center = vec![0.0; m];
                    center[k] = s;
                    let mut half = vec![1.0; m];
                    half[k] = 0.0;
                    cells.push(Cell {
                        center,
                        half,
                        lower: f64::NEG_INFINITY,
                        id: cells.len() as u64,
                    });
                }
            }
            Ok((
                Param {
                    offset: vec![0.0; n],
                    frame: basis.clone(),
                    cone: None,
                },
                cells,
            ))
        }
    }
}

fn evaluate<O: Objective + ?Sized>(
    obj: &O,
    param: &Param,
    mut cell: Cell,
    lips: (f64, f64),
) -> Result<Evaluated, OracleError> {
    let r = cell.radius();
    let u = param.map(&cell.center);
    let mut candidate = None;
    if let Some(cone) = param.cone {
        let p = cone.project(&u)?;
        let d = norm2(&u.iter().zip(&p).map(|(a, b)| a - b).collect::<Vec<_>>());
        if d > r * (1.0 + 1e-9) + 1e-15 {
            return Ok(Evaluated {
                cell: None,
                candidate: None,
            });
        }
        if norm2(&p) > 0.0 {
            if d == 0.0 {
                let v = obj.eval(&u)?;
                candidate = Some((v.upper(), u.clone()));
                cell.lower = lower_bound(&v, r, lips);
                return Ok(Evaluated {
                    cell: Some(cell),
                    candidate,
                });
            }
            let v = obj.eval(&p)?;
            candidate = Some((v.upper(), p));
        }
    }
    let v = obj.eval(&u)?;
    if param.cone.is_none() {
        candidate = Some((v.upper(), u));
    }
    cell.lower = lower_bound(&v, r, lips);
    Ok(Evaluated {
        cell: Some(cell),
        candidate,
    })
}

fn lower_bound(v: &Ratio, r: f64, (ln, ld): (f64, f64)) -> f64 {
    let num = (v.num.lo - ln * r).max(0.0).next_down().max(0.0);
    let den = (v.den.hi + ld * r).next_up();
    if num == 0.0 {
        0.0
    } else if den <= 0.0 {
        f64::INFINITY
    } else {
        (num / den).next_down()
    }
}

/// Certified minimum of a scale-invariant ratio objective over a domain.
pub fn certified_min<O: Objective + ?Sized>(
    obj: &O,
    domain: &Domain,
    opts: &OracleOptions,
) -> Result<CertifiedExtremum, OracleError> {
    let (param, initial) = setup(domain)?;
    let lips = obj.lipschitz();
    let mut best_hi = f64::INFINITY;
    let mut witness = Vec::new();
    let mut evaluations = 0usize;
    let mut resolved_lo = f64::INFINITY;
    let mut next_id = initial.len() as u64;
    let mut heap = BinaryHeap::new();

    let absorb = |results: Vec<Result<Evaluated, OracleError>>,
                  heap: &mut BinaryHeap<Cell>,
                  best_hi: &mut f64,
                  witness: &mut Vec<f64>|
     -> Result<(), OracleError> {
        for r in results {
            let e = r?;
            if let Some((v, p)) = e.candidate {
                if v < *best_hi {
                    *best_hi = v;
                    *witness = p;
                }
            }
            if let Some(c) = e.cell {
                heap.push(c);
            }
        }
        Ok(())
    };

    evaluations += initial.len();
    let results = crate::par::map(initial, opts.parallel, |c| evaluate(obj, &param, c, lips));
    absorb(results, &mut heap, &mut best_hi, &mut witness)?;

    let mut status = Status::Converged;
    loop {
        let frontier_lo = heap.peek().map(|c| c.lower).unwrap_or(f64::INFINITY);
        let lo = frontier_lo.min(resolved_lo).min(best_hi);
        if best_hi - lo <= opts.tol || heap.is_empty() {
            break;
        }
        if evaluations >= opts.budget {
            status = Status::BudgetExhausted;
            break;
        }
        let mut children = Vec::with_capacity(2 * opts.batch);
        while children.len() < 2 * opts.batch {
            let Some(cell) = heap.pop() else { break };
            if cell.lower >= best_hi - opts.tol {
                // nothing left below the incumbent by more than tol
                resolved_lo = resolved_lo.min(cell.lower);
                heap.clear();
                break;
            }
            let (axis, h) = cell
                .half
                .iter()
                .copied()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap_or((0, 0.0));
            if h <= 1e-15 {
                resolved_lo = resolved_lo.min(cell.lower);
                continue;
            }
            for s in [-0.5, 0.5] {
                let mut c = cell.clone();
                c.half[axis] = 0.5 * h;
                c.center[axis] += s * h;
                c.id = next_id;
                next_id += 1;
                children.push((c, cell.lower));
            }
        }
        if children.is_empty() {
            continue;
        }
        evaluations += children.len();
        let results = crate::par::map(children, opts.parallel, |(c, parent)| {
            evaluate(obj, &param, c, lips).map(|mut e| {
                if let Some(cell) = e.cell.as_mut() {
                    cell.lower = cell.lower.max(parent);
                }
                e
            })
        });
        absorb(results, &mut heap, &mut best_hi, &mut witness)?;
    }
    let frontier_lo = heap.iter().map(|c| c.lower).fold(f64::INFINITY, f64::min);
    let lo = frontier_lo.min(resolved_lo).min(best_hi).max(0.0);
    if !best_hi.is_finite() && !lo.is_finite() {
        return Err(OracleError::EmptyDomain);
    }
    Ok(CertifiedExtremum {
        lo,
        hi: best_hi.max(lo),
        witness,
        cells_evaluated: evaluations,
        lipschitz_const: lips.0.max(lips.1),
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::orthonormalize;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_8};

    fn proj_len(basis: &Matrix) -> impl Fn(&[f64]) -> Result<Ratio, OracleError> + Sync + '_ {
        move |u: &[f64]| {
            let c = basis.tr_matvec(u);
            Ok(Ratio {
                num: Interval::around(norm2(&c), 1e-15),
                den: Interval::around(norm2(u), 1e-15),
            })
        }
    }

    #[test]
    fn projection_length_over_orthant() {
        let l = orthonormalize(&Matrix::from_cols(2, &[vec![1.0, 1.0]]));
        let obj = FnObjective {
            f: proj_len(&l),
            lip_num: 1.0,
            lip_den: 1.0,
        };
        let dom = Domain::ConeBase {
            cone: Cone::Orthant(2),
            normal: vec![1.0, 1.0],
        };
        for parallel in [true, false] {
            let opts = OracleOptions {
                tol: 1e-7,
                parallel,
                ..Default::default()
            };
            let r = certified_min(&obj, &dom, &opts).unwrap();
            assert!(r.lo <= FRAC_1_SQRT_2 && FRAC_1_SQRT_2 <= r.hi, "{r:?}");
            assert!(r.width() <= 1e-7);
        }
    }

    #[test]
    fn constant_objective() {
        let obj = FnObjective {
            f: |_: &[f64]| Ok(Ratio::value(Interval::point(1.0))),
            lip_num: 0.0,
            lip_den: 0.0,
        };
        let dom = Domain::SubspaceSphere {
            basis: Matrix::identity(3),
        };
        let r = certified_min(&obj, &dom, &OracleOptions::default()).unwrap();
        assert!(r.lo <= 1.0 && 1.0 <= r.hi && r.width() < 1e-15);
    }

    #[test]
    fn wedge_nu_brackets_sine() {
        // ν for the wedge with L the x₂ axis: min over unit u ∈ K* of |u₂|
        let phi = FRAC_PI_8;
        let l = Matrix::from_cols(2, &[vec![0.0, 1.0]]);
        let obj = FnObjective {
            f: proj_len(&l),
            lip_num: 1.0,
            lip_den: 1.0,
        };
        let k = Cone::Wedge(phi);
        let dom = Domain::ConeBase {
            cone: k.dual(),
            normal: k.canonical_e(),
        };
        let r = certified_min(&obj, &dom, &OracleOptions::with_tol(1e-9)).unwrap();
        assert!(r.lo <= phi.sin() && phi.sin() <= r.hi, "{r:?}");
    }

    #[test]
    fn results_do_not_depend_on_parallelism() {
        let l = orthonormalize(&Matrix::from_cols(
            3,
            &[vec![1.0, 2.0, 0.5], vec![0.0, 1.0, -1.0]],
        ));
        let obj = FnObjective {
            f: proj_len(&l),
            lip_num: 1.0,
            lip_den: 1.0,
        };
        let dom = Domain::ConeBase {
            cone: Cone::SecondOrder(3),
            normal: vec![0.0, 0.0, 1.0],
        };
        let mut opts = OracleOptions::with_tol(1e-6);
        let a = certified_min(&obj, &dom, &opts).unwrap();
        opts.parallel = false;
        let b = certified_min(&obj, &dom, &opts).unwrap();
        assert_eq!(
            (a.lo, a.hi, a.cells_evaluated),
            (b.lo, b.hi, b.cells_evaluated)
        );
    }

    #[test]
    fn budget_exhaustion_keeps_valid_bounds() {
        let l = Matrix::from_cols(2, &[vec![0.0, 1.0]]);
        let obj = FnObjective {
            f: proj_len(&l),
            lip_num: 1.0,
            lip_den: 1.0,
        };
        let k = Cone::Wedge(0.3);
        let dom = Domain::ConeBase {
            cone: k.dual(),
            normal: k.canonical_e(),
        };
        let small = OracleOptions {
            tol: 1e-12,
            budget: 20,
            ..Default::default()
        };
        let r = certified_min(&obj, &dom, &small).unwrap();
        assert_eq!(r.status, Status::BudgetExhausted);
        assert!(r.lo <= 0.3f64.sin() && 0.3f64.sin() <= r.hi);
        let more = OracleOptions {
            budget: 200,
            ..small
        };
        let r2 = certified_min(&obj, &dom, &more).unwrap();
        assert!(r2.width() <= r.width());
    }

    #[test]
    fn rejects_large_dimension() {
        let obj = FnObjective {
            f: |_: &[f64]| Ok(Ratio::value(Interval::point(1.0))),
            lip_num: 0.0,
            lip_den: 0.0,
        };
        let dom = Domain::SubspaceSphere {
            basis: Matrix::identity(7),
        };
        assert!(matches!(
            certified_min(&obj, &dom, &OracleOptions::default()),
            Err(OracleError::DimensionTooLarge(7))
        ));
    }
}
