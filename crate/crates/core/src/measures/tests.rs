use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_8, SQRT_2};

use approx::assert_abs_diff_eq;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::*;
use crate::norms::Lp;

fn span(n: usize, cols: &[Vec<f64>]) -> Subspace {
    Subspace::from_span(&Matrix::from_cols(n, cols))
}

fn wedge_axis(phi: f64) -> ProblemInstance {
    ProblemInstance::new(Cone::Wedge(phi), NormSpec::L2, span(2, &[vec![0.0, 1.0]])).unwrap()
}

fn diag(norm: NormSpec) -> ProblemInstance {
    ProblemInstance::new(Cone::Orthant(2), norm, span(2, &[vec![1.0, 1.0]])).unwrap()
}

fn random_subspace(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Subspace {
    let data = (0..n * d).map(|_| StandardNormal.sample(rng)).collect();
    Subspace::from_span(&Matrix::from_vec(n, d, data).unwrap())
}

fn assert_inside(exact: &CertifiedValue, oracle: &CertifiedValue, slack: f64, tag: &str) {
    assert!(
        oracle.lower - slack <= exact.estimate && exact.estimate <= oracle.upper + slack,
        "{tag}: exact {} outside oracle [{}, {}]",
        exact.estimate,
        oracle.lower,
        oracle.upper
    );
}

#[test]
fn wedge_example_values() {
    let inst = wedge_axis(FRAC_PI_8);
    let v = nu(&inst, 1e-9).unwrap();
    assert_eq!(v.method, Method::FaceEnum);
    assert_abs_diff_eq!(v.estimate, FRAC_PI_8.sin(), epsilon = 1e-12);
    assert_abs_diff_eq!(
        nu_bar(&inst, 1e-9).unwrap().estimate,
        FRAC_PI_8.sin(),
        epsilon = 1e-12
    );
    let s = sigma(&inst, 1e-9).unwrap();
    assert_abs_diff_eq!(s.estimate, 1.0 / (2.0 * FRAC_PI_8.cos()), epsilon = 1e-12);
    assert_abs_diff_eq!(
        theta(&inst).estimate,
        FRAC_PI_2 - 2.0 * FRAC_PI_8,
        epsilon = 1e-15
    );

    let wide = wedge_axis(FRAC_PI_3);
    assert_abs_diff_eq!(
        sigma(&wide, 1e-9).unwrap().estimate,
        FRAC_PI_3.sin(),
        epsilon = 1e-12
    );
    assert_abs_diff_eq!(
        nu(&wide, 1e-9).unwrap().estimate,
        FRAC_PI_3.sin(),
        epsilon = 1e-12
    );
}

#[test]
fn orthant_examples() {
    let full = ProblemInstance::new(Cone::Orthant(3), NormSpec::Linf, Subspace::whole(3)).unwrap();
    let v = nu(&full, 1e-6).unwrap();
    assert_eq!(v.method, Method::ExactLP);
    assert_abs_diff_eq!(v.estimate, 1.0, epsilon = 1e-12);

    let l2 = diag(NormSpec::L2);
    let h = 0.5 * SQRT_2;
    assert_abs_diff_eq!(nu(&l2, 1e-6).unwrap().estimate, h, epsilon = 1e-12);
    assert_abs_diff_eq!(nu_bar(&l2, 1e-6).unwrap().estimate, h, epsilon = 1e-12);
    assert_abs_diff_eq!(sigma(&l2, 1e-6).unwrap().estimate, h, epsilon = 1e-12);
    let s = sym_measure(&l2, 1e-6).unwrap();
    assert!(s.lower >= 1.0 - 1e-6 && s.upper <= 1.0);

    assert_abs_diff_eq!(
        nu_bar(&diag(NormSpec::Linf), 1e-6).unwrap().estimate,
        0.5,
        epsilon = 1e-12
    );
    assert_abs_diff_eq!(
        sym_measure(&diag(NormSpec::L1), 1e-6).unwrap().estimate,
        1.0,
        epsilon = 1e-12
    );

    let anti =
        ProblemInstance::new(Cone::Orthant(2), NormSpec::L1, span(2, &[vec![1.0, -1.0]])).unwrap();
    assert_eq!(sym_measure(&anti, 1e-6).unwrap().estimate, 0.0);
    assert!(nu(&anti, 1e-6).unwrap().upper < 1e-6);
}

#[test]
fn psd_identity_span() {
    let n = 2;
    let e = crate::linalg::svec(&Matrix::identity(n));
    let inst = ProblemInstance::new(
        Cone::Psd(n),
        NormSpec::induced_canonical(Cone::Psd(n)).unwrap(),
        span(3, &[e]),
    )
    .unwrap();
    let v = nu(&inst, 1e-7).unwrap();
    assert_eq!(v.method, Method::Iterative);
    assert!(
        v.lower <= 1.0 + 1e-12 && v.upper >= 1.0 - 1e-12 && v.width() <= 1e-6,
        "{v:?}"
    );
}

#[test]
fn second_norm_examples() {
    let whole = ProblemInstance::new(Cone::Orthant(2), NormSpec::L2, Subspace::whole(2)).unwrap();
    let scaled = whole
        .clone()
        .with_second_norm(NormSpec::image(Matrix::identity(2).scale(2.0), Lp::L2).unwrap())
        .unwrap();
    assert_abs_diff_eq!(
        nu_ext(&scaled, 1e-8).unwrap().estimate,
        2.0,
        epsilon = 1e-10
    );
    let s = sigma(&whole, 1e-8).unwrap().estimate;
    let big = sigma_ext(&scaled, 1e-8).unwrap();
    assert!((big.lower - 2.0 * s).abs() <= 1e-6 && (big.upper - 2.0 * s).abs() <= 1e-6);

    let same = diag(NormSpec::L1).with_second_norm(NormSpec::L1).unwrap();
    assert_abs_diff_eq!(
        nu_ext(&same, 1e-8).unwrap().estimate,
        nu(&same, 1e-8).unwrap().estimate,
        epsilon = 1e-12
    );
    assert_abs_diff_eq!(
        sigma_ext(&same, 1e-8).unwrap().estimate,
        sigma(&same, 1e-8).unwrap().estimate,
        epsilon = 1e-12
    );

    // ⫼x⫼ = |Ax| with A = [1, −1] on L = ker A: compare with ν̄ under the same
    // scaling by hand
    let a = Matrix::from_rows(&[vec![1.0, -1.0]]);
    let k = ProblemInstance::from_data(Cone::Orthant(2), NormSpec::L2, a.clone(), Form::Kernel)
        .unwrap()
        .with_second_norm(NormSpec::kernel(a, Lp::L2).unwrap())
        .unwrap();
    // y = (1,−1) has ⫼y⫼* = |(AAᵀ)⁻¹Ay| = 1 and distance 1 to the orthant
    let v = nu_bar_ext(&k, 1e-8).unwrap();
    assert!(v.lower <= 1.0 + 1e-8 && v.upper >= 1.0 - 1e-8, "{v:?}");
}

#[test]
fn sym_point_examples() {
    assert_eq!(sym_point(&[vec![1.0], vec![-1.0]]).unwrap(), 1.0);
    assert_abs_diff_eq!(
        sym_point(&[vec![-1.0, 0.0], vec![2.0, 0.0]]).unwrap(),
        0.5,
        epsilon = 1e-12
    );
    assert_eq!(sym_point(&[vec![0.0, 0.0]]).unwrap(), 1.0);
    assert!(matches!(
        sym_point(&[vec![1.0], vec![2.0]]),
        Err(MeasureError::ZeroNotInS)
    ));
}

#[test]
fn wedge_bounds_are_tight() {
    let rep = verify_bounds(&wedge_axis(FRAC_PI_8), 1e-9).unwrap();
    assert!(!rep.violated());
    let c = rep
        .checks
        .iter()
        .find(|c| c.name == "cos(theta)*sigma <= nu")
        .unwrap();
    assert_eq!(c.status, CheckStatus::Holds);
    assert!(c.slack.abs() < 1e-9);
}

#[test]
fn l1_orthant_symmetry_equality() {
    let inst = diag(NormSpec::L1);
    let rep = verify_bounds(&inst, 1e-9).unwrap();
    assert_abs_diff_eq!(rep.values.sigma.estimate, 0.5, epsilon = 1e-12);
    assert!(
        rep.checks.iter().all(|c| c.status == CheckStatus::Holds),
        "{:?}",
        rep.checks
    );
}

#[test]
fn induced_norm_sigma_is_nu() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let inst = ProblemInstance::new(
            Cone::Orthant(3),
            NormSpec::Linf,
            random_subspace(&mut rng, 3, 2),
        )
        .unwrap();
        assert_eq!(nu(&inst, 1e-6).unwrap(), sigma(&inst, 1e-6).unwrap());
    }
}

#[test]
fn exact_paths_fall_inside_oracle_brackets() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let opts = OracleOptions::with_tol(1e-5);
    let cases: Vec<(Cone, NormSpec)> = vec![
        (Cone::Orthant(3), NormSpec::L1),
        (Cone::Orthant(3), NormSpec::Linf),
        (Cone::Orthant(3), NormSpec::L2),
        (Cone::Wedge(0.5), NormSpec::L1),
        (Cone::Wedge(1.1), NormSpec::L2),
        (
            Cone::Orthant(3),
            NormSpec::induced(Cone::Orthant(3), vec![1.0, 2.0, 0.5]).unwrap(),
        ),
    ];
    for (cone, norm) in cases {
        let n = cone.ambient_dim();
        for _ in 0..4 {
            let d = if n == 2 {
                1
            } else {
                1 + (rand::Rng::gen_range(&mut rng, 0..2))
            };
            let inst =
                ProblemInstance::new(cone, norm.clone(), random_subspace(&mut rng, n, d)).unwrap();
            let tag = format!("{} {}", cone.name(), norm.name());
            let e = nu(&inst, 1e-6).unwrap();
            assert!(e.method.is_exact(), "{tag}");
            assert_inside(&e, &nu_oracle(&inst, &opts).unwrap(), 1e-9, &tag);
            assert_inside(
                &nu_bar(&inst, 1e-6).unwrap(),
                &nu_bar_oracle(&inst, &opts).unwrap(),
                1e-9,
                &tag,
            );
            assert_inside(
                &sigma(&inst, 1e-6).unwrap(),
                &sigma_oracle(&inst, &opts).unwrap(),
                1e-9,
                &tag,
            );
            let s = sym_measure(&inst, 1e-6).unwrap();
            assert_inside(&s, &sym_measure_oracle(&inst, &opts).unwrap(), 1e-9, &tag);
            let rep = verify_bounds(&inst, 1e-6).unwrap();
            assert!(!rep.violated(), "{tag}: {:?}", rep.checks);
        }
    }
}

#[test]
fn pair_quantities_match_oracle() {
    let opts = 1e-5;
    for (cone, norm) in [
        (Cone::Orthant(3), NormSpec::L1),
        (Cone::Wedge(0.4), NormSpec::Linf),
        (Cone::Wedge(1.2), NormSpec::L1),
    ] {
        let inst = ProblemInstance::new(cone, norm, Subspace::whole(cone.ambient_dim())).unwrap();
        let m1 = pair_norm_min(&inst, opts).unwrap();
        let m2 = pairing_min_max(&inst, opts).unwrap();
        assert!(m1.method.is_exact() && m2.method.is_exact());
        let cx = Ctx::new(&inst, opts).unwrap();
        let cap = cx.cap();
        let norm = cx.norm();
        let r1 = ratio_oracle(
            &cx.domain(),
            |u| Ok(padded(norm.dual_value(u)?)),
            |u| cap.support(u),
            (cx.radius(), cx.radius()),
            &cx.opts,
        )
        .unwrap();
        let r2 = ratio_oracle(
            &cx.domain(),
            |u| cap.support(u),
            |u| Ok(padded(norm.dual_value(u)?)),
            (cx.radius(), cx.radius()),
            &cx.opts,
        )
        .unwrap();
        assert!(
            r1.lo - 1e-9 <= m1.estimate && m1.estimate <= r1.hi + 1e-9,
            "{m1:?} {r1:?}"
        );
        assert!(
            r2.lo - 1e-9 <= m2.estimate && m2.estimate <= r2.hi + 1e-9,
            "{m2:?} {r2:?}"
        );
        assert!(m1.estimate >= 1.0 - 1e-12 && m2.estimate <= 1.0 + 1e-12);
    }
}

#[test]
fn feasibility_witness_matches_sign_of_nu() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let inst = ProblemInstance::new(
            Cone::Orthant(3),
            NormSpec::L2,
            random_subspace(&mut rng, 3, 1),
        )
        .unwrap();
        let v = nu(&inst, 1e-8).unwrap();
        let (lam, x) = feasibility_witness(&inst).unwrap();
        assert_eq!(v.estimate > 1e-9, lam.mid() > 1e-9);
        if lam.mid() > 1e-9 {
            assert!(x.iter().all(|&c| c > 0.0));
        }
    }
}
