use conic_cond::instance::{
    generate, ConeFile, ConeKind, DataFile, DataForm, GenRequest, InnerNorm, InstanceFile,
    NormFile, Require, SubspaceFile, SubspaceForm,
};
use conic_cond::interval::Interval;
use conic_cond::report::{fmt_interval, CheckRow, MeasureRow, Report};
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e3..1e3f64,
        any::<f64>().prop_filter("finite", |v| v.is_finite()),
        Just(0.0),
        Just(-0.0),
        Just(1e-300),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn instance_text_is_a_fixed_point(cols in prop::collection::vec(prop::collection::vec(finite(), 3), 1..3)) {
        let matrix: Vec<Vec<f64>> = (0..3).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
        let file = InstanceFile {
            version: "1".into(),
            cone: ConeFile::Orthant { dim: 3 },
            norm: NormFile::Induced { e: Some(vec![1.0, 0.5, 2.0]) },
            subspace: SubspaceFile { form: SubspaceForm::Span, matrix: matrix.clone() },
            data_matrix: Some(DataFile { form: DataForm::Image, matrix, norm: Some(NormFile::L1) }),
            second_norm: Some(NormFile::Image {
                matrix: vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]],
                inner: InnerNorm::Linf,
            }),
        };
        let text = file.emit();
        let back = InstanceFile::parse(&text).unwrap();
        prop_assert_eq!(&back, &file);
        prop_assert_eq!(back.emit(), text);
    }

    #[test]
    fn report_text_is_a_fixed_point(vals in prop::collection::vec(finite(), 4), hi in finite()) {
        let iv = Interval::new(vals[0].min(hi), vals[0].max(hi));
        let report = Report {
            measures: vec![MeasureRow {
                kind: "measure".into(),
                name: "nu".into(),
                estimate: vals[0],
                lower: vals[1],
                upper: vals[2],
                method: "oracle".into(),
                tol: 1e-6,
                wall_ms: vals[3].abs(),
            }],
            checks: vec![CheckRow {
                kind: "suite".into(),
                name: "a, \"quoted\" <= b".into(),
                lhs: fmt_interval(iv),
                rhs: fmt_interval(Interval::point(vals[1])),
                slack: vals[2],
                status: "HOLDS".into(),
            }],
        };
        let text = report.to_csv();
        let back = Report::parse(&text).unwrap();
        prop_assert_eq!(&back, &report);
        prop_assert_eq!(back.to_csv(), text);
    }
}

#[test]
fn generated_instances_round_trip_in_both_forms() {
    for (kind, dim, k) in [
        (ConeKind::Orthant, 4, 2),
        (ConeKind::Soc, 3, 1),
        (ConeKind::Psd, 2, 2),
        (ConeKind::Wedge, 2, 1),
    ] {
        for form in [SubspaceForm::Span, SubspaceForm::Kernel] {
            let req = GenRequest::new(17, kind, dim, k, Require::Either).form(form);
            let text = generate(&req).unwrap().emit();
            assert_eq!(
                InstanceFile::parse(&text).unwrap().emit(),
                text,
                "{kind:?} {form:?}"
            );
        }
    }
}

#[test]
fn wedge_angle_survives_the_text_format() {
    let phi = std::f64::consts::PI / 16.0;
    let file = InstanceFile {
        version: "1".into(),
        cone: ConeFile::Wedge { phi },
        norm: NormFile::L2,
        subspace: SubspaceFile {
            form: SubspaceForm::Span,
            matrix: vec![vec![0.0], vec![1.0]],
        },
        data_matrix: None,
        second_norm: None,
    };
    match InstanceFile::parse(&file.emit()).unwrap().cone {
        ConeFile::Wedge { phi: back } => assert_eq!(back.to_bits(), phi.to_bits()),
        other => panic!("{other:?}"),
    }
}
