//! Desk-scale form of the zero-distribution theorem, run as an integration
//! property over the fixture families: whenever fitting the slow-decrease
//! constant succeeds with a stable value across three range doublings, the
//! counting check on the same example must come back bounded.

use canprod::invertibility::{CanonicalEvaluator, CompletedEvaluator};
use canprod::zero_model::{condensed_cluster_lattice, integer_lattice, perturbed_lattice};
use canprod::{
    fit_a, partition_near_real, theorem1_check, CompiledProduct, LogModulus, ProductVariant,
    Theorem1Verdict, Weight,
};

const STABILITY: f64 = 1.10;

struct Family {
    name: &'static str,
    zeros: canprod::ZeroSequence,
    anchors: Vec<f64>,
    x_max: f64,
    completed_eval: bool,
}

fn families() -> Vec<Family> {
    let w = Weight::Log { c: 1.0 };
    let (cluster_zs, centers, _) = condensed_cluster_lattice(7, 1250, 0.02).unwrap();
    vec![
        Family {
            name: "integer-lattice",
            zeros: integer_lattice(5000).unwrap(),
            anchors: Vec::new(),
            x_max: 1000.0,
            completed_eval: false,
        },
        Family {
            name: "perturbed-lattice",
            zeros: perturbed_lattice(4000, &w, 1.0, 42).unwrap(),
            anchors: Vec::new(),
            x_max: 800.0,
            completed_eval: false,
        },
        Family {
            name: "condensed-clusters",
            zeros: cluster_zs,
            anchors: centers,
            x_max: 1200.0,
            completed_eval: true,
        },
    ]
}

fn fits_for(family: &Family) -> Vec<Option<f64>> {
    let compiled = CompiledProduct::compile(&family.zeros, &ProductVariant::Plain).unwrap();
    let fit_with = |eval: &dyn LogModulus| {
        [4.0, 2.0, 1.0]
            .iter()
            .map(|d| {
                fit_a(eval, (2.0, family.x_max / d), 40, 64.0, &family.anchors)
                    .unwrap()
                    .fitted()
            })
            .collect::<Vec<_>>()
    };
    if family.completed_eval {
        fit_with(&CompletedEvaluator::new(&compiled))
    } else {
        fit_with(&CanonicalEvaluator::new(&compiled, 1e-6))
    }
}

#[test]
fn stable_fit_implies_bounded_counting() {
    let w = Weight::Log { c: 1.0 };
    for family in families() {
        let fits = fits_for(&family);
        let stable_and_finite = fits.iter().all(Option::is_some) && {
            let vals: Vec<f64> = fits.iter().map(|a| a.unwrap()).collect();
            let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            hi / lo <= STABILITY
        };

        let p = partition_near_real(&family.zeros, &w, 1.0).unwrap();
        let report = theorem1_check(
            &p,
            &family.zeros,
            &w,
            (
                std::f64::consts::E,
                (family.zeros.coverage_radius() - 1.0).min(family.x_max),
            ),
            0.05,
        )
        .unwrap();

        // contrapositive at desk scale: a stable finite constant forces a
        // bounded counting ratio
        if stable_and_finite {
            assert_eq!(
                report.verdict,
                Theorem1Verdict::Bounded,
                "{}: fit stable ({fits:?}) but counting verdict is {:?}",
                family.name,
                report.verdict
            );
        }
        // and the fixture families sit on the expected sides
        match family.name {
            "condensed-clusters" => {
                assert!(
                    !stable_and_finite,
                    "{}: expected growing fits, got {fits:?}",
                    family.name
                );
                assert_eq!(report.verdict, Theorem1Verdict::UnboundedTrend);
            }
            _ => {
                assert!(
                    stable_and_finite,
                    "{}: expected a stable fit, got {fits:?}",
                    family.name
                );
            }
        }
        println!(
            "theorem1 contract [{}]: fits {:?}, verdict {:?}",
            family.name, fits, report.verdict
        );
    }
}
