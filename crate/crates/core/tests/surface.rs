use bsscl_core::engine::{alternating_words, lower_bound_report, LowerBoundReport};
use bsscl_core::ratlp::rat;
use bsscl_core::surface::{
    build_band_surface, gap_to_lower_bound, has_extremal_surface, minimal_scale, upper_bound_sequence,
    verify_certificate,
};
use bsscl_core::{Caps, CyclicWord, Error, GroupParams, SurfaceCertificate};
use num_traits::{Signed, Zero};

fn report(m: i64, l: i64, text: &str) -> LowerBoundReport {
    let w = CyclicWord::parse(text, GroupParams::new(m, l).unwrap()).unwrap();
    lower_bound_report(&w, &Caps::default()).unwrap()
}

#[test]
fn length_two_sequence_converges() {
    let r = report(2, 3, "t a t^-1 a");
    let c = build_band_surface(&r, 6).unwrap();
    assert_eq!((c.s, c.k), (5, 2));
    assert!(c.d + c.k >= c.s);
    let bounds = upper_bound_sequence(&r, &[6, 12, 60]).unwrap();
    for (b, limit) in bounds.iter().zip([rat(1, 6), rat(1, 12), rat(1, 60)]) {
        let gap = b - &r.value;
        assert!(gap.is_positive() && gap <= limit, "gap {gap}, limit {limit}");
    }
    assert!(bounds.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn balanced_sequence_is_constant() {
    let r = report(2, 3, "t a t^-1 a^-1 t a t^-1 a^-2");
    let n = minimal_scale(&r);
    let bounds = upper_bound_sequence(&r, &[n, 2 * n, 10 * n]).unwrap();
    assert!(bounds.iter().all(|b| *b == r.value));
    let c = build_band_surface(&r, n).unwrap();
    assert_eq!(c.d, c.s);
    assert!(gap_to_lower_bound(&c, &r).is_zero());
}

#[test]
fn bad_scale_is_rejected() {
    let r = report(2, 3, "t a t^-1 a");
    assert!(matches!(build_band_surface(&r, 5), Err(Error::NonIntegralScaling { n: 5 })));
    assert!(matches!(build_band_surface(&r, 0), Err(Error::PreconditionViolated(_))));
}

#[test]
fn mixed_words_have_no_band_surface() {
    let r = report(2, 3, "t^2 a t^-1 a t^-1 a^2");
    assert!(matches!(build_band_surface(&r, 6), Err(Error::NotAlternating)));
}

#[test]
fn balance_condition_decides_extremality() {
    for p in [(2, 3), (2, -3), (3, 4)] {
        let params = GroupParams::new(p.0, p.1).unwrap();
        for w in alternating_words(params, 2, 2).unwrap() {
            let r = lower_bound_report(&w, &Caps::default()).unwrap();
            let balance = has_extremal_surface(&w).unwrap();
            let c = build_band_surface(&r, minimal_scale(&r) * 2).unwrap();
            assert!(verify_certificate(&c, &w, &r.graph).passed, "{params} {w}");
            assert_eq!(c.upper_bound == r.value, balance.extremal_exists, "{params} {w}");
            assert!(gap_to_lower_bound(&c, &r) <= rat(c.k as i64, 2 * c.n_scale as i64));
        }
    }
}

#[test]
fn certificates_survive_json() {
    let r = report(2, 3, "t a t^-1 a^2 t a^-1 t^-1 a");
    let c = build_band_surface(&r, minimal_scale(&r)).unwrap();
    let text = serde_json::to_string(&c).unwrap();
    assert!(text.contains("\"N\"") && text.contains("\"K\""));
    let back: SurfaceCertificate = serde_json::from_str(&text).unwrap();
    assert_eq!(back, c);
    assert!(verify_certificate(&back, &r.word, &r.graph).passed);
}

#[test]
fn tampered_certificates_fail() {
    let r = report(2, 3, "t a t^-1 a^-1 t a t^-1 a^-2");
    let c = build_band_surface(&r, minimal_scale(&r)).unwrap();

    let mut bad = c.clone();
    bad.weights[0] += 1;
    let rep = verify_certificate(&bad, &r.word, &r.graph);
    assert!(!rep.passed);
    assert_eq!(rep.violations.iter().filter(|v| v.starts_with("fill equation")).count(), 2);

    let mut bad = c.clone();
    bad.d -= 1;
    assert!(verify_certificate(&bad, &r.word, &r.graph).first_violation().unwrap().starts_with("d recorded"));

    let mut bad = c.clone();
    bad.upper_bound = &c.upper_bound + rat(1, 7);
    assert!(!verify_certificate(&bad, &r.word, &r.graph).passed);

    let mut bad = c.clone();
    bad.pairing.swap(0, 1);
    bad.pairing[0][1] = bad.pairing[1][1];
    assert!(!verify_certificate(&bad, &r.word, &r.graph).passed);

    let other = report(2, 3, "t a t^-1 a");
    assert!(!verify_certificate(&c, &other.word, &other.graph).passed);
}

mod hostile {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig { cases: 300, failure_persistence: None, ..ProptestConfig::default() })]

        // Arbitrary edits to a valid certificate are reported, never a panic.
        #[test]
        fn verifier_never_panics(
            slot in 0usize..64,
            value in any::<usize>(),
            weight in any::<i64>(),
            counts in (any::<u64>(), any::<u64>(), any::<u64>(), any::<u64>()),
            which in 0u8..6,
        ) {
            let r = report(2, 3, "t a t^-1 a^2 t a^-1 t^-1 a");
            let mut c = build_band_surface(&r, minimal_scale(&r)).unwrap();
            match which {
                0 => {
                    let i = slot % c.pairing.len();
                    c.pairing[i][slot % 2] = value % 200;
                }
                1 => {
                    let i = slot % c.weights.len();
                    c.weights[i] = weight;
                }
                2 => {
                    let i = slot % c.polygons.len();
                    let j = slot % c.polygons[i].circuit.len();
                    c.polygons[i].circuit[j] = value % 50;
                }
                3 => (c.n_scale, c.d, c.s, c.k) = counts,
                4 => {
                    c.polygons.truncate(slot % (c.polygons.len() + 1));
                }
                _ => {
                    c.pairing.truncate(slot % (c.pairing.len() + 1));
                    c.weights.push(weight);
                }
            }
            let rep = verify_certificate(&c, &r.word, &r.graph);
            prop_assert_eq!(rep.passed, rep.violations.is_empty());
        }
    }
}
