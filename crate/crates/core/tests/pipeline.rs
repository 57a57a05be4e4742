use fpreg_core::fourier::{dft, DenseFunction};
use fpreg_core::randmodel::sample_exact;
use fpreg_core::regularity::{classify_vectors, regularize, RegularizeParams};
use fpreg_core::threeap::{flower_find, validate_flower};
use fpreg_core::{DenseSubset, Flower, Point, RegularityReport, SpaceDescriptor, Spectrum, SubspaceBasis};

fn space(p: u32, n: u32) -> SpaceDescriptor {
    SpaceDescriptor::new(p, n).unwrap()
}

#[test]
fn set_and_subspace_wire_format() {
    let s = space(3, 2);
    let a: DenseSubset = serde_json::from_str(r#"{"p": 3, "n": 2, "members": [2, 0, 1]}"#).unwrap();
    assert_eq!(a.to_vec(), [0, 1, 2].map(Point).to_vec());
    assert_eq!(serde_json::to_string(&a).unwrap(), r#"{"p":3,"n":2,"members":[0,1,2]}"#);
    assert!(serde_json::from_str::<DenseSubset>(r#"{"p": 3, "n": 2, "members": [9]}"#).is_err());
    assert!(serde_json::from_str::<DenseSubset>(r#"{"p": 3, "n": 2, "members": [], "x": 1}"#).is_err());

    let h = SubspaceBasis::span(s, &[Point(4)]);
    let text = serde_json::to_string(&h).unwrap();
    assert_eq!(serde_json::from_str::<SubspaceBasis>(&text).unwrap(), h);
}

#[test]
fn reports_round_trip() {
    let s = space(3, 4);
    let a = sample_exact(s, 20, 4).unwrap();
    let report = regularize(&a, &RegularizeParams::new(0.3, 0.5)).unwrap();
    let back: RegularityReport = serde_json::from_str(&serde_json::to_string(&report).unwrap()).unwrap();
    assert_eq!(back, report);

    let h = SubspaceBasis::span(s, &[Point(1), Point(9)]);
    let f = DenseFunction::from_fn(&h, |x| x.0 as f64).unwrap();
    let spectrum = dft(&f, &h).unwrap();
    let back: Spectrum = serde_json::from_str(&serde_json::to_string(&spectrum).unwrap()).unwrap();
    assert_eq!(back, spectrum);
}

#[test]
fn flower_validates_after_serialization() {
    let s = space(3, 5);
    let a = sample_exact(s, 122, 8).unwrap();
    let search = flower_find(&a, 3, 0.3, 0.5, 1).unwrap();
    let flower = search.flower.expect("flower on a dense random set");
    let text = serde_json::to_string(&flower).unwrap();
    let back: Flower = serde_json::from_str(&text).unwrap();
    assert_eq!(back, flower);
    let v = validate_flower(&back, &a).unwrap();
    assert!(v.passed(), "{:?}", v.failures);
}

#[test]
fn regularize_is_deterministic_and_reverifies() {
    let s = space(3, 6);
    let a = sample_exact(s, 200, 21).unwrap();
    let prm = RegularizeParams::new(0.2, 0.5);
    let r1 = regularize(&a, &prm).unwrap();
    let r2 = regularize(&a, &prm).unwrap();
    assert_eq!(serde_json::to_string(&r1).unwrap(), serde_json::to_string(&r2).unwrap());
    assert!(r1.succeeded);
    let c = classify_vectors(&a, &r1.final_subspace, 0.2).unwrap();
    assert!(c.irregular_mass as f64 <= 0.2 * s.size() as f64);
    assert!(r1.energy_trace.windows(2).all(|w| w[1] >= w[0] + 0.2f64.powi(3) - 1e-9));
}

#[test]
fn classification_is_independent_of_thread_count() {
    let s = space(3, 7);
    let a = sample_exact(s, 300, 5).unwrap();
    let h = SubspaceBasis::span(s, &[Point(1), Point(3), Point(9), Point(27)]);
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let c1 = one.install(|| classify_vectors(&a, &h, 0.2).unwrap());
    let c4 = four.install(|| classify_vectors(&a, &h, 0.2).unwrap());
    assert_eq!(c1, c4);
}
