use iterext::algebra::{Poly, RationalMap};
use iterext::apf::build_apf_tower;
use iterext::ring::{rint, Rat};

#[test]
fn octic_depth_three_under_a_minute() {
    let xm2: Poly<Rat> = Poly::from_coeffs(vec![rint(-2), rint(1)]);
    let num = xm2
        .pow(8)
        .add(&xm2.pow(2).scale(&rint(-2)))
        .add(&Poly::constant(rint(3)));
    let phi = RationalMap::new(num, Poly::one()).unwrap();
    let start = std::time::Instant::now();
    let (tower, cert) = build_apf_tower(&phi, 2, 3, 8, 60, 50_000_000).unwrap();
    let elapsed = start.elapsed();
    eprintln!("depth-3 octic build: {:?}", elapsed);
    eprintln!(
        "verdict: {} m={} r={} c={} gamma={} delta={} eps={:?}",
        cert.verdict, cert.m, cert.r, cert.c, cert.gamma, cert.delta, cert.epsilon
    );
    for l in &cert.levels {
        eprintln!(
            "level n={} qn={} single={} norm={} res={} replayed={:?}",
            l.n, l.qn, l.polygon_single_segment, l.norm_ok, l.norm_resultant_ok, l.replayed
        );
    }
    assert_eq!(cert.verdict, "pass");
    assert_eq!(tower.ram_index(), 64 * 64 * 64);
    assert!(elapsed.as_secs() < 60);
}
