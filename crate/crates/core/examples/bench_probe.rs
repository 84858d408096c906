use std::time::Instant;
use specsplit_core::ensemble::sample_ginibre;
use specsplit_core::kernel::{schur, svd};
use specsplit_core::tri::{split, OrderingCurve};
use specsplit_core::Tolerances;

fn main() {
    let tol = Tolerances::default();
    for n in [16usize, 32, 64, 128] {
        let t = sample_ginibre(n, 1);
        let start = Instant::now();
        let _ = schur(&t).unwrap();
        let schur_ms = start.elapsed().as_secs_f64() * 1e3;
        let start = Instant::now();
        let _ = svd(&t).unwrap();
        let svd_ms = start.elapsed().as_secs_f64() * 1e3;
        let start = Instant::now();
        let _ = split(&t, &OrderingCurve::Spiral, &tol).unwrap();
        let split_ms = start.elapsed().as_secs_f64() * 1e3;
        println!("n={n:4} schur {schur_ms:8.2} ms  svd {svd_ms:8.2} ms  split {split_ms:8.2} ms");
    }
}
