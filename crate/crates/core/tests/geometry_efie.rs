use std::f64::consts::PI;

use hidbf::efie::{
    assemble_dense, compute_rescale, dense_matvec, synthetic_rhs, EntryOracle, KernelParams, MatrixEntries,
    RescaleStrategy, ETA0,
};
use hidbf::geometry::{generate_mesh, mesh_diameter, CurveSpec, Mesh, Shape};
use hidbf::hidbf::hidbf_construct;
use hidbf::idbf::ButterflyConfig;
use hidbf::linalg::rel_error;
use hidbf::solver::random_solution;
use hidbf::C64;
use proptest::prelude::*;

fn shape_strategy() -> impl Strategy<Value = Shape> {
    prop::sample::select(Shape::ALL.to_vec())
}

/// Plain double-precision series; adequate at `x = pi`.
fn hankel_series(x: f64) -> C64 {
    let q = x * x / 4.0;
    let (mut term, mut j, mut s, mut h) = (1.0, 1.0, 0.0, 0.0);
    for m in 1..80 {
        let mf = m as f64;
        term *= -q / (mf * mf);
        h += 1.0 / mf;
        j += term;
        s -= term * h;
    }
    let y = 2.0 / PI * (((x / 2.0).ln() + 0.577_215_664_901_532_9) * j + s);
    C64::new(j, -y)
}

#[test]
fn strips_reference_count() {
    let mesh = generate_mesh(&CurveSpec::new(Shape::ParallelStrips, 20.0), 20.0).unwrap();
    assert_eq!(mesh.len(), 400);
    assert_eq!(mesh.contour_breaks, vec![200]);
}

#[test]
fn corner_arm_ratio_places_the_vertex() {
    for (ratio, vertex) in [(0.5, 500), (0.3, 300)] {
        let spec = CurveSpec::new(Shape::CorrugatedCorner, 50.0).with_param("arm_ratio", ratio);
        let mesh = generate_mesh(&spec, 20.0).unwrap();
        assert_eq!(mesh.len(), 1000);
        // the first arm lies left of the vertex, the second to the right
        let left = mesh.centers.iter().take_while(|c| c[0] < 0.0).count();
        assert_eq!(left, vertex);
        assert!(mesh.centers[vertex..].iter().all(|c| c[0] > 0.0));
    }
    assert!(CurveSpec::new(Shape::CorrugatedCorner, 5.0).with_param("arm_ratio", 1.0).validate().is_err());
}

#[test]
fn spiral_diameter_matches_brute_force() {
    let mesh = generate_mesh(&CurveSpec::new(Shape::Spiral, 50.0), 20.0).unwrap();
    assert_eq!(mesh.len(), 1000);
    let mut best = 0.0f64;
    for p in &mesh.centers {
        for q in &mesh.centers {
            best = best.max(((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt());
        }
    }
    assert_eq!(mesh_diameter(&mesh), best);
}

#[test]
fn semicircle_diameter() {
    // Unit radius: arclength pi wavelengths. Centers sit half a segment in from
    // the ends, so the span is 2r cos(w / 2r).
    let mesh = generate_mesh(&CurveSpec::new(Shape::Semicircle, PI), 2000.0).unwrap();
    let w = mesh.lengths[0];
    assert!((mesh_diameter(&mesh) - 2.0 * (w / 2.0).cos()).abs() < 1e-9);
    assert!((mesh_diameter(&mesh) - 2.0).abs() < 1e-6);
}

#[test]
fn off_diagonal_entry_against_direct_formula() {
    let w = 1.0 / 20.0;
    let mesh = Mesh::new(vec![[0.0, 0.0], [0.5, 0.0]], vec![w, w], vec![], 1.0).unwrap();
    let oracle = EntryOracle::new(mesh, KernelParams::for_wavelength(1.0), 0.37).unwrap();
    let want = hankel_series(PI) * (0.37 * 2.0 * PI * ETA0 / (4.0 * 20.0));
    let got = oracle.impedance_entry(0, 1).unwrap();
    assert!((got - want).norm() < 1e-13 * want.norm(), "{got} vs {want}");
}

#[test]
fn rescale_normalizes_first_column_of_semicircle() {
    let mesh = generate_mesh(&CurveSpec::new(Shape::Semicircle, 5.0), 20.0).unwrap();
    assert_eq!(mesh.len(), 100);
    let oracle = EntryOracle::rescaled(mesh, RescaleStrategy::MaxFirstColumn).unwrap();
    let m = (0..100).map(|i| oracle.entry(i, 0).norm()).fold(0.0, f64::max);
    assert!((m - 1.0).abs() < 1e-14);
}

#[test]
fn spectral_rescale_bounds_dense_norm() {
    let mesh = generate_mesh(&CurveSpec::new(Shape::OpenArc, 6.0), 20.0).unwrap();
    let oracle = EntryOracle::rescaled(mesh, RescaleStrategy::SpectralNorm).unwrap();
    let a = assemble_dense(&oracle, 1000).unwrap();
    // Power iteration on A^H A from a fixed start: estimate of ||a A||_2 close to 1.
    let mut x: Vec<C64> = random_solution(a.cols(), 3);
    let mut sigma = 0.0;
    for _ in 0..200 {
        let n = hidbf::linalg::norm2(&x);
        x.iter_mut().for_each(|v| *v /= n);
        let y = a.matvec(&x);
        sigma = hidbf::linalg::norm2(&y);
        x = a.adjoint().matvec(&y);
    }
    assert!((sigma - 1.0).abs() < 1e-2, "sigma = {sigma}");
}

#[test]
fn plane_wave_matches_elementwise_exponential() {
    let mesh = generate_mesh(&CurveSpec::new(Shape::OpenArc, 3.2), 20.0).unwrap();
    assert_eq!(mesh.len(), 64);
    let oracle = EntryOracle::rescaled(mesh.clone(), RescaleStrategy::MaxFirstColumn).unwrap();
    let d = [0.6, 0.8];
    let b = oracle.plane_wave_rhs(d).unwrap();
    for (bi, c) in b.iter().zip(&mesh.centers) {
        let phase = -2.0 * PI * (d[0] * c[0] + d[1] * c[1]);
        let want = C64::new(phase.cos(), phase.sin()) * oracle.rescale();
        assert!((bi - want).norm() < 1e-15);
        assert!((bi.norm() - oracle.rescale()).abs() < 1e-15);
    }
}

#[test]
fn equilateral_points_couple_equally() {
    let h = 3f64.sqrt() / 2.0;
    let mesh = Mesh::new(vec![[0.0, 0.0], [1.0, 0.0], [0.5, h]], vec![0.05; 3], vec![], 1.0).unwrap();
    let oracle = EntryOracle::new(mesh, KernelParams::for_wavelength(1.0), 1.0).unwrap();
    let a = assemble_dense(&oracle, 8).unwrap();
    let a01 = a[(0, 1)];
    for (i, j) in [(0, 2), (1, 2), (1, 0), (2, 0), (2, 1)] {
        assert!((a[(i, j)] - a01).norm() < 1e-12 * a01.norm());
    }
}

#[test]
fn synthetic_rhs_paths_agree() {
    let mesh = generate_mesh(&CurveSpec::new(Shape::Semicircle, 12.8), 20.0).unwrap();
    assert_eq!(mesh.len(), 256);
    let oracle = EntryOracle::rescaled(mesh, RescaleStrategy::MaxFirstColumn).unwrap();
    let cfg = ButterflyConfig { leaf_size: 32, ..Default::default() };
    let h = hidbf_construct(&oracle, 0..256, &cfg).unwrap();
    let x = random_solution(256, 11);
    let dense = synthetic_rhs(&|v| dense_matvec(&oracle, v), 256, &x).unwrap();
    let fast = synthetic_rhs(&|v| h.matvec(v).unwrap(), 256, &x).unwrap();
    assert!(rel_error(&fast, &dense) <= 10.0 * cfg.id.epsilon);

    let mut e = vec![C64::new(0.0, 0.0); 256];
    e[17] = C64::new(1.0, 0.0);
    let col = synthetic_rhs(&|v| dense_matvec(&oracle, v), 256, &e).unwrap();
    for (i, c) in col.iter().enumerate() {
        assert_eq!(*c, oracle.entry(i, 17));
    }
    let zero = synthetic_rhs(&|v| dense_matvec(&oracle, v), 256, &[C64::new(0.0, 0.0); 256]).unwrap();
    assert!(zero.iter().all(|z| z.norm() == 0.0));
    assert!(synthetic_rhs(&|v| dense_matvec(&oracle, v), 256, &x[..10]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn total_arclength_is_electrical_size(shape in shape_strategy(), size in 2.0f64..60.0) {
        let mesh = generate_mesh(&CurveSpec::new(shape, size), 20.0).unwrap();
        let total: f64 = mesh.lengths.iter().sum();
        prop_assert!((total - size).abs() <= 1e-8 * size, "{shape}: {total} vs {size}");
    }

    #[test]
    fn segments_are_contiguous(shape in shape_strategy(), size in 2.0f64..60.0) {
        let mesh = generate_mesh(&CurveSpec::new(shape, size), 20.0).unwrap();
        let ids = mesh.contour_ids();
        for i in 0..mesh.len() {
            let [a, b] = mesh.endpoints[i];
            let chord = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
            prop_assert!(chord <= mesh.lengths[i] * (1.0 + 1e-9));
            prop_assert!(chord >= 0.5 * mesh.lengths[i]);
            if i + 1 < mesh.len() && ids[i] == ids[i + 1] {
                let c = mesh.endpoints[i + 1][0];
                prop_assert!(((b[0] - c[0]).powi(2) + (b[1] - c[1]).powi(2)).sqrt() <= 1e-10);
            }
        }
    }

    #[test]
    fn density_near_requested(shape in shape_strategy(), size in 10.0f64..60.0) {
        let mesh = generate_mesh(&CurveSpec::new(shape, size), 20.0).unwrap();
        for w in &mesh.lengths {
            prop_assert!((19.0..=21.0).contains(&(1.0 / w)));
        }
        prop_assert_eq!(mesh.len(), mesh.lengths.len());
    }

    #[test]
    fn parameter_insertion_order_is_irrelevant(
        amplitude in 0.0f64..0.5,
        period in 0.5f64..4.0,
        count in 1u32..6,
        angle in 0.2f64..3.0,
    ) {
        let a = CurveSpec::new(Shape::CorrugatedCorner, 20.0).with_param("amplitude", amplitude).with_param("period", period);
        let b = CurveSpec::new(Shape::CorrugatedCorner, 20.0).with_param("period", period).with_param("amplitude", amplitude);
        prop_assert_eq!(generate_mesh(&a, 20.0).unwrap(), generate_mesh(&b, 20.0).unwrap());
        let a = CurveSpec::new(Shape::ArcArray, 20.0).with_param("count", count as f64).with_param("angle", angle);
        let b = CurveSpec::new(Shape::ArcArray, 20.0).with_param("angle", angle).with_param("count", count as f64);
        prop_assert_eq!(generate_mesh(&a, 20.0).unwrap(), generate_mesh(&b, 20.0).unwrap());
    }

    #[test]
    fn equal_weights_give_exact_symmetry(shape in shape_strategy(), size in 2.0f64..8.0) {
        let mesh = generate_mesh(&CurveSpec::new(shape, size), 20.0).unwrap();
        prop_assume!(mesh.lengths.iter().all(|w| *w == mesh.lengths[0]));
        let oracle = EntryOracle::rescaled(mesh, RescaleStrategy::MaxFirstColumn).unwrap();
        let a = assemble_dense(&oracle, 1000).unwrap();
        prop_assert_eq!(a.sub(&a.transpose()).max_abs(), 0.0);
    }

    #[test]
    fn entries_are_pure(shape in shape_strategy(), i in 0usize..40, j in 0usize..40) {
        let mesh = generate_mesh(&CurveSpec::new(shape, 2.0), 20.0).unwrap();
        let oracle = EntryOracle::rescaled(mesh, RescaleStrategy::MaxFirstColumn).unwrap();
        let first = oracle.impedance_entry(i, j).unwrap();
        for _ in 0..3 {
            let again = oracle.impedance_entry(i, j).unwrap();
            prop_assert_eq!(first.re.to_bits(), again.re.to_bits());
            prop_assert_eq!(first.im.to_bits(), again.im.to_bits());
        }
    }

    #[test]
    fn rescaled_first_column_peaks_at_one(shape in shape_strategy(), size in 1.0f64..30.0) {
        let mesh = generate_mesh(&CurveSpec::new(shape, size), 20.0).unwrap();
        let params = KernelParams::for_wavelength(1.0);
        let a = compute_rescale(&mesh, &params, RescaleStrategy::MaxFirstColumn).unwrap();
        let oracle = EntryOracle::new(mesh, params, a).unwrap();
        let m = (0..oracle.len()).map(|i| oracle.entry(i, 0).norm()).fold(0.0, f64::max);
        prop_assert!((m - 1.0).abs() <= 1e-14);
    }
}
