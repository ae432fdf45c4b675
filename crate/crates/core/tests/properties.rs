use acstk::acs::{catalog_acs, deformed_holomorphic_vectors};
use acstk::linalg::{self, RMat};
use acstk::patch::{nijenhuis_fields, PatchDoc};
use acstk::{
    catalog, ce_d, complex_rank, deform, diff_expr, h1_ddc, nijenhuis_patch, parse_expr,
    perturb_to_rank, random_acs, recover_l, AntiCommEndo, Expr, InvariantForm, PatchAcs, RankTol,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small_l(j0: &acstk::Acs, norm: f64, r: &mut ChaCha8Rng) -> AntiCommEndo {
    let n = j0.dim();
    let raw = RMat::from_fn(n, n, |_, _| r.gen_range(-1.0..=1.0));
    let l = AntiCommEndo::project(&raw, j0).unwrap().into_matrix();
    let s = linalg::spectral_norm(&l);
    AntiCommEndo::new(l * (norm / s), j0).unwrap()
}

fn patch4() -> PatchAcs {
    let s = "(0.2*x3 + 0.1*x1*x4)";
    let entries = vec![
        vec!["0".into(), format!("-(1 + {s})/(1 - {s})"), "0".into(), "0".into()],
        vec![format!("(1 - {s})/(1 + {s})"), "0".into(), "0".into(), "0".into()],
        vec!["0".into(), "0".into(), "0".into(), "-1".into()],
        vec!["0".into(), "0".into(), "1".into(), "0".into()],
    ];
    PatchAcs::from_doc(&PatchDoc { dim: 4, entries, bounds: vec![[-1.0, 1.0]; 4] }).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_lands_in_anticommuting_subspace(seed in 0u64..100_000, dim in prop::sample::select(vec![2usize, 4, 6, 8])) {
        let j0 = random_acs(dim, seed, seed % 2 == 0).unwrap();
        let mut r = rng(seed);
        let raw = RMat::from_fn(dim, dim, |_, _| r.gen_range(-1.0..=1.0));
        let p = AntiCommEndo::project(&raw, &j0).unwrap();
        let j = j0.matrix();
        let scale = linalg::max_abs(j).powi(2) * linalg::max_abs(&raw);
        prop_assert!(linalg::max_abs(&(p.matrix() * j + j * p.matrix())) <= 1e-12 * scale);
        // Idempotent.
        let again = AntiCommEndo::project(p.matrix(), &j0).unwrap();
        prop_assert!(linalg::max_abs(&(again.matrix() - p.matrix())) <= 1e-12 * scale);
    }

    #[test]
    fn deformed_structures_square_to_minus_one(seed in 0u64..100_000) {
        let j0 = random_acs(6, seed, false).unwrap();
        prop_assume!(linalg::spectral_norm(j0.matrix()) < 100.0);
        let l = small_l(&j0, 0.25, &mut rng(seed));
        let j1 = deform(&j0, &l).unwrap();
        let d = linalg::max_abs(&(j1.matrix() * j1.matrix() + RMat::identity(6, 6)));
        prop_assert!(d <= 1e-10);
        let back = recover_l(&j0, &j1).unwrap();
        prop_assert!(linalg::max_abs(&(back.matrix() - l.matrix())) <= 1e-9 * linalg::max_abs(l.matrix()));
    }

    #[test]
    fn graph_vectors_are_holomorphic(seed in 0u64..100_000) {
        let j0 = random_acs(6, seed, seed % 2 == 1).unwrap();
        prop_assume!(linalg::spectral_norm(j0.matrix()) < 100.0);
        let l = small_l(&j0, 0.2, &mut rng(seed ^ 0xabc));
        let j1 = deform(&j0, &l).unwrap();
        let w = deformed_holomorphic_vectors(&l).unwrap();
        let jc = linalg::complexify(j1.matrix());
        let resid = &jc * &w - &w * Complex64::new(0.0, 1.0);
        prop_assert!(linalg::max_abs_c(&resid) <= 1e-9 * linalg::max_abs_c(&w).max(1.0) * linalg::max_abs(j1.matrix()));
    }

    #[test]
    fn heisenberg_rank_at_most_one(seed in 0u64..100_000) {
        let g = catalog("heis3xR3").unwrap();
        let j = random_acs(6, seed, seed % 2 == 1).unwrap();
        prop_assert!(complex_rank(&g, &j, RankTol::default()).unwrap() <= 1);
    }

    #[test]
    fn h1_is_even_and_bounded_by_b1(seed in 0u64..100_000, name in prop::sample::select(vec!["abelian6", "heis3xR3", "free2step3gen"])) {
        let g = catalog(name).unwrap();
        let r = h1_ddc(&g, &random_acs(6, seed, false).unwrap()).unwrap();
        prop_assert_eq!(r.method_a, r.method_b);
        prop_assert_eq!(r.h1_ddc % 2, 0);
        prop_assert!(r.h1_ddc <= r.b1);
    }

    #[test]
    fn nijenhuis_is_j_anti_invariant_on_patch(x in prop::array::uniform4(-0.9f64..0.9)) {
        let p = patch4();
        let n = nijenhuis_patch(&p, &x).unwrap();
        let j = p.j_at(&x).unwrap();
        for i in 0..4 {
            for k in 0..4 {
                let ji: Vec<f64> = (0..4).map(|r| j[(r, i)]).collect();
                let jk: Vec<f64> = (0..4).map(|r| j[(r, k)]).collect();
                let lhs = n.eval(&ji, &jk);
                for (c, v) in lhs.iter().enumerate() {
                    prop_assert!((v + n.component(i, k, c)).abs() <= 1e-8);
                }
            }
        }
    }

    #[test]
    fn nijenhuis_is_tensorial(x in prop::array::uniform4(-0.9f64..0.9), i in 0usize..4, j in 0usize..4) {
        let p = patch4();
        let f = parse_expr("1 + x1*x2 + sin(x3)*exp(x4)").unwrap();
        let unit = |k: usize, scale: &Expr| -> Vec<Expr> {
            (0..4).map(|r| if r == k { scale.clone() } else { Expr::num(0.0) }).collect()
        };
        let scaled = nijenhuis_fields(&p, &unit(i, &f), &unit(j, &Expr::num(1.0)), &x).unwrap();
        let plain = nijenhuis_patch(&p, &x).unwrap();
        let fx = f.eval(&x).unwrap();
        for (c, v) in scaled.iter().enumerate() {
            prop_assert!((v - fx * plain.component(i, j, c)).abs() <= 1e-8);
        }
    }
}

fn random_expr(r: &mut ChaCha8Rng, depth: u32) -> Expr {
    if depth == 0 || r.gen_bool(0.3) {
        return if r.gen_bool(0.6) { Expr::Var(r.gen_range(0..3)) } else { Expr::Num(r.gen_range(-2.0..2.0)) };
    }
    let sub = |r: &mut ChaCha8Rng| Box::new(random_expr(r, depth - 1));
    match r.gen_range(0..8) {
        0 => Expr::Neg(sub(r)),
        1 => Expr::Add(sub(r), sub(r)),
        2 => Expr::Sub(sub(r), sub(r)),
        3 => Expr::Mul(sub(r), sub(r)),
        4 => Expr::Pow(sub(r), 2),
        5 => Expr::Sin(sub(r)),
        6 => Expr::Cos(sub(r)),
        _ => Expr::Exp(Box::new(Expr::Mul(Box::new(Expr::Num(0.3)), sub(r)))),
    }
}

#[test]
fn derivatives_match_central_differences() {
    let mut r = rng(31);
    let h = 1e-5;
    let mut checked = 0;
    while checked < 100 {
        let e = random_expr(&mut r, 4);
        let x: Vec<f64> = (0..3).map(|_| r.gen_range(-1.0..1.0)).collect();
        let i = r.gen_range(0..3);
        let d = diff_expr(&e, i).eval(&x).unwrap();
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[i] += h;
        xm[i] -= h;
        let fd = (e.eval(&xp).unwrap() - e.eval(&xm).unwrap()) / (2.0 * h);
        let scale = d.abs().max(1.0) * e.eval(&x).unwrap().abs().max(1.0);
        assert!((d - fd).abs() <= 1e-6 * scale, "{e}: d/dx{} = {d}, fd {fd}", i + 1);
        checked += 1;
    }
}

#[test]
fn printing_preserves_semantics() {
    let mut r = rng(77);
    for _ in 0..200 {
        let e = random_expr(&mut r, 5);
        let back = parse_expr(&e.to_string()).unwrap();
        for _ in 0..5 {
            let x: Vec<f64> = (0..3).map(|_| r.gen_range(-1.0..1.0)).collect();
            let (a, b) = (e.eval(&x).unwrap(), back.eval(&x).unwrap());
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{e}");
        }
    }
}

#[test]
fn constant_patch_matches_abelian_backend() {
    let g = catalog("abelian4").unwrap();
    for seed in 0..10 {
        let j = random_acs(4, seed, false).unwrap();
        let p = PatchAcs::constant(j.matrix(), vec![(0.0, 1.0); 4]).unwrap();
        let grid = acstk::min_rank_on_grid(&p, 2, RankTol::default()).unwrap();
        assert_eq!(grid.k_min, complex_rank(&g, &j, RankTol::default()).unwrap());
    }
}

#[test]
fn differential_sign_convention() {
    let g = catalog("heis3xR3").unwrap();
    // dα(X, Y) = −α([X, Y]) with [e1, e2] = e3, so d e^3 = −e^1 ∧ e^2.
    let d = ce_d(&g, &InvariantForm::dual_basis(6, 2)).unwrap();
    assert_eq!(d.pair_coeff(6, 0, 1), Complex64::new(-1.0, 0.0));
    assert_eq!(d.coeffs().iter().filter(|z| z.norm() != 0.0).count(), 1);
}

#[test]
fn perturbation_is_independent_of_thread_count() {
    let g = catalog("free2step3gen").unwrap();
    let j0 = catalog_acs("ja").unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
            perturb_to_rank(&g, &j0, 3, 1e-2, 50, 11, RankTol::default()).unwrap()
        })
    };
    let (a, b) = (run(1), run(4));
    assert_eq!((a.trial, a.step, a.distance), (b.trial, b.step, b.distance));
    assert_eq!(a.acs, b.acs);
}
