use fenchel::closure::{approx_sequence, convergence_study, FnGenerator};
use fenchel::curves::{crossing_angle, crossing_cosine, geodesic_length, random_out_and_back, CurveWord};
use fenchel::fn_map::{fn_forward, fn_inverse, probe_pair, twist_decompose, twist_scale, FnVector};
use fenchel::generate::{chain_graph, seeded_surface, LengthRule, TwistRule};
use fenchel::hyp_core::{alternate_side, collar_width, pentagon_side, Isometry};
use fenchel::pants_surface::{CuffId, PantsId, PantsSurface, SurfaceSpec};
use fenchel::spectrum::{default_family, dls_estimate, CurveFamily};
use fenchel::twist_flow::length_derivative;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

fn chain(n: usize, min: f64, seed: u64) -> PantsSurface {
    let rule = LengthRule::LogUniform { min, max: 1.0 };
    seeded_surface(chain_graph(n).unwrap(), rule, TwistRule::Uniform, 1.0, seed).unwrap()
}

fn random_isometry(v: &[f64; 3]) -> Isometry {
    Isometry::translation(v[0]) * Isometry::rotation(v[1]) * Isometry::translation(v[2])
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conjugation_keeps_translation_length(
        m in prop::array::uniform3(-3.0f64..3.0),
        g in prop::array::uniform3(-2.0f64..2.0),
    ) {
        let m = Isometry::translation(m[0].abs() + 0.1) * random_isometry(&[m[1], 0.0, m[2]]);
        let g = random_isometry(&g);
        if let Ok(l) = m.translation_length() {
            let c = m.conjugate_by(&g).translation_length().unwrap();
            prop_assert!((l - c).abs() <= 1e-10 * l.max(1.0), "{l} vs {c}");
        }
    }

    #[test]
    fn hexagon_closes(a in prop::array::uniform3(0.05f64..4.0)) {
        let b1 = alternate_side(a[0], a[1], a[2]);
        let b2 = alternate_side(a[1], a[2], a[0]);
        let b3 = alternate_side(a[2], a[0], a[1]);
        let turn = Isometry::rotation(FRAC_PI_2);
        let m = [a[0], b3, a[1], b1, a[2], b2]
            .iter()
            .fold(Isometry::translation(0.0), |acc, &s| acc * Isometry::translation(s) * turn);
        let s = m.a.signum();
        for e in [m.a - s, m.b, m.c, m.d - s] {
            prop_assert!(e.abs() <= 1e-9, "{m:?}");
        }
    }

    #[test]
    fn pentagon_side_matches_bisection(x in 0.3f64..4.0, y in 0.3f64..4.0) {
        let target = x.sinh() * y.sinh();
        prop_assume!(target > 1.0 + 1e-6);
        let (mut lo, mut hi) = (0.0f64, 20.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid.cosh() < target { lo = mid } else { hi = mid }
        }
        let z = pentagon_side(x, y).unwrap();
        prop_assert!((z - 0.5 * (lo + hi)).abs() <= 1e-10, "{z} vs {lo}");
    }

    #[test]
    fn word_length_ignores_rotation_and_reversal(seed in any::<u64>()) {
        let s = chain(5, 1e-3, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_out_and_back(s.graph(), &mut rng, 4, 2).unwrap();
        let l = geodesic_length(&s, &w).unwrap();
        let n = w.steps().len();
        let r = geodesic_length(&s, &w.rotated(rng.gen_range(0..n))).unwrap();
        let v = geodesic_length(&s, &w.reversed()).unwrap();
        prop_assert!(close(l, r, 1e-9), "{l} vs {r}");
        prop_assert!(close(l, v, 1e-9), "{l} vs {v}");
    }

    #[test]
    fn crossings_are_transverse(seed in any::<u64>()) {
        let s = chain(5, 1e-3, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 7);
        let w = random_out_and_back(s.graph(), &mut rng, 4, 2).unwrap();
        for c in 0..s.graph().num_cuffs() {
            let cuff = CuffId(c);
            let n = w.crossings(cuff);
            let mut sum = 0.0;
            for occ in 0..n {
                let phi = crossing_angle(&s, &w, cuff, occ).unwrap();
                prop_assert!(phi > 0.0 && phi < std::f64::consts::PI);
                sum += crossing_cosine(&s, &w, cuff, occ).unwrap();
            }
            if n > 0 {
                let d = length_derivative(&s, &w, cuff).unwrap();
                prop_assert!((d - sum).abs() < 1e-12);
                prop_assert!(d.abs() < n as f64);
            }
        }
    }

    #[test]
    fn perpendiculars_clear_the_collars(seed in any::<u64>()) {
        let s = chain(3, 1e-6, seed);
        let g = s.graph();
        for p in 0..g.num_pants() {
            let pants = PantsId(p);
            for a in 0..3 {
                for b in a + 1..3 {
                    let la = s.length(g.cuff_at(fenchel::pants_surface::SlotRef::new(p, a)));
                    let lb = s.length(g.cuff_at(fenchel::pants_surface::SlotRef::new(p, b)));
                    let d = s.perp_length(pants, a, b).unwrap();
                    prop_assert!(d >= (collar_width(la) + collar_width(lb)) * (1.0 - 1e-12));
                }
            }
        }
    }

    #[test]
    fn fn_map_round_trip(
        seed in any::<u64>(),
        lam in prop::collection::vec(-3.0f64..0.0, 9),
        tau in prop::collection::vec(-5.0f64..5.0, 9),
    ) {
        let x0 = chain(4, 1e-6, seed);
        let g = x0.graph();
        let v = FnVector {
            lambda: lam,
            tau: (0..9).map(|c| g.is_interior(CuffId(c)).then(|| tau[c])).collect(),
        };
        let x = fn_inverse(&x0, &v).unwrap();
        let back = fn_forward(&x0, &x).unwrap();
        prop_assert!(back.distance(&v) <= 1e-12, "{}", back.distance(&v));
        let again = fn_inverse(&x0, &back).unwrap();
        for c in 0..9 {
            prop_assert!(close(again.lengths()[c], x.lengths()[c], 1e-12));
            prop_assert!(close(again.twists()[c], x.twists()[c], 1e-12));
        }
    }

    #[test]
    fn twist_decomposition(t in -1e3f64..1e3, l in 1e-6f64..5.0) {
        let d = twist_decompose(t, l).unwrap();
        prop_assert!(d.t_tilde >= 0.0 && d.t_tilde < l);
        prop_assert!((d.k as f64 * l + d.t_tilde - t).abs() <= 1e-12 * t.abs().max(l) * 4.0);
    }

    #[test]
    fn twist_counts_stay_in_the_collar_scale(
        seed in any::<u64>(),
        lam in prop::collection::vec(-1.0f64..0.0, 9),
        tau in prop::collection::vec(-1.0f64..1.0, 9),
    ) {
        // with |λ|, |τ| ≤ 1 and zero base twists, |t| ≤ s(l₀) and l ≥ l₀/e,
        // so |k| ≤ e·s(l₀)/l₀ + 1
        let x0 = chain(4, 1e-6, seed).with_twists(vec![0.0; 9]).unwrap();
        let g = x0.graph();
        let v = FnVector {
            lambda: lam,
            tau: (0..9).map(|c| g.is_interior(CuffId(c)).then(|| tau[c])).collect(),
        };
        let x = fn_inverse(&x0, &v).unwrap();
        for c in g.interior_cuffs() {
            let l0 = x0.length(c);
            let k = twist_decompose(x.twist(c), x.length(c)).unwrap().k;
            let bound = std::f64::consts::E * twist_scale(l0) / l0 + 1.0;
            prop_assert!((k.abs() as f64) <= bound, "k = {k}, bound {bound}");
        }
    }

    #[test]
    fn truncation_is_monotone(seed in any::<u64>(), i in prop::collection::vec(0.0f64..10.0, 2)) {
        let x0 = chain(4, 1e-3, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let twists: Vec<f64> = (0..9)
            .map(|c| if x0.graph().is_interior(CuffId(c)) { rng.gen_range(-8.0..8.0) } else { 0.0 })
            .collect();
        let x = x0.with_twists(twists).unwrap();
        let (lo, hi) = if i[0] <= i[1] { (i[0], i[1]) } else { (i[1], i[0]) };
        let a = approx_sequence(&x0, &x, lo).unwrap();
        let b = approx_sequence(&x0, &x, hi).unwrap();
        for c in 0..9 {
            let full = x.twists()[c] - x0.twists()[c];
            let da = a.twists()[c] - x0.twists()[c];
            let db = b.twists()[c] - x0.twists()[c];
            prop_assert!(da.abs() <= db.abs() + 1e-12);
            prop_assert!((da.abs() - full.abs().min(lo)).abs() <= 1e-12);
            prop_assert!(da == 0.0 || da.signum() == full.signum());
        }
    }

    #[test]
    fn estimator_is_a_pseudometric(seed in any::<u64>()) {
        let x = chain(3, 1e-3, seed);
        let y = chain(3, 1e-3, seed.wrapping_add(1));
        let z = chain(3, 1e-3, seed.wrapping_add(2));
        let fam = default_family(&x, &[1, 2]);
        let d = |a: &PantsSurface, b: &PantsSurface| dls_estimate(a, b, &fam).unwrap().dls;
        prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z) + 1e-12);
        prop_assert!((d(&x, &y) - d(&y, &x)).abs() <= 1e-12);
        prop_assert_eq!(d(&x, &x), 0.0);
        // a sub-family never sees more
        let sub = CurveFamily::new(fam.members()[..fam.len() / 2].to_vec(), "half").unwrap();
        prop_assert!(dls_estimate(&x, &y, &sub).unwrap().dls <= d(&x, &y));
        // length coordinates are bounded by twice the estimate
        let v = fn_forward(&x, &y).unwrap();
        for lam in &v.lambda {
            prop_assert!(lam.abs() <= 2.0 * d(&x, &y) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn twist_changes_are_never_carried_by_cuffs(seed in any::<u64>(), dt in 0.01f64..3.0) {
        let x = chain(4, 1e-3, seed);
        let c = CuffId(4);
        let y = x.with_twist(c, x.twist(c) + dt).unwrap();
        let r = dls_estimate(&x, &y, &default_family(&x, &[1])).unwrap();
        prop_assert!(r.dls > 0.0);
        let argmax = r.argmax.unwrap();
        prop_assert!(!argmax.starts_with("cuff:"), "{argmax}");
    }

    #[test]
    fn probe_ignores_cuff_labels(seed in any::<u64>()) {
        let x0 = chain(3, 1e-3, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = x0.graph().num_cuffs();
        let draw = |rng: &mut ChaCha8Rng| FnVector {
            lambda: (0..n).map(|_| rng.gen_range(-0.25..0.25)).collect(),
            tau: (0..n)
                .map(|c| x0.graph().is_interior(CuffId(c)).then(|| rng.gen_range(-0.25..0.25)))
                .collect(),
        };
        let (a, b) = (draw(&mut rng), draw(&mut rng));
        let (dls, dist, _) = probe_pair(&x0, &a, &b, &default_family(&x0, &[1])).unwrap();

        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let g = Arc::new(x0.graph().permute_cuffs(&perm).unwrap());
        let pick = |v: &[f64]| perm.iter().map(|&i| v[i]).collect::<Vec<_>>();
        let y0 = PantsSurface::build_base_with_twists(g, pick(x0.lengths()), pick(x0.twists()), 1.0).unwrap();
        let relabel = |v: &FnVector| FnVector {
            lambda: pick(&v.lambda),
            tau: perm.iter().map(|&i| v.tau[i]).collect(),
        };
        let (dls2, dist2, _) = probe_pair(&y0, &relabel(&a), &relabel(&b), &default_family(&y0, &[1])).unwrap();
        prop_assert!(close(dls, dls2, 1e-9), "{dls} vs {dls2}");
        prop_assert_eq!(dist, dist2);
    }

    #[test]
    fn spec_round_trip(seed in any::<u64>(), n in 1usize..6) {
        let s = chain(n, 1e-8, seed);
        let text = s.to_spec().to_json().unwrap();
        let back = SurfaceSpec::from_json(&text).unwrap().build().unwrap();
        prop_assert_eq!(back, s);
    }
}

#[test]
fn lengths_dominate_the_collar_weighted_intersection() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut c = f64::INFINITY;
    for _ in 0..300 {
        let s = seeded_surface(
            chain_graph(5).unwrap(),
            LengthRule::LogUniform { min: 1e-6, max: 1.0 },
            TwistRule::Uniform,
            1.0,
            rng.gen(),
        )
        .unwrap();
        let w = random_out_and_back(s.graph(), &mut rng, 4, 3).unwrap();
        let weight: f64 = w
            .intersection(s.graph().num_cuffs())
            .iter()
            .enumerate()
            .map(|(n, &i)| i as f64 * twist_scale(s.length(CuffId(n))))
            .sum();
        c = c.min(geodesic_length(&s, &w).unwrap() / weight);
    }
    println!("empirical constant {c:.4}");
    assert!(c > 0.0 && c.is_finite());
}

#[test]
fn bounded_generators_converge_monotonically() {
    for gen in [FnGenerator::Const(0.5), FnGenerator::Sqrt] {
        let (x0, x) = gen.realize(20).unwrap();
        let fam = default_family(&x0, &[1]);
        let grid: Vec<f64> = (0..=12).map(|i| i as f64 * 0.5).collect();
        let rows = convergence_study(&x0, &x, &grid, &fam).unwrap();
        for pair in rows.windows(2) {
            assert!(pair[1].dls <= pair[0].dls + 1e-12, "{gen:?}: {pair:?}");
        }
    }
}

#[test]
fn cosines_grow_along_a_positive_twist() {
    let s = chain(4, 1e-2, 5);
    let c = CuffId(4);
    let w = fenchel::curves::beta_curve(s.graph(), c).unwrap();
    for occ in 0..w.crossings(c) {
        let mut last = -1.0;
        for i in 0..40 {
            let y = s.with_twist(c, s.twist(c) + i as f64 * 0.1).unwrap();
            let cos = crossing_cosine(&y, &w, c, occ).unwrap();
            assert!(cos >= last - 1e-12, "occurrence {occ} step {i}: {cos} < {last}");
            last = cos;
        }
    }
    assert!(matches!(
        length_derivative(&s, &CurveWord::Peripheral(c), c),
        Err(fenchel::Error::NoCrossing { .. })
    ));
}
