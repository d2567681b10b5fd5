use ecd_validation::{comps, Oracle};
use ecd_core::{ComponentSet, EcdParams, SystemSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const REL: f64 = 1e-11;

fn rel_close(got: f64, want: f64, tol: f64) -> bool {
    if want == 0.0 {
        return got == 0.0;
    }
    if want.abs() < f64::MIN_POSITIVE {
        // subnormal reference: only the magnitude is meaningful
        return got.abs() < 1e-290;
    }
    ((got - want) / want).abs() <= tol
}

fn random_params(rng: &mut ChaCha8Rng) -> (f64, f64, f64) {
    (
        rng.gen_range(0.1..5.0),
        rng.gen_range(0.2..8.0),
        rng.gen_range(0.1..5.0),
    )
}

#[test]
fn components_match_multiprecision() {
    let mut o = Oracle::new();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..60 {
        let (a, b, l) = random_params(&mut rng);
        let p = EcdParams::new(a, b, l).unwrap();
        for u in [1e-8, 0.01, 0.3, 0.7, 0.99, 0.999_999] {
            let x = p.quantile(u).unwrap();
            let r = o.component(a, b, l, x);
            let (cdf, sf) = (o.value(&r.cdf), o.value(&r.sf));
            assert!(rel_close(p.cdf(x).unwrap().value(), cdf, REL), "cdf {a} {b} {l} {x}");
            assert!(rel_close(p.sf(x).unwrap().value(), sf, REL), "sf {a} {b} {l} {x}");
            let pdf = o.pdf(a, b, l, x);
            assert!(rel_close(p.pdf(x).unwrap(), pdf, 1e-10), "pdf {a} {b} {l} {x}");
        }
    }
}

#[test]
fn deep_upper_tail_survival() {
    let mut o = Oracle::new();
    // survival between 1e-110 and 1e-275
    let (a, b, l) = (0.6, 2.0, 2.0);
    let p = EcdParams::new(a, b, l).unwrap();
    for x in [2.2, 2.3, 2.4] {
        let c = o.component(a, b, l, x);
        let want = o.value(&c.sf);
        let got = p.log_sf(x).unwrap().value().exp();
        assert!(want > 1e-300 && rel_close(got, want, 1e-10), "{x}: {got} vs {want}");
    }
}

#[test]
fn systems_match_multiprecision() {
    let mut o = Oracle::new();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..30 {
        let n = rng.gen_range(2..6);
        let cs: Vec<(f64, f64, f64)> = (0..n).map(|_| random_params(&mut rng)).collect();
        let set = ComponentSet::new(
            cs.iter().map(|&(a, b, l)| EcdParams::new(a, b, l).unwrap()).collect(),
        )
        .unwrap();
        let series = SystemSpec::series(set.clone());
        let parallel = SystemSpec::parallel(set);
        for u in [0.05, 0.5, 0.95] {
            let x = EcdParams::new(cs[0].0, cs[0].1, cs[0].2).unwrap().quantile(u).unwrap();
            let s = o.series(&cs, x);
            let (want_sf, want_cdf) = (o.value(&s.sf), o.value(&s.cdf));
            assert!(rel_close(series.sf(x).unwrap().value(), want_sf, REL));
            assert!(rel_close(series.cdf(x).unwrap().value(), want_cdf, REL));
            let p = o.parallel(&cs, x);
            let (want_sf, want_cdf) = (o.value(&p.sf), o.value(&p.cdf));
            assert!(rel_close(parallel.sf(x).unwrap().value(), want_sf, REL));
            assert!(rel_close(parallel.cdf(x).unwrap().value(), want_cdf, REL));
        }
    }
}

#[test]
fn example_setting_ratios() {
    let mut o = Oracle::new();
    let lam = [0.8, 1.2, 1.3, 1.9];
    let mu = [0.5, 0.7, 1.5, 2.5];
    for alpha in [0.7, 1.5] {
        let x_sys = SystemSpec::parallel(ComponentSet::from_vectors(&[alpha], &[2.0], &lam).unwrap());
        let y_sys = SystemSpec::parallel(ComponentSet::from_vectors(&[alpha], &[2.0], &mu).unwrap());
        for x in [1.9524, 1.9528, 1.9536, 1.954] {
            let bx = o.parallel(&comps(&[alpha], &[2.0], &lam), x);
            let by = o.parallel(&comps(&[alpha], &[2.0], &mu), x);
            let want = o.ratio(&by.sf, &bx.sf);
            let got = (y_sys.evaluate(x).unwrap().log_sf - x_sys.evaluate(x).unwrap().log_sf).exp();
            assert!(rel_close(got, want, 1e-9), "{alpha} {x}: {got} vs {want}");
        }
    }

    let beta = [0.4, 0.9, 2.0, 7.5];
    let beta_star = [0.2, 1.0, 1.9, 7.7];
    let x_sys = SystemSpec::parallel(ComponentSet::from_vectors(&[0.6], &beta, &[2.0]).unwrap());
    let y_sys = SystemSpec::parallel(ComponentSet::from_vectors(&[0.6], &beta_star, &[2.0]).unwrap());
    for x in [0.085, 0.086, 0.087, 9.6, 9.8, 9.9] {
        let bx = o.parallel(&comps(&[0.6], &beta, &[2.0]), x);
        let by = o.parallel(&comps(&[0.6], &beta_star, &[2.0]), x);
        let (px, py) = (x_sys.evaluate(x).unwrap(), y_sys.evaluate(x).unwrap());
        let want_cdf = o.ratio(&by.cdf, &bx.cdf);
        let want_sf = o.ratio(&by.sf, &bx.sf);
        assert!(rel_close((py.log_cdf - px.log_cdf).exp(), want_cdf, 1e-9), "cdf ratio at {x}");
        assert!(rel_close((py.log_sf - px.log_sf).exp(), want_sf, 1e-9), "sf ratio at {x}");
    }
}
