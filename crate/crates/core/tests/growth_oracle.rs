//! Growth function checked against an independent LP solver.

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stencilcert::geometry::{MultiIndex, Point, PointSet};
use stencilcert::growth::{growth_dual, growth_primal, GrowthValue};
use stencilcert::kernels::DiffOperator;
use stencilcert::polyspace::PolyBasis;

fn random_set(rng: &mut ChaCha8Rng, d: usize, n: usize, spread: f64) -> PointSet {
    let z = Point::new((0..d).map(|_| rng.gen_range(-0.3..0.3)).collect()).unwrap();
    let nodes = (0..n)
        .map(|_| Point::new((0..d).map(|_| spread * rng.gen_range(-1.0..1.0)).collect()).unwrap())
        .collect();
    PointSet::new(z, nodes).unwrap()
}

fn random_operator(rng: &mut ChaCha8Rng, d: usize) -> DiffOperator {
    match rng.gen_range(0..4) {
        0 => DiffOperator::identity(d),
        1 => DiffOperator::partial(d, rng.gen_range(0..d)),
        2 => DiffOperator::laplacian(d),
        _ => DiffOperator::new(
            d,
            vec![
                (MultiIndex::zero(d), rng.gen_range(-1.0..1.0)),
                (MultiIndex::axis(d, d - 1, 1), rng.gen_range(-1.0..1.0)),
            ],
        )
        .unwrap(),
    }
}

enum Oracle {
    Finite(f64),
    Unbounded,
    /// minilp can return a NaN objective instead of flagging unboundedness.
    NoVerdict,
}

/// `sup Dp(z)` over `|p(x_j)| ≤ ‖x_j − z‖^μ`, solved directly by minilp.
fn oracle_primal(ps: &PointSet, q: u32, op: &DiffOperator, mu: f64) -> Oracle {
    let basis = PolyBasis::new(q, ps.center().clone());
    let v = basis.vandermonde(ps.nodes()).unwrap();
    let b = basis.operator_moments(op).unwrap();
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let coeffs: Vec<_> = (0..basis.len())
        .map(|i| lp.add_var(b[i], (f64::NEG_INFINITY, f64::INFINITY)))
        .collect();
    for (j, x) in ps.nodes().iter().enumerate() {
        let bound = x.dist(ps.center()).powf(mu);
        let row: Vec<_> = coeffs.iter().enumerate().map(|(i, c)| (*c, v[(j, i)])).collect();
        lp.add_constraint(row.as_slice(), ComparisonOp::Le, bound);
        lp.add_constraint(row.as_slice(), ComparisonOp::Ge, -bound);
    }
    match lp.solve() {
        Ok(sol) if sol.objective().is_finite() => Oracle::Finite(sol.objective()),
        Ok(_) => Oracle::NoVerdict,
        Err(minilp::Error::Unbounded) => Oracle::Unbounded,
        Err(e) => panic!("oracle failed: {e}"),
    }
}

#[test]
fn dual_matches_oracle_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut checked = 0;
    while checked < 100 {
        let d = rng.gen_range(1..=2);
        let n = rng.gen_range(3..=12);
        let ps = random_set(&mut rng, d, n, 1.0);
        let q = rng.gen_range(1..=3);
        let mu = rng.gen_range(0.5..3.5);
        let op = random_operator(&mut rng, d);
        let ours = growth_dual(&ps, q, &op, mu).unwrap();
        let primal = growth_primal(&ps, q, &op, mu).unwrap();
        match oracle_primal(&ps, q, &op, mu) {
            Oracle::Finite(want) => {
                let got = ours.value.finite().expect("finite growth value");
                assert!((got - want).abs() <= 1e-7 * (1.0 + want), "dual {got} vs oracle {want}");
                let p = primal.value.finite().unwrap();
                assert!((p - want).abs() <= 1e-7 * (1.0 + want), "primal {p} vs oracle {want}");
                checked += 1;
            }
            Oracle::Unbounded => {
                assert!(ours.value.is_infinite());
                assert!(primal.value.is_infinite());
            }
            Oracle::NoVerdict => assert_eq!(ours.value.is_infinite(), primal.value.is_infinite()),
        }
    }
}

#[test]
fn dual_weights_and_polynomial_are_certificates() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for _ in 0..30 {
        let ps = random_set(&mut rng, 2, 10, 1.0);
        let op = random_operator(&mut rng, 2);
        let (q, mu) = (2, 1.5);
        let dual = growth_dual(&ps, q, &op, mu).unwrap();
        let primal = growth_primal(&ps, q, &op, mu).unwrap();
        let w = dual.dual_weights.unwrap();
        let basis = PolyBasis::new(q, ps.center().clone());
        let v = basis.vandermonde(ps.nodes()).unwrap();
        let b = basis.operator_moments(&op).unwrap();
        let moments = v.transpose() * nalgebra::DVector::from_column_slice(&w);
        assert!((moments - &b).amax() <= 1e-9 * (1.0 + b.amax()));
        let cost: f64 = w
            .iter()
            .zip(ps.nodes())
            .map(|(w, x)| w.abs() * x.dist(ps.center()).powf(mu))
            .sum();
        assert!((cost - dual.value.as_f64()).abs() <= 1e-9 * (1.0 + cost));

        let c = nalgebra::DVector::from_column_slice(&primal.primal_poly.unwrap());
        let vals = &v * &c;
        for (j, x) in ps.nodes().iter().enumerate() {
            assert!(vals[j].abs() <= x.dist(ps.center()).powf(mu) * (1.0 + 1e-9) + 1e-12);
        }
        assert!((b.dot(&c) - primal.value.as_f64()).abs() <= 1e-8 * (1.0 + primal.value.as_f64()));
    }
}

#[test]
fn homogeneous_scaling_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for _ in 0..20 {
        let ps = random_set(&mut rng, 2, 8, 1.0);
        let (op, k) = if rng.gen_bool(0.5) {
            (DiffOperator::partial(2, 0), 1.0)
        } else {
            (DiffOperator::laplacian(2), 2.0)
        };
        let mu = rng.gen_range(2.0..3.5);
        let base = growth_dual(&ps, 3, &op, mu).unwrap().value.as_f64();
        for h in [0.5, 0.125, 3.0] {
            let scaled = growth_dual(&ps.scale(h).unwrap(), 3, &op, mu).unwrap().value.as_f64();
            let want = h.powf(mu - k) * base;
            assert!((scaled - want).abs() <= 1e-8 * want, "h = {h}: {scaled} vs {want}");
        }
    }
}

#[test]
fn monotone_in_polynomial_degree() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for _ in 0..20 {
        let ps = random_set(&mut rng, 2, 12, 1.0);
        let op = DiffOperator::partial(2, 1);
        let mut prev = 0.0;
        for q in 2..=4 {
            let v = growth_dual(&ps, q, &op, 2.0).unwrap().value;
            let v = match v {
                GrowthValue::Finite(v) => v,
                GrowthValue::Infinite => f64::INFINITY,
            };
            assert!(v >= prev * (1.0 - 1e-10), "q = {q}: {v} < {prev}");
            prev = v;
        }
    }
}
