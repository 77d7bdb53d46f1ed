use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sketchopt_core::nsga2::{
    dominates, evolve, fast_nondominated_sort, polynomial_mutation, sbx_beta, sbx_crossover, sbx_gene,
    OptConfig, Problem, Zdt1,
};
use sketchopt_core::Result;

/// Ranks by repeated peeling: rank k is everything not dominated by any
/// remaining individual once ranks < k are removed.
fn brute_force_ranks(objs: &[Option<Vec<f64>>]) -> Vec<usize> {
    fn weakly_better(a: &Option<Vec<f64>>, b: &Option<Vec<f64>>) -> bool {
        match (a, b) {
            (Some(a), Some(b)) => {
                a.iter().zip(b).all(|(x, y)| x <= y) && a.iter().zip(b).any(|(x, y)| x < y)
            }
            (Some(_), None) => true,
            _ => false,
        }
    }
    let n = objs.len();
    let mut rank = vec![usize::MAX; n];
    let mut k = 0;
    while rank.iter().any(|&r| r == usize::MAX) {
        let current: Vec<usize> = (0..n)
            .filter(|&i| rank[i] == usize::MAX)
            .filter(|&i| !(0..n).any(|j| rank[j] == usize::MAX && weakly_better(&objs[j], &objs[i])))
            .collect();
        for i in current {
            rank[i] = k;
        }
        k += 1;
    }
    rank
}

fn ranks_of(fronts: &[Vec<usize>], n: usize) -> Vec<usize> {
    let mut r = vec![usize::MAX; n];
    for (k, f) in fronts.iter().enumerate() {
        for &i in f {
            r[i] = k;
        }
    }
    r
}

#[test]
fn sort_matches_brute_force_on_random_populations() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..100 {
        let n = rng.random_range(1..=200);
        let m = rng.random_range(2..=4);
        // Coarse grid values force plenty of ties and duplicates.
        let objs: Vec<Option<Vec<f64>>> = (0..n)
            .map(|_| {
                if rng.random::<f64>() < 0.05 {
                    None
                } else {
                    Some((0..m).map(|_| rng.random_range(0..12) as f64).collect())
                }
            })
            .collect();
        let fronts = fast_nondominated_sort(&objs).unwrap();
        let mut all: Vec<usize> = fronts.concat();
        all.sort_unstable();
        assert_eq!(all, (0..n).collect::<Vec<_>>(), "case {case}: not a partition");
        assert_eq!(ranks_of(&fronts, n), brute_force_ranks(&objs), "case {case}");
    }
}

#[test]
fn fifty_three_objective_individuals() {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let objs: Vec<Option<Vec<f64>>> =
        (0..50).map(|_| Some((0..3).map(|_| rng.random::<f64>()).collect())).collect();
    let fronts = fast_nondominated_sort(&objs).unwrap();
    assert_eq!(ranks_of(&fronts, 50), brute_force_ranks(&objs));
}

#[test]
fn sbx_children_keep_parent_midpoint() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (p1, p2) = ([-3.0, 0.0], [3.0, 0.0]);
    for _ in 0..1000 {
        let u: f64 = rng.random();
        let beta = sbx_beta(u, 20.0);
        for g in 0..2 {
            let (a, b) = sbx_gene(p1[g], p2[g], beta);
            assert!(((a + b) / 2.0 - (p1[g] + p2[g]) / 2.0).abs() < 1e-12);
        }
        let (c1, c2) = sbx_crossover(&p1, &p2, 20.0, &[(-3.0, 3.0); 2], &mut rng);
        assert!(c1.iter().chain(&c2).all(|x| (-3.0..=3.0).contains(x)));
        assert_eq!((c1[1], c2[1]), (0.0, 0.0));
    }
}

#[test]
fn centered_mutation_is_unbiased() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let n = 100_000;
    let mut sum = 0.0;
    for _ in 0..n {
        let mut g = [0.5];
        polynomial_mutation(&mut g, 20.0, &[(0.0, 1.0)], 1.0, &mut rng);
        sum += g[0];
    }
    let mean = sum / n as f64;
    assert!((mean - 0.5).abs() < 0.01, "{mean}");
}

#[test]
fn lower_bound_gene_moves_up_only() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut moved = 0;
    for _ in 0..1000 {
        let mut g = [-2.0];
        polynomial_mutation(&mut g, 20.0, &[(-2.0, 2.0)], 1.0, &mut rng);
        assert!(g[0] >= -2.0 && g[0] <= 2.0);
        moved += (g[0] > -2.0) as usize;
    }
    assert!(moved > 0);
}

fn generational_distance(front: &[Vec<f64>]) -> f64 {
    let curve: Vec<(f64, f64)> = (0..=20_000)
        .map(|i| {
            let f1 = i as f64 / 20_000.0;
            (f1, 1.0 - f1.sqrt())
        })
        .collect();
    let total: f64 = front
        .iter()
        .map(|p| curve.iter().map(|&(x, y)| ((p[0] - x).powi(2) + (p[1] - y).powi(2)).sqrt()).fold(f64::MAX, f64::min))
        .sum();
    total / front.len() as f64
}

#[test]
fn zdt1_converges_to_analytic_front() {
    let cfg = OptConfig { population_size: 100, generations: 250, seed: 42, ..Default::default() };
    let res = evolve(&Zdt1::new(30), &cfg).unwrap();
    let pts: Vec<Vec<f64>> = res.front.members.iter().map(|m| m.objectives.clone().unwrap()).collect();
    assert!(!pts.is_empty());
    let gd = generational_distance(&pts);
    assert!(gd < 0.01, "GD {gd}");
    for a in &pts {
        for b in &pts {
            assert!(!dominates(Some(a), Some(b)).unwrap());
        }
    }
}

struct Sphere2;

impl Problem for Sphere2 {
    fn bounds(&self) -> &[(f64, f64)] {
        &[(-2.0, 2.0), (-2.0, 2.0)]
    }
    fn num_objectives(&self) -> usize {
        2
    }
    fn evaluate(&self, x: &[f64]) -> Result<Option<Vec<f64>>> {
        // Half the box is infeasible.
        if x[0] + x[1] > 1.0 {
            return Ok(None);
        }
        Ok(Some(vec![(x[0] - 1.0).powi(2) + x[1] * x[1], (x[0] + 1.0).powi(2) + x[1] * x[1]]))
    }
}

#[test]
fn elitism_bounds_and_determinism() {
    let cfg = OptConfig { population_size: 24, generations: 40, seed: 3, ..Default::default() };
    let a = evolve(&Sphere2, &cfg).unwrap();
    assert_eq!(a, evolve(&Sphere2, &cfg).unwrap());
    let mut best = vec![f64::INFINITY; 2];
    for snap in &a.history {
        for ind in &snap.population {
            assert!(ind.genome.iter().all(|g| (-2.0..=2.0).contains(g)));
            assert!(ind.rank.is_some() && ind.crowding.unwrap() >= 0.0);
        }
        for k in 0..2 {
            let b = snap
                .population
                .iter()
                .filter_map(|i| i.objectives.as_ref().map(|o| o[k]))
                .fold(f64::INFINITY, f64::min);
            assert!(b <= best[k]);
            best[k] = b;
        }
        // Every infeasible individual ranks below every feasible one.
        let worst_feasible = snap.population.iter().filter(|i| i.is_feasible()).map(|i| i.rank.unwrap()).max();
        let best_infeasible = snap.population.iter().filter(|i| !i.is_feasible()).map(|i| i.rank.unwrap()).min();
        if let (Some(w), Some(b)) = (worst_feasible, best_infeasible) {
            assert!(w < b);
        }
    }
    let other = evolve(&Sphere2, &OptConfig { seed: 4, ..cfg }).unwrap();
    assert_ne!(a.front, other.front);
}

proptest! {
    #[test]
    fn fronts_are_mutually_non_dominating(
        pts in prop::collection::vec(prop::collection::vec(0u8..6, 3), 1..60)
    ) {
        let objs: Vec<Option<Vec<f64>>> =
            pts.iter().map(|p| Some(p.iter().map(|&v| v as f64).collect())).collect();
        for front in fast_nondominated_sort(&objs).unwrap() {
            for &i in &front {
                for &j in &front {
                    prop_assert!(!dominates(objs[i].as_deref(), objs[j].as_deref()).unwrap());
                }
            }
        }
    }
}
