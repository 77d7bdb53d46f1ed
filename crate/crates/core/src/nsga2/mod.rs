//! NSGA-II over a box of real-valued design variables.
//!
//! Infeasible individuals rank below every feasible one. All random draws
//! come from one seeded ChaCha8 stream and evaluation never touches it, so
//! a run is reproducible bit for bit whatever the evaluation order.

mod hv;
mod operators;
mod sort;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use hv::hypervolume;
pub use operators::{
    polynomial_mutation, polynomial_perturb, sbx_beta, sbx_crossover, sbx_gene, tournament_select,
};
pub use sort::{crowding_distance, dominates, fast_nondominated_sort};

use crate::annotation::DesignVariable;
use crate::error::{param, Error, Result};
use crate::math;
use crate::objective::{evaluate_objectives, ObjectiveRegistry};
use crate::parametrizer::{Assignment, ParametricGraph};

/// Resampling rounds allowed when the whole initial population is infeasible.
pub const MAX_INIT_ATTEMPTS: usize = 10;
/// Genomes closer than this (max-norm) are the same front member.
pub const DEDUP_TOL: f64 = 1e-9;

/// A minimization problem over a box.
pub trait Problem {
    fn bounds(&self) -> &[(f64, f64)];
    fn num_objectives(&self) -> usize;
    /// Objective values, or `None` if the genome is infeasible.
    fn evaluate(&self, genome: &[f64]) -> Result<Option<Vec<f64>>>;
    /// Evaluates many genomes. Overriding this (for instance to run in
    /// parallel) must not change the results.
    fn evaluate_batch(&self, genomes: &[Vec<f64>]) -> Result<Vec<Option<Vec<f64>>>> {
        genomes.iter().map(|g| self.evaluate(g)).collect()
    }
}

impl<P: Problem + ?Sized> Problem for &P {
    fn bounds(&self) -> &[(f64, f64)] {
        (**self).bounds()
    }
    fn num_objectives(&self) -> usize {
        (**self).num_objectives()
    }
    fn evaluate(&self, genome: &[f64]) -> Result<Option<Vec<f64>>> {
        (**self).evaluate(genome)
    }
    fn evaluate_batch(&self, genomes: &[Vec<f64>]) -> Result<Vec<Option<Vec<f64>>>> {
        (**self).evaluate_batch(genomes)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptConfig {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_prob: f64,
    /// Per-gene mutation probability; `None` means `1 / genome length`.
    pub mutation_prob: Option<f64>,
    pub eta_c: f64,
    pub eta_m: f64,
    pub seed: u64,
    pub objectives: Vec<String>,
}

impl Default for OptConfig {
    fn default() -> Self {
        Self {
            population_size: 40,
            generations: 60,
            crossover_prob: 0.9,
            mutation_prob: None,
            eta_c: 20.0,
            eta_m: 20.0,
            seed: 0,
            objectives: vec!["stress".into(), "torsion".into()],
        }
    }
}

impl OptConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 4 || self.population_size % 2 != 0 {
            return Err(param("population size must be even and at least 4"));
        }
        let prob_ok = |p: f64| (0.0..=1.0).contains(&p);
        if !prob_ok(self.crossover_prob) || !self.mutation_prob.is_none_or(prob_ok) {
            return Err(param("probabilities must lie in [0, 1]"));
        }
        if !(self.eta_c > 0.0 && self.eta_m > 0.0) || !self.eta_c.is_finite() || !self.eta_m.is_finite() {
            return Err(param("distribution indices must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub genome: Vec<f64>,
    /// `None` marks an infeasible individual.
    pub objectives: Option<Vec<f64>>,
    pub rank: Option<usize>,
    pub crowding: Option<f64>,
}

impl Individual {
    pub fn is_feasible(&self) -> bool {
        self.objectives.is_some()
    }
}

/// The population after one generation (generation 0 is the initial one).
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationSnapshot {
    pub generation: usize,
    pub population: Vec<Individual>,
    pub front_hypervolume: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParetoFront {
    pub members: Vec<Individual>,
    /// Reference point of every hypervolume in the history.
    pub reference_point: Vec<f64>,
    pub hypervolume_history: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveResult {
    pub front: ParetoFront,
    pub history: Vec<GenerationSnapshot>,
}

/// Assigns ranks and crowding in place and returns the fronts.
pub fn rank_population(pop: &mut [Individual]) -> Result<Vec<Vec<usize>>> {
    let objs: Vec<Option<Vec<f64>>> = pop.iter().map(|i| i.objectives.clone()).collect();
    let fronts = fast_nondominated_sort(&objs)?;
    for (r, front) in fronts.iter().enumerate() {
        let crowd = if pop[front[0]].is_feasible() {
            let vals: Vec<&[f64]> = front.iter().map(|&i| pop[i].objectives.as_deref().unwrap()).collect();
            crowding_distance(&vals)
        } else {
            vec![0.0; front.len()]
        };
        for (&i, c) in front.iter().zip(crowd) {
            pop[i].rank = Some(r);
            pop[i].crowding = Some(c);
        }
    }
    Ok(fronts)
}

fn sample<R: Rng>(bounds: &[(f64, f64)], rng: &mut R) -> Vec<f64> {
    bounds.iter().map(|&(lo, hi)| lo + rng.random::<f64>() * (hi - lo)).collect()
}

fn evaluate_all<P: Problem>(problem: &P, genomes: Vec<Vec<f64>>) -> Result<Vec<Individual>> {
    let m = problem.num_objectives();
    let objs = problem.evaluate_batch(&genomes)?;
    if objs.len() != genomes.len() {
        return Err(param("batch evaluation returned the wrong number of results"));
    }
    genomes
        .into_iter()
        .zip(objs)
        .map(|(genome, objectives)| {
            if let Some(o) = &objectives {
                if o.len() != m || o.iter().any(|v| !v.is_finite()) {
                    return Err(param("objective vector has wrong length or non-finite values"));
                }
            }
            Ok(Individual { genome, objectives, rank: None, crowding: None })
        })
        .collect()
}

fn front_points(pop: &[Individual]) -> Vec<Vec<f64>> {
    pop.iter()
        .filter(|i| i.rank == Some(0))
        .filter_map(|i| i.objectives.clone())
        .collect()
}

/// Nadir of the feasible initial population pushed out by a tenth of each
/// objective's range (or one unit when the range is zero).
fn reference_point(pop: &[Individual], m: usize) -> Vec<f64> {
    let mut lo = vec![f64::INFINITY; m];
    let mut hi = vec![f64::NEG_INFINITY; m];
    for o in pop.iter().filter_map(|i| i.objectives.as_ref()) {
        for k in 0..m {
            lo[k] = lo[k].min(o[k]);
            hi[k] = hi[k].max(o[k]);
        }
    }
    (0..m)
        .map(|k| {
            let range = hi[k] - lo[k];
            hi[k] + if range > 0.0 { 0.1 * range } else { 1.0 }
        })
        .collect()
}

/// Rank-0 feasible members with near-duplicate genomes removed.
pub fn extract_front(pop: &[Individual]) -> Vec<Individual> {
    let mut members: Vec<Individual> = Vec::new();
    for ind in pop.iter().filter(|i| i.rank == Some(0) && i.is_feasible()) {
        let dup = members.iter().any(|m| {
            m.genome.iter().zip(&ind.genome).all(|(a, b)| math::abs(a - b) <= DEDUP_TOL)
        });
        if !dup {
            members.push(ind.clone());
        }
    }
    members
}

/// Runs NSGA-II on `problem`.
pub fn evolve<P: Problem>(problem: &P, config: &OptConfig) -> Result<EvolveResult> {
    evolve_with(problem, config, |_| {})
}

/// [`evolve`] that hands every generation snapshot to `observer` as soon
/// as it exists.
pub fn evolve_with<P: Problem>(
    problem: &P,
    config: &OptConfig,
    mut observer: impl FnMut(&GenerationSnapshot),
) -> Result<EvolveResult> {
    config.validate()?;
    let bounds = problem.bounds().to_vec();
    let n_genes = bounds.len();
    if n_genes == 0 {
        return Err(param("at least one design variable is required"));
    }
    if bounds.iter().any(|&(lo, hi)| !(lo <= hi) || !lo.is_finite() || !hi.is_finite()) {
        return Err(param("variable bounds must be finite with lo <= hi"));
    }
    let m = problem.num_objectives();
    if m == 0 {
        return Err(param("at least one objective is required"));
    }
    let n = config.population_size;
    let pm = config.mutation_prob.unwrap_or(1.0 / n_genes as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut pop = Vec::new();
    let mut attempts = 0;
    while attempts < 1 + MAX_INIT_ATTEMPTS {
        attempts += 1;
        let genomes = (0..n).map(|_| sample(&bounds, &mut rng)).collect();
        pop = evaluate_all(problem, genomes)?;
        if pop.iter().any(Individual::is_feasible) {
            break;
        }
    }
    if !pop.iter().any(Individual::is_feasible) {
        return Err(Error::InfeasibleProblem { attempts });
    }
    rank_population(&mut pop)?;
    let reference = reference_point(&pop, m);
    let mut history = vec![GenerationSnapshot {
        generation: 0,
        front_hypervolume: hypervolume(&front_points(&pop), &reference),
        population: pop.clone(),
    }];
    observer(&history[0]);

    for generation in 1..=config.generations {
        let ranks: Vec<usize> = pop.iter().map(|i| i.rank.unwrap()).collect();
        let crowd: Vec<f64> = pop.iter().map(|i| i.crowding.unwrap()).collect();
        let mut children = Vec::with_capacity(n);
        while children.len() < n {
            let a = tournament_select(&ranks, &crowd, &mut rng);
            let b = tournament_select(&ranks, &crowd, &mut rng);
            let (mut c1, mut c2) = if rng.random::<f64>() < config.crossover_prob {
                sbx_crossover(&pop[a].genome, &pop[b].genome, config.eta_c, &bounds, &mut rng)
            } else {
                (pop[a].genome.clone(), pop[b].genome.clone())
            };
            polynomial_mutation(&mut c1, config.eta_m, &bounds, pm, &mut rng);
            polynomial_mutation(&mut c2, config.eta_m, &bounds, pm, &mut rng);
            children.push(c1);
            children.push(c2);
        }
        let mut merged = pop;
        merged.extend(evaluate_all(problem, children)?);
        let fronts = rank_population(&mut merged)?;
        let mut keep: Vec<usize> = Vec::with_capacity(n);
        for front in fronts {
            if keep.len() + front.len() <= n {
                keep.extend(front);
            } else {
                let mut last = front;
                // Stable: equal crowding keeps index order.
                last.sort_by(|&x, &y| merged[y].crowding.unwrap().total_cmp(&merged[x].crowding.unwrap()));
                keep.extend(last.into_iter().take(n - keep.len()));
            }
            if keep.len() == n {
                break;
            }
        }
        keep.sort_unstable();
        let mut next: Vec<Individual> = keep.into_iter().map(|i| merged[i].clone()).collect();
        rank_population(&mut next)?;
        pop = next;
        history.push(GenerationSnapshot {
            generation,
            front_hypervolume: hypervolume(&front_points(&pop), &reference),
            population: pop.clone(),
        });
        observer(history.last().unwrap());
    }

    let front = ParetoFront {
        members: extract_front(&pop),
        hypervolume_history: history.iter().map(|s| s.front_hypervolume).collect(),
        reference_point: reference,
    };
    Ok(EvolveResult { front, history })
}

/// Optimization of wall-axis translations against an objective registry.
/// Gene `i` is the value of the `i`-th variable in ascending id order.
pub struct LayoutProblem<'a> {
    pub graph: &'a ParametricGraph,
    pub variables: Vec<DesignVariable>,
    pub registry: &'a ObjectiveRegistry,
    bounds: Vec<(f64, f64)>,
}

impl<'a> LayoutProblem<'a> {
    pub fn new(graph: &'a ParametricGraph, variables: &[DesignVariable], registry: &'a ObjectiveRegistry) -> Self {
        let mut variables = variables.to_vec();
        variables.sort_by_key(|v| v.id);
        let bounds = variables.iter().map(|v| (v.lo, v.hi)).collect();
        Self { graph, variables, registry, bounds }
    }

    pub fn assignment(&self, genome: &[f64]) -> Assignment {
        self.variables.iter().zip(genome).map(|(v, &x)| (v.id, x)).collect()
    }
}

impl Problem for LayoutProblem<'_> {
    fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }
    fn num_objectives(&self) -> usize {
        self.registry.len()
    }
    fn evaluate(&self, genome: &[f64]) -> Result<Option<Vec<f64>>> {
        Ok(evaluate_objectives(self.graph, &self.variables, &self.assignment(genome), self.registry)?.values)
    }
}

/// The ZDT1 benchmark: `f1 = x1`, `f2 = g (1 - sqrt(f1 / g))` with
/// `g = 1 + 9 mean(x2..xn)`; its Pareto front is `f2 = 1 - sqrt(f1)`.
pub struct Zdt1 {
    bounds: Vec<(f64, f64)>,
}

impl Zdt1 {
    pub fn new(genes: usize) -> Self {
        Self { bounds: vec![(0.0, 1.0); genes] }
    }
}

impl Problem for Zdt1 {
    fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }
    fn num_objectives(&self) -> usize {
        2
    }
    fn evaluate(&self, x: &[f64]) -> Result<Option<Vec<f64>>> {
        let f1 = x[0];
        let g = if x.len() > 1 { 1.0 + 9.0 * x[1..].iter().sum::<f64>() / (x.len() - 1) as f64 } else { 1.0 };
        Ok(Some(vec![f1, g * (1.0 - math::sqrt(f1 / g))]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(OptConfig::default().validate().is_ok());
        for bad in [
            OptConfig { population_size: 5, ..Default::default() },
            OptConfig { population_size: 2, ..Default::default() },
            OptConfig { crossover_prob: 1.5, ..Default::default() },
            OptConfig { eta_m: 0.0, ..Default::default() },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    struct Never;
    impl Problem for Never {
        fn bounds(&self) -> &[(f64, f64)] {
            &[(0.0, 1.0)]
        }
        fn num_objectives(&self) -> usize {
            1
        }
        fn evaluate(&self, _: &[f64]) -> Result<Option<Vec<f64>>> {
            Ok(None)
        }
    }

    #[test]
    fn all_infeasible_fails() {
        let err = evolve(&Never, &OptConfig { population_size: 4, ..Default::default() }).unwrap_err();
        assert_eq!(err, Error::InfeasibleProblem { attempts: 1 + MAX_INIT_ATTEMPTS });
    }

    #[test]
    fn short_zdt1_run_is_deterministic_and_in_bounds() {
        let cfg = OptConfig { population_size: 20, generations: 15, seed: 7, ..Default::default() };
        let a = evolve(&Zdt1::new(5), &cfg).unwrap();
        let b = evolve(&Zdt1::new(5), &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.history.len(), 16);
        for snap in &a.history {
            assert!(snap.population.iter().all(|i| i.genome.iter().all(|g| (0.0..=1.0).contains(g))));
        }
        let hv = &a.front.hypervolume_history;
        assert!(hv.windows(2).all(|w| w[1] >= w[0] - 1e-12), "{hv:?}");
    }
}
