//! A real-coded SPEA2 engine: strength-based fitness, k-nearest-neighbor
//! density, environmental selection with distance-based archive truncation,
//! binary-tournament mating, blend crossover and Gaussian mutation.
//!
//! All objectives are minimized; callers maximizing something supply its
//! negation. Runs are deterministic for a fixed seed: the evolutionary loop
//! owns a seeded RNG, and fitness evaluations — the only parallel part — are
//! pure functions collected in index order.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::optimizer::GaParams;

/// Blend-crossover expansion factor (BLX-alpha).
const BLEND_ALPHA: f64 = 0.5;
/// Gaussian mutation standard deviation as a fraction of each gene's range.
const MUTATION_SIGMA_FRACTION: f64 = 0.10;
/// Minimum improvement of an objective minimum that counts as progress.
const IMPROVEMENT_EPS: f64 = 1e-12;

/// An optimization problem over a fixed-length real genotype.
///
/// `evaluate` must be pure and thread-safe: generations are evaluated in
/// parallel and the engine's determinism relies on it.
pub trait Problem: Sync {
    fn n_genes(&self) -> usize;
    fn n_objectives(&self) -> usize;
    /// Inclusive lower/upper bound of one gene; must be finite with lo <= hi.
    fn bounds(&self, gene: usize) -> (f64, f64);
    /// Objective values, all minimized; must be finite.
    fn evaluate(&self, genes: &[f64]) -> Vec<f64>;
}

/// One evaluated genotype.
#[derive(Debug, Clone)]
pub struct Individual {
    pub genes: Vec<f64>,
    pub objectives: Vec<f64>,
}

/// Extra inputs to a run beyond the problem and parameters.
#[derive(Debug, Clone, Copy, Default)]
pub struct Spea2Options<'a> {
    /// Genotypes placed into the initial population (clamped to bounds).
    pub initial_seeds: &'a [Vec<f64>],
    /// Genotypes appended to every generation's offspring, keeping known-good
    /// solutions in the selection pool throughout the run.
    pub reinject: &'a [Vec<f64>],
}

/// Result of a run: the final archive and bookkeeping.
#[derive(Debug, Clone)]
pub struct Spea2Outcome {
    /// Final archive (population-sized, best solutions found).
    pub archive: Vec<Individual>,
    /// Archive members not dominated by any other archive member.
    pub nondominated: Vec<Individual>,
    /// Per generation, the archive's minimum of each objective.
    pub minima_trace: Vec<Vec<f64>>,
    pub generations_run: usize,
    pub evaluations: u64,
}

fn dominates(a: &[f64], b: &[f64]) -> bool {
    let mut strict = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strict = true;
        }
    }
    strict
}

/// Per-dimension normalization spans of a set of objective vectors.
fn objective_spans(objs: &[&[f64]], n_obj: usize) -> Vec<f64> {
    let mut spans = Vec::with_capacity(n_obj);
    for d in 0..n_obj {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for o in objs {
            lo = lo.min(o[d]);
            hi = hi.max(o[d]);
        }
        let span = hi - lo;
        spans.push(if span > 0.0 { span } else { 1.0 });
    }
    spans
}

fn normalized_distance(a: &[f64], b: &[f64], spans: &[f64]) -> f64 {
    let mut sum = 0.0;
    for d in 0..spans.len() {
        let diff = (a[d] - b[d]) / spans[d];
        sum += diff * diff;
    }
    sum.sqrt()
}

/// SPEA2 fitness: raw strength-based fitness plus k-NN density, lower better.
fn assign_fitness(union: &[Individual]) -> Vec<f64> {
    let n = union.len();
    let n_obj = union.first().map_or(0, |i| i.objectives.len());
    let mut strength = vec![0usize; n];
    let mut dominators: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if i != j && dominates(&union[i].objectives, &union[j].objectives) {
                strength[i] += 1;
                dominators[j].push(i);
            }
        }
    }
    let objs: Vec<&[f64]> = union.iter().map(|i| i.objectives.as_slice()).collect();
    let spans = objective_spans(&objs, n_obj);
    let k = ((n as f64).sqrt() as usize).clamp(1, n.saturating_sub(1).max(1));
    let mut fitness = Vec::with_capacity(n);
    for i in 0..n {
        let raw: usize = dominators[i].iter().map(|&j| strength[j]).sum();
        let mut dists: Vec<f64> = (0..n)
            .filter(|&j| j != i)
            .map(|j| normalized_distance(objs[i], objs[j], &spans))
            .collect();
        let sigma = if dists.is_empty() {
            0.0
        } else {
            let idx = (k - 1).min(dists.len() - 1);
            *dists.select_nth_unstable_by(idx, |a, b| a.total_cmp(b)).1
        };
        fitness.push(raw as f64 + 1.0 / (sigma + 2.0));
    }
    fitness
}

/// Removes members one at a time — always the one with the lexicographically
/// smallest sorted-neighbor-distance vector — until `target` remain. Keeps
/// boundary solutions and thins crowded clusters first.
fn truncate_archive(members: &mut Vec<Individual>, target: usize) {
    let n = members.len();
    if n <= target {
        return;
    }
    let objs: Vec<&[f64]> = members.iter().map(|m| m.objectives.as_slice()).collect();
    let n_obj = objs[0].len();
    let spans = objective_spans(&objs, n_obj);
    // Sorted neighbor lists; dead entries are skipped lazily during compares.
    let neighbors: Vec<Vec<(f64, usize)>> = (0..n)
        .map(|i| {
            let mut row: Vec<(f64, usize)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (normalized_distance(objs[i], objs[j], &spans), j))
                .collect();
            row.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            row
        })
        .collect();
    let mut alive = vec![true; n];
    let mut alive_count = n;

    let less_crowded = |a: usize, b: usize, alive: &[bool], neighbors: &[Vec<(f64, usize)>]| {
        // True if a's alive-filtered distance vector is lexicographically
        // smaller than b's (a is in the denser spot).
        let mut ia = neighbors[a].iter().filter(|&&(_, j)| alive[j]);
        let mut ib = neighbors[b].iter().filter(|&&(_, j)| alive[j]);
        loop {
            match (ia.next(), ib.next()) {
                (Some(&(da, _)), Some(&(db, _))) => {
                    if da < db {
                        return true;
                    }
                    if da > db {
                        return false;
                    }
                }
                _ => return false,
            }
        }
    };

    while alive_count > target {
        let mut victim = usize::MAX;
        for i in 0..n {
            if !alive[i] {
                continue;
            }
            if victim == usize::MAX || less_crowded(i, victim, &alive, &neighbors) {
                victim = i;
            }
        }
        alive[victim] = false;
        alive_count -= 1;
    }
    let mut keep = alive.iter();
    members.retain(|_| *keep.next().unwrap());
}

fn clamp_to_bounds(problem: &impl Problem, genes: &mut [f64]) {
    for (g, gene) in genes.iter_mut().enumerate() {
        let (lo, hi) = problem.bounds(g);
        *gene = gene.clamp(lo, hi);
    }
}

fn validate_bounds(problem: &impl Problem) -> Result<()> {
    if problem.n_genes() == 0 {
        return Err(Error::Params("problem has no genes to optimize".into()));
    }
    if problem.n_objectives() == 0 {
        return Err(Error::Params("problem has no objectives".into()));
    }
    for g in 0..problem.n_genes() {
        let (lo, hi) = problem.bounds(g);
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::Params(format!(
                "gene {g} has invalid bounds [{lo}, {hi}]"
            )));
        }
    }
    Ok(())
}

fn evaluate_batch(
    problem: &(impl Problem + ?Sized),
    genes: Vec<Vec<f64>>,
    n_obj: usize,
) -> Result<Vec<Individual>> {
    let individuals: Vec<Individual> = genes
        .into_par_iter()
        .map(|g| {
            let objectives = problem.evaluate(&g);
            Individual {
                genes: g,
                objectives,
            }
        })
        .collect();
    for ind in &individuals {
        if ind.objectives.len() != n_obj {
            return Err(Error::Params(format!(
                "evaluator returned {} objectives, expected {n_obj}",
                ind.objectives.len()
            )));
        }
        if ind.objectives.iter().any(|v| !v.is_finite()) {
            return Err(Error::Params(
                "evaluator returned a non-finite objective".into(),
            ));
        }
    }
    Ok(individuals)
}

/// Runs the evolutionary search and returns the final archive.
pub fn spea2_run(
    problem: &impl Problem,
    params: &GaParams,
    seed: u64,
    options: &Spea2Options,
) -> Result<Spea2Outcome> {
    params.validate()?;
    validate_bounds(problem)?;
    let n_genes = problem.n_genes();
    let n_obj = problem.n_objectives();
    let pop_size = params.population;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut evaluations: u64 = 0;

    // Initial population: seeds first, the rest sampled uniformly in bounds.
    let mut initial: Vec<Vec<f64>> = Vec::with_capacity(pop_size);
    for s in options.initial_seeds.iter().take(pop_size) {
        if s.len() != n_genes {
            return Err(Error::Params(format!(
                "seed genotype has {} genes, expected {n_genes}",
                s.len()
            )));
        }
        let mut genes = s.clone();
        clamp_to_bounds(problem, &mut genes);
        initial.push(genes);
    }
    while initial.len() < pop_size {
        let genes = (0..n_genes)
            .map(|g| {
                let (lo, hi) = problem.bounds(g);
                if lo == hi {
                    lo
                } else {
                    rng.gen_range(lo..=hi)
                }
            })
            .collect();
        initial.push(genes);
    }
    let mut reinject: Vec<Vec<f64>> = options.reinject.to_vec();
    for r in &mut reinject {
        if r.len() != n_genes {
            return Err(Error::Params(format!(
                "reinjected genotype has {} genes, expected {n_genes}",
                r.len()
            )));
        }
        clamp_to_bounds(problem, r);
    }

    let mut population = evaluate_batch(problem, initial, n_obj)?;
    evaluations += population.len() as u64;
    let mut archive: Vec<Individual> = Vec::new();

    let mut best_minima = vec![f64::INFINITY; n_obj];
    let mut minima_trace: Vec<Vec<f64>> = Vec::with_capacity(params.generations);
    let mut stagnant = 0usize;
    let mut generations_run = 0usize;

    for _generation in 0..params.generations {
        generations_run += 1;

        // Fitness over the union of population and archive.
        let mut union = Vec::with_capacity(population.len() + archive.len());
        union.append(&mut population);
        union.append(&mut archive);
        let fitness = assign_fitness(&union);

        // Environmental selection: all nondominated members, truncated or
        // topped up with the best dominated ones to exactly pop_size.
        let mut selected: Vec<Individual> = Vec::with_capacity(pop_size);
        let mut rest: Vec<(f64, Individual)> = Vec::new();
        for (ind, f) in union.into_iter().zip(&fitness) {
            if *f < 1.0 {
                selected.push(ind);
            } else {
                rest.push((*f, ind));
            }
        }
        if selected.len() > pop_size {
            truncate_archive(&mut selected, pop_size);
        } else if selected.len() < pop_size {
            rest.sort_by(|a, b| a.0.total_cmp(&b.0));
            for (_, ind) in rest.into_iter().take(pop_size - selected.len()) {
                selected.push(ind);
            }
        }
        archive = selected;

        // Progress check on the archive's per-objective minima.
        let mut improved = false;
        let mut gen_minima = Vec::with_capacity(n_obj);
        for (d, best) in best_minima.iter_mut().enumerate() {
            let m = archive
                .iter()
                .map(|i| i.objectives[d])
                .fold(f64::INFINITY, f64::min);
            gen_minima.push(m);
            if m < *best - IMPROVEMENT_EPS {
                *best = m;
                improved = true;
            }
        }
        minima_trace.push(gen_minima);
        stagnant = if improved { 0 } else { stagnant + 1 };
        if stagnant >= params.stagnation_window || generations_run == params.generations {
            break;
        }

        // Mating: binary tournaments on archive fitness, blend crossover,
        // Gaussian mutation on a fraction of genes.
        let archive_fitness = assign_fitness(&archive);
        let tournament = |rng: &mut ChaCha8Rng| -> usize {
            let a = rng.gen_range(0..archive.len());
            let b = rng.gen_range(0..archive.len());
            if archive_fitness[b] < archive_fitness[a] {
                b
            } else {
                a
            }
        };
        let mut offspring_genes: Vec<Vec<f64>> = Vec::with_capacity(pop_size + reinject.len());
        while offspring_genes.len() < pop_size {
            let p1 = &archive[tournament(&mut rng)].genes;
            let p2 = &archive[tournament(&mut rng)].genes;
            let (mut c1, mut c2) = if rng.gen_bool(params.crossover_rate) {
                let mut a = Vec::with_capacity(n_genes);
                let mut b = Vec::with_capacity(n_genes);
                for g in 0..n_genes {
                    let (lo, hi) = (p1[g].min(p2[g]), p1[g].max(p2[g]));
                    let spread = hi - lo;
                    let (blo, bhi) = (lo - BLEND_ALPHA * spread, hi + BLEND_ALPHA * spread);
                    if blo == bhi {
                        a.push(blo);
                        b.push(blo);
                    } else {
                        a.push(rng.gen_range(blo..=bhi));
                        b.push(rng.gen_range(blo..=bhi));
                    }
                }
                (a, b)
            } else {
                (p1.clone(), p2.clone())
            };
            for child in [&mut c1, &mut c2] {
                if rng.gen_bool(params.mutation_probability) {
                    for (g, gene) in child.iter_mut().enumerate() {
                        if rng.gen_bool(params.mutation_rate) {
                            let (lo, hi) = problem.bounds(g);
                            let sigma = MUTATION_SIGMA_FRACTION * (hi - lo);
                            if sigma > 0.0 {
                                let normal = Normal::new(0.0, sigma).expect("finite sigma");
                                *gene += normal.sample(&mut rng);
                            }
                        }
                    }
                }
                clamp_to_bounds(problem, child);
            }
            offspring_genes.push(c1);
            if offspring_genes.len() < pop_size {
                offspring_genes.push(c2);
            }
        }
        offspring_genes.extend(reinject.iter().cloned());
        population = evaluate_batch(problem, offspring_genes, n_obj)?;
        evaluations += population.len() as u64;
    }

    let nondominated: Vec<Individual> = archive
        .iter()
        .filter(|a| {
            !archive
                .iter()
                .any(|b| dominates(&b.objectives, &a.objectives))
        })
        .cloned()
        .collect();
    Ok(Spea2Outcome {
        archive,
        nondominated,
        minima_trace,
        generations_run,
        evaluations,
    })
}
