//! Dominance, non-dominated sorting and crowding distance.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{param, Result};

/// Pareto dominance for minimization. A feasible vector (`Some`) dominates
/// every infeasible one (`None`); two infeasible vectors do not dominate
/// each other.
pub fn dominates(a: Option<&[f64]>, b: Option<&[f64]>) -> Result<bool> {
    match (a, b) {
        (Some(a), Some(b)) => {
            if a.len() != b.len() {
                return Err(param("objective vectors differ in length"));
            }
            Ok(dominates_unchecked(a, b))
        }
        (Some(_), None) => Ok(true),
        (None, _) => Ok(false),
    }
}

pub(crate) fn dominates_unchecked(a: &[f64], b: &[f64]) -> bool {
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

fn dom(a: &Option<Vec<f64>>, b: &Option<Vec<f64>>) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => dominates_unchecked(a, b),
        (Some(_), None) => true,
        (None, _) => false,
    }
}

/// Partitions `objectives` into fronts of indices, best first. Indices in
/// each front are ascending.
pub fn fast_nondominated_sort(objectives: &[Option<Vec<f64>>]) -> Result<Vec<Vec<usize>>> {
    let m = objectives.iter().flatten().map(Vec::len).next();
    if let Some(m) = m {
        if objectives.iter().flatten().any(|v| v.len() != m) {
            return Err(param("objective vectors differ in length"));
        }
    }
    let n = objectives.len();
    let mut dominated_by = vec![0usize; n];
    let mut dominates_list: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if dom(&objectives[i], &objectives[j]) {
                dominates_list[i].push(j);
                dominated_by[j] += 1;
            } else if dom(&objectives[j], &objectives[i]) {
                dominates_list[j].push(i);
                dominated_by[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates_list[i] {
                dominated_by[j] -= 1;
                if dominated_by[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(core::mem::replace(&mut current, next));
    }
    Ok(fronts)
}

/// Crowding distance of each member of one front. Boundary members of
/// every objective get infinity; objectives with zero range add nothing.
pub fn crowding_distance(front: &[&[f64]]) -> Vec<f64> {
    let n = front.len();
    let mut dist = vec![0.0; n];
    if n == 0 {
        return dist;
    }
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let m = front[0].len();
    let mut order: Vec<usize> = (0..n).collect();
    for k in 0..m {
        order.sort_by(|&a, &b| front[a][k].total_cmp(&front[b][k]).then(a.cmp(&b)));
        let lo = front[order[0]][k];
        let hi = front[order[n - 1]][k];
        let range = hi - lo;
        if !(range > 0.0) {
            continue;
        }
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        for w in 1..n - 1 {
            let i = order[w];
            dist[i] += (front[order[w + 1]][k] - front[order[w - 1]][k]) / range;
        }
    }
    dist
}
