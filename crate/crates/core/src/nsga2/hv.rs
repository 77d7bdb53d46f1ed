//! Hypervolume of a point set under minimization.

use alloc::vec::Vec;

/// Volume dominated by `points` and bounded by `reference`. Points not
/// strictly better than the reference in every objective are ignored.
pub fn hypervolume(points: &[Vec<f64>], reference: &[f64]) -> f64 {
    let pts: Vec<&[f64]> = points
        .iter()
        .map(Vec::as_slice)
        .filter(|p| p.len() == reference.len() && p.iter().zip(reference).all(|(x, r)| x < r))
        .collect();
    slice(pts, reference)
}

fn slice(mut pts: Vec<&[f64]>, reference: &[f64]) -> f64 {
    let m = reference.len();
    if pts.is_empty() || m == 0 {
        return 0.0;
    }
    if m == 1 {
        let best = pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        return reference[0] - best;
    }
    let k = m - 1;
    pts.sort_by(|a, b| a[k].total_cmp(&b[k]));
    let mut volume = 0.0;
    for i in 0..pts.len() {
        let upper = if i + 1 < pts.len() { pts[i + 1][k] } else { reference[k] };
        let depth = upper - pts[i][k];
        if depth > 0.0 {
            let lower: Vec<&[f64]> = pts[..=i].iter().map(|p| &p[..k]).collect();
            volume += depth * slice(lower, &reference[..k]);
        }
    }
    volume
}
