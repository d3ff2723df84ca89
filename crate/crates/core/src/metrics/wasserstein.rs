use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use voracious_radix_sort::RadixSort;

/// Exact Wasserstein-1 distance between the uniform empirical distributions
/// on two sorted samples, computed as the area between their step CDFs.
/// Sample sizes may differ. Returns `None` if either sample is empty.
pub fn wasserstein_1d_sorted(a: &[f64], b: &[f64]) -> Option<f64> {
    let (n, m) = (a.len(), b.len());
    if n == 0 || m == 0 {
        return None;
    }
    debug_assert!(a.is_sorted() && b.is_sorted());
    // |F_a - F_b| on each gap equals |i*m - j*n| / (n*m) with i, j the
    // counts of samples at or below the gap's left end.
    let (mut i, mut j) = (0usize, 0usize);
    let mut prev = a[0].min(b[0]);
    let mut area = 0.0;
    while i < n || j < m {
        let x = match (a.get(i), b.get(j)) {
            (Some(&u), Some(&v)) => u.min(v),
            (Some(&u), None) => u,
            (None, Some(&v)) => v,
            (None, None) => unreachable!(),
        };
        let gap = (i as i128 * m as i128 - j as i128 * n as i128).unsigned_abs();
        if gap != 0 {
            area += gap as f64 * (x - prev);
        }
        while i < n && a[i] <= x {
            i += 1;
        }
        while j < m && b[j] <= x {
            j += 1;
        }
        prev = x;
    }
    Some(area / (n as f64 * m as f64))
}

/// As [`wasserstein_1d_sorted`] for unsorted samples.
pub fn wasserstein_1d(a: &[f64], b: &[f64]) -> Option<f64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.voracious_sort();
    b.voracious_sort();
    wasserstein_1d_sorted(&a, &b)
}

/// `count` directions drawn uniformly from the unit sphere by normalizing
/// standard-normal triples from a ChaCha8 generator seeded with `seed`.
pub fn random_directions(count: usize, seed: u64) -> Vec<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v: [f64; 3] = std::array::from_fn(|_| StandardNormal.sample(&mut rng));
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if norm > 1e-12 {
            out.push([v[0] / norm, v[1] / norm, v[2] / norm]);
        }
    }
    out
}

/// Sorted projections; sorting dominates the cost of the sliced distance,
/// hence the radix sort.
fn project(points: &[[f64; 3]], dir: &[f64; 3], out: &mut Vec<f64>) {
    out.clear();
    out.extend(points.iter().map(|p| p[0] * dir[0] + p[1] * dir[1] + p[2] * dir[2]));
    out.voracious_sort();
}

/// Per-slice 1D Wasserstein distances between the projections of `a` and
/// `b` onto each direction. `None` if either cloud is empty.
pub fn sliced_wasserstein_slices(
    a: &[[f64; 3]],
    b: &[[f64; 3]],
    directions: &[[f64; 3]],
) -> Option<Vec<f64>> {
    if a.is_empty() || b.is_empty() {
        return None;
    }
    let mut pa = Vec::with_capacity(a.len());
    let mut pb = Vec::with_capacity(b.len());
    directions
        .iter()
        .map(|dir| {
            project(a, dir, &mut pa);
            project(b, dir, &mut pb);
            wasserstein_1d_sorted(&pa, &pb)
        })
        .collect()
}

/// Sliced Wasserstein distance: mean of the per-slice 1D distances.
pub fn sliced_wasserstein(a: &[[f64; 3]], b: &[[f64; 3]], directions: &[[f64; 3]]) -> Option<f64> {
    let slices = sliced_wasserstein_slices(a, b, directions)?;
    Some(slices.iter().sum::<f64>() / slices.len() as f64)
}
