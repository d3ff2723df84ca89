//! Exact nearest-neighbour search over 3D points.

const LEAF_SIZE: usize = 8;

#[inline]
pub fn squared_distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    dx * dx + dy * dy + dz * dz
}

/// Static k-d tree stored implicitly: each node is a contiguous range of
/// `points` whose middle element is the splitting point, with smaller
/// coordinates on the left.
#[derive(Debug, Clone)]
pub struct KdTree {
    points: Vec<[f64; 3]>,
    axes: Vec<u8>,
}

impl KdTree {
    pub fn new(points: &[[f64; 3]]) -> Self {
        let mut points = points.to_vec();
        let mut axes = vec![0u8; points.len()];
        build(&mut points, &mut axes);
        KdTree { points, axes }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Squared distance from `query` to its nearest point; `None` when the
    /// tree is empty.
    pub fn nearest_squared(&self, query: &[f64; 3]) -> Option<f64> {
        if self.points.is_empty() {
            return None;
        }
        let mut best = f64::INFINITY;
        self.search(0, self.points.len(), query, &mut best);
        Some(best)
    }

    fn search(&self, lo: usize, hi: usize, q: &[f64; 3], best: &mut f64) {
        let n = hi - lo;
        if n <= LEAF_SIZE {
            for p in &self.points[lo..hi] {
                let d = squared_distance(q, p);
                if d < *best {
                    *best = d;
                }
            }
            return;
        }
        let mid = lo + n / 2;
        let pivot = &self.points[mid];
        let d = squared_distance(q, pivot);
        if d < *best {
            *best = d;
        }
        let axis = usize::from(self.axes[mid]);
        let diff = q[axis] - pivot[axis];
        let (near, far) = if diff < 0.0 {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.search(near.0, near.1, q, best);
        if diff * diff < *best {
            self.search(far.0, far.1, q, best);
        }
    }
}

fn build(points: &mut [[f64; 3]], axes: &mut [u8]) {
    if points.len() <= LEAF_SIZE {
        return;
    }
    let axis = widest_axis(points);
    let mid = points.len() / 2;
    points.select_nth_unstable_by(mid, |a, b| a[axis].total_cmp(&b[axis]));
    axes[mid] = axis as u8;
    let (left, rest) = points.split_at_mut(mid);
    let (left_axes, rest_axes) = axes.split_at_mut(mid);
    build(left, left_axes);
    build(&mut rest[1..], &mut rest_axes[1..]);
}

fn widest_axis(points: &[[f64; 3]]) -> usize {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in points {
        for k in 0..3 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (0..3)
        .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
        .unwrap_or(0)
}
