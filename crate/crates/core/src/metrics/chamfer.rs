use super::kdtree::KdTree;

fn mean_nearest(queries: &[[f64; 3]], tree: &KdTree) -> f64 {
    let sum: f64 = queries
        .iter()
        .map(|q| tree.nearest_squared(q).expect("non-empty tree").sqrt())
        .sum();
    sum / queries.len() as f64
}

/// Symmetric Chamfer distance: the mean Euclidean distance from each point
/// of `a` to its nearest neighbour in `b`, plus the same from `b` to `a`.
/// `None` if either cloud is empty.
pub fn chamfer_distance(a: &[[f64; 3]], b: &[[f64; 3]]) -> Option<f64> {
    if a.is_empty() || b.is_empty() {
        return None;
    }
    let tree_a = KdTree::new(a);
    let tree_b = KdTree::new(b);
    Some(mean_nearest(a, &tree_b) + mean_nearest(b, &tree_a))
}
