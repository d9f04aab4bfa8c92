//! Depth-limited regression trees with greedy variance-reduction splits.

/// Borrowed row-major table, the tree's view of training data.
#[derive(Clone, Copy)]
pub(crate) struct Table<'a> {
    pub values: &'a [f64],
    pub n_cols: usize,
}

impl<'a> Table<'a> {
    pub fn n_rows(&self) -> usize {
        self.values.len().checked_div(self.n_cols).unwrap_or(0)
    }

    fn value(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.n_cols + col]
    }
}

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// Growth limits for a single tree.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TreeParams {
    pub max_depth: usize,
    pub min_leaf: usize,
}

/// A fitted regression tree, nodes stored flat.
#[derive(Debug, Clone)]
pub(crate) struct Tree {
    nodes: Vec<Node>,
    root: usize,
}

impl Tree {
    /// Fits a tree to `targets` over the rows listed in `indices`.
    ///
    /// Splits maximize the reduction in summed squared error; ties go to the
    /// lowest feature index, then the lowest threshold. A node becomes a
    /// leaf when the depth limit is reached or no split with positive
    /// reduction and `min_leaf` rows per side exists.
    pub fn fit(table: Table<'_>, targets: &[f64], indices: &[usize], params: TreeParams) -> Tree {
        debug_assert!(!indices.is_empty());
        let mut nodes = Vec::new();
        let root = build(table, targets, indices.to_vec(), 0, params, &mut nodes);
        Tree { nodes, root }
    }

    pub fn predict(&self, row: &[f64]) -> f64 {
        let mut at = self.root;
        loop {
            match &self.nodes[at] {
                Node::Leaf { value } => return *value,
                Node::Split { feature, threshold, left, right } => {
                    at = if row[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }
}

struct BestSplit {
    gain: f64,
    feature: usize,
    threshold: f64,
}

fn build(
    table: Table<'_>,
    targets: &[f64],
    indices: Vec<usize>,
    depth: usize,
    params: TreeParams,
    nodes: &mut Vec<Node>,
) -> usize {
    let n = indices.len();
    let sum: f64 = indices.iter().map(|&i| targets[i]).sum();
    let mean = sum / n as f64;

    let splittable = depth < params.max_depth && n >= 2 * params.min_leaf;
    let best = if splittable {
        find_best_split(table, targets, &indices, params.min_leaf)
    } else {
        None
    };

    match best {
        None => {
            nodes.push(Node::Leaf { value: mean });
            nodes.len() - 1
        }
        Some(split) => {
            let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = indices
                .iter()
                .partition(|&&i| table.value(i, split.feature) <= split.threshold);
            let left = build(table, targets, left_idx, depth + 1, params, nodes);
            let right = build(table, targets, right_idx, depth + 1, params, nodes);
            nodes.push(Node::Split {
                feature: split.feature,
                threshold: split.threshold,
                left,
                right,
            });
            nodes.len() - 1
        }
    }
}

fn find_best_split(
    table: Table<'_>,
    targets: &[f64],
    indices: &[usize],
    min_leaf: usize,
) -> Option<BestSplit> {
    let n = indices.len();
    let mut best: Option<BestSplit> = None;
    let mut sorted: Vec<(f64, f64)> = Vec::with_capacity(n);

    for feature in 0..table.n_cols {
        sorted.clear();
        sorted.extend(indices.iter().map(|&i| (table.value(i, feature), targets[i])));
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));

        let total_sum: f64 = sorted.iter().map(|p| p.1).sum();
        let total_sumsq: f64 = sorted.iter().map(|p| p.1 * p.1).sum();
        let parent_sse = total_sumsq - total_sum * total_sum / n as f64;

        let mut left_sum = 0.0;
        let mut left_sumsq = 0.0;
        for j in 0..n - 1 {
            left_sum += sorted[j].1;
            left_sumsq += sorted[j].1 * sorted[j].1;
            if sorted[j].0 >= sorted[j + 1].0 {
                continue;
            }
            let n_left = j + 1;
            let n_right = n - n_left;
            if n_left < min_leaf || n_right < min_leaf {
                continue;
            }
            let sse_left = left_sumsq - left_sum * left_sum / n_left as f64;
            let right_sum = total_sum - left_sum;
            let sse_right = (total_sumsq - left_sumsq) - right_sum * right_sum / n_right as f64;
            let gain = parent_sse - sse_left - sse_right;
            if gain > 0.0 && best.as_ref().is_none_or(|b| gain > b.gain) {
                best = Some(BestSplit {
                    gain,
                    feature,
                    threshold: (sorted[j].0 + sorted[j + 1].0) / 2.0,
                });
            }
        }
    }
    best
}
