/// Associative reduction operators with a fixed evaluation tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReduceOp {
    Sum,
    Min,
}

impl ReduceOp {
    fn identity(self) -> f64 {
        match self {
            ReduceOp::Sum => 0.0,
            ReduceOp::Min => f64::INFINITY,
        }
    }

    #[inline]
    fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            ReduceOp::Sum => a + b,
            ReduceOp::Min => a.min(b),
        }
    }
}

/// Pairwise tree reduction over `values` in index order.
///
/// The tree shape depends only on `values.len()`, so the result is the same
/// bit pattern whoever produced the values and in whatever order.
pub fn deterministic_reduce(values: &[f64], op: ReduceOp) -> f64 {
    if values.is_empty() {
        return op.identity();
    }
    tree(values, op)
}

fn tree(values: &[f64], op: ReduceOp) -> f64 {
    match values.len() {
        1 => values[0],
        2 => op.apply(values[0], values[1]),
        n => {
            let (l, r) = values.split_at(n / 2);
            op.apply(tree(l, op), tree(r, op))
        }
    }
}
