//! Scalar maximization.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Budget for [`golden_max`].
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GoldenBudget {
    pub max_iter: u32,
    pub x_tol: f64,
}

impl Default for GoldenBudget {
    fn default() -> Self {
        GoldenBudget {
            max_iter: 200,
            x_tol: 1e-12,
        }
    }
}

/// Golden-section search for the maximum of `f` on `[a, b]`.
///
/// Returns the best `(x, f(x))` seen, endpoints included, so the result
/// never falls below `max(f(a), f(b))`.
pub fn golden_max(f: impl Fn(f64) -> f64, a: f64, b: f64, budget: GoldenBudget) -> (f64, f64) {
    let (mut a, mut b) = if a <= b { (a, b) } else { (b, a) };
    let mut best = (a, f(a));
    let fb = f(b);
    if fb > best.1 {
        best = (b, fb);
    }
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..budget.max_iter {
        if (b - a).abs() <= budget.x_tol {
            break;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    for cand in [(x1, f1), (x2, f2)] {
        if cand.1 > best.1 {
            best = cand;
        }
    }
    best
}

/// Evaluates `f` on `grid`, then refines the best grid point by golden
/// section between its neighbours. `grid` must be sorted ascending.
pub fn grid_then_golden(
    f: impl Fn(f64) -> f64,
    grid: &[f64],
    budget: GoldenBudget,
) -> (f64, f64) {
    assert!(!grid.is_empty());
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let mut j = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[j] || values[j].is_nan() {
            j = i;
        }
    }
    let lo = grid[j.saturating_sub(1)];
    let hi = grid[(j + 1).min(grid.len() - 1)];
    let refined = golden_max(&f, lo, hi, budget);
    if refined.1 >= values[j] {
        refined
    } else {
        (grid[j], values[j])
    }
}
