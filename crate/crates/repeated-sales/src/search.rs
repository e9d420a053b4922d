//! One-dimensional maximization by coarse grid scan plus golden-section
//! refinement of the bracketing interval.
//!
//! The objectives in this crate (revenue curves, equilibrium objectives) are
//! piecewise smooth but not assumed concave, so we never start a local search
//! blind: a dense grid locates the basin, golden section polishes it. Ties on
//! the grid keep the smallest abscissa, which makes every argmax in the crate
//! deterministic and selects the infimum of a flat argmax set.

use crate::exec;

/// Grid size used by every solver unless a caller overrides it.
pub const DEFAULT_GRID: usize = 4097;

/// Default width tolerance for the golden-section bracket.
pub const DEFAULT_TOL: f64 = 1e-12;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Location and value of a one-dimensional maximum.
#[derive(Debug, Clone, Copy)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
    /// The maximizer sits on an endpoint of the search interval.
    pub at_boundary: bool,
}

/// Maximizes `f` on `[a, b]` with `grid` scan points and golden-section
/// refinement down to bracket width `tol`.
pub fn maximize<F>(f: F, a: f64, b: f64, grid: usize, tol: f64) -> Maximum
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    assert!(
        a.is_finite() && b.is_finite() && b >= a,
        "bad interval [{a}, {b}]"
    );
    if b - a <= tol {
        let mid = 0.5 * (a + b);
        return Maximum {
            x: mid,
            value: f(mid),
            at_boundary: true,
        };
    }
    let grid = grid.max(3);
    let step = (b - a) / (grid - 1) as f64;
    let xs: Vec<f64> = (0..grid)
        .map(|i| {
            if i == grid - 1 {
                b
            } else {
                a + i as f64 * step
            }
        })
        .collect();
    let values = exec::map_indexed(grid, |i| f(xs[i]));

    // First strict maximum: ties resolve to the smallest x.
    let mut best = 0usize;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }

    let lo = xs[best.saturating_sub(1)];
    let hi = xs[(best + 1).min(grid - 1)];
    let (gx, gv) = golden_max(&f, lo, hi, tol);

    // Keep the grid point when refinement cannot beat it (corner maxima);
    // on value ties prefer the smaller abscissa.
    if gv > values[best] || (gv == values[best] && gx < xs[best]) {
        Maximum {
            x: gx,
            value: gv,
            at_boundary: false,
        }
    } else {
        Maximum {
            x: xs[best],
            value: values[best],
            at_boundary: best == 0 || best == grid - 1,
        }
    }
}

fn golden_max<F>(f: &F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iter = 0usize;
    while b - a > tol && iter < 200 {
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
        iter += 1;
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Finds the leftmost `t` in `[lo, hi]` with `g(t) >= target` by bisection.
///
/// `g` must be nondecreasing up to small evaluation noise. Returns `hi` when
/// even `g(hi) < target` evaluates true at every probe.
pub fn bisect_leftmost_at_least<G>(g: G, mut lo: f64, mut hi: f64, target: f64, tol: f64) -> f64
where
    G: Fn(f64) -> f64,
{
    let mut iter = 0usize;
    while hi - lo > tol && iter < 200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
        iter += 1;
    }
    hi
}
