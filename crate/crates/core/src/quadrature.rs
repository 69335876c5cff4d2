//! Composite Gauss–Legendre rules for compactly supported time kernels.

use crate::scalar::Real;

// 8-point Gauss–Legendre abscissae and weights on [-1, 1].
const GL8_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

const POINTS_PER_PANEL: usize = 8;

/// Quadrature nodes and weights on `[lo, hi]` using roughly `order` points.
///
/// The interval is first cut at `breakpoints` (where the integrand may lose
/// smoothness), then each piece gets a number of 8-point panels proportional
/// to its length.
pub fn composite_nodes<T: Real>(lo: T, hi: T, breakpoints: &[T], order: usize) -> Vec<(T, T)> {
    let mut cuts = vec![lo];
    let mut inner: Vec<T> = breakpoints.iter().copied().filter(|&b| b > lo && b < hi).collect();
    inner.sort_by(|a, b| a.partial_cmp(b).unwrap());
    inner.dedup();
    cuts.extend(inner);
    cuts.push(hi);

    let total = hi - lo;
    let panels_total = (order / POINTS_PER_PANEL).max(1);
    let mut nodes = Vec::with_capacity(order + POINTS_PER_PANEL * cuts.len());
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let share = ((b - a) / total).to_f64_lossy() * panels_total as f64;
        let panels = (share.ceil() as usize).max(1);
        let h = (b - a) / T::from_usize_exact(panels);
        for p in 0..panels {
            let left = a + h * T::from_usize_exact(p);
            let mid = left + h / T::lit(2.0);
            let half = h / T::lit(2.0);
            for (&x, &wt) in GL8_NODES.iter().zip(GL8_WEIGHTS.iter()) {
                let (x, wt) = (T::lit(x), T::lit(wt));
                nodes.push((mid - half * x, half * wt));
                nodes.push((mid + half * x, half * wt));
            }
        }
    }
    nodes
}
