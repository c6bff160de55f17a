//! Seeded random interval unions for sweeps, oracle tests, and optimizer
//! restarts. Everything is deterministic given the caller's generator.

use alloc::string::ToString;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::gauss::{phi, phi_inv};
use crate::sets::IntervalUnion;

/// Minimum gap between drawn endpoints; keeps components from merging.
const MIN_GAP: f64 = 1e-3;

/// Endpoints are drawn inside [-SPAN, SPAN].
const SPAN: f64 = 4.0;

struct Topology {
    left_ray: bool,
    right_ray: bool,
    components: usize,
}

fn draw_topology<R: Rng + ?Sized>(rng: &mut R, max_components: usize) -> Topology {
    let components = rng.random_range(1..=max_components.max(1));
    let mut left_ray = rng.random_range(0.0..1.0) < 0.3;
    let right_ray = rng.random_range(0.0..1.0) < 0.3;
    if components == 1 && left_ray && right_ray {
        left_ray = false;
    }
    Topology {
        left_ray,
        right_ray,
        components,
    }
}

/// Sorted interior endpoints with pairwise gaps of at least MIN_GAP, or
/// None if the draw collided.
fn draw_points<R: Rng + ?Sized>(rng: &mut R, count: usize) -> Option<Vec<f64>> {
    let mut pts: Vec<f64> = (0..count)
        .map(|_| rng.random_range(-SPAN..SPAN))
        .collect();
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite draws"));
    for w in pts.windows(2) {
        if w[1] - w[0] < MIN_GAP {
            return None;
        }
    }
    Some(pts)
}

fn assemble(topo: &Topology, pts: &[f64]) -> Vec<(f64, f64)> {
    let mut parts = Vec::with_capacity(topo.components);
    let mut i = 0usize;
    for c in 0..topo.components {
        let lo = if c == 0 && topo.left_ray {
            f64::NEG_INFINITY
        } else {
            i += 1;
            pts[i - 1]
        };
        let hi = if c + 1 == topo.components && topo.right_ray {
            f64::INFINITY
        } else {
            i += 1;
            pts[i - 1]
        };
        parts.push((lo, hi));
    }
    parts
}

fn finite_point_count(topo: &Topology) -> usize {
    2 * topo.components - usize::from(topo.left_ray) - usize::from(topo.right_ray)
}

/// A random union with up to `max_components` components, endpoints in
/// [-4, 4], each outer side a ray with probability 0.3.
pub fn random_union<R: Rng + ?Sized>(rng: &mut R, max_components: usize) -> IntervalUnion {
    loop {
        let topo = draw_topology(rng, max_components);
        if let Some(pts) = draw_points(rng, finite_point_count(&topo)) {
            let parts = assemble(&topo, &pts);
            if let Ok(s) = IntervalUnion::new(parts) {
                return s;
            }
        }
    }
}

/// A random union with Gaussian measure exactly `a`: the topology and all
/// endpoints but the last are drawn, then the final endpoint is solved by
/// the inverse CDF. Draws that cannot reach `a` are retried; 100 failures
/// in a row is an infeasibility error.
pub fn random_union_with_measure<R: Rng + ?Sized>(
    rng: &mut R,
    max_components: usize,
    a: f64,
) -> Result<IntervalUnion> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Domain(alloc::format!(
            "target measure must lie in (0,1), got {a}"
        )));
    }
    for _ in 0..100 {
        let topo = draw_topology(rng, max_components);
        let Some(pts) = draw_points(rng, finite_point_count(&topo)) else {
            continue;
        };
        let mut parts = assemble(&topo, &pts);
        let last = parts.len() - 1;
        // Mass of everything before the adjustable endpoint.
        let fixed: f64 = parts[..last].iter().map(|&(lo, hi)| phi(hi) - phi(lo)).sum();
        let (lo, hi) = parts[last];
        let need = a - fixed;
        let prev_hi = if last == 0 {
            f64::NEG_INFINITY
        } else {
            parts[last - 1].1
        };
        // A finite component grows rightward from lo; a final ray slides
        // its threshold, bounded below by the previous component.
        let room = if hi.is_finite() {
            1.0 - phi(lo)
        } else {
            1.0 - phi(prev_hi)
        };
        if need <= 1e-6 || need >= room - 1e-6 {
            continue;
        }
        if hi.is_finite() {
            let new_hi = phi_inv(phi(lo) + need)?;
            if new_hi - lo < MIN_GAP {
                continue;
            }
            parts[last] = (lo, new_hi);
        } else {
            let new_lo = phi_inv(1.0 - need)?;
            if new_lo - prev_hi < MIN_GAP {
                continue;
            }
            parts[last] = (new_lo, hi);
        }
        if let Ok(s) = IntervalUnion::new(parts) {
            return Ok(s);
        }
    }
    Err(Error::Infeasible(
        "no random set reached the target measure in 100 draws".to_string(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn draws_are_deterministic_for_a_seed() {
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            assert_eq!(random_union(&mut a, 3), random_union(&mut b, 3));
        }
    }

    #[test]
    fn component_budget_is_respected() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let s = random_union(&mut rng, 4);
            let n = s.components().len();
            assert!((1..=4).contains(&n), "got {n} components");
        }
    }

    #[test]
    fn measure_constrained_draws_hit_the_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &a in &[0.2, 0.5, 0.8] {
            for _ in 0..100 {
                let s = random_union_with_measure(&mut rng, 3, a).unwrap();
                assert!(
                    (s.measure() - a).abs() < 1e-12,
                    "measure {} vs target {a} for {s}",
                    s.measure()
                );
            }
        }
    }

    #[test]
    fn measure_target_is_validated() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(random_union_with_measure(&mut rng, 2, 0.0).is_err());
        assert!(random_union_with_measure(&mut rng, 2, 1.0).is_err());
    }
}
