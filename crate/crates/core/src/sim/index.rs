//! Uniform-grid spatial index for nearest base-station queries.

/// Buckets points of a square `[-half, half]²` into cells of side `cell`.
#[derive(Debug, Clone)]
pub struct BsIndex {
    half: f64,
    cell: f64,
    side: usize,
    starts: Vec<u32>,
    items: Vec<u32>,
}

impl BsIndex {
    pub fn new(points: &[[f64; 2]], half: f64, cell: f64) -> Self {
        let side = ((2.0 * half / cell).ceil() as usize).max(1);
        let cell = 2.0 * half / side as f64;
        let mut counts = vec![0u32; side * side + 1];
        let bucket = |q: &[f64; 2]| -> usize {
            let cx = (((q[0] + half) / cell) as usize).min(side - 1);
            let cy = (((q[1] + half) / cell) as usize).min(side - 1);
            cy * side + cx
        };
        for q in points {
            counts[bucket(q) + 1] += 1;
        }
        for k in 1..counts.len() {
            counts[k] += counts[k - 1];
        }
        let starts = counts.clone();
        let mut fill = counts;
        let mut items = vec![0u32; points.len()];
        for (i, q) in points.iter().enumerate() {
            let b = bucket(q);
            items[fill[b] as usize] = i as u32;
            fill[b] += 1;
        }
        BsIndex {
            half,
            cell,
            side,
            starts,
            items,
        }
    }

    fn bucket_items(&self, cx: usize, cy: usize) -> &[u32] {
        let b = cy * self.side + cx;
        &self.items[self.starts[b] as usize..self.starts[b + 1] as usize]
    }

    /// Index and squared distance of the point nearest to `q`.
    pub fn nearest(&self, points: &[[f64; 2]], q: [f64; 2]) -> Option<(usize, f64)> {
        if points.is_empty() {
            return None;
        }
        let inside = q[0].abs() < self.half && q[1].abs() < self.half;
        if !inside {
            return brute_nearest(points, q);
        }
        let cx = (((q[0] + self.half) / self.cell) as usize).min(self.side - 1) as isize;
        let cy = (((q[1] + self.half) / self.cell) as usize).min(self.side - 1) as isize;
        let side = self.side as isize;
        let mut best = (usize::MAX, f64::INFINITY);
        let visit = |x: isize, y: isize, best: &mut (usize, f64)| {
            if x < 0 || y < 0 || x >= side || y >= side {
                return;
            }
            for &i in self.bucket_items(x as usize, y as usize) {
                let p = points[i as usize];
                let d2 = (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2);
                if d2 < best.1 {
                    *best = (i as usize, d2);
                }
            }
        };
        let mut k: isize = 0;
        loop {
            if k == 0 {
                visit(cx, cy, &mut best);
            } else {
                for x in cx - k..=cx + k {
                    visit(x, cy - k, &mut best);
                    visit(x, cy + k, &mut best);
                }
                for y in cy - k + 1..cy + k {
                    visit(cx - k, y, &mut best);
                    visit(cx + k, y, &mut best);
                }
            }
            let reach = k as f64 * self.cell;
            if best.1 <= reach * reach || k > side {
                break;
            }
            k += 1;
        }
        Some(best)
    }
}

pub fn brute_nearest(points: &[[f64; 2]], q: [f64; 2]) -> Option<(usize, f64)> {
    points
        .iter()
        .enumerate()
        .map(|(i, p)| (i, (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn agrees_with_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<[f64; 2]> = (0..400).map(|_| [rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0)]).collect();
        let index = BsIndex::new(&pts, 50.0, 5.0);
        for _ in 0..2000 {
            let q = [rng.gen_range(-60.0..60.0), rng.gen_range(-60.0..60.0)];
            let a = index.nearest(&pts, q).unwrap();
            let b = brute_nearest(&pts, q).unwrap();
            assert_eq!(a.1, b.1);
        }
    }
}
