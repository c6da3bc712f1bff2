use num_complex::Complex64;

const MAX_CELLS_PER_AXIS: usize = 1024;
const MIN_RELATIVE_CELL: f64 = 1e-12;

/// Uniform bucket grid over a point set for nearest-neighbour and
/// fixed-radius queries.
#[derive(Debug, Clone)]
pub struct GridIndex {
    points: Vec<Complex64>,
    x0: f64,
    y0: f64,
    cell: f64,
    nx: usize,
    ny: usize,
    starts: Vec<usize>,
    order: Vec<usize>,
}

impl GridIndex {
    pub fn new(points: &[Complex64]) -> Self {
        assert!(!points.is_empty(), "grid index over an empty set");
        let (x0, y0, x1, y1) = points.iter().fold(
            (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
            |(a, b, c, d), z| (a.min(z.re), b.min(z.im), c.max(z.re), d.max(z.im)),
        );
        let (w, h) = (x1 - x0, y1 - y0);
        let n = points.len() as f64;
        let mut cell = if w > 0.0 && h > 0.0 {
            (w * h / n).sqrt()
        } else {
            w.max(h) / n
        };
        let longest = w.max(h);
        if longest > 0.0 {
            cell = cell.max(longest / MAX_CELLS_PER_AXIS as f64);
        }
        let magnitude = [x0, y0, x1, y1].iter().fold(0.0f64, |m, v| m.max(v.abs()));
        cell = cell.max(MIN_RELATIVE_CELL * magnitude);
        if cell <= 0.0 || !cell.is_finite() {
            cell = 1.0;
        }
        let nx = ((w / cell).floor() as usize + 1).min(MAX_CELLS_PER_AXIS + 1);
        let ny = ((h / cell).floor() as usize + 1).min(MAX_CELLS_PER_AXIS + 1);

        let cell_of = |z: &Complex64| {
            let i = (((z.re - x0) / cell) as usize).min(nx - 1);
            let j = (((z.im - y0) / cell) as usize).min(ny - 1);
            j * nx + i
        };
        let mut counts = vec![0usize; nx * ny + 1];
        for z in points {
            counts[cell_of(z) + 1] += 1;
        }
        for k in 1..counts.len() {
            counts[k] += counts[k - 1];
        }
        let starts = counts.clone();
        let mut fill = counts;
        let mut order = vec![0; points.len()];
        for (idx, z) in points.iter().enumerate() {
            let c = cell_of(z);
            order[fill[c]] = idx;
            fill[c] += 1;
        }
        GridIndex {
            points: points.to_vec(),
            x0,
            y0,
            cell,
            nx,
            ny,
            starts,
            order,
        }
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    fn clamped_cell(&self, z: Complex64) -> (isize, isize) {
        let fx = ((z.re - self.x0) / self.cell).floor();
        let fy = ((z.im - self.y0) / self.cell).floor();
        (
            fx.clamp(0.0, (self.nx - 1) as f64) as isize,
            fy.clamp(0.0, (self.ny - 1) as f64) as isize,
        )
    }

    fn bucket(&self, i: isize, j: isize) -> &[usize] {
        if i < 0 || j < 0 || i >= self.nx as isize || j >= self.ny as isize {
            return &[];
        }
        let c = j as usize * self.nx + i as usize;
        &self.order[self.starts[c]..self.starts[c + 1]]
    }

    /// Visits the cells at Chebyshev distance exactly `ring` around `(ci, cj)`.
    fn for_ring(&self, ci: isize, cj: isize, ring: isize, mut f: impl FnMut(usize)) {
        if ring == 0 {
            self.bucket(ci, cj).iter().for_each(|&k| f(k));
            return;
        }
        for di in -ring..=ring {
            for &dj in &[-ring, ring] {
                self.bucket(ci + di, cj + dj).iter().for_each(|&k| f(k));
            }
        }
        for dj in (-ring + 1)..ring {
            for &di in &[-ring, ring] {
                self.bucket(ci + di, cj + dj).iter().for_each(|&k| f(k));
            }
        }
    }

    /// Lower bound on the distance from `z` to any cell outside the rings
    /// `0..ring` around `(ci, cj)`; infinite once those rings cover the grid.
    fn unvisited_bound(&self, z: Complex64, ci: isize, cj: isize, ring: isize) -> f64 {
        let r = ring - 1;
        let (lo_i, hi_i, lo_j, hi_j) = (ci - r, ci + r, cj - r, cj + r);
        let mut bound = f64::INFINITY;
        if lo_i > 0 {
            bound = bound.min((z.re - (self.x0 + lo_i as f64 * self.cell)).max(0.0));
        }
        if hi_i < self.nx as isize - 1 {
            bound = bound.min((self.x0 + (hi_i + 1) as f64 * self.cell - z.re).max(0.0));
        }
        if lo_j > 0 {
            bound = bound.min((z.im - (self.y0 + lo_j as f64 * self.cell)).max(0.0));
        }
        if hi_j < self.ny as isize - 1 {
            bound = bound.min((self.y0 + (hi_j + 1) as f64 * self.cell - z.im).max(0.0));
        }
        bound
    }

    fn nearest_impl(&self, z: Complex64, skip: Option<usize>) -> (usize, f64) {
        let (ci, cj) = self.clamped_cell(z);
        let max_ring = self.nx.max(self.ny) as isize;
        let mut best = (usize::MAX, f64::INFINITY);
        for ring in 0..=max_ring {
            if ring > 0 && best.1 <= self.unvisited_bound(z, ci, cj, ring) {
                break;
            }
            self.for_ring(ci, cj, ring, |k| {
                if Some(k) == skip {
                    return;
                }
                let d = (self.points[k] - z).norm();
                if d < best.1 || (d == best.1 && k < best.0) {
                    best = (k, d);
                }
            });
        }
        best
    }

    /// Index of and distance to the nearest indexed point.
    pub fn nearest(&self, z: Complex64) -> (usize, f64) {
        self.nearest_impl(z, None)
    }

    /// Nearest indexed point other than the one at `skip`.
    pub fn nearest_excluding(&self, z: Complex64, skip: usize) -> (usize, f64) {
        self.nearest_impl(z, Some(skip))
    }

    pub fn distance(&self, z: Complex64) -> f64 {
        self.nearest(z).1
    }

    /// Whether some indexed point lies in the closed disk of radius `r`.
    pub fn any_within(&self, z: Complex64, r: f64) -> bool {
        let (ci, cj) = self.clamped_cell(z);
        let reach = (r / self.cell).ceil() as isize + 1;
        let max_ring = self.nx.max(self.ny) as isize;
        let mut found = false;
        for ring in 0..=reach.min(max_ring) {
            if ring > 0 && self.unvisited_bound(z, ci, cj, ring) > r {
                break;
            }
            self.for_ring(ci, cj, ring, |k| {
                if !found && (self.points[k] - z).norm() <= r {
                    found = true;
                }
            });
            if found {
                return true;
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_nearest(points: &[Complex64], z: Complex64) -> f64 {
        points.iter().map(|p| (p - z).norm()).fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn agrees_with_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let points: Vec<Complex64> = (0..500)
            .map(|_| Complex64::new(rng.random::<f64>() * 3.0, rng.random::<f64>() * 0.5))
            .collect();
        let index = GridIndex::new(&points);
        for _ in 0..300 {
            let z = Complex64::new(rng.random::<f64>() * 6.0 - 1.5, rng.random::<f64>() * 3.0 - 1.0);
            let d = brute_nearest(&points, z);
            assert!((index.distance(z) - d).abs() < 1e-14);
            assert!(index.any_within(z, d + 1e-12));
            assert!(!index.any_within(z, d * 0.999 - 1e-12) || d == 0.0);
        }
    }

    #[test]
    fn collinear_and_repeated_points() {
        let points = vec![Complex64::new(0.0, 0.0); 5];
        let index = GridIndex::new(&points);
        assert_eq!(index.distance(Complex64::new(3.0, 4.0)), 5.0);
        let line: Vec<Complex64> = (0..50).map(|k| Complex64::new(k as f64, 0.0)).collect();
        let index = GridIndex::new(&line);
        assert!((index.distance(Complex64::new(10.4, 1.0)) - 0.4f64.hypot(1.0)).abs() < 1e-12);
    }
}
