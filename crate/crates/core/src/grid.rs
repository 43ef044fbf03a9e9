//! One-dimensional cell partition and the conserved state `(rho, rho u)`.

use crate::error::{Error, Result};

/// Densities at or below this value are treated as dry cells.
pub const DEFAULT_EPS_VAC: f64 = 1e-12;

/// A 1D partition into cells `[faces[i], faces[i+1]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    faces: Vec<f64>,
    centers: Vec<f64>,
    widths: Vec<f64>,
    uniform: bool,
}

impl Grid {
    /// `n` equal cells on `[a, b]`.
    ///
    /// Faces are computed as `(a (n - i) + b i) / n`, so a domain symmetric
    /// about zero yields an exactly antisymmetric set of faces and centers.
    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a >= b {
            return Err(Error::InvalidGrid(format!("need a < b, got [{a}, {b}]")));
        }
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 cells, got {n}")));
        }
        let nf = n as f64;
        let faces: Vec<f64> = (0..=n)
            .map(|i| {
                if i == 0 {
                    a
                } else if i == n {
                    b
                } else {
                    (a * (n - i) as f64 + b * i as f64) / nf
                }
            })
            .collect();
        let centers = faces.windows(2).map(|f| 0.5 * (f[0] + f[1])).collect();
        let widths = vec![(b - a) / nf; n];
        Ok(Grid {
            faces,
            centers,
            widths,
            uniform: true,
        })
    }

    /// A possibly nonuniform grid from strictly increasing faces.
    pub fn from_faces(faces: Vec<f64>) -> Result<Self> {
        if faces.len() < 3 {
            return Err(Error::InvalidGrid("need at least 2 cells".into()));
        }
        if faces.iter().any(|f| !f.is_finite()) {
            return Err(Error::InvalidGrid("non-finite face position".into()));
        }
        if faces.windows(2).any(|f| f[1] <= f[0]) {
            return Err(Error::InvalidGrid("faces must be strictly increasing".into()));
        }
        let centers = faces.windows(2).map(|f| 0.5 * (f[0] + f[1])).collect();
        let widths: Vec<f64> = faces.windows(2).map(|f| f[1] - f[0]).collect();
        let w0 = widths[0];
        let uniform = widths.iter().all(|w| (w - w0).abs() <= 1e-14 * w0);
        Ok(Grid {
            faces,
            centers,
            widths,
            uniform,
        })
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn faces(&self) -> &[f64] {
        &self.faces
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    /// Common cell width when the grid is uniform.
    pub fn uniform_width(&self) -> Option<f64> {
        self.uniform.then(|| self.widths[0])
    }

    pub fn min_width(&self) -> f64 {
        self.widths.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn lower(&self) -> f64 {
        self.faces[0]
    }

    pub fn upper(&self) -> f64 {
        self.faces[self.faces.len() - 1]
    }

    /// Index of the cell containing `x`, or `None` outside the domain.
    pub fn locate(&self, x: f64) -> Option<usize> {
        if x < self.lower() || x > self.upper() {
            return None;
        }
        let n = self.len();
        let idx = match self.uniform_width() {
            Some(h) => ((x - self.lower()) / h).floor() as usize,
            None => self.faces.partition_point(|&f| f <= x).saturating_sub(1),
        };
        // rounding can push the computed index one cell off near faces
        let mut i = idx.min(n - 1);
        while i > 0 && x < self.faces[i] {
            i -= 1;
        }
        while i + 1 < n && x >= self.faces[i + 1] {
            i += 1;
        }
        Some(i)
    }
}

/// Shorthand for [`Grid::uniform`].
pub fn make_uniform_grid(a: f64, b: f64, n: usize) -> Result<Grid> {
    Grid::uniform(a, b, n)
}

/// Cell averages of density and momentum at a given time.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub rho: Vec<f64>,
    pub mom: Vec<f64>,
    pub time: f64,
}

impl State {
    pub fn new(rho: Vec<f64>, mom: Vec<f64>) -> Result<Self> {
        if rho.len() != mom.len() {
            return Err(Error::InvalidState(format!(
                "density has {} cells, momentum {}",
                rho.len(),
                mom.len()
            )));
        }
        if let Some((i, r)) = rho.iter().enumerate().find(|(_, r)| !(**r >= 0.0)) {
            return Err(Error::InvalidState(format!("density {r} at cell {i}")));
        }
        if mom.iter().any(|m| !m.is_finite()) {
            return Err(Error::InvalidState("non-finite momentum".into()));
        }
        let mut mom = mom;
        for (m, r) in mom.iter_mut().zip(&rho) {
            if *r == 0.0 {
                *m = 0.0;
            }
        }
        Ok(State { rho, mom, time: 0.0 })
    }

    /// Density profile with zero momentum.
    pub fn at_rest(rho: Vec<f64>) -> Result<Self> {
        let n = rho.len();
        State::new(rho, vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn velocity(&self, eps_vac: f64) -> CellVelocity {
        velocity(self, eps_vac)
    }

    pub(crate) fn check_grid(&self, grid: &Grid) -> Result<()> {
        if self.len() != grid.len() {
            return Err(Error::InvalidState(format!(
                "state has {} cells, grid {}",
                self.len(),
                grid.len()
            )));
        }
        Ok(())
    }
}

/// Per-cell velocity; zero on dry cells.
#[derive(Debug, Clone, PartialEq)]
pub struct CellVelocity(pub Vec<f64>);

impl std::ops::Deref for CellVelocity {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

pub fn velocity(s: &State, eps_vac: f64) -> CellVelocity {
    CellVelocity(
        s.rho
            .iter()
            .zip(&s.mom)
            .map(|(&r, &m)| cell_velocity(r, m, eps_vac))
            .collect(),
    )
}

#[inline]
pub(crate) fn cell_velocity(rho: f64, mom: f64, eps_vac: f64) -> f64 {
    if rho > eps_vac {
        mom / rho
    } else {
        0.0
    }
}

/// `sum_i dx_i rho_i`.
pub fn total_mass(g: &Grid, s: &State) -> f64 {
    weighted_sum(g.widths(), &s.rho)
}

/// Compensated (Neumaier) sum of `w_i v_i`.
pub(crate) fn weighted_sum(w: &[f64], v: &[f64]) -> f64 {
    compensated_sum(w.iter().zip(v).map(|(a, b)| a * b))
}

pub(crate) fn compensated_sum(terms: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for t in terms {
        let next = sum + t;
        if sum.abs() >= t.abs() {
            carry += (sum - next) + t;
        } else {
            carry += (t - next) + sum;
        }
        sum = next;
    }
    sum + carry
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn uniform_grid_on_symmetric_domain() {
        let g = make_uniform_grid(-5.0, 5.0, 50).unwrap();
        assert_eq!(g.len(), 50);
        for w in g.widths() {
            assert_eq!(*w, 0.2);
        }
        assert_relative_eq!(g.centers()[0], -4.9, epsilon = 1e-14);
        assert_relative_eq!(g.centers()[49], 4.9, epsilon = 1e-14);
        for i in 0..50 {
            assert_eq!(g.centers()[i], -g.centers()[49 - i]);
        }
    }

    #[test]
    fn moving_wave_domain() {
        let g = make_uniform_grid(-8.0, 9.0, 100).unwrap();
        assert_relative_eq!(g.widths()[0], 0.17, epsilon = 1e-15);
        assert_eq!(g.faces()[100], 9.0);
    }

    #[test]
    fn smallest_grid() {
        let g = make_uniform_grid(0.0, 1.0, 2).unwrap();
        assert_eq!(g.faces(), &[0.0, 0.5, 1.0]);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(make_uniform_grid(0.0, 1.0, 1).is_err());
        assert!(make_uniform_grid(1.0, 1.0, 10).is_err());
        assert!(make_uniform_grid(2.0, 1.0, 10).is_err());
        assert!(Grid::from_faces(vec![0.0, 0.5, 0.5]).is_err());
    }

    #[test]
    fn nonuniform_grid_invariants() {
        let g = Grid::from_faces(vec![0.0, 0.1, 0.35, 0.9, 1.0]).unwrap();
        assert!(g.uniform_width().is_none());
        for i in 0..g.len() {
            assert!(g.widths()[i] > 0.0);
            assert_eq!(g.centers()[i], 0.5 * (g.faces()[i] + g.faces()[i + 1]));
        }
        assert_eq!(g.locate(0.36), Some(2));
        assert_eq!(g.locate(1.0), Some(3));
        assert_eq!(g.locate(1.01), None);
    }

    #[test]
    fn masses() {
        for n in [2, 7, 50, 1000] {
            let g = make_uniform_grid(-3.0, 4.5, n).unwrap();
            let s = State::at_rest(vec![1.0; n]).unwrap();
            assert_relative_eq!(total_mass(&g, &s), 7.5, max_relative = 1e-14);
            let z = State::at_rest(vec![0.0; n]).unwrap();
            assert_eq!(total_mass(&g, &z), 0.0);
        }
        let g = make_uniform_grid(0.0, 1.0, 13).unwrap();
        let s = State::at_rest(vec![1.0; 13]).unwrap();
        assert_relative_eq!(total_mass(&g, &s), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn velocity_conventions() {
        let s = State::new(vec![2.0, 0.0, 1e-16], vec![1.0, 0.0, 1e-16]).unwrap();
        let u = velocity(&s, DEFAULT_EPS_VAC);
        assert_eq!(u.0, vec![0.5, 0.0, 0.0]);
    }

    #[test]
    fn vacuum_momentum_is_dropped() {
        let s = State::new(vec![0.0, 1.0], vec![3.0, 1.0]).unwrap();
        assert_eq!(s.mom, vec![0.0, 1.0]);
        assert!(State::new(vec![-1.0], vec![0.0]).is_err());
        assert!(State::new(vec![1.0], vec![0.0, 1.0]).is_err());
    }
}
