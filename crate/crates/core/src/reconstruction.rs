//! Interface states and source terms that keep discrete steady states exact.
//!
//! Face `k` of the arrays below is the interior face between cells `k` and
//! `k + 1`. The two wall faces carry no flux and their interface densities
//! count as zero in the pressure source.

use crate::convolution::{Convolver, DenseMatrix};
use crate::error::{Error, Result};
use crate::free_energy::PressureLaw;
use crate::grid::{cell_velocity, Grid, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InterfaceRule {
    #[default]
    Max,
    Average,
}

pub fn interface_h(h_left: f64, h_right: f64, rule: InterfaceRule) -> f64 {
    match rule {
        InterfaceRule::Max => h_left.max(h_right),
        InterfaceRule::Average => 0.5 * (h_left + h_right),
    }
}

/// How the in-cell face values of `H` are obtained at second order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HReconstruction {
    /// Limit `Pi'(rho) + H` and subtract `Pi'` of the face density.
    #[default]
    Composite,
    /// Limit `H` itself.
    Direct,
}

/// Communication function of the alignment term.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Communication {
    #[default]
    None,
    /// `(1 + x^2)^(-1/4)`
    Standard,
    Constant(f64),
}

impl Communication {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Communication::None => 0.0,
            Communication::Standard => (1.0 + x * x).powf(-0.25),
            Communication::Constant(c) => c,
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, Communication::None | Communication::Constant(0.0))
    }
}

/// `psi_ij = psi(x_i - x_j)`.
pub fn psi_matrix(g: &Grid, psi: Communication) -> DenseMatrix {
    let x = g.centers();
    DenseMatrix::from_fn(g.len(), |i, j| psi.eval(x[i] - x[j]))
}

/// Linear damping and alignment.
#[derive(Debug, Clone)]
pub struct Damping {
    pub gamma: f64,
    alignment: Option<Convolver>,
}

impl Damping {
    pub fn new(g: &Grid, gamma: f64, psi: Communication) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "damping must be nonnegative, got {gamma}"
            )));
        }
        if let Communication::Constant(c) = psi {
            if !(c >= 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "communication must be nonnegative, got {c}"
                )));
            }
        }
        let alignment = (!psi.is_none()).then(|| {
            let x = g.centers().to_vec();
            let h = g.uniform_width().unwrap_or(0.0);
            let toe = move |d: isize| psi.eval(d as f64 * h);
            Convolver::new(g, |i, j| psi.eval(x[i] - x[j]), Some(&toe))
        });
        Ok(Damping { gamma, alignment })
    }

    pub fn none() -> Self {
        Damping {
            gamma: 0.0,
            alignment: None,
        }
    }

    pub fn has_alignment(&self) -> bool {
        self.alignment.is_some()
    }

    /// `-gamma rho_i u_i - rho_i sum_j dx_j (u_i - u_j) rho_j psi_ij`.
    pub fn source(&self, rho: &[f64], u: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = rho.iter().zip(u).map(|(r, v)| -self.gamma * r * v).collect();
        if let Some(conv) = &self.alignment {
            let flux: Vec<f64> = rho.iter().zip(u).map(|(r, v)| r * v).collect();
            let mass = conv.apply(rho);
            let mom = conv.apply(&flux);
            for i in 0..rho.len() {
                out[i] -= rho[i] * (u[i] * mass[i] - mom[i]);
            }
        }
        out
    }
}

/// Left and right states at the interior faces.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceStates {
    pub rho_minus: Vec<f64>,
    pub u_minus: Vec<f64>,
    pub rho_plus: Vec<f64>,
    pub u_plus: Vec<f64>,
    pub h: Vec<f64>,
}

impl InterfaceStates {
    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }
}

/// In-cell face values of each cell.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryValues {
    pub rho_l: Vec<f64>,
    pub rho_r: Vec<f64>,
    pub u_l: Vec<f64>,
    pub u_r: Vec<f64>,
    pub h_l: Vec<f64>,
    pub h_r: Vec<f64>,
    /// `Pi'(rho) + H` at the faces; equal to `H` on dry faces.
    pub w_l: Vec<f64>,
    pub w_r: Vec<f64>,
}

/// Momentum sources per cell; the density component is identically zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceTerms {
    /// Pressure differences at the cell's two faces.
    pub interface: Vec<f64>,
    /// In-cell correction (zero at first order).
    pub centered: Vec<f64>,
    pub damping: Vec<f64>,
}

impl SourceTerms {
    pub fn momentum(&self) -> Vec<f64> {
        (0..self.interface.len())
            .map(|i| self.interface[i] + self.centered[i] + self.damping[i])
            .collect()
    }

    pub fn density(&self) -> Vec<f64> {
        vec![0.0; self.interface.len()]
    }
}

fn check_inputs(g: &Grid, s: &State, h: &[f64]) -> Result<()> {
    s.check_grid(g)?;
    if h.len() != g.len() {
        return Err(Error::InvalidState(format!(
            "potential has {} cells, grid {}",
            h.len(),
            g.len()
        )));
    }
    Ok(())
}

#[inline]
fn chemical(law: PressureLaw, rho: f64, h: f64, eps_vac: f64) -> f64 {
    if rho > eps_vac {
        law.pi_prime_unchecked(rho) + h
    } else {
        h
    }
}

/// Piecewise-constant face values.
pub(crate) fn constant_boundary_values(s: &State, h: &[f64], law: PressureLaw, eps_vac: f64) -> BoundaryValues {
    let u: Vec<f64> = s
        .rho
        .iter()
        .zip(&s.mom)
        .map(|(r, m)| cell_velocity(*r, *m, eps_vac))
        .collect();
    let w: Vec<f64> = s
        .rho
        .iter()
        .zip(h)
        .map(|(r, hv)| chemical(law, *r, *hv, eps_vac))
        .collect();
    BoundaryValues {
        rho_l: s.rho.clone(),
        rho_r: s.rho.clone(),
        u_l: u.clone(),
        u_r: u,
        h_l: h.to_vec(),
        h_r: h.to_vec(),
        w_l: w.clone(),
        w_r: w,
    }
}

/// Well-balanced first-order interface states.
pub fn reconstruct_first_order(
    g: &Grid,
    s: &State,
    h: &[f64],
    law: PressureLaw,
    rule: InterfaceRule,
    eps_vac: f64,
) -> Result<InterfaceStates> {
    check_inputs(g, s, h)?;
    let bv = constant_boundary_values(s, h, law, eps_vac);
    Ok(interface_states(&bv, law, rule, eps_vac))
}

/// Interface states from in-cell face values.
pub fn reconstruct_second_order(
    bv: &BoundaryValues,
    law: PressureLaw,
    rule: InterfaceRule,
    eps_vac: f64,
) -> InterfaceStates {
    interface_states(bv, law, rule, eps_vac)
}

fn interface_states(bv: &BoundaryValues, law: PressureLaw, rule: InterfaceRule, eps_vac: f64) -> InterfaceStates {
    let faces = bv.rho_l.len().saturating_sub(1);
    let mut out = InterfaceStates {
        rho_minus: Vec::with_capacity(faces),
        u_minus: Vec::with_capacity(faces),
        rho_plus: Vec::with_capacity(faces),
        u_plus: Vec::with_capacity(faces),
        h: Vec::with_capacity(faces),
    };
    for k in 0..faces {
        let hf = interface_h(bv.h_r[k], bv.h_l[k + 1], rule);
        let left = if bv.rho_r[k] > eps_vac {
            law.xi(bv.w_r[k] - hf)
        } else {
            0.0
        };
        let right = if bv.rho_l[k + 1] > eps_vac {
            law.xi(bv.w_l[k + 1] - hf)
        } else {
            0.0
        };
        out.rho_minus.push(left);
        out.u_minus.push(bv.u_r[k]);
        out.rho_plus.push(right);
        out.u_plus.push(bv.u_l[k + 1]);
        out.h.push(hf);
    }
    out
}

fn pressure_at_faces(law: PressureLaw, f: &InterfaceStates, n: usize) -> (Vec<f64>, Vec<f64>) {
    // right[i]: P(rho^-) at face i+1/2; left[i]: P(rho^+) at face i-1/2
    let mut right = vec![0.0; n];
    let mut left = vec![0.0; n];
    for k in 0..f.len() {
        right[k] = law.pressure_unchecked(f.rho_minus[k]);
        left[k + 1] = law.pressure_unchecked(f.rho_plus[k]);
    }
    (right, left)
}

/// Sources of the first-order scheme.
pub fn first_order_sources(
    g: &Grid,
    s: &State,
    law: PressureLaw,
    interfaces: &InterfaceStates,
    damping: &Damping,
    eps_vac: f64,
) -> Result<SourceTerms> {
    s.check_grid(g)?;
    let n = g.len();
    let (right, left) = pressure_at_faces(law, interfaces, n);
    let interface = (0..n).map(|i| (right[i] - left[i]) / g.widths()[i]).collect();
    let u = s.velocity(eps_vac);
    Ok(SourceTerms {
        interface,
        centered: vec![0.0; n],
        damping: damping.source(&s.rho, &u),
    })
}

#[inline]
fn minmod(a: f64, b: f64) -> f64 {
    if a > 0.0 && b > 0.0 {
        a.min(b)
    } else if a < 0.0 && b < 0.0 {
        a.max(b)
    } else {
        0.0
    }
}

/// Limited slopes times half widths; zero on the two boundary cells.
fn half_increments(g: &Grid, q: &[f64]) -> Vec<f64> {
    let n = q.len();
    let x = g.centers();
    let w = g.widths();
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        let back = (q[i] - q[i - 1]) / (x[i] - x[i - 1]);
        let fwd = (q[i + 1] - q[i]) / (x[i + 1] - x[i]);
        d[i] = 0.5 * w[i] * minmod(back, fwd);
    }
    d
}

/// MUSCL face values with minmod slopes.
pub fn muscl_boundary_values(
    g: &Grid,
    s: &State,
    h: &[f64],
    law: PressureLaw,
    mode: HReconstruction,
    eps_vac: f64,
) -> Result<BoundaryValues> {
    check_inputs(g, s, h)?;
    if g.len() < 3 {
        return Err(Error::InvalidGrid("second order needs at least 3 cells".into()));
    }
    let n = g.len();
    let u: Vec<f64> = s
        .rho
        .iter()
        .zip(&s.mom)
        .map(|(r, m)| cell_velocity(*r, *m, eps_vac))
        .collect();
    let dr = half_increments(g, &s.rho);
    let du = half_increments(g, &u);
    let mut bv = BoundaryValues {
        rho_l: (0..n).map(|i| (s.rho[i] - dr[i]).max(0.0)).collect(),
        rho_r: (0..n).map(|i| (s.rho[i] + dr[i]).max(0.0)).collect(),
        u_l: (0..n).map(|i| u[i] - du[i]).collect(),
        u_r: (0..n).map(|i| u[i] + du[i]).collect(),
        h_l: vec![0.0; n],
        h_r: vec![0.0; n],
        w_l: vec![0.0; n],
        w_r: vec![0.0; n],
    };
    match mode {
        HReconstruction::Composite => {
            let w: Vec<f64> = s
                .rho
                .iter()
                .zip(h)
                .map(|(r, hv)| chemical(law, *r, *hv, eps_vac))
                .collect();
            let dw = half_increments(g, &w);
            for i in 0..n {
                bv.w_l[i] = w[i] - dw[i];
                bv.w_r[i] = w[i] + dw[i];
                bv.h_l[i] = face_potential(law, bv.rho_l[i], bv.w_l[i], h[i], eps_vac);
                bv.h_r[i] = face_potential(law, bv.rho_r[i], bv.w_r[i], h[i], eps_vac);
            }
        }
        HReconstruction::Direct => {
            let dh = half_increments(g, h);
            for i in 0..n {
                bv.h_l[i] = h[i] - dh[i];
                bv.h_r[i] = h[i] + dh[i];
                bv.w_l[i] = chemical(law, bv.rho_l[i], bv.h_l[i], eps_vac);
                bv.w_r[i] = chemical(law, bv.rho_r[i], bv.h_r[i], eps_vac);
            }
        }
    }
    Ok(bv)
}

/// `H` at a face from the limited `Pi' + H`; dry faces keep the cell value.
#[inline]
fn face_potential(law: PressureLaw, rho: f64, w: f64, h_cell: f64, eps_vac: f64) -> f64 {
    if rho > eps_vac {
        w - law.pi_prime_unchecked(rho)
    } else {
        h_cell
    }
}

/// Sources of the second-order scheme, including the in-cell correction
/// built from `rho*` at the centred potential `(H_l + H_r) / 2`.
pub fn second_order_sources(
    g: &Grid,
    s: &State,
    bv: &BoundaryValues,
    interfaces: &InterfaceStates,
    law: PressureLaw,
    damping: &Damping,
    eps_vac: f64,
) -> Result<SourceTerms> {
    s.check_grid(g)?;
    let n = g.len();
    let (right, left) = pressure_at_faces(law, interfaces, n);
    let p = |r: f64| law.pressure_unchecked(r);
    let star = |rho: f64, w: f64, hs: f64| if rho > eps_vac { law.xi(w - hs) } else { 0.0 };
    let mut interface = Vec::with_capacity(n);
    let mut centered = Vec::with_capacity(n);
    for i in 0..n {
        let dx = g.widths()[i];
        let (pl, pr) = (p(bv.rho_l[i]), p(bv.rho_r[i]));
        interface.push((right[i] - pr + pl - left[i]) / dx);
        let hs = 0.5 * (bv.h_l[i] + bv.h_r[i]);
        let sl = p(star(bv.rho_l[i], bv.w_l[i], hs));
        let sr = p(star(bv.rho_r[i], bv.w_r[i], hs));
        centered.push((pr - sr - pl + sl) / dx);
    }
    let u = s.velocity(eps_vac);
    Ok(SourceTerms {
        interface,
        centered,
        damping: damping.source(&s.rho, &u),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::E;

    const EPS: f64 = 1e-12;

    #[test]
    fn interface_rules() {
        assert_eq!(interface_h(1.0, 3.0, InterfaceRule::Max), 3.0);
        assert_eq!(interface_h(1.0, 3.0, InterfaceRule::Average), 2.0);
        assert_eq!(interface_h(0.4, 0.4, InterfaceRule::Average), 0.4);
    }

    #[test]
    fn steady_pair_gives_equal_interface_densities() {
        let g = Grid::uniform(0.0, 2.0, 2).unwrap();
        let s = State::at_rest(vec![1.0, 1.0 / E]).unwrap();
        let f = reconstruct_first_order(&g, &s, &[0.0, 1.0], PressureLaw::IdealGas, InterfaceRule::Max, EPS).unwrap();
        assert_relative_eq!(f.rho_minus[0], 1.0 / E, max_relative = 1e-15);
        assert_relative_eq!(f.rho_plus[0], 1.0 / E, max_relative = 1e-15);
    }

    #[test]
    fn flat_potential_is_identity() {
        let g = Grid::uniform(0.0, 3.0, 3).unwrap();
        let s = State::new(vec![0.3, 1.7, 0.9], vec![0.1, -0.2, 0.0]).unwrap();
        let f = reconstruct_first_order(&g, &s, &[2.0; 3], PressureLaw::IdealGas, InterfaceRule::Average, EPS).unwrap();
        for k in 0..2 {
            assert_relative_eq!(f.rho_minus[k], s.rho[k], max_relative = 1e-15);
            assert_relative_eq!(f.rho_plus[k], s.rho[k + 1], max_relative = 1e-15);
        }
        let law = PressureLaw::PowerLaw { m: 2.0 };
        let f = reconstruct_first_order(&g, &s, &[2.0; 3], law, InterfaceRule::Max, EPS).unwrap();
        assert_relative_eq!(f.rho_minus[1], 1.7, max_relative = 1e-15);
    }

    #[test]
    fn dry_cell_reconstructs_to_vacuum() {
        let g = Grid::uniform(0.0, 2.0, 2).unwrap();
        let s = State::at_rest(vec![0.0, 1.0]).unwrap();
        let law = PressureLaw::PowerLaw { m: 2.0 };
        let f = reconstruct_first_order(&g, &s, &[-5.0, 0.0], law, InterfaceRule::Average, EPS).unwrap();
        assert_eq!(f.rho_minus[0], 0.0);
    }

    #[test]
    fn linear_damping_source() {
        let g = Grid::uniform(0.0, 3.0, 3).unwrap();
        let s = State::new(vec![2.0; 3], vec![1.0; 3]).unwrap();
        let f = reconstruct_first_order(&g, &s, &[0.0; 3], PressureLaw::IdealGas, InterfaceRule::Max, EPS).unwrap();
        let d = Damping::new(&g, 1.0, Communication::None).unwrap();
        let src = first_order_sources(&g, &s, PressureLaw::IdealGas, &f, &d, EPS).unwrap();
        assert_eq!(src.damping, vec![-1.0; 3]);
        assert_eq!(src.interface[1], 0.0);
        assert_eq!(src.density(), vec![0.0; 3]);
    }

    #[test]
    fn alignment_is_antisymmetric() {
        let g = Grid::uniform(-0.5, 1.5, 2).unwrap();
        let d = Damping::new(&g, 0.0, Communication::Constant(1.0)).unwrap();
        assert_eq!(d.source(&[1.0, 1.0], &[1.0, 0.0]), vec![-1.0, 1.0]);
    }

    #[test]
    fn communication_matrix() {
        let g = Grid::from_faces(vec![0.0, 1.0, 1.0 + 3f64.sqrt() - 0.5 + 0.5]).unwrap();
        let x = g.centers();
        let m = psi_matrix(&g, Communication::Standard);
        assert_eq!(m.get(0, 0), 1.0);
        let expected = (1.0 + (x[1] - x[0]).powi(2)).powf(-0.25);
        assert_eq!(m.get(0, 1), expected);
        assert_relative_eq!(
            Communication::Standard.eval(3f64.sqrt()),
            4f64.powf(-0.25),
            max_relative = 1e-15
        );
        assert_relative_eq!(
            Communication::Standard.eval(3f64.sqrt()),
            0.707_106_781_186_547_5,
            max_relative = 1e-15
        );
        assert!(m.is_symmetric());
        let z = psi_matrix(&g, Communication::None);
        assert!((0..2).all(|i| (0..2).all(|j| z.get(i, j) == 0.0)));
    }

    #[test]
    fn muscl_linear_and_extremum() {
        let g = Grid::uniform(0.0, 5.0, 5).unwrap();
        let rho: Vec<f64> = g.centers().to_vec();
        let s = State::at_rest(rho).unwrap();
        let bv = muscl_boundary_values(&g, &s, &[0.0; 5], PressureLaw::IdealGas, HReconstruction::Direct, EPS).unwrap();
        for i in 1..4 {
            assert_relative_eq!(bv.rho_l[i], g.faces()[i], max_relative = 1e-15);
            assert_relative_eq!(bv.rho_r[i], g.faces()[i + 1], max_relative = 1e-15);
        }
        let g = Grid::uniform(0.0, 3.0, 3).unwrap();
        let s = State::at_rest(vec![1.0, 2.0, 1.0]).unwrap();
        let bv = muscl_boundary_values(&g, &s, &[0.0; 3], PressureLaw::IdealGas, HReconstruction::Direct, EPS).unwrap();
        assert_eq!((bv.rho_l[1], bv.rho_r[1]), (2.0, 2.0));
    }

    #[test]
    fn composite_reconstruction_on_steady_state() {
        let g = Grid::uniform(-2.0, 2.0, 20).unwrap();
        let law = PressureLaw::IdealGas;
        let h: Vec<f64> = g.centers().iter().map(|x| 0.5 * x * x).collect();
        let rho: Vec<f64> = h.iter().map(|v| (0.3 - v).exp()).collect();
        let s = State::at_rest(rho).unwrap();
        let bv = muscl_boundary_values(&g, &s, &h, law, HReconstruction::Composite, EPS).unwrap();
        for i in 0..20 {
            assert!((bv.w_l[i] - 0.3).abs() < 1e-15 && (bv.w_r[i] - 0.3).abs() < 1e-15);
        }
        let f = reconstruct_second_order(&bv, law, InterfaceRule::Max, EPS);
        for k in 0..f.len() {
            assert_relative_eq!(f.rho_minus[k], f.rho_plus[k], max_relative = 1e-14);
        }
    }

    #[test]
    fn centred_source_vanishes_for_flat_potential() {
        let g = Grid::uniform(0.0, 4.0, 4).unwrap();
        let s = State::at_rest(vec![0.5, 1.0, 1.5, 1.2]).unwrap();
        let law = PressureLaw::PowerLaw { m: 2.0 };
        let h = [1.0; 4];
        let bv = muscl_boundary_values(&g, &s, &h, law, HReconstruction::Direct, EPS).unwrap();
        let f = reconstruct_second_order(&bv, law, InterfaceRule::Max, EPS);
        let src = second_order_sources(&g, &s, &bv, &f, law, &Damping::none(), EPS).unwrap();
        assert!(src.centered.iter().all(|c| c.abs() < 1e-15));
    }
}
