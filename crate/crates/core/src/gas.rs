//! Ideal polytropic gas: parameters, end states, conserved/primitive maps and
//! the eigenstructure of the planar flux Jacobian.
//!
//! Units are normalised so that the gas constant is `R = gamma - 1`; internal
//! energy then equals temperature, `p = (gamma - 1) rho theta`.

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gas constants and transport coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasParams {
    pub gamma: f64,
    pub mu: f64,
    pub lambda: f64,
    pub kappa: f64,
    /// Constant `A` of the entropy-pressure relation.
    pub entropy_const: f64,
}

impl GasParams {
    pub fn new(gamma: f64, mu: f64, lambda: f64, kappa: f64) -> Result<Self> {
        let g = GasParams {
            gamma,
            mu,
            lambda,
            kappa,
            entropy_const: 1.0,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 1.0) || !self.gamma.is_finite() {
            return Err(Error::Config("gamma must exceed 1".into()));
        }
        if !(self.mu > 0.0) {
            return Err(Error::Config("mu must be positive".into()));
        }
        if !(self.mu + self.lambda >= 0.0) {
            return Err(Error::Config("mu + lambda must be non-negative".into()));
        }
        if !(self.kappa > 0.0) {
            return Err(Error::Config("kappa must be positive".into()));
        }
        if !(self.entropy_const > 0.0) {
            return Err(Error::Config("entropy_const must be positive".into()));
        }
        Ok(())
    }

    /// Gas constant `R = gamma - 1`.
    #[inline]
    pub fn gas_const(&self) -> f64 {
        self.gamma - 1.0
    }

    /// Diffusion coefficient of the entropy-wave profile, `kappa / gamma`.
    #[inline]
    pub fn profile_diffusivity(&self) -> f64 {
        self.kappa / self.gamma
    }

    /// Sound speed at temperature `theta`.
    #[inline]
    pub fn sound_speed(&self, theta: f64) -> f64 {
        (self.gamma * (self.gamma - 1.0) * theta).sqrt()
    }
}

/// Far-field rest states of the contact wave.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndStates {
    pub rho_minus: f64,
    pub rho_plus: f64,
    pub theta_minus: f64,
    pub theta_plus: f64,
}

impl EndStates {
    /// Builds end states with equal pressure; `theta_plus` is derived.
    pub fn new(rho_minus: f64, theta_minus: f64, rho_plus: f64) -> Result<Self> {
        if !(rho_minus > 0.0 && rho_plus > 0.0 && theta_minus > 0.0) {
            return Err(Error::Config(
                "end-state density and temperature must be positive".into(),
            ));
        }
        Ok(EndStates {
            rho_minus,
            rho_plus,
            theta_minus,
            theta_plus: rho_minus * theta_minus / rho_plus,
        })
    }

    /// End states with `rho_plus > rho_minus` and wave strength `delta`.
    ///
    /// Solves `(rho_plus - rho_minus) + (theta_minus - theta_plus) = delta`.
    pub fn from_strength(delta: f64, rho_minus: f64, theta_minus: f64) -> Result<Self> {
        if !(delta >= 0.0) {
            return Err(Error::Config("delta must be non-negative".into()));
        }
        // With r = rho_plus: (r - rm) + tm (1 - rm / r) = delta, i.e.
        // r^2 - (rm - tm + delta) r - rm tm = 0.
        let b = rho_minus - theta_minus + delta;
        let r = 0.5 * (b + (b * b + 4.0 * rho_minus * theta_minus).sqrt());
        Self::new(rho_minus, theta_minus, r)
    }

    /// Wave strength `|rho+ - rho-| + |theta+ - theta-|`.
    pub fn delta(&self) -> f64 {
        (self.rho_plus - self.rho_minus).abs() + (self.theta_plus - self.theta_minus).abs()
    }

    /// Common far-field pressure.
    pub fn pressure(&self, gas: &GasParams) -> f64 {
        gas.gas_const() * self.rho_plus * self.theta_plus
    }

    /// Total energy density at the left rest state.
    pub fn energy_minus(&self) -> f64 {
        self.rho_minus * self.theta_minus
    }

    /// Total energy density at the right rest state.
    pub fn energy_plus(&self) -> f64 {
        self.rho_plus * self.theta_plus
    }

    /// Left-going acoustic speed at the left state (negative).
    pub fn lambda1_minus(&self, gas: &GasParams) -> f64 {
        -gas.sound_speed(self.theta_minus)
    }

    /// Right-going acoustic speed at the right state (positive).
    pub fn lambda3_plus(&self, gas: &GasParams) -> f64 {
        gas.sound_speed(self.theta_plus)
    }

    pub fn state_minus(&self) -> StatePoint {
        StatePoint::rest(self.rho_minus, self.energy_minus())
    }

    pub fn state_plus(&self) -> StatePoint {
        StatePoint::rest(self.rho_plus, self.energy_plus())
    }
}

/// Conserved variables at a point: density, momentum, total energy density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatePoint {
    pub rho: f64,
    pub m: [f64; 3],
    pub energy: f64,
}

/// Primitive variables at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Primitive {
    pub rho: f64,
    pub u: [f64; 3],
    pub theta: f64,
    pub p: f64,
}

impl StatePoint {
    pub fn new(rho: f64, m: [f64; 3], energy: f64) -> Self {
        StatePoint { rho, m, energy }
    }

    pub fn rest(rho: f64, energy: f64) -> Self {
        StatePoint {
            rho,
            m: [0.0; 3],
            energy,
        }
    }

    pub fn from_primitive(rho: f64, u: [f64; 3], theta: f64) -> Self {
        let ke = 0.5 * (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
        StatePoint {
            rho,
            m: [rho * u[0], rho * u[1], rho * u[2]],
            energy: rho * (theta + ke),
        }
    }

    /// Temperature `E/rho - |m|^2 / (2 rho^2)`.
    #[inline]
    pub fn theta(&self) -> f64 {
        let m2 = self.m[0] * self.m[0] + self.m[1] * self.m[1] + self.m[2] * self.m[2];
        self.energy / self.rho - 0.5 * m2 / (self.rho * self.rho)
    }

    pub fn primitive(&self, gas: &GasParams) -> Result<Primitive> {
        if !(self.rho > 0.0) {
            return Err(Error::Numerical(format!(
                "non-positive density {}",
                self.rho
            )));
        }
        let theta = self.theta();
        if !(theta > 0.0) {
            return Err(Error::Numerical(format!(
                "non-positive temperature {theta}"
            )));
        }
        let inv = 1.0 / self.rho;
        Ok(Primitive {
            rho: self.rho,
            u: [self.m[0] * inv, self.m[1] * inv, self.m[2] * inv],
            theta,
            p: gas.gas_const() * self.rho * theta,
        })
    }

    /// Planar conserved triple `(rho, m1, E)`.
    pub fn planar(&self) -> Vector3<f64> {
        Vector3::new(self.rho, self.m[0], self.energy)
    }

    pub fn from_planar(v: &Vector3<f64>) -> Self {
        StatePoint::new(v[0], [v[1], 0.0, 0.0], v[2])
    }
}

/// Planar flux `(m1, p + m1^2/rho, m1 (E + p)/rho)` of the triple `(rho, m1, E)`.
pub fn flux_1d(v: &Vector3<f64>, gas: &GasParams) -> Vector3<f64> {
    let (rho, m, e) = (v[0], v[1], v[2]);
    let g = gas.gamma;
    Vector3::new(
        m,
        (g - 1.0) * e + 0.5 * (3.0 - g) * m * m / rho,
        g * m * e / rho - 0.5 * (g - 1.0) * m * m * m / (rho * rho),
    )
}

/// Jacobian of [`flux_1d`].
pub fn flux_jacobian_1d(v: &Vector3<f64>, gas: &GasParams) -> Matrix3<f64> {
    let (rho, m, e) = (v[0], v[1], v[2]);
    let g = gas.gamma;
    let u = m / rho;
    Matrix3::new(
        0.0,
        1.0,
        0.0,
        -0.5 * (3.0 - g) * u * u,
        (3.0 - g) * u,
        g - 1.0,
        -g * u * e / rho + (g - 1.0) * u * u * u,
        g * e / rho - 1.5 * (g - 1.0) * u * u,
        g * u,
    )
}

/// Eigen-decomposition of the planar flux Jacobian.
///
/// Right eigenvectors are the columns of `right`, each scaled to unit density
/// component; `left = right^{-1}`, so its rows are the biorthogonal left
/// eigenvectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenStructure {
    pub lambdas: [f64; 3],
    pub left: Matrix3<f64>,
    pub right: Matrix3<f64>,
}

impl EigenStructure {
    pub fn right_vec(&self, k: usize) -> Vector3<f64> {
        self.right.column(k).into_owned()
    }

    pub fn left_vec(&self, k: usize) -> Vector3<f64> {
        self.left.row(k).transpose()
    }
}

pub fn eigenstructure_1d(v: &Vector3<f64>, gas: &GasParams) -> Result<EigenStructure> {
    let (rho, m, e) = (v[0], v[1], v[2]);
    if !(rho > 0.0) {
        return Err(Error::Numerical(format!("non-positive density {rho}")));
    }
    let u = m / rho;
    let theta = e / rho - 0.5 * u * u;
    if !(theta > 0.0) {
        return Err(Error::Numerical(format!(
            "non-hyperbolic state: temperature {theta}"
        )));
    }
    let c = gas.sound_speed(theta);
    let h = gas.gamma * theta + 0.5 * u * u;
    let right = Matrix3::new(
        1.0,
        1.0,
        1.0,
        u - c,
        u,
        u + c,
        h - u * c,
        0.5 * u * u,
        h + u * c,
    );
    let left = right
        .try_inverse()
        .ok_or_else(|| Error::Numerical("defective eigenvector matrix".into()))?;
    Ok(EigenStructure {
        lambdas: [u - c, u, u + c],
        left,
        right,
    })
}

/// Which normalisation of the left eigenvector field to differentiate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeftNormalization {
    /// Rows of the inverse of the unit-density right eigenvector matrix.
    Biorthogonal,
    /// `(gamma E/rho - 3(gamma-1) m1^2/(2 rho^2), (gamma-1) m1/rho, -1)`,
    /// available for the contact field only.
    Displayed,
}

/// Directional derivatives of an eigenvector field along its own right
/// eigenvector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructuralReport {
    pub grad_l_dot_r: Vector3<f64>,
    pub grad_r_dot_r: Vector3<f64>,
}

impl StructuralReport {
    pub fn l_norm(&self) -> f64 {
        self.grad_l_dot_r.norm()
    }

    pub fn r_norm(&self) -> f64 {
        self.grad_r_dot_r.norm()
    }
}

fn check_step(step: f64) -> Result<()> {
    if !(1e-7..=1e-3).contains(&step) {
        return Err(Error::Config(format!(
            "finite-difference step {step} outside [1e-7, 1e-3]"
        )));
    }
    Ok(())
}

/// Fourth-order central derivative of `g` along `dir` at `base`.
fn directional_derivative<F>(base: &Vector3<f64>, dir: &Vector3<f64>, step: f64, g: F) -> Result<Vector3<f64>>
where
    F: Fn(&Vector3<f64>) -> Result<Vector3<f64>>,
{
    let g0 = g(base)?;
    let mut vals = [Vector3::zeros(); 4];
    for (slot, s) in vals.iter_mut().zip([-2.0, -1.0, 1.0, 2.0]) {
        let v = g(&(base + dir * (s * step)))?;
        if v.dot(&g0) < 0.0 {
            return Err(Error::Numerical(
                "eigenvector sign flips across the difference stencil".into(),
            ));
        }
        *slot = v;
    }
    Ok((vals[0] - vals[1] * 8.0 + vals[2] * 8.0 - vals[3]) / (12.0 * step))
}

/// `grad l_k . r_k` and `grad r_k . r_k` for the planar Eulerian system.
///
/// `field` is 0, 1 or 2 for the families `u - c`, `u`, `u + c`.
pub fn structural_conditions(
    state: &StatePoint,
    gas: &GasParams,
    field: usize,
    step: f64,
    norm: LeftNormalization,
) -> Result<StructuralReport> {
    check_step(step)?;
    if field > 2 {
        return Err(Error::Config(format!("field index {field} outside 0..=2")));
    }
    if norm == LeftNormalization::Displayed && field != 1 {
        return Err(Error::Config(
            "displayed left eigenvector is defined for the contact field only".into(),
        ));
    }
    let base = state.planar();
    let es = eigenstructure_1d(&base, gas)?;
    let dir = es.right_vec(field);
    let g = gas.gamma;
    let left = |v: &Vector3<f64>| -> Result<Vector3<f64>> {
        match norm {
            LeftNormalization::Biorthogonal => Ok(eigenstructure_1d(v, gas)?.left_vec(field)),
            LeftNormalization::Displayed => {
                eigenstructure_1d(v, gas)?;
                let (rho, m, e) = (v[0], v[1], v[2]);
                Ok(Vector3::new(
                    g * e / rho - 1.5 * (g - 1.0) * m * m / (rho * rho),
                    (g - 1.0) * m / rho,
                    -1.0,
                ))
            }
        }
    };
    let right = |v: &Vector3<f64>| -> Result<Vector3<f64>> { Ok(eigenstructure_1d(v, gas)?.right_vec(field)) };
    Ok(StructuralReport {
        grad_l_dot_r: directional_derivative(&base, &dir, step, left)?,
        grad_r_dot_r: directional_derivative(&base, &dir, step, right)?,
    })
}

/// Coefficient matrix of the first-order part of the transformed
/// anti-derivative system in the variables `(Phi~, Psi~_1, W~)`.
pub fn transformed_matrix(theta: f64, gas: &GasParams) -> Matrix3<f64> {
    let g1 = gas.gamma - 1.0;
    Matrix3::new(0.0, theta, 0.0, g1, 0.0, g1, 0.0, g1 * theta, 0.0)
}

/// Diagonaliser `(L~, R~, eigenvalues)` of [`transformed_matrix`].
pub fn transformed_eigen(theta: f64, gas: &GasParams) -> Result<EigenStructure> {
    if !(theta > 0.0) {
        return Err(Error::Numerical(format!(
            "non-positive temperature {theta}"
        )));
    }
    let g = gas.gamma;
    let g1 = g - 1.0;
    let lam1 = -(g * g1 * theta).sqrt();
    let s = 1.0 / (2.0 * g).sqrt();
    let q = (g1 / g).sqrt();
    let left = Matrix3::new(
        s,
        s * lam1 / g1,
        s,
        q,
        0.0,
        -1.0 / (g * g1).sqrt(),
        s,
        -s * lam1 / g1,
        s,
    );
    let right = Matrix3::new(
        s,
        q,
        s,
        s * lam1 / theta,
        0.0,
        -s * lam1 / theta,
        g1 * s,
        -q,
        g1 * s,
    );
    Ok(EigenStructure {
        lambdas: [lam1, 0.0, -lam1],
        left,
        right,
    })
}

/// Structural conditions of the transformed system for the contact field.
///
/// The transformed eigenvectors depend on the state only through the
/// temperature; derivatives are taken along the Eulerian contact direction.
pub fn transformed_structural_conditions(
    state: &StatePoint,
    gas: &GasParams,
    step: f64,
) -> Result<StructuralReport> {
    check_step(step)?;
    let base = state.planar();
    let dir = eigenstructure_1d(&base, gas)?.right_vec(1);
    let theta_of = |v: &Vector3<f64>| v[2] / v[0] - 0.5 * v[1] * v[1] / (v[0] * v[0]);
    let left = |v: &Vector3<f64>| -> Result<Vector3<f64>> { Ok(transformed_eigen(theta_of(v), gas)?.left_vec(1)) };
    let right = |v: &Vector3<f64>| -> Result<Vector3<f64>> { Ok(transformed_eigen(theta_of(v), gas)?.right_vec(1)) };
    Ok(StructuralReport {
        grad_l_dot_r: directional_derivative(&base, &dir, step, left)?,
        grad_r_dot_r: directional_derivative(&base, &dir, step, right)?,
    })
}

/// Random admissible planar states with `rho, theta in [0.2, 5]` and
/// `u1 in [-2, 2]`.
pub fn random_states(n: usize, seed: u64) -> Vec<StatePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let rho = rng.gen_range(0.2..5.0);
            let u = rng.gen_range(-2.0..2.0);
            let theta = rng.gen_range(0.2..5.0);
            StatePoint::from_primitive(rho, [u, 0.0, 0.0], theta)
        })
        .collect()
}

/// Summary of the structural conditions of one characteristic field over a
/// set of states. Fields are numbered 1..=3.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureRow {
    pub system: &'static str,
    pub field: usize,
    pub states: usize,
    pub max_l: f64,
    pub min_l: f64,
    pub max_r: f64,
    pub left_holds: bool,
    pub right_holds: bool,
}

/// Derivatives below this norm count as vanishing in the survey table.
pub const STRUCTURE_TOL: f64 = 1e-6;

/// Structural conditions of the three Eulerian fields and of the transformed
/// contact field, evaluated at every state.
pub fn structure_survey(states: &[StatePoint], gas: &GasParams, step: f64) -> Result<Vec<StructureRow>> {
    let row = |system: &'static str, field: usize, reps: Vec<StructuralReport>| {
        let max_l = reps.iter().map(|r| r.l_norm()).fold(0.0, f64::max);
        let min_l = reps.iter().map(|r| r.l_norm()).fold(f64::INFINITY, f64::min);
        let max_r = reps.iter().map(|r| r.r_norm()).fold(0.0, f64::max);
        StructureRow {
            system,
            field,
            states: reps.len(),
            max_l,
            min_l,
            max_r,
            left_holds: max_l < STRUCTURE_TOL,
            right_holds: max_r < STRUCTURE_TOL,
        }
    };
    let mut rows = Vec::with_capacity(4);
    for field in 0..3 {
        let reps = states
            .iter()
            .map(|s| structural_conditions(s, gas, field, step, LeftNormalization::Biorthogonal))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row("eulerian", field + 1, reps));
    }
    let reps = states
        .iter()
        .map(|s| transformed_structural_conditions(s, gas, step))
        .collect::<Result<Vec<_>>>()?;
    rows.push(row("transformed", 2, reps));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn air() -> GasParams {
        GasParams::new(1.4, 0.025, 0.0, 0.05).unwrap()
    }

    #[test]
    fn rest_state_primitives() {
        let gas = GasParams::new(5.0 / 3.0, 0.1, 0.0, 0.1).unwrap();
        let p = StatePoint::rest(1.0, 1.0).primitive(&gas).unwrap();
        assert_relative_eq!(p.theta, 1.0, epsilon = 1e-15);
        assert_relative_eq!(p.p, 2.0 / 3.0, epsilon = 1e-15);
        assert_eq!(p.u, [0.0; 3]);
    }

    #[test]
    fn rejects_bad_gamma() {
        let err = GasParams::new(1.0, 0.1, 0.0, 0.1).unwrap_err();
        assert!(err.to_string().contains("gamma must exceed 1"));
    }

    #[test]
    fn rejects_negative_temperature() {
        let s = StatePoint::new(1.0, [2.0, 0.0, 0.0], 1.0);
        assert!(matches!(s.primitive(&air()), Err(Error::Numerical(_))));
        assert!(eigenstructure_1d(&s.planar(), &air()).is_err());
    }

    #[test]
    fn end_states_share_pressure() {
        let gas = air();
        let e = EndStates::from_strength(0.05, 1.0, 1.0).unwrap();
        assert_relative_eq!(e.delta(), 0.05, epsilon = 1e-14);
        assert_relative_eq!(
            e.rho_minus * e.theta_minus,
            e.rho_plus * e.theta_plus,
            epsilon = 1e-15
        );
        assert!(e.rho_plus > e.rho_minus);
        assert_relative_eq!(e.energy_minus(), e.energy_plus(), epsilon = 1e-15);
        assert_relative_eq!(e.pressure(&gas), 0.4, epsilon = 1e-14);
    }

    #[test]
    fn jacobian_matches_flux_difference() {
        let gas = air();
        let v = Vector3::new(1.2, 0.3, 2.1);
        let a = flux_jacobian_1d(&v, &gas);
        let h = 1e-6;
        for j in 0..3 {
            let mut e = Vector3::zeros();
            e[j] = h;
            let d = (flux_1d(&(v + e), &gas) - flux_1d(&(v - e), &gas)) / (2.0 * h);
            for i in 0..3 {
                assert_relative_eq!(a[(i, j)], d[i], epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn rest_state_eigenstructure() {
        let gas = air();
        let e = EndStates::from_strength(0.05, 1.0, 1.0).unwrap();
        let v = e.state_minus().planar();
        let es = eigenstructure_1d(&v, &gas).unwrap();
        let l1 = -(gas.gamma * (gas.gamma - 1.0) * e.energy_minus() / e.rho_minus).sqrt();
        assert_relative_eq!(es.lambdas[0], l1, epsilon = 1e-14);
        assert_relative_eq!(es.lambdas[0], e.lambda1_minus(&gas), epsilon = 1e-14);
        let r1 = es.right_vec(0);
        assert_relative_eq!(r1[1], l1, epsilon = 1e-14);
        assert_relative_eq!(r1[2], l1 * l1 / (gas.gamma - 1.0), epsilon = 1e-14);
        let a = flux_jacobian_1d(&v, &gas);
        let expected = Matrix3::new(
            0.0,
            1.0,
            0.0,
            0.0,
            0.0,
            gas.gamma - 1.0,
            0.0,
            gas.gamma * e.energy_minus() / e.rho_minus,
            0.0,
        );
        assert_relative_eq!(a, expected, epsilon = 1e-14);
    }

    #[test]
    fn eigen_decomposition_diagonalises() {
        let gas = air();
        let v = Vector3::new(0.9, -0.4, 1.7);
        let es = eigenstructure_1d(&v, &gas).unwrap();
        let a = flux_jacobian_1d(&v, &gas);
        let d = es.left * a * es.right;
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { es.lambdas[i] } else { 0.0 };
                assert!((d[(i, j)] - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn contact_field_structure() {
        let gas = air();
        let s = StatePoint::new(1.1, [0.3, 0.0, 0.0], 1.4);
        let rep = structural_conditions(&s, &gas, 1, 1e-5, LeftNormalization::Biorthogonal).unwrap();
        assert!(rep.r_norm() < 1e-8);
        assert!(rep.l_norm() > 1e-3);
        let disp = structural_conditions(&s, &gas, 1, 1e-5, LeftNormalization::Displayed).unwrap();
        assert!(disp.l_norm() > 1e-3);
    }

    #[test]
    fn structural_step_validated() {
        let s = StatePoint::rest(1.0, 1.0);
        assert!(structural_conditions(&s, &air(), 1, 1e-2, LeftNormalization::Biorthogonal).is_err());
        assert!(structural_conditions(&s, &air(), 3, 1e-5, LeftNormalization::Biorthogonal).is_err());
    }

    #[test]
    fn transformed_diagonaliser() {
        let gas = air();
        let theta = 0.83;
        let es = transformed_eigen(theta, &gas).unwrap();
        let a = transformed_matrix(theta, &gas);
        assert!((es.left * es.right - Matrix3::identity()).abs().max() < 1e-14);
        let d = es.left * a * es.right;
        let want = Matrix3::from_diagonal(&Vector3::from(es.lambdas));
        assert!((d - want).abs().max() < 1e-14);
    }

    #[test]
    fn transformed_contact_structure_vanishes() {
        let gas = air();
        let s = StatePoint::new(1.1, [0.3, 0.0, 0.0], 1.4);
        let rep = transformed_structural_conditions(&s, &gas, 1e-5).unwrap();
        assert!(rep.l_norm() < 1e-10 && rep.r_norm() < 1e-10);
    }

    #[test]
    fn survey_flags_eulerian_contact_left_condition() {
        let gas = air();
        let rows = structure_survey(&random_states(20, 3), &gas, 1e-5).unwrap();
        let e2 = rows.iter().find(|r| r.system == "eulerian" && r.field == 2).unwrap();
        assert!(!e2.left_holds && e2.right_holds);
        let t2 = rows.iter().find(|r| r.system == "transformed").unwrap();
        assert!(t2.left_holds && t2.right_holds);
    }
}
