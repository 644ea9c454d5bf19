//! Analytic and semi-analytic ground truths: the linear-response value of
//! the self-diffusion constant, the Lifson-Jackson formula as an
//! independent oracle, the continuous generator applied to closed-form
//! observables, and a Gauss-Hermite evaluation of the discrete generator
//! for the weak-expansion residual test.

mod quadrature;

pub use quadrature::{
    closed_weights, gauss_hermite, integrate_periodic, periodic_weights, QuadRule, QuadratureGrid,
};

use crate::accept::{acceptance_probability, AcceptanceRule};
use crate::model::{total_drift_mult, DiffusionCoeff1D, Model1D, Space};
use crate::proposal::{propose, ProposalError, ProposalKind};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReferenceError {
    #[error(
        "quadrature not converged: doubling {n} points moved the result by {rel:.3e} (> {tol:.0e})"
    )]
    QuadratureNotConverged { n: usize, rel: f64, tol: f64 },
}

const CONVERGENCE_TOL: f64 = 1e-6;

fn check_converged(n: usize, coarse: f64, fine: f64) -> Result<f64, ReferenceError> {
    let rel = (fine - coarse).abs() / fine.abs().max(1e-300);
    if rel > CONVERGENCE_TOL {
        Err(ReferenceError::QuadratureNotConverged {
            n,
            rel,
            tol: CONVERGENCE_TOL,
        })
    } else {
        Ok(fine)
    }
}

/// Normalized Gibbs density `e^{-beta V}/Z` sampled on the periodic grid.
pub fn gibbs_density(model: &Model1D, rule: QuadRule, n: usize) -> Vec<f64> {
    let w = periodic_weights(rule, n);
    let mut dens: Vec<f64> = (0..n)
        .map(|i| (-model.beta * model.v(i as f64 / n as f64)).exp())
        .collect();
    let z: f64 = w.iter().zip(&dens).map(|(wi, di)| wi * di).sum();
    for d in &mut dens {
        *d /= z;
    }
    dens
}

/// Gibbs average of an observable on the torus by quadrature.
pub fn gibbs_average(model: &Model1D, grid: QuadratureGrid, f: impl Fn(f64) -> f64) -> f64 {
    let n = grid.n_points;
    let w = periodic_weights(grid.rule, n);
    let dens = gibbs_density(model, grid.rule, n);
    (0..n)
        .map(|i| w[i] * dens[i] * f(i as f64 / n as f64))
        .sum()
}

/// Linear-response value of the self-diffusion constant.
///
/// Perturbing the force by a constant `eta` tilts the invariant density to
/// `psi_eta(q) = Z_eta^{-1} e^{-beta V(q)} int_0^1 e^{beta V(q+y) - eta y} / M(q+y) dy`,
/// and the diffusion constant is
/// `D = int M dmu + lim_{eta->0} (1/eta) int F psi_eta`, evaluated here by a
/// central difference over `+eta, -eta`. The result is checked for
/// convergence by doubling the grid.
pub fn analytic_diffusion_1d(
    model: &Model1D,
    m: &DiffusionCoeff1D,
    grid: QuadratureGrid,
    eta: f64,
) -> Result<f64, ReferenceError> {
    assert!(eta > 0.0, "eta must be positive");
    assert_eq!(model.space, Space::Torus, "linear response needs a periodic model");
    let coarse = diffusion_once(model, m, grid.rule, grid.n_points, eta);
    let fine = diffusion_once(model, m, grid.rule, 2 * grid.n_points, eta);
    check_converged(grid.n_points, coarse, fine)
}

fn diffusion_once(model: &Model1D, m: &DiffusionCoeff1D, rule: QuadRule, n: usize, eta: f64) -> f64 {
    let wq = periodic_weights(rule, n);
    let wy = closed_weights(rule, n);
    let nodes: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
    // e^{beta V}/M and e^{-beta V} tabulated once; the inner integral is a
    // wrapped product of the tables against the e^{-eta y} factor
    let ebv_over_m: Vec<f64> = nodes
        .iter()
        .map(|&q| (model.beta * model.v(q)).exp() / m.value(q))
        .collect();
    let embv: Vec<f64> = nodes.iter().map(|&q| (-model.beta * model.v(q)).exp()).collect();
    let drift: Vec<f64> = nodes.iter().map(|&q| total_drift_mult(model, m, q)).collect();

    let z: f64 = wq.iter().zip(&embv).map(|(w, d)| w * d).sum();
    let int_m_dmu: f64 = (0..n).map(|i| wq[i] * embv[i] / z * m.value(nodes[i])).sum();

    let response = |eta_signed: f64| -> f64 {
        // closed rule in y: the e^{-eta y} factor is not periodic
        let decay: Vec<f64> = (0..=n)
            .map(|j| wy[j] * (-eta_signed * j as f64 / n as f64).exp())
            .collect();
        let mut num = 0.0;
        let mut norm = 0.0;
        for i in 0..n {
            let mut inner = 0.0;
            // split the wrapped index (i + j) % n into two contiguous runs
            let head = n - i;
            for j in 0..head {
                inner += decay[j] * ebv_over_m[i + j];
            }
            for j in head..=n {
                inner += decay[j] * ebv_over_m[j - head];
            }
            let psi = embv[i] * inner;
            norm += wq[i] * psi;
            num += wq[i] * drift[i] * psi;
        }
        num / norm
    };

    int_m_dmu + (response(eta) - response(-eta)) / (2.0 * eta)
}

/// Unnormalized tilted density `psi_eta` on the grid, normalized to
/// integrate to one; exposed for the invariant tests.
pub fn tilted_density(
    model: &Model1D,
    m: &DiffusionCoeff1D,
    grid: QuadratureGrid,
    eta: f64,
) -> Vec<f64> {
    let n = grid.n_points;
    let wq = periodic_weights(grid.rule, n);
    let wy = closed_weights(grid.rule, n);
    let ebv_over_m: Vec<f64> = (0..n)
        .map(|i| {
            let q = i as f64 / n as f64;
            (model.beta * model.v(q)).exp() / m.value(q)
        })
        .collect();
    let decay: Vec<f64> = (0..=n)
        .map(|j| wy[j] * (-eta * j as f64 / n as f64).exp())
        .collect();
    let mut psi: Vec<f64> = (0..n)
        .map(|i| {
            let mut inner = 0.0;
            let head = n - i;
            for j in 0..head {
                inner += decay[j] * ebv_over_m[i + j];
            }
            for j in head..=n {
                inner += decay[j] * ebv_over_m[j - head];
            }
            (-model.beta * model.v(i as f64 / n as f64)).exp() * inner
        })
        .collect();
    let z: f64 = wq.iter().zip(&psi).map(|(w, p)| w * p).sum();
    for p in &mut psi {
        *p /= z;
    }
    psi
}

/// Lifson-Jackson formula `D = 1 / (<e^{beta V}> <e^{-beta V}>)` for
/// additive noise in a periodic potential; the averages are uniform over
/// one period. Serves as an oracle independent of the linear-response
/// computation.
pub fn lifson_jackson_oracle(model: &Model1D, grid: QuadratureGrid) -> Result<f64, ReferenceError> {
    assert_eq!(model.space, Space::Torus, "Lifson-Jackson needs a periodic model");
    let once = |n: usize| -> f64 {
        let plus = integrate_periodic(grid.rule, n, |q| (model.beta * model.v(q)).exp());
        let minus = integrate_periodic(grid.rule, n, |q| (-model.beta * model.v(q)).exp());
        1.0 / (plus * minus)
    };
    check_converged(grid.n_points, once(grid.n_points), once(2 * grid.n_points))
}

/// Closed-form observables with analytic derivatives up to order 4, the
/// inputs of the generator and weak-expansion tests.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GeneratorObservable {
    /// `psi = V` itself.
    PotentialItself,
    /// `psi = V'`.
    GradPotential,
    /// `psi = sin(2 pi k q)`.
    Sin(u32),
    /// `psi = cos(2 pi k q)`.
    Cos(u32),
}

impl GeneratorObservable {
    /// `order`-th derivative of the observable at `q` (order 0 is the value).
    pub fn eval(&self, model: &Model1D, q: f64, order: usize) -> f64 {
        assert!(order <= 4, "observable derivatives stop at order 4");
        match self {
            GeneratorObservable::PotentialItself => match order {
                0 => model.potential.value(q),
                1 => model.potential.d1(q),
                2 => model.potential.d2(q),
                3 => model.potential.d3(q),
                _ => model.potential.d4(q),
            },
            GeneratorObservable::GradPotential => match order {
                0 => model.potential.d1(q),
                1 => model.potential.d2(q),
                2 => model.potential.d3(q),
                3 => model.potential.d4(q),
                _ => model.potential.d5(q),
            },
            GeneratorObservable::Sin(k) => {
                let omega = 2.0 * std::f64::consts::PI * *k as f64;
                let x = omega * q;
                let base = match order % 4 {
                    0 => x.sin(),
                    1 => x.cos(),
                    2 => -x.sin(),
                    _ => -x.cos(),
                };
                omega.powi(order as i32) * base
            }
            GeneratorObservable::Cos(k) => {
                let omega = 2.0 * std::f64::consts::PI * *k as f64;
                let x = omega * q;
                let base = match order % 4 {
                    0 => x.cos(),
                    1 => -x.sin(),
                    2 => -x.cos(),
                    _ => x.sin(),
                };
                omega.powi(order as i32) * base
            }
        }
    }
}

/// Apply the continuous generator (`order` = 1) or its square (`order` = 2)
/// to an observable at `q`.
///
/// Additive noise (`m = None`): `L psi = -beta V' psi' + psi''`.
/// Multiplicative noise: `L psi = F psi' + M psi''` with the total drift
/// `F = -beta M V' + M'`. The square is assembled by symbolic composition,
/// which needs derivatives of `psi` up to order 4 (and of `M` up to order 3).
pub fn apply_generator(
    model: &Model1D,
    m: Option<&DiffusionCoeff1D>,
    psi: GeneratorObservable,
    q: f64,
    order: u32,
) -> f64 {
    assert!(order == 1 || order == 2, "generator order must be 1 or 2");
    let beta = model.beta;
    let d = |k: usize| psi.eval(model, q, k);
    match m {
        None | Some(DiffusionCoeff1D::Unit) => {
            let l1 = -beta * model.dv(q) * d(1) + d(2);
            if order == 1 {
                return l1;
            }
            // derivatives of L psi, then L applied once more
            let lp1 = -beta * (model.d2v(q) * d(1) + model.dv(q) * d(2)) + d(3);
            let lp2 = -beta * (model.d3v(q) * d(1) + 2.0 * model.d2v(q) * d(2) + model.dv(q) * d(3))
                + d(4);
            -beta * model.dv(q) * lp1 + lp2
        }
        Some(m) => {
            let f = total_drift_mult(model, m, q);
            let l1 = f * d(1) + m.value(q) * d(2);
            if order == 1 {
                return l1;
            }
            let f1 = -beta * (m.d1(q) * model.dv(q) + m.value(q) * model.d2v(q)) + m.d2(q);
            let f2 = -beta
                * (m.d2(q) * model.dv(q) + 2.0 * m.d1(q) * model.d2v(q) + m.value(q) * model.d3v(q))
                + m.d3(q);
            let lp1 = f1 * d(1) + f * d(2) + m.d1(q) * d(2) + m.value(q) * d(3);
            let lp2 = f2 * d(1) + 2.0 * f1 * d(2) + f * d(3) + m.d2(q) * d(2)
                + 2.0 * m.d1(q) * d(3)
                + m.value(q) * d(4);
            f * lp1 + m.value(q) * lp2
        }
    }
}

/// Residual of the weak-type expansion of the discrete generator.
///
/// Evaluates `(P_dt psi - psi)/dt` by Gauss-Hermite quadrature over the
/// Gaussian increment, subtracts `a (L psi + (dt/2) L^2 psi)` with `a = 1`
/// (Metropolis) or `a = 1/2` (Barker), and returns the maximum absolute
/// residual over a 64-point position grid. The residual decays as
/// `dt^{3/2}` for Metropolis schemes and `dt^2` for Barker schemes built on
/// the midpoint or Verlet proposals.
pub fn weak_expansion_residual(
    kind: &ProposalKind,
    rule: AcceptanceRule,
    model: &Model1D,
    psi: GeneratorObservable,
    dt: f64,
    gh_points: usize,
) -> Result<f64, ProposalError> {
    assert!(gh_points >= 32, "need at least 32 Gauss-Hermite points");
    assert!(
        !kind.is_multiplicative(),
        "weak-expansion residual covers the additive-noise proposals"
    );
    let (nodes, weights) = gauss_hermite(gh_points);
    let a = match rule {
        AcceptanceRule::MetropolisHastings => 1.0,
        AcceptanceRule::Barker => 0.5,
    };
    let q_grid: Vec<f64> = match model.space {
        Space::Torus => (0..64).map(|i| i as f64 / 64.0).collect(),
        Space::Line => (0..64).map(|i| -2.0 + 4.0 * i as f64 / 63.0).collect(),
    };
    let mut worst = 0.0f64;
    for &q in &q_grid {
        let psi_q = psi.eval(model, q, 0);
        let mut p_dt = 0.0;
        for (&g, &w) in nodes.iter().zip(&weights) {
            if w == 0.0 {
                continue;
            }
            let out = propose(kind, model, q, g, dt)?;
            let acc = acceptance_probability(rule, out.alpha);
            p_dt += w * acc * (psi.eval(model, out.q_proposed, 0) - psi_q);
        }
        let expansion = a
            * (apply_generator(model, None, psi, q, 1)
                + 0.5 * dt * apply_generator(model, None, psi, q, 2));
        let residual = (p_dt / dt - expansion).abs();
        worst = worst.max(residual);
    }
    Ok(worst)
}

/// Inverse-CDF sampler for the Gibbs measure, built from a cumulative
/// trapezoid table of `e^{-beta V}` on `[lo, hi]`.
#[derive(Clone, Debug)]
pub struct GibbsSampler {
    xs: Vec<f64>,
    cdf: Vec<f64>,
}

impl GibbsSampler {
    pub fn new(model: &Model1D, lo: f64, hi: f64, n: usize) -> Self {
        assert!(hi > lo && n >= 2);
        let h = (hi - lo) / n as f64;
        let xs: Vec<f64> = (0..=n).map(|i| lo + i as f64 * h).collect();
        let dens: Vec<f64> = xs.iter().map(|&x| (-model.beta * model.v(x)).exp()).collect();
        let mut cdf = vec![0.0; n + 1];
        for i in 1..=n {
            cdf[i] = cdf[i - 1] + 0.5 * h * (dens[i - 1] + dens[i]);
        }
        let total = cdf[n];
        for c in &mut cdf {
            *c /= total;
        }
        Self { xs, cdf }
    }

    /// Sampler over one period of a torus model.
    pub fn periodic(model: &Model1D, n: usize) -> Self {
        Self::new(model, 0.0, 1.0, n)
    }

    /// Map a uniform draw to a Gibbs-distributed position by inverting the
    /// CDF table with linear interpolation.
    pub fn sample(&self, u: f64) -> f64 {
        let idx = self.cdf.partition_point(|&c| c < u);
        if idx == 0 {
            return self.xs[0];
        }
        if idx >= self.cdf.len() {
            return *self.xs.last().unwrap();
        }
        let (c0, c1) = (self.cdf[idx - 1], self.cdf[idx]);
        let t = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.0 };
        self.xs[idx - 1] + t * (self.xs[idx] - self.xs[idx - 1])
    }

    /// CDF value at `x` by table interpolation.
    pub fn cdf(&self, x: f64) -> f64 {
        let idx = self.xs.partition_point(|&v| v < x);
        if idx == 0 {
            return 0.0;
        }
        if idx >= self.xs.len() {
            return 1.0;
        }
        let (x0, x1) = (self.xs[idx - 1], self.xs[idx]);
        let t = (x - x0) / (x1 - x0);
        self.cdf[idx - 1] + t * (self.cdf[idx] - self.cdf[idx - 1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Model1D;

    fn grid() -> QuadratureGrid {
        QuadratureGrid::default()
    }

    // Series for the modified Bessel function I_0, the closed form behind
    // the cosine-model period averages.
    fn bessel_i0(x: f64) -> f64 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..40 {
            term *= (x / 2.0) * (x / 2.0) / (k as f64 * k as f64);
            sum += term;
        }
        sum
    }

    #[test]
    fn free_diffusion_reference_is_one() {
        let model = Model1D::zero(1.0);
        let d = analytic_diffusion_1d(&model, &DiffusionCoeff1D::Unit, grid(), 1e-3).unwrap();
        assert!((d - 1.0).abs() < 1e-10, "D = {d}");
        let lj = lifson_jackson_oracle(&model, grid()).unwrap();
        assert!((lj - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cosine_additive_reference_value() {
        let model = Model1D::cosine(1.0);
        let d = analytic_diffusion_1d(&model, &DiffusionCoeff1D::Unit, grid(), 1e-3).unwrap();
        assert!((d - 0.62386).abs() < 5e-5, "D = {d}");
        // independent oracle: D = 1/I_0(1)^2 via the Lifson-Jackson formula
        let lj = lifson_jackson_oracle(&model, grid()).unwrap();
        let exact = 1.0 / bessel_i0(1.0).powi(2);
        assert!((lj - exact).abs() < 1e-10, "LJ = {lj} vs 1/I0^2 = {exact}");
        assert!((d - lj).abs() < 1e-4, "LR {d} vs LJ {lj}");
    }

    #[test]
    fn cosine_multiplicative_reference_value() {
        let model = Model1D::cosine(1.0);
        let d =
            analytic_diffusion_1d(&model, &DiffusionCoeff1D::CosineSquared, grid(), 1e-3).unwrap();
        assert!((d - 0.30478).abs() < 5e-5, "D = {d}");
    }

    #[test]
    fn linear_response_stable_in_eta() {
        let model = Model1D::cosine(1.0);
        let ds: Vec<f64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&eta| analytic_diffusion_1d(&model, &DiffusionCoeff1D::Unit, grid(), eta).unwrap())
            .collect();
        let spread = ds.iter().cloned().fold(f64::MIN, f64::max)
            - ds.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread <= 1e-4, "spread {spread:.2e} over {ds:?}");
        // Richardson cross-check: halving eta moves the value only at the
        // eta^2 level
        let half =
            analytic_diffusion_1d(&model, &DiffusionCoeff1D::Unit, grid(), 5e-4).unwrap();
        assert!((half - ds[1]).abs() < 1e-6);
    }

    #[test]
    fn tilted_density_normalizes_and_recovers_gibbs() {
        let model = Model1D::cosine(1.0);
        let g = grid();
        let w = periodic_weights(g.rule, g.n_points);
        let psi = tilted_density(&model, &DiffusionCoeff1D::Unit, g, 1e-3);
        let total: f64 = w.iter().zip(&psi).map(|(wi, pi)| wi * pi).sum();
        assert!((total - 1.0).abs() < 1e-10);

        // at eta = 0 with M = 1 the y-integral is the same constant for
        // every q, so psi_0 is exactly the Gibbs density
        let psi0 = tilted_density(&model, &DiffusionCoeff1D::Unit, g, 0.0);
        let gibbs = gibbs_density(&model, g.rule, g.n_points);
        for (a, b) in psi0.iter().zip(&gibbs) {
            assert!((a - b).abs() < 1e-11 * b.max(1.0));
        }
    }

    #[test]
    fn generator_annihilates_constants_and_matches_closed_form() {
        let model = Model1D::cosine(1.0);
        // psi = V: L V = -(V')^2 + V'' for beta = 1
        for i in 0..32 {
            let q = i as f64 / 32.0;
            let lv = apply_generator(&model, None, GeneratorObservable::PotentialItself, q, 1);
            let expect = -model.dv(q) * model.dv(q) + model.d2v(q);
            assert!((lv - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn generator_averages_to_zero_against_gibbs() {
        let model = Model1D::cosine(1.0);
        let g = grid();
        let observables = [
            GeneratorObservable::PotentialItself,
            GeneratorObservable::GradPotential,
            GeneratorObservable::Sin(1),
            GeneratorObservable::Cos(2),
        ];
        for psi in observables {
            for m in [None, Some(&DiffusionCoeff1D::CosineSquared)] {
                let avg = gibbs_average(&model, g, |q| apply_generator(&model, m, psi, q, 1));
                assert!(avg.abs() < 1e-8, "{psi:?} with m = {m:?}: {avg:.2e}");
            }
        }
    }

    #[test]
    fn generator_square_matches_double_application_on_harmonics() {
        // L^2 applied to sin(2 pi q) against a finite-difference composition
        let model = Model1D::cosine(1.0);
        let psi = GeneratorObservable::Sin(1);
        let h = 1e-4;
        for i in 0..16 {
            let q = i as f64 / 16.0;
            let l2 = apply_generator(&model, None, psi, q, 2);
            let l1 = |x: f64| apply_generator(&model, None, psi, x, 1);
            // L (L psi) with L = -V' d/dq + d^2/dq^2 via central differences
            let d1 = (l1(q + h) - l1(q - h)) / (2.0 * h);
            let d2 = (l1(q + h) - 2.0 * l1(q) + l1(q - h)) / (h * h);
            let fd = -model.dv(q) * d1 + d2;
            assert!((l2 - fd).abs() < 1e-3 * l2.abs().max(1.0), "{l2} vs {fd}");
        }
    }

    #[test]
    fn generator_observable_derivatives_consistent() {
        let model = Model1D::cosine(1.3);
        let h = 1e-5;
        let observables = [
            GeneratorObservable::PotentialItself,
            GeneratorObservable::GradPotential,
            GeneratorObservable::Sin(2),
            GeneratorObservable::Cos(1),
        ];
        for psi in observables {
            for order in 0..4 {
                for i in 0..40 {
                    let q = i as f64 / 40.0;
                    let fd = (psi.eval(&model, q + h, order) - psi.eval(&model, q - h, order))
                        / (2.0 * h);
                    let exact = psi.eval(&model, q, order + 1);
                    let scale = exact.abs().max(1.0);
                    assert!(
                        (fd - exact).abs() / scale < 1e-5,
                        "{psi:?} order {order} at {q}: {fd} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn weak_expansion_residual_vanishes_for_constant_observable() {
        // a constant is in the kernel of both P_dt - I and L
        let model = Model1D::cosine(1.0);
        let r = weak_expansion_residual(
            &ProposalKind::PositionVerletHmc,
            AcceptanceRule::Barker,
            &model,
            GeneratorObservable::Cos(0),
            0.01,
            64,
        )
        .unwrap();
        assert!(r < 1e-13, "residual {r:.2e}");
    }

    #[test]
    fn weak_expansion_residual_stable_under_node_doubling() {
        // the Barker integrand is smooth, so Gauss-Hermite converges
        // spectrally; with the Metropolis kink or the midpoint solver in
        // the loop only algebraic accuracy is available
        let model = Model1D::cosine(1.0);
        for dt in [2.5e-4, 5e-4, 1e-3] {
            let coarse = weak_expansion_residual(
                &ProposalKind::PositionVerletHmc,
                AcceptanceRule::Barker,
                &model,
                GeneratorObservable::Sin(1),
                dt,
                128,
            )
            .unwrap();
            let fine = weak_expansion_residual(
                &ProposalKind::PositionVerletHmc,
                AcceptanceRule::Barker,
                &model,
                GeneratorObservable::Sin(1),
                dt,
                256,
            )
            .unwrap();
            assert!(
                (coarse - fine).abs() <= 1e-10,
                "dt = {dt}: {coarse:.14e} vs {fine:.14e}"
            );
        }
    }

    #[test]
    fn gibbs_sampler_matches_cdf() {
        let model = Model1D::quartic(1.0);
        let sampler = GibbsSampler::new(&model, -4.0, 4.0, 8192);
        // round trip: cdf(sample(u)) = u
        for i in 1..50 {
            let u = i as f64 / 50.0;
            let x = sampler.sample(u);
            assert!((sampler.cdf(x) - u).abs() < 1e-6);
        }
        assert!(sampler.sample(0.5).abs() < 1e-6, "quartic is symmetric");
    }
}
