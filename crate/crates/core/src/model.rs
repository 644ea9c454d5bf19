//! One-dimensional potentials and diffusion coefficients with analytic
//! derivatives, the coefficients of the high-order modified proposal, and
//! the total drift of the dynamics with multiplicative noise.
//!
//! Everything here is scalar: all experiments run on either the unit torus
//! or the real line. The general-d objects of the underlying schemes (the
//! Hessian-valued `sigma`, the diffusion matrix `M`, `Id + dt*sigma`,
//! determinants and traces) all reduce to plain numbers in one dimension.
//! Potentials form a closed enum with hand-written derivatives because the
//! modified proposal needs the third derivative, and closed forms keep the
//! derivative code checkable against finite differences.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Configuration space: the unit torus `R/Z` or the real line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Space {
    /// Periodic cell `[0, 1)`.
    Torus,
    Line,
}

/// Built-in potential energy functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Potential {
    /// `V(q) = q^4` on the line.
    Quartic,
    /// `V(q) = cos(2 pi q)` on the unit torus.
    Cosine,
    /// `V = 0` (free diffusion).
    Zero,
    /// `V(q) = q^2 / 2`; test potential with a linear gradient.
    Harmonic,
}

const TWO_PI: f64 = 2.0 * PI;

impl Potential {
    pub fn value(&self, q: f64) -> f64 {
        match self {
            Potential::Quartic => q * q * q * q,
            Potential::Cosine => (TWO_PI * q).cos(),
            Potential::Zero => 0.0,
            Potential::Harmonic => 0.5 * q * q,
        }
    }

    pub fn d1(&self, q: f64) -> f64 {
        match self {
            Potential::Quartic => 4.0 * q * q * q,
            Potential::Cosine => -TWO_PI * (TWO_PI * q).sin(),
            Potential::Zero => 0.0,
            Potential::Harmonic => q,
        }
    }

    pub fn d2(&self, q: f64) -> f64 {
        match self {
            Potential::Quartic => 12.0 * q * q,
            Potential::Cosine => -TWO_PI * TWO_PI * (TWO_PI * q).cos(),
            Potential::Zero => 0.0,
            Potential::Harmonic => 1.0,
        }
    }

    pub fn d3(&self, q: f64) -> f64 {
        match self {
            Potential::Quartic => 24.0 * q,
            Potential::Cosine => TWO_PI.powi(3) * (TWO_PI * q).sin(),
            Potential::Zero => 0.0,
            Potential::Harmonic => 0.0,
        }
    }

    /// Fourth derivative; used by the generator observables, not by the
    /// proposal schemes themselves.
    pub fn d4(&self, q: f64) -> f64 {
        match self {
            Potential::Quartic => 24.0,
            Potential::Cosine => TWO_PI.powi(4) * (TWO_PI * q).cos(),
            Potential::Zero => 0.0,
            Potential::Harmonic => 0.0,
        }
    }

    pub fn d5(&self, q: f64) -> f64 {
        match self {
            Potential::Quartic => 0.0,
            Potential::Cosine => -TWO_PI.powi(5) * (TWO_PI * q).sin(),
            Potential::Zero => 0.0,
            Potential::Harmonic => 0.0,
        }
    }

    /// The space each built-in potential is naturally declared on.
    pub fn natural_space(&self) -> Space {
        match self {
            Potential::Quartic | Potential::Harmonic => Space::Line,
            Potential::Cosine | Potential::Zero => Space::Torus,
        }
    }
}

/// A one-dimensional model: potential, configuration space and inverse
/// temperature `beta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Model1D {
    pub potential: Potential,
    pub space: Space,
    pub beta: f64,
}

impl Model1D {
    /// Panics if `beta` is not strictly positive.
    pub fn new(potential: Potential, space: Space, beta: f64) -> Self {
        assert!(beta > 0.0, "inverse temperature must be positive");
        Self {
            potential,
            space,
            beta,
        }
    }

    pub fn quartic(beta: f64) -> Self {
        Self::new(Potential::Quartic, Space::Line, beta)
    }

    pub fn cosine(beta: f64) -> Self {
        Self::new(Potential::Cosine, Space::Torus, beta)
    }

    pub fn zero(beta: f64) -> Self {
        Self::new(Potential::Zero, Space::Torus, beta)
    }

    pub fn harmonic(beta: f64) -> Self {
        Self::new(Potential::Harmonic, Space::Line, beta)
    }

    /// Look up a model by its CLI name: `quartic`, `cosine`, `zero` or
    /// `harmonic`, each on its natural space.
    pub fn from_name(name: &str, beta: f64) -> Option<Self> {
        let potential = match name {
            "quartic" => Potential::Quartic,
            "cosine" => Potential::Cosine,
            "zero" => Potential::Zero,
            "harmonic" => Potential::Harmonic,
            _ => return None,
        };
        Some(Self::new(potential, potential.natural_space(), beta))
    }

    pub fn v(&self, q: f64) -> f64 {
        self.potential.value(q)
    }

    pub fn dv(&self, q: f64) -> f64 {
        self.potential.d1(q)
    }

    pub fn d2v(&self, q: f64) -> f64 {
        self.potential.d2(q)
    }

    pub fn d3v(&self, q: f64) -> f64 {
        self.potential.d3(q)
    }

    /// `[V, V', V'', V''']` truncated after `max_order` derivatives.
    ///
    /// Panics if `max_order > 3`; higher derivatives are exposed separately
    /// on [`Potential`] for the observables that need them.
    pub fn eval_potential(&self, q: f64, max_order: usize) -> Vec<f64> {
        assert!(max_order <= 3, "potential derivatives stop at order 3");
        let all = [
            self.potential.value(q),
            self.potential.d1(q),
            self.potential.d2(q),
            self.potential.d3(q),
        ];
        all[..=max_order].to_vec()
    }
}

/// Position-dependent diffusion coefficients `M(q) > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiffusionCoeff1D {
    /// `M = 1`: additive noise.
    Unit,
    /// `M(q) = ((1.5 + cos(2 pi q)) / 2)^2`, bounded below by 1/16.
    CosineSquared,
}

impl DiffusionCoeff1D {
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "unit" => Some(DiffusionCoeff1D::Unit),
            "cosine-squared" => Some(DiffusionCoeff1D::CosineSquared),
            _ => None,
        }
    }

    pub fn value(&self, q: f64) -> f64 {
        match self {
            DiffusionCoeff1D::Unit => 1.0,
            DiffusionCoeff1D::CosineSquared => {
                let half = 0.5 * (1.5 + (TWO_PI * q).cos());
                half * half
            }
        }
    }

    /// `sqrt(M(q))`, exact: the square root of the squared form.
    pub fn sqrt_value(&self, q: f64) -> f64 {
        match self {
            DiffusionCoeff1D::Unit => 1.0,
            DiffusionCoeff1D::CosineSquared => 0.5 * (1.5 + (TWO_PI * q).cos()),
        }
    }

    pub fn d1(&self, q: f64) -> f64 {
        match self {
            DiffusionCoeff1D::Unit => 0.0,
            DiffusionCoeff1D::CosineSquared => {
                -PI * (1.5 + (TWO_PI * q).cos()) * (TWO_PI * q).sin()
            }
        }
    }

    pub fn d2(&self, q: f64) -> f64 {
        match self {
            DiffusionCoeff1D::Unit => 0.0,
            DiffusionCoeff1D::CosineSquared => {
                let (s, c) = (TWO_PI * q).sin_cos();
                2.0 * PI * PI * (s * s - 1.5 * c - c * c)
            }
        }
    }

    pub fn d3(&self, q: f64) -> f64 {
        match self {
            DiffusionCoeff1D::Unit => 0.0,
            DiffusionCoeff1D::CosineSquared => {
                let (s, c) = (TWO_PI * q).sin_cos();
                2.0 * PI.powi(3) * s * (8.0 * c + 3.0)
            }
        }
    }
}

/// The scalar coefficients of the modified high-order proposal:
/// `sigma = beta V'' / 3` and `F = (beta/6) (V''' - beta V'' V')`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModifiedCoeffs {
    pub sigma: f64,
    pub f_corr: f64,
}

/// Evaluate the modified-proposal coefficients at `q`.
pub fn modified_coefficients(model: &Model1D, q: f64) -> ModifiedCoeffs {
    let beta = model.beta;
    let d1 = model.dv(q);
    let d2 = model.d2v(q);
    let d3 = model.d3v(q);
    ModifiedCoeffs {
        sigma: beta * d2 / 3.0,
        f_corr: beta / 6.0 * (d3 - beta * d2 * d1),
    }
}

/// Total drift `F(q) = -beta M(q) V'(q) + M'(q)` of the dynamics with
/// multiplicative noise (reduces to `-beta V'` for `M = 1`).
pub fn total_drift_mult(model: &Model1D, m: &DiffusionCoeff1D, q: f64) -> f64 {
    -model.beta * m.value(q) * model.dv(q) + m.d1(q)
}

/// Project a position into the space: on the torus the representative in
/// `[0, 1)` congruent to `q` mod 1, on the line the identity.
pub fn wrap_position(space: Space, q: f64) -> f64 {
    match space {
        Space::Line => q,
        Space::Torus => {
            let r = q - q.floor();
            // q - floor(q) can round up to exactly 1.0 for tiny negative q
            if r >= 1.0 {
                0.0
            } else {
                r
            }
        }
    }
}

/// Distance between two positions in the given space (shortest periodic
/// image on the torus).
pub fn distance(space: Space, a: f64, b: f64) -> f64 {
    match space {
        Space::Line => (a - b).abs(),
        Space::Torus => {
            let d = wrap_position(Space::Torus, a - b);
            d.min(1.0 - d)
        }
    }
}
