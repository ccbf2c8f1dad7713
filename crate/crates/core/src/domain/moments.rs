use serde::{Deserialize, Serialize};

/// Highest raw moment stored in a [`MomentTable`].
pub const MAX_MOMENT: usize = 6;

/// Marginal law of one coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum CoordinateLaw {
    Uniform { lo: f64, hi: f64 },
    Normal { mean: f64, sd: f64 },
}

impl CoordinateLaw {
    /// `E[x^j]`.
    pub fn raw_moment(&self, j: usize) -> f64 {
        match *self {
            CoordinateLaw::Uniform { lo, hi } => {
                let k = (j + 1) as i32;
                (hi.powi(k) - lo.powi(k)) / (k as f64 * (hi - lo))
            }
            CoordinateLaw::Normal { mean, sd } => {
                // E[x^j] = mean E[x^(j-1)] + (j-1) sd^2 E[x^(j-2)]
                let (mut prev, mut cur) = (1.0, mean);
                if j == 0 {
                    return 1.0;
                }
                for k in 2..=j {
                    let next = mean * cur + (k - 1) as f64 * sd * sd * prev;
                    prev = cur;
                    cur = next;
                }
                cur
            }
        }
    }

    /// Law of `(x - a) / (b - a)`.
    pub fn rescaled(&self, a: f64, b: f64) -> CoordinateLaw {
        let w = b - a;
        match *self {
            CoordinateLaw::Uniform { lo, hi } => CoordinateLaw::Uniform {
                lo: (lo - a) / w,
                hi: (hi - a) / w,
            },
            CoordinateLaw::Normal { mean, sd } => CoordinateLaw::Normal {
                mean: (mean - a) / w,
                sd: sd / w.abs(),
            },
        }
    }

    /// `(E[cos(w x + phi)], E[sin(w x + phi)])`.
    pub fn trig_moments(&self, w: f64, phi: f64) -> (f64, f64) {
        if w == 0.0 {
            return (phi.cos(), phi.sin());
        }
        match *self {
            CoordinateLaw::Uniform { lo, hi } => {
                let span = w * (hi - lo);
                let c = ((w * hi + phi).sin() - (w * lo + phi).sin()) / span;
                let s = ((w * lo + phi).cos() - (w * hi + phi).cos()) / span;
                (c, s)
            }
            CoordinateLaw::Normal { mean, sd } => {
                let damp = (-0.5 * w * w * sd * sd).exp();
                (damp * (w * mean + phi).cos(), damp * (w * mean + phi).sin())
            }
        }
    }
}

/// Per-dimension raw moments `E[x^j]`, `j = 0..=6`, plus the marginal laws
/// needed for trigonometric moments.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentTable {
    laws: Vec<CoordinateLaw>,
    raw: Vec<[f64; MAX_MOMENT + 1]>,
}

impl MomentTable {
    pub fn from_laws(laws: Vec<CoordinateLaw>) -> Self {
        let raw = laws
            .iter()
            .map(|law| std::array::from_fn(|j| law.raw_moment(j)))
            .collect();
        Self { laws, raw }
    }

    pub fn dim(&self) -> usize {
        self.laws.len()
    }

    /// `E[x_dim^j]` for `j <= 6`.
    pub fn raw(&self, dim: usize, j: usize) -> f64 {
        self.raw[dim][j]
    }

    pub fn law(&self, dim: usize) -> CoordinateLaw {
        self.laws[dim]
    }

    /// `(E[cos(w u + phi)], E[sin(w u + phi)])` for the box coordinate
    /// `u = (x_dim - a) / (b - a)`.
    pub fn trig(&self, dim: usize, w: f64, phi: f64, a: f64, b: f64) -> (f64, f64) {
        self.laws[dim].rescaled(a, b).trig_moments(w, phi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_box_moments() {
        let law = CoordinateLaw::Uniform { lo: -3.0, hi: 3.0 };
        assert_eq!(law.raw_moment(0), 1.0);
        assert!(law.raw_moment(1).abs() < 1e-15);
        assert!((law.raw_moment(2) - 3.0).abs() < 1e-12);
        assert!((law.raw_moment(4) - 16.2).abs() < 1e-12);
    }

    #[test]
    fn gaussian_moments() {
        let law = CoordinateLaw::Normal { mean: 1.5, sd: 2.0 };
        let (m, s2) = (1.5f64, 4.0f64);
        assert!((law.raw_moment(1) - m).abs() < 1e-12);
        assert!((law.raw_moment(2) - (m * m + s2)).abs() < 1e-12);
        assert!((law.raw_moment(3) - (m.powi(3) + 3.0 * m * s2)).abs() < 1e-12);
        let centered = CoordinateLaw::Normal { mean: 0.0, sd: 2.0 };
        assert!((centered.raw_moment(4) - 48.0).abs() < 1e-12);
        assert!((centered.raw_moment(6) - 15.0 * 64.0).abs() < 1e-9);
    }

    #[test]
    fn even_moments_nonnegative_and_zeroth_is_one() {
        let t = MomentTable::from_laws(vec![
            CoordinateLaw::Uniform { lo: -1.0, hi: 4.0 },
            CoordinateLaw::Normal { mean: -2.0, sd: 0.3 },
        ]);
        for d in 0..2 {
            assert_eq!(t.raw(d, 0), 1.0);
            for j in (0..=MAX_MOMENT).step_by(2) {
                assert!(t.raw(d, j) >= 0.0);
            }
        }
    }

    #[test]
    fn uniform_trig_closed_form() {
        // u ~ U[0,1]: E[cos(w u + phi)] = (sin(w + phi) - sin(phi)) / w
        let law = CoordinateLaw::Uniform { lo: -3.0, hi: 3.0 };
        let (w, phi) = (2.0 * std::f64::consts::PI * 3.0, -std::f64::consts::PI);
        let (c, s) = law.rescaled(-3.0, 3.0).trig_moments(w, phi);
        assert!((c - ((w + phi).sin() - phi.sin()) / w).abs() < 1e-14);
        assert!((s - (phi.cos() - (w + phi).cos()) / w).abs() < 1e-14);

        // compare against midpoint quadrature for a non-periodic frequency
        let (w, phi) = (2.5, -std::f64::consts::PI);
        let (c, s) = law.rescaled(-3.0, 3.0).trig_moments(w, phi);
        let n = 200_000;
        let (mut qc, mut qs) = (0.0, 0.0);
        for i in 0..n {
            let u = (i as f64 + 0.5) / n as f64;
            qc += (w * u + phi).cos();
            qs += (w * u + phi).sin();
        }
        assert!((c - qc / n as f64).abs() < 1e-9);
        assert!((s - qs / n as f64).abs() < 1e-9);
    }
}
