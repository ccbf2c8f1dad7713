//! Point generators: simple (IID) sampling, Latin hypercube, scrambled
//! Halton, and importance sampling with likelihood-ratio weights.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::domain::{Distribution, Point, RngStream};
use crate::error::{Error, Result};

/// Bases for the Halton sequence; dimension `j` uses the `j`-th prime.
pub const HALTON_PRIMES: [u64; 32] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131,
];

/// Digits per coordinate used by the scrambled sequence.
pub const SCRAMBLE_DEPTH: usize = 32;

/// Upper bound (exclusive) of a randomized Halton burn-in.
pub const MAX_RANDOM_BURN_IN: u64 = 10_000;

/// How a data set is generated from the target distribution `p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SamplerSpec {
    Simple,
    LatinHypercube,
    /// Halton points mapped through `p`'s quantiles. `scramble = true` draws a
    /// fresh digit scrambling per data set; `burn_in = None` draws the burn-in
    /// uniformly from `[0, 10^4)` per data set.
    Halton {
        #[serde(default = "default_true")]
        scramble: bool,
        #[serde(default)]
        burn_in: Option<u64>,
    },
    /// Draw from `q` and weight by `p / q`.
    Importance { q: Distribution },
}

fn default_true() -> bool {
    true
}

impl SamplerSpec {
    pub fn name(&self) -> &'static str {
        match self {
            SamplerSpec::Simple => "simple",
            SamplerSpec::LatinHypercube => "latin_hypercube",
            SamplerSpec::Halton { .. } => "halton",
            SamplerSpec::Importance { .. } => "importance",
        }
    }

    /// Check the sampler against its target distribution.
    pub fn validate(&self, p: &Distribution) -> Result<()> {
        match self {
            SamplerSpec::Simple => Ok(()),
            SamplerSpec::LatinHypercube | SamplerSpec::Halton { .. } => {
                if p.is_categorical() {
                    return Err(Error::Unsupported(format!(
                        "{} sampling needs a continuous distribution",
                        self.name()
                    )));
                }
                if let SamplerSpec::Halton { .. } = self {
                    if p.dim() > HALTON_PRIMES.len() {
                        return Err(Error::TooManyDimensions {
                            requested: p.dim(),
                            max: HALTON_PRIMES.len(),
                        });
                    }
                }
                Ok(())
            }
            SamplerSpec::Importance { q } => {
                q.validate()?;
                if q.dim() != p.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: p.dim(),
                        got: q.dim(),
                    });
                }
                if !support_covers(q, p) {
                    return Err(Error::InvalidDistribution(format!(
                        "importance density {} does not cover the support of {}",
                        q.kind_name(),
                        p.kind_name()
                    )));
                }
                Ok(())
            }
        }
    }

    /// Draw `n` points for target `p`; importance sampling also returns the
    /// weights `p / q`.
    pub fn draw(
        &self,
        p: &Distribution,
        n: usize,
        rng: &mut RngStream,
    ) -> Result<(Vec<Point>, Option<Vec<f64>>)> {
        match self {
            SamplerSpec::Simple => Ok((simple_sample(p, n, rng), None)),
            SamplerSpec::LatinHypercube => {
                let u = latin_hypercube(n, p.dim(), rng);
                Ok((transform_to(&u, p)?, None))
            }
            SamplerSpec::Halton { scramble, burn_in } => {
                let seed = scramble.then(|| rng.next_u64());
                let burn = burn_in.unwrap_or_else(|| rng.below(MAX_RANDOM_BURN_IN));
                let u = halton(n, p.dim(), seed, burn)?;
                Ok((transform_to(&u, p)?, None))
            }
            SamplerSpec::Importance { q } => {
                let w = importance_sample(p, q, n, rng)?;
                Ok((w.points, Some(w.weights)))
            }
        }
    }
}

/// Whether `q > 0` wherever `p > 0` for the supported distribution pairs.
fn support_covers(q: &Distribution, p: &Distribution) -> bool {
    use Distribution::*;
    match (q, p) {
        (GaussianIid { .. }, UniformBox { .. } | ProductQuadratic { .. } | GaussianIid { .. }) => {
            true
        }
        (
            UniformBox { lo: ql, hi: qh } | ProductQuadratic { lo: ql, hi: qh },
            UniformBox { lo, hi } | ProductQuadratic { lo, hi },
        ) => (0..lo.len()).all(|i| ql[i] <= lo[i] && qh[i] >= hi[i]),
        (UniformBits { .. }, UniformBits { .. }) => true,
        _ => false,
    }
}

/// `n` IID draws from `p`.
pub fn simple_sample(p: &Distribution, n: usize, rng: &mut RngStream) -> Vec<Point> {
    (0..n).map(|_| p.sample(rng)).collect()
}

/// Latin hypercube design in `[0, 1)^d`: in every dimension each stratum
/// `[i/n, (i+1)/n)` holds exactly one point, with a uniform offset inside
/// the stratum and independent column permutations.
pub fn latin_hypercube(n: usize, d: usize, rng: &mut RngStream) -> Vec<Point> {
    let mut coords = vec![vec![0.0; d]; n];
    let scale = 1.0 / n as f64;
    for j in 0..d {
        let perm = rng.permutation(n);
        for (row, &stratum) in coords.iter_mut().zip(&perm) {
            let u = (stratum as f64 + rng.uniform()) * scale;
            // rounding can land exactly on the upper stratum edge
            row[j] = u.min((stratum as f64 + 1.0) * scale - f64::EPSILON * scale).max(stratum as f64 * scale);
        }
    }
    coords.into_iter().map(Point::from_vec_unchecked).collect()
}

/// Classic radical inverse of `index` in `base`.
pub fn radical_inverse(base: u64, mut index: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut factor = inv;
    let mut v = 0.0;
    while index > 0 {
        v += (index % base) as f64 * factor;
        index /= base;
        factor *= inv;
    }
    v
}

/// Per-base digit permutations, one per digit position.
#[derive(Clone, Debug)]
struct DigitScramble {
    perms: Vec<Vec<u64>>,
}

impl DigitScramble {
    fn new(base: u64, rng: &mut RngStream) -> Self {
        let perms = (0..SCRAMBLE_DEPTH)
            .map(|_| {
                let mut p: Vec<u64> = (0..base).collect();
                rng.shuffle(&mut p);
                p
            })
            .collect();
        Self { perms }
    }

    fn radical_inverse(&self, base: u64, mut index: u64) -> f64 {
        let inv = 1.0 / base as f64;
        let mut factor = inv;
        let mut v = 0.0;
        for perm in &self.perms {
            v += perm[(index % base) as usize] as f64 * factor;
            index /= base;
            factor *= inv;
            if factor < 1e-18 {
                break;
            }
        }
        v
    }
}

/// Halton points `burn_in + 1 ..= burn_in + n` in `(0, 1)^d`.
///
/// With `scramble_seed = None` the classic radical-inverse sequence is
/// returned; otherwise every digit position of every base is passed through
/// a seeded random permutation.
pub fn halton(n: usize, d: usize, scramble_seed: Option<u64>, burn_in: u64) -> Result<Vec<Point>> {
    if d > HALTON_PRIMES.len() {
        return Err(Error::TooManyDimensions {
            requested: d,
            max: HALTON_PRIMES.len(),
        });
    }
    if d == 0 {
        return Err(Error::InvalidData("halton needs dimension >= 1".into()));
    }
    let bases = &HALTON_PRIMES[..d];
    let scrambles: Option<Vec<DigitScramble>> = scramble_seed.map(|seed| {
        let mut rng = RngStream::new(seed);
        bases.iter().map(|&b| DigitScramble::new(b, &mut rng)).collect()
    });
    let points = (0..n as u64)
        .map(|t| {
            let index = burn_in + 1 + t;
            let coords = bases
                .iter()
                .enumerate()
                .map(|(j, &b)| match &scrambles {
                    None => radical_inverse(b, index),
                    Some(s) => {
                        let u = s[j].radical_inverse(b, index);
                        // keep strictly inside (0, 1) for quantile transforms
                        u.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
                    }
                })
                .collect();
            Point::from_vec_unchecked(coords)
        })
        .collect();
    Ok(points)
}

/// Map points of the unit cube to `p` coordinate-wise through its quantile
/// function: affine for boxes, `mu + sigma * Phi^-1(u)` for Gaussians.
pub fn transform_to(points: &[Point], p: &Distribution) -> Result<Vec<Point>> {
    match p {
        Distribution::UniformBox { .. } | Distribution::GaussianIid { .. } | Distribution::ProductQuadratic { .. } => {}
        Distribution::UniformBits { .. } => {
            return Err(Error::Unsupported(
                "cannot transform unit-cube points to bitstrings".into(),
            ))
        }
    }
    points
        .iter()
        .map(|pt| {
            if pt.dim() != p.dim() {
                return Err(Error::DimensionMismatch {
                    expected: p.dim(),
                    got: pt.dim(),
                });
            }
            let coords = pt
                .coords()
                .iter()
                .enumerate()
                .map(|(j, &u)| p.quantile(j, u))
                .collect::<Result<Vec<f64>>>()?;
            Ok(Point::from_vec_unchecked(coords))
        })
        .collect()
}

/// Points drawn from `q` with weights `p(x) / q(x)`; values are filled in by
/// the caller.
#[derive(Clone, Debug)]
pub struct WeightedPoints {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
}

pub fn importance_sample(
    p: &Distribution,
    q: &Distribution,
    n: usize,
    rng: &mut RngStream,
) -> Result<WeightedPoints> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: q.dim(),
        });
    }
    let points = simple_sample(q, n, rng);
    let weights = points
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let qd = q.density(x.coords());
            if qd > 0.0 {
                Ok(p.density(x.coords()) / qd)
            } else {
                Err(Error::ZeroProposalDensity { index: i })
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(WeightedPoints { points, weights })
}
