use crate::clifford::Parity;
use crate::dp::{InitialCondition, QuditDim};
use crate::{Error, Result};

pub const MAX_MARKOV_SITES: usize = 14;

/// One layer of the particle process as a product of per-vertex kernels.
///
/// The local kernel is built by counting: an occupied vertex carries a
/// nontrivial two-site operator string, which a random gate sends to each of
/// the `q⁴ − 1` nontrivial strings with equal weight, after which each
/// output edge survives its swap independently with probability `1 − p`.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkovKernel {
    n: usize,
    /// `local[in][out]`, pairs encoded as `left | right << 1`.
    local: [[f64; 4]; 4],
}

impl MarkovKernel {
    pub fn new(n: usize, q: QuditDim, p: f64) -> Result<Self> {
        if n > MAX_MARKOV_SITES {
            return Err(Error::OracleTooLarge {
                n,
                max: MAX_MARKOV_SITES,
            });
        }
        if n < 2 || n % 2 != 0 {
            return Err(Error::InvalidSize(n));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidRate(p));
        }
        // output occupation of the gate before swaps: (both, left only, right only)
        let gate = match q.validate()? {
            QuditDim::Finite(q) => {
                let q2 = f64::from(q).powi(2);
                let total = q2 * q2 - 1.0;
                [
                    (q2 - 1.0) * (q2 - 1.0) / total,
                    (q2 - 1.0) / total,
                    (q2 - 1.0) / total,
                ]
            }
            QuditDim::Infinite => [1.0, 0.0, 0.0],
        };
        let keep = 1.0 - p;
        let mut swapped = [[0.0; 4]; 4];
        for (from, row) in swapped.iter_mut().enumerate() {
            for (to, v) in row.iter_mut().enumerate() {
                let mut w = 1.0;
                for bit in 0..2 {
                    let (f, t) = ((from >> bit) & 1, (to >> bit) & 1);
                    w *= match (f, t) {
                        (0, 0) => 1.0,
                        (0, 1) => 0.0,
                        (1, 1) => keep,
                        _ => p,
                    };
                }
                *v = w;
            }
        }
        let mut local = [[0.0; 4]; 4];
        local[0][0] = 1.0;
        for row in local.iter_mut().skip(1) {
            for to in 0..4 {
                row[to] =
                    gate[0] * swapped[3][to] + gate[1] * swapped[1][to] + gate[2] * swapped[2][to];
            }
        }
        Ok(Self { n, local })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn local(&self) -> [[f64; 4]; 4] {
        self.local
    }

    /// Transition probabilities out of `config` for a layer of `parity`.
    pub fn row(&self, config: usize, parity: Parity) -> Vec<f64> {
        let mut dist = vec![0.0; 1 << self.n];
        dist[config] = 1.0;
        self.apply(&mut dist, parity);
        dist
    }

    /// Evolves a distribution over configurations (bit `s` = site `s`) by one layer.
    pub fn apply(&self, dist: &mut Vec<f64>, parity: Parity) {
        let n = self.n;
        for m in 0..n / 2 {
            let (a, b) = parity.pair(m, n);
            let mut next = vec![0.0; dist.len()];
            for (config, &w) in dist.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let input = (config >> a & 1) | (config >> b & 1) << 1;
                let base = config & !(1 << a) & !(1 << b);
                for (out, &pr) in self.local[input].iter().enumerate() {
                    if pr != 0.0 {
                        next[base | (out & 1) << a | (out >> 1) << b] += w * pr;
                    }
                }
            }
            *dist = next;
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactCurves {
    /// Mean occupation per site.
    pub rho: Vec<f64>,
    pub surv: Vec<f64>,
}

/// Exact mean density and survival probability for `t = 0..=t_max`.
pub fn exact_density(
    n: usize,
    q: QuditDim,
    p: f64,
    init: &InitialCondition,
    t_max: usize,
) -> Result<ExactCurves> {
    let kernel = MarkovKernel::new(n, q, p)?;
    let start = init
        .occupation(n)?
        .iter_ones()
        .fold(0usize, |c, s| c | 1 << s);
    let mut dist = vec![0.0; 1 << n];
    dist[start] = 1.0;
    let mut out = ExactCurves {
        rho: Vec::with_capacity(t_max + 1),
        surv: Vec::with_capacity(t_max + 1),
    };
    for t in 0..=t_max {
        if t > 0 {
            kernel.apply(&mut dist, Parity::for_step(t - 1));
        }
        let mean: f64 = dist
            .iter()
            .enumerate()
            .map(|(c, w)| w * c.count_ones() as f64)
            .sum();
        out.rho.push(mean / n as f64);
        out.surv.push(1.0 - dist[0]);
    }
    Ok(out)
}
