//! The particle process on the tilted square lattice.
//!
//! Particles live on edges (the `N` sites of the ring between two gate
//! layers). A gate vertex with at least one occupied input edge emits
//! particles onto both, the left, the right, or neither output edge with
//! the probabilities of [`branching_probs`]. For `q = 2` this is exactly the
//! law of the occupation numbers of a swapped-out random Clifford circuit.

use rand::Rng;

use crate::bits::BitMask;
use crate::clifford::Parity;
use crate::{Error, Result};

/// Local Hilbert-space dimension of the qudits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QuditDim {
    Finite(u32),
    /// The bond-DP limit: both output edges open independently.
    Infinite,
}

impl QuditDim {
    pub fn validate(self) -> Result<Self> {
        match self {
            QuditDim::Finite(q) if q < 2 => Err(Error::InvalidDimension(q)),
            _ => Ok(self),
        }
    }
}

impl std::fmt::Display for QuditDim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QuditDim::Finite(q) => write!(f, "{q}"),
            QuditDim::Infinite => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for QuditDim {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "infinite" => Ok(QuditDim::Infinite),
            other => other
                .parse::<u32>()
                .map_err(|_| Error::Invalid(format!("invalid qudit dimension {other:?}")))
                .and_then(|q| QuditDim::Finite(q).validate()),
        }
    }
}

/// Outcome probabilities of an occupied vertex.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchingParams {
    pub q: QuditDim,
    pub p: f64,
    pub p_both: f64,
    pub p_left: f64,
    pub p_right: f64,
    pub p_none: f64,
}

/// Vertex outcome probabilities for local dimension `q` and swap rate `p`.
pub fn branching_probs(q: QuditDim, p: f64) -> Result<BranchingParams> {
    q.validate()?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidRate(p));
    }
    // fraction of nontrivial two-site strings supported on both sites, and on one given site
    let (both, one) = match q {
        QuditDim::Finite(q) => {
            let q2 = f64::from(q) * f64::from(q);
            ((q2 - 1.0) / (q2 + 1.0), 1.0 / (q2 + 1.0))
        }
        QuditDim::Infinite => (1.0, 0.0),
    };
    let keep = 1.0 - p;
    let p_both = both * keep * keep;
    let p_single = one * keep + both * p * keep;
    let p_none = both * p * p + 2.0 * one * p;
    Ok(BranchingParams {
        q,
        p,
        p_both,
        p_left: p_single,
        p_right: p_single,
        p_none,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Outcome {
    Both,
    Left,
    Right,
    None,
}

impl BranchingParams {
    /// One uniform variate against the cumulative table in the fixed order
    /// both, left, right, none.
    #[inline]
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Outcome {
        let u: f64 = rng.random();
        if u < self.p_both {
            Outcome::Both
        } else if u < self.p_both + self.p_left {
            Outcome::Left
        } else if u < self.p_both + self.p_left + self.p_right {
            Outcome::Right
        } else {
            Outcome::None
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitialCondition {
    SingleSite(usize),
    /// `k` adjacent particles starting at `origin`.
    Block {
        k: usize,
        origin: usize,
    },
    Custom(BitMask),
}

impl InitialCondition {
    pub fn occupation(&self, n: usize) -> Result<BitMask> {
        let occ = match self {
            InitialCondition::SingleSite(x) => {
                if *x >= n {
                    return Err(Error::SiteOutOfRange { site: *x, width: n });
                }
                BitMask::from_sites(n, [*x])
            }
            InitialCondition::Block { k, origin } => {
                if *k == 0 || *k > n || *origin >= n {
                    return Err(Error::InvalidBlock { k: *k, n });
                }
                BitMask::from_sites(n, (0..*k).map(|i| (origin + i) % n))
            }
            InitialCondition::Custom(mask) => {
                if mask.len() != n {
                    return Err(Error::WidthMismatch {
                        left: mask.len(),
                        right: n,
                    });
                }
                mask.clone()
            }
        };
        if occ.none() {
            return Err(Error::EmptyInitialCondition);
        }
        Ok(occ)
    }

    /// Site from which displacements are measured.
    pub fn origin(&self) -> usize {
        match self {
            InitialCondition::SingleSite(x) => *x,
            InitialCondition::Block { origin, .. } => *origin,
            InitialCondition::Custom(_) => 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeState {
    pub occ: BitMask,
    pub t: usize,
    /// Parity of the next layer of vertices.
    pub parity: Parity,
}

impl LatticeState {
    pub fn new(occ: BitMask) -> Result<Self> {
        let n = occ.len();
        if n == 0 || n % 2 != 0 {
            return Err(Error::InvalidSize(n));
        }
        Ok(Self {
            occ,
            t: 0,
            parity: Parity::Even,
        })
    }

    pub fn n(&self) -> usize {
        self.occ.len()
    }

    pub fn is_absorbed(&self) -> bool {
        self.occ.none()
    }
}

/// Mask over left sites of active vertices: bit `s` set when the vertex
/// with left input `s` has at least one occupied input.
fn active_vertices(occ: &BitMask, parity: Parity) -> BitMask {
    const EVEN: u64 = 0x5555_5555_5555_5555;
    const ODD: u64 = 0xAAAA_AAAA_AAAA_AAAA;
    let n = occ.len();
    let words = occ.words();
    let mut out = vec![0u64; words.len()];
    for (wi, &w) in words.iter().enumerate() {
        if w == 0 && parity == Parity::Even {
            continue;
        }
        match parity {
            Parity::Even => out[wi] = (w | w >> 1) & EVEN,
            Parity::Odd => {
                // bit b of `right` holds site b + 1 of this word
                let base = wi * 64;
                let last = (n - 1 - base).min(63);
                let next_site = (base + last + 1) % n;
                let next_bit = (words[next_site / 64] >> (next_site % 64)) & 1;
                let right = (w >> 1) | (next_bit << last);
                out[wi] = (w | right) & ODD;
            }
        }
    }
    BitMask::from_words(n, out)
}

/// Advances the lattice by one layer of vertices.
pub fn step<R: Rng + ?Sized>(state: &mut LatticeState, params: &BranchingParams, rng: &mut R) {
    let n = state.n();
    let active = active_vertices(&state.occ, state.parity);
    let mut next = BitMask::zeros(n);
    for left in active.iter_ones() {
        let right = (left + 1) % n;
        match params.sample(rng) {
            Outcome::Both => {
                next.set(left, true);
                next.set(right, true);
            }
            Outcome::Left => next.set(left, true),
            Outcome::Right => next.set(right, true),
            Outcome::None => {}
        }
    }
    state.occ = next;
    state.t += 1;
    state.parity = state.parity.flip();
}

/// Runs one trajectory, calling `observe(t, occupation)` for `t = 0, 1, ...`
/// up to `depth` or the first empty configuration, whichever comes first.
/// Returns the absorption time.
pub fn run_with<R, F>(
    init: &InitialCondition,
    params: &BranchingParams,
    n: usize,
    depth: usize,
    rng: &mut R,
    mut observe: F,
) -> Result<Option<usize>>
where
    R: Rng + ?Sized,
    F: FnMut(usize, &BitMask),
{
    let mut state = LatticeState::new(init.occupation(n)?)?;
    observe(0, &state.occ);
    while state.t < depth {
        step(&mut state, params, rng);
        observe(state.t, &state.occ);
        if state.is_absorbed() {
            return Ok(Some(state.t));
        }
    }
    Ok(None)
}

/// Per-layer summary of one trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LayerSummary {
    pub count: usize,
    pub alive: bool,
    /// Sum of squared minimal-image displacements from the origin.
    pub sum_x2: u64,
    /// Largest signed displacement of an occupied site, if any.
    pub rightmost: Option<i64>,
}

/// Signed minimal-image displacement of `site` from `origin`, in `[-N/2, N/2)`.
#[inline]
pub fn displacement(site: usize, origin: usize, n: usize) -> i64 {
    let half = n / 2;
    ((site + n - origin + half) % n) as i64 - half as i64
}

pub fn summarize(occ: &BitMask, origin: usize) -> LayerSummary {
    let n = occ.len();
    let mut sum_x2 = 0u64;
    let mut rightmost = None;
    let mut count = 0;
    for site in occ.iter_ones() {
        let x = displacement(site, origin, n);
        sum_x2 += (x * x) as u64;
        rightmost = Some(rightmost.map_or(x, |r: i64| r.max(x)));
        count += 1;
    }
    LayerSummary {
        count,
        alive: count > 0,
        sum_x2,
        rightmost,
    }
}

/// Summaries for `t = 0..=depth`; times after absorption are empty.
pub fn run_trajectory<R: Rng + ?Sized>(
    init: &InitialCondition,
    params: &BranchingParams,
    n: usize,
    depth: usize,
    rng: &mut R,
) -> Result<Vec<LayerSummary>> {
    let origin = init.origin();
    let mut out = Vec::with_capacity(depth + 1);
    run_with(init, params, n, depth, rng, |_, occ| {
        out.push(summarize(occ, origin))
    })?;
    let empty = LayerSummary {
        count: 0,
        alive: false,
        sum_x2: 0,
        rightmost: None,
    };
    out.resize(depth + 1, empty);
    Ok(out)
}
