//! Brute-force stabilizer tableau that keeps every environment qubit as an
//! explicit column. Slow, simple, and independent of the row bookkeeping of
//! [`GeneratorSet`](crate::stabilizer::GeneratorSet).

use rand::Rng;

use crate::clifford::{sample_swap_sites, Layer, Parity, TwoQubitClifford};
use crate::pauli::{PauliLetter, PauliString};
use crate::stabilizer::{GeneratorSet, InitCase, Region};
use crate::{Error, Result};

pub const MAX_TABLEAU_SITES: usize = 8;

/// One Pauli row as plain booleans, column order `A, S, E`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Row {
    x: Vec<bool>,
    z: Vec<bool>,
}

impl Row {
    fn identity(w: usize) -> Self {
        Self {
            x: vec![false; w],
            z: vec![false; w],
        }
    }

    fn push_column(&mut self) {
        self.x.push(false);
        self.z.push(false);
    }

    fn xor(&mut self, o: &Row) {
        for (a, b) in self.x.iter_mut().zip(&o.x) {
            *a ^= b;
        }
        for (a, b) in self.z.iter_mut().zip(&o.z) {
            *a ^= b;
        }
    }

    fn trivial_on(&self, cols: &[usize]) -> bool {
        cols.iter().all(|&c| !self.x[c] && !self.z[c])
    }

    fn conjugate(&mut self, g: &TwoQubitClifford, i: usize, j: usize) {
        let code = self.x[i] as u8
            | (self.z[i] as u8) << 1
            | (self.x[j] as u8) << 2
            | (self.z[j] as u8) << 3;
        let mut out = 0u8;
        for (bit, img) in g.images().into_iter().enumerate() {
            if code >> bit & 1 == 1 {
                out ^= img;
            }
        }
        self.x[i] = out & 1 != 0;
        self.z[i] = out & 2 != 0;
        self.x[j] = out & 4 != 0;
        self.z[j] = out & 8 != 0;
    }
}

/// GF(2) rank of the rows restricted to `cols`.
fn rank_on(rows: &[Row], cols: &[usize]) -> usize {
    let mut m: Vec<Vec<bool>> = rows
        .iter()
        .map(|r| cols.iter().flat_map(|&c| [r.x[c], r.z[c]]).collect())
        .collect();
    let width = 2 * cols.len();
    let mut rank = 0;
    for col in 0..width {
        let Some(p) = (rank..m.len()).find(|&r| m[r][col]) else {
            continue;
        };
        m.swap(rank, p);
        for r in 0..m.len() {
            if r != rank && m[r][col] {
                let pivot = m[rank].clone();
                for (a, b) in m[r].iter_mut().zip(pivot) {
                    *a ^= b;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[derive(Clone, Debug)]
pub struct FullTableau {
    k: usize,
    n: usize,
    case: InitCase,
    n_env: usize,
    rows: Vec<Row>,
    bell: Vec<Row>,
}

impl FullTableau {
    pub fn init(case: InitCase, n: usize, k: usize) -> Result<Self> {
        if n > MAX_TABLEAU_SITES {
            return Err(Error::OracleTooLarge {
                n,
                max: MAX_TABLEAU_SITES,
            });
        }
        if n == 0 || n % 2 != 0 {
            return Err(Error::InvalidSize(n));
        }
        if k == 0 || k > n {
            return Err(Error::InvalidBlock { k, n });
        }
        let w = k + n;
        let mut bell = Vec::new();
        for j in 0..k {
            let mut x = Row::identity(w);
            x.x[j] = true;
            x.x[k + j] = true;
            let mut z = Row::identity(w);
            z.z[j] = true;
            z.z[k + j] = true;
            bell.push(x);
            bell.push(z);
        }
        let mut rows = bell.clone();
        if case != InitCase::MixedS2MixedE {
            for j in k..n {
                let mut r = Row::identity(w);
                r.z[k + j] = true;
                rows.push(r);
            }
        }
        Ok(Self {
            k,
            n,
            case,
            n_env: 0,
            rows,
            bell,
        })
    }

    fn width(&self) -> usize {
        self.k + self.n + self.n_env
    }

    fn cols(&self, region: Region) -> Vec<usize> {
        let (k, n, w) = (self.k, self.n, self.width());
        match region {
            Region::A => (0..k).collect(),
            Region::S => (k..k + n).collect(),
            Region::AS => (0..k + n).collect(),
            Region::E => (k + n..w).collect(),
            Region::AE => (0..k).chain(k + n..w).collect(),
        }
    }

    pub fn apply_layer(&mut self, layer: &Layer) -> Result<()> {
        if layer.width() != self.n {
            return Err(Error::WidthMismatch {
                left: layer.width(),
                right: self.n,
            });
        }
        for (m, g) in layer.gates.iter().enumerate() {
            let (i, j) = layer.parity.pair(m, self.n);
            for r in self.rows.iter_mut().chain(self.bell.iter_mut()) {
                r.conjugate(g, self.k + i, self.k + j);
            }
        }
        Ok(())
    }

    /// Appends a fresh ancilla column and exchanges it with system site `site`.
    pub fn apply_swap(&mut self, site: usize) -> Result<()> {
        if site >= self.n {
            return Err(Error::SiteOutOfRange {
                site,
                width: self.n,
            });
        }
        for r in self.rows.iter_mut().chain(self.bell.iter_mut()) {
            r.push_column();
        }
        let anc = self.width();
        self.n_env += 1;
        if self.case == InitCase::PureAll {
            let mut r = Row::identity(anc + 1);
            r.z[anc] = true;
            self.rows.push(r);
        }
        let c = self.k + site;
        for r in self.rows.iter_mut().chain(self.bell.iter_mut()) {
            r.x.swap(c, anc);
            r.z.swap(c, anc);
        }
        Ok(())
    }

    /// `S(R) = N_R - d + rank of the generators on the complement of R`.
    pub fn entropy(&self, region: Region) -> i64 {
        let inside = self.cols(region);
        let outside: Vec<usize> = (0..self.width()).filter(|c| !inside.contains(c)).collect();
        inside.len() as i64 - self.rows.len() as i64 + rank_on(&self.rows, &outside) as i64
    }

    /// Fraction of the `4^k` Bell-group elements acting trivially on `S`.
    pub fn decode_fidelity(&self) -> f64 {
        let s = self.cols(Region::S);
        let total = 1usize << self.bell.len();
        let trivial = (0..total)
            .filter(|&mask| {
                let mut acc = Row::identity(self.width());
                for (b, row) in self.bell.iter().enumerate() {
                    if mask >> b & 1 == 1 {
                        acc.xor(row);
                    }
                }
                acc.trivial_on(&s)
            })
            .count();
        trivial as f64 / total as f64
    }

    /// Generators of the subgroup with trivial environment content, as
    /// strings on `A ∪ S`.
    pub fn as_subgroup(&self) -> Vec<PauliString> {
        let base = self.k + self.n;
        let env: Vec<usize> = (base..self.width()).collect();
        let mut rows = self.rows.clone();
        let mut pivot_row = 0;
        // row-reduce on the environment columns first; rows left below the
        // last pivot have no environment content
        for &c in &env {
            for bit in 0..2 {
                let get = |r: &Row| if bit == 0 { r.x[c] } else { r.z[c] };
                let Some(p) = (pivot_row..rows.len()).find(|&r| get(&rows[r])) else {
                    continue;
                };
                rows.swap(pivot_row, p);
                let pivot = rows[pivot_row].clone();
                for r in rows.iter_mut().skip(pivot_row + 1) {
                    if get(r) {
                        r.xor(&pivot);
                    }
                }
                pivot_row += 1;
            }
        }
        rows[pivot_row..]
            .iter()
            .filter(|r| r.trivial_on(&env))
            .map(|r| {
                let mut s = PauliString::identity(base);
                for c in 0..base {
                    s.set(c, PauliLetter::from_bits(r.x[c], r.z[c]));
                }
                s
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ScriptStep {
    Layer(Layer),
    Swaps(Vec<usize>),
}

/// A fixed sequence of gate layers and swap rounds, replayable on several
/// engines.
#[derive(Clone, Debug, PartialEq)]
pub struct Script {
    pub n: usize,
    pub steps: Vec<ScriptStep>,
}

impl Script {
    pub fn random<R: Rng + ?Sized>(n: usize, p: f64, depth: usize, rng: &mut R) -> Self {
        let mut steps = Vec::with_capacity(2 * depth);
        for t in 0..depth {
            steps.push(ScriptStep::Layer(Layer::sample(
                n,
                Parity::for_step(t),
                rng,
            )));
            steps.push(ScriptStep::Swaps(sample_swap_sites(n, p, rng)));
        }
        Self { n, steps }
    }

    pub fn run_generators(&self, g: &mut GeneratorSet) -> Result<()> {
        for step in &self.steps {
            match step {
                ScriptStep::Layer(l) => g.apply_layer(l)?,
                ScriptStep::Swaps(sites) => sites.iter().try_for_each(|&s| g.apply_swap(s))?,
            }
        }
        Ok(())
    }

    pub fn run_tableau(&self, t: &mut FullTableau) -> Result<()> {
        for step in &self.steps {
            match step {
                ScriptStep::Layer(l) => t.apply_layer(l)?,
                ScriptStep::Swaps(sites) => sites.iter().try_for_each(|&s| t.apply_swap(s))?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn initial_entropies() {
        let t = FullTableau::init(InitCase::MixedS2MixedE, 4, 2).unwrap();
        assert_eq!(t.entropy(Region::A), 2);
        assert_eq!(t.entropy(Region::S), 4);
        assert_eq!(t.entropy(Region::AS), 2);
        assert_eq!(t.entropy(Region::E), 0);
        assert_eq!(t.decode_fidelity(), 1.0 / 16.0);
        let t = FullTableau::init(InitCase::PureAll, 4, 2).unwrap();
        assert_eq!(t.entropy(Region::AS), 0);
        assert_eq!(t.entropy(Region::S), 2);
    }

    #[test]
    fn full_swap_moves_everything_to_the_environment() {
        let mut t = FullTableau::init(InitCase::PureAll, 4, 4).unwrap();
        for s in 0..4 {
            t.apply_swap(s).unwrap();
        }
        assert_eq!(t.entropy(Region::S), 0);
        assert_eq!(t.entropy(Region::E), 4);
        assert_eq!(t.entropy(Region::AE), 0);
        assert_eq!(t.decode_fidelity(), 1.0);
    }

    #[test]
    fn pure_case_is_globally_pure() {
        let mut rng = stream(9, 0);
        let script = Script::random(6, 0.3, 8, &mut rng);
        let mut t = FullTableau::init(InitCase::PureAll, 6, 2).unwrap();
        script.run_tableau(&mut t).unwrap();
        assert_eq!(t.rows.len(), t.width());
        assert_eq!(t.entropy(Region::E), t.entropy(Region::AS));
        assert_eq!(t.entropy(Region::AE), t.entropy(Region::S));
    }

    #[test]
    fn size_guard() {
        assert!(matches!(
            FullTableau::init(InitCase::PureAll, 10, 1),
            Err(Error::OracleTooLarge { .. })
        ));
    }
}
