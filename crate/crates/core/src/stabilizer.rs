//! Stabilizer evolution of a reference `A` entangled with the system `S`,
//! with swapped-out qubits accumulating in an untracked environment `E`.
//!
//! The tracked register has `k + N` columns: the reference occupies columns
//! `0..k` and system site `j` lives at column `k + j`. Generators are split
//! into rows supported on `A ∪ S` (label [`RowLabel::As`]) and rows that
//! also carry environment content ([`RowLabel::Perp`]). Environment content
//! is never stored: every ancilla is fresh, so it can never cancel.

use rand::Rng;

use crate::bits::BitMask;
use crate::clifford::{sample_swap_sites, Layer, Parity, SwapEvent};
use crate::pauli::{rank_restricted, PauliLetter, PauliString};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InitCase {
    /// (i) `S₂` and `E` maximally mixed.
    MixedS2MixedE,
    /// (ii) `S₂` in `|0…0⟩`, `E` maximally mixed.
    PureS2MixedE,
    /// (iii) `S₂` and `E` in `|0…0⟩`; the global state is pure.
    PureAll,
}

impl InitCase {
    pub fn name(self) -> &'static str {
        match self {
            InitCase::MixedS2MixedE => "i",
            InitCase::PureS2MixedE => "ii",
            InitCase::PureAll => "iii",
        }
    }
}

impl std::fmt::Display for InitCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for InitCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "i" | "1" => Ok(InitCase::MixedS2MixedE),
            "ii" | "2" => Ok(InitCase::PureS2MixedE),
            "iii" | "3" => Ok(InitCase::PureAll),
            other => Err(Error::Invalid(format!("unknown initial case {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RowLabel {
    As,
    Perp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Region {
    A,
    S,
    AS,
    E,
    AE,
}

impl Region {
    pub const ALL: [Region; 5] = [Region::A, Region::S, Region::AS, Region::E, Region::AE];
}

/// Entropies (bits), coherent informations and decoding quantities of one
/// realization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InfoResult {
    pub h_a: i64,
    pub h_s: i64,
    pub h_as: i64,
    pub h_e: i64,
    pub h_ae: i64,
    pub ic_e: i64,
    pub ic_s: i64,
    pub fidelity: f64,
    /// Postselection success probability, pure case only.
    pub p_succ: Option<f64>,
    pub log2_p_succ: Option<i64>,
    /// Fidelity of the postselected decoder, pure case only.
    pub f_pure: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PurityIdentities {
    /// `tr[(ρ^AE)²] = 2^{-H_AE}`.
    pub purity_ae: f64,
    /// `2^{N_E - k} tr[(ρ^AE)²]`, which equals the decoding fidelity in case (i).
    pub scaled_purity: Option<f64>,
    pub p_succ: Option<f64>,
    pub log2_p_succ: Option<i64>,
    pub f_pure: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct GeneratorSet {
    k: usize,
    n: usize,
    case: InitCase,
    as_rows: Vec<PauliString>,
    perp_rows: Vec<PauliString>,
    /// The `2k` Bell generators, evolved but never recombined.
    bell: Vec<PauliString>,
    n_env: usize,
    t: usize,
}

impl GeneratorSet {
    pub fn init(case: InitCase, n: usize, k: usize) -> Result<Self> {
        if n == 0 || n % 2 != 0 {
            return Err(Error::InvalidSize(n));
        }
        if k == 0 || k > n {
            return Err(Error::InvalidBlock { k, n });
        }
        let w = k + n;
        let mut bell = Vec::with_capacity(2 * k);
        for j in 0..k {
            for letter in [PauliLetter::X, PauliLetter::Z] {
                let mut row = PauliString::identity(w);
                row.set(j, letter);
                row.set(k + j, letter);
                bell.push(row);
            }
        }
        let mut as_rows = bell.clone();
        if case != InitCase::MixedS2MixedE {
            as_rows.extend((k..n).map(|j| PauliString::single(w, k + j, PauliLetter::Z)));
        }
        Ok(Self {
            k,
            n,
            case,
            as_rows,
            perp_rows: Vec::new(),
            bell,
            n_env: 0,
            t: 0,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn case(&self) -> InitCase {
        self.case
    }

    /// Number of swap events so far.
    pub fn n_env(&self) -> usize {
        self.n_env
    }

    /// Layers applied so far.
    pub fn time(&self) -> usize {
        self.t
    }

    /// Total number of tracked generators.
    pub fn d_total(&self) -> usize {
        self.as_rows.len() + self.perp_rows.len()
    }

    pub fn as_rows(&self) -> &[PauliString] {
        &self.as_rows
    }

    pub fn perp_rows(&self) -> &[PauliString] {
        &self.perp_rows
    }

    pub fn bell_rows(&self) -> &[PauliString] {
        &self.bell
    }

    pub fn rows(&self) -> impl Iterator<Item = (RowLabel, &PauliString)> {
        self.as_rows
            .iter()
            .map(|r| (RowLabel::As, r))
            .chain(self.perp_rows.iter().map(|r| (RowLabel::Perp, r)))
    }

    pub fn width(&self) -> usize {
        self.k + self.n
    }

    pub fn region_mask(&self, region: Region) -> BitMask {
        let w = self.width();
        match region {
            Region::A | Region::AE => BitMask::range(w, 0..self.k),
            Region::S => BitMask::range(w, self.k..w),
            Region::AS => BitMask::ones(w),
            Region::E => BitMask::zeros(w),
        }
    }

    /// Conjugates every generator by a sampled layer acting on `S`.
    pub fn apply_layer(&mut self, layer: &Layer) -> Result<()> {
        if layer.width() != self.n {
            return Err(Error::WidthMismatch {
                left: layer.width(),
                right: self.n,
            });
        }
        layer.apply_all(&mut self.as_rows, self.k);
        layer.apply_all(&mut self.perp_rows, self.k);
        layer.apply_all(&mut self.bell, self.k);
        Ok(())
    }

    /// Swaps system site `site` with a fresh environment ancilla.
    pub fn apply_swap(&mut self, site: usize) -> Result<()> {
        if site >= self.n {
            return Err(Error::SiteOutOfRange {
                site,
                width: self.n,
            });
        }
        let c = self.k + site;
        let px = eliminate_column(&mut self.as_rows, |r| r.x_bits().get(c), None);
        let pz = eliminate_column(&mut self.as_rows, |r| r.z_bits().get(c), px);
        let mut moved: Vec<usize> = px.into_iter().chain(pz).collect();
        moved.sort_unstable_by(|a, b| b.cmp(a));
        for i in moved {
            let row = self.as_rows.swap_remove(i);
            if self.case != InitCase::PureAll {
                self.perp_rows.push(row);
            }
        }
        let col = BitMask::from_sites(self.width(), [c]);
        for row in self
            .as_rows
            .iter_mut()
            .chain(self.perp_rows.iter_mut())
            .chain(self.bell.iter_mut())
        {
            row.clear_region(&col);
        }
        if self.case == InitCase::PureAll {
            // the fresh ancilla arrives in |0>
            self.as_rows
                .push(PauliString::single(self.width(), c, PauliLetter::Z));
        }
        self.n_env += 1;
        Ok(())
    }

    /// One unit of time: a random gate layer followed by a swap round.
    pub fn step<R: Rng + ?Sized>(&mut self, p: f64, rng: &mut R) -> Result<Vec<SwapEvent>> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidRate(p));
        }
        let layer = Layer::sample(self.n, Parity::for_step(self.t), rng);
        self.apply_layer(&layer)?;
        let sites = sample_swap_sites(self.n, p, rng);
        for &site in &sites {
            self.apply_swap(site)?;
        }
        let layer_index = self.t;
        self.t += 1;
        Ok(sites
            .into_iter()
            .map(|site| SwapEvent {
                site,
                layer: layer_index,
            })
            .collect())
    }

    /// Entropy of `region` in bits, from ranks of projected generators.
    pub fn entropy(&self, region: Region) -> i64 {
        let w = self.width();
        let (k, n, m, d) = (
            self.k as i64,
            self.n as i64,
            self.as_rows.len() as i64,
            self.d_total() as i64,
        );
        let a = BitMask::range(w, 0..self.k);
        let s = BitMask::range(w, self.k..w);
        let rank = |rows: &[PauliString], cols: &BitMask| rank_restricted(rows, cols) as i64;
        let all = || self.as_rows.iter().chain(&self.perp_rows);
        match region {
            Region::A => k - m + rank(&self.as_rows, &s),
            Region::S => n - m + rank(&self.as_rows, &a),
            // every perp row is independent on E, so rank proj_E = d - m
            Region::AS => (k + n) - d + (d - m),
            Region::E if self.case == InitCase::PureAll => self.entropy(Region::AS),
            Region::AE if self.case == InitCase::PureAll => self.entropy(Region::S),
            Region::E => self.n_env as i64 - d + rank_restricted(all(), &BitMask::ones(w)) as i64,
            Region::AE => k + self.n_env as i64 - d + rank_restricted(all(), &s) as i64,
        }
    }

    /// Entropy of `region` as `N_R - |G_R|`, with the subgroup supported on
    /// `R` constructed explicitly by elimination.
    pub fn entropy_by_subgroup(&self, region: Region) -> i64 {
        let w = self.width();
        let s = BitMask::range(w, self.k..w);
        let a = BitMask::range(w, 0..self.k);
        let n_r = |r: Region| match r {
            Region::A => self.k,
            Region::S => self.n,
            Region::AS => self.k + self.n,
            Region::E => self.n_env,
            Region::AE => self.k + self.n_env,
        } as i64;
        if self.case == InitCase::PureAll {
            match region {
                Region::E => return self.entropy_by_subgroup(Region::AS),
                Region::AE => return self.entropy_by_subgroup(Region::S),
                _ => {}
            }
        }
        let g = match region {
            Region::A => subgroup_on(&self.as_rows, &s).len(),
            Region::S => subgroup_on(&self.as_rows, &a).len(),
            Region::AS => subgroup_on(&self.as_rows, &BitMask::zeros(w)).len(),
            Region::E | Region::AE => {
                // environment content is allowed here, so perp rows take part
                let outside = if region == Region::E {
                    BitMask::ones(w)
                } else {
                    s
                };
                let rows: Vec<PauliString> = self
                    .as_rows
                    .iter()
                    .chain(&self.perp_rows)
                    .cloned()
                    .collect();
                subgroup_on(&rows, &outside).len()
            }
        };
        n_r(region) - g as i64
    }

    /// Decoding fidelity `2^{-r}`, `r` the rank of the Bell generators on `S`.
    pub fn decode_fidelity(&self) -> f64 {
        let s = BitMask::range(self.width(), self.k..self.width());
        2f64.powi(-(rank_restricted(&self.bell, &s) as i32))
    }

    /// `-log₂ F`.
    pub fn bell_rank(&self) -> usize {
        rank_restricted(
            &self.bell,
            &BitMask::range(self.width(), self.k..self.width()),
        )
    }

    pub fn coherent_info(&self) -> InfoResult {
        let h_a = self.entropy(Region::A);
        let h_s = self.entropy(Region::S);
        let h_as = self.entropy(Region::AS);
        let h_e = self.entropy(Region::E);
        let h_ae = self.entropy(Region::AE);
        let ic_e = h_e - h_ae;
        let (log2_p_succ, f_pure) = if self.case == InitCase::PureAll {
            (
                Some(self.k as i64 - self.n as i64 - h_e),
                Some(2f64.powi((ic_e - self.k as i64) as i32)),
            )
        } else {
            (None, None)
        };
        InfoResult {
            h_a,
            h_s,
            h_as,
            h_e,
            h_ae,
            ic_e,
            ic_s: h_s - h_as,
            fidelity: self.decode_fidelity(),
            p_succ: log2_p_succ.map(|e| 2f64.powi(e as i32)),
            log2_p_succ,
            f_pure,
        }
    }

    /// Purity of `AE` and the relations tying it to the decoders. The
    /// fidelity relation needs case (i), the postselection quantities case
    /// (iii).
    pub fn purity_identities(&self) -> Result<PurityIdentities> {
        let h_ae = self.entropy(Region::AE);
        let purity_ae = 2f64.powi(-(h_ae as i32));
        match self.case {
            InitCase::MixedS2MixedE => {
                let e = self.n_env as i64 - self.k as i64 - h_ae;
                Ok(PurityIdentities {
                    purity_ae,
                    scaled_purity: Some(2f64.powi(e as i32)),
                    p_succ: None,
                    log2_p_succ: None,
                    f_pure: None,
                })
            }
            InitCase::PureAll => {
                let info = self.coherent_info();
                Ok(PurityIdentities {
                    purity_ae,
                    scaled_purity: None,
                    p_succ: info.p_succ,
                    log2_p_succ: info.log2_p_succ,
                    f_pure: info.f_pure,
                })
            }
            InitCase::PureS2MixedE => Err(Error::WrongCase {
                expected: "case i or iii",
                actual: "case ii",
            }),
        }
    }

    /// Structural checks: `AS` rows are independent and commute with every
    /// generator, the generator count is the one fixed by the case, and all
    /// entropies are nonnegative. Perp rows may anticommute on tracked
    /// content (their partners sit in the environment) and are not checked
    /// pairwise.
    pub fn check_invariants(&self) -> Result<()> {
        let w = self.width();
        let bad = |msg: String| Err(Error::Invalid(msg));
        if rank_restricted(&self.as_rows, &BitMask::ones(w)) != self.as_rows.len() {
            return bad("AS rows are dependent".into());
        }
        for (i, a) in self.as_rows.iter().enumerate() {
            for (j, b) in self.as_rows.iter().chain(&self.perp_rows).enumerate() {
                if i != j && !a.commutes(b)? {
                    return bad(format!("AS row {i} anticommutes with row {j}"));
                }
            }
        }
        let expected = match self.case {
            InitCase::MixedS2MixedE => Some(2 * self.k),
            InitCase::PureS2MixedE => Some(self.n + self.k),
            InitCase::PureAll => None,
        };
        if let Some(d) = expected {
            if self.d_total() != d {
                return bad(format!("{} generators, expected {d}", self.d_total()));
            }
        } else if !self.perp_rows.is_empty() {
            return bad("pure case keeps no perp rows".into());
        }
        for region in Region::ALL {
            let h = self.entropy(region);
            if h < 0 {
                return bad(format!("negative entropy {h} for {region:?}"));
            }
        }
        Ok(())
    }
}

/// Eliminates the bit selected by `has` from every row but one
/// pivot, skipping row `skip`. Returns the pivot index.
fn eliminate_column(
    rows: &mut [PauliString],
    has: impl Fn(&PauliString) -> bool,
    skip: Option<usize>,
) -> Option<usize> {
    let pivot = (0..rows.len()).find(|&i| Some(i) != skip && has(&rows[i]))?;
    let pivot_row = rows[pivot].clone();
    for (i, row) in rows.iter_mut().enumerate() {
        if i != pivot && Some(i) != skip && has(row) {
            row.mul_assign(&pivot_row);
        }
    }
    Some(pivot)
}

/// Generators of the subgroup of `span(rows)` with trivial content on the
/// columns `outside`, built as explicit products.
fn subgroup_on(rows: &[PauliString], outside: &BitMask) -> Vec<PauliString> {
    let mut work: Vec<(Vec<u64>, PauliString)> = rows
        .iter()
        .map(|r| (r.restricted_words(outside), r.clone()))
        .collect();
    let mut kernel = Vec::new();
    for i in 0..work.len() {
        let (head, tail) = work.split_at_mut(i + 1);
        let pivot = &head[i];
        let Some(wi) = pivot.0.iter().position(|&x| x != 0) else {
            debug_assert!(pivot.1.restricted_words(outside).iter().all(|&x| x == 0));
            kernel.push(pivot.1.clone());
            continue;
        };
        let bit = pivot.0[wi] & pivot.0[wi].wrapping_neg();
        for row in tail.iter_mut() {
            if row.0[wi] & bit != 0 {
                for (a, b) in row.0.iter_mut().zip(&pivot.0) {
                    *a ^= b;
                }
                row.1.mul_assign(&pivot.1);
            }
        }
    }
    kernel
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn initial_generator_counts() {
        assert_eq!(
            GeneratorSet::init(InitCase::MixedS2MixedE, 4, 2)
                .unwrap()
                .d_total(),
            4
        );
        assert_eq!(
            GeneratorSet::init(InitCase::PureS2MixedE, 4, 2)
                .unwrap()
                .d_total(),
            6
        );
        assert_eq!(
            GeneratorSet::init(InitCase::PureAll, 4, 4)
                .unwrap()
                .d_total(),
            8
        );
        assert!(GeneratorSet::init(InitCase::PureAll, 4, 0).is_err());
        assert!(GeneratorSet::init(InitCase::PureAll, 4, 5).is_err());
        assert!(GeneratorSet::init(InitCase::PureAll, 5, 1).is_err());
    }

    #[test]
    fn initial_entropies() {
        for case in [
            InitCase::MixedS2MixedE,
            InitCase::PureS2MixedE,
            InitCase::PureAll,
        ] {
            let g = GeneratorSet::init(case, 6, 2).unwrap();
            g.check_invariants().unwrap();
            let info = g.coherent_info();
            assert_eq!(info.h_a, 2);
            assert_eq!(info.h_e, 0);
            assert_eq!(info.ic_e, -2);
            assert_eq!(info.ic_s, 2);
            assert_eq!(info.fidelity, 1.0 / 16.0);
        }
        let g = GeneratorSet::init(InitCase::MixedS2MixedE, 6, 2).unwrap();
        assert_eq!(g.entropy(Region::AE), 2);
        assert_eq!(g.entropy(Region::S), 6);
    }

    #[test]
    fn traced_bell_partner_leaves_reference_mixed() {
        let mut g = GeneratorSet::init(InitCase::PureAll, 2, 1).unwrap();
        g.apply_swap(0).unwrap();
        assert_eq!(g.entropy(Region::A), 1);
        // Bell rows gone, fresh |0> and the untouched Z_1 remain
        assert_eq!(g.as_rows().len(), 2);
        assert_eq!(g.coherent_info().ic_e, 1);
        assert_eq!(g.decode_fidelity(), 1.0);
        g.check_invariants().unwrap();
    }

    #[test]
    fn swap_without_content_only_counts() {
        let mut g = GeneratorSet::init(InitCase::MixedS2MixedE, 4, 1).unwrap();
        g.apply_swap(3).unwrap();
        assert_eq!(g.as_rows().len(), 2);
        assert!(g.perp_rows().is_empty());
        assert_eq!(g.n_env(), 1);
        assert_eq!(g.entropy(Region::E), 1);
    }

    #[test]
    fn both_formulas_agree_along_random_evolution() {
        for case in [
            InitCase::MixedS2MixedE,
            InitCase::PureS2MixedE,
            InitCase::PureAll,
        ] {
            for r in 0..20 {
                let mut g = GeneratorSet::init(case, 8, 3).unwrap();
                let mut rng = stream(11, r);
                for _ in 0..12 {
                    g.step(0.2, &mut rng).unwrap();
                    g.check_invariants().unwrap();
                    for region in Region::ALL {
                        assert_eq!(
                            g.entropy(region),
                            g.entropy_by_subgroup(region),
                            "{case:?} {region:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn fidelity_never_decreases() {
        let mut g = GeneratorSet::init(InitCase::MixedS2MixedE, 16, 4).unwrap();
        let mut rng = stream(12, 0);
        let mut last = g.decode_fidelity();
        for _ in 0..60 {
            g.step(0.3, &mut rng).unwrap();
            let f = g.decode_fidelity();
            assert!(f >= last);
            last = f;
        }
    }

    #[test]
    fn purity_matches_fidelity_in_mixed_case() {
        let mut g = GeneratorSet::init(InitCase::MixedS2MixedE, 12, 3).unwrap();
        let mut rng = stream(13, 0);
        for _ in 0..30 {
            g.step(0.15, &mut rng).unwrap();
            let id = g.purity_identities().unwrap();
            assert_eq!(id.scaled_purity, Some(g.decode_fidelity()));
        }
        assert!(GeneratorSet::init(InitCase::PureS2MixedE, 4, 1)
            .unwrap()
            .purity_identities()
            .is_err());
    }

    #[test]
    fn mixed_environment_entropy_counts_swaps() {
        let mut g = GeneratorSet::init(InitCase::MixedS2MixedE, 10, 2).unwrap();
        let mut rng = stream(14, 0);
        for _ in 0..20 {
            g.step(0.25, &mut rng).unwrap();
            assert_eq!(g.entropy(Region::E), g.n_env() as i64);
        }
    }

    #[test]
    fn full_swap_round_decouples_everything() {
        let mut g = GeneratorSet::init(InitCase::MixedS2MixedE, 6, 6).unwrap();
        g.step(1.0, &mut stream(15, 0)).unwrap();
        assert_eq!(g.decode_fidelity(), 1.0);
        assert_eq!(g.coherent_info().ic_e, 6);
        let mut g = GeneratorSet::init(InitCase::PureAll, 6, 6).unwrap();
        g.step(1.0, &mut stream(15, 1)).unwrap();
        let info = g.coherent_info();
        assert_eq!((info.h_s, info.h_as, info.ic_e), (0, 6, 6));
        assert_eq!(info.f_pure, Some(1.0));
        assert_eq!(info.log2_p_succ, Some(-6));
    }
}
