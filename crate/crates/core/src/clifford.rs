//! Random two-qubit Cliffords on a brick-wall circuit with stochastic
//! swap-out of system qubits, acting on Pauli strings by conjugation.
//!
//! A two-qubit Pauli is encoded in four bits `x_a | z_a << 1 | x_b << 2 |
//! z_b << 3`. A gate is stored as the images of `X_a, Z_a, X_b, Z_b`; the
//! image of any other Pauli is the XOR of the images of its components.

use rand::Rng;

use crate::bits::BitMask;
use crate::pauli::{PauliLetter, PauliString};
use crate::{Error, Result};

/// Symplectic product of two encoded two-qubit Paulis: `true` when they
/// anticommute.
#[inline]
pub fn anticommute(a: u8, b: u8) -> bool {
    let ax = a & 0b0101;
    let az = (a >> 1) & 0b0101;
    let bx = b & 0b0101;
    let bz = (b >> 1) & 0b0101;
    ((ax & bz) ^ (az & bx)).count_ones() & 1 == 1
}

/// Encodes the content of two sites.
#[inline]
pub fn encode(a: PauliLetter, b: PauliLetter) -> u8 {
    let (xa, za) = a.bits();
    let (xb, zb) = b.bits();
    xa as u8 | (za as u8) << 1 | (xb as u8) << 2 | (zb as u8) << 3
}

#[inline]
pub fn decode(code: u8) -> (PauliLetter, PauliLetter) {
    (
        PauliLetter::from_bits(code & 1 != 0, code & 2 != 0),
        PauliLetter::from_bits(code & 4 != 0, code & 8 != 0),
    )
}

/// A two-qubit Clifford modulo phases, i.e. an element of Sp(4, 2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TwoQubitClifford {
    images: [u8; 4],
}

impl TwoQubitClifford {
    pub const IDENTITY: Self = Self {
        images: [0b0001, 0b0010, 0b0100, 0b1000],
    };

    /// Builds a gate from the images of `X_a, Z_a, X_b, Z_b`, checking that
    /// they are independent and obey the canonical commutation relations.
    pub fn from_images(images: [u8; 4]) -> Result<Self> {
        if images.iter().any(|&c| c == 0 || c > 0b1111) {
            return Err(Error::InvalidGate(
                "image must be a nontrivial two-qubit Pauli",
            ));
        }
        for i in 0..4 {
            for j in (i + 1)..4 {
                // X_a/Z_a and X_b/Z_b are the only anticommuting pairs
                let expect = (i, j) == (0, 1) || (i, j) == (2, 3);
                if anticommute(images[i], images[j]) != expect {
                    return Err(Error::InvalidGate("commutation relations violated"));
                }
            }
        }
        // symplectic relations already imply independence, but check anyway
        let g = Self { images };
        let mut seen = [false; 16];
        for c in 0..16u8 {
            let img = g.image(c) as usize;
            if seen[img] {
                return Err(Error::InvalidGate("images are dependent"));
            }
            seen[img] = true;
        }
        Ok(g)
    }

    pub fn identity() -> Self {
        Self::IDENTITY
    }

    pub fn swap() -> Self {
        Self {
            images: [0b0100, 0b1000, 0b0001, 0b0010],
        }
    }

    /// CNOT with the first site as control.
    pub fn cnot() -> Self {
        Self {
            images: [0b0101, 0b0010, 0b0100, 0b1010],
        }
    }

    pub fn images(&self) -> [u8; 4] {
        self.images
    }

    /// Image of an encoded two-qubit Pauli.
    #[inline]
    pub fn image(&self, code: u8) -> u8 {
        let mut out = 0;
        for (bit, img) in self.images.iter().enumerate() {
            if code >> bit & 1 == 1 {
                out ^= img;
            }
        }
        out
    }

    /// Lookup table of all sixteen images.
    pub fn table(&self) -> [u8; 16] {
        let mut t = [0u8; 16];
        for (c, slot) in t.iter_mut().enumerate() {
            *slot = self.image(c as u8);
        }
        t
    }

    /// Uniform sample from the two-qubit Clifford group modulo phases.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let xa = rng.random_range(1u8..16);
        let za = pick(rng, (1u8..16).filter(|&c| anticommute(xa, c)));
        let xb = pick(
            rng,
            (1u8..16).filter(|&c| !anticommute(xa, c) && !anticommute(za, c)),
        );
        let zb = pick(
            rng,
            (1u8..16).filter(|&c| !anticommute(xa, c) && !anticommute(za, c) && anticommute(xb, c)),
        );
        Self {
            images: [xa, za, xb, zb],
        }
    }
}

fn pick<R: Rng + ?Sized>(rng: &mut R, candidates: impl Iterator<Item = u8>) -> u8 {
    let mut buf = [0u8; 16];
    let mut len = 0;
    for c in candidates {
        buf[len] = c;
        len += 1;
    }
    debug_assert!(len > 0);
    buf[rng.random_range(0..len)]
}

/// Uniform sample from the two-qubit Clifford group modulo phases.
pub fn sample_clifford<R: Rng + ?Sized>(rng: &mut R) -> TwoQubitClifford {
    TwoQubitClifford::sample(rng)
}

#[inline]
fn local_code(s: &PauliString, i: usize, j: usize) -> u8 {
    let (x, z) = (s.x_bits(), s.z_bits());
    x.get(i) as u8 | (z.get(i) as u8) << 1 | (x.get(j) as u8) << 2 | (z.get(j) as u8) << 3
}

#[inline]
pub(crate) fn conjugate_with_table(s: &mut PauliString, table: &[u8; 16], i: usize, j: usize) {
    let code = local_code(s, i, j);
    if code == 0 {
        return;
    }
    let out = table[code as usize];
    let (x, z) = s.parts_mut();
    x.set(i, out & 1 != 0);
    z.set(i, out & 2 != 0);
    x.set(j, out & 4 != 0);
    z.set(j, out & 8 != 0);
}

/// Conjugates `s` by `g` acting on sites `(i, j)`: site `i` plays the role
/// of the gate's first qubit.
pub fn conjugate(
    s: &PauliString,
    g: &TwoQubitClifford,
    sites: (usize, usize),
) -> Result<PauliString> {
    let (i, j) = sites;
    let n = s.width();
    for site in [i, j] {
        if site >= n {
            return Err(Error::SiteOutOfRange { site, width: n });
        }
    }
    if i == j {
        return Err(Error::SiteCollision(i));
    }
    let mut out = s.clone();
    conjugate_with_table(&mut out, &g.table(), i, j);
    Ok(out)
}

/// Which bonds of the brick wall a layer acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    /// Pairs `(2m, 2m + 1)`.
    Even,
    /// Pairs `(2m + 1, 2m + 2 mod N)`.
    Odd,
}

impl Parity {
    /// Parity of the layer taking time `t` to `t + 1`; the first layer is even.
    pub fn for_step(t: usize) -> Self {
        if t % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    /// Sites `(left, right)` of gate `m` on a ring of `n` sites.
    #[inline]
    pub fn pair(self, m: usize, n: usize) -> (usize, usize) {
        match self {
            Parity::Even => (2 * m, 2 * m + 1),
            Parity::Odd => (2 * m + 1, (2 * m + 2) % n),
        }
    }

    /// Index of the gate acting on `site`.
    #[inline]
    pub fn pair_of(self, site: usize, n: usize) -> usize {
        match self {
            Parity::Even => site / 2,
            Parity::Odd => ((site + n - 1) % n) / 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CircuitParams {
    /// System size, even, periodic boundaries.
    pub n: usize,
    /// Swap rate.
    pub p: f64,
    /// Number of layers; one unit of time is one gate layer plus its swap round.
    pub depth: usize,
    pub seed: u64,
}

impl CircuitParams {
    pub fn new(n: usize, p: f64, depth: usize, seed: u64) -> Result<Self> {
        let params = Self { n, p, depth, seed };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n % 2 != 0 {
            return Err(Error::InvalidSize(self.n));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidRate(self.p));
        }
        Ok(())
    }
}

/// A swap of system site `site` with a fresh ancilla after gate layer `layer`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SwapEvent {
    pub site: usize,
    pub layer: usize,
}

/// One brick-wall layer of sampled gates, `gates[m]` acting on
/// `parity.pair(m, n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    pub parity: Parity,
    pub gates: Vec<TwoQubitClifford>,
}

impl Layer {
    pub fn sample<R: Rng + ?Sized>(n: usize, parity: Parity, rng: &mut R) -> Self {
        Self {
            parity,
            gates: (0..n / 2).map(|_| TwoQubitClifford::sample(rng)).collect(),
        }
    }

    pub fn width(&self) -> usize {
        2 * self.gates.len()
    }

    /// Conjugates every gate of the layer onto `s`, whose system sites start
    /// at column `offset`.
    pub fn apply(&self, s: &mut PauliString, offset: usize) {
        let n = self.width();
        for (m, g) in self.gates.iter().enumerate() {
            let (i, j) = self.parity.pair(m, n);
            conjugate_with_table(s, &g.table(), offset + i, offset + j);
        }
    }

    /// Applies the layer to many strings sharing the same column layout.
    pub fn apply_all(&self, rows: &mut [PauliString], offset: usize) {
        let n = self.width();
        for (m, g) in self.gates.iter().enumerate() {
            let (i, j) = self.parity.pair(m, n);
            let table = g.table();
            for row in rows.iter_mut() {
                conjugate_with_table(row, &table, offset + i, offset + j);
            }
        }
    }
}

/// Applies a layer of independent random gates to `s`. Gates on pairs with
/// identity content are not sampled since they cannot change the string.
pub fn apply_layer<R: Rng + ?Sized>(s: &mut PauliString, parity: Parity, rng: &mut R) {
    let n = s.width();
    let mut pairs: Vec<usize> = s
        .support()
        .iter_ones()
        .map(|site| parity.pair_of(site, n))
        .collect();
    pairs.sort_unstable();
    pairs.dedup();
    for m in pairs {
        let (i, j) = parity.pair(m, n);
        let g = TwoQubitClifford::sample(rng);
        conjugate_with_table(s, &g.table(), i, j);
    }
}

/// Sites selected for swap-out in one round, each independently with
/// probability `p`.
pub fn sample_swap_sites<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Vec<usize> {
    if p <= 0.0 {
        Vec::new()
    } else if p >= 1.0 {
        (0..n).collect()
    } else {
        (0..n).filter(|_| rng.random::<f64>() < p).collect()
    }
}

/// One swap round: every site is swapped out with probability `p` and its
/// content replaced by the identity.
pub fn apply_swaps<R: Rng + ?Sized>(
    s: &mut PauliString,
    p: f64,
    layer: usize,
    rng: &mut R,
) -> Vec<SwapEvent> {
    let sites = sample_swap_sites(s.width(), p, rng);
    let region = BitMask::from_sites(s.width(), sites.iter().copied());
    s.clear_region(&region);
    sites
        .into_iter()
        .map(|site| SwapEvent { site, layer })
        .collect()
}

/// Swap round restricted to occupied sites; identical in law to
/// [`apply_swaps`] as far as the string is concerned.
fn swap_out_occupied<R: Rng + ?Sized>(s: &mut PauliString, p: f64, rng: &mut R) {
    if p <= 0.0 {
        return;
    }
    let support = s.support();
    let mut removed = BitMask::zeros(s.width());
    for site in support.iter_ones() {
        if p >= 1.0 || rng.random::<f64>() < p {
            removed.set(site, true);
        }
    }
    s.clear_region(&removed);
}

/// Occupation numbers `n_x(t)` of a Heisenberg-evolved `X_0`.
#[derive(Clone, Debug, PartialEq)]
pub struct OtocTrajectory {
    pub n: usize,
    pub depth: usize,
    /// `occupations[t]` for `t = 0..=absorbed` (or `depth`); later times are empty.
    pub occupations: Vec<BitMask>,
}

impl OtocTrajectory {
    pub fn occupation(&self, t: usize) -> BitMask {
        self.occupations
            .get(t)
            .cloned()
            .unwrap_or_else(|| BitMask::zeros(self.n))
    }

    /// Time at which the string became the identity, if it did.
    pub fn absorbed_at(&self) -> Option<usize> {
        self.occupations.iter().position(BitMask::none)
    }
}

/// Evolves `X_0` through `params.depth` layers, calling `observe(t, n_x(t))`
/// for `t = 0, 1, ...` until the depth is reached or the string is absorbed
/// (the absorbing step itself is observed). Returns the absorption time.
pub fn evolve_otoc_with<R, F>(params: &CircuitParams, rng: &mut R, mut observe: F) -> Option<usize>
where
    R: Rng + ?Sized,
    F: FnMut(usize, &BitMask),
{
    let mut s = PauliString::single(params.n, 0, PauliLetter::X);
    observe(0, &s.support());
    for t in 0..params.depth {
        apply_layer(&mut s, Parity::for_step(t), rng);
        swap_out_occupied(&mut s, params.p, rng);
        let occ = s.support();
        observe(t + 1, &occ);
        if occ.none() {
            return Some(t + 1);
        }
    }
    None
}

pub fn evolve_otoc<R: Rng + ?Sized>(params: &CircuitParams, rng: &mut R) -> OtocTrajectory {
    let mut occupations = Vec::with_capacity(params.depth + 1);
    evolve_otoc_with(params, rng, |_, occ| occupations.push(occ.clone()));
    OtocTrajectory {
        n: params.n,
        depth: params.depth,
        occupations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn named_gates_are_valid() {
        for g in [
            TwoQubitClifford::identity(),
            TwoQubitClifford::swap(),
            TwoQubitClifford::cnot(),
        ] {
            assert_eq!(TwoQubitClifford::from_images(g.images()), Ok(g));
        }
        assert!(TwoQubitClifford::from_images([1, 1, 4, 8]).is_err());
        assert!(TwoQubitClifford::from_images([1, 4, 2, 8]).is_err());
    }

    #[test]
    fn standard_conjugations() {
        let swap = TwoQubitClifford::swap();
        let cnot = TwoQubitClifford::cnot();
        assert_eq!(conjugate(&ps("XI"), &swap, (0, 1)).unwrap(), ps("IX"));
        assert_eq!(conjugate(&ps("XI"), &cnot, (0, 1)).unwrap(), ps("XX"));
        assert_eq!(conjugate(&ps("ZI"), &cnot, (0, 1)).unwrap(), ps("ZI"));
        assert_eq!(conjugate(&ps("IZ"), &cnot, (0, 1)).unwrap(), ps("ZZ"));
        // reversed orientation: site 2 is the control
        assert_eq!(conjugate(&ps("IZX"), &cnot, (2, 0)).unwrap(), ps("XZX"));
        let s = ps("XYZIY");
        assert_eq!(
            conjugate(&s, &TwoQubitClifford::identity(), (1, 3)).unwrap(),
            s
        );
        assert_eq!(conjugate(&s, &cnot, (1, 1)), Err(Error::SiteCollision(1)));
        assert!(matches!(
            conjugate(&s, &cnot, (1, 5)),
            Err(Error::SiteOutOfRange { .. })
        ));
    }

    #[test]
    fn sampled_gates_are_valid_and_invertible() {
        let mut rng = stream(1, 0);
        for _ in 0..2000 {
            let g = TwoQubitClifford::sample(&mut rng);
            assert!(TwoQubitClifford::from_images(g.images()).is_ok());
            // nontrivial content is never annihilated
            assert!((1u8..16).all(|c| g.image(c) != 0));
        }
    }

    #[test]
    fn sampler_reaches_the_whole_group() {
        let mut rng = stream(2, 0);
        let mut seen = std::collections::HashSet::new();
        for _ in 0..40_000 {
            seen.insert(TwoQubitClifford::sample(&mut rng));
        }
        assert_eq!(seen.len(), 720);
    }

    #[test]
    fn identity_string_is_absorbing() {
        let mut rng = stream(3, 0);
        let mut s = PauliString::identity(16);
        for t in 0..10 {
            apply_layer(&mut s, Parity::for_step(t), &mut rng);
        }
        assert!(s.is_identity());
    }

    #[test]
    fn light_cone_after_two_layers() {
        let n = 16;
        for i in 0..200 {
            let mut rng = stream(4, i);
            let mut s = PauliString::single(n, 0, PauliLetter::X);
            apply_layer(&mut s, Parity::Even, &mut rng);
            assert!(s.support().iter_ones().all(|x| x <= 1));
            apply_layer(&mut s, Parity::Odd, &mut rng);
            assert!(s
                .support()
                .iter_ones()
                .all(|x| [n - 1, 0, 1, 2].contains(&x)));
            assert!(!s.is_identity());
        }
    }

    #[test]
    fn swap_round_extremes() {
        let mut rng = stream(5, 0);
        let mut s = ps("XYZXYZXY");
        let events = apply_swaps(&mut s, 0.0, 0, &mut rng);
        assert!(events.is_empty());
        assert_eq!(s, ps("XYZXYZXY"));
        let events = apply_swaps(&mut s, 1.0, 3, &mut rng);
        assert_eq!(events.len(), 8);
        assert!(events.iter().all(|e| e.layer == 3));
        assert!(s.is_identity());
    }

    #[test]
    fn swap_round_removes_expected_weight() {
        // binomial oracle: removed ~ Bin(weight, p)
        let (p, weight, trials) = (0.3, 12usize, 100_000u64);
        let mut rng = stream(6, 0);
        let base = ps("XYZXYZXYZXYZIIII");
        let mut total = 0u64;
        for _ in 0..trials {
            let mut s = base.clone();
            apply_swaps(&mut s, p, 0, &mut rng);
            total += (weight - s.weight()) as u64;
        }
        let mean = total as f64 / trials as f64;
        let expected = p * weight as f64;
        let sigma = (weight as f64 * p * (1.0 - p) / trials as f64).sqrt();
        assert!(
            (mean - expected).abs() < 4.0 * sigma,
            "{mean} vs {expected}"
        );
    }

    #[test]
    fn otoc_trajectory_basics() {
        let params = CircuitParams::new(8, 1.0, 5, 0).unwrap();
        let traj = evolve_otoc(&params, &mut stream(7, 0));
        assert_eq!(traj.occupation(0).iter_ones().collect::<Vec<_>>(), vec![0]);
        assert_eq!(traj.absorbed_at(), Some(1));
        for t in 1..=5 {
            assert!(traj.occupation(t).none());
        }
        assert!(CircuitParams::new(7, 0.1, 5, 0).is_err());
        assert!(CircuitParams::new(8, 1.5, 5, 0).is_err());
    }

    #[test]
    fn unswapped_bulk_density_approaches_three_quarters() {
        let params = CircuitParams::new(32, 0.0, 200, 0).unwrap();
        let mut sum = 0.0;
        let trials = 200;
        for i in 0..trials {
            let traj = evolve_otoc(&params, &mut stream(8, i));
            assert_eq!(traj.absorbed_at(), None);
            sum += traj.occupation(200).count_ones() as f64 / 32.0;
        }
        let rho = sum / trials as f64;
        assert!((rho - 0.75).abs() < 0.02, "rho = {rho}");
    }
}
