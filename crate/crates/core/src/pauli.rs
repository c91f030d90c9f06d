//! Pauli strings over a tracked register, stored as packed X and Z bits.
//!
//! Phases are not tracked: every quantity computed in this crate (occupation
//! numbers, GF(2) ranks, subgroup counts) depends only on the X/Z content.

use std::fmt;
use std::str::FromStr;

use crate::bits::BitMask;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl PauliLetter {
    pub const ALL: [PauliLetter; 4] = [
        PauliLetter::I,
        PauliLetter::X,
        PauliLetter::Y,
        PauliLetter::Z,
    ];

    #[inline]
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => PauliLetter::I,
            (true, false) => PauliLetter::X,
            (true, true) => PauliLetter::Y,
            (false, true) => PauliLetter::Z,
        }
    }

    #[inline]
    pub fn bits(self) -> (bool, bool) {
        match self {
            PauliLetter::I => (false, false),
            PauliLetter::X => (true, false),
            PauliLetter::Y => (true, true),
            PauliLetter::Z => (false, true),
        }
    }

    /// Single-site product, phase dropped.
    pub fn mul(self, other: Self) -> Self {
        let (ax, az) = self.bits();
        let (bx, bz) = other.bits();
        Self::from_bits(ax ^ bx, az ^ bz)
    }

    pub fn as_char(self) -> char {
        match self {
            PauliLetter::I => 'I',
            PauliLetter::X => 'X',
            PauliLetter::Y => 'Y',
            PauliLetter::Z => 'Z',
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    x: BitMask,
    z: BitMask,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self {
            x: BitMask::zeros(n),
            z: BitMask::zeros(n),
        }
    }

    pub fn single(n: usize, site: usize, letter: PauliLetter) -> Self {
        let mut s = Self::identity(n);
        s.set(site, letter);
        s
    }

    pub fn from_parts(x: BitMask, z: BitMask) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::WidthMismatch {
                left: x.len(),
                right: z.len(),
            });
        }
        Ok(Self { x, z })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.x.len()
    }

    #[inline]
    pub fn x_bits(&self) -> &BitMask {
        &self.x
    }

    #[inline]
    pub fn z_bits(&self) -> &BitMask {
        &self.z
    }

    #[inline]
    pub(crate) fn parts_mut(&mut self) -> (&mut BitMask, &mut BitMask) {
        (&mut self.x, &mut self.z)
    }

    /// Content at `site`. Panics if `site` is out of range.
    #[inline]
    pub fn content_at(&self, site: usize) -> PauliLetter {
        PauliLetter::from_bits(self.x.get(site), self.z.get(site))
    }

    #[inline]
    pub fn set(&mut self, site: usize, letter: PauliLetter) {
        let (x, z) = letter.bits();
        self.x.set(site, x);
        self.z.set(site, z);
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_width(other)?;
        Ok(Self {
            x: self.x.xor(&other.x),
            z: self.z.xor(&other.z),
        })
    }

    /// In-place product; widths must agree.
    #[inline]
    pub fn mul_assign(&mut self, other: &Self) {
        self.x.xor_assign(&other.x);
        self.z.xor_assign(&other.z);
    }

    pub fn commutes(&self, other: &Self) -> Result<bool> {
        self.check_width(other)?;
        Ok(self.x.dot(&other.z) == self.z.dot(&other.x))
    }

    /// Sites carrying non-identity content.
    pub fn support(&self) -> BitMask {
        self.x.or(&self.z)
    }

    /// Non-identity sites restricted to `region`.
    pub fn support_mask(&self, region: &BitMask) -> BitMask {
        self.support().and(region)
    }

    pub fn is_trivial_on(&self, region: &BitMask) -> bool {
        self.x
            .words()
            .iter()
            .zip(self.z.words())
            .zip(region.words())
            .all(|((x, z), r)| (x | z) & r == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.x.none() && self.z.none()
    }

    pub fn weight(&self) -> usize {
        self.support().count_ones()
    }

    /// Sets the content of every site in `region` to `I`.
    pub fn clear_region(&mut self, region: &BitMask) {
        for ((x, z), r) in self
            .x
            .words_mut()
            .iter_mut()
            .zip(self.z.words_mut().iter_mut())
            .zip(region.words())
        {
            *x &= !r;
            *z &= !r;
        }
    }

    /// Concatenated X and Z words restricted to `region`, the row layout used
    /// for GF(2) rank computations.
    pub fn restricted_words(&self, region: &BitMask) -> Vec<u64> {
        let xs = self
            .x
            .words()
            .iter()
            .zip(region.words())
            .map(|(a, r)| a & r);
        let zs = self
            .z
            .words()
            .iter()
            .zip(region.words())
            .map(|(a, r)| a & r);
        xs.chain(zs).collect()
    }

    fn check_width(&self, other: &Self) -> Result<()> {
        if self.width() != other.width() {
            return Err(Error::WidthMismatch {
                left: self.width(),
                right: other.width(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.width() {
            write!(f, "{}", self.content_at(i).as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut out = Self::identity(letters.len());
        for (i, c) in letters.into_iter().enumerate() {
            let letter = match c {
                'I' | '_' => PauliLetter::I,
                'X' => PauliLetter::X,
                'Y' => PauliLetter::Y,
                'Z' => PauliLetter::Z,
                other => return Err(Error::Invalid(format!("unknown Pauli letter {other:?}"))),
            };
            out.set(i, letter);
        }
        Ok(out)
    }
}

/// Rank over GF(2) of the given strings restricted to `region`.
pub fn rank_restricted<'a, I>(rows: I, region: &BitMask) -> usize
where
    I: IntoIterator<Item = &'a PauliString>,
{
    let mut scratch: Vec<Vec<u64>> = rows
        .into_iter()
        .map(|r| r.restricted_words(region))
        .collect();
    crate::bits::rank_in_place(&mut scratch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn content_decoding() {
        let mut s = PauliString::identity(1);
        s.x.set(0, true);
        assert_eq!(s.content_at(0), PauliLetter::X);
        s.z.set(0, true);
        assert_eq!(s.content_at(0), PauliLetter::Y);
        assert_eq!(PauliString::identity(5).content_at(3), PauliLetter::I);
    }

    #[test]
    #[should_panic]
    fn content_out_of_range_panics() {
        PauliString::identity(3).content_at(3);
    }

    #[test]
    fn products() {
        assert_eq!(ps("X").multiply(&ps("Z")).unwrap(), ps("Y"));
        assert_eq!(ps("XX").multiply(&ps("ZZ")).unwrap(), ps("YY"));
        let s = ps("XYZI");
        assert!(s.multiply(&s).unwrap().is_identity());
        assert!(matches!(
            ps("X").multiply(&ps("XX")),
            Err(Error::WidthMismatch { .. })
        ));
    }

    #[test]
    fn commutation() {
        assert!(!ps("X").commutes(&ps("Z")).unwrap());
        assert!(ps("XX").commutes(&ps("ZZ")).unwrap());
        assert!(ps("XYZ").commutes(&ps("III")).unwrap());
        assert!(ps("X").commutes(&ps("ZZ")).is_err());
    }

    #[test]
    fn support_masks() {
        let region0 = BitMask::from_sites(1, [0]);
        assert_eq!(ps("X").support_mask(&region0), region0);
        let region = BitMask::from_sites(3, [1, 2]);
        assert!(ps("III").support_mask(&region).none());
        assert_eq!(ps("XYZ").support_mask(&region), region);
        assert!(ps("XII").is_trivial_on(&region));
    }

    #[test]
    fn text_form_round_trips() {
        assert_eq!(ps("XIYZ").to_string(), "XIYZ");
        assert!("XQ".parse::<PauliString>().is_err());
    }

    fn arb_string(n: usize) -> impl Strategy<Value = PauliString> {
        prop::collection::vec(0u8..4, n).prop_map(move |v| {
            let mut s = PauliString::identity(n);
            for (i, c) in v.into_iter().enumerate() {
                s.set(i, PauliLetter::ALL[c as usize]);
            }
            s
        })
    }

    proptest! {
        #[test]
        fn multiply_is_commutative_associative_involutive(a in arb_string(70), b in arb_string(70), c in arb_string(70)) {
            let ab = a.multiply(&b).unwrap();
            prop_assert_eq!(&ab, &b.multiply(&a).unwrap());
            prop_assert_eq!(ab.multiply(&c).unwrap(), a.multiply(&b.multiply(&c).unwrap()).unwrap());
            prop_assert!(a.multiply(&a).unwrap().is_identity());
        }

        #[test]
        fn support_matches_content(a in arb_string(70)) {
            let full = BitMask::ones(70);
            let mask = a.support_mask(&full);
            for i in 0..70 {
                prop_assert_eq!(mask.get(i), a.content_at(i) != PauliLetter::I);
            }
        }

        #[test]
        fn commutation_counts_anticommuting_sites(a in arb_string(9), b in arb_string(9)) {
            let anti = (0..9)
                .filter(|&i| {
                    let (p, q) = (a.content_at(i), b.content_at(i));
                    p != PauliLetter::I && q != PauliLetter::I && p != q
                })
                .count();
            prop_assert_eq!(a.commutes(&b).unwrap(), anti % 2 == 0);
        }
    }
}
