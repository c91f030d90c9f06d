use std::collections::{HashMap, VecDeque};
use std::ops::{Add, Mul, Sub};

use crate::clifford::TwoQubitClifford;
use crate::pauli::{PauliLetter, PauliString};
use crate::{Error, Result};

const MAX_DENSE_SITES: usize = 3;
const EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub const ZERO: Complex = Complex { re: 0.0, im: 0.0 };
    pub const ONE: Complex = Complex { re: 1.0, im: 0.0 };
    pub const I: Complex = Complex { re: 0.0, im: 1.0 };

    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn conj(self) -> Self {
        Self::new(self.re, -self.im)
    }

    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.re * s, self.im * s)
    }
}

impl Add for Complex {
    type Output = Complex;
    fn add(self, o: Complex) -> Complex {
        Complex::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for Complex {
    type Output = Complex;
    fn sub(self, o: Complex) -> Complex {
        Complex::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for Complex {
    type Output = Complex;
    fn mul(self, o: Complex) -> Complex {
        Complex::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
}

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    pub dim: usize,
    pub data: Vec<Complex>,
}

impl DenseMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex::ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex::ONE;
        }
        m
    }

    fn from_real(dim: usize, v: &[f64]) -> Self {
        Self {
            dim,
            data: v.iter().map(|&x| Complex::new(x, 0.0)).collect(),
        }
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> Complex {
        self.data[r * self.dim + c]
    }

    pub fn mul(&self, o: &Self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for r in 0..d {
            for k in 0..d {
                let a = self.at(r, k);
                if a == Complex::ZERO {
                    continue;
                }
                for c in 0..d {
                    out.data[r * d + c] = out.data[r * d + c] + a * o.at(k, c);
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for r in 0..d {
            for c in 0..d {
                out.data[c * d + r] = self.at(r, c).conj();
            }
        }
        out
    }

    pub fn kron(&self, o: &Self) -> Self {
        let d = self.dim * o.dim;
        let mut out = Self::zeros(d);
        for r1 in 0..self.dim {
            for c1 in 0..self.dim {
                let a = self.at(r1, c1);
                for r2 in 0..o.dim {
                    for c2 in 0..o.dim {
                        out.data[(r1 * o.dim + r2) * d + c1 * o.dim + c2] = a * o.at(r2, c2);
                    }
                }
            }
        }
        out
    }

    /// `tr(self† o) / dim`.
    pub fn overlap(&self, o: &Self) -> Complex {
        let s = self
            .data
            .iter()
            .zip(&o.data)
            .fold(Complex::ZERO, |acc, (a, b)| acc + a.conj() * *b);
        s.scale(1.0 / self.dim as f64)
    }

    fn approx_eq(&self, o: &Self) -> bool {
        self.data
            .iter()
            .zip(&o.data)
            .all(|(a, b)| (*a - *b).norm_sqr() < EPS)
    }
}

fn letter_matrix(l: PauliLetter) -> DenseMatrix {
    match l {
        PauliLetter::I => DenseMatrix::identity(2),
        PauliLetter::X => DenseMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]),
        PauliLetter::Z => DenseMatrix::from_real(2, &[1.0, 0.0, 0.0, -1.0]),
        PauliLetter::Y => DenseMatrix {
            dim: 2,
            data: vec![
                Complex::ZERO,
                Complex::new(0.0, -1.0),
                Complex::I,
                Complex::ZERO,
            ],
        },
    }
}

/// Dense matrix of a Pauli string, site 0 as the most significant factor.
pub fn pauli_matrix(s: &PauliString) -> DenseMatrix {
    (0..s.width()).fold(DenseMatrix::identity(1), |m, i| {
        m.kron(&letter_matrix(s.content_at(i)))
    })
}

/// Identifies `m` as a Pauli string up to a phase.
fn identify(m: &DenseMatrix, n: usize) -> Result<PauliString> {
    let mut found = None;
    for code in 0..4usize.pow(n as u32) {
        let mut s = PauliString::identity(n);
        for i in 0..n {
            s.set(i, PauliLetter::ALL[(code >> (2 * i)) & 3]);
        }
        let c = pauli_matrix(&s).overlap(m);
        let w = c.norm_sqr();
        if (w - 1.0).abs() < EPS {
            if found.is_some() {
                return Err(Error::NotAPauli);
            }
            found = Some(s);
        } else if w > EPS {
            return Err(Error::NotAPauli);
        }
    }
    found.ok_or(Error::NotAPauli)
}

/// Embeds a two-qubit unitary acting on `(i, j)` into `n` qubits; `i` is
/// the gate's first (more significant) qubit.
fn embed(u: &DenseMatrix, n: usize, i: usize, j: usize) -> DenseMatrix {
    let d = 1 << n;
    let bit = |state: usize, site: usize| (state >> (n - 1 - site)) & 1;
    let mut out = DenseMatrix::zeros(d);
    let mask = (1 << (n - 1 - i)) | (1 << (n - 1 - j));
    for r in 0..d {
        for c in 0..d {
            if r & !mask != c & !mask {
                continue;
            }
            let lr = bit(r, i) << 1 | bit(r, j);
            let lc = bit(c, i) << 1 | bit(c, j);
            out.data[r * d + c] = u.at(lr, lc);
        }
    }
    out
}

/// Images `U† P U` of the four generators, in the gate encoding.
fn images_of(u: &DenseMatrix) -> Result<[u8; 4]> {
    let mut out = [0u8; 4];
    for (slot, (site, letter)) in [
        (0, PauliLetter::X),
        (0, PauliLetter::Z),
        (1, PauliLetter::X),
        (1, PauliLetter::Z),
    ]
    .into_iter()
    .enumerate()
    {
        let p = pauli_matrix(&PauliString::single(2, site, letter));
        let img = identify(&u.adjoint().mul(&p).mul(u), 2)?;
        let (xa, za) = img.content_at(0).bits();
        let (xb, zb) = img.content_at(1).bits();
        out[slot] = xa as u8 | (za as u8) << 1 | (xb as u8) << 2 | (zb as u8) << 3;
    }
    Ok(out)
}

/// A unitary representative for every two-qubit Clifford modulo phases,
/// found by breadth-first search from Hadamard, phase and CNOT gates.
pub struct CliffordCatalog {
    unitaries: HashMap<[u8; 4], DenseMatrix>,
}

impl CliffordCatalog {
    pub fn build() -> Self {
        let h = DenseMatrix::from_real(2, &[1.0, 1.0, 1.0, -1.0]);
        let h = DenseMatrix {
            dim: 2,
            data: h
                .data
                .iter()
                .map(|c| c.scale(std::f64::consts::FRAC_1_SQRT_2))
                .collect(),
        };
        let s = DenseMatrix {
            dim: 2,
            data: vec![Complex::ONE, Complex::ZERO, Complex::ZERO, Complex::I],
        };
        let id = DenseMatrix::identity(2);
        let cnot = DenseMatrix::from_real(
            4,
            &[
                1.0, 0.0, 0.0, 0.0, //
                0.0, 1.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, 1.0, //
                0.0, 0.0, 1.0, 0.0,
            ],
        );
        let generators = [h.kron(&id), id.kron(&h), s.kron(&id), id.kron(&s), cnot];
        let mut unitaries = HashMap::new();
        let start = DenseMatrix::identity(4);
        unitaries.insert(
            images_of(&start).expect("identity is Clifford"),
            start.clone(),
        );
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for g in &generators {
                let w = g.mul(&u);
                let key = images_of(&w).expect("generated gates are Clifford");
                if let std::collections::hash_map::Entry::Vacant(e) = unitaries.entry(key) {
                    e.insert(w.clone());
                    queue.push_back(w);
                }
            }
        }
        Self { unitaries }
    }

    pub fn len(&self) -> usize {
        self.unitaries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unitaries.is_empty()
    }

    pub fn unitary(&self, g: &TwoQubitClifford) -> Option<&DenseMatrix> {
        self.unitaries.get(&g.images())
    }
}

/// `U† P U` computed with dense matrices on `n ≤ 3` qubits.
pub fn dense_conjugate(
    catalog: &CliffordCatalog,
    g: &TwoQubitClifford,
    sites: (usize, usize),
    s: &PauliString,
) -> Result<PauliString> {
    let n = s.width();
    if n > MAX_DENSE_SITES {
        return Err(Error::OracleTooLarge {
            n,
            max: MAX_DENSE_SITES,
        });
    }
    let (i, j) = sites;
    if i >= n || j >= n {
        return Err(Error::SiteOutOfRange {
            site: i.max(j),
            width: n,
        });
    }
    if i == j {
        return Err(Error::SiteCollision(i));
    }
    let u = catalog
        .unitary(g)
        .ok_or(Error::InvalidGate("not in the Clifford catalog"))?;
    let full = embed(u, n, i, j);
    identify(&full.adjoint().mul(&pauli_matrix(s)).mul(&full), n)
}

/// Whether the dense matrices of `a` and `b` commute.
pub fn dense_commutes(a: &PauliString, b: &PauliString) -> Result<bool> {
    if a.width() != b.width() {
        return Err(Error::WidthMismatch {
            left: a.width(),
            right: b.width(),
        });
    }
    if a.width() > MAX_DENSE_SITES {
        return Err(Error::OracleTooLarge {
            n: a.width(),
            max: MAX_DENSE_SITES,
        });
    }
    let (ma, mb) = (pauli_matrix(a), pauli_matrix(b));
    Ok(ma.mul(&mb).approx_eq(&mb.mul(&ma)))
}
