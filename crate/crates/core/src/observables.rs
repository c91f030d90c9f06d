//! Ensemble statistics of occupation trajectories.
//!
//! [`EnsembleAccumulator`] keeps integer sums only, so merging partial
//! ensembles is exact and the merged result does not depend on the order in
//! which workers finish. Floating point enters once, in [`finalize`].

use crate::bits::BitMask;
use crate::dp::{displacement, QuditDim};
use crate::{Error, Result};

/// Prefactor relating the averaged OTOC to the mean occupation:
/// `(1 + tr{ρ₀ [X^b]²}) / (q² − 1)`.
pub fn otoc_prefactor(q: u32, trace_rho_xb2: f64) -> Result<f64> {
    if q < 2 {
        return Err(Error::InvalidDimension(q));
    }
    if !(trace_rho_xb2 >= 0.0) {
        return Err(Error::Invalid(format!(
            "trace must be nonnegative, got {trace_rho_xb2}"
        )));
    }
    let q2 = f64::from(q) * f64::from(q);
    Ok((1.0 + trace_rho_xb2) / (q2 - 1.0))
}

/// Averaged OTOC `C̄` from the mean occupation `n̄`.
pub fn otoc_from_occupation(mean_occ: f64, q: u32, trace_rho_xb2: f64) -> Result<f64> {
    Ok(otoc_prefactor(q, trace_rho_xb2)? * mean_occ)
}

/// Scale applied to occupations when reporting densities: the OTOC
/// prefactor with `tr{ρ₀ [X^b]²} = 1` for finite `q`, and 1 (raw
/// occupations) in the bond limit where the prefactor vanishes.
pub fn density_prefactor(q: QuditDim) -> f64 {
    match q {
        QuditDim::Finite(q) => otoc_prefactor(q, 1.0).unwrap_or(1.0),
        QuditDim::Infinite => 1.0,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnsembleAccumulator {
    n: usize,
    depth: usize,
    origin: usize,
    n_traj: u64,
    occ_sum: Vec<u64>,
    occ_sq: Vec<u128>,
    alive: Vec<u64>,
    x2_sum: Vec<u64>,
    x2_sq: Vec<u128>,
    front_sum: Vec<i64>,
    front_sq: Vec<u128>,
    /// Times at which per-site counts are kept, ascending.
    slices: Vec<usize>,
    slice_counts: Vec<Vec<u64>>,
}

impl EnsembleAccumulator {
    pub fn new(n: usize, depth: usize, origin: usize) -> Self {
        let len = depth + 1;
        Self {
            n,
            depth,
            origin,
            n_traj: 0,
            occ_sum: vec![0; len],
            occ_sq: vec![0; len],
            alive: vec![0; len],
            x2_sum: vec![0; len],
            x2_sq: vec![0; len],
            front_sum: vec![0; len],
            front_sq: vec![0; len],
            slices: Vec::new(),
            slice_counts: Vec::new(),
        }
    }

    /// Also keep per-site counts at the times in `slices` (clipped to the depth).
    pub fn with_slices(mut self, slices: &[usize]) -> Self {
        let mut s: Vec<usize> = slices
            .iter()
            .copied()
            .filter(|&t| t <= self.depth)
            .collect();
        s.sort_unstable();
        s.dedup();
        self.slice_counts = vec![vec![0; self.n]; s.len()];
        self.slices = s;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn n_traj(&self) -> u64 {
        self.n_traj
    }

    pub fn slices(&self) -> &[usize] {
        &self.slices
    }

    /// Records the occupation of the current trajectory at time `t`. Times
    /// never observed count as empty.
    pub fn observe(&mut self, t: usize, occ: &BitMask) {
        if t > self.depth || occ.none() {
            return;
        }
        let mut count = 0u64;
        let mut x2 = 0u64;
        let mut right = i64::MIN;
        for site in occ.iter_ones() {
            let x = displacement(site, self.origin, self.n);
            count += 1;
            x2 += (x * x) as u64;
            right = right.max(x);
        }
        self.occ_sum[t] += count;
        self.occ_sq[t] += u128::from(count) * u128::from(count);
        self.alive[t] += 1;
        self.x2_sum[t] += x2;
        self.x2_sq[t] += u128::from(x2) * u128::from(x2);
        self.front_sum[t] += right;
        self.front_sq[t] += (right * right) as u128;
        if let Ok(i) = self.slices.binary_search(&t) {
            for site in occ.iter_ones() {
                self.slice_counts[i][site] += 1;
            }
        }
    }

    pub fn finish_trajectory(&mut self) {
        self.n_traj += 1;
    }

    /// Adds `other` into `self`. Both must describe the same experiment.
    pub fn merge(&mut self, other: &Self) -> Result<()> {
        if (self.n, self.depth, self.origin, &self.slices)
            != (other.n, other.depth, other.origin, &other.slices)
        {
            return Err(Error::Invalid(
                "merging accumulators of different shape".into(),
            ));
        }
        self.n_traj += other.n_traj;
        add(&mut self.occ_sum, &other.occ_sum);
        add(&mut self.occ_sq, &other.occ_sq);
        add(&mut self.alive, &other.alive);
        add(&mut self.x2_sum, &other.x2_sum);
        add(&mut self.x2_sq, &other.x2_sq);
        add(&mut self.front_sum, &other.front_sum);
        add(&mut self.front_sq, &other.front_sq);
        for (a, b) in self.slice_counts.iter_mut().zip(&other.slice_counts) {
            add(a, b);
        }
        Ok(())
    }
}

fn add<T: Copy + std::ops::AddAssign>(a: &mut [T], b: &[T]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x += *y;
    }
}

/// Per-site OTOC at one time, sites ordered by signed displacement.
#[derive(Clone, Debug, PartialEq)]
pub struct OtocSlice {
    pub t: usize,
    pub x: Vec<i64>,
    pub c_mean: Vec<f64>,
    pub c_sem: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Curves {
    pub n: usize,
    pub n_traj: u64,
    pub prefactor: f64,
    pub t: Vec<usize>,
    pub rho: Vec<f64>,
    pub rho_sem: Vec<f64>,
    pub surv: Vec<f64>,
    pub surv_sem: Vec<f64>,
    pub r2: Vec<f64>,
    pub r2_sem: Vec<f64>,
    /// `Σ x² n_x / Σ n_x` over the ensemble.
    pub r2_norm: Vec<f64>,
    /// Mean rightmost displacement over surviving trajectories.
    pub front: Vec<f64>,
    pub front_sem: Vec<f64>,
    /// Standard deviation of the rightmost displacement across survivors.
    pub front_std: Vec<f64>,
    pub otoc: Vec<OtocSlice>,
}

/// Mean and standard error from integer sum and sum of squares over `n` samples.
fn mean_sem(sum: f64, sq: f64, n: f64) -> (f64, f64) {
    if n == 0.0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = sum / n;
    if n < 2.0 {
        return (mean, f64::NAN);
    }
    let var = ((sq - sum * mean) / (n - 1.0)).max(0.0);
    (mean, (var / n).sqrt())
}

/// Converts raw sums into curves, scaling occupations by `prefactor`.
pub fn finalize(acc: &EnsembleAccumulator, prefactor: f64) -> Result<Curves> {
    if acc.n_traj == 0 {
        return Err(Error::Invalid("no trajectories accumulated".into()));
    }
    let n_traj = acc.n_traj as f64;
    let nf = acc.n as f64;
    let len = acc.depth + 1;
    let mut c = Curves {
        n: acc.n,
        n_traj: acc.n_traj,
        prefactor,
        t: (0..len).collect(),
        rho: Vec::with_capacity(len),
        rho_sem: Vec::with_capacity(len),
        surv: Vec::with_capacity(len),
        surv_sem: Vec::with_capacity(len),
        r2: Vec::with_capacity(len),
        r2_sem: Vec::with_capacity(len),
        r2_norm: Vec::with_capacity(len),
        front: Vec::with_capacity(len),
        front_sem: Vec::with_capacity(len),
        front_std: Vec::with_capacity(len),
        otoc: Vec::new(),
    };
    let scale = prefactor / nf;
    for t in 0..len {
        let (m, s) = mean_sem(acc.occ_sum[t] as f64, acc.occ_sq[t] as f64, n_traj);
        c.rho.push(scale * m);
        c.rho_sem.push(scale * s);
        let p = acc.alive[t] as f64 / n_traj;
        c.surv.push(p);
        c.surv_sem.push((p * (1.0 - p) / n_traj).sqrt());
        let (m, s) = mean_sem(acc.x2_sum[t] as f64, acc.x2_sq[t] as f64, n_traj);
        c.r2.push(scale * m);
        c.r2_sem.push(scale * s);
        c.r2_norm.push(if acc.occ_sum[t] == 0 {
            f64::NAN
        } else {
            acc.x2_sum[t] as f64 / acc.occ_sum[t] as f64
        });
        let alive = acc.alive[t] as f64;
        let (m, s) = mean_sem(acc.front_sum[t] as f64, acc.front_sq[t] as f64, alive);
        c.front.push(m);
        c.front_sem.push(s);
        c.front_std.push(s * alive.sqrt());
    }
    for (&t, counts) in acc.slices.iter().zip(&acc.slice_counts) {
        let mut rows: Vec<(i64, u64)> = counts
            .iter()
            .enumerate()
            .map(|(site, &k)| (displacement(site, acc.origin, acc.n), k))
            .collect();
        rows.sort_unstable();
        let mut slice = OtocSlice {
            t,
            x: Vec::with_capacity(rows.len()),
            c_mean: Vec::with_capacity(rows.len()),
            c_sem: Vec::with_capacity(rows.len()),
        };
        for (x, k) in rows {
            let f = k as f64 / n_traj;
            slice.x.push(x);
            slice.c_mean.push(prefactor * f);
            slice
                .c_sem
                .push(prefactor * (f * (1.0 - f) / n_traj).sqrt());
        }
        c.otoc.push(slice);
    }
    Ok(c)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FidelityBounds {
    pub lower: f64,
    pub upper: f64,
}

/// Mean decoding fidelity bounds from survival curves: `p1` for a single
/// seed particle and `pk` for a block of `k`. For `k = 1` both bounds equal
/// `1 − (3/4) P₁(t)`.
pub fn fidelity_from_survival(p1: &[f64], pk: &[f64], k: u32) -> Result<Vec<FidelityBounds>> {
    if k < 1 {
        return Err(Error::InvalidBlock { k: 0, n: 0 });
    }
    if p1.len() != pk.len() {
        return Err(Error::WidthMismatch {
            left: p1.len(),
            right: pk.len(),
        });
    }
    if let Some(bad) = p1.iter().chain(pk).find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::Invalid(format!(
            "survival probability {bad} outside [0, 1]"
        )));
    }
    let w = 1.0 - 2f64.powi(-2 * k as i32);
    Ok(p1
        .iter()
        .zip(pk)
        .map(|(&a, &b)| {
            let (a, b) = if k == 1 { (a, a) } else { (a, b) };
            FidelityBounds {
                lower: 1.0 - w * b,
                upper: 1.0 - w * a,
            }
        })
        .collect())
}

/// Integer sums of coherent informations and Bell ranks over stabilizer
/// realizations, at fixed observation times.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfoAccumulator {
    k: usize,
    times: Vec<usize>,
    n_real: u64,
    ic_e_sum: Vec<i64>,
    ic_e_sq: Vec<i128>,
    ic_s_sum: Vec<i64>,
    ic_s_sq: Vec<i128>,
    /// `rank_hist[i][r]`: realizations with Bell rank `r` at `times[i]`.
    rank_hist: Vec<Vec<u64>>,
}

impl InfoAccumulator {
    pub fn new(k: usize, times: &[usize]) -> Self {
        let mut times = times.to_vec();
        times.sort_unstable();
        times.dedup();
        let len = times.len();
        Self {
            k,
            times,
            n_real: 0,
            ic_e_sum: vec![0; len],
            ic_e_sq: vec![0; len],
            ic_s_sum: vec![0; len],
            ic_s_sq: vec![0; len],
            rank_hist: vec![vec![0; 2 * k + 1]; len],
        }
    }

    pub fn times(&self) -> &[usize] {
        &self.times
    }

    pub fn n_real(&self) -> u64 {
        self.n_real
    }

    /// Records one realization at time `t`; times outside the list are ignored.
    pub fn observe(&mut self, t: usize, ic_e: i64, ic_s: i64, bell_rank: usize) {
        let Ok(i) = self.times.binary_search(&t) else {
            return;
        };
        self.ic_e_sum[i] += ic_e;
        self.ic_e_sq[i] += i128::from(ic_e) * i128::from(ic_e);
        self.ic_s_sum[i] += ic_s;
        self.ic_s_sq[i] += i128::from(ic_s) * i128::from(ic_s);
        self.rank_hist[i][bell_rank.min(2 * self.k)] += 1;
    }

    pub fn finish_realization(&mut self) {
        self.n_real += 1;
    }

    pub fn merge(&mut self, other: &Self) -> Result<()> {
        if (self.k, &self.times) != (other.k, &other.times) {
            return Err(Error::Invalid(
                "merging accumulators of different shape".into(),
            ));
        }
        self.n_real += other.n_real;
        add(&mut self.ic_e_sum, &other.ic_e_sum);
        add(&mut self.ic_e_sq, &other.ic_e_sq);
        add(&mut self.ic_s_sum, &other.ic_s_sum);
        add(&mut self.ic_s_sq, &other.ic_s_sq);
        for (a, b) in self.rank_hist.iter_mut().zip(&other.rank_hist) {
            add(a, b);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InfoCurves {
    pub n_real: u64,
    pub t: Vec<usize>,
    pub ic_e: Vec<f64>,
    pub ic_e_sem: Vec<f64>,
    pub ic_s: Vec<f64>,
    pub ic_s_sem: Vec<f64>,
    pub fidelity: Vec<f64>,
    pub fidelity_sem: Vec<f64>,
}

pub fn finalize_info(acc: &InfoAccumulator) -> Result<InfoCurves> {
    if acc.n_real == 0 {
        return Err(Error::Invalid("no realizations accumulated".into()));
    }
    let n = acc.n_real as f64;
    let mut c = InfoCurves {
        n_real: acc.n_real,
        t: acc.times.clone(),
        ic_e: Vec::new(),
        ic_e_sem: Vec::new(),
        ic_s: Vec::new(),
        ic_s_sem: Vec::new(),
        fidelity: Vec::new(),
        fidelity_sem: Vec::new(),
    };
    for i in 0..acc.times.len() {
        let (m, s) = mean_sem(acc.ic_e_sum[i] as f64, acc.ic_e_sq[i] as f64, n);
        c.ic_e.push(m);
        c.ic_e_sem.push(s);
        let (m, s) = mean_sem(acc.ic_s_sum[i] as f64, acc.ic_s_sq[i] as f64, n);
        c.ic_s.push(m);
        c.ic_s_sem.push(s);
        let (sum, sq) =
            acc.rank_hist[i]
                .iter()
                .enumerate()
                .fold((0.0, 0.0), |(s, q), (r, &cnt)| {
                    let f = 2f64.powi(-(r as i32));
                    (s + cnt as f64 * f, q + cnt as f64 * f * f)
                });
        let (m, s) = mean_sem(sum, sq, n);
        c.fidelity.push(m);
        c.fidelity_sem.push(s);
    }
    Ok(c)
}
