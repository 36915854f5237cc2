#![allow(dead_code)]

use faer::Mat;
use proptest::prelude::*;
use qspoof_core::c64;
use qspoof_core::qmat::{eig_hermitian, DensityOperator, HermitianOperator};

/// Hermitian operator from `2 d^2` uniform reals: upper triangle and diagonal.
pub fn hermitian_from(d: usize, raw: &[f64]) -> HermitianOperator {
    let m = Mat::from_fn(d, d, |i, j| c64::new(raw[2 * (i * d + j)], raw[2 * (i * d + j) + 1]));
    HermitianOperator::from_mat(m).unwrap()
}

/// `G G† / Tr(G G†)` plus a small identity shift when `full_rank`.
pub fn density_from(d: usize, raw: &[f64], full_rank: bool) -> DensityOperator {
    let g = Mat::from_fn(d, d, |i, j| c64::new(raw[2 * (i * d + j)], raw[2 * (i * d + j) + 1]));
    let mut gg = &g * g.adjoint();
    if full_rank {
        for i in 0..d {
            gg[(i, i)] += c64::new(0.05, 0.0);
        }
    }
    let tr: f64 = (0..d).map(|i| gg[(i, i)].re).sum();
    let op = HermitianOperator::from_mat(Mat::from_fn(d, d, |i, j| gg[(i, j)] / tr)).unwrap();
    DensityOperator::new(op).unwrap()
}

/// Unitary from the eigenvectors of a random Hermitian matrix.
pub fn unitary_from(d: usize, raw: &[f64]) -> Mat<c64> {
    eig_hermitian(&hermitian_from(d, raw)).unwrap().eigenvectors().to_owned()
}

pub fn raw(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, 2 * d * d)
}

pub fn probabilities(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01..1.0f64, d).prop_map(|w| {
        let s: f64 = w.iter().sum();
        w.into_iter().map(|x| x / s).collect()
    })
}

/// Every string over `0..d` of length `n`, most significant digit first.
pub fn outcome_strings(d: usize, n: usize) -> Vec<Vec<usize>> {
    let total = d.pow(n as u32);
    (0..total)
        .map(|mut idx| {
            let mut s = vec![0; n];
            for slot in (0..n).rev() {
                s[slot] = idx % d;
                idx /= d;
            }
            s
        })
        .collect()
}

/// Classical likelihood-ratio test: accept `s` iff `prod r1[s_i] > tau prod r0[s_i]`.
pub fn classical_lrt(r1: &[f64], r0: &[f64], n: usize, tau: f64) -> (f64, f64) {
    let mut p_d = 0.0;
    let mut p_f = 0.0;
    for s in outcome_strings(r1.len(), n) {
        let l1: f64 = s.iter().map(|&i| r1[i]).product();
        let l0: f64 = s.iter().map(|&i| r0[i]).product();
        if l1 > tau * l0 {
            p_d += l1;
            p_f += l0;
        }
    }
    (p_d, p_f)
}

/// `sum p ln(p / q)` over `p > 0`; infinite if `q` vanishes where `p` does not.
pub fn classical_kl(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(pi, _)| **pi > 0.0)
        .map(|(pi, qi)| if *qi == 0.0 { f64::INFINITY } else { pi * (pi / qi).ln() })
        .sum()
}
