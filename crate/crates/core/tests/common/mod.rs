#![allow(dead_code)]

use std::path::PathBuf;

use num_complex::Complex64 as C;
use qdisplace::bases::{self, BasisFamily};
use qdisplace::tensor::Ket;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn golden_path(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(rel)
}

pub fn read_golden(rel: &str) -> String {
    std::fs::read_to_string(golden_path(rel)).unwrap_or_else(|e| panic!("reading golden {rel}: {e}"))
}

/// Parses `+1/4`, `-1`, `0`.
pub fn parse_dyadic(s: &str) -> f64 {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().unwrap()),
        None => (s, 1.0),
    };
    num.parse::<f64>().unwrap() / den
}

/// Data rows of a golden table: first column, rest of the columns.
pub fn golden_rows(text: &str) -> Vec<(String, Vec<String>)> {
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let mut cols = l.split_whitespace().map(str::to_string);
            let head = cols.next().unwrap();
            (head, cols.collect())
        })
        .collect()
}

/// Reorders big-endian amplitudes from `labels` to `order` by walking digits.
pub fn regroup(amps: &[C], dims: &[usize], labels: &[&str], order: &[&str]) -> Vec<C> {
    let pos: Vec<usize> = order.iter().map(|o| labels.iter().position(|l| l == o).unwrap()).collect();
    let new_dims: Vec<usize> = pos.iter().map(|&p| dims[p]).collect();
    let mut out = vec![C::new(0.0, 0.0); amps.len()];
    for (i, a) in amps.iter().enumerate() {
        let mut digits = vec![0; dims.len()];
        let mut rest = i;
        for k in (0..dims.len()).rev() {
            digits[k] = rest % dims[k];
            rest /= dims[k];
        }
        let mut j = 0;
        for (k, &p) in pos.iter().enumerate() {
            j = j * new_dims[k] + digits[p];
        }
        out[j] = *a;
    }
    out
}

pub fn regroup_ket(k: &Ket, order: &[&str]) -> Vec<C> {
    let labels = k.shape().labels();
    regroup(k.amplitudes(), &k.shape().dims(), &labels, order)
}

pub fn dot(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Outcome probabilities of measuring `measured` (16-dim) in `family`.
pub fn oracle_probabilities(total: &Ket, family: BasisFamily, measured: &[&str]) -> Vec<f64> {
    let labels = total.shape().labels();
    let mut order: Vec<&str> = measured.to_vec();
    order.extend(labels.iter().filter(|l| !measured.contains(l)));
    let amps = regroup_ket(total, &order);
    let rest = amps.len() / 16;
    bases::full_basis(family)
        .iter()
        .map(|(_, b)| {
            let b = b.amplitudes();
            (0..rest).map(|r| (0..16).map(|m| b[m].conj() * amps[m * rest + r]).sum::<C>().norm_sqr()).sum()
        })
        .collect()
}

pub fn random_amps(rng: &mut ChaCha8Rng, n: usize) -> Vec<C> {
    let raw: Vec<C> = (0..n).map(|_| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    raw.into_iter().map(|a| a / norm).collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
