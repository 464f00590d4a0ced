//! Dense complex state vectors over small mixed-radix registers.
//!
//! A register is an ordered list of labelled subsystems, each of dimension 2
//! (qubit) or 4 (ququart). Amplitudes are stored big-endian: the leftmost
//! subsystem is the most significant digit of the flat index.
//!
//! Every operation is a pure function returning a fresh [`Ket`].

use std::collections::HashSet;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

/// Largest total register dimension the simulator accepts.
pub const MAX_DIM: usize = 1024;

/// Norm and unitarity tolerance used throughout.
pub const TOL: f64 = 1e-12;

/// Probabilities at or below this are treated as empty branches.
pub const ZERO_BRANCH: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TensorError {
    #[error("duplicate subsystem label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),
    #[error("subsystem `{label}` has dimension {dim}; only 2 and 4 are supported")]
    BadDimension { label: String, dim: usize },
    #[error("register dimension {0} exceeds the limit of {MAX_DIM}")]
    TooLarge(usize),
    #[error("amplitude count {got} does not match register dimension {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite amplitude at index {0}")]
    NonFinite(usize),
    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch { left: Vec<usize>, right: Vec<usize> },
    #[error("`{0:?}` is not a permutation of the register labels")]
    NotAPermutation(Vec<String>),
    #[error("matrix of dimension {matrix} cannot act on targets of dimension {targets}")]
    DimMismatch { matrix: usize, targets: usize },
    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),
    #[error("branch probability {0:e} is too small to renormalise")]
    ZeroBranch(f64),
}

pub type Result<T> = std::result::Result<T, TensorError>;

/// One labelled factor of a register.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subsystem {
    pub label: String,
    pub dim: usize,
}

impl Subsystem {
    pub fn new(label: impl Into<String>, dim: usize) -> Self {
        Self { label: label.into(), dim }
    }
}

/// Ordered list of labelled subsystems.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RegisterShape {
    subsystems: Vec<Subsystem>,
}

impl RegisterShape {
    pub fn new(subsystems: Vec<Subsystem>) -> Result<Self> {
        let mut seen = HashSet::new();
        for s in &subsystems {
            if s.dim != 2 && s.dim != 4 {
                return Err(TensorError::BadDimension { label: s.label.clone(), dim: s.dim });
            }
            if !seen.insert(s.label.as_str()) {
                return Err(TensorError::DuplicateLabel(s.label.clone()));
            }
        }
        let total: usize = subsystems.iter().map(|s| s.dim).product();
        if total > MAX_DIM {
            return Err(TensorError::TooLarge(total));
        }
        Ok(Self { subsystems })
    }

    /// Builds a shape from `(label, dim)` pairs.
    pub fn from_pairs(pairs: &[(&str, usize)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(l, d)| Subsystem::new(l, d)).collect())
    }

    pub fn subsystems(&self) -> &[Subsystem] {
        &self.subsystems
    }

    pub fn labels(&self) -> Vec<&str> {
        self.subsystems.iter().map(|s| s.label.as_str()).collect()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.subsystems.iter().map(|s| s.dim).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.subsystems.iter().map(|s| s.dim).product()
    }

    pub fn len(&self) -> usize {
        self.subsystems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.subsystems.iter().position(|s| s.label == label)
    }

    pub fn concat(&self, other: &RegisterShape) -> Result<Self> {
        let mut subs = self.subsystems.clone();
        subs.extend(other.subsystems.iter().cloned());
        Self::new(subs)
    }

    /// Same dims, new labels.
    pub fn relabel(&self, labels: &[&str]) -> Result<Self> {
        if labels.len() != self.subsystems.len() {
            return Err(TensorError::ShapeMismatch { left: self.dims(), right: vec![labels.len()] });
        }
        Self::new(self.subsystems.iter().zip(labels).map(|(s, l)| Subsystem::new(*l, s.dim)).collect())
    }
}

impl fmt::Display for RegisterShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, s) in self.subsystems.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}:{}", s.label, s.dim)?;
        }
        write!(f, "]")
    }
}

/// Splits a flat big-endian index into per-subsystem digits.
pub fn digits_of(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
    out
}

/// Inverse of [`digits_of`].
pub fn index_of(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&v, &d)| acc * d + v)
}

/// Dense amplitude vector over a [`RegisterShape`].
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    shape: RegisterShape,
    amps: Vec<C64>,
}

impl Ket {
    pub fn new(shape: RegisterShape, amps: Vec<C64>) -> Result<Self> {
        let expected = shape.total_dim();
        if amps.len() != expected {
            return Err(TensorError::LengthMismatch { expected, got: amps.len() });
        }
        if let Some(i) = amps.iter().position(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(TensorError::NonFinite(i));
        }
        Ok(Self { shape, amps })
    }

    /// Computational basis state with the given per-subsystem values.
    pub fn basis(shape: RegisterShape, digits: &[usize]) -> Result<Self> {
        let dims = shape.dims();
        if digits.len() != dims.len() || digits.iter().zip(&dims).any(|(v, d)| v >= d) {
            return Err(TensorError::ShapeMismatch { left: dims, right: digits.to_vec() });
        }
        let mut amps = vec![C64::new(0.0, 0.0); shape.total_dim()];
        amps[index_of(digits, &dims)] = C64::new(1.0, 0.0);
        Ok(Self { shape, amps })
    }

    pub fn zeros(shape: RegisterShape) -> Self {
        let n = shape.total_dim();
        Self { shape, amps: vec![C64::new(0.0, 0.0); n] }
    }

    pub fn shape(&self) -> &RegisterShape {
        &self.shape
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() < TOL
    }

    pub fn normalized(&self) -> Result<Self> {
        let p = self.norm_sqr();
        if p <= ZERO_BRANCH {
            return Err(TensorError::ZeroBranch(p));
        }
        Ok(self.scaled(C64::new(1.0 / p.sqrt(), 0.0)))
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self { shape: self.shape.clone(), amps: self.amps.iter().map(|a| a * factor).collect() }
    }

    /// `self + factor * other`; shapes must agree exactly, labels included.
    pub fn add_scaled(&self, other: &Ket, factor: C64) -> Result<Self> {
        if self.shape != other.shape {
            return Err(TensorError::ShapeMismatch { left: self.shape.dims(), right: other.shape.dims() });
        }
        let amps = self.amps.iter().zip(&other.amps).map(|(a, b)| a + b * factor).collect();
        Ok(Self { shape: self.shape.clone(), amps })
    }

    pub fn relabel(&self, labels: &[&str]) -> Result<Self> {
        Ok(Self { shape: self.shape.relabel(labels)?, amps: self.amps.clone() })
    }

    /// Largest entrywise distance to `other`, ignoring labels.
    pub fn max_abs_diff(&self, other: &Ket) -> f64 {
        if self.amps.len() != other.amps.len() {
            return f64::INFINITY;
        }
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

impl fmt::Display for Ket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dims = self.shape.dims();
        let mut first = true;
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm() < TOL {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let digits: String = digits_of(i, &dims).iter().map(|d| d.to_string()).collect();
            write!(f, "({:.6}{:+.6}i)|{}>", a.re, a.im, digits)?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Square complex matrix, row-major. Construction checks unitarity.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    dim: usize,
    entries: Vec<C64>,
}

impl UnitaryMatrix {
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(TensorError::LengthMismatch { expected: dim * dim, got: entries.len() });
        }
        let m = Self { dim, entries };
        let dev = m.unitarity_deviation();
        if dev >= TOL {
            return Err(TensorError::NotUnitary(dev));
        }
        Ok(m)
    }

    /// Builds from real rows, e.g. the signed permutation matrices of a
    /// printed correction table.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(TensorError::LengthMismatch { expected: dim * dim, got: rows.iter().map(|r| r.len()).sum() });
        }
        Self::new(dim, rows.iter().flat_map(|r| r.iter().map(|&x| C64::new(x, 0.0))).collect())
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = C64::new(1.0, 0.0);
        }
        Self { dim, entries }
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let dim = diag.len();
        let mut entries = vec![C64::new(0.0, 0.0); dim * dim];
        for (i, &d) in diag.iter().enumerate() {
            entries[i * dim + i] = C64::new(d, 0.0);
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[row * self.dim + col]
    }

    pub fn row(&self, row: usize) -> &[C64] {
        &self.entries[row * self.dim..(row + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut entries = vec![C64::new(0.0, 0.0); n * n];
        for r in 0..n {
            for c in 0..n {
                entries[c * n + r] = self.entries[r * n + c].conj();
            }
        }
        Self { dim: n, entries }
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self { dim: self.dim, entries: self.entries.iter().map(|e| e * factor).collect() }
    }

    /// Plain matrix product; unitarity is closed under it.
    pub fn compose(&self, rhs: &UnitaryMatrix) -> Self {
        Self { dim: self.dim, entries: matmul(&self.entries, &rhs.entries, self.dim) }
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let n = self.dim;
        (0..n).map(|r| (0..n).map(|c| self.entries[r * n + c] * v[c]).sum()).collect()
    }

    /// `max |(U U†)_{ij} - δ_ij|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let adj = self.adjoint();
        let prod = matmul(&self.entries, &adj.entries, self.dim);
        max_identity_deviation(&prod, self.dim)
    }

    pub fn max_abs_diff(&self, other: &UnitaryMatrix) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.entries.iter().zip(&other.entries).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Returns the phase `e^{iθ}` with `self = e^{iθ} other` entrywise within
    /// `tol`, if one exists.
    pub fn phase_relative_to(&self, other: &UnitaryMatrix, tol: f64) -> Option<C64> {
        if self.dim != other.dim {
            return None;
        }
        let (k, pivot) = other.entries.iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))?;
        if pivot.norm() < tol {
            return None;
        }
        let phase = self.entries[k] / pivot;
        if (phase.norm() - 1.0).abs() > tol {
            return None;
        }
        (self.max_abs_diff(&other.scaled(phase)) < tol).then_some(phase)
    }
}

pub(crate) fn matmul(a: &[C64], b: &[C64], n: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); n * n];
    for r in 0..n {
        for k in 0..n {
            let a_rk = a[r * n + k];
            if a_rk == C64::new(0.0, 0.0) {
                continue;
            }
            for c in 0..n {
                out[r * n + c] += a_rk * b[k * n + c];
            }
        }
    }
    out
}

pub(crate) fn max_identity_deviation(m: &[C64], n: usize) -> f64 {
    let mut dev: f64 = 0.0;
    for r in 0..n {
        for c in 0..n {
            let target = if r == c { 1.0 } else { 0.0 };
            dev = dev.max((m[r * n + c] - C64::new(target, 0.0)).norm());
        }
    }
    dev
}

/// `a ⊗ b`; the result's shape is `a`'s subsystems followed by `b`'s.
pub fn tensor_product(a: &Ket, b: &Ket) -> Result<Ket> {
    let shape = a.shape.concat(&b.shape)?;
    let mut amps = Vec::with_capacity(a.len() * b.len());
    for x in &a.amps {
        amps.extend(b.amps.iter().map(|y| x * y));
    }
    Ok(Ket { shape, amps })
}

/// `<a|b>`, conjugate-linear in `a`. Only the dim lists must agree.
pub fn inner_product(a: &Ket, b: &Ket) -> Result<C64> {
    if a.shape.dims() != b.shape.dims() {
        return Err(TensorError::ShapeMismatch { left: a.shape.dims(), right: b.shape.dims() });
    }
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}

/// Reorders subsystems so the result's labels follow `order`; every physical
/// amplitude is carried over unchanged.
pub fn permute_subsystems(k: &Ket, order: &[&str]) -> Result<Ket> {
    let labels = k.shape.labels();
    let not_perm = || TensorError::NotAPermutation(order.iter().map(|s| s.to_string()).collect());
    if order.len() != labels.len() {
        return Err(not_perm());
    }
    let mut source = Vec::with_capacity(order.len());
    for l in order {
        let pos = k.shape.position(l).ok_or_else(not_perm)?;
        if source.contains(&pos) {
            return Err(not_perm());
        }
        source.push(pos);
    }
    if source.iter().enumerate().all(|(i, &p)| i == p) {
        return Ok(k.clone());
    }
    let old_dims = k.shape.dims();
    let new_shape = RegisterShape { subsystems: source.iter().map(|&p| k.shape.subsystems[p].clone()).collect() };
    let new_dims = new_shape.dims();
    // stride of each new axis inside the old flat index
    let mut old_strides = vec![1usize; old_dims.len()];
    for i in (0..old_dims.len().saturating_sub(1)).rev() {
        old_strides[i] = old_strides[i + 1] * old_dims[i + 1];
    }
    let strides: Vec<usize> = source.iter().map(|&p| old_strides[p]).collect();
    let mut amps = Vec::with_capacity(k.len());
    let mut digits = vec![0usize; new_dims.len()];
    for _ in 0..k.len() {
        let old: usize = digits.iter().zip(&strides).map(|(d, s)| d * s).sum();
        amps.push(k.amps[old]);
        for ax in (0..digits.len()).rev() {
            digits[ax] += 1;
            if digits[ax] < new_dims[ax] {
                break;
            }
            digits[ax] = 0;
        }
    }
    Ok(Ket { shape: new_shape, amps })
}

/// Unnormalised partial inner product of `probe` (on `targets`) with `k`.
///
/// The result lives on the remaining subsystems, in their original order.
pub fn partial_inner(k: &Ket, targets: &[&str], probe: &Ket) -> Result<Ket> {
    let (front, rest_labels) = bring_to_front(k, targets)?;
    let target_dims: Vec<usize> = front.shape.dims()[..targets.len()].to_vec();
    if probe.shape.dims() != target_dims {
        return Err(TensorError::ShapeMismatch { left: probe.shape.dims(), right: target_dims });
    }
    let head = probe.len();
    let tail = front.len() / head;
    let mut amps = vec![C64::new(0.0, 0.0); tail];
    for (i, p) in probe.amps.iter().enumerate() {
        let pc = p.conj();
        if pc == C64::new(0.0, 0.0) {
            continue;
        }
        for (j, slot) in amps.iter_mut().enumerate() {
            *slot += pc * front.amps[i * tail + j];
        }
    }
    let shape = RegisterShape { subsystems: front.shape.subsystems[targets.len()..].to_vec() };
    debug_assert_eq!(shape.labels(), rest_labels);
    Ok(Ket { shape, amps })
}

/// Outcome of a projective measurement of some subsystems onto one probe.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub probability: f64,
    pub residual: Ket,
}

/// Projects `targets` onto `probe`, returning the branch probability and the
/// renormalised conditional state of the remaining subsystems.
pub fn project_measure(k: &Ket, targets: &[&str], probe: &Ket) -> Result<Projection> {
    let raw = partial_inner(k, targets, probe)?;
    let probability = raw.norm_sqr();
    let residual = raw.normalized()?;
    Ok(Projection { probability, residual })
}

/// Applies `u` to the `targets` subsystems (in the listed order), leaving
/// the register order unchanged.
pub fn apply_unitary(u: &UnitaryMatrix, k: &Ket, targets: &[&str]) -> Result<Ket> {
    let (front, _) = bring_to_front(k, targets)?;
    let head: usize = front.shape.dims()[..targets.len()].iter().product();
    if head != u.dim {
        return Err(TensorError::DimMismatch { matrix: u.dim, targets: head });
    }
    let tail = front.len() / head;
    let mut amps = vec![C64::new(0.0, 0.0); front.len()];
    for r in 0..head {
        for c in 0..head {
            let e = u.get(r, c);
            if e == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..tail {
                amps[r * tail + j] += e * front.amps[c * tail + j];
            }
        }
    }
    let moved = Ket { shape: front.shape, amps };
    permute_subsystems(&moved, &k.shape.labels())
}

/// `|<a|b>|²`; equals 1 exactly when the states agree up to global phase.
pub fn fidelity_up_to_phase(a: &Ket, b: &Ket) -> Result<f64> {
    Ok(inner_product(a, b)?.norm_sqr().clamp(0.0, 1.0))
}

fn bring_to_front<'a>(k: &'a Ket, targets: &[&'a str]) -> Result<(Ket, Vec<&'a str>)> {
    let mut seen = HashSet::new();
    for t in targets {
        if k.shape.position(t).is_none() {
            return Err(TensorError::UnknownLabel(t.to_string()));
        }
        if !seen.insert(*t) {
            return Err(TensorError::DuplicateLabel(t.to_string()));
        }
    }
    let rest: Vec<&str> = k.shape.labels().into_iter().filter(|l| !seen.contains(l)).collect();
    let order: Vec<&str> = targets.iter().copied().chain(rest.iter().copied()).collect();
    Ok((permute_subsystems(k, &order)?, rest))
}
