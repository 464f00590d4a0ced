//! The sixteen-element W/X/Y/Z maximally entangled bases.
//!
//! Every family is produced the same way: pick four orthonormal computational
//! product states `A, B, C, D` for each index `α ∈ {0..3}` and combine them
//! with the fixed ±½ sign pattern below. Families differ only in the
//! quadruple recipe and the register they live on.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::record::Record;
use crate::tensor::{self, inner_product, Ket, RegisterShape, TensorError, C64, TOL};

/// Rows give W, X, Y, Z in terms of A, B, C, D (times ½). The matrix is
/// symmetric, so the inverse transform has the same form.
pub const SIGNS: [[f64; 4]; 4] =
    [[1.0, 1.0, 1.0, 1.0], [1.0, 1.0, -1.0, -1.0], [1.0, -1.0, 1.0, -1.0], [1.0, -1.0, -1.0, 1.0]];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BasisError {
    #[error("basis index {0} out of range 0..=3")]
    InvalidIndex(u8),
    #[error("input vectors are not orthonormal (Gram deviation {0:e})")]
    NotOrthonormal(f64),
    #[error("unknown basis family `{0}`")]
    UnknownFamily(String),
    #[error("cannot parse basis label `{0}`")]
    BadLabel(String),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

pub type Result<T> = std::result::Result<T, BasisError>;

/// ι: ququart level `i` ↔ qubit pair `(r, s)` with `i = 2r + s`.
pub fn iota(i: usize) -> (usize, usize) {
    debug_assert!(i < 4);
    (i >> 1, i & 1)
}

pub fn iota_inverse(r: usize, s: usize) -> usize {
    2 * r + s
}

/// Maps a single-ququart ket onto a qubit pair with the given labels.
///
/// With big-endian indexing the flat amplitude order is unchanged.
pub fn iota_ket(k: &Ket, labels: [&str; 2]) -> Result<Ket> {
    if k.shape().dims() != [4] {
        return Err(TensorError::ShapeMismatch { left: k.shape().dims(), right: vec![4] }.into());
    }
    let shape = RegisterShape::from_pairs(&[(labels[0], 2), (labels[1], 2)])?;
    Ok(Ket::new(shape, k.amplitudes().to_vec())?)
}

/// Inverse of [`iota_ket`].
pub fn iota_inverse_ket(k: &Ket, label: &str) -> Result<Ket> {
    if k.shape().dims() != [2, 2] {
        return Err(TensorError::ShapeMismatch { left: k.shape().dims(), right: vec![2, 2] }.into());
    }
    let shape = RegisterShape::from_pairs(&[(label, 4)])?;
    Ok(Ket::new(shape, k.amplitudes().to_vec())?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    W,
    X,
    Y,
    Z,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::W, Letter::X, Letter::Y, Letter::Z];

    pub fn ordinal(self) -> usize {
        self as usize
    }

    pub fn as_char(self) -> char {
        ['W', 'X', 'Y', 'Z'][self.ordinal()]
    }
}

/// One element of a family: a letter and an index `α` (also written `rs`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisLabel {
    pub letter: Letter,
    index: u8,
}

impl BasisLabel {
    pub fn new(letter: Letter, index: u8) -> Result<Self> {
        if index > 3 {
            return Err(BasisError::InvalidIndex(index));
        }
        Ok(Self { letter, index })
    }

    pub fn index(self) -> u8 {
        self.index
    }

    /// Position in the fixed order W_0..W_3, X_0..X_3, Y_0..Y_3, Z_0..Z_3.
    pub fn ordinal(self) -> usize {
        self.letter.ordinal() * 4 + self.index as usize
    }

    pub fn from_ordinal(n: usize) -> Option<Self> {
        (n < 16).then(|| Self { letter: Letter::ALL[n / 4], index: (n % 4) as u8 })
    }

    /// All sixteen labels in fixed order.
    pub fn all() -> impl Iterator<Item = BasisLabel> {
        (0..16).map(|n| Self::from_ordinal(n).unwrap())
    }

    /// The index as the qubit pair `rs`.
    pub fn rs(self) -> String {
        let (r, s) = iota(self.index as usize);
        format!("{r}{s}")
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.letter.as_char(), self.index)
    }
}

impl FromStr for BasisLabel {
    type Err = BasisError;

    /// Accepts `W_0`, `w0`, or the pair form `W_rs` such as `Z_10`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || BasisError::BadLabel(s.to_string());
        let t = s.trim();
        let mut chars = t.chars();
        let letter = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('W') => Letter::W,
            Some('X') => Letter::X,
            Some('Y') => Letter::Y,
            Some('Z') => Letter::Z,
            _ => return Err(bad()),
        };
        let rest = chars.as_str();
        let rest = rest.strip_prefix('_').unwrap_or(rest);
        let index = match rest.as_bytes() {
            [d @ b'0'..=b'3'] => d - b'0',
            [r @ b'0'..=b'1', s @ b'0'..=b'1'] => iota_inverse((r - b'0') as usize, (s - b'0') as usize) as u8,
            _ => return Err(bad()),
        };
        BasisLabel::new(letter, index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisFamily {
    /// Two ququarts, shape [4, 4].
    QuquartPair,
    /// Four qubits, shape [2, 2, 2, 2].
    FourQubit,
    /// Ququart then qubit pair, flip-style pairing; shape [4, 2, 2].
    CoupledFlipQi,
    /// Factor-reversed [`BasisFamily::CoupledFlipQi`]; shape [2, 2, 4].
    CoupledFlipIq,
    /// Ququart-pair recipe with the second ququart mapped through ι;
    /// shape [4, 2, 2].
    CoupledShiftQi,
    /// Ququart-pair recipe with the first ququart mapped through ι;
    /// shape [2, 2, 4].
    CoupledShiftIq,
}

impl BasisFamily {
    pub const ALL: [BasisFamily; 6] = [
        BasisFamily::QuquartPair,
        BasisFamily::FourQubit,
        BasisFamily::CoupledFlipQi,
        BasisFamily::CoupledFlipIq,
        BasisFamily::CoupledShiftQi,
        BasisFamily::CoupledShiftIq,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BasisFamily::QuquartPair => "ququart-pair",
            BasisFamily::FourQubit => "four-qubit",
            BasisFamily::CoupledFlipQi => "coupled-flip-qi",
            BasisFamily::CoupledFlipIq => "coupled-flip-iq",
            BasisFamily::CoupledShiftQi => "coupled-shift-qi",
            BasisFamily::CoupledShiftIq => "coupled-shift-iq",
        }
    }

    pub fn dims(self) -> &'static [usize] {
        match self {
            BasisFamily::QuquartPair => &[4, 4],
            BasisFamily::FourQubit => &[2, 2, 2, 2],
            BasisFamily::CoupledFlipQi | BasisFamily::CoupledShiftQi => &[4, 2, 2],
            BasisFamily::CoupledFlipIq | BasisFamily::CoupledShiftIq => &[2, 2, 4],
        }
    }

    pub fn default_labels(self) -> &'static [&'static str] {
        match self {
            BasisFamily::QuquartPair => &["I", "II"],
            BasisFamily::FourQubit => &["1", "2", "3", "4"],
            BasisFamily::CoupledFlipQi | BasisFamily::CoupledShiftQi => &["I", "1", "2"],
            BasisFamily::CoupledFlipIq | BasisFamily::CoupledShiftIq => &["1", "2", "I"],
        }
    }

    pub fn shape(self) -> RegisterShape {
        self.shape_with(self.default_labels()).expect("default labels are valid")
    }

    pub fn shape_with(self, labels: &[&str]) -> Result<RegisterShape> {
        let dims = self.dims();
        if labels.len() != dims.len() {
            return Err(TensorError::ShapeMismatch { left: dims.to_vec(), right: vec![labels.len()] }.into());
        }
        let pairs: Vec<(&str, usize)> = labels.iter().copied().zip(dims.iter().copied()).collect();
        Ok(RegisterShape::from_pairs(&pairs)?)
    }

    /// Per-subsystem digits of the quadruple member `k` (0=A … 3=D) at index `alpha`.
    fn quadruple_digits(self, alpha: usize, k: usize) -> Vec<usize> {
        let (r, s) = iota(alpha);
        // flip-style qubit pair for A, B, C, D
        let flip = [(r, s), (1 - r, 1 - s), (1 - r, s), (r, 1 - s)][k];
        let shifted = (alpha + k) % 4;
        match self {
            BasisFamily::QuquartPair => vec![shifted, k],
            BasisFamily::FourQubit => {
                let (hi, lo) = iota(k);
                vec![flip.0, flip.1, hi, lo]
            }
            BasisFamily::CoupledFlipQi => vec![k, flip.0, flip.1],
            BasisFamily::CoupledFlipIq => vec![flip.0, flip.1, k],
            BasisFamily::CoupledShiftQi => {
                let (hi, lo) = iota(k);
                vec![shifted, hi, lo]
            }
            BasisFamily::CoupledShiftIq => {
                let (hi, lo) = iota(shifted);
                vec![hi, lo, k]
            }
        }
    }
}

impl fmt::Display for BasisFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BasisFamily {
    type Err = BasisError;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        BasisFamily::ALL.into_iter().find(|f| f.name() == norm).ok_or_else(|| BasisError::UnknownFamily(s.to_string()))
    }
}

/// The product states `A, B, C, D` feeding the sign transform.
#[derive(Debug, Clone, PartialEq)]
pub struct NaturalQuadruple {
    pub a: Ket,
    pub b: Ket,
    pub c: Ket,
    pub d: Ket,
}

impl NaturalQuadruple {
    pub fn members(&self) -> [&Ket; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    fn from_array([a, b, c, d]: [Ket; 4]) -> Self {
        Self { a, b, c, d }
    }
}

pub fn natural_quadruple(family: BasisFamily, alpha: u8) -> Result<NaturalQuadruple> {
    if alpha > 3 {
        return Err(BasisError::InvalidIndex(alpha));
    }
    let shape = family.shape();
    let members = [0, 1, 2, 3].map(|k| {
        Ket::basis(shape.clone(), &family.quadruple_digits(alpha as usize, k))
            .expect("quadruple digits fit the family shape")
    });
    Ok(NaturalQuadruple::from_array(members))
}

/// Largest entrywise deviation of the Gram matrix of `vectors` from identity.
pub fn gram_deviation(vectors: &[&Ket]) -> Result<f64> {
    let mut dev: f64 = 0.0;
    for (i, a) in vectors.iter().enumerate() {
        for (j, b) in vectors.iter().enumerate() {
            let g = inner_product(a, b)?;
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((g - C64::new(target, 0.0)).norm());
        }
    }
    Ok(dev)
}

fn sign_combine(inputs: [&Ket; 4]) -> Result<[Ket; 4]> {
    let dev = gram_deviation(&inputs)?;
    if dev >= TOL {
        return Err(BasisError::NotOrthonormal(dev));
    }
    let shape = inputs[0].shape().clone();
    let mut out = Vec::with_capacity(4);
    for row in SIGNS {
        let mut acc = Ket::zeros(shape.clone());
        for (sign, v) in row.iter().zip(inputs) {
            // all four inputs must share a shape
            acc = acc.add_scaled(&v.relabel(&shape.labels())?, C64::new(0.5 * sign, 0.0))?;
        }
        out.push(acc);
    }
    Ok(out.try_into().expect("four rows"))
}

/// `(A, B, C, D) ↦ (W, X, Y, Z)`.
pub fn wxyz_from_quadruple(q: &NaturalQuadruple) -> Result<[Ket; 4]> {
    sign_combine(q.members())
}

/// `(W, X, Y, Z) ↦ (A, B, C, D)`; the same ±½ transform.
pub fn quadruple_from_wxyz(w: &Ket, x: &Ket, y: &Ket, z: &Ket) -> Result<NaturalQuadruple> {
    Ok(NaturalQuadruple::from_array(sign_combine([w, x, y, z])?))
}

/// Basis vector on the family's default labels.
pub fn basis_vector(family: BasisFamily, label: BasisLabel) -> Result<Ket> {
    let q = natural_quadruple(family, label.index())?;
    let [w, x, y, z] = wxyz_from_quadruple(&q)?;
    Ok(match label.letter {
        Letter::W => w,
        Letter::X => x,
        Letter::Y => y,
        Letter::Z => z,
    })
}

/// Basis vector relabelled onto `labels` (same order as the family dims).
pub fn basis_vector_on(family: BasisFamily, label: BasisLabel, labels: &[&str]) -> Result<Ket> {
    let v = basis_vector(family, label)?;
    Ok(Ket::new(family.shape_with(labels)?, v.into_amplitudes())?)
}

pub fn full_basis(family: BasisFamily) -> Vec<(BasisLabel, Ket)> {
    BasisLabel::all().map(|l| (l, basis_vector(family, l).expect("all sixteen labels are valid"))).collect()
}

pub fn full_basis_on(family: BasisFamily, labels: &[&str]) -> Result<Vec<(BasisLabel, Ket)>> {
    let shape = family.shape_with(labels)?;
    Ok(full_basis(family)
        .into_iter()
        .map(|(l, k)| (l, Ket::new(shape.clone(), k.into_amplitudes()).expect("same dims")))
        .collect())
}

/// Max Gram-matrix deviation of a whole family.
pub fn family_gram_deviation(family: BasisFamily) -> f64 {
    let basis = full_basis(family);
    let refs: Vec<&Ket> = basis.iter().map(|(_, k)| k).collect();
    gram_deviation(&refs).expect("uniform shape")
}

/// `|Σ_b |<b|k>|² − 1|` for a unit `k`.
pub fn completeness_deviation(basis: &[(BasisLabel, Ket)], k: &Ket) -> Result<f64> {
    let mut total = 0.0;
    for (_, b) in basis {
        total += inner_product(b, k)?.norm_sqr();
    }
    Ok((total - k.norm_sqr()).abs())
}

/// Formats a real as a signed dyadic rational (`+1/2`, `-1/4`, `0`), falling
/// back to scientific notation when no small dyadic form exists.
pub fn dyadic_string(x: f64) -> String {
    if x.abs() < 1e-15 {
        return "0".to_string();
    }
    let sign = if x < 0.0 { '-' } else { '+' };
    let ax = x.abs();
    for k in 0..=20u32 {
        let scaled = ax * f64::from(1u32 << k);
        let n = scaled.round();
        if (scaled - n).abs() < 1e-9 * f64::from(1u32 << k) && n >= 1.0 {
            return if k == 0 { format!("{sign}{n}") } else { format!("{sign}{n}/{}", 1u64 << k) };
        }
    }
    format!("{x:+.16e}")
}

fn amplitude_string(a: C64) -> String {
    if a.im.abs() < 1e-15 {
        dyadic_string(a.re)
    } else {
        format!("{}{}i", dyadic_string(a.re), dyadic_string(a.im))
    }
}

/// Plain-text dump: a header line then one row of 16 amplitudes per label.
pub fn export_text(family: BasisFamily) -> String {
    let mut out = format!("# family {} shape {}\n", family.name(), family.shape());
    for (label, k) in full_basis(family) {
        let cells: Vec<String> = k.amplitudes().iter().map(|&a| amplitude_string(a)).collect();
        out.push_str(&format!("{label} {}\n", cells.join(" ")));
    }
    out
}

/// Machine-readable dump, one record per basis vector.
pub fn export_records(family: BasisFamily) -> Vec<Record> {
    full_basis(family)
        .into_iter()
        .map(|(label, k)| {
            Record::new("basis_vector")
                .with_str("family", family.name())
                .with_str("label", &label.to_string())
                .with_str("rs", &label.rs())
                .with_strs("amplitudes", k.amplitudes().iter().map(|&a| amplitude_string(a)))
        })
        .collect()
}

/// Sign matrix `<Letter_i|member_j>` for one quadruple, times 2.
pub fn extracted_sign_matrix(family: BasisFamily, alpha: u8) -> Result<[[f64; 4]; 4]> {
    let q = natural_quadruple(family, alpha)?;
    let wxyz = wxyz_from_quadruple(&q)?;
    let mut m = [[0.0; 4]; 4];
    for (i, v) in wxyz.iter().enumerate() {
        for (j, member) in q.members().iter().enumerate() {
            m[i][j] = 2.0 * tensor::inner_product(v, member)?.re;
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn digits_of_nonzero(k: &Ket) -> Vec<(Vec<usize>, f64)> {
        let dims = k.shape().dims();
        k.amplitudes()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > 1e-15)
            .map(|(i, a)| (tensor::digits_of(i, &dims), a.re))
            .collect()
    }

    fn quadruple_digits(family: BasisFamily, alpha: u8) -> Vec<Vec<usize>> {
        let q = natural_quadruple(family, alpha).unwrap();
        q.members().iter().map(|k| digits_of_nonzero(k)[0].0.clone()).collect()
    }

    fn label(s: &str) -> BasisLabel {
        s.parse().unwrap()
    }

    #[test]
    fn ququart_pair_quadruple_at_zero() {
        assert_eq!(quadruple_digits(BasisFamily::QuquartPair, 0), vec![vec![0, 0], vec![1, 1], vec![2, 2], vec![3, 3]]);
    }

    #[test]
    fn coupled_flip_quadruple_at_rs_00() {
        assert_eq!(
            quadruple_digits(BasisFamily::CoupledFlipQi, 0),
            vec![vec![0, 0, 0], vec![1, 1, 1], vec![2, 1, 0], vec![3, 0, 1]]
        );
    }

    #[test]
    fn coupled_shift_quadruple_at_one() {
        assert_eq!(
            quadruple_digits(BasisFamily::CoupledShiftQi, 1),
            vec![vec![1, 0, 0], vec![2, 0, 1], vec![3, 1, 0], vec![0, 1, 1]]
        );
    }

    #[test]
    fn invalid_index_rejected() {
        assert_eq!(natural_quadruple(BasisFamily::FourQubit, 4), Err(BasisError::InvalidIndex(4)));
        assert_eq!(BasisLabel::new(Letter::W, 7), Err(BasisError::InvalidIndex(7)));
    }

    #[test]
    fn computational_quadruple_gives_uniform_w() {
        let s = RegisterShape::from_pairs(&[("q", 4)]).unwrap();
        let kets: Vec<Ket> = (0..4).map(|i| Ket::basis(s.clone(), &[i]).unwrap()).collect();
        let q = NaturalQuadruple { a: kets[0].clone(), b: kets[1].clone(), c: kets[2].clone(), d: kets[3].clone() };
        let [w, x, _, _] = wxyz_from_quadruple(&q).unwrap();
        assert!(w.amplitudes().iter().all(|a| *a == C64::new(0.5, 0.0)));
        assert_eq!(inner_product(&w, &x).unwrap(), C64::new(0.0, 0.0));
        let back = quadruple_from_wxyz(&kets[0], &kets[1], &kets[2], &kets[3]).unwrap();
        assert!(back.a.amplitudes().iter().all(|a| *a == C64::new(0.5, 0.0)));
    }

    #[test]
    fn non_orthonormal_quadruple_rejected() {
        let s = RegisterShape::from_pairs(&[("q", 4)]).unwrap();
        let z = Ket::basis(s, &[0]).unwrap();
        let q = NaturalQuadruple { a: z.clone(), b: z.clone(), c: z.clone(), d: z };
        assert!(matches!(wxyz_from_quadruple(&q), Err(BasisError::NotOrthonormal(_))));
    }

    #[test]
    fn round_trip_is_exact() {
        let q = natural_quadruple(BasisFamily::QuquartPair, 2).unwrap();
        let [w, x, y, z] = wxyz_from_quadruple(&q).unwrap();
        assert_eq!(quadruple_from_wxyz(&w, &x, &y, &z).unwrap(), q);
    }

    #[test]
    fn ququart_pair_x1_expansion() {
        let v = basis_vector(BasisFamily::QuquartPair, label("X_1")).unwrap();
        assert_eq!(
            digits_of_nonzero(&v),
            vec![(vec![0, 3], -0.5), (vec![1, 0], 0.5), (vec![2, 1], 0.5), (vec![3, 2], -0.5)]
        );
    }

    #[test]
    fn coupled_shift_x1_matches_channel_expansion() {
        // ½(|1>|00> + |2>|01> − |3>|10> − |0>|11>)
        let v = basis_vector(BasisFamily::CoupledShiftQi, label("X_1")).unwrap();
        assert_eq!(
            digits_of_nonzero(&v),
            vec![(vec![0, 1, 1], -0.5), (vec![1, 0, 0], 0.5), (vec![2, 0, 1], 0.5), (vec![3, 1, 0], -0.5)]
        );
        // ½(|01>|0> + |10>|1> − |11>|2> − |00>|3>)
        let v = basis_vector(BasisFamily::CoupledShiftIq, label("X_1")).unwrap();
        assert_eq!(
            digits_of_nonzero(&v),
            vec![(vec![0, 0, 3], -0.5), (vec![0, 1, 0], 0.5), (vec![1, 0, 1], 0.5), (vec![1, 1, 2], -0.5)]
        );
    }

    #[test]
    fn four_qubit_w00_expansion() {
        // ½(|0000> + |1101> + |1010> + |0111>)
        let v = basis_vector(BasisFamily::FourQubit, label("W_00")).unwrap();
        let mut got = digits_of_nonzero(&v);
        got.sort_by(|a, b| a.0.cmp(&b.0));
        assert_eq!(
            got,
            vec![(vec![0, 0, 0, 0], 0.5), (vec![0, 1, 1, 1], 0.5), (vec![1, 0, 1, 0], 0.5), (vec![1, 1, 0, 1], 0.5)]
        );
    }

    #[test]
    fn every_family_is_orthonormal() {
        for f in BasisFamily::ALL {
            assert!(family_gram_deviation(f) < TOL, "{f}");
        }
    }

    #[test]
    fn flip_and_shift_coupled_bases_differ() {
        let flip = full_basis(BasisFamily::CoupledFlipQi);
        let shift = full_basis(BasisFamily::CoupledShiftQi);
        let shared = shift
            .iter()
            .filter(|(_, s)| flip.iter().any(|(_, f)| (inner_product(f, s).unwrap().norm() - 1.0).abs() < 1e-12))
            .count();
        assert!(shared < 16);
    }

    #[test]
    fn sign_matrix_is_the_same_for_every_family() {
        for f in BasisFamily::ALL {
            for alpha in 0..4 {
                assert_eq!(extracted_sign_matrix(f, alpha).unwrap(), SIGNS, "{f} α={alpha}");
            }
        }
    }

    #[test]
    fn label_parsing() {
        assert_eq!(label("W_0").ordinal(), 0);
        assert_eq!(label("z3").ordinal(), 15);
        assert_eq!(label("Y_10"), label("Y_2"));
        assert_eq!(label("X_2").rs(), "10");
        for bad in ["", "Q_1", "W_4", "W_12", "W__1", "W_0 extra"] {
            assert!(bad.parse::<BasisLabel>().is_err(), "{bad}");
        }
        for l in BasisLabel::all() {
            assert_eq!(l.to_string().parse::<BasisLabel>().unwrap(), l);
        }
    }

    #[test]
    fn family_parsing() {
        assert_eq!("COUPLED_SHIFT_QI".parse::<BasisFamily>().unwrap(), BasisFamily::CoupledShiftQi);
        assert_eq!("four-qubit".parse::<BasisFamily>().unwrap(), BasisFamily::FourQubit);
        assert!("bogus".parse::<BasisFamily>().is_err());
    }

    #[test]
    fn iota_maps_levels_to_pairs() {
        assert_eq!(iota(2), (1, 0));
        let s = RegisterShape::from_pairs(&[("I", 4)]).unwrap();
        let two = Ket::basis(s, &[2]).unwrap();
        let pair = iota_ket(&two, ["1", "2"]).unwrap();
        assert_eq!(digits_of_nonzero(&pair), vec![(vec![1, 0], 1.0)]);
        assert_eq!(iota_inverse_ket(&pair, "I").unwrap(), two);
    }

    #[test]
    fn dyadic_strings() {
        assert_eq!(dyadic_string(0.5), "+1/2");
        assert_eq!(dyadic_string(-0.5), "-1/2");
        assert_eq!(dyadic_string(-0.25), "-1/4");
        assert_eq!(dyadic_string(0.125), "+1/8");
        assert_eq!(dyadic_string(0.0), "0");
        assert_eq!(dyadic_string(1.0), "+1");
        assert!(dyadic_string(1.0 / 3.0).contains('e'));
    }
}
