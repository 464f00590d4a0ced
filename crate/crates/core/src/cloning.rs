//! Why no linear machine clones an unknown state, even into a different
//! encoding (ququart ↔ qubit pair).

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::bases::{iota_inverse_ket, iota_ket, BasisError};
use crate::displacement::QuquartState;
use crate::record::Record;
use crate::tensor::{inner_product, tensor_product, Ket, RegisterShape, TensorError, C64, TOL};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CloneError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error("{kind} expects a source of dims {expected:?}, got {found:?}")]
    ShapeMismatch { kind: CloneKind, expected: Vec<usize>, found: Vec<usize> },
    #[error("source state is not normalised (norm² {0})")]
    NotNormalized(f64),
    #[error("input is a computational basis state")]
    BasisInput,
    #[error("encoding changed an overlap by {0:e}")]
    NotIsometric(f64),
    #[error("at least one sample is required")]
    NoSamples,
    #[error("unknown clone kind `{0}`")]
    UnknownKind(String),
    #[error("overlap {0} is outside [0, 1]")]
    BadOverlap(f64),
}

pub type Result<T> = std::result::Result<T, CloneError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CloneKind {
    PreciseQubit,
    PreciseQuquart,
    /// Qubit pair in, qubit pair plus a ququart copy out.
    Imprecise22To4,
    /// Ququart in, ququart plus a qubit-pair copy out.
    Imprecise4To22,
}

impl CloneKind {
    pub const ALL: [CloneKind; 4] =
        [CloneKind::PreciseQubit, CloneKind::PreciseQuquart, CloneKind::Imprecise22To4, CloneKind::Imprecise4To22];

    pub fn name(self) -> &'static str {
        match self {
            CloneKind::PreciseQubit => "precise-qubit",
            CloneKind::PreciseQuquart => "precise-ququart",
            CloneKind::Imprecise22To4 => "imprecise-22-to-4",
            CloneKind::Imprecise4To22 => "imprecise-4-to-22",
        }
    }

    pub fn source_dims(self) -> &'static [usize] {
        match self {
            CloneKind::PreciseQubit => &[2],
            CloneKind::PreciseQuquart | CloneKind::Imprecise4To22 => &[4],
            CloneKind::Imprecise22To4 => &[2, 2],
        }
    }

    pub fn source_shape(self) -> RegisterShape {
        let pairs: Vec<(String, usize)> =
            self.source_dims().iter().enumerate().map(|(i, &d)| (format!("src{i}"), d)).collect();
        let refs: Vec<(&str, usize)> = pairs.iter().map(|(l, d)| (l.as_str(), *d)).collect();
        RegisterShape::from_pairs(&refs).expect("fixed shapes are valid")
    }

    /// The copy written into the blank register: identity, ι or ι⁻¹.
    pub fn encode(self, k: &Ket) -> Result<Ket> {
        self.check(k)?;
        Ok(match self {
            CloneKind::PreciseQubit => k.relabel(&["copy"])?,
            CloneKind::PreciseQuquart => k.relabel(&["copy"])?,
            CloneKind::Imprecise4To22 => iota_ket(k, ["copy0", "copy1"])?,
            CloneKind::Imprecise22To4 => iota_inverse_ket(k, "copy")?,
        })
    }

    fn check(self, k: &Ket) -> Result<()> {
        let found = k.shape().dims();
        if found != self.source_dims() {
            return Err(CloneError::ShapeMismatch { kind: self, expected: self.source_dims().to_vec(), found });
        }
        Ok(())
    }
}

impl fmt::Display for CloneKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CloneKind {
    type Err = CloneError;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase().replace('_', "-");
        CloneKind::ALL.into_iter().find(|k| k.name() == t).ok_or_else(|| CloneError::UnknownKind(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObstructionReport {
    pub kind: CloneKind,
    pub overlap_s: f64,
    /// Overlap a unitary cloner would have to produce: `s · s_enc`.
    pub required: f64,
    pub deficit: f64,
    /// Worse of the two linear-extension fidelities for the pair.
    pub linear_extension_fidelity: f64,
}

impl ObstructionReport {
    pub fn is_obstructed(&self) -> bool {
        self.deficit > TOL
    }

    pub fn to_record(&self) -> Record {
        Record::new("noclone")
            .with_str("kind", self.kind.name())
            .with_num("overlap_s", self.overlap_s)
            .with_num("required", self.required)
            .with_num("deficit", self.deficit)
            .with_num("linear_extension_fidelity", self.linear_extension_fidelity)
            .with_bool("obstructed", self.is_obstructed())
    }
}

fn check_normalized(k: &Ket) -> Result<()> {
    if !k.is_normalized() {
        return Err(CloneError::NotNormalized(k.norm_sqr()));
    }
    Ok(())
}

/// Inner-product argument: a unitary sending `a ⊗ blank` to `a ⊗ enc(a)`
/// keeps `<psi|phi>`, but the targets overlap by `s · s_enc`.
pub fn overlap_obstruction(psi: &Ket, phi: &Ket, kind: CloneKind) -> Result<ObstructionReport> {
    kind.check(psi)?;
    kind.check(phi)?;
    check_normalized(psi)?;
    check_normalized(phi)?;
    let s = inner_product(psi, phi)?.norm();
    let s_enc = inner_product(&kind.encode(psi)?, &kind.encode(phi)?)?.norm();
    let drift = (s_enc - s).abs();
    if drift > TOL {
        return Err(CloneError::NotIsometric(drift));
    }
    let required = s * s_enc;
    let fid = |k: &Ket| -> Result<f64> {
        if is_basis_state(k) {
            Ok(1.0)
        } else {
            Ok(linear_extension_deficit(kind, k, false)?.fidelity)
        }
    };
    Ok(ObstructionReport {
        kind,
        overlap_s: s,
        required,
        deficit: (s - required).abs(),
        linear_extension_fidelity: fid(psi)?.min(fid(phi)?),
    })
}

/// One nonzero amplitude.
pub fn is_basis_state(k: &Ket) -> bool {
    k.amplitudes().iter().filter(|a| a.norm() > TOL).count() == 1
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearExtension {
    /// `|<x ⊗ enc(x) ⊗ Q' | L(x ⊗ blank ⊗ Q)>|²`.
    pub fidelity: f64,
    pub deficit: f64,
}

/// Defines the cloner on computational basis inputs, extends it linearly
/// and scores the output on `superposition` against the ideal clone.
///
/// The machine register ends in the same state for every input, so it
/// factors out of the overlap; it is kept explicitly anyway.
pub fn linear_extension_deficit(kind: CloneKind, superposition: &Ket, strict: bool) -> Result<LinearExtension> {
    kind.check(superposition)?;
    check_normalized(superposition)?;
    if strict && is_basis_state(superposition) {
        return Err(CloneError::BasisInput);
    }
    let machine = Ket::basis(RegisterShape::from_pairs(&[("machine", 2)])?, &[1])?;
    let shape = superposition.shape().clone();
    let mut extension: Option<Ket> = None;
    for (k, &x) in superposition.amplitudes().iter().enumerate() {
        if x.norm() == 0.0 {
            continue;
        }
        let mut amps = vec![C64::new(0.0, 0.0); shape.total_dim()];
        amps[k] = C64::new(1.0, 0.0);
        let basis = Ket::new(shape.clone(), amps)?;
        let image = tensor_product(&tensor_product(&basis, &kind.encode(&basis)?)?, &machine)?;
        extension = Some(match extension {
            None => image.scaled(x),
            Some(acc) => acc.add_scaled(&image, x)?,
        });
    }
    let extension = extension.expect("normalised state has a nonzero amplitude");
    let desired = tensor_product(&tensor_product(superposition, &kind.encode(superposition)?)?, &machine)?;
    let fidelity = inner_product(&desired, &extension)?.norm_sqr().clamp(0.0, 1.0);
    Ok(LinearExtension { fidelity, deficit: 1.0 - fidelity })
}

/// Largest `| |<ι(a)|ι(b)>| − |<a|b>| |` over random ququart pairs.
pub fn iota_isometry_check(samples: usize, seed: u64) -> Result<f64> {
    if samples == 0 {
        return Err(CloneError::NoSamples);
    }
    let devs = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i));
            let a = QuquartState::random(&mut rng);
            let b = QuquartState::random(&mut rng);
            iota_deviation(&a, &b)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(devs.into_iter().fold(0.0, f64::max))
}

pub fn iota_deviation(a: &QuquartState, b: &QuquartState) -> Result<f64> {
    let shape = RegisterShape::from_pairs(&[("q", 4)])?;
    let ka = Ket::new(shape.clone(), a.amplitudes().to_vec())?;
    let kb = Ket::new(shape, b.amplitudes().to_vec())?;
    let before = inner_product(&ka, &kb)?.norm();
    let after = inner_product(&iota_ket(&ka, ["r", "s"])?, &iota_ket(&kb, ["r", "s"])?)?.norm();
    Ok((after - before).abs())
}

/// `(|0>, s|0> + √(1−s²)|1>)` on the source register of `kind`.
pub fn state_pair_with_overlap(kind: CloneKind, s: f64) -> Result<(Ket, Ket)> {
    if !(0.0..=1.0).contains(&s) {
        return Err(CloneError::BadOverlap(s));
    }
    let shape = kind.source_shape();
    let n = shape.total_dim();
    let mut a = vec![C64::new(0.0, 0.0); n];
    a[0] = C64::new(1.0, 0.0);
    let mut b = vec![C64::new(0.0, 0.0); n];
    b[0] = C64::new(s, 0.0);
    b[1] = C64::new((1.0 - s * s).sqrt(), 0.0);
    Ok((Ket::new(shape.clone(), a)?, Ket::new(shape, b)?))
}

/// Equal superposition of the first `n` computational basis states.
pub fn equal_superposition(kind: CloneKind, n: usize) -> Result<Ket> {
    let shape = kind.source_shape();
    let dim = shape.total_dim();
    if n == 0 || n > dim {
        return Err(TensorError::LengthMismatch { expected: dim, got: n }.into());
    }
    let amp = C64::new(1.0 / (n as f64).sqrt(), 0.0);
    let amps = (0..dim).map(|i| if i < n { amp } else { C64::new(0.0, 0.0) }).collect();
    Ok(Ket::new(shape, amps)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthogonal_and_identical_pairs_are_consistent() {
        for kind in CloneKind::ALL {
            let (a, b) = state_pair_with_overlap(kind, 0.0).unwrap();
            let r = overlap_obstruction(&a, &b, kind).unwrap();
            assert_eq!(r.overlap_s, 0.0);
            assert!(r.deficit < 1e-12);
            let r = overlap_obstruction(&a, &a, kind).unwrap();
            assert!((r.overlap_s - 1.0).abs() < 1e-12);
            assert!(r.deficit < 1e-12);
        }
    }

    #[test]
    fn half_overlap_has_quarter_deficit() {
        let (a, b) = state_pair_with_overlap(CloneKind::Imprecise4To22, 0.5).unwrap();
        let r = overlap_obstruction(&a, &b, CloneKind::Imprecise4To22).unwrap();
        assert!((r.deficit - 0.25).abs() < 1e-12);
        assert!(r.is_obstructed());
    }

    #[test]
    fn wrong_source_shape() {
        let (a, b) = state_pair_with_overlap(CloneKind::PreciseQubit, 0.5).unwrap();
        assert!(matches!(
            overlap_obstruction(&a, &b, CloneKind::PreciseQuquart),
            Err(CloneError::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn basis_inputs_clone_perfectly() {
        for kind in CloneKind::ALL {
            let dim = kind.source_shape().total_dim();
            for i in 0..dim {
                let mut amps = vec![C64::new(0.0, 0.0); dim];
                amps[i] = C64::new(1.0, 0.0);
                let k = Ket::new(kind.source_shape(), amps).unwrap();
                assert_eq!(linear_extension_deficit(kind, &k, false).unwrap().fidelity, 1.0);
                assert_eq!(linear_extension_deficit(kind, &k, true), Err(CloneError::BasisInput));
            }
        }
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("IMPRECISE_4_TO_22".parse::<CloneKind>().unwrap(), CloneKind::Imprecise4To22);
        assert!("sloppy".parse::<CloneKind>().is_err());
    }

    #[test]
    fn iota_preserves_basis_overlaps() {
        for i in 0..4 {
            for j in 0..4 {
                let d = iota_deviation(&QuquartState::basis(i), &QuquartState::basis(j)).unwrap();
                assert_eq!(d, 0.0);
            }
        }
    }
}
