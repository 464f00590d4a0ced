//! Entanglement swapping with displacement.
//!
//! Two channel states are prepared side by side; a joint measurement on one
//! half of each leaves the untouched halves entangled. The pairing between
//! measurement outcome and the resulting retained state is recovered by
//! expanding the total state in the product of the measured and retained
//! bases.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::bases::{self, dyadic_string, BasisError, BasisFamily, BasisLabel, Letter};
use crate::displacement::{sample_outcome, FIDELITY_TOL};
use crate::errata::{ErrataLine, ErrataReport, Verdict};
use crate::record::Record;
use crate::tensor::{
    fidelity_up_to_phase, inner_product, partial_inner, permute_subsystems, tensor_product, Ket, RegisterShape,
    TensorError, C64, ZERO_BRANCH,
};

/// Below this magnitude an expansion coefficient counts as zero.
const COEFF_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SwapError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error("measured label {measured} has {count} partner terms")]
    MultiplePartners { measured: BasisLabel, count: usize },
    #[error("coefficient for {measured} ⊗ {partner} is not real: {value}")]
    NonRealCoefficient { measured: BasisLabel, partner: BasisLabel, value: C64 },
    #[error("invalid swap wiring: {0}")]
    InvalidWiring(String),
    #[error("outcome {0} has zero probability")]
    DegenerateBranch(BasisLabel),
    #[error("unknown swap variant `{0}`")]
    UnknownVariant(String),
}

pub type Result<T> = std::result::Result<T, SwapError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SwapVariant {
    I,
    II,
    III,
    IV,
}

impl SwapVariant {
    pub const ALL: [SwapVariant; 4] = [SwapVariant::I, SwapVariant::II, SwapVariant::III, SwapVariant::IV];

    pub fn roman(self) -> &'static str {
        ["i", "ii", "iii", "iv"][self as usize]
    }
}

impl fmt::Display for SwapVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.roman())
    }
}

impl FromStr for SwapVariant {
    type Err = SwapError;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        SwapVariant::ALL.into_iter().find(|v| v.roman() == t).ok_or_else(|| SwapError::UnknownVariant(s.to_string()))
    }
}

/// A prepared channel state on named subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub family: BasisFamily,
    pub label: BasisLabel,
    pub labels: Vec<String>,
}

/// A set of subsystems read out in one basis family.
#[derive(Debug, Clone, PartialEq)]
pub struct Group {
    pub family: BasisFamily,
    pub labels: Vec<String>,
}

impl Group {
    fn label_refs(&self) -> Vec<&str> {
        self.labels.iter().map(String::as_str).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwapConfig {
    pub variant: SwapVariant,
    pub left: Channel,
    pub right: Channel,
    pub measured: Group,
    pub retained: Group,
    pub transposed: bool,
}

fn channel(family: BasisFamily, labels: &[&str]) -> Channel {
    Channel {
        family,
        label: BasisLabel::new(Letter::X, 1).expect("valid"),
        labels: labels.iter().map(|s| s.to_string()).collect(),
    }
}

fn group(family: BasisFamily, labels: &[&str]) -> Group {
    Group { family, labels: labels.iter().map(|s| s.to_string()).collect() }
}

/// Register wiring for each swapping diagram, forward direction.
pub fn swap_variant_config(v: SwapVariant) -> SwapConfig {
    use BasisFamily::*;
    let (left, right, measured, retained) = match v {
        SwapVariant::I => (
            channel(CoupledShiftQi, &["I", "1", "2"]),
            channel(CoupledShiftIq, &["3", "4", "II"]),
            group(FourQubit, &["1", "2", "3", "4"]),
            group(QuquartPair, &["I", "II"]),
        ),
        SwapVariant::II => (
            channel(CoupledShiftQi, &["I", "1", "2"]),
            channel(FourQubit, &["3", "4", "5", "6"]),
            group(FourQubit, &["1", "2", "3", "4"]),
            group(CoupledShiftQi, &["I", "5", "6"]),
        ),
        SwapVariant::III => (
            channel(CoupledShiftQi, &["I", "1", "2"]),
            channel(CoupledShiftIq, &["3", "4", "II"]),
            group(CoupledShiftIq, &["1", "2", "II"]),
            group(CoupledShiftQi, &["I", "3", "4"]),
        ),
        SwapVariant::IV => (
            channel(CoupledShiftQi, &["I", "1", "2"]),
            channel(QuquartPair, &["III", "II"]),
            group(CoupledShiftQi, &["II", "1", "2"]),
            group(QuquartPair, &["I", "III"]),
        ),
    };
    SwapConfig { variant: v, left, right, measured, retained, transposed: false }
}

impl SwapConfig {
    /// Exchanges the measured and retained groupings.
    pub fn transposed(mut self) -> Self {
        std::mem::swap(&mut self.measured, &mut self.retained);
        self.transposed = !self.transposed;
        self
    }

    pub fn name(&self) -> String {
        format!("swap-{}{}", self.variant, if self.transposed { "-transposed" } else { "" })
    }

    pub fn register(&self) -> Result<RegisterShape> {
        let left = self.left.family.shape_with(&refs(&self.left.labels))?;
        let right = self.right.family.shape_with(&refs(&self.right.labels))?;
        left.concat(&right).map_err(|e| match e {
            TensorError::DuplicateLabel(l) => SwapError::InvalidWiring(format!("register overlap on `{l}`")),
            other => other.into(),
        })
    }

    pub fn validate(&self) -> Result<RegisterShape> {
        let reg = self.register()?;
        let mut seen: Vec<&str> = Vec::new();
        for g in [&self.measured, &self.retained] {
            let mut dims = Vec::new();
            for l in &g.labels {
                let pos = reg
                    .position(l)
                    .ok_or_else(|| SwapError::InvalidWiring(format!("label `{l}` is not in register {reg}")))?;
                if seen.contains(&l.as_str()) {
                    return Err(SwapError::InvalidWiring(format!("label `{l}` appears in both groups")));
                }
                seen.push(l);
                dims.push(reg.subsystems()[pos].dim);
            }
            if dims != g.family.dims() {
                return Err(SwapError::InvalidWiring(format!(
                    "group {:?} has dims {dims:?}, family {} needs {:?}",
                    g.labels,
                    g.family,
                    g.family.dims()
                )));
            }
        }
        if seen.len() != reg.len() {
            return Err(SwapError::InvalidWiring(format!("groups do not cover register {reg}")));
        }
        Ok(reg)
    }
}

fn refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

/// `left ⊗ right` over the config's register.
pub fn build_swap_total(cfg: &SwapConfig) -> Result<Ket> {
    cfg.validate()?;
    let left = bases::basis_vector_on(cfg.left.family, cfg.left.label, &refs(&cfg.left.labels))?;
    let right = bases::basis_vector_on(cfg.right.family, cfg.right.label, &refs(&cfg.right.labels))?;
    Ok(tensor_product(&left, &right)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairingTerm {
    pub partner: BasisLabel,
    pub coefficient: f64,
}

/// Every nonzero `|measured> ⊗ |partner>` term for one measured label.
#[derive(Debug, Clone, PartialEq)]
pub struct PairingRow {
    pub measured: BasisLabel,
    pub terms: Vec<PairingTerm>,
}

impl PairingRow {
    pub fn single(&self) -> Option<PairingEntry> {
        match self.terms.as_slice() {
            [t] => Some(PairingEntry { measured: self.measured, partner: t.partner, coefficient: t.coefficient }),
            _ => None,
        }
    }

    pub fn probability(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient * t.coefficient).sum()
    }
}

/// One-to-one pairing claim: `coefficient · |measured> ⊗ |partner>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairingEntry {
    pub measured: BasisLabel,
    pub partner: BasisLabel,
    pub coefficient: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairingTable {
    pub measured_family: BasisFamily,
    pub partner_family: BasisFamily,
    pub rows: Vec<PairingRow>,
}

impl PairingTable {
    pub fn row(&self, measured: BasisLabel) -> &PairingRow {
        &self.rows[measured.ordinal()]
    }

    /// The table as a one-to-one map, or the first row with several terms.
    pub fn bijection(&self) -> Result<Vec<PairingEntry>> {
        self.rows
            .iter()
            .map(|r| r.single().ok_or(SwapError::MultiplePartners { measured: r.measured, count: r.terms.len() }))
            .collect()
    }

    pub fn single_partner_rows(&self) -> Vec<PairingEntry> {
        self.rows.iter().filter_map(PairingRow::single).collect()
    }

    pub fn coefficient_square_sum(&self) -> f64 {
        self.rows.iter().map(PairingRow::probability).sum()
    }

    /// Number of distinct partner labels over single-term rows.
    pub fn distinct_single_partners(&self) -> usize {
        let mut partners: Vec<BasisLabel> = self.single_partner_rows().iter().map(|e| e.partner).collect();
        partners.sort();
        partners.dedup();
        partners.len()
    }

    /// `Σ c · |measured> ⊗ |partner>` over `measured ++ retained` labels.
    pub fn reconstruct(&self, cfg: &SwapConfig) -> Result<Ket> {
        let m_labels = cfg.measured.label_refs();
        let r_labels = cfg.retained.label_refs();
        let shape = cfg.measured.family.shape_with(&m_labels)?.concat(&cfg.retained.family.shape_with(&r_labels)?)?;
        let mut acc = Ket::zeros(shape);
        for row in &self.rows {
            let m = bases::basis_vector_on(self.measured_family, row.measured, &m_labels)?;
            for t in &row.terms {
                let p = bases::basis_vector_on(self.partner_family, t.partner, &r_labels)?;
                acc = acc.add_scaled(&tensor_product(&m, &p)?, C64::new(t.coefficient, 0.0))?;
            }
        }
        Ok(acc)
    }

    pub fn export_text(&self) -> String {
        let rows: Vec<(BasisLabel, Vec<PairingTerm>)> =
            self.rows.iter().map(|r| (r.measured, r.terms.clone())).collect();
        pairing_text(&rows)
    }

    pub fn records(&self) -> Vec<Record> {
        self.rows
            .iter()
            .map(|r| {
                Record::new("pairing")
                    .with_str("measured", &r.measured.to_string())
                    .with_strs("partners", r.terms.iter().map(|t| t.partner.to_string()))
                    .with_nums("coefficients", r.terms.iter().map(|t| t.coefficient))
                    .with_num("probability", r.probability())
            })
            .collect()
    }
}

fn sign_char(x: f64) -> char {
    if x < 0.0 {
        '-'
    } else {
        '+'
    }
}

fn row_cells(terms: &[PairingTerm]) -> (String, String, String) {
    let join = |f: &dyn Fn(&PairingTerm) -> String| terms.iter().map(f).collect::<Vec<_>>().join("|");
    (
        join(&|t| t.partner.to_string()),
        join(&|t| sign_char(t.coefficient).to_string()),
        join(&|t| dyadic_string(t.coefficient)),
    )
}

fn pairing_text(rows: &[(BasisLabel, Vec<PairingTerm>)]) -> String {
    let mut out = String::from("# measured partner sign coefficient\n");
    for (m, terms) in rows {
        let (p, s, c) = row_cells(terms);
        out.push_str(&format!("{m} {p} {s} {c}\n"));
    }
    out
}

/// Text table in the same layout as [`PairingTable::export_text`].
pub fn export_entries(entries: &[PairingEntry]) -> String {
    let rows: Vec<(BasisLabel, Vec<PairingTerm>)> = entries
        .iter()
        .map(|e| (e.measured, vec![PairingTerm { partner: e.partner, coefficient: e.coefficient }]))
        .collect();
    pairing_text(&rows)
}

/// Expands `total` in the product of the measured and retained bases.
pub fn derive_pairing_table(total: &Ket, cfg: &SwapConfig) -> Result<PairingTable> {
    cfg.validate()?;
    let m_labels = cfg.measured.label_refs();
    let r_labels = cfg.retained.label_refs();
    let partners = bases::full_basis_on(cfg.retained.family, &r_labels)?;
    let rows = bases::full_basis_on(cfg.measured.family, &m_labels)?
        .into_iter()
        .map(|(measured, probe)| {
            let raw = permute_subsystems(&partial_inner(total, &m_labels, &probe)?, &r_labels)?;
            let mut terms = Vec::new();
            for (partner, v) in &partners {
                let value = inner_product(v, &raw)?;
                if value.norm() < COEFF_EPS {
                    continue;
                }
                if value.im.abs() > COEFF_EPS {
                    return Err(SwapError::NonRealCoefficient { measured, partner: *partner, value });
                }
                terms.push(PairingTerm { partner: *partner, coefficient: value.re });
            }
            Ok(PairingRow { measured, terms })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PairingTable { measured_family: cfg.measured.family, partner_family: cfg.retained.family, rows })
}

/// The sixteen-term pairing exactly as printed for forward variant (i).
pub fn paper_pairing_table() -> Vec<PairingEntry> {
    const PRINTED: [(&str, &str, f64); 16] = [
        ("W_0", "Z_2", 1.0),
        ("W_1", "X_3", -1.0),
        ("W_2", "Y_0", -1.0),
        ("W_3", "W_1", 1.0),
        ("X_0", "X_2", 1.0),
        ("X_1", "X_3", -1.0),
        ("X_2", "X_0", -1.0),
        ("X_3", "X_1", -1.0),
        ("Y_0", "W_2", -1.0),
        ("Y_1", "Y_3", 1.0),
        ("Y_2", "Z_0", 1.0),
        ("Y_3", "Z_1", -1.0),
        ("Z_0", "Y_2", -1.0),
        ("Z_1", "Z_3", -1.0),
        ("Z_2", "W_0", 1.0),
        ("Z_3", "Z_1", 1.0),
    ];
    PRINTED
        .iter()
        .map(|&(m, p, s)| PairingEntry {
            measured: m.parse().expect("printed label"),
            partner: p.parse().expect("printed label"),
            coefficient: 0.25 * s,
        })
        .collect()
}

/// Partner labels claimed by more than one measured label.
pub fn duplicate_partners(entries: &[PairingEntry]) -> Vec<(BasisLabel, Vec<BasisLabel>)> {
    let mut by_partner: BTreeMap<BasisLabel, Vec<BasisLabel>> = BTreeMap::new();
    for e in entries {
        by_partner.entry(e.partner).or_default().push(e.measured);
    }
    by_partner.into_iter().filter(|(_, ms)| ms.len() > 1).collect()
}

fn describe_terms(terms: &[PairingTerm]) -> String {
    if terms.is_empty() {
        return "nothing".into();
    }
    terms.iter().map(|t| format!("{} {}", dyadic_string(t.coefficient), t.partner)).collect::<Vec<_>>().join(" ")
}

pub fn compare_pairing_tables(derived: &PairingTable, paper: &[PairingEntry]) -> ErrataReport {
    let mut lines = Vec::new();
    for label in BasisLabel::all() {
        let row = derived.row(label);
        let Some(printed) = paper.iter().find(|e| e.measured == label) else {
            lines.push(ErrataLine {
                table: "pairing",
                label,
                verdict: Verdict::Mismatch,
                detail: "no printed entry".into(),
            });
            continue;
        };
        let claim = format!("printed {} {}", dyadic_string(printed.coefficient), printed.partner);
        let (verdict, detail) = match row.single() {
            None => (Verdict::NoSinglePartner, format!("derived {}; {claim}", describe_terms(&row.terms))),
            Some(d) if d.partner != printed.partner => {
                (Verdict::PartnerMismatch, format!("derived {} {}; {claim}", dyadic_string(d.coefficient), d.partner))
            }
            Some(d) if (d.coefficient - printed.coefficient).abs() > COEFF_EPS => {
                if (d.coefficient + printed.coefficient).abs() < COEFF_EPS {
                    (Verdict::SignMismatch, format!("derived {} {}; {claim}", dyadic_string(d.coefficient), d.partner))
                } else {
                    (Verdict::Mismatch, format!("derived {} {}; {claim}", dyadic_string(d.coefficient), d.partner))
                }
            }
            Some(_) => (Verdict::Exact, String::new()),
        };
        lines.push(ErrataLine { table: "pairing", label, verdict, detail });
    }
    let warnings = duplicate_partners(paper)
        .into_iter()
        .map(|(partner, measured)| {
            let oracle: Vec<String> = measured
                .iter()
                .map(|m| format!("{m} -> {}", describe_terms(&derived.row(*m).terms)))
                .collect();
            let listed: Vec<String> = measured.iter().map(|m| m.to_string()).collect();
            let wrong: Vec<String> = measured
                .iter()
                .filter(|m| derived.row(**m).single().map(|d| d.partner) != Some(partner))
                .map(|m| m.to_string())
                .collect();
            format!(
                "printed table assigns partner {partner} to {}; oracle: {}; printed entries contradicted by the oracle: {}",
                listed.join(" and "),
                oracle.join(", "),
                if wrong.is_empty() { "none".to_string() } else { wrong.join(", ") }
            )
        })
        .collect();
    ErrataReport { lines, warnings }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwapOutcome {
    pub outcome: BasisLabel,
    pub probability: f64,
    /// Conditional state of the retained subsystems, in the retained order.
    pub residual: Ket,
    /// Retained basis vector equal to the residual up to phase, with the
    /// sign of the overlap, when one exists.
    pub residual_label: Option<(BasisLabel, f64)>,
}

fn identify(residual: &Ket, family: BasisFamily, labels: &[&str]) -> Result<Option<(BasisLabel, f64)>> {
    for (l, v) in bases::full_basis_on(family, labels)? {
        if fidelity_up_to_phase(&v, residual)? >= 1.0 - FIDELITY_TOL {
            let overlap = inner_product(&v, residual)?;
            return Ok(Some((l, overlap.re.signum())));
        }
    }
    Ok(None)
}

/// Collapses the measured group onto `label`.
pub fn measure_swap_forced(total: &Ket, cfg: &SwapConfig, label: BasisLabel) -> Result<SwapOutcome> {
    cfg.validate()?;
    let m_labels = cfg.measured.label_refs();
    let r_labels = cfg.retained.label_refs();
    let probe = bases::basis_vector_on(cfg.measured.family, label, &m_labels)?;
    let raw = permute_subsystems(&partial_inner(total, &m_labels, &probe)?, &r_labels)?;
    let probability = raw.norm_sqr();
    if probability <= ZERO_BRANCH {
        return Err(SwapError::DegenerateBranch(label));
    }
    let residual = raw.normalized()?;
    let residual_label = identify(&residual, cfg.retained.family, &r_labels)?;
    Ok(SwapOutcome { outcome: label, probability, residual, residual_label })
}

/// Samples the outcome with a generator seeded by `seed`.
pub fn measure_swap(total: &Ket, cfg: &SwapConfig, seed: u64) -> Result<SwapOutcome> {
    cfg.validate()?;
    let m_labels = cfg.measured.label_refs();
    let probs = bases::full_basis_on(cfg.measured.family, &m_labels)?
        .iter()
        .map(|(_, probe)| Ok(partial_inner(total, &m_labels, probe)?.norm_sqr()))
        .collect::<Result<Vec<f64>>>()?;
    let pick = sample_outcome(&probs, seed);
    measure_swap_forced(total, cfg, BasisLabel::from_ordinal(pick).expect("sixteen outcomes"))
}

impl SwapOutcome {
    pub fn to_record(&self, cfg: &SwapConfig, seed: Option<u64>) -> Record {
        let mut r = Record::new("swap_outcome").with_str("config", &cfg.name());
        if let Some(s) = seed {
            r = r.with_u64("seed", s);
        }
        let (label, sign) = match self.residual_label {
            Some((l, s)) => (l.to_string(), sign_char(s).to_string()),
            None => ("none".to_string(), String::new()),
        };
        r.with_str("outcome", &self.outcome.to_string())
            .with_num("probability", self.probability)
            .with_str("residual_label", &label)
            .with_str("residual_sign", &sign)
            .with_nums("residual_re", self.residual.amplitudes().iter().map(|a| a.re))
            .with_nums("residual_im", self.residual.amplitudes().iter().map(|a| a.im))
    }
}
