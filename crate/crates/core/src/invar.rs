//! Homotopy distance, signed Hopf invariant `H_X(Y)`, homotopy number and the
//! checks tying them together.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::{collinearity_links, ExtractionParams, LinkSet};
use crate::fields::{FieldSpec, DEFAULT_PERTURBATION};
use crate::linkdeg::gauss_linking;

/// Seed of the perturbation applied when extraction is not transverse.
pub const RETRY_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Homotopic,
    NotHomotopic,
}

impl Verdict {
    pub fn from_distance(d: u64) -> Self {
        if d == 0 {
            Verdict::Homotopic
        } else {
            Verdict::NotHomotopic
        }
    }

    pub fn yes_no(self) -> &'static str {
        match self {
            Verdict::Homotopic => "yes",
            Verdict::NotHomotopic => "no",
        }
    }
}

/// Linking of one component of `C₊` with one of `C₋`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairLinking {
    pub plus: usize,
    pub minus: usize,
    pub link: i64,
    pub raw: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub x: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<String>,
    #[serde(rename = "D", skip_serializing_if = "Option::is_none")]
    pub d: Option<u64>,
    #[serde(rename = "H_signed", skip_serializing_if = "Option::is_none")]
    pub h_signed: Option<i64>,
    #[serde(rename = "I", skip_serializing_if = "Option::is_none")]
    pub i: Option<u64>,
    pub c_plus: usize,
    pub c_minus: usize,
    pub linking: Vec<PairLinking>,
    pub params: ExtractionParams,
    /// Field actually used for `y` when a perturbation was needed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perturbed: Option<String>,
    pub max_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    /// Distance reports behind a homotopy number.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<InvariantReport>,
}

/// Collinearity links, retrying once with a perturbed `y` on a
/// transversality failure.
pub fn links_with_retry(
    x: &FieldSpec,
    y: &FieldSpec,
    params: &ExtractionParams,
) -> Result<(LinkSet, LinkSet, Option<FieldSpec>)> {
    match collinearity_links(x, y, params) {
        Ok((p, m)) => Ok((p, m, None)),
        Err(Error::TransversalityFailure { .. }) => {
            let py = y.clone().perturbed(RETRY_SEED, DEFAULT_PERTURBATION);
            let (p, m) = collinearity_links(x, &py, params)?;
            Ok((p, m, Some(py)))
        }
        Err(e) => Err(e),
    }
}

fn pair_table(plus: &LinkSet, minus: &LinkSet) -> Result<Vec<PairLinking>> {
    let mut out = Vec::new();
    for (a, la) in plus.loops.iter().enumerate() {
        for (b, lb) in minus.loops.iter().enumerate() {
            let r = gauss_linking(la, lb)?;
            out.push(PairLinking { plus: a, minus: b, link: r.rounded, raw: r.raw, residual: r.residual });
        }
    }
    Ok(out)
}

/// Whether a transversality failure triggers one perturbed retry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Retry {
    Never,
    Once,
}

fn report(x: &FieldSpec, y: &FieldSpec, params: &ExtractionParams, retry: Retry) -> Result<InvariantReport> {
    let (plus, minus, perturbed) = match retry {
        Retry::Once => links_with_retry(x, y, params)?,
        Retry::Never => {
            let (p, m) = collinearity_links(x, y, params)?;
            (p, m, None)
        }
    };
    let linking = pair_table(&plus, &minus)?;
    let h: i64 = linking.iter().map(|p| p.link).sum();
    let d = h.unsigned_abs();
    Ok(InvariantReport {
        x: x.to_string(),
        y: Some(y.to_string()),
        d: Some(d),
        h_signed: Some(h),
        i: None,
        c_plus: plus.len(),
        c_minus: minus.len(),
        max_residual: linking.iter().map(|p| p.residual).fold(0.0, f64::max),
        linking,
        params: *params,
        perturbed: perturbed.map(|p| p.to_string()),
        verdict: Some(Verdict::from_distance(d)),
        parts: Vec::new(),
    })
}

/// `D(X, Y) = |link(C₊, C₋)|`; zero as soon as either set is empty.
pub fn distance(x: &FieldSpec, y: &FieldSpec, params: &ExtractionParams) -> Result<InvariantReport> {
    report(x, y, params, Retry::Once)
}

/// [`distance`] with an explicit retry policy.
pub fn distance_with(x: &FieldSpec, y: &FieldSpec, params: &ExtractionParams, retry: Retry) -> Result<InvariantReport> {
    report(x, y, params, retry)
}

/// `H_X(Y) = link(C₊, C₋)` with the Gauss-map orientations.
pub fn signed_h(x: &FieldSpec, y: &FieldSpec, params: &ExtractionParams) -> Result<i64> {
    Ok(report(x, y, params, Retry::Once)?.h_signed.unwrap_or(0))
}

/// `I(X) = (D(X, ℋ₊) + D(X, R_*ℋ₊) − 1) / 2`, both distances measured directly.
pub fn homotopy_number(x: &FieldSpec, params: &ExtractionParams) -> Result<InvariantReport> {
    let plus = FieldSpec::HopfPlus;
    let minus = FieldSpec::HopfPlus.push_forward_r();
    let (a, b) = rayon::join(|| distance(x, &plus, params), || distance(x, &minus, params));
    let (a, b) = (a?, b?);
    let (dp, dm) = (a.d.unwrap_or(0), b.d.unwrap_or(0));
    if (dp + dm) % 2 == 0 {
        return Err(Error::InconsistentDistances { plus: dp, minus: dm });
    }
    Ok(InvariantReport {
        x: x.to_string(),
        y: None,
        d: None,
        h_signed: None,
        i: Some((dp + dm - 1) / 2),
        c_plus: 0,
        c_minus: 0,
        linking: Vec::new(),
        params: *params,
        perturbed: None,
        max_residual: a.max_residual.max(b.max_residual),
        verdict: None,
        parts: vec![a, b],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffeoReport {
    pub x: String,
    #[serde(rename = "I")]
    pub i: u64,
    #[serde(rename = "I_R")]
    pub i_r: u64,
    #[serde(rename = "D_X_RX")]
    pub d_x_rx: u64,
    pub invariant_preserved: bool,
    pub distance_formula: bool,
}

impl DiffeoReport {
    pub fn holds(&self) -> bool {
        self.invariant_preserved && self.distance_formula
    }
}

/// Checks `I(X) = I(R_*X)` and `D(X, R_*X) = 2·I(X) + 1`.
pub fn check_diffeo_invariance(x: &FieldSpec, params: &ExtractionParams) -> Result<DiffeoReport> {
    let rx = x.clone().push_forward_r();
    let i = homotopy_number(x, params)?.i.unwrap_or(0);
    let i_r = homotopy_number(&rx, params)?.i.unwrap_or(0);
    let d = distance(x, &rx, params)?.d.unwrap_or(0);
    Ok(DiffeoReport {
        x: x.to_string(),
        i,
        i_r,
        d_x_rx: d,
        invariant_preserved: i == i_r,
        distance_formula: d == 2 * i + 1,
    })
}
