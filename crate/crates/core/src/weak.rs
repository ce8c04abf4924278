//! Weak presimulations and prebisimulations for explicit formula sets.
//!
//! For a finite set `Psi` the greatest ones have closed forms:
//!
//! ```text
//! presim(w, w')   = min_{A in Psi} V_A(w) -> V'_A(w')
//! prebisim(w, w') = min_{A in Psi} V_A(w) <-> V'_A(w')
//! ```
//!
//! Weak forward and weak backward presimulations coincide, so only one is
//! implemented.

use serde::Serialize;
use thiserror::Error;

use crate::algebra::TruthValue;
use crate::bisim::{ConditionResult, Violation};
use crate::fuzzrel::{FuzzyMat, FuzzyVec, RelError};
use crate::model::{KripkeModel, ModelError};
use crate::par::Exec;
use crate::syntax::{enumerate, EnumConfig, Formula, Fragment};

#[derive(Debug, Error)]
pub enum WeakError {
    #[error("the formula set is empty")]
    EmptyPsi,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Shape(#[from] RelError),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WeakKind {
    Simulation,
    Bisimulation,
}

/// Value vectors `(V_A, V'_A)` of each formula.
pub fn value_pairs(
    m: &KripkeModel,
    m2: &KripkeModel,
    psi: &[Formula],
    exec: Exec,
) -> Result<Vec<(FuzzyVec, FuzzyVec)>, ModelError> {
    m.check_compatible(m2)?;
    exec.map_slice(psi, |a| Ok((m.eval_vec(a)?, m2.eval_vec(a)?))).into_iter().collect()
}

/// The two closed forms over the given value-vector pairs.
pub fn closed_forms(k: usize, k2: usize, pairs: &[(FuzzyVec, FuzzyVec)]) -> (FuzzyMat, FuzzyMat) {
    let fold = |op: fn(&TruthValue, &TruthValue) -> TruthValue| {
        FuzzyMat::from_fn(k, k2, |w, w2| pairs.iter().map(|(v, v2)| op(&v[w], &v2[w2])).min().unwrap_or_else(TruthValue::one))
    };
    (fold(TruthValue::residuum), fold(TruthValue::biimplication))
}

/// Every row and every column holds a 1.
pub fn has_full_rows_and_columns(phi: &FuzzyMat) -> bool {
    let rows = (0..phi.rows()).all(|i| phi.row(i).iter().any(TruthValue::is_one));
    let cols = (0..phi.cols()).all(|j| (0..phi.rows()).any(|i| phi.get(i, j).is_one()));
    rows && cols
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeakReport {
    pub psi: String,
    pub formulas: usize,
    #[serde(serialize_with = "rows")]
    pub presim: FuzzyMat,
    #[serde(serialize_with = "rows")]
    pub prebisim: FuzzyMat,
    pub ws1: bool,
    pub wb1: bool,
    pub presim_nonempty: bool,
    pub prebisim_nonempty: bool,
    /// Read off the prebisimulation: a 1 in every row and every column.
    pub psi_equivalent: bool,
}

fn rows<S: serde::Serializer>(m: &FuzzyMat, s: S) -> Result<S::Ok, S::Error> {
    m.to_rows().serialize(s)
}

/// Greatest weak presimulation and prebisimulation for `psi`.
pub fn greatest_weak(m: &KripkeModel, m2: &KripkeModel, psi: &[Formula], exec: Exec) -> Result<WeakReport, WeakError> {
    if psi.is_empty() {
        return Err(WeakError::EmptyPsi);
    }
    let pairs = value_pairs(m, m2, psi, exec)?;
    let description = if psi.len() <= 4 {
        psi.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
    } else {
        format!("{} formulae", psi.len())
    };
    report(m, m2, &pairs, description)
}

pub(crate) fn report(
    m: &KripkeModel,
    m2: &KripkeModel,
    pairs: &[(FuzzyVec, FuzzyVec)],
    psi: String,
) -> Result<WeakReport, WeakError> {
    let (presim, prebisim) = closed_forms(m.len(), m2.len(), pairs);
    let ws1 = condition_one(m, m2, &presim, WeakKind::Simulation)?.iter().all(|c| c.holds);
    let wb1 = condition_one(m, m2, &prebisim, WeakKind::Bisimulation)?.iter().all(|c| c.holds);
    Ok(WeakReport {
        psi,
        formulas: pairs.len(),
        presim_nonempty: !presim.is_zero(),
        prebisim_nonempty: !prebisim.is_zero(),
        psi_equivalent: has_full_rows_and_columns(&prebisim),
        presim,
        prebisim,
        ws1,
        wb1,
    })
}

/// Greatest weak relations for the depth-bounded fragment, enumerated over the pair.
pub fn greatest_weak_fragment(
    m: &KripkeModel,
    m2: &KripkeModel,
    fragment: Fragment,
    depth: usize,
    exec: Exec,
) -> Result<(WeakReport, bool), WeakError> {
    let mut config = EnumConfig::for_models(m, m2, fragment, depth);
    config.exec = exec;
    let e = enumerate(&config, m, m2)?;
    let r = report(m, m2, &e.vectors, format!("{fragment} formulae of depth <= {depth}"))?;
    Ok((r, e.truncated))
}

fn condition_one(m: &KripkeModel, m2: &KripkeModel, phi: &FuzzyMat, kind: WeakKind) -> Result<Vec<ConditionResult>, RelError> {
    let mut out = Vec::new();
    let inv = phi.inverse();
    for (p, v) in m.valuations() {
        let v2 = m2.valuation(p).expect("compatible models");
        let rhs = v2.compose_mat(&inv)?;
        out.push(result(1, format!("V_{p} <= V_{p}' o phi^-1"), v.first_excess(&rhs).map(|i| violation(m, i, v, &rhs))));
        if kind == WeakKind::Bisimulation {
            let rhs = v.compose_mat(phi)?;
            out.push(result(1, format!("V_{p}' <= V_{p} o phi"), v2.first_excess(&rhs).map(|i| violation(m2, i, v2, &rhs))));
        }
    }
    Ok(out)
}

fn violation(model: &KripkeModel, i: usize, lhs: &FuzzyVec, rhs: &FuzzyVec) -> Violation {
    Violation { at: model.worlds()[i].clone(), lhs: lhs[i].clone(), rhs: rhs[i].clone() }
}

fn result(group: u8, inequality: String, violation: Option<Violation>) -> ConditionResult {
    ConditionResult { group, inequality, holds: violation.is_none(), violation }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeakCheck {
    pub kind: WeakKind,
    /// (ws-1) or (wb-1).
    pub first: bool,
    /// (ws-2) or (wb-2).
    pub second: bool,
    pub nonempty: bool,
    pub conditions: Vec<ConditionResult>,
}

impl WeakCheck {
    pub fn is_pre(&self) -> bool {
        self.second
    }

    pub fn is_full(&self) -> bool {
        self.first && self.second && self.nonempty
    }
}

/// Literal evaluation of (ws-1)/(ws-2) or (wb-1)/(wb-2).
pub fn check_weak(
    m: &KripkeModel,
    m2: &KripkeModel,
    phi: &FuzzyMat,
    psi: &[Formula],
    kind: WeakKind,
) -> Result<WeakCheck, WeakError> {
    if psi.is_empty() {
        return Err(WeakError::EmptyPsi);
    }
    if phi.shape() != (m.len(), m2.len()) {
        return Err(WeakError::Shape(RelError::Shape { op: "check_weak", left: phi.shape(), right: (m.len(), m2.len()) }));
    }
    let pairs = value_pairs(m, m2, psi, Exec::Sequential)?;
    let mut conditions = condition_one(m, m2, phi, kind)?;
    let inv = phi.inverse();
    for (a, (v, v2)) in psi.iter().zip(&pairs) {
        let lhs = inv.compose_vec(v)?;
        conditions.push(result(
            2,
            format!("phi^-1 o V[{a}] <= V'[{a}]"),
            lhs.first_excess(v2).map(|i| violation(m2, i, &lhs, v2)),
        ));
        if kind == WeakKind::Bisimulation {
            let lhs = phi.compose_vec(v2)?;
            conditions.push(result(2, format!("phi o V'[{a}] <= V[{a}]"), lhs.first_excess(v).map(|i| violation(m, i, &lhs, v))));
        }
    }
    let group = |g: u8| conditions.iter().filter(|c| c.group == g).all(|c| c.holds);
    Ok(WeakCheck { kind, first: group(1), second: group(2), nonempty: !phi.is_zero(), conditions })
}

/// Whether `phi1 \/ phi2` is again a weak (pre)simulation/(pre)bisimulation.
/// Both inputs must already be one.
pub fn join_closed(
    m: &KripkeModel,
    m2: &KripkeModel,
    phi1: &FuzzyMat,
    phi2: &FuzzyMat,
    psi: &[Formula],
    kind: WeakKind,
) -> Result<bool, WeakError> {
    for (n, phi) in [(1, phi1), (2, phi2)] {
        if !check_weak(m, m2, phi, psi, kind)?.is_pre() {
            return Err(WeakError::Precondition(format!("relation {n} is not a weak pre-relation")));
        }
    }
    Ok(check_weak(m, m2, &phi1.join(phi2)?, psi, kind)?.is_pre())
}

/// Whether `phi1 o phi2` is a weak pre-relation between the outer models.
pub fn composition_closed(
    models: [&KripkeModel; 3],
    phi1: &FuzzyMat,
    phi2: &FuzzyMat,
    psi: &[Formula],
    kind: WeakKind,
) -> Result<bool, WeakError> {
    let [m, m2, m3] = models;
    if !check_weak(m, m2, phi1, psi, kind)?.is_pre() || !check_weak(m2, m3, phi2, psi, kind)?.is_pre() {
        return Err(WeakError::Precondition("inputs are not weak pre-relations".into()));
    }
    Ok(check_weak(m, m3, &phi1.compose(phi2)?, psi, kind)?.is_pre())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DualityVerdict {
    pub formulas: usize,
    pub presim_equal: bool,
    pub prebisim_equal: bool,
}

impl DualityVerdict {
    pub fn holds(&self) -> bool {
        self.presim_equal && self.prebisim_equal
    }
}

/// Compares the greatest weak relations for `psi` with those for its dual set
/// between the reverse models.
pub fn duality_transfer(m: &KripkeModel, m2: &KripkeModel, psi: &[Formula], exec: Exec) -> Result<DualityVerdict, WeakError> {
    let dual: Vec<Formula> = psi.iter().map(Formula::dual).collect();
    let a = greatest_weak(m, m2, psi, exec)?;
    let b = greatest_weak(&m.reverse(), &m2.reverse(), &dual, exec)?;
    Ok(DualityVerdict { formulas: psi.len(), presim_equal: a.presim == b.presim, prebisim_equal: a.prebisim == b.prebisim })
}

/// [`duality_transfer`] for the depth-bounded fragment enumerated over the pair.
pub fn duality_transfer_fragment(
    m: &KripkeModel,
    m2: &KripkeModel,
    fragment: Fragment,
    depth: usize,
    exec: Exec,
) -> Result<DualityVerdict, WeakError> {
    let mut config = EnumConfig::for_models(m, m2, fragment, depth);
    config.exec = exec;
    let e = enumerate(&config, m, m2)?;
    duality_transfer(m, m2, &e.formulas, exec)
}
