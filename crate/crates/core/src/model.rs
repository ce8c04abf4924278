//! Fuzzy Kripke models and formula evaluation.
//!
//! A model file is JSON:
//!
//! ```json
//! {
//!   "algebra": "godel",
//!   "worlds": ["u", "v"],
//!   "indices": [1],
//!   "relations": { "1": [["1", "0.3"], ["0", "0.8"]] },
//!   "valuation": { "p": ["0.8", "0.4"] }
//! }
//! ```
//!
//! Values are strings so that `"0.3"` is read as exactly `3/10`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Algebra, AlgebraError, TruthValue};
use crate::fuzzrel::{FuzzyMat, FuzzyVec, RelError};
use crate::syntax::{Formula, Modality};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid model file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("relation {index}: {source}")]
    Relation { index: u32, source: RelError },
    #[error("model has no worlds")]
    NoWorlds,
    #[error("duplicate world `{0}`")]
    DuplicateWorld(String),
    #[error("duplicate index {0}")]
    DuplicateIndex(u32),
    #[error("relation {index} is {found:?}, expected {expected}x{expected}")]
    RelationShape { index: u32, found: (usize, usize), expected: usize },
    #[error("index {0} is declared but has no relation")]
    MissingRelation(u32),
    #[error("relation given for undeclared index {0}")]
    UndeclaredRelation(u32),
    #[error("valuation of `{var}` has {found} entries, expected {expected}")]
    ValuationLength { var: String, found: usize, expected: usize },
    #[error("invalid variable name `{0}`")]
    BadVariable(String),
    #[error("undeclared propositional variable `{0}`")]
    UndeclaredVariable(String),
    #[error("undeclared modality index {0}")]
    UndeclaredIndex(u32),
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("models are incompatible: {0}")]
    Incompatible(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    algebra: Algebra,
    worlds: Vec<String>,
    indices: Vec<u32>,
    relations: BTreeMap<u32, Vec<Vec<TruthValue>>>,
    valuation: BTreeMap<String, Vec<TruthValue>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeModel {
    algebra: Algebra,
    worlds: Vec<String>,
    indices: Vec<u32>,
    relations: BTreeMap<u32, FuzzyMat>,
    valuation: BTreeMap<String, FuzzyVec>,
}

fn valid_variable(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

impl KripkeModel {
    pub fn new(
        algebra: Algebra,
        worlds: Vec<String>,
        indices: Vec<u32>,
        relations: BTreeMap<u32, FuzzyMat>,
        valuation: BTreeMap<String, FuzzyVec>,
    ) -> Result<Self, ModelError> {
        let k = worlds.len();
        if k == 0 {
            return Err(ModelError::NoWorlds);
        }
        let mut seen = BTreeSet::new();
        for w in &worlds {
            if !seen.insert(w) {
                return Err(ModelError::DuplicateWorld(w.clone()));
            }
        }
        let mut seen = BTreeSet::new();
        for &i in &indices {
            if !seen.insert(i) {
                return Err(ModelError::DuplicateIndex(i));
            }
            if !relations.contains_key(&i) {
                return Err(ModelError::MissingRelation(i));
            }
        }
        for (&i, r) in &relations {
            if !seen.contains(&i) {
                return Err(ModelError::UndeclaredRelation(i));
            }
            if r.shape() != (k, k) {
                return Err(ModelError::RelationShape { index: i, found: r.shape(), expected: k });
            }
            for x in r.entries() {
                algebra.check(x)?;
            }
        }
        for (p, v) in &valuation {
            if !valid_variable(p) {
                return Err(ModelError::BadVariable(p.clone()));
            }
            if v.len() != k {
                return Err(ModelError::ValuationLength { var: p.clone(), found: v.len(), expected: k });
            }
            for x in v.iter() {
                algebra.check(x)?;
            }
        }
        Ok(KripkeModel { algebra, worlds, indices, relations, valuation })
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let file: ModelFile = serde_json::from_str(text)?;
        let mut relations = BTreeMap::new();
        for (i, rows) in file.relations {
            let m = FuzzyMat::from_rows(rows).map_err(|source| ModelError::Relation { index: i, source })?;
            relations.insert(i, m);
        }
        let valuation = file.valuation.into_iter().map(|(p, v)| (p, FuzzyVec(v))).collect();
        KripkeModel::new(file.algebra, file.worlds, file.indices, relations, valuation)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ModelError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ModelError::Io { path: path.display().to_string(), source })?;
        KripkeModel::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        let file = ModelFile {
            algebra: self.algebra,
            worlds: self.worlds.clone(),
            indices: self.indices.clone(),
            relations: self.relations.iter().map(|(&i, r)| (i, r.to_rows())).collect(),
            valuation: self.valuation.iter().map(|(p, v)| (p.clone(), v.0.clone())).collect(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    pub fn len(&self) -> usize {
        self.worlds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.worlds.is_empty()
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.valuation.keys().map(String::as_str)
    }

    pub fn relation(&self, index: u32) -> Option<&FuzzyMat> {
        self.relations.get(&index)
    }

    pub fn relations(&self) -> impl Iterator<Item = (u32, &FuzzyMat)> {
        self.relations.iter().map(|(&i, r)| (i, r))
    }

    pub fn valuation(&self, var: &str) -> Option<&FuzzyVec> {
        self.valuation.get(var)
    }

    pub fn valuations(&self) -> impl Iterator<Item = (&str, &FuzzyVec)> {
        self.valuation.iter().map(|(p, v)| (p.as_str(), v))
    }

    pub fn world_index(&self, name: &str) -> Result<usize, ModelError> {
        self.worlds.iter().position(|w| w == name).ok_or_else(|| ModelError::UnknownWorld(name.to_string()))
    }

    /// Every value occurring in a relation or the valuation.
    pub fn values(&self) -> BTreeSet<TruthValue> {
        crate::fuzzrel::value_set(self.relations.values(), self.valuation.values())
    }

    /// Same worlds and valuation, every relation inverted.
    pub fn reverse(&self) -> KripkeModel {
        KripkeModel { relations: self.relations.iter().map(|(&i, r)| (i, r.inverse())).collect(), ..self.clone() }
    }

    /// Same algebra, index set and variables.
    pub fn check_compatible(&self, other: &KripkeModel) -> Result<(), ModelError> {
        if self.algebra != other.algebra {
            return Err(ModelError::Incompatible(format!("algebras {} and {}", self.algebra, other.algebra)));
        }
        let (a, b): (BTreeSet<_>, BTreeSet<_>) = (self.indices.iter().collect(), other.indices.iter().collect());
        if a != b {
            return Err(ModelError::Incompatible(format!("index sets {a:?} and {b:?}")));
        }
        let (a, b): (BTreeSet<_>, BTreeSet<_>) = (self.variables().collect(), other.variables().collect());
        if a != b {
            return Err(ModelError::Incompatible(format!("variable sets {a:?} and {b:?}")));
        }
        Ok(())
    }

    /// Rejects undeclared variables, undeclared indices and constants outside the carrier.
    pub fn check_formula(&self, a: &Formula) -> Result<(), ModelError> {
        if let Some(p) = a.variables().into_iter().find(|p| !self.valuation.contains_key(p)) {
            return Err(ModelError::UndeclaredVariable(p));
        }
        if let Some(i) = a.indices().into_iter().find(|i| !self.relations.contains_key(i)) {
            return Err(ModelError::UndeclaredIndex(i));
        }
        for t in a.constants() {
            self.algebra.check(&t)?;
        }
        Ok(())
    }

    /// `V_A` over all worlds.
    pub fn eval_vec(&self, a: &Formula) -> Result<FuzzyVec, ModelError> {
        self.check_formula(a)?;
        Ok(self.eval_unchecked(a))
    }

    pub fn eval(&self, world: usize, a: &Formula) -> Result<TruthValue, ModelError> {
        if world >= self.len() {
            return Err(ModelError::UnknownWorld(world.to_string()));
        }
        Ok(self.eval_vec(a)?.0.swap_remove(world))
    }

    fn eval_unchecked(&self, a: &Formula) -> FuzzyVec {
        match a {
            Formula::Const(t) => FuzzyVec::filled(self.len(), t.clone()),
            Formula::Var(p) => self.valuation[p].clone(),
            Formula::And(x, y) => {
                let (x, y) = (self.eval_unchecked(x), self.eval_unchecked(y));
                x.iter().zip(y.iter()).map(|(a, b)| a.meet(b)).collect()
            }
            Formula::Implies(x, y) => {
                let (x, y) = (self.eval_unchecked(x), self.eval_unchecked(y));
                x.iter().zip(y.iter()).map(|(a, b)| a.residuum(b)).collect()
            }
            Formula::Modal(m, i, x) => self.modal_image(*m, *i, &self.eval_unchecked(x)),
        }
    }

    /// The value vector of `m_i A` given the value vector `f` of `A`.
    ///
    /// Panics if `index` is undeclared or `f` has the wrong length.
    pub fn modal_image(&self, m: Modality, index: u32, f: &FuzzyVec) -> FuzzyVec {
        modal_image(&self.relations[&index], m, f)
    }
}

/// `m A` on a single relation `r`, given `f = V_A`.
pub fn modal_image(r: &FuzzyMat, m: Modality, f: &FuzzyVec) -> FuzzyVec {
    let n = r.rows();
    let entry = |w: usize, u: usize| if m.is_inverse() { r.get(u, w) } else { r.get(w, u) };
    (0..n)
        .map(|w| {
            if m.is_box() {
                (0..n).map(|u| entry(w, u).residuum(&f[u])).min().unwrap_or_else(TruthValue::one)
            } else {
                (0..n).map(|u| entry(w, u).meet(&f[u])).max().unwrap_or_else(TruthValue::zero)
            }
        })
        .collect()
}

/// Outcome of a Ψ-equivalence test between two models.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Equivalence {
    pub equivalent: bool,
    /// For each world of the first model, a matching world of the second.
    pub forward: Vec<Option<usize>>,
    /// For each world of the second model, a matching world of the first.
    pub backward: Vec<Option<usize>>,
}

impl Equivalence {
    /// First unmatched world: `(false, w)` for the first model, `(true, w')` for the second.
    pub fn first_unmatched(&self) -> Option<(bool, usize)> {
        if let Some(w) = self.forward.iter().position(Option::is_none) {
            return Some((false, w));
        }
        self.backward.iter().position(Option::is_none).map(|w| (true, w))
    }
}

/// Models are Ψ-equivalent when every world on either side has a partner on
/// the other side agreeing on every formula of Ψ.
pub fn phi_equivalent(m: &KripkeModel, m2: &KripkeModel, psi: &[Formula]) -> Result<Equivalence, ModelError> {
    let left = psi.iter().map(|a| m.eval_vec(a)).collect::<Result<Vec<_>, _>>()?;
    let right = psi.iter().map(|a| m2.eval_vec(a)).collect::<Result<Vec<_>, _>>()?;
    let agree = |w: usize, w2: usize| left.iter().zip(&right).all(|(l, r)| l[w] == r[w2]);
    let forward: Vec<_> = (0..m.len()).map(|w| (0..m2.len()).find(|&w2| agree(w, w2))).collect();
    let backward: Vec<_> = (0..m2.len()).map(|w2| (0..m.len()).find(|&w| agree(w, w2))).collect();
    let equivalent = forward.iter().chain(&backward).all(Option::is_some);
    Ok(Equivalence { equivalent, forward, backward })
}
