//! Depth-bounded comparison of weak prebisimulations with strong ones.
//!
//! For a fragment (plus, minus or full) the harness enumerates value-vector
//! classes of formulae level by level:
//!
//! ```text
//! atoms_d = variables + constants + { m_i c : c in C_(d-1), i in I, m admissible }
//! C_d     = closure of atoms_d under & and ->
//! E_d     = min over C_d of V_A(w) <-> V'_A(w')
//! ```
//!
//! and stops at the first `d` with `E_(d+1) = E_d`. If `E` stalls from one
//! level to the next, every modal image of a class is already bounded by the
//! same matrix, so the stalled matrix satisfies the modal condition of the
//! matched strong type and further depths cannot lower it. The stalled `E` is
//! compared with the greatest fb-, bb- or rb-prebisimulation.

mod closure;

use std::collections::{BTreeSet, HashSet};

use serde::Serialize;
use thiserror::Error;

pub use closure::{naive_closure, Closure, Rank, RankRel, Ranks};

use crate::algebra::{Algebra, TruthValue};
use crate::bisim::{greatest_pre, BisimError, SimType};
use crate::fuzzrel::{FuzzyMat, FuzzyVec};
use crate::model::{KripkeModel, ModelError};
use crate::par::Exec;
use crate::syntax::{Formula, Fragment, Modalities, Modality};
use crate::weak::{self, WeakError, WeakReport};

#[derive(Debug, Error)]
pub enum HmError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Bisim(#[from] BisimError),
    #[error(transparent)]
    Relation(#[from] crate::fuzzrel::RelError),
    #[error(transparent)]
    Weak(#[from] WeakError),
    #[error("fragment {0} has no matching strong bisimulation (use plus, minus or full)")]
    UnsupportedFragment(Fragment),
    #[error("algebra {0} is not linearly ordered")]
    NonLinear(Algebra),
}

#[derive(Debug, Clone)]
pub struct HmOptions {
    /// Largest depth examined.
    pub cap: usize,
    /// Maximum number of classes per level.
    pub budget: usize,
    /// Truth constants; `None` means every model value plus 0 and 1.
    pub constants: Option<Vec<TruthValue>>,
    pub modalities: Modalities,
    pub exec: Exec,
}

impl Default for HmOptions {
    fn default() -> Self {
        HmOptions { cap: 4, budget: 200_000, constants: None, modalities: Modalities::BOTH, exec: Exec::default() }
    }
}

/// The strong type matched with a fragment.
pub fn matched_type(fragment: Fragment) -> Option<SimType> {
    match fragment {
        Fragment::Plus => Some(SimType::Fb),
        Fragment::Minus => Some(SimType::Bb),
        Fragment::Full => Some(SimType::Rb),
        Fragment::Propositional => None,
    }
}

/// Rank tables and generators for one model pair.
pub struct Levels {
    ranks: Ranks,
    k: usize,
    k2: usize,
    variables: Vec<Vec<Rank>>,
    constants: Vec<Rank>,
    relations: Vec<(RankRel, RankRel)>,
    modalities: Vec<Modality>,
    budget: usize,
    exec: Exec,
}

impl Levels {
    pub fn new(m: &KripkeModel, m2: &KripkeModel, fragment: Fragment, options: &HmOptions) -> Result<Self, HmError> {
        m.check_compatible(m2)?;
        if !m.algebra().is_linear() {
            return Err(HmError::NonLinear(m.algebra()));
        }
        let mut values = m.values();
        values.extend(m2.values());
        values.insert(TruthValue::zero());
        values.insert(TruthValue::one());
        let constants: BTreeSet<TruthValue> = match &options.constants {
            Some(cs) => {
                for c in cs {
                    m.algebra().check(c).map_err(ModelError::from)?;
                }
                cs.iter().cloned().collect()
            }
            None => values.clone(),
        };
        values.extend(constants.iter().cloned());
        let ranks = Ranks::new(values);
        let variables = m
            .valuations()
            .map(|(p, v)| {
                let v2 = m2.valuation(p).expect("compatible models");
                v.iter().chain(v2.iter()).map(|t| ranks.rank(t)).collect()
            })
            .collect();
        let relations = m
            .relations()
            .map(|(i, r)| (RankRel::new(&ranks, r), RankRel::new(&ranks, m2.relation(i).expect("compatible models"))))
            .collect();
        Ok(Levels {
            k: m.len(),
            k2: m2.len(),
            variables,
            constants: constants.iter().map(|c| ranks.rank(c)).collect(),
            relations,
            modalities: Modality::ALL.into_iter().filter(|&mo| fragment.allows(mo) && options.modalities.admits(mo)).collect(),
            budget: options.budget,
            exec: options.exec,
            ranks,
        })
    }

    pub fn ranks(&self) -> &Ranks {
        &self.ranks
    }

    pub fn width(&self) -> usize {
        self.k + self.k2
    }

    /// Variables plus modal images of `previous`.
    pub fn atoms(&self, previous: Option<&Closure>) -> HashSet<Vec<Rank>> {
        let mut atoms: HashSet<Vec<Rank>> = self.variables.iter().cloned().collect();
        if let Some(prev) = previous {
            let classes: Vec<&[Rank]> = prev.classes().collect();
            let images = self.exec.map_slice(&classes, |c| {
                let mut out = Vec::new();
                for (r, r2) in &self.relations {
                    for &mo in &self.modalities {
                        let mut v = Vec::with_capacity(self.width());
                        r.image(&self.ranks, mo, &c[..self.k], &mut v);
                        r2.image(&self.ranks, mo, &c[self.k..], &mut v);
                        out.push(v);
                    }
                }
                out
            });
            atoms.extend(images.into_iter().flatten());
        }
        atoms
    }

    pub fn level(&self, previous: Option<&Closure>) -> Closure {
        Closure::generate(&self.ranks, self.width(), &self.atoms(previous), &self.constants, self.budget, self.exec)
    }

    /// `min_c c(w) <-> c(w')` over the classes.
    pub fn weak_matrix(&self, classes: &Closure) -> FuzzyMat {
        let top = self.ranks.top();
        let mut acc = vec![top; self.k * self.k2];
        for c in classes.classes() {
            for w in 0..self.k {
                for w2 in 0..self.k2 {
                    let e = &mut acc[w * self.k2 + w2];
                    *e = (*e).min(self.ranks.biimplication(c[w], c[self.k + w2]));
                }
            }
        }
        FuzzyMat::from_fn(self.k, self.k2, |w, w2| self.ranks.value(acc[w * self.k2 + w2]).clone())
    }

    /// Each class as its pair of value vectors.
    pub fn decode(&self, classes: &Closure) -> Vec<(FuzzyVec, FuzzyVec)> {
        let value = |r: &Rank| self.ranks.value(*r).clone();
        classes.classes().map(|c| (c[..self.k].iter().map(value).collect(), c[self.k..].iter().map(value).collect())).collect()
    }

    /// `min_c c(w) -> c(w')` over the classes.
    pub fn presim_matrix(&self, classes: &Closure) -> FuzzyMat {
        FuzzyMat::from_fn(self.k, self.k2, |w, w2| {
            let r = classes.classes().map(|c| self.ranks.residuum(c[w], c[self.k + w2])).min().unwrap_or(self.ranks.top());
            self.ranks.value(r).clone()
        })
    }
}

#[derive(Debug, Clone)]
pub struct DepthResult {
    pub matrix: FuzzyMat,
    pub classes: usize,
    pub truncated: bool,
}

/// `E_d` for the fragment.
pub fn weak_by_depth(
    m: &KripkeModel,
    m2: &KripkeModel,
    fragment: Fragment,
    depth: usize,
    options: &HmOptions,
) -> Result<DepthResult, HmError> {
    let levels = Levels::new(m, m2, fragment, options)?;
    let mut c = levels.level(None);
    for _ in 0..depth {
        if c.truncated {
            break;
        }
        c = levels.level(Some(&c));
    }
    Ok(DepthResult { matrix: levels.weak_matrix(&c), classes: c.len(), truncated: c.truncated })
}

/// Both weak closed forms for the depth-bounded fragment, computed over classes.
/// The flag reports budget truncation.
pub fn weak_report_by_depth(
    m: &KripkeModel,
    m2: &KripkeModel,
    fragment: Fragment,
    depth: usize,
    options: &HmOptions,
) -> Result<(WeakReport, bool), HmError> {
    let levels = Levels::new(m, m2, fragment, options)?;
    let mut c = levels.level(None);
    for _ in 0..depth {
        if c.truncated {
            break;
        }
        c = levels.level(Some(&c));
    }
    let r = weak::report(m, m2, &levels.decode(&c), format!("{fragment} formulae of depth <= {depth}"))?;
    Ok((r, c.truncated))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DepthRecord {
    pub depth: usize,
    pub classes: usize,
    pub truncated: bool,
    pub matrix: Vec<Vec<TruthValue>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub world: String,
    pub world_prime: String,
    pub weak: TruthValue,
    pub strong: TruthValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Finiteness {
    pub index: u32,
    pub max_image: usize,
    pub max_domain: usize,
    pub max_image_prime: usize,
    pub max_domain_prime: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Match,
    Mismatch,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HmReport {
    pub fragment: Fragment,
    pub sim_type: SimType,
    pub modalities: &'static str,
    pub worlds: Vec<String>,
    pub worlds_prime: Vec<String>,
    pub strong: Vec<Vec<TruthValue>>,
    pub depths: Vec<DepthRecord>,
    /// First `d` with `E_(d+1) = E_d`.
    pub converged_at: Option<usize>,
    pub truncated: bool,
    pub matches: bool,
    pub first_mismatch: Option<Mismatch>,
    /// The strong relation lies below every `E_d`.
    pub strong_below_weak: bool,
    /// `E_d` never increased with `d`.
    pub antitone: bool,
    pub finiteness: Vec<Finiteness>,
    pub verdict: Verdict,
}

fn modality_label(m: Modalities) -> &'static str {
    match (m.boxes, m.diamonds) {
        (true, true) => "both",
        (false, true) => "diamond",
        (true, false) => "box",
        (false, false) => "none",
    }
}

fn finiteness(m: &KripkeModel, m2: &KripkeModel) -> Vec<Finiteness> {
    m.relations()
        .map(|(i, r)| {
            let (a, b) = (r.nonzero_profile(), m2.relation(i).expect("compatible models").nonzero_profile());
            Finiteness {
                index: i,
                max_image: a.max_image(),
                max_domain: a.max_domain(),
                max_image_prime: b.max_image(),
                max_domain_prime: b.max_domain(),
            }
        })
        .collect()
}

/// Runs `E_0, E_1, ...` until it stalls, the depth cap is reached or the
/// budget runs out, and compares the result with the matched strong relation.
pub fn hm_check(m: &KripkeModel, m2: &KripkeModel, fragment: Fragment, options: &HmOptions) -> Result<HmReport, HmError> {
    let sim_type = matched_type(fragment).ok_or(HmError::UnsupportedFragment(fragment))?;
    let levels = Levels::new(m, m2, fragment, options)?;
    let strong = greatest_pre(m, m2, sim_type, options.exec)?.relation;

    let mut depths = Vec::new();
    let mut matrices: Vec<FuzzyMat> = Vec::new();
    let mut converged_at = None;
    let mut truncated = false;
    let mut current: Option<Closure> = None;
    for d in 0..=options.cap {
        let c = levels.level(current.as_ref());
        let e = levels.weak_matrix(&c);
        depths.push(DepthRecord { depth: d, classes: c.len(), truncated: c.truncated, matrix: e.to_rows() });
        truncated = c.truncated;
        let stalled = matrices.last() == Some(&e);
        matrices.push(e);
        if truncated {
            break;
        }
        if stalled {
            converged_at = Some(d - 1);
            break;
        }
        current = Some(c);
    }

    let last = matrices.last().expect("at least depth 0");
    let antitone = matrices.windows(2).all(|w| w[1].leq(&w[0]).unwrap_or(false));
    let strong_below_weak = matrices.iter().all(|e| strong.leq(e).unwrap_or(false));
    let first_mismatch = last.first_excess(&strong)?.or(strong.first_excess(last)?).map(|(i, j)| Mismatch {
        world: m.worlds()[i].clone(),
        world_prime: m2.worlds()[j].clone(),
        weak: last.get(i, j).clone(),
        strong: strong.get(i, j).clone(),
    });
    let converged = converged_at.is_some() && !truncated;
    let matches = converged && first_mismatch.is_none();
    let verdict = match (converged, matches) {
        (true, true) => Verdict::Match,
        (true, false) => Verdict::Mismatch,
        _ => Verdict::Inconclusive,
    };
    Ok(HmReport {
        fragment,
        sim_type,
        modalities: modality_label(options.modalities),
        worlds: m.worlds().to_vec(),
        worlds_prime: m2.worlds().to_vec(),
        strong: strong.to_rows(),
        depths,
        converged_at,
        truncated,
        matches,
        first_mismatch,
        strong_below_weak,
        antitone,
        finiteness: finiteness(m, m2),
        verdict,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvarianceViolation {
    pub world: String,
    pub world_prime: String,
    pub relation: TruthValue,
    pub bound: TruthValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvarianceVerdict {
    pub sim_type: SimType,
    pub fragment: Fragment,
    pub depth: usize,
    /// Value-vector classes checked; each stands for every formula with that vector pair.
    pub classes: usize,
    pub violations: usize,
    pub first_violation: Option<InvarianceViolation>,
    pub truncated: bool,
}

impl InvarianceVerdict {
    pub fn holds(&self) -> bool {
        self.violations == 0 && !self.truncated
    }
}

/// Checks `phi(u, u') <= V_A(u) <-> V'_A(u')` for the greatest θ-relation
/// and every formula of the fragment up to `depth`.
pub fn invariance_suite(
    m: &KripkeModel,
    m2: &KripkeModel,
    sim_type: SimType,
    fragment: Fragment,
    depth: usize,
    options: &HmOptions,
) -> Result<InvarianceVerdict, HmError> {
    let levels = Levels::new(m, m2, fragment, options)?;
    let phi = greatest_pre(m, m2, sim_type, options.exec)?.relation;
    let mut c = levels.level(None);
    for _ in 0..depth {
        if c.truncated {
            break;
        }
        c = levels.level(Some(&c));
    }
    let ranks = levels.ranks();
    let k = m.len();
    let mut violations = 0;
    let mut first_violation = None;
    for class in c.classes() {
        for w in 0..k {
            for w2 in 0..m2.len() {
                let bound = ranks.value(ranks.biimplication(class[w], class[k + w2]));
                if phi.get(w, w2) > bound {
                    violations += 1;
                    first_violation.get_or_insert_with(|| InvarianceViolation {
                        world: m.worlds()[w].clone(),
                        world_prime: m2.worlds()[w2].clone(),
                        relation: phi.get(w, w2).clone(),
                        bound: bound.clone(),
                    });
                }
            }
        }
    }
    Ok(InvarianceVerdict { sim_type, fragment, depth, classes: c.len(), violations, first_violation, truncated: c.truncated })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InequalityFailure {
    pub x1: TruthValue,
    pub y1: TruthValue,
    pub x2: TruthValue,
    pub y2: TruthValue,
    /// `(x1 -> y1) & (x2 -> y2)`
    pub lhs: TruthValue,
    /// `(x1 -> x2) & (y1 -> y2)`
    pub rhs: TruthValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NonInvarianceWitness {
    pub model: String,
    pub model_prime: String,
    pub formula: String,
    /// Greatest forward presimulation at the single world pair.
    pub presimulation: TruthValue,
    pub value: TruthValue,
    pub value_prime: TruthValue,
    /// `value -> value_prime`, which the presimulation exceeds.
    pub bound: TruthValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NonInvariance {
    pub algebra: Algebra,
    pub palette: Vec<TruthValue>,
    pub inequality: Option<InequalityFailure>,
    pub witness: Option<NonInvarianceWitness>,
}

fn one_world(algebra: Algebra, name: &str, p: &TruthValue, q: &TruthValue) -> KripkeModel {
    let text = format!(
        r#"{{"algebra": "{algebra}", "worlds": ["{name}"], "indices": [1], "relations": {{"1": [["0"]]}},
            "valuation": {{"p": ["{p}"], "q": ["{q}"]}}}}"#
    );
    KripkeModel::from_json(&text).expect("well-formed one-world model")
}

/// Searches `palette^4` for a failure of `(x1 -> y1) & (x2 -> y2) <= (x1 -> x2) & (y1 -> y2)`
/// and for a pair of one-world models where the greatest forward presimulation
/// exceeds `V(p -> q) -> V'(p -> q)`.
///
/// The Gödel palette is `{0.6, 0.7, 0.8}`; finite chains use their carrier.
pub fn simulation_noninvariance_demo(algebra: Algebra) -> NonInvariance {
    let palette: Vec<TruthValue> = match algebra.carrier() {
        Some(c) => c,
        None => ["0.6", "0.7", "0.8"].iter().map(|s| s.parse().expect("literal")).collect(),
    };
    let mut inequality = None;
    let mut witness = None;
    let formula = Formula::implies(Formula::var("p"), Formula::var("q"));
    for x1 in &palette {
        for y1 in &palette {
            for x2 in &palette {
                for y2 in &palette {
                    let lhs = x1.residuum(y1).meet(&x2.residuum(y2));
                    let rhs = x1.residuum(x2).meet(&y1.residuum(y2));
                    if inequality.is_none() && lhs > rhs {
                        inequality =
                            Some(InequalityFailure { x1: x1.clone(), y1: y1.clone(), x2: x2.clone(), y2: y2.clone(), lhs, rhs });
                    }
                    if witness.is_none() {
                        // p takes x1 / y1 and q takes x2 / y2 in w / w'
                        let m = one_world(algebra, "w", x1, x2);
                        let m2 = one_world(algebra, "w'", y1, y2);
                        let phi = greatest_pre(&m, &m2, SimType::Fs, Exec::Sequential).expect("compatible").relation;
                        let v = m.eval(0, &formula).expect("declared");
                        let v2 = m2.eval(0, &formula).expect("declared");
                        let bound = v.residuum(&v2);
                        if phi.get(0, 0) > &bound {
                            witness = Some(NonInvarianceWitness {
                                model: m.to_json(),
                                model_prime: m2.to_json(),
                                formula: formula.to_string(),
                                presimulation: phi.get(0, 0).clone(),
                                value: v,
                                value_prime: v2,
                                bound,
                            });
                        }
                    }
                }
            }
        }
    }
    NonInvariance { algebra, palette, inequality, witness }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::tv;

    #[test]
    fn godel_demo_uses_the_remark_palette() {
        let d = simulation_noninvariance_demo(Algebra::Godel);
        let w = d.witness.expect("witness");
        assert_eq!(w.presimulation, TruthValue::one());
        assert!(w.presimulation > w.bound);
        assert!(d.inequality.is_some());
        assert!(d.palette.iter().all(|t| [tv("0.6"), tv("0.7"), tv("0.8")].contains(t)));
    }

    #[test]
    fn boolean_demo_finds_a_witness_too() {
        let d = simulation_noninvariance_demo(Algebra::Boolean);
        let f = d.inequality.expect("the inequality fails on {0, 1}");
        assert_eq!((f.lhs, f.rhs), (TruthValue::one(), TruthValue::zero()));
        assert!(d.witness.is_some());
    }

    #[test]
    fn propositional_fragment_is_rejected() {
        let m = one_world(Algebra::Godel, "w", &tv("0.5"), &tv("0.5"));
        assert!(matches!(hm_check(&m, &m, Fragment::Propositional, &HmOptions::default()), Err(HmError::UnsupportedFragment(_))));
    }

    #[test]
    fn self_comparison_matches() {
        let m = KripkeModel::from_json(
            r#"{"algebra": "godel", "worlds": ["a", "b"], "indices": [1],
                "relations": {"1": [["0.3", "1"], ["0", "0.6"]]}, "valuation": {"p": ["0.6", "1"]}}"#,
        )
        .unwrap();
        for f in [Fragment::Plus, Fragment::Minus, Fragment::Full] {
            let r = hm_check(&m, &m, f, &HmOptions::default()).unwrap();
            assert_eq!(r.verdict, Verdict::Match, "{f}");
            assert!(r.strong_below_weak && r.antitone);
            for i in 0..2 {
                assert!(r.strong[i][i].is_one());
            }
        }
    }
}
