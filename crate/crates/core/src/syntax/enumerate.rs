//! Depth-bounded formula enumeration with semantic deduplication.
//!
//! Formulae are identified by their value-vector pair `(V_A, V'_A)` over the
//! two models. Level `d` starts from the variables, the constants and every
//! admissible modality applied to a level `d - 1` class, then closes under
//! `&` and `->`. Each class keeps the first formula that reached it, so the
//! classes of level `d` are a prefix of those of level `d + 1`.

use std::collections::HashMap;

use super::{Formula, Fragment, Modality};
use crate::algebra::TruthValue;
use crate::fuzzrel::FuzzyVec;
use crate::model::{KripkeModel, ModelError};
use crate::par::Exec;

/// Which modal operators enumeration may introduce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Modalities {
    pub boxes: bool,
    pub diamonds: bool,
}

impl Modalities {
    pub const BOTH: Modalities = Modalities { boxes: true, diamonds: true };
    pub const DIAMONDS: Modalities = Modalities { boxes: false, diamonds: true };
    pub const BOXES: Modalities = Modalities { boxes: true, diamonds: false };

    pub fn admits(self, m: Modality) -> bool {
        if m.is_box() {
            self.boxes
        } else {
            self.diamonds
        }
    }
}

#[derive(Debug, Clone)]
pub struct EnumConfig {
    pub fragment: Fragment,
    pub depth: usize,
    pub variables: Vec<String>,
    pub constants: Vec<TruthValue>,
    pub indices: Vec<u32>,
    /// Maximum number of classes.
    pub budget: usize,
    pub modalities: Modalities,
    pub exec: Exec,
}

impl EnumConfig {
    /// Variables and indices of the models; constants are every model value plus 0 and 1.
    pub fn for_models(m: &KripkeModel, m2: &KripkeModel, fragment: Fragment, depth: usize) -> Self {
        let mut constants = m.values();
        constants.extend(m2.values());
        constants.insert(TruthValue::zero());
        constants.insert(TruthValue::one());
        EnumConfig {
            fragment,
            depth,
            variables: m.variables().map(str::to_string).collect(),
            constants: constants.into_iter().collect(),
            indices: m.indices().to_vec(),
            budget: 200_000,
            modalities: Modalities::BOTH,
            exec: Exec::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Enumeration {
    /// One representative per class, in generation order.
    pub formulas: Vec<Formula>,
    /// `(V_A, V'_A)` for each representative.
    pub vectors: Vec<(FuzzyVec, FuzzyVec)>,
    /// `level_ends[d]` is the number of classes of modal depth at most `d`.
    pub level_ends: Vec<usize>,
    pub truncated: bool,
}

impl Enumeration {
    pub fn level(&self, d: usize) -> &[Formula] {
        &self.formulas[..self.level_ends[d.min(self.level_ends.len() - 1)]]
    }
}

#[derive(Clone, Copy)]
enum Op {
    And,
    Implies,
}

struct State<'a> {
    m: &'a KripkeModel,
    m2: &'a KripkeModel,
    k: usize,
    formulas: Vec<Formula>,
    keys: Vec<Vec<TruthValue>>,
    seen: HashMap<Vec<TruthValue>, usize>,
    budget: usize,
    truncated: bool,
}

impl State<'_> {
    fn insert(&mut self, f: impl FnOnce() -> Formula, key: Vec<TruthValue>) {
        if self.truncated || self.seen.contains_key(&key) {
            return;
        }
        if self.formulas.len() >= self.budget {
            self.truncated = true;
            return;
        }
        self.seen.insert(key.clone(), self.formulas.len());
        self.formulas.push(f());
        self.keys.push(key);
    }

    fn modal_key(&self, m: Modality, i: u32, key: &[TruthValue]) -> Vec<TruthValue> {
        let left = self.m.modal_image(m, i, &FuzzyVec(key[..self.k].to_vec()));
        let right = self.m2.modal_image(m, i, &FuzzyVec(key[self.k..].to_vec()));
        left.0.into_iter().chain(right.0).collect()
    }

    /// Closes the class list under `&` and `->`, starting at class `done`.
    fn close(&mut self, mut done: usize, exec: Exec) {
        const BATCH: usize = 32;
        while done < self.formulas.len() && !self.truncated {
            let end = (done + BATCH).min(self.formulas.len());
            let batch: Vec<usize> = (done..end).collect();
            let keys = &self.keys;
            let seen = &self.seen;
            let candidates = exec.map_slice(&batch, |&x| {
                let mut out = Vec::new();
                for j in 0..=x {
                    for (op, a, b) in [(Op::And, x, j), (Op::Implies, x, j), (Op::Implies, j, x)] {
                        let key: Vec<TruthValue> = keys[a]
                            .iter()
                            .zip(&keys[b])
                            .map(|(s, t)| match op {
                                Op::And => s.meet(t),
                                Op::Implies => s.residuum(t),
                            })
                            .collect();
                        if !seen.contains_key(&key) {
                            out.push((op, a, b, key));
                        }
                    }
                }
                out
            });
            for (op, a, b, key) in candidates.into_iter().flatten() {
                let (fa, fb) = (self.formulas[a].clone(), self.formulas[b].clone());
                self.insert(
                    || match op {
                        Op::And => Formula::and(fa, fb),
                        Op::Implies => Formula::implies(fa, fb),
                    },
                    key,
                );
            }
            done = end;
        }
    }
}

/// Enumerates the classes of `config.fragment` up to `config.depth` over the
/// model pair. Stops early with `truncated` set once `budget` classes exist.
pub fn enumerate(config: &EnumConfig, m: &KripkeModel, m2: &KripkeModel) -> Result<Enumeration, ModelError> {
    m.check_compatible(m2)?;
    let (k, k2) = (m.len(), m2.len());
    let mut st = State {
        m,
        m2,
        k,
        formulas: Vec::new(),
        keys: Vec::new(),
        seen: HashMap::new(),
        budget: config.budget.max(1),
        truncated: false,
    };
    for p in &config.variables {
        let f = Formula::var(p);
        let key = m.eval_vec(&f)?.0.into_iter().chain(m2.eval_vec(&f)?.0).collect();
        st.insert(|| f, key);
    }
    for t in &config.constants {
        m.algebra().check(t)?;
        st.insert(|| Formula::Const(t.clone()), vec![t.clone(); k + k2]);
    }
    for &i in &config.indices {
        if m.relation(i).is_none() {
            return Err(ModelError::UndeclaredIndex(i));
        }
    }
    let modalities: Vec<Modality> =
        Modality::ALL.into_iter().filter(|&mo| config.fragment.allows(mo) && config.modalities.admits(mo)).collect();

    st.close(0, config.exec);
    let mut level_ends = vec![st.formulas.len()];
    for _ in 1..=config.depth {
        if st.truncated {
            break;
        }
        let previous = st.formulas.len();
        for c in 0..previous {
            for &i in &config.indices {
                for &mo in &modalities {
                    let key = st.modal_key(mo, i, &st.keys[c]);
                    let inner = st.formulas[c].clone();
                    st.insert(|| Formula::modal(mo, i, inner), key);
                }
            }
        }
        st.close(previous, config.exec);
        level_ends.push(st.formulas.len());
    }

    let vectors = st.keys.iter().map(|key| (FuzzyVec(key[..k].to_vec()), FuzzyVec(key[k..].to_vec()))).collect();
    Ok(Enumeration { formulas: st.formulas, vectors, level_ends, truncated: st.truncated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::tv;
    use crate::syntax::parse;

    const M: &str = r#"{
        "algebra": "godel",
        "worlds": ["u", "v"],
        "indices": [1],
        "relations": { "1": [["0", "0.8"], ["1", "0.3"]] },
        "valuation": { "p": ["0.8", "0.4"] }
    }"#;

    fn model() -> KripkeModel {
        KripkeModel::from_json(M).unwrap()
    }

    fn config(fragment: Fragment, depth: usize, constants: &[&str]) -> EnumConfig {
        EnumConfig {
            fragment,
            depth,
            variables: vec!["p".into()],
            constants: constants.iter().map(|s| tv(s)).collect(),
            indices: vec![1],
            budget: 10_000,
            modalities: Modalities::BOTH,
            exec: Exec::Sequential,
        }
    }

    #[test]
    fn depth_zero_propositional() {
        let m = model();
        let e = enumerate(&config(Fragment::Propositional, 0, &["0", "1"]), &m, &m).unwrap();
        let shown: Vec<String> = e.formulas.iter().map(ToString::to_string).collect();
        assert_eq!(&shown[..3], ["p", "0", "1"]);
        // p & p collapses onto p
        assert!(!shown.contains(&"p & p".to_string()));
        assert!(!e.truncated);
        assert!(e.formulas.iter().all(|f| f.modal_depth() == 0));
    }

    #[test]
    fn plus_depth_one_reaches_the_constructions() {
        let m = model();
        let e = enumerate(&config(Fragment::Plus, 1, &["0.8"]), &m, &m).unwrap();
        let key = |s: &str| {
            let f = parse(s).unwrap();
            let v = m.eval_vec(&f).unwrap();
            (v.clone(), v)
        };
        for s in ["<>_1 p", "<>_1 (p <-> 0.8)", "[]_1 p"] {
            assert!(e.vectors.contains(&key(s)), "{s}");
        }
        assert!(e.formulas.iter().all(|f| Fragment::Plus.contains(f.classify()) && f.modal_depth() <= 1));
    }

    #[test]
    fn levels_are_prefixes() {
        let m = model();
        let m2 = m.reverse();
        let e1 = enumerate(&config(Fragment::Full, 1, &["0", "1"]), &m, &m2).unwrap();
        let e2 = enumerate(&config(Fragment::Full, 2, &["0", "1"]), &m, &m2).unwrap();
        assert_eq!(e1.formulas[..], e2.formulas[..e1.formulas.len()]);
        assert_eq!(e2.level(1), &e1.formulas[..]);
        assert_eq!(e2.level_ends.len(), 3);
    }

    #[test]
    fn budget_truncates() {
        let m = model();
        let mut c = config(Fragment::Full, 3, &["0", "0.3", "0.4", "0.8", "1"]);
        c.budget = 5;
        let e = enumerate(&c, &m, &m).unwrap();
        assert!(e.truncated);
        assert_eq!(e.formulas.len(), 5);
    }

    #[test]
    fn parallel_matches_sequential() {
        let m = model();
        let m2 = m.reverse();
        let mut c = config(Fragment::Full, 2, &["0", "1"]);
        let seq = enumerate(&c, &m, &m2).unwrap();
        c.exec = Exec::Parallel;
        let par = enumerate(&c, &m, &m2).unwrap();
        assert_eq!(seq.formulas, par.formulas);
    }
}
