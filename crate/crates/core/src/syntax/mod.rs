//! The multimodal language: formulae built from truth constants and
//! propositional variables with `&`, `->`, and the four modalities per index.
//!
//! Negation, bi-implication and disjunction are abbreviations and are expanded
//! by the parser:
//!
//! ```text
//! !A      = A -> 0
//! A <-> B = (A -> B) & (B -> A)
//! A | B   = ((A -> B) -> B) & ((B -> A) -> A)
//! ```

mod enumerate;
mod parser;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::TruthValue;

pub use enumerate::{enumerate, EnumConfig, Enumeration, Modalities};
pub use parser::{parse, parse_corpus, ParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Modality {
    /// `[]_i`
    Box,
    /// `<>_i`
    Diamond,
    /// `[]-_i`
    BoxInv,
    /// `<>-_i`
    DiamondInv,
}

impl Modality {
    pub const ALL: [Modality; 4] = [Modality::Box, Modality::Diamond, Modality::BoxInv, Modality::DiamondInv];

    pub fn is_inverse(self) -> bool {
        matches!(self, Modality::BoxInv | Modality::DiamondInv)
    }

    pub fn is_box(self) -> bool {
        matches!(self, Modality::Box | Modality::BoxInv)
    }

    pub fn dual(self) -> Modality {
        match self {
            Modality::Box => Modality::BoxInv,
            Modality::BoxInv => Modality::Box,
            Modality::Diamond => Modality::DiamondInv,
            Modality::DiamondInv => Modality::Diamond,
        }
    }

    fn token(self) -> &'static str {
        match self {
            Modality::Box => "[]",
            Modality::Diamond => "<>",
            Modality::BoxInv => "[]-",
            Modality::DiamondInv => "<>-",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Const(TruthValue),
    Var(String),
    And(Arc<Formula>, Arc<Formula>),
    Implies(Arc<Formula>, Arc<Formula>),
    Modal(Modality, u32, Arc<Formula>),
}

impl Formula {
    pub fn var(name: &str) -> Formula {
        Formula::Var(name.to_string())
    }

    pub fn constant(value: TruthValue) -> Formula {
        Formula::Const(value)
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Arc::new(a), Arc::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Arc::new(a), Arc::new(b))
    }

    pub fn negation(a: Formula) -> Formula {
        Formula::implies(a, Formula::Const(TruthValue::zero()))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(Formula::implies(a.clone(), b.clone()), Formula::implies(b, a))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        let ab = Formula::implies(Formula::implies(a.clone(), b.clone()), b.clone());
        let ba = Formula::implies(Formula::implies(b, a.clone()), a);
        Formula::and(ab, ba)
    }

    pub fn modal(m: Modality, index: u32, a: Formula) -> Formula {
        Formula::Modal(m, index, Arc::new(a))
    }

    pub fn boxed(index: u32, a: Formula) -> Formula {
        Formula::modal(Modality::Box, index, a)
    }

    pub fn diamond(index: u32, a: Formula) -> Formula {
        Formula::modal(Modality::Diamond, index, a)
    }

    pub fn box_inv(index: u32, a: Formula) -> Formula {
        Formula::modal(Modality::BoxInv, index, a)
    }

    pub fn diamond_inv(index: u32, a: Formula) -> Formula {
        Formula::modal(Modality::DiamondInv, index, a)
    }

    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Const(_) | Formula::Var(_) => 0,
            Formula::And(a, b) | Formula::Implies(a, b) => a.modal_depth().max(b.modal_depth()),
            Formula::Modal(_, _, a) => 1 + a.modal_depth(),
        }
    }

    /// The least fragment containing this formula.
    pub fn classify(&self) -> Fragment {
        match self {
            Formula::Const(_) | Formula::Var(_) => Fragment::Propositional,
            Formula::And(a, b) | Formula::Implies(a, b) => a.classify().join(b.classify()),
            Formula::Modal(m, _, a) => {
                let own = if m.is_inverse() { Fragment::Minus } else { Fragment::Plus };
                own.join(a.classify())
            }
        }
    }

    /// Swaps every modality with its converse.
    pub fn dual(&self) -> Formula {
        match self {
            Formula::Const(_) | Formula::Var(_) => self.clone(),
            Formula::And(a, b) => Formula::and(a.dual(), b.dual()),
            Formula::Implies(a, b) => Formula::implies(a.dual(), b.dual()),
            Formula::Modal(m, i, a) => Formula::modal(m.dual(), *i, a.dual()),
        }
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| {
            if let Formula::Var(p) = f {
                out.insert(p.clone());
            }
        });
        out
    }

    pub fn indices(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| {
            if let Formula::Modal(_, i, _) = f {
                out.insert(*i);
            }
        });
        out
    }

    pub fn constants(&self) -> BTreeSet<TruthValue> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| {
            if let Formula::Const(t) = f {
                out.insert(t.clone());
            }
        });
        out
    }

    fn walk(&self, visit: &mut impl FnMut(&Formula)) {
        visit(self);
        match self {
            Formula::Const(_) | Formula::Var(_) => {}
            Formula::And(a, b) | Formula::Implies(a, b) => {
                a.walk(visit);
                b.walk(visit);
            }
            Formula::Modal(_, _, a) => a.walk(visit),
        }
    }

    // 0: implication, 1: conjunction, 2: unary and atoms
    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        let (own, parens) = match self {
            Formula::Implies(..) => (0, prec > 0),
            Formula::And(..) => (1, prec > 1),
            _ => (2, false),
        };
        if parens {
            f.write_str("(")?;
        }
        match self {
            Formula::Const(t) => write!(f, "{t}")?,
            Formula::Var(p) => f.write_str(p)?,
            Formula::And(a, b) => {
                a.fmt_prec(f, 1)?;
                f.write_str(" & ")?;
                b.fmt_prec(f, 2)?;
            }
            Formula::Implies(a, b) => {
                a.fmt_prec(f, 1)?;
                f.write_str(" -> ")?;
                b.fmt_prec(f, 0)?;
            }
            Formula::Modal(m, i, a) => {
                write!(f, "{}_{} ", m.token(), i)?;
                a.fmt_prec(f, own)?;
            }
        }
        if parens {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl FromStr for Formula {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

/// Syntactic fragments, ordered by inclusion along `Propositional <= Plus, Minus <= Full`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fragment {
    #[serde(rename = "prop")]
    Propositional,
    Plus,
    Minus,
    Full,
}

impl Fragment {
    pub fn join(self, other: Fragment) -> Fragment {
        use Fragment::*;
        match (self, other) {
            (Propositional, x) | (x, Propositional) => x,
            (a, b) if a == b => a,
            _ => Full,
        }
    }

    pub fn contains(self, other: Fragment) -> bool {
        self.join(other) == self
    }

    pub fn dual(self) -> Fragment {
        match self {
            Fragment::Plus => Fragment::Minus,
            Fragment::Minus => Fragment::Plus,
            other => other,
        }
    }

    /// Whether formulae of this fragment may use the given modality.
    pub fn allows(self, m: Modality) -> bool {
        match self {
            Fragment::Propositional => false,
            Fragment::Plus => !m.is_inverse(),
            Fragment::Minus => m.is_inverse(),
            Fragment::Full => true,
        }
    }
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fragment::Propositional => "prop",
            Fragment::Plus => "plus",
            Fragment::Minus => "minus",
            Fragment::Full => "full",
        })
    }
}

impl FromStr for Fragment {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "prop" | "propositional" => Ok(Fragment::Propositional),
            "plus" => Ok(Fragment::Plus),
            "minus" => Ok(Fragment::Minus),
            "full" => Ok(Fragment::Full),
            other => Err(format!("unknown fragment `{other}` (expected prop, plus, minus or full)")),
        }
    }
}
