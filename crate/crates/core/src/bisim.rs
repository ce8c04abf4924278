//! Greatest presimulations and prebisimulations between two models.
//!
//! Every condition system is built from two primitives applied to a relation
//! `psi` between models `A` and `B`:
//!
//! ```text
//! forward   (1) V_A <= V_B o psi^-1   (2) psi^-1 o R_A <= R_B o psi^-1   (3) psi^-1 o V_A <= V_B
//! backward  (1) V_A <= psi o V_B      (2) R_A o psi <= psi o R_B         (3) V_A o psi <= V_B
//! ```
//!
//! taken either on `phi` from `M` to `M'` or on `phi^-1` from `M'` to `M`.
//!
//! The solver starts from the greatest relation satisfying (3), which is
//! `min_p V_p(w) -> V'_p(w')` for simulations and `min_p V_p(w) <-> V'_p(w')`
//! for bisimulations, and repeatedly meets it with the residual bounds of
//! every (2) inequality. All values stay inside the finite set of model values
//! plus `0` and `1`, so the decreasing sequence stabilizes; the result is the
//! greatest relation satisfying (2) and (3).

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::TruthValue;
use crate::fuzzrel::{residual_update, Direction, FuzzyMat, FuzzyVec, RelError, Side};
use crate::model::{KripkeModel, ModelError};
use crate::par::Exec;

#[derive(Debug, Error)]
pub enum BisimError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Shape(#[from] RelError),
    #[error("relation is {found:?}, expected {expected:?}")]
    RelationShape { found: (usize, usize), expected: (usize, usize) },
    #[error("internal error: no fixpoint after {0} iterations")]
    IterationCap(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SimType {
    Fs,
    Bs,
    Fb,
    Bb,
    Fbb,
    Bfb,
    Rb,
}

impl SimType {
    pub const ALL: [SimType; 7] = [SimType::Fs, SimType::Bs, SimType::Fb, SimType::Bb, SimType::Fbb, SimType::Bfb, SimType::Rb];
    pub const BISIMULATIONS: [SimType; 5] = [SimType::Fb, SimType::Bb, SimType::Fbb, SimType::Bfb, SimType::Rb];

    pub fn is_simulation(self) -> bool {
        matches!(self, SimType::Fs | SimType::Bs)
    }

    /// The type corresponding to this one between reverse models.
    pub fn dual(self) -> SimType {
        match self {
            SimType::Fs => SimType::Bs,
            SimType::Bs => SimType::Fs,
            SimType::Fb => SimType::Bb,
            SimType::Bb => SimType::Fb,
            SimType::Fbb => SimType::Bfb,
            SimType::Bfb => SimType::Fbb,
            SimType::Rb => SimType::Rb,
        }
    }

    /// The simulation primitives whose conjunction defines the type.
    pub fn parts(self) -> &'static [(Direction, Side)] {
        use Direction::*;
        use Side::*;
        match self {
            SimType::Fs => &[(Forward, Direct)],
            SimType::Bs => &[(Backward, Direct)],
            SimType::Fb => &[(Forward, Direct), (Forward, Inverse)],
            SimType::Bb => &[(Backward, Direct), (Backward, Inverse)],
            SimType::Fbb => &[(Forward, Direct), (Backward, Inverse)],
            SimType::Bfb => &[(Backward, Direct), (Forward, Inverse)],
            SimType::Rb => &[(Forward, Direct), (Forward, Inverse), (Backward, Direct), (Backward, Inverse)],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SimType::Fs => "fs",
            SimType::Bs => "bs",
            SimType::Fb => "fb",
            SimType::Bb => "bb",
            SimType::Fbb => "fbb",
            SimType::Bfb => "bfb",
            SimType::Rb => "rb",
        }
    }
}

impl fmt::Display for SimType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SimType {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SimType::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown type `{s}` (expected fs, bs, fb, bb, fbb, bfb or rb)"))
    }
}

/// A failing entry of an inequality `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub at: String,
    pub lhs: TruthValue,
    pub rhs: TruthValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionResult {
    /// `1`, `2` or `3`.
    pub group: u8,
    pub inequality: String,
    pub holds: bool,
    pub violation: Option<Violation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    pub sim_type: SimType,
    pub theta1: bool,
    pub theta2: bool,
    pub theta3: bool,
    pub nonempty: bool,
    pub conditions: Vec<ConditionResult>,
}

impl ConditionReport {
    pub fn first_failure(&self) -> Option<&ConditionResult> {
        self.conditions.iter().find(|c| !c.holds)
    }
}

struct Ctx<'a> {
    a: &'a KripkeModel,
    b: &'a KripkeModel,
    psi: FuzzyMat,
    psi_inv: FuzzyMat,
    psi_name: &'static str,
    psi_inv_name: &'static str,
    a_prime: &'static str,
    b_prime: &'static str,
}

fn vec_leq(lhs: &FuzzyVec, rhs: &FuzzyVec, worlds: &[String]) -> Option<Violation> {
    lhs.first_excess(rhs).map(|i| Violation { at: worlds[i].clone(), lhs: lhs[i].clone(), rhs: rhs[i].clone() })
}

fn mat_leq(lhs: &FuzzyMat, rhs: &FuzzyMat, rows: &[String], cols: &[String]) -> Result<Option<Violation>, RelError> {
    Ok(lhs.first_excess(rhs)?.map(|(i, j)| Violation {
        at: format!("({}, {})", rows[i], cols[j]),
        lhs: lhs.get(i, j).clone(),
        rhs: rhs.get(i, j).clone(),
    }))
}

fn primed(worlds: &[String], prime: &str) -> Vec<String> {
    worlds.iter().map(|w| format!("{w}{prime}")).collect()
}

fn part_conditions(ctx: &Ctx<'_>, direction: Direction, out: &mut Vec<ConditionResult>) -> Result<(), RelError> {
    let (a, b) = (ctx.a, ctx.b);
    let wa = primed(a.worlds(), ctx.a_prime);
    let wb = primed(b.worlds(), ctx.b_prime);
    let (psi, psi_inv, pn, pin) = (&ctx.psi, &ctx.psi_inv, ctx.psi_name, ctx.psi_inv_name);
    let (ap, bp) = (ctx.a_prime, ctx.b_prime);
    let mut push = |group: u8, inequality: String, violation: Option<Violation>| {
        out.push(ConditionResult { group, inequality, holds: violation.is_none(), violation });
    };
    for (p, va) in a.valuations() {
        let vb = b.valuation(p).expect("compatible models");
        let (lhs, rhs, text) = match direction {
            Direction::Forward => (va.clone(), vb.compose_mat(psi_inv)?, format!("V_{p}{ap} <= V_{p}{bp} o {pin}")),
            Direction::Backward => (va.clone(), psi.compose_vec(vb)?, format!("V_{p}{ap} <= {pn} o V_{p}{bp}")),
        };
        push(1, text, vec_leq(&lhs, &rhs, &wa));
    }
    for &i in a.indices() {
        let (ra, rb) = (a.relation(i).expect("declared"), b.relation(i).expect("declared"));
        let (lhs, rhs, rows, cols, text) = match direction {
            Direction::Forward => {
                (psi_inv.compose(ra)?, rb.compose(psi_inv)?, &wb, &wa, format!("{pin} o R_{i}{ap} <= R_{i}{bp} o {pin}"))
            }
            Direction::Backward => {
                (ra.compose(psi)?, psi.compose(rb)?, &wa, &wb, format!("R_{i}{ap} o {pn} <= {pn} o R_{i}{bp}"))
            }
        };
        push(2, text, mat_leq(&lhs, &rhs, rows, cols)?);
    }
    for (p, va) in a.valuations() {
        let vb = b.valuation(p).expect("compatible models");
        let (lhs, text) = match direction {
            Direction::Forward => (psi_inv.compose_vec(va)?, format!("{pin} o V_{p}{ap} <= V_{p}{bp}")),
            Direction::Backward => (va.compose_mat(psi)?, format!("V_{p}{ap} o {pn} <= V_{p}{bp}")),
        };
        push(3, text, vec_leq(&lhs, vb, &wb));
    }
    Ok(())
}

/// Evaluates every inequality of (θ-1), (θ-2) and (θ-3) literally.
pub fn check_conditions(
    m: &KripkeModel,
    m2: &KripkeModel,
    phi: &FuzzyMat,
    sim_type: SimType,
) -> Result<ConditionReport, BisimError> {
    m.check_compatible(m2)?;
    if phi.shape() != (m.len(), m2.len()) {
        return Err(BisimError::RelationShape { found: phi.shape(), expected: (m.len(), m2.len()) });
    }
    let mut conditions = Vec::new();
    for &(direction, side) in sim_type.parts() {
        let ctx = match side {
            Side::Direct => Ctx {
                a: m,
                b: m2,
                psi: phi.clone(),
                psi_inv: phi.inverse(),
                psi_name: "phi",
                psi_inv_name: "phi^-1",
                a_prime: "",
                b_prime: "'",
            },
            Side::Inverse => Ctx {
                a: m2,
                b: m,
                psi: phi.inverse(),
                psi_inv: phi.clone(),
                psi_name: "phi^-1",
                psi_inv_name: "phi",
                a_prime: "'",
                b_prime: "",
            },
        };
        part_conditions(&ctx, direction, &mut conditions)?;
    }
    let group = |g: u8| conditions.iter().filter(|c| c.group == g).all(|c| c.holds);
    Ok(ConditionReport { sim_type, theta1: group(1), theta2: group(2), theta3: group(3), nonempty: !phi.is_zero(), conditions })
}

/// The greatest relation satisfying (θ-3) alone.
pub fn initial_relation(m: &KripkeModel, m2: &KripkeModel, sim_type: SimType) -> FuzzyMat {
    let vars: Vec<(&FuzzyVec, &FuzzyVec)> =
        m.valuations().map(|(p, v)| (v, m2.valuation(p).expect("compatible models"))).collect();
    FuzzyMat::from_fn(m.len(), m2.len(), |w, w2| {
        vars.iter()
            .map(|(v, v2)| if sim_type.is_simulation() { v[w].residuum(&v2[w2]) } else { v[w].biimplication(&v2[w2]) })
            .min()
            .unwrap_or_else(TruthValue::one)
    })
}

/// `10 |W| |W'| |values|`, where values are the model values plus 0 and 1.
pub fn iteration_cap(m: &KripkeModel, m2: &KripkeModel) -> usize {
    let mut values = m.values();
    values.extend(m2.values());
    values.insert(TruthValue::zero());
    values.insert(TruthValue::one());
    10 * m.len() * m2.len() * values.len()
}

/// One sweep: meet `phi` with every residual bound computed from `phi`.
fn step(m: &KripkeModel, m2: &KripkeModel, phi: &FuzzyMat, sim_type: SimType, exec: Exec) -> Result<FuzzyMat, BisimError> {
    let mut next = phi.clone();
    for (i, r) in m.relations() {
        let r2 = m2.relation(i).expect("compatible models");
        for &(direction, side) in sim_type.parts() {
            let chi = residual_update(phi, r, r2, direction, side, exec)?;
            next = next.meet(&chi)?;
        }
    }
    Ok(next)
}

/// The decreasing iterate sequence, ending at the fixpoint.
pub fn iterates(m: &KripkeModel, m2: &KripkeModel, sim_type: SimType, exec: Exec) -> Result<Vec<FuzzyMat>, BisimError> {
    m.check_compatible(m2)?;
    let cap = iteration_cap(m, m2);
    let mut seq = vec![initial_relation(m, m2, sim_type)];
    loop {
        let last = seq.last().expect("non-empty");
        let next = step(m, m2, last, sim_type, exec)?;
        if &next == last {
            return Ok(seq);
        }
        if seq.len() > cap {
            return Err(BisimError::IterationCap(cap));
        }
        seq.push(next);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimReport {
    pub sim_type: SimType,
    pub worlds: Vec<String>,
    pub worlds_prime: Vec<String>,
    pub matrix: Vec<Vec<TruthValue>>,
    pub satisfies_theta1: bool,
    pub nonempty: bool,
    pub exists: bool,
    /// Number of sweeps that changed the relation.
    pub iterations: usize,
    pub conditions: Vec<ConditionResult>,
    #[serde(skip)]
    pub relation: FuzzyMat,
}

/// The greatest θ-presimulation or θ-prebisimulation, with its condition report.
pub fn greatest_pre(m: &KripkeModel, m2: &KripkeModel, sim_type: SimType, exec: Exec) -> Result<SimReport, BisimError> {
    m.check_compatible(m2)?;
    let cap = iteration_cap(m, m2);
    let mut phi = initial_relation(m, m2, sim_type);
    let mut iterations = 0;
    loop {
        let next = step(m, m2, &phi, sim_type, exec)?;
        if next == phi {
            break;
        }
        iterations += 1;
        if iterations > cap {
            return Err(BisimError::IterationCap(cap));
        }
        phi = next;
    }
    let report = check_conditions(m, m2, &phi, sim_type)?;
    debug_assert!(report.theta2 && report.theta3);
    Ok(SimReport {
        sim_type,
        worlds: m.worlds().to_vec(),
        worlds_prime: m2.worlds().to_vec(),
        matrix: phi.to_rows(),
        satisfies_theta1: report.theta1,
        nonempty: report.nonempty,
        exists: report.theta1 && report.nonempty,
        iterations,
        conditions: report.conditions,
        relation: phi,
    })
}

/// Whether a θ-simulation/bisimulation exists; the report carries the greatest one if so.
pub fn exists_bisim(m: &KripkeModel, m2: &KripkeModel, sim_type: SimType, exec: Exec) -> Result<(bool, SimReport), BisimError> {
    let report = greatest_pre(m, m2, sim_type, exec)?;
    Ok((report.exists, report))
}
