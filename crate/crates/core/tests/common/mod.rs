#![allow(dead_code)]

use std::collections::BTreeMap;

use fuzzy_kripke::algebra::{tv, Algebra, TruthValue};
use fuzzy_kripke::bisim::SimType;
use fuzzy_kripke::fuzzrel::{FuzzyMat, FuzzyVec};
use fuzzy_kripke::model::KripkeModel;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fixture(name: &str) -> KripkeModel {
    KripkeModel::load(format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))).expect("fixture loads")
}

pub fn pair(example: &str) -> (KripkeModel, KripkeModel) {
    (fixture(&format!("{example}_m.json")), fixture(&format!("{example}_m2.json")))
}

pub fn mat(rows: &[&[&str]]) -> FuzzyMat {
    FuzzyMat::from_rows(rows.iter().map(|r| r.iter().map(|s| tv(s)).collect()).collect()).unwrap()
}

/// Values a random model may use.
pub fn palette(algebra: Algebra) -> Vec<TruthValue> {
    match algebra.carrier() {
        Some(c) => c,
        None => ["0", "0.2", "0.3", "0.5", "0.7", "0.8", "1"].iter().map(|s| tv(s)).collect(),
    }
}

pub fn random_value(r: &mut ChaCha8Rng, values: &[TruthValue]) -> TruthValue {
    values.choose(r).unwrap().clone()
}

pub fn random_mat(r: &mut ChaCha8Rng, rows: usize, cols: usize, values: &[TruthValue]) -> FuzzyMat {
    FuzzyMat::from_fn(rows, cols, |_, _| random_value(r, values))
}

pub fn random_vec(r: &mut ChaCha8Rng, len: usize, values: &[TruthValue]) -> FuzzyVec {
    (0..len).map(|_| random_value(r, values)).collect()
}

/// Any rational in [0, 1] with denominator up to 60.
pub fn random_rational(r: &mut ChaCha8Rng) -> TruthValue {
    let den = r.random_range(1..=60i64);
    let num = r.random_range(0..=den);
    TruthValue::ratio(num, den).unwrap()
}

pub struct Shape {
    pub worlds: usize,
    pub indices: u32,
    pub variables: usize,
}

pub fn random_model(r: &mut ChaCha8Rng, algebra: Algebra, prefix: &str, shape: &Shape, values: &[TruthValue]) -> KripkeModel {
    let k = shape.worlds;
    let worlds = (0..k).map(|i| format!("{prefix}{i}")).collect();
    let indices: Vec<u32> = (1..=shape.indices).collect();
    let relations: BTreeMap<u32, FuzzyMat> = indices.iter().map(|&i| (i, random_mat(r, k, k, values))).collect();
    let valuation: BTreeMap<String, FuzzyVec> =
        ["p", "q", "s"][..shape.variables].iter().map(|p| (p.to_string(), random_vec(r, k, values))).collect();
    KripkeModel::new(algebra, worlds, indices, relations, valuation).unwrap()
}

/// A compatible pair; world counts drawn from `1..=max_worlds`.
pub fn random_pair(r: &mut ChaCha8Rng, algebra: Algebra, max_worlds: usize, values: &[TruthValue]) -> (KripkeModel, KripkeModel) {
    let indices = r.random_range(1..=2);
    let variables = r.random_range(1..=2);
    let a = Shape { worlds: r.random_range(1..=max_worlds), indices, variables };
    let b = Shape { worlds: r.random_range(1..=max_worlds), indices, variables };
    (random_model(r, algebra, "a", &a, values), random_model(r, algebra, "b", &b, values))
}

/// Brute-force reference on integer levels of a finite chain, written from
/// the inequalities as stated, without residuals.
pub mod oracle {
    use super::*;

    pub type Mat = Vec<Vec<u8>>;

    pub struct Small {
        pub rel: Vec<Mat>,
        pub val: Vec<Vec<u8>>,
    }

    impl Small {
        pub fn of(m: &KripkeModel) -> Small {
            let a = m.algebra();
            let lv = |t: &TruthValue| a.level_of(t).expect("finite chain") as u8;
            Small {
                rel: m.relations().map(|(_, r)| r.to_rows().iter().map(|row| row.iter().map(lv).collect()).collect()).collect(),
                val: m.valuations().map(|(_, v)| v.iter().map(lv).collect()).collect(),
            }
        }
    }

    pub fn inv(a: &Mat) -> Mat {
        if a.is_empty() {
            return vec![];
        }
        (0..a[0].len()).map(|j| a.iter().map(|row| row[j]).collect()).collect()
    }

    pub fn comp(a: &Mat, b: &Mat) -> Mat {
        let cols = b[0].len();
        a.iter()
            .map(|row| (0..cols).map(|c| row.iter().zip(b).map(|(x, brow)| (*x).min(brow[c])).max().unwrap_or(0)).collect())
            .collect()
    }

    /// Column-vector product `a o v`.
    pub fn comp_v(a: &Mat, v: &[u8]) -> Vec<u8> {
        a.iter().map(|row| row.iter().zip(v).map(|(x, y)| (*x).min(*y)).max().unwrap_or(0)).collect()
    }

    /// Row-vector product `v o a`.
    pub fn v_comp(v: &[u8], a: &Mat) -> Vec<u8> {
        (0..a[0].len()).map(|c| v.iter().zip(a).map(|(x, row)| (*x).min(row[c])).max().unwrap_or(0)).collect()
    }

    fn le(a: &Mat, b: &Mat) -> bool {
        a.iter().zip(b).all(|(x, y)| x.iter().zip(y).all(|(p, q)| p <= q))
    }

    fn le_v(a: &[u8], b: &[u8]) -> bool {
        a.iter().zip(b).all(|(p, q)| p <= q)
    }

    // (fs-2), (fs-3) for psi between models a and b
    fn forward(a: &Small, b: &Small, psi: &Mat) -> bool {
        let pi = inv(psi);
        a.rel.iter().zip(&b.rel).all(|(r, r2)| le(&comp(&pi, r), &comp(r2, &pi)))
            && a.val.iter().zip(&b.val).all(|(v, v2)| le_v(&comp_v(&pi, v), v2))
    }

    // (bs-2), (bs-3)
    fn backward(a: &Small, b: &Small, psi: &Mat) -> bool {
        a.rel.iter().zip(&b.rel).all(|(r, r2)| le(&comp(r, psi), &comp(psi, r2)))
            && a.val.iter().zip(&b.val).all(|(v, v2)| le_v(&v_comp(v, psi), v2))
    }

    /// (θ-2) and (θ-3).
    pub fn pre(theta: SimType, a: &Small, b: &Small, phi: &Mat) -> bool {
        let f = || forward(a, b, phi);
        let bk = || backward(a, b, phi);
        let fi = || forward(b, a, &inv(phi));
        let bi = || backward(b, a, &inv(phi));
        match theta {
            SimType::Fs => f(),
            SimType::Bs => bk(),
            SimType::Fb => f() && fi(),
            SimType::Bb => bk() && bi(),
            SimType::Fbb => f() && bi(),
            SimType::Bfb => bk() && fi(),
            SimType::Rb => f() && fi() && bk() && bi(),
        }
    }

    /// Entrywise join of every relation satisfying (θ-2), (θ-3), for each θ in `types`.
    pub fn greatest(types: &[SimType], a: &Small, b: &Small, levels: u8, k: usize, k2: usize) -> Vec<Mat> {
        let mut best: Vec<Mat> = vec![vec![vec![0; k2]; k]; types.len()];
        let n = k * k2;
        let mut digits = vec![0u8; n];
        loop {
            let phi: Mat = digits.chunks(k2).map(<[u8]>::to_vec).collect();
            for (t, acc) in types.iter().zip(best.iter_mut()) {
                // skip candidates already below the running join
                if le(&phi, acc) {
                    continue;
                }
                if pre(*t, a, b, &phi) {
                    for (x, y) in acc.iter_mut().flatten().zip(phi.iter().flatten()) {
                        *x = (*x).max(*y);
                    }
                }
            }
            let mut i = 0;
            loop {
                if i == n {
                    return best;
                }
                digits[i] += 1;
                if digits[i] < levels {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
        }
    }
}
