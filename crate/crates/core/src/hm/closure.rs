//! Rank-encoded value-vector classes and their closure under `&` and `->`.
//!
//! A class is the pair `(V_A, V'_A)` stored as one vector of `N = |W| + |W'|`
//! ranks into the sorted finite value set `S`. On a chain, rank order is the
//! truth order, so `min` and the residuum act on ranks directly.
//!
//! The clone generated by `&`, `->` contains the lattice majority term
//! `(x & y) | (y & z) | (x & z)` (with `|` expressed through `&` and `->`).
//! By the Baker-Pixley theorem the subalgebra of `S^N` generated by a set of
//! vectors is then exactly the set of vectors whose projection onto every
//! pair of coordinates lies in the subalgebra of `S^2` generated by the
//! projected generators. [`Closure::generate`] computes those `N (N - 1) / 2`
//! small closures and enumerates the consistent vectors by backtracking.

use std::collections::{BTreeSet, HashSet};

use crate::algebra::TruthValue;
use crate::fuzzrel::FuzzyMat;
use crate::par::Exec;
use crate::syntax::Modality;

pub type Rank = u16;

/// The sorted value set and rank arithmetic.
#[derive(Debug, Clone)]
pub struct Ranks {
    values: Vec<TruthValue>,
}

impl Ranks {
    /// `values` must contain 0 and 1.
    pub fn new(values: BTreeSet<TruthValue>) -> Self {
        assert!(values.contains(&TruthValue::zero()) && values.contains(&TruthValue::one()));
        assert!(values.len() <= Rank::MAX as usize);
        Ranks { values: values.into_iter().collect() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn top(&self) -> Rank {
        (self.values.len() - 1) as Rank
    }

    pub fn rank(&self, t: &TruthValue) -> Rank {
        self.values.binary_search(t).expect("value outside the rank table") as Rank
    }

    pub fn value(&self, r: Rank) -> &TruthValue {
        &self.values[r as usize]
    }

    #[inline]
    pub fn residuum(&self, x: Rank, z: Rank) -> Rank {
        if x <= z {
            self.top()
        } else {
            z
        }
    }

    #[inline]
    pub fn biimplication(&self, x: Rank, y: Rank) -> Rank {
        if x == y {
            self.top()
        } else {
            x.min(y)
        }
    }

    pub fn encode_mat(&self, m: &FuzzyMat) -> Vec<Vec<Rank>> {
        (0..m.rows()).map(|i| m.row(i).iter().map(|t| self.rank(t)).collect()).collect()
    }
}

/// Rank form of one model's relation for modal images.
#[derive(Debug, Clone)]
pub struct RankRel {
    rows: Vec<Vec<Rank>>,
}

impl RankRel {
    pub fn new(ranks: &Ranks, r: &FuzzyMat) -> Self {
        RankRel { rows: ranks.encode_mat(r) }
    }

    /// Image of `f` (over this relation's worlds) under the modality.
    pub fn image(&self, ranks: &Ranks, m: Modality, f: &[Rank], out: &mut Vec<Rank>) {
        let n = self.rows.len();
        for w in 0..n {
            let entry = |u: usize| if m.is_inverse() { self.rows[u][w] } else { self.rows[w][u] };
            let v = if m.is_box() {
                (0..n).map(|u| ranks.residuum(entry(u), f[u])).min().unwrap_or(ranks.top())
            } else {
                (0..n).map(|u| entry(u).min(f[u])).max().unwrap_or(0)
            };
            out.push(v);
        }
    }
}

/// Subalgebra of `S^2` as a dense membership table.
#[derive(Clone)]
struct PairSet {
    n: usize,
    member: Vec<bool>,
}

impl PairSet {
    fn contains(&self, a: Rank, b: Rank) -> bool {
        self.member[a as usize * self.n + b as usize]
    }

    fn close(ranks: &Ranks, seeds: impl IntoIterator<Item = (Rank, Rank)>) -> Self {
        let n = ranks.len();
        let mut member = vec![false; n * n];
        let mut list: Vec<(Rank, Rank)> = Vec::new();
        let push = |p: (Rank, Rank), member: &mut Vec<bool>, list: &mut Vec<(Rank, Rank)>| {
            let k = p.0 as usize * n + p.1 as usize;
            if !member[k] {
                member[k] = true;
                list.push(p);
            }
        };
        for p in seeds {
            push(p, &mut member, &mut list);
        }
        let mut i = 0;
        while i < list.len() {
            let x = list[i];
            for j in 0..=i {
                let y = list[j];
                push((x.0.min(y.0), x.1.min(y.1)), &mut member, &mut list);
                push((ranks.residuum(x.0, y.0), ranks.residuum(x.1, y.1)), &mut member, &mut list);
                push((ranks.residuum(y.0, x.0), ranks.residuum(y.1, x.1)), &mut member, &mut list);
            }
            i += 1;
        }
        PairSet { n, member }
    }
}

/// A closed set of classes, flat row-major with `width` ranks per class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Closure {
    pub width: usize,
    pub data: Vec<Rank>,
    pub truncated: bool,
}

impl Closure {
    pub fn len(&self) -> usize {
        self.data.len() / self.width
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn class(&self, i: usize) -> &[Rank] {
        &self.data[i * self.width..(i + 1) * self.width]
    }

    pub fn classes(&self) -> impl Iterator<Item = &[Rank]> {
        self.data.chunks(self.width)
    }

    /// Closure of `generators` together with the constant vectors of `constants`.
    /// Stops with `truncated` once more than `budget` classes are found.
    pub fn generate(
        ranks: &Ranks,
        width: usize,
        generators: &HashSet<Vec<Rank>>,
        constants: &[Rank],
        budget: usize,
        exec: Exec,
    ) -> Closure {
        let pairs: Vec<(usize, usize)> = (0..width).flat_map(|i| (i + 1..width).map(move |j| (i, j))).collect();
        let tables = exec.map_slice(&pairs, |&(i, j)| {
            let projected: HashSet<(Rank, Rank)> = generators.iter().map(|g| (g[i], g[j])).collect();
            PairSet::close(ranks, projected.into_iter().chain(constants.iter().map(|&c| (c, c))))
        });
        let mut by_col: Vec<Vec<PairSet>> = vec![Vec::new(); width];
        for (&(i, j), t) in pairs.iter().zip(tables) {
            debug_assert_eq!(by_col[j].len(), i);
            by_col[j].push(t);
        }
        // pair tables already constrain every coordinate once width >= 2
        let first: Vec<Rank> = if width == 1 {
            let single = PairSet::close(ranks, generators.iter().map(|g| (g[0], g[0])).chain(constants.iter().map(|&c| (c, c))));
            (0..ranks.len() as Rank).filter(|&a| single.contains(a, a)).collect()
        } else {
            (0..ranks.len() as Rank).collect()
        };
        let mut out = Closure { width, data: Vec::new(), truncated: false };
        let mut prefix: Vec<Rank> = Vec::with_capacity(width);
        backtrack(&by_col, &first, &mut prefix, &mut out, budget);
        out
    }
}

fn backtrack(by_col: &[Vec<PairSet>], domain: &[Rank], prefix: &mut Vec<Rank>, out: &mut Closure, budget: usize) -> bool {
    let j = prefix.len();
    if j == out.width {
        if out.len() >= budget {
            out.truncated = true;
            return false;
        }
        out.data.extend_from_slice(prefix);
        return true;
    }
    for &v in domain {
        if by_col[j].iter().enumerate().all(|(i, t)| t.contains(prefix[i], v)) {
            prefix.push(v);
            let go_on = backtrack(by_col, domain, prefix, out, budget);
            prefix.pop();
            if !go_on {
                return false;
            }
        }
    }
    true
}

/// Straightforward saturation, kept as a cross-check for [`Closure::generate`].
pub fn naive_closure(ranks: &Ranks, width: usize, generators: &HashSet<Vec<Rank>>, constants: &[Rank]) -> HashSet<Vec<Rank>> {
    let mut list: Vec<Vec<Rank>> = Vec::new();
    let mut seen: HashSet<Vec<Rank>> = HashSet::new();
    let mut seeds: Vec<Vec<Rank>> = generators.iter().cloned().collect();
    seeds.sort();
    seeds.extend(constants.iter().map(|&c| vec![c; width]));
    for s in seeds {
        if seen.insert(s.clone()) {
            list.push(s);
        }
    }
    let mut i = 0;
    while i < list.len() {
        for j in 0..=i {
            let (x, y) = (&list[i], &list[j]);
            let cands = [
                x.iter().zip(y).map(|(a, b)| *a.min(b)).collect::<Vec<_>>(),
                x.iter().zip(y).map(|(a, b)| ranks.residuum(*a, *b)).collect(),
                y.iter().zip(x).map(|(a, b)| ranks.residuum(*a, *b)).collect(),
            ];
            for c in cands {
                if seen.insert(c.clone()) {
                    list.push(c);
                }
            }
        }
        i += 1;
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::tv;

    fn ranks(xs: &[&str]) -> Ranks {
        Ranks::new(xs.iter().map(|s| tv(s)).collect())
    }

    #[test]
    fn rank_arithmetic() {
        let r = ranks(&["0", "0.3", "0.7", "1"]);
        assert_eq!(r.top(), 3);
        assert_eq!(r.rank(&tv("0.7")), 2);
        assert_eq!(r.residuum(2, 1), 1);
        assert_eq!(r.residuum(1, 2), 3);
        assert_eq!(r.biimplication(2, 2), 3);
        assert_eq!(r.biimplication(1, 2), 1);
    }

    #[test]
    fn fast_closure_matches_saturation() {
        let r = ranks(&["0", "0.2", "0.5", "1"]);
        let cases: Vec<(usize, Vec<Vec<Rank>>, Vec<Rank>)> = vec![
            (2, vec![vec![1, 2]], vec![0, 3]),
            (3, vec![vec![1, 2, 0], vec![3, 1, 2]], vec![0, 1, 2, 3]),
            (4, vec![vec![2, 2, 1, 0]], vec![3]),
            (1, vec![vec![2]], vec![]),
            (3, vec![], vec![0, 2]),
        ];
        for (width, gens, consts) in cases {
            let gens: HashSet<Vec<Rank>> = gens.into_iter().collect();
            let fast = Closure::generate(&r, width, &gens, &consts, usize::MAX, Exec::Sequential);
            let fast_set: HashSet<Vec<Rank>> = fast.classes().map(<[Rank]>::to_vec).collect();
            assert_eq!(fast_set.len(), fast.len());
            assert_eq!(fast_set, naive_closure(&r, width, &gens, &consts), "{width} {gens:?} {consts:?}");
        }
    }

    #[test]
    fn budget_truncates() {
        let r = ranks(&["0", "0.5", "1"]);
        let gens: HashSet<Vec<Rank>> = [vec![0, 1, 2, 1]].into_iter().collect();
        let c = Closure::generate(&r, 4, &gens, &[0, 1, 2], 3, Exec::Sequential);
        assert!(c.truncated);
        assert_eq!(c.len(), 3);
    }
}
