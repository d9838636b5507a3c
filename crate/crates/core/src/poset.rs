//! Finite posets stored with their full order matrix.

use std::collections::{BTreeSet, HashMap};
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite poset over named elements.
///
/// The order is kept as a dense `n x n` matrix together with its covering
/// pairs and all interval lengths. Element order in the input fixes every
/// downstream basis ordering.
#[derive(Debug, Clone)]
pub struct Poset {
    names: Vec<String>,
    index: HashMap<String, usize>,
    leq: Vec<bool>,
    covers: Vec<(usize, usize)>,
    // l(u, v) for u <= v, 0 elsewhere
    lengths: Vec<usize>,
}

impl PartialEq for Poset {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.leq == other.leq
    }
}

impl Eq for Poset {}

/// On-disk poset description: element names plus covering pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosetFile {
    pub elements: Vec<String>,
    pub covers: Vec<[String; 2]>,
}

impl Poset {
    /// Builds the reflexive-transitive closure of `covers`.
    pub fn build<S: AsRef<str>>(elements: &[S], covers: &[(S, S)]) -> Result<Self> {
        let names: Vec<String> = elements.iter().map(|s| s.as_ref().to_string()).collect();
        let index = index_names(&names)?;
        let n = names.len();
        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        for (a, b) in covers {
            let lookup = |s: &S| {
                index
                    .get(s.as_ref())
                    .copied()
                    .ok_or_else(|| Error::UnknownElement(s.as_ref().to_string()))
            };
            let (i, j) = (lookup(a)?, lookup(b)?);
            leq[i * n + j] = true;
        }
        // Warshall
        for k in 0..n {
            for i in 0..n {
                if leq[i * n + k] {
                    for j in 0..n {
                        if leq[k * n + j] {
                            leq[i * n + j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if leq[i * n + j] && leq[j * n + i] {
                    return Err(Error::CycleDetected(names[i].clone(), names[j].clone()));
                }
            }
        }
        Ok(Self::from_order(names, index, leq))
    }

    /// Builds a poset from a full order relation, verifying all three axioms.
    pub fn from_relation<S: AsRef<str>>(elements: &[S], leq: &[Vec<bool>]) -> Result<Self> {
        let names: Vec<String> = elements.iter().map(|s| s.as_ref().to_string()).collect();
        let index = index_names(&names)?;
        let n = names.len();
        if leq.len() != n || leq.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: leq.len() });
        }
        let flat: Vec<bool> = leq.iter().flatten().copied().collect();
        for i in 0..n {
            if !flat[i * n + i] {
                return Err(Error::Format(format!("relation is not reflexive at {:?}", names[i])));
            }
            for j in 0..n {
                if i != j && flat[i * n + j] && flat[j * n + i] {
                    return Err(Error::CycleDetected(names[i].clone(), names[j].clone()));
                }
                for k in 0..n {
                    if flat[i * n + j] && flat[j * n + k] && !flat[i * n + k] {
                        return Err(Error::Format("relation is not transitive".into()));
                    }
                }
            }
        }
        Ok(Self::from_order(names, index, flat))
    }

    fn from_order(names: Vec<String>, index: HashMap<String, usize>, leq: Vec<bool>) -> Self {
        let n = names.len();
        let lt = |i: usize, j: usize| i != j && leq[i * n + j];
        let mut covers = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if lt(i, j) && !(0..n).any(|k| lt(i, k) && lt(k, j)) {
                    covers.push((i, j));
                }
            }
        }
        // longest chains, filled by increasing size of the interval
        let mut lengths = vec![0usize; n * n];
        let mut pairs: Vec<(usize, usize, usize)> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| lt(i, j))
            .map(|(i, j)| (i, j, (0..n).filter(|&k| leq[i * n + k] && leq[k * n + j]).count()))
            .collect();
        pairs.sort_by_key(|&(_, _, size)| size);
        for (i, j, _) in pairs {
            lengths[i * n + j] = 1 + (0..n)
                .filter(|&k| lt(i, k) && lt(k, j))
                .map(|k| lengths[k * n + j])
                .max()
                .unwrap_or(0);
        }
        Poset { names, index, leq, covers, lengths }
    }

    pub fn chain(n: usize) -> Self {
        let names: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        let covers: Vec<(String, String)> =
            names.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
        Self::build(&names, &covers).expect("chain is a poset")
    }

    pub fn antichain(n: usize) -> Self {
        let names: Vec<String> = (0..n).map(letter_name).collect();
        Self::build::<String>(&names, &[]).expect("antichain is a poset")
    }

    pub fn from_file(file: &PosetFile) -> Result<Self> {
        let covers: Vec<(&str, &str)> =
            file.covers.iter().map(|[a, b]| (a.as_str(), b.as_str())).collect();
        let elements: Vec<&str> = file.elements.iter().map(String::as_str).collect();
        Self::build(&elements, &covers)
    }

    pub fn to_file(&self) -> PosetFile {
        PosetFile {
            elements: self.names.clone(),
            covers: self
                .covers
                .iter()
                .map(|&(i, j)| [self.names[i].clone(), self.names[j].clone()])
                .collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("poset serializes")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.index.get(name).copied().ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    #[inline]
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i * self.len() + j]
    }

    #[inline]
    pub fn lt(&self, i: usize, j: usize) -> bool {
        i != j && self.leq(i, j)
    }

    /// Covering pairs `(u, v)` with `l(u, v) = 1`, in index order.
    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    /// All pairs `u <= v`, sorted by `(u, v)`.
    pub fn comparable_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| self.leq(i, j)).collect()
    }

    /// `|X^2_<=|`, the dimension of the incidence algebra.
    pub fn comparable_pair_count(&self) -> usize {
        self.leq.iter().filter(|&&b| b).count()
    }

    /// Length of the longest chain in `[x, y]`.
    pub fn interval_length(&self, x: &str, y: &str) -> Result<usize> {
        let (i, j) = (self.index_of(x)?, self.index_of(y)?);
        if !self.leq(i, j) {
            return Err(Error::NotComparable(x.to_string(), y.to_string()));
        }
        Ok(self.length(i, j))
    }

    pub fn length(&self, i: usize, j: usize) -> usize {
        debug_assert!(self.leq(i, j));
        self.lengths[i * self.len() + j]
    }

    /// Length of the longest chain ending at `v`.
    pub fn height(&self, v: usize) -> usize {
        (0..self.len()).filter(|&u| self.leq(u, v)).map(|u| self.length(u, v)).max().unwrap_or(0)
    }

    /// Length of the longest chain in the poset.
    pub fn poset_length(&self) -> usize {
        (0..self.len()).map(|v| self.height(v)).max().unwrap_or(0)
    }

    /// Whether the undirected cover graph is connected.
    pub fn is_connected(&self) -> Result<bool> {
        let n = self.len();
        if n == 0 {
            return Err(Error::EmptyPoset);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &(a, b) in &self.covers {
                let next = if a == u {
                    b
                } else if b == u {
                    a
                } else {
                    continue;
                };
                if !seen[next] {
                    seen[next] = true;
                    stack.push(next);
                }
            }
        }
        Ok(seen.into_iter().all(|s| s))
    }

    /// The induced subposet on everything except `x`.
    pub fn delete_element(&self, x: &str) -> Result<Poset> {
        let skip = self.index_of(x)?;
        if self.len() < 2 {
            return Err(Error::WouldBeEmpty);
        }
        let keep: Vec<usize> = (0..self.len()).filter(|&i| i != skip).collect();
        Ok(self.restrict(&keep))
    }

    /// Induced subposet on the given indices, in the given order.
    pub fn restrict(&self, keep: &[usize]) -> Poset {
        let names: Vec<String> = keep.iter().map(|&i| self.names[i].clone()).collect();
        let index = index_names(&names).expect("restriction keeps names distinct");
        let leq = keep.iter().flat_map(|&i| keep.iter().map(move |&j| (i, j))).map(|(i, j)| self.leq(i, j));
        Self::from_order(names, index, leq.collect())
    }

    /// Visits every automorphism in lexicographic order of the permutation,
    /// optionally pinning `perm[from] = to`.
    fn search<B>(
        &self,
        pin: Option<(usize, usize)>,
        visit: &mut dyn FnMut(&[usize]) -> ControlFlow<B>,
    ) -> Option<B> {
        let n = self.len();
        let signature: Vec<(usize, usize, usize)> = (0..n)
            .map(|v| {
                let indeg = self.covers.iter().filter(|c| c.1 == v).count();
                let outdeg = self.covers.iter().filter(|c| c.0 == v).count();
                (indeg, outdeg, self.height(v))
            })
            .collect();
        let mut perm = vec![usize::MAX; n];
        let mut used = vec![false; n];
        self.extend(0, &signature, pin, &mut perm, &mut used, visit).break_value()
    }

    fn extend<B>(
        &self,
        i: usize,
        signature: &[(usize, usize, usize)],
        pin: Option<(usize, usize)>,
        perm: &mut [usize],
        used: &mut [bool],
        visit: &mut dyn FnMut(&[usize]) -> ControlFlow<B>,
    ) -> ControlFlow<B> {
        let n = self.len();
        if i == n {
            return visit(perm);
        }
        for j in 0..n {
            if used[j] || signature[i] != signature[j] {
                continue;
            }
            if let Some((from, to)) = pin {
                if (i == from) != (j == to) {
                    continue;
                }
            }
            let consistent = (0..i).all(|k| {
                self.leq(k, i) == self.leq(perm[k], j) && self.leq(i, k) == self.leq(j, perm[k])
            });
            if !consistent {
                continue;
            }
            perm[i] = j;
            used[j] = true;
            self.extend(i + 1, signature, pin, perm, used, visit)?;
            used[j] = false;
        }
        perm[i] = usize::MAX;
        ControlFlow::Continue(())
    }

    /// The full automorphism group, identity first, in lexicographic order.
    pub fn automorphisms(&self) -> Vec<PosetAutomorphism> {
        let mut out = Vec::new();
        self.search::<()>(None, &mut |perm| {
            out.push(PosetAutomorphism { perm: perm.to_vec() });
            ControlFlow::Continue(())
        });
        out
    }

    /// First automorphism (in enumeration order) with `x -> y`, if any.
    pub fn same_orbit(&self, x: &str, y: &str) -> Result<Option<PosetAutomorphism>> {
        let (i, j) = (self.index_of(x)?, self.index_of(y)?);
        Ok(self.orbit_witness(i, j))
    }

    pub fn orbit_witness(&self, i: usize, j: usize) -> Option<PosetAutomorphism> {
        self.search(Some((i, j)), &mut |perm| ControlFlow::Break(PosetAutomorphism { perm: perm.to_vec() }))
    }

    /// Orbits of `Aut(X)` on elements, each sorted by index, ordered by their
    /// smallest member.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut assigned = vec![false; n];
        let mut orbits = Vec::new();
        for i in 0..n {
            if assigned[i] {
                continue;
            }
            let orbit: Vec<usize> =
                (i..n).filter(|&j| !assigned[j] && (i == j || self.orbit_witness(i, j).is_some())).collect();
            for &j in &orbit {
                assigned[j] = true;
            }
            orbits.push(orbit);
        }
        orbits
    }

    pub fn automorphism_from_perm(&self, perm: Vec<usize>) -> Result<PosetAutomorphism> {
        let n = self.len();
        if perm.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: perm.len() });
        }
        let distinct: BTreeSet<usize> = perm.iter().copied().collect();
        if distinct.len() != n || perm.iter().any(|&p| p >= n) {
            return Err(Error::Format("not a permutation".into()));
        }
        for i in 0..n {
            for j in 0..n {
                if self.leq(i, j) != self.leq(perm[i], perm[j]) {
                    return Err(Error::Format(format!(
                        "permutation does not preserve {:?} <= {:?}",
                        self.names[i], self.names[j]
                    )));
                }
            }
        }
        Ok(PosetAutomorphism { perm })
    }
}

/// An order automorphism, stored as the image of each element index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PosetAutomorphism {
    perm: Vec<usize>,
}

impl PosetAutomorphism {
    pub fn identity(n: usize) -> Self {
        PosetAutomorphism { perm: (0..n).collect() }
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.perm[i]
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &PosetAutomorphism) -> PosetAutomorphism {
        PosetAutomorphism { perm: other.perm.iter().map(|&i| self.perm[i]).collect() }
    }

    pub fn inverse(&self) -> PosetAutomorphism {
        let mut perm = vec![0; self.perm.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            perm[p] = i;
        }
        PosetAutomorphism { perm }
    }

    /// Name-to-name listing for reports.
    pub fn named(&self, poset: &Poset) -> Vec<(String, String)> {
        self.perm.iter().enumerate().map(|(i, &p)| (poset.name(i).to_string(), poset.name(p).to_string())).collect()
    }
}

fn index_names(names: &[String]) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::with_capacity(names.len());
    for (i, n) in names.iter().enumerate() {
        if index.insert(n.clone(), i).is_some() {
            return Err(Error::DuplicateElement(n.clone()));
        }
    }
    Ok(index)
}

fn letter_name(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("x{i}")
    }
}

/// All posets on `n` elements up to isomorphism, one naturally labeled
/// representative each (elements named `a`, `b`, ...).
pub fn all_posets(n: usize) -> Vec<Poset> {
    assert!(n <= 6, "catalog is meant for tiny posets");
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let perms = permutations(n);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u64..(1 << pairs.len()) {
        let mut lt = vec![false; n * n];
        for (b, &(i, j)) in pairs.iter().enumerate() {
            lt[i * n + j] = mask >> b & 1 == 1;
        }
        let transitive = (0..n).all(|i| {
            (0..n).all(|j| (0..n).all(|k| !(lt[i * n + j] && lt[j * n + k]) || lt[i * n + k]))
        });
        if !transitive {
            continue;
        }
        let canonical = perms
            .iter()
            .map(|p| {
                let mut code = vec![false; n * n];
                for i in 0..n {
                    for j in 0..n {
                        code[p[i] * n + p[j]] = lt[i * n + j];
                    }
                }
                code
            })
            .min()
            .expect("at least one permutation");
        if !seen.insert(canonical) {
            continue;
        }
        let names: Vec<String> = (0..n).map(letter_name).collect();
        let rel: Vec<Vec<bool>> =
            (0..n).map(|i| (0..n).map(|j| i == j || lt[i * n + j]).collect()).collect();
        out.push(Poset::from_relation(&names, &rel).expect("transitive relation"));
    }
    out
}

/// Connected posets on `1..=max_n` elements up to isomorphism.
pub fn connected_posets(max_n: usize) -> Vec<Poset> {
    (1..=max_n)
        .flat_map(all_posets)
        .filter(|p| p.is_connected().unwrap_or(false))
        .collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}
