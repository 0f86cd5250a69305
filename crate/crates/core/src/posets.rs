//! Finite posets as shapes of good diagrams.
//!
//! Elements are dense indices `0..len()` with string ids attached; the order is
//! stored as its reflexive-transitive closure. Wherever a choice has to be
//! made, ties are broken lexicographically on element ids.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PosetJson", into = "PosetJson")]
pub struct FinitePoset {
    ids: Vec<String>,
    leq: Vec<Vec<bool>>,
}

/// Wire form: `{"elements":[...],"covers":[["a","b"],...]}` with `a < b`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosetJson {
    pub elements: Vec<String>,
    pub covers: Vec<(String, String)>,
}

impl FinitePoset {
    /// Builds the order generated by `relations` (pairs `x <= y`).
    pub fn new(ids: Vec<String>, relations: &[(usize, usize)]) -> Result<Self> {
        let n = ids.len();
        let mut seen = std::collections::HashSet::new();
        for id in &ids {
            if !seen.insert(id) {
                return Err(Error::InvalidPoset(format!("duplicate element `{id}`")));
            }
        }
        let mut leq = vec![vec![false; n]; n];
        for (x, row) in leq.iter_mut().enumerate() {
            row[x] = true;
        }
        for &(x, y) in relations {
            if x >= n || y >= n {
                return Err(Error::InvalidPoset(format!("relation {x} <= {y} out of range")));
            }
            leq[x][y] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        for x in 0..n {
            for y in x + 1..n {
                if leq[x][y] && leq[y][x] {
                    return Err(Error::InvalidPoset(format!(
                        "`{}` and `{}` lie on a cycle",
                        ids[x], ids[y]
                    )));
                }
            }
        }
        Ok(FinitePoset { ids, leq })
    }

    pub fn from_ids(elements: &[&str], relations: &[(&str, &str)]) -> Result<Self> {
        let ids: Vec<String> = elements.iter().map(|s| s.to_string()).collect();
        let index = |s: &str| {
            ids.iter().position(|x| x == s).ok_or_else(|| Error::UnknownElement(s.to_string()))
        };
        let rel = relations
            .iter()
            .map(|(a, b)| Ok((index(a)?, index(b)?)))
            .collect::<Result<Vec<_>>>()?;
        FinitePoset::new(ids, &rel)
    }

    /// `0 < 1 < ... < n-1`, ids `"0"`, `"1"`, ...
    pub fn chain(n: usize) -> Self {
        let ids = (0..n).map(|i| i.to_string()).collect();
        let rel: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        FinitePoset::new(ids, &rel).expect("chain is a poset")
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, x: usize) -> &str {
        &self.ids[x]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.ids.iter().position(|x| x == id).ok_or_else(|| Error::UnknownElement(id.to_string()))
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.leq[x][y]
    }

    pub fn lt(&self, x: usize, y: usize) -> bool {
        x != y && self.leq[x][y]
    }

    /// Covering pairs `(x, y)`: `x < y` with nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        self.covers_within(&(0..self.len()).collect::<Vec<_>>())
    }

    /// Covering pairs of the induced order on `members`.
    pub fn covers_within(&self, members: &[usize]) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for &x in members {
            for &y in members {
                if self.lt(x, y) && !members.iter().any(|&z| self.lt(x, z) && self.lt(z, y)) {
                    out.push((x, y));
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn lower_covers(&self, x: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&y| self.lt(y, x) && !(0..self.len()).any(|z| self.lt(y, z) && self.lt(z, x)))
            .collect()
    }

    /// `↓x`
    pub fn down(&self, x: usize) -> Vec<usize> {
        (0..self.len()).filter(|&y| self.leq[y][x]).collect()
    }

    /// `↓↓x = {y | y < x}`
    pub fn strict_down(&self, x: usize) -> Vec<usize> {
        (0..self.len()).filter(|&y| self.lt(y, x)).collect()
    }

    /// `↑x`
    pub fn up(&self, x: usize) -> Vec<usize> {
        (0..self.len()).filter(|&y| self.leq[x][y]).collect()
    }

    pub fn least(&self) -> Option<usize> {
        (0..self.len()).find(|&x| (0..self.len()).all(|y| self.leq[x][y]))
    }

    pub fn greatest(&self) -> Option<usize> {
        (0..self.len()).find(|&x| (0..self.len()).all(|y| self.leq[y][x]))
    }

    /// Greatest element of a subset, if it has one.
    pub fn top_of(&self, set: &[usize]) -> Option<usize> {
        set.iter().copied().find(|&x| set.iter().all(|&y| self.leq[y][x]))
    }

    pub fn is_downset(&self, set: &[usize]) -> bool {
        set.iter().all(|&x| (0..self.len()).all(|y| !self.leq[y][x] || set.contains(&y)))
    }

    pub fn is_upper_bound(&self, x: usize, set: &[usize]) -> bool {
        set.iter().all(|&y| self.leq[y][x])
    }

    /// A fresh id based on `base` that does not clash with existing ids.
    pub fn fresh_id(&self, base: &str) -> String {
        let mut id = base.to_string();
        while self.ids.contains(&id) {
            id.push('\'');
        }
        id
    }

    /// Adds a new element strictly above every element of `below`.
    pub fn with_element(&self, id: String, below: &[usize]) -> Result<(FinitePoset, usize)> {
        let n = self.len();
        let mut ids = self.ids.clone();
        ids.push(id);
        let mut rel: Vec<(usize, usize)> = self.covers();
        rel.extend(below.iter().map(|&b| (b, n)));
        Ok((FinitePoset::new(ids, &rel)?, n))
    }

    /// The induced subposet on `members` (in the given order).
    pub fn restrict(&self, members: &[usize]) -> FinitePoset {
        let ids = members.iter().map(|&x| self.ids[x].clone()).collect();
        let mut rel = Vec::new();
        for (i, &x) in members.iter().enumerate() {
            for (j, &y) in members.iter().enumerate() {
                if self.lt(x, y) {
                    rel.push((i, j));
                }
            }
        }
        FinitePoset::new(ids, &rel).expect("subposet of a poset")
    }

    /// Is there a chain of covers witnessing well-foundedness below every element?
    ///
    /// Always true for an antisymmetric finite order; checked by peeling off
    /// minimal elements so that the code path is the generic one.
    pub fn is_well_founded(&self) -> bool {
        let mut remaining: Vec<usize> = (0..self.len()).collect();
        while !remaining.is_empty() {
            let minimal: Vec<usize> = remaining
                .iter()
                .copied()
                .filter(|&x| !remaining.iter().any(|&y| self.lt(y, x)))
                .collect();
            if minimal.is_empty() {
                return false;
            }
            remaining.retain(|x| !minimal.contains(x));
        }
        true
    }
}

impl TryFrom<PosetJson> for FinitePoset {
    type Error = Error;

    fn try_from(json: PosetJson) -> Result<Self> {
        let ids = json.elements;
        let index = |s: &String| {
            ids.iter().position(|x| x == s).ok_or_else(|| Error::UnknownElement(s.clone()))
        };
        let rel = json
            .covers
            .iter()
            .map(|(a, b)| {
                if a == b {
                    return Err(Error::InvalidPoset(format!("cover `{a}` < `{b}` is reflexive")));
                }
                Ok((index(a)?, index(b)?))
            })
            .collect::<Result<Vec<_>>>()?;
        FinitePoset::new(ids.clone(), &rel)
    }
}

impl From<FinitePoset> for PosetJson {
    fn from(p: FinitePoset) -> Self {
        let covers = p.covers().into_iter().map(|(x, y)| (p.ids[x].clone(), p.ids[y].clone())).collect();
        PosetJson { elements: p.ids, covers }
    }
}

/// A downward-closed subset, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct InitialSegment {
    members: Vec<usize>,
}

impl InitialSegment {
    pub fn new(poset: &FinitePoset, mut members: Vec<usize>) -> Result<Self> {
        members.sort_unstable();
        members.dedup();
        if let Some(&x) = members.iter().find(|&&x| x >= poset.len()) {
            return Err(Error::UnknownElement(format!("#{x}")));
        }
        if !poset.is_downset(&members) {
            let names: Vec<&str> = members.iter().map(|&x| poset.id(x)).collect();
            return Err(Error::NotInitialSegment(format!("{{{}}}", names.join(","))));
        }
        Ok(InitialSegment { members })
    }

    pub fn from_ids(poset: &FinitePoset, ids: &[&str]) -> Result<Self> {
        let members = ids.iter().map(|id| poset.index_of(id)).collect::<Result<_>>()?;
        InitialSegment::new(poset, members)
    }

    pub fn whole(poset: &FinitePoset) -> Self {
        InitialSegment { members: (0..poset.len()).collect() }
    }

    pub fn principal(poset: &FinitePoset, x: usize) -> Self {
        InitialSegment { members: poset.down(x) }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn union(&self, other: &InitialSegment) -> InitialSegment {
        let mut members = self.members.clone();
        members.extend(&other.members);
        members.sort_unstable();
        members.dedup();
        InitialSegment { members }
    }

    pub fn intersection(&self, other: &InitialSegment) -> InitialSegment {
        InitialSegment { members: self.members.iter().copied().filter(|&x| other.contains(x)).collect() }
    }

    pub fn is_subset(&self, other: &InitialSegment) -> bool {
        self.members.iter().all(|&x| other.contains(x))
    }

    pub fn ids(&self, poset: &FinitePoset) -> Vec<String> {
        self.members.iter().map(|&x| poset.id(x).to_string()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodReport {
    pub good: bool,
    pub least: Option<usize>,
}

/// Good = well-founded with a least element.
pub fn is_good(poset: &FinitePoset) -> GoodReport {
    let least = poset.least();
    GoodReport { good: least.is_some() && poset.is_well_founded(), least }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementKind {
    Bottom,
    Isolated,
    Limit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementClass {
    pub kind: ElementKind,
    /// The top of `↓↓x`; present iff `kind` is `Isolated`.
    pub predecessor: Option<usize>,
}

pub fn classify_element(poset: &FinitePoset, x: usize) -> Result<ElementClass> {
    if x >= poset.len() {
        return Err(Error::UnknownElement(format!("#{x}")));
    }
    let least = is_good(poset).least.ok_or(Error::NotGood)?;
    if x == least {
        return Ok(ElementClass { kind: ElementKind::Bottom, predecessor: None });
    }
    Ok(match poset.top_of(&poset.strict_down(x)) {
        Some(p) => ElementClass { kind: ElementKind::Isolated, predecessor: Some(p) },
        None => ElementClass { kind: ElementKind::Limit, predecessor: None },
    })
}

/// Kinds of every element of a good poset.
pub fn classify_all(poset: &FinitePoset) -> Result<Vec<ElementClass>> {
    (0..poset.len()).map(|x| classify_element(poset, x)).collect()
}

/// A regular cardinal marker: `ω` or a finite bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kappa {
    Omega,
    Finite(usize),
}

impl Kappa {
    fn admits(&self, size: usize) -> bool {
        match self {
            Kappa::Omega => true,
            Kappa::Finite(n) => size < *n,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KappaReport {
    pub kappa_good: bool,
    pub kappa_directed: bool,
}

pub fn is_kappa_good_and_directed(poset: &FinitePoset, kappa: Kappa) -> KappaReport {
    let kappa_good = is_good(poset).good && (0..poset.len()).all(|x| kappa.admits(poset.down(x).len()));
    let kappa_directed = match kappa {
        // every finite subset, in particular the whole poset, has a bound
        Kappa::Omega => poset.greatest().is_some(),
        Kappa::Finite(k) => subsets_below(poset.len(), k)
            .into_iter()
            .all(|s| (0..poset.len()).any(|x| poset.is_upper_bound(x, &s))),
    };
    KappaReport { kappa_good, kappa_directed }
}

/// All subsets of `0..n` of cardinality `< k`.
fn subsets_below(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 1..k {
        let mut next = Vec::new();
        for s in &frontier {
            let start = s.last().map_or(0, |&l: &usize| l + 1);
            for x in start..n {
                let mut t: Vec<usize> = s.clone();
                t.push(x);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    if k == 0 {
        out.clear();
    }
    out
}

/// A linear extension: Kahn's algorithm, smallest id first among the ready elements.
pub fn linear_extension(poset: &FinitePoset) -> Vec<usize> {
    let n = poset.len();
    let mut pending: Vec<usize> = (0..n).map(|x| poset.strict_down(x).len()).collect();
    let mut ready: BinaryHeap<Reverse<(&str, usize)>> =
        (0..n).filter(|&x| pending[x] == 0).map(|x| Reverse((poset.id(x), x))).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse((_, x))) = ready.pop() {
        order.push(x);
        for y in 0..n {
            if poset.lt(x, y) {
                pending[y] -= 1;
                if pending[y] == 0 {
                    ready.push(Reverse((poset.id(y), y)));
                }
            }
        }
    }
    order
}

/// All nonempty initial segments, in a deterministic order.
pub fn initial_segments(poset: &FinitePoset) -> Vec<InitialSegment> {
    let order = linear_extension(poset);
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(
        poset: &FinitePoset,
        order: &[usize],
        i: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<InitialSegment>,
    ) {
        if i == order.len() {
            if !current.is_empty() {
                let mut m = current.clone();
                m.sort_unstable();
                out.push(InitialSegment { members: m });
            }
            return;
        }
        let x = order[i];
        rec(poset, order, i + 1, current, out);
        if poset.strict_down(x).iter().all(|y| current.contains(y)) {
            current.push(x);
            rec(poset, order, i + 1, current, out);
            current.pop();
        }
    }
    rec(poset, &order, 0, &mut current, &mut out);
    out.sort();
    out
}

/// Result of one `+` step: the extended poset and, per added element, the
/// segment it bounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlusStep {
    pub poset: FinitePoset,
    pub added: Vec<(usize, InitialSegment)>,
}

/// Adds a bound `p_S` for every nonempty initial segment `S` with `|S| < kappa`
/// and no greatest element. The new elements are pairwise incomparable.
pub fn plus_step(poset: &FinitePoset, kappa: Kappa) -> Result<PlusStep> {
    if !is_good(poset).good {
        return Err(Error::NotGood);
    }
    let segments: Vec<InitialSegment> = initial_segments(poset)
        .into_iter()
        .filter(|s| kappa.admits(s.len()) && poset.top_of(s.members()).is_none())
        .collect();
    let mut ids = poset.ids.clone();
    let mut rel = poset.covers();
    let mut added = Vec::new();
    for s in segments {
        let names: Vec<&str> = s.members.iter().map(|&x| poset.id(x)).collect();
        let mut id = format!("p{{{}}}", names.join(","));
        while ids.contains(&id) {
            id.push('\'');
        }
        let p = ids.len();
        ids.push(id);
        rel.extend(s.members.iter().map(|&x| (x, p)));
        added.push((p, s));
    }
    Ok(PlusStep { poset: FinitePoset::new(ids, &rel)?, added })
}

/// A directed extension with only limit elements added.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Completion {
    pub poset: FinitePoset,
    pub added_top: Option<usize>,
}

/// Adds a single top unless one exists: a finite poset is directed iff it has
/// a greatest element.
pub fn directed_completion(poset: &FinitePoset) -> Result<Completion> {
    if !is_good(poset).good {
        return Err(Error::NotGood);
    }
    if poset.greatest().is_some() {
        return Ok(Completion { poset: poset.clone(), added_top: None });
    }
    let all: Vec<usize> = (0..poset.len()).collect();
    let (p, top) = poset.with_element(poset.fresh_id("top"), &all)?;
    Ok(Completion { poset: p, added_top: Some(top) })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrongClosure {
    pub closure: InitialSegment,
    /// For each `x` in `closure \ Q`, a subset `R ⊆ Q` of which `x` is a strong upper bound.
    pub strong_bounds: BTreeMap<usize, Vec<usize>>,
}

/// `Q̄ = {x | x is a strong upper bound of some R ⊆ Q}`.
///
/// `x` bounds `R ⊆ ↓x`, and enlarging `R` only shrinks `↓x \ R`, so the
/// canonical witness is `R = ↓x ∩ Q`.
pub fn strong_closure(poset: &FinitePoset, q: &InitialSegment) -> Result<StrongClosure> {
    if !poset.is_downset(q.members()) {
        return Err(Error::NotInitialSegment("closure input".into()));
    }
    let kinds = classify_all(poset)?;
    let mut members = Vec::new();
    let mut strong_bounds = BTreeMap::new();
    for x in 0..poset.len() {
        let down = poset.down(x);
        let outside_all_limit =
            down.iter().filter(|&&y| !q.contains(y)).all(|&y| kinds[y].kind == ElementKind::Limit);
        if outside_all_limit {
            members.push(x);
            if !q.contains(x) {
                strong_bounds.insert(x, down.into_iter().filter(|&y| q.contains(y)).collect());
            }
        }
    }
    Ok(StrongClosure { closure: InitialSegment::new(poset, members)?, strong_bounds })
}

/// Commonly used small shapes.
pub mod shapes {
    use super::FinitePoset;

    /// `{⊥ < x, ⊥ < y}`
    pub fn span() -> FinitePoset {
        FinitePoset::from_ids(&["bot", "x", "y"], &[("bot", "x"), ("bot", "y")]).unwrap()
    }

    /// `{⊥ < a, ⊥ < b, a < t, b < t}`
    pub fn diamond() -> FinitePoset {
        FinitePoset::from_ids(
            &["bot", "a", "b", "t"],
            &[("bot", "a"), ("bot", "b"), ("a", "t"), ("b", "t")],
        )
        .unwrap()
    }
}
