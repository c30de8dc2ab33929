//! Finite groups as explicit multiplication tables, plus the subgroup,
//! conjugacy, and cyclic-class machinery the rest of the engine runs on.
//!
//! Elements are indices `0..order` with `0` the identity. Construction always
//! validates the table (identity, inverses, Latin square, associativity), so
//! downstream code may assume the axioms hold.

mod builtins;
mod cycles;

pub use builtins::{builtin, builtin_names};
pub use cycles::{cycle_string, Perm};

use crate::chars::unit_group;
use crate::error::{Error, Result};
use std::collections::{BTreeSet, HashMap};

/// Closure cap for groups assembled from generators.
pub const DEFAULT_SIZE_CAP: usize = 100_000;

/// Orders up to this get the full cubic associativity check; larger tables
/// are spot-checked on deterministic pseudo-random triples.
const FULL_ASSOC_LIMIT: usize = 200;

/// A finite group with element set `0..order`, identity `0`.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    order: usize,
    mul: Vec<usize>,
    inv: Vec<usize>,
    labels: Vec<String>,
    by_label: HashMap<String, usize>,
    name: Option<String>,
}

impl FiniteGroup {
    /// Builds a group from a square multiplication table, validating the
    /// group axioms. `labels[i]` names element `i`; labels must be unique,
    /// nonempty, and free of `{`, `}`, `,`, `;`, `#`.
    pub fn from_table(
        table: Vec<Vec<usize>>,
        labels: Vec<String>,
        name: Option<String>,
    ) -> Result<Self> {
        let order = table.len();
        if order == 0 {
            return Err(Error::InvalidData("empty multiplication table".into()));
        }
        if labels.len() != order {
            return Err(Error::InvalidData(format!(
                "{} labels for {} elements",
                labels.len(),
                order
            )));
        }
        let mut by_label = HashMap::new();
        for (i, l) in labels.iter().enumerate() {
            if l.is_empty() || l.chars().any(|c| "{},;#".contains(c)) {
                return Err(Error::InvalidData(format!("bad element label `{l}`")));
            }
            if by_label.insert(l.clone(), i).is_some() {
                return Err(Error::InvalidData(format!("duplicate element label `{l}`")));
            }
        }

        let mut mul = Vec::with_capacity(order * order);
        for row in &table {
            if row.len() != order {
                return Err(Error::InvalidData("multiplication table is not square".into()));
            }
            for &v in row {
                if v >= order {
                    return Err(Error::InvalidData("table entry out of range".into()));
                }
                mul.push(v);
            }
        }

        for a in 0..order {
            if mul[a] != a || mul[a * order] != a {
                return Err(Error::InvalidData("element 0 is not an identity".into()));
            }
        }
        for a in 0..order {
            let mut row_seen = vec![false; order];
            let mut col_seen = vec![false; order];
            for b in 0..order {
                let rv = mul[a * order + b];
                let cv = mul[b * order + a];
                if row_seen[rv] || col_seen[cv] {
                    return Err(Error::InvalidData(format!(
                        "row or column {a} is not a permutation"
                    )));
                }
                row_seen[rv] = true;
                col_seen[cv] = true;
            }
        }

        let mut inv = vec![usize::MAX; order];
        for a in 0..order {
            for b in 0..order {
                if mul[a * order + b] == 0 {
                    if mul[b * order + a] != 0 {
                        return Err(Error::InvalidData(format!(
                            "one-sided inverse at element {a}"
                        )));
                    }
                    inv[a] = b;
                }
            }
        }

        let assoc = |a: usize, b: usize, c: usize| {
            mul[mul[a * order + b] * order + c] == mul[a * order + mul[b * order + c]]
        };
        if order <= FULL_ASSOC_LIMIT {
            for a in 0..order {
                for b in 0..order {
                    for c in 0..order {
                        if !assoc(a, b, c) {
                            return Err(Error::InvalidData(format!(
                                "associativity fails at ({a}, {b}, {c})"
                            )));
                        }
                    }
                }
            }
        } else {
            let mut state: u64 = 0x9e37_79b9_7f4a_7c15;
            for _ in 0..4096 {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                let a = (state % order as u64) as usize;
                let b = ((state >> 20) % order as u64) as usize;
                let c = ((state >> 40) % order as u64) as usize;
                if !assoc(a, b, c) {
                    return Err(Error::InvalidData(format!(
                        "associativity fails at ({a}, {b}, {c})"
                    )));
                }
            }
        }

        Ok(FiniteGroup {
            order,
            mul,
            inv,
            labels,
            by_label,
            name,
        })
    }

    /// Builds a group from a full element list of permutations, `perms[0]`
    /// being the identity. The list must be closed under composition.
    pub fn from_perms(
        perms: &[Perm],
        labels: Vec<String>,
        name: Option<String>,
    ) -> Result<Self> {
        let order = perms.len();
        let mut index: HashMap<&Perm, usize> = HashMap::new();
        for (i, p) in perms.iter().enumerate() {
            index.insert(p, i);
        }
        if index.len() != order {
            return Err(Error::InvalidData("repeated permutation in element list".into()));
        }
        let mut table = vec![vec![0usize; order]; order];
        for a in 0..order {
            for b in 0..order {
                let prod = cycles::compose(&perms[a], &perms[b]);
                let Some(&i) = index.get(&prod) else {
                    return Err(Error::InvalidData(
                        "element list is not closed under composition".into(),
                    ));
                };
                table[a][b] = i;
            }
        }
        Self::from_table(table, labels, name)
    }

    /// Closes a generator list under composition and builds the group.
    /// Elements are labelled by their cycle notation.
    pub fn from_generators(gens: &[Perm], cap: usize) -> Result<Self> {
        let elems = cycles::close_generators(gens, cap)?;
        let labels = elems.iter().map(cycles::cycle_string).collect();
        Self::from_perms(&elems, labels, None)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn pow(&self, x: usize, k: u64) -> usize {
        let mut acc = 0;
        for _ in 0..k {
            acc = self.mul(acc, x);
        }
        acc
    }

    /// `g x g^{-1}`.
    pub fn conj(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn element_order(&self, x: usize) -> usize {
        let mut acc = x;
        let mut n = 1;
        while acc != 0 {
            acc = self.mul(acc, x);
            n += 1;
        }
        n
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn element_by_label(&self, label: &str) -> Result<usize> {
        self.by_label
            .get(label.trim())
            .copied()
            .ok_or_else(|| Error::UnknownLabel(label.trim().to_string()))
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn center(&self) -> Vec<usize> {
        (0..self.order)
            .filter(|&z| (0..self.order).all(|g| self.mul(z, g) == self.mul(g, z)))
            .collect()
    }

    /// Distinct primes dividing the group order, ascending.
    pub fn order_primes(&self) -> Vec<u64> {
        let mut n = self.order as u64;
        let mut out = Vec::new();
        let mut d = 2;
        while d * d <= n {
            if n.is_multiple_of(d) {
                out.push(d);
                while n.is_multiple_of(d) {
                    n /= d;
                }
            }
            d += 1;
        }
        if n > 1 {
            out.push(n);
        }
        out
    }

    /// `Some(p)` when the order is a power of the prime `p`.
    pub fn prime_power_base(&self) -> Option<u64> {
        let primes = self.order_primes();
        match primes.as_slice() {
            [p] => Some(*p),
            _ => None,
        }
    }

    /// Subgroup generated by `seed`, as a sorted element list.
    pub fn closure(&self, seed: &[usize]) -> Vec<usize> {
        let mut inside = vec![false; self.order];
        inside[0] = true;
        let mut elems = vec![0];
        for &s in seed {
            if !inside[s] {
                inside[s] = true;
                elems.push(s);
            }
        }
        let mut head = 0;
        while head < elems.len() {
            let a = elems[head];
            head += 1;
            for i in 0..elems.len() {
                for prod in [self.mul(a, elems[i]), self.mul(elems[i], a)] {
                    if !inside[prod] {
                        inside[prod] = true;
                        elems.push(prod);
                    }
                }
            }
        }
        elems.sort_unstable();
        elems
    }

    /// All subgroups, sorted by (order, element list). Seeds with the cyclic
    /// subgroups and closes under pairwise join until stable.
    pub fn subgroups(&self) -> Vec<Subgroup> {
        let mut set: BTreeSet<Vec<usize>> = BTreeSet::new();
        for x in 0..self.order {
            set.insert(self.closure(&[x]));
        }
        loop {
            let current: Vec<Vec<usize>> = set.iter().cloned().collect();
            let mut grew = false;
            for i in 0..current.len() {
                for j in (i + 1)..current.len() {
                    let mut seed = current[i].clone();
                    seed.extend_from_slice(&current[j]);
                    let joined = self.closure(&seed);
                    if set.insert(joined) {
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        let mut subs: Vec<Subgroup> = set.into_iter().map(|e| Subgroup { elements: e }).collect();
        subs.sort_by(|a, b| {
            (a.order(), a.elements()).cmp(&(b.order(), b.elements()))
        });
        subs
    }

    /// All pairs `(H, H')` with `H'` maximal in `H`, over every subgroup `H`
    /// of order > 1. Sorted by (H, H') in (order, element list) order; this
    /// ordering indexes weight functions and linear forms.
    pub fn maximal_pairs(&self) -> Vec<SubgroupPair> {
        let subs = self.subgroups();
        let mut pairs = Vec::new();
        for h in &subs {
            if h.order() == 1 {
                continue;
            }
            let inside: Vec<&Subgroup> = subs
                .iter()
                .filter(|k| k.order() < h.order() && k.is_subset_of(h))
                .collect();
            for k in &inside {
                let maximal = !inside
                    .iter()
                    .any(|l| l.order() > k.order() && k.is_subset_of(l) && l.is_subset_of(h));
                if maximal {
                    pairs.push(SubgroupPair {
                        outer: h.clone(),
                        inner: (*k).clone(),
                    });
                }
            }
        }
        pairs
    }

    /// Conjugates `set` (sorted element list) by `g`.
    pub fn conjugate_set(&self, set: &[usize], g: usize) -> Vec<usize> {
        let mut out: Vec<usize> = set.iter().map(|&x| self.conj(g, x)).collect();
        out.sort_unstable();
        out
    }

    /// The distinct conjugates of a subgroup, sorted.
    pub fn subgroup_conjugates(&self, sub: &Subgroup) -> Vec<Vec<usize>> {
        let mut set = BTreeSet::new();
        for g in 0..self.order {
            set.insert(self.conjugate_set(sub.elements(), g));
        }
        set.into_iter().collect()
    }

    /// Conjugacy class of the element `x`, sorted.
    pub fn element_class(&self, x: usize) -> Vec<usize> {
        let mut set = BTreeSet::new();
        for g in 0..self.order {
            set.insert(self.conj(g, x));
        }
        set.into_iter().collect()
    }

    pub fn centralizer_order(&self, x: usize) -> usize {
        (0..self.order)
            .filter(|&g| self.mul(g, x) == self.mul(x, g))
            .count()
    }

    /// Conjugacy classes of cyclic subgroups in canonical order: the trivial
    /// class first, then ascending generator order `n`, breaking ties by
    /// descending number of conjugates and then by the representative
    /// subgroup's element list.
    ///
    /// Names: `1` for the trivial class, `Z` for the center of a nonabelian
    /// group, otherwise `Cn` with `a`, `b`, ... suffixes when several classes
    /// share an `n`.
    pub fn cyclic_classes(&self) -> Vec<CyclicClass> {
        let mut cyclics: BTreeSet<Vec<usize>> = BTreeSet::new();
        for x in 0..self.order {
            cyclics.insert(self.closure(&[x]));
        }
        let mut remaining: BTreeSet<Vec<usize>> = cyclics;
        let mut classes: Vec<CyclicClass> = Vec::new();
        while let Some(first) = remaining.iter().next().cloned() {
            let sub = Subgroup { elements: first };
            let conjugates = self.subgroup_conjugates(&sub);
            for c in &conjugates {
                remaining.remove(c);
            }
            let rep_sub = Subgroup {
                elements: conjugates[0].clone(),
            };
            let n = rep_sub.order();
            let rep = *rep_sub
                .elements()
                .iter()
                .find(|&&x| self.element_order(x) == n)
                .expect("cyclic subgroup has a generator");
            let rep_class = self.element_class(rep);
            let units = unit_group(n as u64);
            let power_stabilizer: Vec<u64> = units
                .members()
                .iter()
                .copied()
                .filter(|&a| rep_class.binary_search(&self.pow(rep, a)).is_ok())
                .collect();
            classes.push(CyclicClass {
                name: String::new(),
                rep,
                n,
                subgroup: rep_sub,
                power_stabilizer,
                centralizer_order: self.centralizer_order(rep),
                class_size: rep_class.len(),
                subgroup_class_size: conjugates.len(),
            });
        }

        classes.sort_by(|a, b| {
            let ka = (a.n != 1, a.n, std::cmp::Reverse(a.subgroup_class_size));
            let kb = (b.n != 1, b.n, std::cmp::Reverse(b.subgroup_class_size));
            ka.cmp(&kb)
                .then_with(|| a.subgroup.elements().cmp(b.subgroup.elements()))
        });

        let center = self.center();
        let nonabelian = !self.is_abelian();
        let mut same_n: HashMap<usize, usize> = HashMap::new();
        for c in &classes {
            if c.n == 1 {
                continue;
            }
            let is_z = nonabelian && c.subgroup.elements() == center.as_slice();
            if !is_z {
                *same_n.entry(c.n).or_insert(0) += 1;
            }
        }
        let mut used: HashMap<usize, usize> = HashMap::new();
        for c in classes.iter_mut() {
            if c.n == 1 {
                c.name = "1".into();
            } else if nonabelian && c.subgroup.elements() == center.as_slice() {
                c.name = "Z".into();
            } else if same_n[&c.n] == 1 {
                c.name = format!("C{}", c.n);
            } else {
                let i = used.entry(c.n).or_insert(0);
                let suffix = (b'a' + (*i % 26) as u8) as char;
                c.name = if *i < 26 {
                    format!("C{}{}", c.n, suffix)
                } else {
                    format!("C{}_{}", c.n, i)
                };
                *i += 1;
            }
        }
        classes
    }

    /// Renders a sorted element list as `{e,a,b}` using the group's labels.
    pub fn set_string(&self, set: &[usize]) -> String {
        let inner: Vec<&str> = set.iter().map(|&x| self.label(x)).collect();
        format!("{{{}}}", inner.join(","))
    }

    /// Renders a maximal pair as `{..} > {..}`.
    pub fn pair_string(&self, pair: &SubgroupPair) -> String {
        format!(
            "{} > {}",
            self.set_string(pair.outer.elements()),
            self.set_string(pair.inner.elements())
        )
    }
}

/// Parses a group file: one generator per line in cycle notation, `#`
/// comments, blank lines ignored.
pub fn parse_group_file(text: &str) -> Result<FiniteGroup> {
    let mut cycle_lines = Vec::new();
    let mut max_point = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let cycles = cycles::parse_cycles(line, i + 1)?;
        for c in &cycles {
            for &pt in c {
                max_point = max_point.max(pt + 1);
            }
        }
        cycle_lines.push((cycles, i + 1));
    }
    if cycle_lines.is_empty() {
        return Err(Error::InvalidData("group file has no generators".into()));
    }
    let mut gens = Vec::new();
    for (cycles, lineno) in &cycle_lines {
        gens.push(cycles::perm_from_cycles(cycles, max_point, *lineno)?);
    }
    FiniteGroup::from_generators(&gens, DEFAULT_SIZE_CAP)
}

/// A subgroup, stored as a sorted element list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subgroup {
    elements: Vec<usize>,
}

impl Subgroup {
    /// Validates that `elements` really is a subgroup of `group`.
    pub fn new(group: &FiniteGroup, mut elements: Vec<usize>) -> Result<Self> {
        elements.sort_unstable();
        elements.dedup();
        if elements.iter().any(|&x| x >= group.order()) {
            return Err(Error::InvalidSubgroup("element out of range".into()));
        }
        if elements.binary_search(&0).is_err() {
            return Err(Error::InvalidSubgroup("missing the identity".into()));
        }
        for &a in &elements {
            if elements.binary_search(&group.inv(a)).is_err() {
                return Err(Error::InvalidSubgroup(format!(
                    "not closed under inverse at `{}`",
                    group.label(a)
                )));
            }
            for &b in &elements {
                if elements.binary_search(&group.mul(a, b)).is_err() {
                    return Err(Error::InvalidSubgroup(format!(
                        "not closed under product at `{}`*`{}`",
                        group.label(a),
                        group.label(b)
                    )));
                }
            }
        }
        if !group.order().is_multiple_of(elements.len()) {
            return Err(Error::InvalidSubgroup("order does not divide".into()));
        }
        Ok(Subgroup { elements })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn contains(&self, x: usize) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&x| other.contains(x))
    }
}

/// A pair `H' < H` with `H'` maximal in `H`; the index set for weight
/// functions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupPair {
    pub outer: Subgroup,
    pub inner: Subgroup,
}

/// A conjugacy class of cyclic subgroups together with the data the tame
/// formula needs.
#[derive(Clone, Debug)]
pub struct CyclicClass {
    /// Canonical display name: `1`, `Z`, `C4`, `C2a`, ...
    pub name: String,
    /// A generator of the representative subgroup.
    pub rep: usize,
    /// Order of the representative subgroup.
    pub n: usize,
    /// Representative subgroup (the least conjugate).
    pub subgroup: Subgroup,
    /// Residues `a` mod `n` with `rep^a` conjugate to `rep`, sorted.
    pub power_stabilizer: Vec<u64>,
    pub centralizer_order: usize,
    /// Size of the conjugacy class of the element `rep`.
    pub class_size: usize,
    /// Number of subgroups conjugate to the representative.
    pub subgroup_class_size: usize,
}
