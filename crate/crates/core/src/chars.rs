//! Unit groups mod `n` and exact evaluation of character sums: for a
//! subgroup `S` of units mod `n`, the value at `x` of the sum of all
//! Dirichlet characters mod `n` that are trivial on `S`.
//!
//! Values are computed by pure residue arithmetic. Dropping `x` to the
//! largest divisor of `n` coprime to it makes the sum well defined at every
//! positive integer, including those sharing factors with `n`.

use crate::error::{Error, Result};
use std::collections::BTreeSet;
use std::fmt;

pub fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// The unit group mod `n`. For `n = 1` the single residue is written `0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitGroup {
    n: u64,
    members: Vec<u64>,
}

pub fn unit_group(n: u64) -> UnitGroup {
    assert!(n >= 1, "modulus must be positive");
    let members = if n == 1 {
        vec![0]
    } else {
        (1..n).filter(|&a| gcd(a, n) == 1).collect()
    };
    UnitGroup { n, members }
}

impl UnitGroup {
    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn identity(&self) -> u64 {
        if self.n == 1 {
            0
        } else {
            1
        }
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if self.n == 1 {
            0
        } else {
            (a * b) % self.n
        }
    }

    pub fn contains(&self, a: u64) -> bool {
        self.members.binary_search(&a).is_ok()
    }

    /// Is the sorted residue list a subgroup of the units?
    pub fn is_subgroup(&self, s: &[u64]) -> bool {
        if s.is_empty() || s.binary_search(&self.identity()).is_err() {
            return false;
        }
        if s.iter().any(|&a| !self.contains(a)) {
            return false;
        }
        s.iter()
            .all(|&a| s.iter().all(|&b| s.binary_search(&self.mul(a, b)).is_ok()))
    }

    pub fn subgroup_generated(&self, gens: &[u64]) -> Result<Vec<u64>> {
        for &g in gens {
            if !self.contains(g) {
                return Err(Error::NotCoprime {
                    residue: g,
                    modulus: self.n,
                });
            }
        }
        let mut set: BTreeSet<u64> = BTreeSet::new();
        set.insert(self.identity());
        let mut frontier: Vec<u64> = vec![self.identity()];
        while let Some(a) = frontier.pop() {
            for &g in gens {
                let b = self.mul(a, g);
                if set.insert(b) {
                    frontier.push(b);
                }
            }
        }
        Ok(set.into_iter().collect())
    }

    /// Every subgroup of the units, sorted lists in lexicographic order.
    pub fn all_subgroups(&self) -> Vec<Vec<u64>> {
        let mut set: BTreeSet<Vec<u64>> = BTreeSet::new();
        for &a in &self.members {
            set.insert(self.subgroup_generated(&[a]).unwrap());
        }
        loop {
            let current: Vec<Vec<u64>> = set.iter().cloned().collect();
            let mut grew = false;
            for i in 0..current.len() {
                for j in (i + 1)..current.len() {
                    let mut gens = current[i].clone();
                    gens.extend_from_slice(&current[j]);
                    if set.insert(self.subgroup_generated(&gens).unwrap()) {
                        grew = true;
                    }
                }
            }
            if !grew {
                return set.into_iter().collect();
            }
        }
    }
}

/// The sum of all Dirichlet characters mod `n` trivial on the subgroup `S`,
/// as a function of a positive integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterSum {
    n: u64,
    subgroup: Vec<u64>,
}

impl CharacterSum {
    pub fn new(n: u64, mut subgroup: Vec<u64>) -> Result<Self> {
        subgroup.sort_unstable();
        subgroup.dedup();
        let units = unit_group(n);
        if !units.is_subgroup(&subgroup) {
            return Err(Error::InvalidData(format!(
                "{{{}}} is not a subgroup of the units mod {n}",
                join(&subgroup)
            )));
        }
        Ok(CharacterSum { n, subgroup })
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn subgroup(&self) -> &[u64] {
        &self.subgroup
    }

    /// Exact value at `x >= 1`.
    ///
    /// Let `m` be the largest divisor of `n` coprime to `x` and `S'` the
    /// image of `S` mod `m`. The value is the index of `S'` in the units mod
    /// `m` when `x mod m` lands in `S'`, and `0` otherwise.
    pub fn eval(&self, x: u64) -> Result<u64> {
        if x == 0 {
            return Err(Error::CharacterDomain);
        }
        let mut m = self.n;
        loop {
            let g = gcd(m, x);
            if g == 1 {
                break;
            }
            m /= g;
        }
        let units_m = unit_group(m);
        let mut image: Vec<u64> = self
            .subgroup
            .iter()
            .map(|&s| if m == 1 { 0 } else { s % m })
            .collect();
        image.sort_unstable();
        image.dedup();
        let x_red = if m == 1 { 0 } else { x % m };
        if image.binary_search(&x_red).is_ok() {
            Ok((units_m.order() / image.len()) as u64)
        } else {
            Ok(0)
        }
    }
}

fn join(v: &[u64]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl fmt::Display for CharacterSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}:{{{}}}]", self.n, join(&self.subgroup))
    }
}
