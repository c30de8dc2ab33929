//! Permutations in cycle notation, and group closure from generators.

use crate::error::{Error, Result};
use std::collections::HashMap;

/// A permutation of `{0, .., n-1}`, stored as the image of each point.
pub type Perm = Vec<usize>;

pub fn identity(n: usize) -> Perm {
    (0..n).collect()
}

/// Composition `a` then `b`.
pub fn compose(a: &Perm, b: &Perm) -> Perm {
    a.iter().map(|&i| b[i]).collect()
}

pub fn is_permutation(p: &Perm) -> bool {
    let mut seen = vec![false; p.len()];
    for &i in p {
        if i >= p.len() || seen[i] {
            return false;
        }
        seen[i] = true;
    }
    true
}

/// Renders a permutation as disjoint cycles over 1-based points, e.g. `(1 2)(3 4)`.
/// The identity renders as `e`.
pub fn cycle_string(p: &Perm) -> String {
    let mut seen = vec![false; p.len()];
    let mut out = String::new();
    for start in 0..p.len() {
        if seen[start] || p[start] == start {
            seen[start] = true;
            continue;
        }
        out.push('(');
        let mut i = start;
        let mut first = true;
        while !seen[i] {
            seen[i] = true;
            if !first {
                out.push(' ');
            }
            out.push_str(&(i + 1).to_string());
            first = false;
            i = p[i];
        }
        out.push(')');
    }
    if out.is_empty() {
        out.push('e');
    }
    out
}

/// Parses one line of cycle notation, e.g. `(1 2 3 4)` or `(1 3)(2 4)`.
/// Points are 1-based and may be separated by spaces or commas.
/// Returns the cycles; the caller fixes the common domain size.
pub fn parse_cycles(line: &str, lineno: usize) -> Result<Vec<Vec<usize>>> {
    let mut cycles = Vec::new();
    let mut rest = line.trim();
    if rest == "e" || rest == "()" {
        return Ok(cycles);
    }
    while !rest.is_empty() {
        if !rest.starts_with('(') {
            return Err(Error::parse(lineno, format!("expected `(`, found `{rest}`")));
        }
        let close = rest
            .find(')')
            .ok_or_else(|| Error::parse(lineno, "unclosed cycle"))?;
        let body = &rest[1..close];
        let mut cycle = Vec::new();
        for tok in body.split(|c: char| c == ',' || c.is_whitespace()) {
            if tok.is_empty() {
                continue;
            }
            let pt: usize = tok
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad point `{tok}`")))?;
            if pt == 0 {
                return Err(Error::parse(lineno, "points are 1-based"));
            }
            cycle.push(pt - 1);
        }
        if cycle.len() < 2 {
            return Err(Error::parse(lineno, "cycles need at least two points"));
        }
        let mut sorted = cycle.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != cycle.len() {
            return Err(Error::parse(lineno, "repeated point within a cycle"));
        }
        cycles.push(cycle);
        rest = rest[close + 1..].trim_start();
    }
    Ok(cycles)
}

/// Turns parsed cycles into a permutation on `n` points.
pub fn perm_from_cycles(cycles: &[Vec<usize>], n: usize, lineno: usize) -> Result<Perm> {
    let mut p = identity(n);
    let mut moved = vec![false; n];
    for cycle in cycles {
        for k in 0..cycle.len() {
            let from = cycle[k];
            let to = cycle[(k + 1) % cycle.len()];
            if moved[from] {
                return Err(Error::parse(lineno, "cycles are not disjoint"));
            }
            moved[from] = true;
            p[from] = to;
        }
    }
    Ok(p)
}

/// Closes a generating set of permutations under composition, breadth first.
/// The identity comes first; afterwards elements appear in the order they are
/// reached by right-multiplying generators, which makes the element order a
/// deterministic function of the generator list.
pub fn close_generators(gens: &[Perm], cap: usize) -> Result<Vec<Perm>> {
    let n = gens.first().map(|g| g.len()).unwrap_or(1);
    for g in gens {
        if g.len() != n || !is_permutation(g) {
            return Err(Error::InvalidData(
                "generators must be permutations of a common domain".into(),
            ));
        }
    }
    let mut elems = vec![identity(n)];
    let mut index: HashMap<Perm, usize> = HashMap::new();
    index.insert(elems[0].clone(), 0);
    let mut head = 0;
    while head < elems.len() {
        let cur = elems[head].clone();
        head += 1;
        for g in gens {
            let next = compose(&cur, g);
            if !index.contains_key(&next) {
                if elems.len() >= cap {
                    return Err(Error::SizeLimit { cap });
                }
                index.insert(next.clone(), elems.len());
                elems.push(next);
            }
        }
    }
    Ok(elems)
}
