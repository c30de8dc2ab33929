//! Built-in groups with curated element labels.

use super::cycles;
use super::FiniteGroup;
use crate::error::{Error, Result};

const NAMES: &[&str] = &[
    "C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C9", "C12", "C15", "C16", "C2xC2", "C2xC4",
    "C2xC2xC2", "C3xC3", "S3", "D4", "D5", "D6", "D8", "Q8", "Q16", "A4", "S4",
];

/// Names accepted by [`builtin`], in display order.
pub fn builtin_names() -> &'static [&'static str] {
    NAMES
}

/// Looks up a built-in group by name, e.g. `D4` or `C2xC2`.
pub fn builtin(name: &str) -> Result<FiniteGroup> {
    let g = match name {
        "C1" => cyclic(1, "a"),
        "C2" => cyclic(2, "a"),
        "C3" => cyclic(3, "a"),
        "C4" => cyclic(4, "a"),
        "C5" => cyclic(5, "a"),
        "C6" => cyclic(6, "a"),
        "C7" => cyclic(7, "a"),
        "C8" => cyclic(8, "a"),
        "C9" => cyclic(9, "a"),
        "C12" => cyclic(12, "a"),
        "C15" => cyclic(15, "a"),
        "C16" => cyclic(16, "a"),
        "C2xC2" => product(&cyclic(2, "a")?, &cyclic(2, "b")?),
        "C2xC4" => product(&cyclic(2, "a")?, &cyclic(4, "b")?),
        "C2xC2xC2" => product(&product(&cyclic(2, "a")?, &cyclic(2, "b")?)?, &cyclic(2, "c")?),
        "C3xC3" => product(&cyclic(3, "a")?, &cyclic(3, "b")?),
        "S3" => dihedral(3),
        "D4" => dihedral(4),
        "D5" => dihedral(5),
        "D6" => dihedral(6),
        "D8" => dihedral(8),
        "Q8" => quaternion(2, &["1", "i", "-1", "-i", "j", "k", "-j", "-k"]),
        "Q16" => quaternion(4, &[]),
        "A4" => alternating(4),
        "S4" => symmetric(4),
        _ => return Err(Error::UnknownGroup(name.to_string())),
    }?;
    Ok(g.with_name(name))
}

impl FiniteGroup {
    fn with_name(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }
}

fn power_label(sym: &str, k: usize) -> String {
    match k {
        0 => "e".to_string(),
        1 => sym.to_string(),
        _ => format!("{sym}{k}"),
    }
}

fn cyclic(n: usize, sym: &str) -> Result<FiniteGroup> {
    let table = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
    let labels = (0..n).map(|k| power_label(sym, k)).collect();
    FiniteGroup::from_table(table, labels, None)
}

/// Direct product; element `(x, y)` gets index `x + y * |G1|` and the
/// concatenated label.
fn product(g1: &FiniteGroup, g2: &FiniteGroup) -> Result<FiniteGroup> {
    let (n1, n2) = (g1.order(), g2.order());
    let n = n1 * n2;
    let mut table = vec![vec![0usize; n]; n];
    for i in 0..n1 {
        for j in 0..n2 {
            for k in 0..n1 {
                for l in 0..n2 {
                    table[i + j * n1][k + l * n1] = g1.mul(i, k) + g2.mul(j, l) * n1;
                }
            }
        }
    }
    let mut labels = vec![String::new(); n];
    for j in 0..n2 {
        for i in 0..n1 {
            labels[i + j * n1] = match (g1.label(i), g2.label(j)) {
                ("e", "e") => "e".to_string(),
                (a, "e") => a.to_string(),
                ("e", b) => b.to_string(),
                (a, b) => format!("{a}{b}"),
            };
        }
    }
    FiniteGroup::from_table(table, labels, None)
}

/// Dihedral group of order `2n`: indices `0..n` are `r^i`, `n..2n` are
/// `r^i s`.
fn dihedral(n: usize) -> Result<FiniteGroup> {
    let order = 2 * n;
    let mut table = vec![vec![0usize; order]; order];
    for i in 0..n {
        for j in 0..2 {
            for k in 0..n {
                for l in 0..2 {
                    let (rot, refl) = if j == 0 {
                        ((i + k) % n, l)
                    } else {
                        ((i + n - k) % n, 1 - l)
                    };
                    table[i + j * n][k + l * n] = rot + refl * n;
                }
            }
        }
    }
    let mut labels: Vec<String> = (0..n).map(|k| power_label("r", k)).collect();
    for k in 0..n {
        labels.push(match k {
            0 => "s".to_string(),
            1 => "rs".to_string(),
            _ => format!("r{k}s"),
        });
    }
    FiniteGroup::from_table(table, labels, None)
}

/// Generalized quaternion group of order `4m`: `x` of order `2m`, `y` with
/// `y^2 = x^m` and `y x y^{-1} = x^{-1}`. Indices `i + j * 2m` for `x^i y^j`.
fn quaternion(m: usize, labels: &[&str]) -> Result<FiniteGroup> {
    let half = 2 * m;
    let order = 4 * m;
    let mut table = vec![vec![0usize; order]; order];
    for i in 0..half {
        for j in 0..2 {
            for k in 0..half {
                for l in 0..2 {
                    let (xi, yj) = if j == 0 {
                        ((i + k) % half, l)
                    } else if l == 0 {
                        ((i + half - k) % half, 1)
                    } else {
                        ((i + half - k + m) % half, 0)
                    };
                    table[i + j * half][k + l * half] = xi + yj * half;
                }
            }
        }
    }
    let labels: Vec<String> = if labels.is_empty() {
        let mut v: Vec<String> = (0..half).map(|k| power_label("x", k)).collect();
        for k in 0..half {
            v.push(match k {
                0 => "y".to_string(),
                1 => "xy".to_string(),
                _ => format!("x{k}y"),
            });
        }
        v
    } else {
        labels.iter().map(|s| s.to_string()).collect()
    };
    FiniteGroup::from_table(table, labels, None)
}

fn all_perms(n: usize) -> Vec<cycles::Perm> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    permute(&mut cur, 0, &mut out);
    out.sort();
    out
}

fn permute(cur: &mut Vec<usize>, k: usize, out: &mut Vec<cycles::Perm>) {
    if k == cur.len() {
        out.push(cur.clone());
        return;
    }
    for i in k..cur.len() {
        cur.swap(k, i);
        permute(cur, k + 1, out);
        cur.swap(k, i);
    }
}

fn is_even(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    let mut parity = 0;
    for start in 0..p.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = p[i];
            len += 1;
        }
        parity += len - 1;
    }
    parity % 2 == 0
}

fn perm_group(perms: Vec<cycles::Perm>) -> Result<FiniteGroup> {
    let labels = perms.iter().map(cycles::cycle_string).collect();
    FiniteGroup::from_perms(&perms, labels, None)
}

/// Symmetric group on `n` points, elements in lexicographic order and
/// labelled by cycle notation.
fn symmetric(n: usize) -> Result<FiniteGroup> {
    perm_group(all_perms(n))
}

fn alternating(n: usize) -> Result<FiniteGroup> {
    perm_group(all_perms(n).into_iter().filter(|p| is_even(p)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_builtin_constructs() {
        for name in builtin_names() {
            let g = builtin(name).unwrap();
            assert_eq!(g.name(), Some(*name));
            assert!(g.order() >= 1);
        }
    }

    #[test]
    fn expected_orders() {
        for (name, order) in [
            ("C16", 16),
            ("C2xC4", 8),
            ("C2xC2xC2", 8),
            ("C3xC3", 9),
            ("D8", 16),
            ("Q16", 16),
            ("A4", 12),
            ("S4", 24),
        ] {
            assert_eq!(builtin(name).unwrap().order(), order, "{name}");
        }
    }

    #[test]
    fn q8_label_arithmetic() {
        let g = builtin("Q8").unwrap();
        let i = g.element_by_label("i").unwrap();
        let j = g.element_by_label("j").unwrap();
        let k = g.element_by_label("k").unwrap();
        let minus = g.element_by_label("-1").unwrap();
        assert_eq!(g.mul(i, j), k);
        assert_eq!(g.mul(j, i), g.mul(minus, k));
        assert_eq!(g.mul(i, i), minus);
        assert_eq!(g.element_order(i), 4);
    }

    #[test]
    fn d4_label_arithmetic() {
        let g = builtin("D4").unwrap();
        let r = g.element_by_label("r").unwrap();
        let s = g.element_by_label("s").unwrap();
        assert_eq!(g.element_order(r), 4);
        assert_eq!(g.element_order(s), 2);
        let rs = g.element_by_label("rs").unwrap();
        assert_eq!(g.mul(r, s), rs);
        // s r = r^{-1} s = r3s
        assert_eq!(g.mul(s, r), g.element_by_label("r3s").unwrap());
    }

    #[test]
    fn s4_is_nonabelian_of_order_24() {
        let g = builtin("S4").unwrap();
        assert!(!g.is_abelian());
        assert_eq!(g.center(), vec![0]);
        assert_eq!(g.cyclic_classes().len(), 5);
    }

    #[test]
    fn a4_has_no_order_6_subgroup() {
        let g = builtin("A4").unwrap();
        assert!(g.subgroups().iter().all(|s| s.order() != 6));
        assert_eq!(g.subgroups().len(), 10);
    }

    #[test]
    fn unknown_name_is_an_error() {
        assert!(matches!(builtin("E8"), Err(Error::UnknownGroup(_))));
    }
}
