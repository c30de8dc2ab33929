//! Shared helpers for the integration suites: an independent character-sum
//! oracle assembled from complex Dirichlet characters, corpus builders over
//! the built-in groups, and the deterministic property checks.

// Each test target compiles its own copy and uses a different subset.
#![allow(dead_code)]

use massforms_core::num::{ToPrimitive, Zero};
use massforms_core::{
    builtin, builtin_names, c_weighted, chars::gcd, check_doubling, count_frobenius_pairs,
    linear_form_of, tame_formula, unit_group, CharacterSum, FiniteGroup, RamFiltration, Rat,
    Subgroup, UnitGroup, WeightFunction,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::collections::HashMap;

/// A character of the units mod `n`, stored as exact rotation numbers in
/// `[0, 1)`: the value at `u` is `exp(2 pi i * angle[u])`.
pub type Character = HashMap<u64, Rat>;

fn frac(a: Rat) -> Rat {
    &a - a.floor()
}

/// All characters of the unit group, built by extending partial
/// homomorphisms one generator at a time. Exact; no floats.
pub fn characters(units: &UnitGroup) -> Vec<Character> {
    let mut partial: Vec<Character> = vec![HashMap::from([(units.identity(), Rat::zero())])];
    loop {
        if partial[0].len() == units.order() {
            return partial;
        }
        let g = *units
            .members()
            .iter()
            .find(|m| !partial[0].contains_key(m))
            .expect("domain is a proper subgroup, some member is missing");
        // d = minimal power of g landing in the current domain
        let mut d = 1u64;
        let mut gd = g;
        while !partial[0].contains_key(&gd) {
            gd = units.mul(gd, g);
            d += 1;
        }
        let mut next = Vec::new();
        for chi in &partial {
            let base = chi[&gd].clone();
            for j in 0..d {
                // d * theta must equal the already-fixed angle of g^d mod 1
                let theta = frac(
                    (&base + Rat::from_integer(j.into())) / Rat::from_integer(d.into()),
                );
                let mut ext = chi.clone();
                for (&h, a) in chi.iter() {
                    let mut elem = h;
                    let mut angle = a.clone();
                    for _ in 1..=d - 1 {
                        elem = units.mul(elem, g);
                        angle = frac(angle + &theta);
                        ext.insert(elem, angle.clone());
                    }
                }
                next.push(ext);
            }
        }
        partial = next;
    }
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|&d| n.is_multiple_of(d)).collect()
}

/// Smallest modulus the character factors through: the minimal divisor `d`
/// of `n` with the character trivial on every unit congruent to 1 mod `d`.
pub fn conductor(units: &UnitGroup, chi: &Character) -> u64 {
    let n = units.modulus();
    for d in divisors(n) {
        let trivial = units
            .members()
            .iter()
            .filter(|&&u| u % d == 1 % d)
            .all(|u| chi[u].is_zero());
        if trivial {
            return d;
        }
    }
    unreachable!("every character factors through its own modulus");
}

/// Independent evaluation of the sum of all characters mod `n` trivial on
/// `s`, at `x`: each character contributes through its primitive version
/// (zero when `x` shares a factor with the conductor). The only floating
/// point in the whole engine-vs-oracle comparison lives here, and the
/// result must round to an integer within 1e-9.
pub fn character_sum_oracle(
    units: &UnitGroup,
    chars: &[Character],
    s: &[u64],
    x: u64,
) -> Result<i64, String> {
    let n = units.modulus();
    let mut re = 0f64;
    let mut im = 0f64;
    for chi in chars {
        if !s.iter().all(|a| chi[a].is_zero()) {
            continue;
        }
        let f = conductor(units, chi);
        if gcd(x, f) != 1 {
            continue;
        }
        // lift x mod f to a unit mod n; the reduction map is onto
        let y = if f == 1 {
            units.identity()
        } else {
            *units
                .members()
                .iter()
                .find(|&&u| u % f == x % f)
                .ok_or_else(|| format!("no unit lift of {x} mod {f} inside mod {n}"))?
        };
        let angle = chi[&y]
            .to_f64()
            .ok_or_else(|| "angle out of f64 range".to_string())?;
        re += (std::f64::consts::TAU * angle).cos();
        im += (std::f64::consts::TAU * angle).sin();
    }
    if im.abs() > 1e-9 {
        return Err(format!("character sum oracle not real: imag {im}"));
    }
    let rounded = re.round();
    if (re - rounded).abs() > 1e-9 {
        return Err(format!("character sum oracle not integral: {re}"));
    }
    Ok(rounded as i64)
}

/// Engine vs oracle over all moduli up to 16, all unit subgroups, and
/// arguments up to three periods.
pub fn check_character_oracle() -> Result<(), String> {
    for n in 1..=16u64 {
        let units = unit_group(n);
        let chars = characters(&units);
        if chars.len() != units.order() {
            return Err(format!(
                "mod {n}: enumerated {} characters for a unit group of order {}",
                chars.len(),
                units.order()
            ));
        }
        for s in units.all_subgroups() {
            let cs = CharacterSum::new(n, s.clone()).map_err(|e| e.to_string())?;
            for x in 1..=(3 * n).max(20) {
                let engine = cs.eval(x).map_err(|e| e.to_string())? as i64;
                let oracle = character_sum_oracle(&units, &chars, &s, x)?;
                if engine != oracle {
                    return Err(format!(
                        "character sum mod {n} trivial on {s:?} at {x}: engine {engine}, oracle {oracle}"
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Built-ins of prime-power order (2..=16): the groups the doubling
/// comparison applies to.
pub fn ell_group_names() -> Vec<&'static str> {
    builtin_names()
        .iter()
        .copied()
        .filter(|name| {
            let g = builtin(name).unwrap();
            g.order() > 1 && g.order() <= 16 && g.prime_power_base().is_some()
        })
        .collect()
}

/// Doubling comparison over every nontrivial subgroup `C`: wild chains
/// `[C,C]`, `[C,C,C]`, and `[C,C,D]` for each subgroup `D` of `C` all
/// dominate twice the tame chain `[C]`, pair by pair.
pub fn check_doubling_corpus() -> Result<(), String> {
    for name in ell_group_names() {
        let g = builtin(name).map_err(|e| e.to_string())?;
        let subs = g.subgroups();
        for c in subs.iter().filter(|s| s.order() > 1) {
            let tame = RamFiltration::tame(c.clone());
            let mut wild_chains: Vec<Vec<Subgroup>> = vec![
                vec![c.clone(), c.clone()],
                vec![c.clone(), c.clone(), c.clone()],
            ];
            for d in subs.iter().filter(|d| d.is_subset_of(c)) {
                wild_chains.push(vec![c.clone(), c.clone(), d.clone()]);
            }
            for chain in wild_chains {
                let wild = RamFiltration::new(&g, chain).map_err(|e| e.to_string())?;
                let report = check_doubling(&g, &tame, &wild).map_err(|e| e.to_string())?;
                if !report.holds {
                    return Err(format!(
                        "doubling fails in {name} for tame {} vs wild {}",
                        tame.render(&g),
                        wild.render(&g)
                    ));
                }
            }
        }
    }
    Ok(())
}

/// A spread of descending chains for a group: the unramified chain, every
/// tame chain, and two- and three-level chains through each subgroup pair.
pub fn chain_corpus(g: &FiniteGroup) -> Vec<RamFiltration> {
    let subs = g.subgroups();
    let mut chains = vec![RamFiltration::unramified()];
    for s1 in subs.iter().filter(|s| s.order() > 1) {
        chains.push(RamFiltration::tame(s1.clone()));
        for s2 in subs.iter().filter(|s2| s2.is_subset_of(s1)) {
            chains.push(RamFiltration::new(g, vec![s1.clone(), s2.clone()]).unwrap());
            chains
                .push(RamFiltration::new(g, vec![s1.clone(), s1.clone(), s2.clone()]).unwrap());
        }
    }
    chains.truncate(60);
    chains
}

pub fn random_weights(len: usize, rng: &mut StdRng) -> WeightFunction {
    let mut w = WeightFunction::zero(len);
    for i in 0..len {
        let numer: i64 = rng.random_range(-12..=12);
        let denom: i64 = rng.random_range(1..=6);
        w.set(i, Rat::new(numer.into(), denom.into()));
    }
    w
}

/// The weighted counting value of a chain must equal its linear form
/// evaluated at the weights, for arbitrary (including negative) weights.
pub fn check_weight_linearity() -> Result<(), String> {
    let mut rng = StdRng::seed_from_u64(0x6d61_7373);
    for name in ["C2", "C4", "C8", "S3", "D4", "Q8", "C2xC2", "D6"] {
        let g = builtin(name).map_err(|e| e.to_string())?;
        let pairs = g.maximal_pairs();
        let chains = chain_corpus(&g);
        let forms: Vec<_> = chains
            .iter()
            .map(|c| linear_form_of(&g, &pairs, c))
            .collect();
        for _ in 0..100 {
            let w = random_weights(pairs.len(), &mut rng);
            for (chain, form) in chains.iter().zip(&forms) {
                let direct = c_weighted(&g, &pairs, chain, &w);
                let via_form = form.eval(&w);
                if direct != via_form {
                    return Err(format!(
                        "{name}: chain {} gives {direct} directly but {via_form} via its form",
                        chain.render(&g)
                    ));
                }
                if chain.is_unramified() && !direct.is_zero() {
                    return Err(format!("{name}: unramified chain has nonzero count"));
                }
            }
        }
    }
    Ok(())
}

pub fn primes_below(n: u64) -> Vec<u64> {
    (2..n)
        .filter(|&p| (2..p).all(|d| d * d > p || p % d != 0))
        .collect()
}

/// Tame Frobenius-pair counts only depend on the prime's residue mod the
/// group order.
pub fn check_congruence_invariance() -> Result<(), String> {
    for name in ["C2", "C4", "C6", "S3", "D4", "Q8", "C2xC2", "D5"] {
        let g = builtin(name).map_err(|e| e.to_string())?;
        let m = g.order() as u64;
        let classes = tame_formula(&g).rows;
        let mut by_residue: HashMap<u64, (u64, Vec<u64>)> = HashMap::new();
        for p in primes_below(60) {
            if m.is_multiple_of(p) {
                continue;
            }
            let counts: Vec<u64> = classes
                .iter()
                .map(|row| count_frobenius_pairs(&g, p, &row.class))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?;
            match by_residue.entry(p % m) {
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert((p, counts));
                }
                std::collections::hash_map::Entry::Occupied(e) => {
                    let (q, expect) = e.get();
                    if expect != &counts {
                        return Err(format!(
                            "{name}: class counts differ at {p} and {q} though {p} = {q} mod {m}"
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}

/// The deterministic property battery behind the final acceptance line.
pub fn run_property_suite() -> Result<(), String> {
    check_character_oracle()?;
    check_doubling_corpus()?;
    check_weight_linearity()?;
    check_congruence_invariance()?;
    Ok(())
}
