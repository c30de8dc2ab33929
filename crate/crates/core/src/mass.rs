//! Total masses and mass formulas: the unique tame formula of a group, its
//! congruence-class specializations, exhaustive Frobenius-pair counting (the
//! oracle the closed-form coefficients are tested against), and universality
//! verdicts combining tame formulas with wild data.

use crate::chars::{gcd, CharacterSum};
use crate::data::WildDataset;
use crate::error::{Error, Result};
use crate::formula::{prime_power, Coefficient, Exponent, MassFormula, TameFormula, TameRow};
use crate::group::{CyclicClass, FiniteGroup};
use crate::ramification::{c_weighted, linear_form_of, RamFiltration, WeightFunction};
use crate::Rat;
use num::Zero;

/// The tame mass formula: one row per conjugacy class of cyclic subgroups,
/// coefficient `σ_{n,S}` from the class's power stabilizer, exponent the
/// class's tame linear form in the weights.
pub fn tame_formula(group: &FiniteGroup) -> TameFormula {
    let pairs = group.maximal_pairs();
    let rows = group
        .cyclic_classes()
        .into_iter()
        .map(|class| {
            let coeff = CharacterSum::new(class.n as u64, class.power_stabilizer.clone())
                .expect("power stabilizer is a subgroup of the units");
            let exponent = linear_form_of(
                group,
                &pairs,
                &RamFiltration::tame(class.subgroup.clone()),
            );
            TameRow {
                class,
                coeff,
                exponent,
            }
        })
        .collect();
    TameFormula { rows }
}

/// Counts pairs `(s, t)` in `Γ²` with `⟨t⟩` conjugate to the class's
/// subgroup and `s t s^{-1} = t^p`, by exhaustive enumeration. This is the
/// oracle for the tame coefficients: count / |Γ| = σ_{n,S}(p).
pub fn count_frobenius_pairs(
    group: &FiniteGroup,
    p: u64,
    class: &CyclicClass,
) -> Result<u64> {
    let order = group.order();
    if (order as u64).is_multiple_of(p) {
        return Err(Error::WildPrime {
            prime: p,
            order,
        });
    }
    let conjugates = group.subgroup_conjugates(&class.subgroup);
    let mut count = 0u64;
    for t in 0..order {
        let sub_t = group.closure(&[t]);
        if conjugates.binary_search(&sub_t).is_err() {
            continue;
        }
        let tp = group.pow(t, p);
        count += (0..order).filter(|&s| group.conj(s, t) == tp).count() as u64;
    }
    Ok(count)
}

/// The total mass at `p` under the weights `w`. Tame primes are measured
/// directly: Frobenius-pair counts per class, normalized by `|Γ|`, times
/// `p^{-c_w}` of the class's tame chain. Wild primes require a dataset.
pub fn total_mass(
    group: &FiniteGroup,
    p: u64,
    w: &WeightFunction,
    data: Option<&WildDataset>,
) -> Result<Rat> {
    if !(group.order() as u64).is_multiple_of(p) {
        let pairs = group.maximal_pairs();
        let order = Rat::from_integer(group.order().into());
        let mut acc = Rat::zero();
        for class in group.cyclic_classes() {
            let count = count_frobenius_pairs(group, p, &class)?;
            let filt = RamFiltration::tame(class.subgroup.clone());
            let e = c_weighted(group, &pairs, &filt, w);
            acc += Rat::from_integer(count.into()) / &order * prime_power(p, &e)?;
        }
        return Ok(acc);
    }
    let data = data.ok_or(Error::DataRequired { prime: p })?;
    if data.prime != p {
        return Err(Error::InvalidData(format!(
            "dataset is for prime {}, not {p}",
            data.prime
        )));
    }
    if let Some(name) = group.name() {
        if name != data.group_name {
            return Err(Error::InvalidData(format!(
                "dataset is for group {}, not {name}",
                data.group_name
            )));
        }
    }
    data.mass(group, w)
}

/// Specializes the tame formula's coefficients on the congruence class
/// `p ≡ a mod |Γ|`; exponents stay symbolic. Coefficients become integers
/// and zero rows are dropped.
pub fn congruence_formula(group: &FiniteGroup, a: u64) -> Result<MassFormula> {
    let m = group.order() as u64;
    let x = if m == 1 {
        1
    } else {
        let a = a % m;
        if gcd(a, m) != 1 {
            return Err(Error::NotCoprime {
                residue: a,
                modulus: m,
            });
        }
        a
    };
    let mut terms = Vec::new();
    for row in tame_formula(group).rows {
        let value = row.coeff.eval(x)?;
        if value == 0 {
            continue;
        }
        let exponent = if row.class.n == 1 {
            Exponent::zero()
        } else {
            Exponent::Form {
                name: row.class.name.clone(),
                form: row.exponent.clone(),
            }
        };
        terms.push((Coefficient::integer(value), exponent));
    }
    Ok(MassFormula { terms })
}

/// One wild prime's universality comparison.
#[derive(Clone, Debug)]
pub struct PrimeCheck {
    pub prime: u64,
    /// Tame formula evaluated at the wild prime.
    pub formula_value: Rat,
    /// Total mass from the wild dataset.
    pub mass: Rat,
    pub equal: bool,
}

/// Universality verdict: the tame formula matches every tame mass by
/// construction, so only the wild primes are compared (numerically, as exact
/// rationals).
#[derive(Clone, Debug)]
pub struct UniversalReport {
    pub checks: Vec<PrimeCheck>,
    pub universal: bool,
}

/// Compares the tame formula's value against the wild total mass at every
/// prime dividing `|Γ|`, given one dataset per such prime.
pub fn is_universal(
    group: &FiniteGroup,
    w: &WeightFunction,
    datasets: &[WildDataset],
) -> Result<UniversalReport> {
    let formula = tame_formula(group).to_mass_formula();
    let mut checks = Vec::new();
    for prime in group.order_primes() {
        let ds = datasets
            .iter()
            .find(|d| d.prime == prime)
            .ok_or(Error::DataRequired { prime })?;
        let formula_value = formula.eval(prime, Some(w))?;
        let mass = total_mass(group, prime, w, Some(ds))?;
        let equal = formula_value == mass;
        checks.push(PrimeCheck {
            prime,
            formula_value,
            mass,
            equal,
        });
    }
    Ok(UniversalReport {
        universal: checks.iter().all(|c| c.equal),
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::embedded;
    use crate::group::builtin;
    use crate::ratio;

    fn unit_weights(group: &FiniteGroup) -> WeightFunction {
        let n = group.maximal_pairs().len();
        let mut w = WeightFunction::zero(n);
        for i in 0..n {
            w.set(i, ratio(1, 1));
        }
        w
    }

    #[test]
    fn c2_tame_formula_display() {
        let g = builtin("C2").unwrap();
        let f = tame_formula(&g);
        assert_eq!(f.to_string(), "1 + p^-L[C2]");
        assert_eq!(f.class_names(), vec!["1", "C2"]);
    }

    #[test]
    fn d4_tame_formula_is_pure() {
        let g = builtin("D4").unwrap();
        let f = tame_formula(&g).to_mass_formula();
        for (coeff, _) in &f.terms {
            assert!(coeff.is_pure());
        }
        assert_eq!(
            f.to_string(),
            "1 + p^-L[C2a] + p^-L[C2b] + p^-L[Z] + p^-L[C4]"
        );
    }

    #[test]
    fn c4_coefficient_depends_on_residue() {
        let g = builtin("C4").unwrap();
        let f = tame_formula(&g);
        let c4_row = f.rows.iter().find(|r| r.class.name == "C4").unwrap();
        assert_eq!(c4_row.coeff.eval(5).unwrap(), 2);
        assert_eq!(c4_row.coeff.eval(3).unwrap(), 0);
    }

    #[test]
    fn frobenius_counts() {
        let g = builtin("C4").unwrap();
        let classes = g.cyclic_classes();
        let c4 = classes.iter().find(|c| c.name == "C4").unwrap();
        assert_eq!(count_frobenius_pairs(&g, 5, c4).unwrap(), 8);
        assert_eq!(count_frobenius_pairs(&g, 3, c4).unwrap(), 0);
        assert!(matches!(
            count_frobenius_pairs(&g, 2, c4),
            Err(Error::WildPrime { .. })
        ));

        let s3 = builtin("S3").unwrap();
        let classes = s3.cyclic_classes();
        let c3 = classes.iter().find(|c| c.name == "C3").unwrap();
        assert_eq!(count_frobenius_pairs(&s3, 5, c3).unwrap(), 6);
    }

    #[test]
    fn pair_counts_partition_all_tame_maps() {
        let g = builtin("S3").unwrap();
        let total: u64 = g
            .cyclic_classes()
            .iter()
            .map(|c| count_frobenius_pairs(&g, 7, c).unwrap())
            .sum();
        let brute: u64 = (0..6)
            .flat_map(|t| (0..6).map(move |s| (s, t)))
            .filter(|&(s, t)| g.conj(s, t) == g.pow(t, 7))
            .count() as u64;
        assert_eq!(total, brute);
    }

    #[test]
    fn c2_masses() {
        let g = builtin("C2").unwrap();
        let w = unit_weights(&g);
        for p in [3u64, 5, 7] {
            assert_eq!(
                total_mass(&g, p, &w, None).unwrap(),
                ratio(1, 1) + ratio(1, p as i64)
            );
        }
        let ds = embedded("C2@2").unwrap();
        assert_eq!(total_mass(&g, 2, &w, Some(&ds)).unwrap(), ratio(3, 2));
        assert!(matches!(
            total_mass(&g, 2, &w, None),
            Err(Error::DataRequired { prime: 2 })
        ));
    }

    #[test]
    fn congruence_specializations() {
        let g = builtin("C4").unwrap();
        assert_eq!(
            congruence_formula(&g, 1).unwrap().to_string(),
            "1 + p^-L[C2] + 2*p^-L[C4]"
        );
        assert_eq!(
            congruence_formula(&g, 3).unwrap().to_string(),
            "1 + p^-L[C2]"
        );
        assert!(congruence_formula(&g, 2).is_err());

        let s3 = builtin("S3").unwrap();
        for a in [1u64, 5] {
            assert_eq!(
                congruence_formula(&s3, a).unwrap().to_string(),
                "1 + p^-L[C2] + p^-L[C3]"
            );
        }
    }

    #[test]
    fn c2_is_universal_with_unit_weights() {
        let g = builtin("C2").unwrap();
        let w = unit_weights(&g);
        let report = is_universal(&g, &w, &[embedded("C2@2").unwrap()]).unwrap();
        assert!(report.universal);
        assert_eq!(report.checks.len(), 1);
        assert_eq!(report.checks[0].formula_value, ratio(3, 2));
        assert_eq!(report.checks[0].mass, ratio(3, 2));
    }

    #[test]
    fn congruence_counts_match_between_congruent_primes() {
        let g = builtin("C4").unwrap();
        for class in g.cyclic_classes() {
            let at5 = count_frobenius_pairs(&g, 5, &class).unwrap();
            let at13 = count_frobenius_pairs(&g, 13, &class).unwrap();
            assert_eq!(at5, at13, "class {}", class.name);
        }
    }
}
