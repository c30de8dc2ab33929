//! Exact arithmetic for masses of local Galois maps into a fixed finite
//! group: tame mass formulas with character-sum coefficients, weighted
//! ramification counts, wild datasets, universality checks, and an
//! exhaustive solver for the exponent values that make a weighting
//! universal. All computation is over `BigRational`; nothing is floated.

pub mod chars;
pub mod data;
pub mod error;
pub mod formula;
pub mod group;
pub mod linalg;
pub mod mass;
pub mod ramification;
pub mod solver;

pub use num;

/// The scalar type used throughout: arbitrary-precision rationals.
pub type Rat = num::BigRational;

/// Shorthand for building a rational from machine integers.
pub fn ratio(numer: i64, denom: i64) -> Rat {
    Rat::new(numer.into(), denom.into())
}

pub use chars::{unit_group, CharacterSum, UnitGroup};
pub use data::{
    compile_profile, embedded, embedded_names, parse_dataset, DatasetKind, LocalMapClass,
    SupportSet, WildDataset, WildProfile,
};
pub use error::{Error, Result};
pub use formula::{prime_power, Coefficient, Exponent, MassFormula, TameFormula, TameRow};
pub use group::{
    builtin, builtin_names, parse_group_file, CyclicClass, FiniteGroup, Subgroup, SubgroupPair,
};
pub use mass::{
    congruence_formula, count_frobenius_pairs, is_universal, tame_formula, total_mass, PrimeCheck,
    UniversalReport,
};
pub use ramification::{
    artin_conductor, c_pair, c_weighted, check_doubling, linear_form_of, parse_chain,
    parse_weight_file, ClassFunction, DoublingReport, LinearForm, RamFiltration, WeightFunction,
};
pub use solver::{
    assemble, bounds, bounds_with_override, lattice_rank, solve, support_forms,
    weights_from_forms, BoundSource, LatticeReport, MassEquation, PositivityOutcome, SearchBounds,
    SolutionSet, WeightsRecovery, MAX_SEARCH_VARS,
};

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_reduces() {
        assert_eq!(ratio(2, 4), ratio(1, 2));
        assert_eq!(ratio(-3, 6).to_string(), "-1/2");
    }
}
