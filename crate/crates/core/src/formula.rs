//! Mass formulas: finite sums `Σ coeff(x) · x^{-exponent}` where each
//! coefficient is an integer plus character sums and each exponent is either
//! an explicit rational or a linear form in the weights.

use crate::chars::{unit_group, CharacterSum};
use crate::error::{Error, Result};
use crate::group::CyclicClass;
use crate::ramification::{LinearForm, WeightFunction};
use crate::Rat;
use num::{BigInt, One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// A formula coefficient: an integer constant plus a list of character sums.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coefficient {
    pub constant: BigInt,
    pub sums: Vec<CharacterSum>,
}

impl Coefficient {
    pub fn integer(k: impl Into<BigInt>) -> Self {
        Coefficient {
            constant: k.into(),
            sums: Vec::new(),
        }
    }

    pub fn one() -> Self {
        Self::integer(1)
    }

    /// Wraps a character sum, folding the identically-1 cases (modulus 1, or
    /// the stabilizer being the whole unit group) into the integer part.
    pub fn from_sum(sum: CharacterSum) -> Self {
        if sum.subgroup().len() == unit_group(sum.modulus()).order() {
            return Self::one();
        }
        Coefficient {
            constant: BigInt::zero(),
            sums: vec![sum],
        }
    }

    /// No character-sum part; the value does not depend on `x`.
    pub fn is_pure(&self) -> bool {
        self.sums.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.is_pure() && self.constant.is_zero()
    }

    pub fn eval(&self, x: u64) -> Result<BigInt> {
        let mut acc = self.constant.clone();
        for s in &self.sums {
            acc += BigInt::from(s.eval(x)?);
        }
        Ok(acc)
    }

    pub fn add(&self, other: &Coefficient) -> Coefficient {
        let mut sums = self.sums.clone();
        sums.extend(other.sums.iter().cloned());
        Coefficient {
            constant: &self.constant + &other.constant,
            sums,
        }
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.constant.is_zero() || self.sums.is_empty() {
            parts.push(self.constant.to_string());
        }
        for s in &self.sums {
            parts.push(s.to_string());
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// A term exponent: an explicit rational, or a named linear form in the
/// weights (tame class forms render as `L[name]`).
#[derive(Clone, Debug, PartialEq)]
pub enum Exponent {
    Const(Rat),
    Form { name: String, form: LinearForm },
}

impl Exponent {
    pub fn zero() -> Self {
        Exponent::Const(Rat::zero())
    }

    /// Resolves to a rational, given weights when the exponent is symbolic.
    pub fn resolve(&self, w: Option<&WeightFunction>) -> Result<Rat> {
        match self {
            Exponent::Const(c) => Ok(c.clone()),
            Exponent::Form { form, .. } => {
                let w = w.ok_or(Error::UnboundVariable)?;
                Ok(form.eval(w))
            }
        }
    }
}

fn exponent_string(e: &Rat) -> String {
    if e.is_integer() {
        let n = e.numer();
        if n.is_negative() {
            format!("p^{}", -n)
        } else {
            format!("p^-{n}")
        }
    } else {
        format!("p^-({e})")
    }
}

/// `x^{-e}` as an exact rational; `e` must be an integer rational.
pub fn prime_power(x: u64, e: &Rat) -> Result<Rat> {
    if !e.is_integer() {
        return Err(Error::NonIntegerExponent(e.to_string()));
    }
    let e = e
        .numer()
        .to_i64()
        .ok_or_else(|| Error::NonIntegerExponent(e.to_string()))?;
    let power = BigInt::from(x).pow(e.unsigned_abs() as u32);
    Ok(if e >= 0 {
        Rat::new(BigInt::one(), power)
    } else {
        Rat::from_integer(power)
    })
}

/// A mass formula `Σ coeff · p^{-exponent}`.
#[derive(Clone, Debug, PartialEq)]
pub struct MassFormula {
    pub terms: Vec<(Coefficient, Exponent)>,
}

impl MassFormula {
    /// Exact value at `x ≥ 1`; `w` is required when any exponent is still a
    /// form. Every resolved exponent must be an integer.
    pub fn eval(&self, x: u64, w: Option<&WeightFunction>) -> Result<Rat> {
        let mut acc = Rat::zero();
        for (coeff, exponent) in &self.terms {
            let e = exponent.resolve(w)?;
            let c = coeff.eval(x)?;
            acc += Rat::from_integer(c) * prime_power(x, &e)?;
        }
        Ok(acc)
    }

    /// Resolves all exponents at `w`, merges terms with equal exponents, and
    /// sorts by ascending exponent.
    pub fn specialize(&self, w: Option<&WeightFunction>) -> Result<MassFormula> {
        let mut merged: BTreeMap<Rat, Coefficient> = BTreeMap::new();
        for (coeff, exponent) in &self.terms {
            let e = exponent.resolve(w)?;
            merged
                .entry(e)
                .and_modify(|c| *c = c.add(coeff))
                .or_insert_with(|| coeff.clone());
        }
        Ok(MassFormula {
            terms: merged
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(e, c)| (c, Exponent::Const(e)))
                .collect(),
        })
    }

    /// Exponents of the terms, when all are explicit rationals.
    pub fn constant_exponents(&self) -> Option<Vec<Rat>> {
        self.terms
            .iter()
            .map(|(_, e)| match e {
                Exponent::Const(c) => Some(c.clone()),
                Exponent::Form { .. } => None,
            })
            .collect()
    }
}

impl fmt::Display for MassFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (coeff, exponent) in &self.terms {
            let exp_str = match exponent {
                Exponent::Const(c) if c.is_zero() => None,
                Exponent::Const(c) => Some(exponent_string(c)),
                Exponent::Form { name, .. } => Some(format!("p^-L[{name}]")),
            };
            let piece = match exp_str {
                None => coeff.to_string(),
                Some(pow) => {
                    if coeff.is_pure() && coeff.constant.is_one() {
                        pow
                    } else if coeff.is_pure() && !coeff.constant.is_negative() {
                        format!("{}*{}", coeff.constant, pow)
                    } else if coeff.sums.len() == 1 && coeff.constant.is_zero() {
                        format!("{}*{}", coeff.sums[0], pow)
                    } else {
                        format!("({coeff})*{pow}")
                    }
                }
            };
            parts.push(piece);
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// One row of the tame formula: a cyclic class, its character-sum
/// coefficient, and its exponent form.
#[derive(Clone, Debug)]
pub struct TameRow {
    pub class: CyclicClass,
    pub coeff: CharacterSum,
    pub exponent: LinearForm,
}

/// The tame mass formula of a group: one row per conjugacy class of cyclic
/// subgroups, in canonical class order. The trivial class contributes the
/// constant term 1.
#[derive(Clone, Debug)]
pub struct TameFormula {
    pub rows: Vec<TameRow>,
}

impl TameFormula {
    pub fn nontrivial_rows(&self) -> impl Iterator<Item = &TameRow> {
        self.rows.iter().filter(|r| r.class.n > 1)
    }

    pub fn class_names(&self) -> Vec<&str> {
        self.rows.iter().map(|r| r.class.name.as_str()).collect()
    }

    /// The exponent values (L values) of the nontrivial rows at `w`.
    pub fn form_values(&self, w: &WeightFunction) -> Vec<Rat> {
        self.nontrivial_rows().map(|r| r.exponent.eval(w)).collect()
    }

    pub fn to_mass_formula(&self) -> MassFormula {
        let terms = self
            .rows
            .iter()
            .map(|row| {
                let coeff = Coefficient::from_sum(row.coeff.clone());
                let exponent = if row.class.n == 1 {
                    Exponent::zero()
                } else {
                    Exponent::Form {
                        name: row.class.name.clone(),
                        form: row.exponent.clone(),
                    }
                };
                (coeff, exponent)
            })
            .collect();
        MassFormula { terms }
    }

    pub fn eval(&self, x: u64, w: &WeightFunction) -> Result<Rat> {
        self.to_mass_formula().eval(x, Some(w))
    }
}

impl fmt::Display for TameFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_mass_formula())
    }
}
