//! Wild-prime local map data in three shapes: raw filtration-class counts,
//! normalized exponent profiles over the tame class forms, and bare exponent
//! support sets. Includes the parser for the line-oriented dataset format
//! and the embedded datasets.

use crate::error::{Error, Result};
use crate::formula::prime_power;
use crate::group::{builtin, FiniteGroup};
use crate::linalg::solve_rational;
use crate::ramification::{c_weighted, linear_form_of, parse_chain, RamFiltration, WeightFunction};
use crate::Rat;
use num::{Signed, Zero};
use std::collections::BTreeMap;

/// One conjugacy class of wild local maps: a filtration and how many maps
/// realize it (a raw count, not normalized by the group order).
#[derive(Clone, Debug)]
pub struct LocalMapClass {
    pub filt: RamFiltration,
    pub multiplicity: u64,
}

/// A normalized wild mass profile: terms `mult * p^-(vector . L)` over an
/// ordered basis of tame class names. The all-zero vector is the constant
/// term and must be present.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WildProfile {
    pub basis: Vec<String>,
    pub terms: Vec<(Vec<u64>, u64)>,
}

impl WildProfile {
    /// Exact value `Σ mult · p^{-(v · L)}` at explicit L values (one per
    /// basis entry). Each combined exponent must be an integer.
    pub fn eval_at(&self, prime: u64, l_values: &[Rat]) -> Result<Rat> {
        if l_values.len() != self.basis.len() {
            return Err(Error::InvalidData(format!(
                "{} L values for a basis of {}",
                l_values.len(),
                self.basis.len()
            )));
        }
        let mut acc = Rat::zero();
        for (vector, mult) in &self.terms {
            let mut e = Rat::zero();
            for (v, l) in vector.iter().zip(l_values) {
                e += Rat::from_integer((*v).into()) * l;
            }
            acc += Rat::from_integer((*mult).into()) * prime_power(prime, &e)?;
        }
        Ok(acc)
    }

    /// Sum of the stored multiplicities, constant term included.
    pub fn term_count(&self) -> u64 {
        self.terms.iter().map(|(_, m)| *m).sum()
    }
}

/// Exponent vectors a wild map's counting value can take, with no
/// multiplicities attached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportSet {
    pub basis: Vec<String>,
    pub vectors: Vec<Vec<u64>>,
}

#[derive(Clone, Debug)]
pub enum DatasetKind {
    Filtration(Vec<LocalMapClass>),
    Profile(WildProfile),
    Support(SupportSet),
}

/// A parsed dataset: local map data for one group at one wild prime.
#[derive(Clone, Debug)]
pub struct WildDataset {
    pub group_name: String,
    pub prime: u64,
    pub kind: DatasetKind,
    /// Original text, kept verbatim for display.
    pub source: String,
}

impl WildDataset {
    /// The wild total mass at this dataset's prime under the weights `w`:
    /// filtration kind evaluates `Σ mult · p^{-c_w}` over the records and
    /// normalizes by `|Γ|`; profile kind evaluates the stored terms at the
    /// tame form values. Support kind carries no multiplicities and cannot
    /// produce a mass.
    pub fn mass(&self, group: &FiniteGroup, w: &WeightFunction) -> Result<Rat> {
        let pairs = group.maximal_pairs();
        match &self.kind {
            DatasetKind::Filtration(classes) => {
                let mut acc = Rat::zero();
                for class in classes {
                    let e = c_weighted(group, &pairs, &class.filt, w);
                    acc += Rat::from_integer(class.multiplicity.into())
                        * prime_power(self.prime, &e)?;
                }
                Ok(acc / Rat::from_integer(group.order().into()))
            }
            DatasetKind::Profile(profile) => {
                let l_values: Vec<Rat> = group
                    .cyclic_classes()
                    .iter()
                    .filter(|c| c.n > 1)
                    .map(|c| {
                        linear_form_of(group, &pairs, &RamFiltration::tame(c.subgroup.clone()))
                            .eval(w)
                    })
                    .collect();
                profile.eval_at(self.prime, &l_values)
            }
            DatasetKind::Support(_) => Err(Error::InvalidData(
                "a support dataset has no multiplicities; it cannot give a mass".into(),
            )),
        }
    }

    /// The term count `t` used for search bounds: stored multiplicities for
    /// a profile; for raw filtration records, 1 for the normalized constant
    /// plus the raw ramified multiplicities.
    pub fn term_count(&self) -> u64 {
        match &self.kind {
            DatasetKind::Filtration(classes) => {
                1 + classes
                    .iter()
                    .filter(|c| !c.filt.is_unramified())
                    .map(|c| c.multiplicity)
                    .sum::<u64>()
            }
            DatasetKind::Profile(profile) => profile.term_count(),
            DatasetKind::Support(_) => 0,
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn parse_mult(rest: &str, lineno: usize) -> Result<(String, u64)> {
    let (head, mult) = rest
        .rsplit_once(" x ")
        .ok_or_else(|| Error::parse(lineno, "expected `... x <count>`"))?;
    let m: u64 = mult
        .trim()
        .parse()
        .map_err(|_| Error::parse(lineno, format!("bad count `{}`", mult.trim())))?;
    if m == 0 {
        return Err(Error::parse(lineno, "count must be at least 1"));
    }
    Ok((head.trim().to_string(), m))
}

fn parse_vector(text: &str, len: usize, lineno: usize) -> Result<Vec<u64>> {
    let inner = text
        .trim()
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| Error::parse(lineno, format!("expected `(...)`, found `{text}`")))?;
    let mut v = Vec::new();
    for tok in inner.split(',') {
        v.push(
            tok.trim()
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad exponent `{}`", tok.trim())))?,
        );
    }
    if v.len() != len {
        return Err(Error::parse(
            lineno,
            format!("vector has {} entries, basis has {len}", v.len()),
        ));
    }
    Ok(v)
}

/// Parses a dataset against its group. Grammar, one record per line with `#`
/// comments:
///
/// ```text
/// group D4 prime 2 kind profile
/// basis C2a,C2b,Z,C4
/// const x 1
/// term (2,0,0,0) x 1
/// ```
///
/// Filtration kind uses `chain {e,a},{e,a} x 2` and `unramified x 2`
/// records; support kind uses `form (2,0,0)` lines.
pub fn parse_dataset(group: &FiniteGroup, text: &str) -> Result<WildDataset> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim().to_string();
        if !line.is_empty() {
            lines.push((i + 1, line));
        }
    }
    let Some((header_line, header)) = lines.first().cloned() else {
        return Err(Error::InvalidData("dataset is empty".into()));
    };
    let toks: Vec<&str> = header.split_whitespace().collect();
    let [_, name, _, prime, _, kind] = toks.as_slice() else {
        return Err(Error::parse(
            header_line,
            "header must be `group <name> prime <p> kind <filtration|profile|support>`",
        ));
    };
    if toks[0] != "group" || toks[2] != "prime" || toks[4] != "kind" {
        return Err(Error::parse(header_line, "bad header keywords"));
    }
    let prime: u64 = prime
        .parse()
        .map_err(|_| Error::parse(header_line, format!("bad prime `{prime}`")))?;
    if !is_prime(prime) {
        return Err(Error::parse(header_line, format!("{prime} is not prime")));
    }
    if !group.order().is_multiple_of(prime as usize) {
        return Err(Error::parse(
            header_line,
            format!("{prime} does not divide the group order {}", group.order()),
        ));
    }
    if let Some(gname) = group.name() {
        if gname != *name {
            return Err(Error::parse(
                header_line,
                format!("dataset is for group {name}, not {gname}"),
            ));
        }
    }

    let class_names: Vec<String> = group
        .cyclic_classes()
        .iter()
        .filter(|c| c.n > 1)
        .map(|c| c.name.clone())
        .collect();

    let body = &lines[1..];
    let kind = match *kind {
        "filtration" => {
            let mut records = Vec::new();
            for (lineno, line) in body {
                let (head, mult) = parse_mult(line, *lineno)?;
                let filt = if head == "unramified" {
                    RamFiltration::unramified()
                } else if let Some(spec) = head.strip_prefix("chain ") {
                    parse_chain(group, spec.trim(), *lineno)?
                } else {
                    return Err(Error::parse(
                        *lineno,
                        format!("expected `chain ...` or `unramified`, found `{head}`"),
                    ));
                };
                records.push(LocalMapClass {
                    filt,
                    multiplicity: mult,
                });
            }
            if records.is_empty() {
                return Err(Error::InvalidData("dataset has no records".into()));
            }
            let unramified: u64 = records
                .iter()
                .filter(|r| r.filt.is_unramified())
                .map(|r| r.multiplicity)
                .sum();
            if unramified != group.order() as u64 {
                return Err(Error::InvalidData(format!(
                    "unramified multiplicity {unramified} must equal the group order {}",
                    group.order()
                )));
            }
            DatasetKind::Filtration(records)
        }
        "profile" | "support" => {
            let Some((basis_line, basis_text)) = body.first() else {
                return Err(Error::InvalidData("dataset has no records".into()));
            };
            let Some(basis_spec) = basis_text.strip_prefix("basis ") else {
                return Err(Error::parse(*basis_line, "expected `basis <names>` first"));
            };
            let basis: Vec<String> =
                basis_spec.split(',').map(|s| s.trim().to_string()).collect();
            if basis != class_names {
                return Err(Error::parse(
                    *basis_line,
                    format!(
                        "basis must list the nontrivial cyclic classes in canonical order: {}",
                        class_names.join(",")
                    ),
                ));
            }
            if *kind == "profile" {
                let mut terms = Vec::new();
                for (lineno, line) in &body[1..] {
                    let (head, mult) = parse_mult(line, *lineno)?;
                    let vector = if head == "const" {
                        vec![0; basis.len()]
                    } else if let Some(spec) = head.strip_prefix("term ") {
                        parse_vector(spec, basis.len(), *lineno)?
                    } else {
                        return Err(Error::parse(
                            *lineno,
                            format!("expected `term (...)` or `const`, found `{head}`"),
                        ));
                    };
                    terms.push((vector, mult));
                }
                if terms.is_empty() {
                    return Err(Error::InvalidData("dataset has no records".into()));
                }
                if !terms.iter().any(|(v, _)| v.iter().all(|&x| x == 0)) {
                    return Err(Error::InvalidData(
                        "profile needs a constant term (`const x 1`)".into(),
                    ));
                }
                DatasetKind::Profile(WildProfile { basis, terms })
            } else {
                let mut vectors = Vec::new();
                for (lineno, line) in &body[1..] {
                    let Some(spec) = line.strip_prefix("form ") else {
                        return Err(Error::parse(*lineno, "expected `form (...)`"));
                    };
                    vectors.push(parse_vector(spec, basis.len(), *lineno)?);
                }
                if vectors.is_empty() {
                    return Err(Error::InvalidData("dataset has no records".into()));
                }
                DatasetKind::Support(SupportSet { basis, vectors })
            }
        }
        other => {
            return Err(Error::parse(
                header_line,
                format!("unknown kind `{other}` (filtration, profile, or support)"),
            ));
        }
    };

    Ok(WildDataset {
        group_name: name.to_string(),
        prime,
        kind,
        source: text.to_string(),
    })
}

/// Rewrites raw filtration records as a profile over the tame class forms:
/// each record's linear form must be a nonnegative integer combination of
/// the forms of the nontrivial cyclic classes. Multiplicities stay raw.
pub fn compile_profile(group: &FiniteGroup, classes: &[LocalMapClass]) -> Result<WildProfile> {
    let pairs = group.maximal_pairs();
    let tame: Vec<_> = group
        .cyclic_classes()
        .into_iter()
        .filter(|c| c.n > 1)
        .collect();
    let basis: Vec<String> = tame.iter().map(|c| c.name.clone()).collect();
    let forms: Vec<_> = tame
        .iter()
        .map(|c| linear_form_of(group, &pairs, &RamFiltration::tame(c.subgroup.clone())))
        .collect();

    // pairs x classes matrix with the tame forms as columns
    let matrix: Vec<Vec<Rat>> = (0..pairs.len())
        .map(|i| forms.iter().map(|f| f.coeffs[i].clone()).collect())
        .collect();

    let mut merged: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
    for record in classes {
        let target = linear_form_of(group, &pairs, &record.filt);
        let solution = solve_rational(&matrix, &target.coeffs).ok_or_else(|| {
            Error::Inexpressible {
                filt: record.filt.render(group),
            }
        })?;
        let mut vector: Vec<u64> = Vec::with_capacity(basis.len());
        for v in &solution {
            if !v.is_integer() || v.is_negative() {
                return Err(Error::Inexpressible {
                    filt: record.filt.render(group),
                });
            }
            vector.push(v.numer().try_into().map_err(|_| Error::Inexpressible {
                filt: record.filt.render(group),
            })?);
        }
        // the particular solution zeroes free columns; re-check it really
        // reproduces the record's form
        for i in 0..pairs.len() {
            let mut acc = Rat::zero();
            for (j, form) in forms.iter().enumerate() {
                acc += &form.coeffs[i] * Rat::from_integer(vector[j].into());
            }
            if acc != target.coeffs[i] {
                return Err(Error::Inexpressible {
                    filt: record.filt.render(group),
                });
            }
        }
        *merged.entry(vector).or_insert(0) += record.multiplicity;
    }
    if !merged.keys().any(|v| v.iter().all(|&x| x == 0)) {
        return Err(Error::InvalidData(
            "no unramified record; the compiled profile would lack its constant term".into(),
        ));
    }
    Ok(WildProfile {
        basis,
        terms: merged.into_iter().collect(),
    })
}

const EMBEDDED: &[(&str, &str, &str)] = &[
    ("C2@2", "C2", include_str!("data/c2_at_2.dataset")),
    ("D4@2", "D4", include_str!("data/d4_at_2.dataset")),
    ("S3@2", "S3", include_str!("data/s3_at_2.dataset")),
    ("S3@3", "S3", include_str!("data/s3_at_3.dataset")),
    ("C2xC2@2", "C2xC2", include_str!("data/c2c2_at_2.dataset")),
];

/// Names of the embedded datasets.
pub fn embedded_names() -> Vec<&'static str> {
    EMBEDDED.iter().map(|(n, _, _)| *n).collect()
}

/// Fetches an embedded dataset by name (`C2@2`, `D4@2`, `S3@2`, `S3@3`, or
/// the support-only `C2xC2@2`).
pub fn embedded(name: &str) -> Result<WildDataset> {
    let Some((_, group_name, text)) = EMBEDDED.iter().find(|(n, _, _)| *n == name) else {
        return Err(Error::UnknownDataset(name.to_string()));
    };
    let group = builtin(group_name)?;
    parse_dataset(&group, text)
}
