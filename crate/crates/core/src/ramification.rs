//! Ramification filtrations and the counting functions built from them: the
//! per-pair quantity `c_{H,H'}`, weighted sums over maximal pairs, the same
//! data repackaged as linear forms in the weights, the doubling comparison
//! for wild chains, and Artin conductors of class functions.

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, Subgroup, SubgroupPair};
use crate::Rat;
use num::{BigInt, BigRational, Signed, Zero};
use std::str::FromStr;

/// A descending chain `I_0 ⊇ I_1 ⊇ ...` of subgroups; levels past the end
/// are implicitly trivial and trailing trivial entries are stripped. The
/// empty chain is the unramified filtration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RamFiltration {
    chain: Vec<Subgroup>,
}

impl RamFiltration {
    pub fn new(group: &FiniteGroup, mut chain: Vec<Subgroup>) -> Result<Self> {
        for sub in &chain {
            if sub.elements().iter().any(|&x| x >= group.order()) {
                return Err(Error::InvalidSubgroup(
                    "filtration subgroup out of range".into(),
                ));
            }
        }
        for i in 1..chain.len() {
            if !chain[i].is_subset_of(&chain[i - 1]) {
                return Err(Error::InvalidData(format!(
                    "filtration is not descending at level {i}"
                )));
            }
        }
        while chain.last().map(|s| s.order()) == Some(1) {
            chain.pop();
        }
        Ok(RamFiltration { chain })
    }

    pub fn unramified() -> Self {
        RamFiltration { chain: Vec::new() }
    }

    /// The tame chain `[C]`.
    pub fn tame(inertia: Subgroup) -> Self {
        if inertia.order() == 1 {
            return Self::unramified();
        }
        RamFiltration {
            chain: vec![inertia],
        }
    }

    pub fn is_unramified(&self) -> bool {
        self.chain.is_empty()
    }

    pub fn levels(&self) -> &[Subgroup] {
        &self.chain
    }

    pub fn inertia(&self) -> Option<&Subgroup> {
        self.chain.first()
    }

    pub fn render(&self, group: &FiniteGroup) -> String {
        if self.is_unramified() {
            return "unramified".to_string();
        }
        let parts: Vec<String> = self
            .chain
            .iter()
            .map(|s| group.set_string(s.elements()))
            .collect();
        format!("[{}]", parts.join(","))
    }
}

fn mask(elements: &[usize], order: usize) -> Vec<u64> {
    let mut m = vec![0u64; order.div_ceil(64)];
    for &x in elements {
        m[x / 64] |= 1 << (x % 64);
    }
    m
}

fn overlap(a: &[u64], b: &[u64]) -> i64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x & y).count_ones() as i64)
        .sum()
}

/// The explicit counting quantity for one maximal pair:
/// `(1/(|I_0| |H'|)) Σ_{γ∈Γ} Σ_{i≥0} (|γ I_i γ^{-1} ∩ H| − |γ I_i γ^{-1} ∩ H'|)`.
/// Returns 0 on the unramified filtration. The value is an exact rational;
/// it is an integer on genuine local Galois data but not for arbitrary
/// synthetic chains.
pub fn c_pair(group: &FiniteGroup, filt: &RamFiltration, pair: &SubgroupPair) -> Rat {
    let Some(i0) = filt.inertia() else {
        return Rat::zero();
    };
    let order = group.order();
    let h_mask = mask(pair.outer.elements(), order);
    let hp_mask = mask(pair.inner.elements(), order);
    let mut total: i64 = 0;
    for level in filt.levels() {
        for g in 0..order {
            let conj = group.conjugate_set(level.elements(), g);
            let m = mask(&conj, order);
            total += overlap(&m, &h_mask) - overlap(&m, &hp_mask);
        }
    }
    let denom = (i0.order() * pair.inner.order()) as i64;
    BigRational::new(BigInt::from(total), BigInt::from(denom))
}

/// Rational weights on the maximal pairs of a fixed group, indexed by the
/// canonical order of `FiniteGroup::maximal_pairs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightFunction {
    values: Vec<Rat>,
}

impl WeightFunction {
    pub fn new(values: Vec<Rat>) -> Self {
        WeightFunction { values }
    }

    pub fn zero(len: usize) -> Self {
        WeightFunction {
            values: vec![Rat::zero(); len],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize) -> &Rat {
        &self.values[i]
    }

    pub fn set(&mut self, i: usize, v: Rat) {
        self.values[i] = v;
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|v| !v.is_negative())
    }

    /// Do all denominators divide `d`?
    pub fn denominators_divide(&self, d: u64) -> bool {
        let d = BigInt::from(d);
        self.values.iter().all(|v| (&d % v.denom()).is_zero())
    }
}

/// A linear form `constant + Σ coeffs[i] · w(pair_i)` over the maximal pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearForm {
    pub coeffs: Vec<Rat>,
    pub constant: Rat,
}

impl LinearForm {
    pub fn zero(len: usize) -> Self {
        LinearForm {
            coeffs: vec![Rat::zero(); len],
            constant: Rat::zero(),
        }
    }

    pub fn eval(&self, w: &WeightFunction) -> Rat {
        let mut acc = self.constant.clone();
        for (c, v) in self.coeffs.iter().zip(w.values()) {
            acc += c * v;
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Renders against pair names, e.g. `2*w({e,a}>{e}) + w({e,a,b,ab}>{e,a})`.
    pub fn render(&self, group: &FiniteGroup, pairs: &[SubgroupPair]) -> String {
        let mut parts = Vec::new();
        if !self.constant.is_zero() {
            parts.push(self.constant.to_string());
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let var = format!("w({})", group.pair_string(&pairs[i]));
            if c == &Rat::from_integer(1.into()) {
                parts.push(var);
            } else {
                parts.push(format!("{c}*{var}"));
            }
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }
}

/// `Σ_{(H,H')} c_{H,H'} · w(H,H')` over the given maximal pairs.
pub fn c_weighted(
    group: &FiniteGroup,
    pairs: &[SubgroupPair],
    filt: &RamFiltration,
    w: &WeightFunction,
) -> Rat {
    let mut acc = Rat::zero();
    for (i, pair) in pairs.iter().enumerate() {
        acc += c_pair(group, filt, pair) * w.get(i);
    }
    acc
}

/// The same data as a linear form in the weights: coefficient on each pair
/// is `c_pair`.
pub fn linear_form_of(
    group: &FiniteGroup,
    pairs: &[SubgroupPair],
    filt: &RamFiltration,
) -> LinearForm {
    LinearForm {
        coeffs: pairs.iter().map(|p| c_pair(group, filt, p)).collect(),
        constant: Rat::zero(),
    }
}

/// Outcome of the doubling comparison `c_pair(wild) ≥ 2 c_pair(tame)` over
/// all maximal pairs.
#[derive(Clone, Debug)]
pub struct DoublingReport {
    pub holds: bool,
    /// Per pair: (index, 2 * tame value, wild value).
    pub comparisons: Vec<(usize, Rat, Rat)>,
}

/// Checks the doubling inequality for a prime-power-order group: a wild
/// chain with `I_0 = I_1 = C` dominates twice the tame chain `[C]` on every
/// pair. Preconditions: the group order is a prime power, `tame` is a single
/// level, and the wild chain repeats that level at positions 0 and 1.
pub fn check_doubling(
    group: &FiniteGroup,
    tame: &RamFiltration,
    wild: &RamFiltration,
) -> Result<DoublingReport> {
    if group.prime_power_base().is_none() {
        return Err(Error::Precondition(
            "doubling comparison needs a group of prime-power order".into(),
        ));
    }
    let [c] = tame.levels() else {
        return Err(Error::Precondition("tame chain must be a single level".into()));
    };
    if wild.levels().len() < 2 || wild.levels()[0] != wild.levels()[1] || &wild.levels()[0] != c {
        return Err(Error::Precondition(
            "wild chain must start with I_0 = I_1 equal to the tame inertia".into(),
        ));
    }
    let pairs = group.maximal_pairs();
    let mut comparisons = Vec::new();
    let mut holds = true;
    for (i, pair) in pairs.iter().enumerate() {
        let doubled = c_pair(group, tame, pair) * Rat::from_integer(2.into());
        let wild_val = c_pair(group, wild, pair);
        if wild_val < doubled {
            holds = false;
        }
        comparisons.push((i, doubled, wild_val));
    }
    Ok(DoublingReport { holds, comparisons })
}

/// A function on the group constant on conjugacy classes, stored per element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassFunction {
    values: Vec<Rat>,
}

impl ClassFunction {
    pub fn new(group: &FiniteGroup, values: Vec<Rat>) -> Result<Self> {
        if values.len() != group.order() {
            return Err(Error::InvalidData(
                "class function needs one value per element".into(),
            ));
        }
        for x in 0..group.order() {
            for g in 0..group.order() {
                if values[group.conj(g, x)] != values[x] {
                    return Err(Error::InvalidData(format!(
                        "not constant on the class of `{}`",
                        group.label(x)
                    )));
                }
            }
        }
        Ok(ClassFunction { values })
    }

    /// Value `|Γ|` at the identity, 0 elsewhere.
    pub fn regular(group: &FiniteGroup) -> Self {
        let mut values = vec![Rat::zero(); group.order()];
        values[0] = Rat::from_integer(BigInt::from(group.order()));
        ClassFunction { values }
    }

    pub fn trivial(group: &FiniteGroup) -> Self {
        ClassFunction {
            values: vec![Rat::from_integer(1.into()); group.order()],
        }
    }

    pub fn sub(&self, other: &ClassFunction) -> ClassFunction {
        ClassFunction {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn degree(&self) -> &Rat {
        &self.values[0]
    }

    pub fn value(&self, x: usize) -> &Rat {
        &self.values[x]
    }
}

/// Artin conductor of a class function along a filtration:
/// `Σ_{i≥0} (|I_i|/|I_0|) (χ(1) − avg_{I_i} χ)`; 0 on the unramified chain.
pub fn artin_conductor(_group: &FiniteGroup, filt: &RamFiltration, chi: &ClassFunction) -> Rat {
    let Some(i0) = filt.inertia() else {
        return Rat::zero();
    };
    let i0_order = BigInt::from(i0.order());
    let mut acc = Rat::zero();
    for level in filt.levels() {
        let mut avg = Rat::zero();
        for &x in level.elements() {
            avg += chi.value(x);
        }
        avg /= Rat::from_integer(BigInt::from(level.order()));
        let scale = BigRational::new(BigInt::from(level.order()), i0_order.clone());
        acc += scale * (chi.degree() - avg);
    }
    acc
}

fn parse_label_set(group: &FiniteGroup, text: &str, lineno: usize) -> Result<Vec<usize>> {
    let t = text.trim();
    let inner = t
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| Error::parse(lineno, format!("expected {{...}}, found `{t}`")))?;
    let mut out = Vec::new();
    for tok in inner.split(',') {
        let tok = tok.trim();
        if tok.is_empty() {
            continue;
        }
        out.push(
            group
                .element_by_label(tok)
                .map_err(|_| Error::parse(lineno, format!("unknown element label `{tok}`")))?,
        );
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Parses a subgroup chain written as `{e,a},{e,a}` into a filtration.
pub fn parse_chain(
    group: &FiniteGroup,
    text: &str,
    lineno: usize,
) -> Result<RamFiltration> {
    let mut levels = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    let bytes = text.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b'{' => depth += 1,
            b'}' => {
                depth = depth
                    .checked_sub(1)
                    .ok_or_else(|| Error::parse(lineno, "unbalanced braces"))?
            }
            b',' if depth == 0 => {
                levels.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(Error::parse(lineno, "unbalanced braces"));
    }
    levels.push(&text[start..]);
    let mut chain = Vec::new();
    for level in levels {
        let elems = parse_label_set(group, level, lineno)?;
        let sub = Subgroup::new(group, elems)
            .map_err(|e| Error::parse(lineno, e.to_string()))?;
        chain.push(sub);
    }
    RamFiltration::new(group, chain).map_err(|e| Error::parse(lineno, e.to_string()))
}

/// Parses a weight file against a fixed pair list. Lines look like
///
/// ```text
/// H = {e,r,r2,r3} ; H' = {e,r2} ; w = 3/4
/// ```
///
/// `#` starts a comment; unlisted pairs get weight 0; listing a pair twice
/// is an error.
pub fn parse_weight_file(
    group: &FiniteGroup,
    pairs: &[SubgroupPair],
    text: &str,
) -> Result<WeightFunction> {
    let mut w = WeightFunction::zero(pairs.len());
    let mut seen = vec![false; pairs.len()];
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let clauses: Vec<&str> = line.split(';').map(|c| c.trim()).collect();
        if clauses.len() != 3 {
            return Err(Error::parse(
                lineno,
                "expected `H = {..} ; H' = {..} ; w = value`",
            ));
        }
        let mut outer = None;
        let mut inner = None;
        let mut weight = None;
        for clause in clauses {
            let (key, value) = clause
                .split_once('=')
                .ok_or_else(|| Error::parse(lineno, format!("missing `=` in `{clause}`")))?;
            match key.trim() {
                "H" => outer = Some(parse_label_set(group, value, lineno)?),
                "H'" => inner = Some(parse_label_set(group, value, lineno)?),
                "w" => {
                    weight = Some(Rat::from_str(value.trim()).map_err(|_| {
                        Error::parse(lineno, format!("bad rational `{}`", value.trim()))
                    })?)
                }
                other => {
                    return Err(Error::parse(lineno, format!("unknown clause `{other}`")));
                }
            }
        }
        let (Some(outer), Some(inner), Some(weight)) = (outer, inner, weight) else {
            return Err(Error::parse(lineno, "line needs H, H', and w clauses"));
        };
        let idx = pairs
            .iter()
            .position(|p| p.outer.elements() == outer && p.inner.elements() == inner)
            .ok_or_else(|| {
                Error::parse(
                    lineno,
                    "the listed (H, H') is not a maximal subgroup pair of the group",
                )
            })?;
        if seen[idx] {
            return Err(Error::parse(lineno, "pair listed twice"));
        }
        seen[idx] = true;
        w.set(idx, weight);
    }
    Ok(w)
}
