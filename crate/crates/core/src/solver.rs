//! The universality equation system: one equation per wild prime equating
//! the tame formula's value with the wild mass profile, searched exhaustively
//! over nonnegative integer values of the tame class forms, plus weight
//! recovery from target form values and weight-lattice ranks.

use crate::data::{compile_profile, DatasetKind, SupportSet, WildDataset};
use crate::error::{Error, Result};
use crate::formula::prime_power;
use crate::group::FiniteGroup;
use crate::linalg::{smith_normal_form, solve_integer, Snf};
use crate::mass::tame_formula;
use crate::ramification::{LinearForm, WeightFunction};
use crate::Rat;
use num::{BigInt, Integer, One, Signed, Zero};

/// Hard cap on search dimensions; the tree is exponential in this.
pub const MAX_SEARCH_VARS: usize = 8;

/// Cap on the largest exponent the scaled search arithmetic will table.
const MAX_POWER: u64 = 100_000;

/// One wild prime's mass equation: `1 + Σ_j coeff_j ℓ^{-L_j}` on the left,
/// `Σ mult ℓ^{-(v · L)}` on the right (the all-zero vector is the right's
/// constant term). Multiplicities are exact rationals: profiles store
/// integers, filtration data is normalized by the group order.
#[derive(Clone, Debug)]
pub struct MassEquation {
    pub prime: u64,
    /// Nontrivial cyclic class names, canonical order; the L variables.
    pub var_names: Vec<String>,
    /// Character-sum values at the prime, one per variable.
    pub lhs_coeffs: Vec<BigInt>,
    pub rhs: Vec<(Vec<u64>, Rat)>,
    /// Term count `t` feeding the default search bound `2t - 2`.
    pub term_count: u64,
    /// The bound derivation is exact for prime-power group orders only.
    pub ell_group: bool,
}

impl MassEquation {
    pub fn lhs_value(&self, l: &[u64]) -> Result<Rat> {
        let mut acc = Rat::one();
        for (c, &v) in self.lhs_coeffs.iter().zip(l) {
            acc += Rat::from_integer(c.clone())
                * prime_power(self.prime, &Rat::from_integer(v.into()))?;
        }
        Ok(acc)
    }

    pub fn rhs_value(&self, l: &[u64]) -> Result<Rat> {
        let mut acc = Rat::zero();
        for (vector, mult) in &self.rhs {
            let e: u64 = vector.iter().zip(l).map(|(a, b)| a * b).sum();
            acc += mult * prime_power(self.prime, &Rat::from_integer(e.into()))?;
        }
        Ok(acc)
    }

    pub fn satisfied_by(&self, l: &[u64]) -> Result<bool> {
        Ok(self.lhs_value(l)? == self.rhs_value(l)?)
    }

    /// Renders the equation in display form, e.g.
    /// `1 + 2^-L[C2] = 1 + 2^-2L[C2] + 2*2^-3L[C2]`.
    pub fn render(&self) -> String {
        let p = self.prime;
        let mut lhs = vec!["1".to_string()];
        for (c, name) in self.lhs_coeffs.iter().zip(&self.var_names) {
            if c.is_zero() {
                continue;
            }
            let pow = format!("{p}^-L[{name}]");
            lhs.push(if c.is_one() { pow } else { format!("{c}*{pow}") });
        }
        let mut rhs = Vec::new();
        for (vector, mult) in &self.rhs {
            let e = self.exponent_string(vector);
            let piece = match e {
                None => mult.to_string(),
                Some(e) => {
                    if mult.is_one() {
                        format!("{p}^-{e}")
                    } else {
                        format!("{mult}*{p}^-{e}")
                    }
                }
            };
            rhs.push(piece);
        }
        format!("{} = {}", lhs.join(" + "), rhs.join(" + "))
    }

    fn exponent_string(&self, vector: &[u64]) -> Option<String> {
        let parts: Vec<String> = vector
            .iter()
            .zip(&self.var_names)
            .filter(|(&v, _)| v > 0)
            .map(|(&v, name)| {
                if v == 1 {
                    format!("L[{name}]")
                } else {
                    format!("{v}L[{name}]")
                }
            })
            .collect();
        match parts.len() {
            0 => None,
            1 => Some(parts.into_iter().next().unwrap()),
            _ => Some(format!("({})", parts.join("+"))),
        }
    }
}

/// Builds the equation system: one `MassEquation` per prime dividing the
/// group order, drawing the right side from that prime's dataset.
pub fn assemble(group: &FiniteGroup, datasets: &[WildDataset]) -> Result<Vec<MassEquation>> {
    let formula = tame_formula(group);
    let var_names: Vec<String> = formula
        .nontrivial_rows()
        .map(|r| r.class.name.clone())
        .collect();
    let ell_group = group.prime_power_base().is_some();
    let mut eqs = Vec::new();
    for prime in group.order_primes() {
        let ds = datasets
            .iter()
            .find(|d| d.prime == prime)
            .ok_or(Error::DataRequired { prime })?;
        if let Some(name) = group.name() {
            if name != ds.group_name {
                return Err(Error::InvalidData(format!(
                    "dataset is for group {}, not {name}",
                    ds.group_name
                )));
            }
        }
        let mut lhs_coeffs = Vec::new();
        for row in formula.nontrivial_rows() {
            lhs_coeffs.push(BigInt::from(row.coeff.eval(prime)?));
        }
        let rhs: Vec<(Vec<u64>, Rat)> = match &ds.kind {
            DatasetKind::Profile(profile) => profile
                .terms
                .iter()
                .map(|(v, m)| (v.clone(), Rat::from_integer((*m).into())))
                .collect(),
            DatasetKind::Filtration(records) => {
                let profile = compile_profile(group, records)?;
                let order = Rat::from_integer(group.order().into());
                profile
                    .terms
                    .iter()
                    .map(|(v, m)| (v.clone(), Rat::from_integer((*m).into()) / &order))
                    .collect()
            }
            DatasetKind::Support(_) => {
                return Err(Error::InvalidData(
                    "a support dataset cannot form a mass equation".into(),
                ));
            }
        };
        eqs.push(MassEquation {
            prime,
            var_names: var_names.clone(),
            lhs_coeffs,
            rhs,
            term_count: ds.term_count(),
            ell_group,
        });
    }
    Ok(eqs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundSource {
    /// `2t - 2` from the equation's term count.
    Default,
    Override(u64),
}

#[derive(Clone, Debug)]
pub struct SearchBounds {
    pub per_var: Vec<u64>,
    pub t: u64,
    pub source: BoundSource,
    /// True when the group order is not a prime power, where the default
    /// derivation does not strictly apply.
    pub heuristic: bool,
}

/// Default bounds for one equation: every variable capped at `2t - 2`
/// (clamped to at least 1), `t` the term count of the right side.
pub fn bounds(eq: &MassEquation) -> SearchBounds {
    let t = eq.term_count;
    let cap = (2 * t).saturating_sub(2).max(1);
    SearchBounds {
        per_var: vec![cap; eq.var_names.len()],
        t,
        source: BoundSource::Default,
        heuristic: !eq.ell_group,
    }
}

/// Bounds with a uniform user override.
pub fn bounds_with_override(eq: &MassEquation, cap: u64) -> SearchBounds {
    SearchBounds {
        per_var: vec![cap.max(1); eq.var_names.len()],
        t: eq.term_count,
        source: BoundSource::Override(cap),
        heuristic: !eq.ell_group,
    }
}

/// The exhaustive search result: every solution within the bounds, in
/// lexicographic order, plus search metadata.
#[derive(Clone, Debug)]
pub struct SolutionSet {
    pub solutions: Vec<Vec<u64>>,
    pub nodes: u64,
    pub bound_used: Vec<u64>,
    pub positivity: bool,
}

/// Scaled integer view of one equation: everything multiplied by the lcm of
/// the right side's denominators and by `prime^E`, so side comparisons are
/// exact `BigInt` comparisons against a precomputed power table.
struct ScaledEq {
    coeffs: Vec<BigInt>,
    constant: BigInt,
    terms: Vec<(Vec<u64>, BigInt)>,
    pow: Vec<BigInt>,
    e_cap: u64,
    /// For each depth `k`: sums over unassigned variables `j >= k` of
    /// `coeff_j * prime^(E - bound)` at the extreme assignments.
    lhs_tail_min: Vec<BigInt>,
    lhs_tail_max: Vec<BigInt>,
    /// For each term and depth: the extreme exponent contributions of the
    /// unassigned variables.
    term_res_min: Vec<Vec<u64>>,
    term_res_max: Vec<Vec<u64>>,
}

struct EqState {
    lhs_prefix: BigInt,
    term_e: Vec<u64>,
}

impl ScaledEq {
    fn build(eq: &MassEquation, lo: &[u64], hi: &[u64]) -> Result<ScaledEq> {
        let n = eq.var_names.len();
        let mut denom = BigInt::one();
        for (_, m) in &eq.rhs {
            denom = denom.lcm(m.denom());
        }
        let coeffs: Vec<BigInt> = eq.lhs_coeffs.iter().map(|c| c * &denom).collect();
        let terms: Vec<(Vec<u64>, BigInt)> = eq
            .rhs
            .iter()
            .map(|(v, m)| (v.clone(), (m * &denom).to_integer()))
            .collect();

        let lhs_max_e = hi.iter().copied().max().unwrap_or(0);
        let rhs_max_e = terms
            .iter()
            .map(|(v, _)| v.iter().zip(hi).map(|(a, b)| a * b).sum::<u64>())
            .max()
            .unwrap_or(0);
        let e_cap = lhs_max_e.max(rhs_max_e);
        if e_cap > MAX_POWER {
            return Err(Error::Precondition(format!(
                "search bounds imply exponents up to {e_cap}; the cap is {MAX_POWER}"
            )));
        }
        let mut pow = Vec::with_capacity(e_cap as usize + 1);
        pow.push(BigInt::one());
        for _ in 0..e_cap {
            pow.push(pow.last().unwrap() * BigInt::from(eq.prime));
        }
        // the left side's 1, scaled by denom * prime^E like everything else
        let constant = &denom * &pow[e_cap as usize];

        let at = |e: u64| &pow[(e_cap - e) as usize];
        let mut lhs_tail_min = vec![BigInt::zero(); n + 1];
        let mut lhs_tail_max = vec![BigInt::zero(); n + 1];
        for k in (0..n).rev() {
            lhs_tail_min[k] = &lhs_tail_min[k + 1] + &coeffs[k] * at(hi[k]);
            lhs_tail_max[k] = &lhs_tail_max[k + 1] + &coeffs[k] * at(lo[k]);
        }
        let mut term_res_min = Vec::new();
        let mut term_res_max = Vec::new();
        for (v, _) in &terms {
            let mut rmin = vec![0u64; n + 1];
            let mut rmax = vec![0u64; n + 1];
            for k in (0..n).rev() {
                rmin[k] = rmin[k + 1] + v[k] * lo[k];
                rmax[k] = rmax[k + 1] + v[k] * hi[k];
            }
            term_res_min.push(rmin);
            term_res_max.push(rmax);
        }
        Ok(ScaledEq {
            coeffs,
            constant,
            terms,
            pow,
            e_cap,
            lhs_tail_min,
            lhs_tail_max,
            term_res_min,
            term_res_max,
        })
    }

    fn power(&self, e: u64) -> &BigInt {
        &self.pow[(self.e_cap - e) as usize]
    }

    /// Interval test at depth `k` (variables below `k` assigned in `state`).
    fn feasible(&self, state: &EqState, k: usize) -> bool {
        let lhs_min = &self.constant + &state.lhs_prefix + &self.lhs_tail_min[k];
        let lhs_max = &self.constant + &state.lhs_prefix + &self.lhs_tail_max[k];
        let mut rhs_min = BigInt::zero();
        let mut rhs_max = BigInt::zero();
        for (t, (_, m)) in self.terms.iter().enumerate() {
            let e = state.term_e[t];
            rhs_min += m * self.power(e + self.term_res_max[t][k]);
            rhs_max += m * self.power(e + self.term_res_min[t][k]);
        }
        lhs_max >= rhs_min && rhs_max >= lhs_min
    }

    fn exact(&self, state: &EqState) -> bool {
        let lhs = &self.constant + &state.lhs_prefix;
        let mut rhs = BigInt::zero();
        for (t, (_, m)) in self.terms.iter().enumerate() {
            rhs += m * self.power(state.term_e[t]);
        }
        lhs == rhs
    }

    fn push(&self, state: &mut EqState, depth: usize, value: u64) {
        state.lhs_prefix += &self.coeffs[depth] * self.power(value);
        for (t, (v, _)) in self.terms.iter().enumerate() {
            state.term_e[t] += v[depth] * value;
        }
    }

    fn pop(&self, state: &mut EqState, depth: usize, value: u64) {
        state.lhs_prefix -= &self.coeffs[depth] * self.power(value);
        for (t, (v, _)) in self.terms.iter().enumerate() {
            state.term_e[t] -= v[depth] * value;
        }
    }
}

struct Searcher<'a> {
    eqs: &'a [ScaledEq],
    lo: &'a [u64],
    hi: &'a [u64],
    n: usize,
}

impl Searcher<'_> {
    fn run(
        &self,
        depth: usize,
        assignment: &mut Vec<u64>,
        states: &mut [EqState],
        solutions: &mut Vec<Vec<u64>>,
        nodes: &mut u64,
    ) {
        if depth == self.n {
            if self.eqs.iter().zip(states.iter()).all(|(e, s)| e.exact(s)) {
                solutions.push(assignment.clone());
            }
            return;
        }
        for value in self.lo[depth]..=self.hi[depth] {
            assignment.push(value);
            for (eq, state) in self.eqs.iter().zip(states.iter_mut()) {
                eq.push(state, depth, value);
            }
            *nodes += 1;
            if self
                .eqs
                .iter()
                .zip(states.iter())
                .all(|(e, s)| e.feasible(s, depth + 1))
            {
                self.run(depth + 1, assignment, states, solutions, nodes);
            }
            for (eq, state) in self.eqs.iter().zip(states.iter_mut()) {
                eq.pop(state, depth, value);
            }
            assignment.pop();
        }
    }
}

/// Exhaustively enumerates all nonnegative integer L vectors satisfying
/// every equation, within per-variable bounds (combined across equations by
/// minimum). `positivity` raises the lower bound to 1. `jobs > 1` partitions
/// the first variable across threads; the result is identical to the
/// single-threaded run. Every reported solution is re-verified by direct
/// rational evaluation of both sides.
pub fn solve(
    eqs: &[MassEquation],
    bounds_per_eq: &[SearchBounds],
    positivity: bool,
    jobs: usize,
) -> Result<SolutionSet> {
    if eqs.is_empty() {
        return Err(Error::Precondition("no equations to solve".into()));
    }
    if eqs.len() != bounds_per_eq.len() {
        return Err(Error::Precondition(
            "need exactly one bounds record per equation".into(),
        ));
    }
    let n = eqs[0].var_names.len();
    for eq in eqs {
        if eq.var_names != eqs[0].var_names {
            return Err(Error::Precondition(
                "equations disagree on the variable list".into(),
            ));
        }
    }
    if n > MAX_SEARCH_VARS {
        return Err(Error::TooManyVariables {
            vars: n,
            limit: MAX_SEARCH_VARS,
        });
    }
    let lo = vec![if positivity { 1u64 } else { 0 }; n];
    let mut hi = vec![u64::MAX; n];
    for b in bounds_per_eq {
        if b.per_var.len() != n {
            return Err(Error::Precondition("bounds have the wrong arity".into()));
        }
        for (h, &b) in hi.iter_mut().zip(&b.per_var) {
            *h = (*h).min(b);
        }
    }
    for (l, h) in lo.iter().zip(&hi) {
        if l > h {
            return Err(Error::Precondition(
                "lower bound exceeds upper bound".into(),
            ));
        }
    }

    let scaled: Vec<ScaledEq> = eqs
        .iter()
        .map(|eq| ScaledEq::build(eq, &lo, &hi))
        .collect::<Result<_>>()?;
    let searcher = Searcher {
        eqs: &scaled,
        lo: &lo,
        hi: &hi,
        n,
    };

    let fresh_states = || -> Vec<EqState> {
        scaled
            .iter()
            .map(|e| EqState {
                lhs_prefix: BigInt::zero(),
                term_e: vec![0; e.terms.len()],
            })
            .collect()
    };

    let (mut solutions, nodes) = if n == 0 {
        // no variables: the equations are closed identities
        let states = fresh_states();
        let ok = scaled.iter().zip(&states).all(|(e, s)| e.exact(s));
        (if ok { vec![Vec::new()] } else { Vec::new() }, 0u64)
    } else if jobs <= 1 {
        let mut solutions = Vec::new();
        let mut nodes = 0u64;
        let mut assignment = Vec::with_capacity(n);
        let mut states = fresh_states();
        searcher.run(0, &mut assignment, &mut states, &mut solutions, &mut nodes);
        (solutions, nodes)
    } else {
        let firsts: Vec<u64> = (lo[0]..=hi[0]).collect();
        let chunks: Vec<Vec<u64>> = (0..jobs)
            .map(|j| firsts.iter().copied().skip(j).step_by(jobs).collect())
            .collect();
        let mut per_thread: Vec<(Vec<Vec<u64>>, u64)> = Vec::new();
        std::thread::scope(|scope| {
            let handles: Vec<_> = chunks
                .iter()
                .map(|chunk| {
                    let searcher = &searcher;
                    let fresh = &fresh_states;
                    scope.spawn(move || {
                        let mut solutions = Vec::new();
                        let mut nodes = 0u64;
                        let mut states = fresh();
                        for &first in chunk {
                            let mut assignment = vec![first];
                            for (eq, state) in searcher.eqs.iter().zip(states.iter_mut()) {
                                eq.push(state, 0, first);
                            }
                            nodes += 1;
                            if searcher
                                .eqs
                                .iter()
                                .zip(states.iter())
                                .all(|(e, s)| e.feasible(s, 1))
                            {
                                searcher.run(
                                    1,
                                    &mut assignment,
                                    &mut states,
                                    &mut solutions,
                                    &mut nodes,
                                );
                            }
                            for (eq, state) in searcher.eqs.iter().zip(states.iter_mut()) {
                                eq.pop(state, 0, first);
                            }
                        }
                        (solutions, nodes)
                    })
                })
                .collect();
            for h in handles {
                per_thread.push(h.join().expect("search worker panicked"));
            }
        });
        let mut solutions: Vec<Vec<u64>> = per_thread.iter().flat_map(|(s, _)| s.clone()).collect();
        solutions.sort();
        (solutions, per_thread.iter().map(|(_, n)| n).sum())
    };

    solutions.sort();
    for sol in &solutions {
        for eq in eqs {
            if !eq.satisfied_by(sol)? {
                return Err(Error::InvalidData(format!(
                    "internal check failed: search returned a non-solution {sol:?}"
                )));
            }
        }
    }
    Ok(SolutionSet {
        solutions,
        nodes,
        bound_used: hi,
        positivity,
    })
}

/// Outcome of the nonnegativity stage of weight recovery.
#[derive(Clone, Debug)]
pub enum PositivityOutcome {
    NotRequested,
    Infeasible,
    Feasible(WeightFunction),
}

/// Weight functions solving `form_j(w) = target_j` with denominators
/// dividing `denom`: a particular solution plus an integral kernel basis
/// (both scaled by `1/denom`), or infeasibility.
#[derive(Clone, Debug)]
pub struct WeightsRecovery {
    pub denom: u64,
    pub particular: Option<WeightFunction>,
    pub kernel: Vec<WeightFunction>,
    pub nonnegative: PositivityOutcome,
}

fn clear_row_denominators(rows: &[Vec<Rat>], rhs: &[BigInt]) -> (Vec<Vec<BigInt>>, Vec<BigInt>) {
    let mut int_rows = Vec::new();
    let mut int_rhs = Vec::new();
    for (row, b) in rows.iter().zip(rhs) {
        let mut m = BigInt::one();
        for v in row {
            m = m.lcm(v.denom());
        }
        int_rows.push(row.iter().map(|v| (v * &m).to_integer()).collect());
        int_rhs.push(b * &m);
    }
    (int_rows, int_rhs)
}

/// Solves for weight functions hitting the given tame form targets exactly.
/// The system is `A w = targets` with `A` the nontrivial tame forms; setting
/// `w = y/denom` turns it into an integer system solved by Smith normal
/// form. When `positivity` is set, a bounded exhaustive search over the
/// solution coset looks for a nonnegative point (the tame form matrix is
/// entrywise nonnegative with a positive entry in every column, so the
/// search space is finite).
pub fn weights_from_forms(
    group: &FiniteGroup,
    targets: &[i64],
    denom: u64,
    positivity: bool,
) -> Result<WeightsRecovery> {
    if denom == 0 {
        return Err(Error::Precondition("denominator bound must be positive".into()));
    }
    let formula = tame_formula(group);
    let forms: Vec<&LinearForm> = formula.nontrivial_rows().map(|r| &r.exponent).collect();
    if targets.len() != forms.len() {
        return Err(Error::InvalidData(format!(
            "{} targets for {} tame classes",
            targets.len(),
            forms.len()
        )));
    }
    let nvars = group.maximal_pairs().len();
    let rat_rows: Vec<Vec<Rat>> = forms.iter().map(|f| f.coeffs.clone()).collect();
    let scaled_rhs: Vec<BigInt> = targets
        .iter()
        .map(|&t| BigInt::from(t) * BigInt::from(denom))
        .collect();
    let (int_rows, int_rhs) = clear_row_denominators(&rat_rows, &scaled_rhs);

    let to_weights = |y: &[BigInt]| -> WeightFunction {
        WeightFunction::new(
            y.iter()
                .map(|v| Rat::new(v.clone(), BigInt::from(denom)))
                .collect(),
        )
    };

    let Some((y0, kernel)) = solve_integer(&int_rows, &int_rhs) else {
        return Ok(WeightsRecovery {
            denom,
            particular: None,
            kernel: Vec::new(),
            nonnegative: if positivity {
                PositivityOutcome::Infeasible
            } else {
                PositivityOutcome::NotRequested
            },
        });
    };

    let nonnegative = if !positivity {
        PositivityOutcome::NotRequested
    } else {
        match nonnegative_point(&int_rows, &int_rhs, nvars) {
            Some(y) => PositivityOutcome::Feasible(to_weights(&y)),
            None => PositivityOutcome::Infeasible,
        }
    };

    Ok(WeightsRecovery {
        denom,
        particular: Some(to_weights(&y0)),
        kernel: kernel.iter().map(|k| to_weights(k)).collect(),
        nonnegative,
    })
}

/// Bounded lexicographic search for `y >= 0` integer with `A y = b`, where
/// `A` is entrywise nonnegative and every column has a positive entry.
fn nonnegative_point(a: &[Vec<BigInt>], b: &[BigInt], nvars: usize) -> Option<Vec<BigInt>> {
    if b.iter().any(|x| x.is_negative()) {
        return None;
    }
    // per-variable cap: min over rows with a positive entry of b_j / A_ji
    let mut caps = vec![None::<BigInt>; nvars];
    for j in 0..a.len() {
        for i in 0..nvars {
            if a[j][i].is_positive() {
                let c = b[j].div_floor(&a[j][i]);
                caps[i] = Some(match &caps[i] {
                    None => c,
                    Some(old) => old.min(&c).clone(),
                });
            }
        }
    }
    let caps: Vec<BigInt> = caps.into_iter().map(|c| c.unwrap_or_default()).collect();

    fn rec(
        a: &[Vec<BigInt>],
        residual: &mut Vec<BigInt>,
        caps: &[BigInt],
        y: &mut Vec<BigInt>,
        i: usize,
    ) -> bool {
        if i == caps.len() {
            return residual.iter().all(|r| r.is_zero());
        }
        // remaining rows must stay satisfiable: if some residual is positive
        // but every remaining column entry in that row is zero, prune
        let mut v = BigInt::zero();
        while v <= caps[i] {
            let mut ok = true;
            for (j, row) in a.iter().enumerate() {
                let used = &row[i] * &v;
                if used > residual[j] {
                    ok = false;
                    break;
                }
            }
            if ok {
                for (j, row) in a.iter().enumerate() {
                    let used = &row[i] * &v;
                    residual[j] -= used;
                }
                y.push(v.clone());
                if rec(a, residual, caps, y, i + 1) {
                    return true;
                }
                y.pop();
                for (j, row) in a.iter().enumerate() {
                    let used = &row[i] * &v;
                    residual[j] += used;
                }
            }
            v += 1;
        }
        false
    }

    let mut residual = b.to_vec();
    let mut y = Vec::new();
    if rec(a, &mut residual, &caps, &mut y, 0) {
        Some(y)
    } else {
        None
    }
}

/// Rank report for the lattice spanned by linear forms over the weight
/// variables.
#[derive(Clone, Debug)]
pub struct LatticeReport {
    pub weight_vars: usize,
    pub rows: usize,
    pub rank: usize,
    /// Smith-form elementary divisors after clearing denominators.
    pub divisors: Vec<BigInt>,
}

/// Rank (and elementary divisors) of the matrix whose rows are the
/// nontrivial tame class forms plus any extra forms.
pub fn lattice_rank(group: &FiniteGroup, extra: &[LinearForm]) -> LatticeReport {
    let formula = tame_formula(group);
    let mut rows: Vec<Vec<Rat>> = formula
        .nontrivial_rows()
        .map(|r| r.exponent.coeffs.clone())
        .collect();
    for form in extra {
        rows.push(form.coeffs.clone());
    }
    let nvars = group.maximal_pairs().len();
    let mut global = BigInt::one();
    for row in &rows {
        for v in row {
            global = global.lcm(v.denom());
        }
    }
    let int_rows: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|row| row.iter().map(|v| (v * &global).to_integer()).collect())
        .collect();
    let Snf {
        divisors, rank, ..
    } = smith_normal_form(&int_rows);
    LatticeReport {
        weight_vars: nvars,
        rows: int_rows.len(),
        rank,
        divisors,
    }
}

/// Expands a support set's exponent vectors into linear forms over the
/// weight variables (rows for `lattice_rank`).
pub fn support_forms(group: &FiniteGroup, support: &SupportSet) -> Result<Vec<LinearForm>> {
    let formula = tame_formula(group);
    let tame_forms: Vec<&LinearForm> = formula.nontrivial_rows().map(|r| &r.exponent).collect();
    let names: Vec<&str> = formula
        .nontrivial_rows()
        .map(|r| r.class.name.as_str())
        .collect();
    if support.basis != names {
        return Err(Error::InvalidData(
            "support basis does not match the group's cyclic classes".into(),
        ));
    }
    let nvars = group.maximal_pairs().len();
    let mut out = Vec::new();
    for vector in &support.vectors {
        let mut form = LinearForm::zero(nvars);
        for (v, tf) in vector.iter().zip(&tame_forms) {
            for (c, add) in form.coeffs.iter_mut().zip(&tf.coeffs) {
                *c += Rat::from_integer((*v).into()) * add;
            }
        }
        out.push(form);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::embedded;
    use crate::group::builtin;
    use crate::ratio;

    fn c2_system() -> (FiniteGroup, Vec<MassEquation>) {
        let g = builtin("C2").unwrap();
        let eqs = assemble(&g, &[embedded("C2@2").unwrap()]).unwrap();
        (g, eqs)
    }

    #[test]
    fn c2_equation_shape() {
        let (_, eqs) = c2_system();
        assert_eq!(eqs.len(), 1);
        let eq = &eqs[0];
        assert_eq!(eq.prime, 2);
        assert_eq!(eq.var_names, vec!["C2"]);
        assert_eq!(eq.lhs_coeffs, vec![BigInt::from(1)]);
        assert_eq!(
            eq.rhs,
            vec![
                (vec![0], ratio(1, 1)),
                (vec![2], ratio(1, 1)),
                (vec![3], ratio(2, 1)),
            ]
        );
        assert_eq!(eq.term_count, 7);
        assert!(eq.ell_group);
        assert_eq!(
            eq.render(),
            "1 + 2^-L[C2] = 1 + 2^-2L[C2] + 2*2^-3L[C2]"
        );
    }

    #[test]
    fn c2_bounds_and_search() {
        let (_, eqs) = c2_system();
        let b = bounds(&eqs[0]);
        assert_eq!(b.per_var, vec![12]);
        assert_eq!(b.t, 7);
        assert!(!b.heuristic);
        let sols = solve(&eqs, &[b], true, 1).unwrap();
        assert_eq!(sols.solutions, vec![vec![1]]);
        assert!(sols.nodes >= 12);
    }

    #[test]
    fn c2_search_without_positivity_matches() {
        let (_, eqs) = c2_system();
        let b = bounds(&eqs[0]);
        let sols = solve(&eqs, &[b], false, 1).unwrap();
        assert_eq!(sols.solutions, vec![vec![1]]);
    }

    #[test]
    fn parallel_search_is_identical() {
        let (_, eqs) = c2_system();
        let b = bounds(&eqs[0]);
        let one = solve(&eqs, std::slice::from_ref(&b), true, 1).unwrap();
        let four = solve(&eqs, &[b], true, 4).unwrap();
        assert_eq!(one.solutions, four.solutions);
        assert_eq!(one.nodes, four.nodes);
    }

    #[test]
    fn variable_guard() {
        let eq = MassEquation {
            prime: 2,
            var_names: (0..9).map(|i| format!("X{i}")).collect(),
            lhs_coeffs: vec![BigInt::from(1); 9],
            rhs: vec![(vec![0; 9], ratio(1, 1))],
            term_count: 1,
            ell_group: true,
        };
        let b = bounds(&eq);
        assert!(matches!(
            solve(&[eq], &[b], true, 1),
            Err(Error::TooManyVariables { vars: 9, limit: 8 })
        ));
    }

    #[test]
    fn c2_weight_recovery() {
        let g = builtin("C2").unwrap();
        let rec = weights_from_forms(&g, &[3], 1, true).unwrap();
        let w = rec.particular.unwrap();
        assert_eq!(w.values(), &[ratio(3, 1)]);
        assert!(rec.kernel.is_empty());
        assert!(matches!(rec.nonnegative, PositivityOutcome::Feasible(_)));

        let rec = weights_from_forms(&g, &[0], 1, true).unwrap();
        assert_eq!(rec.particular.unwrap().values(), &[ratio(0, 1)]);
    }

    #[test]
    fn recovered_weights_hit_targets() {
        let g = builtin("D4").unwrap();
        let formula = tame_formula(&g);
        let rec = weights_from_forms(&g, &[1, 1, 2, 2], 1, true).unwrap();
        let w = rec.particular.unwrap();
        let values = formula.form_values(&w);
        let expect: Vec<Rat> = [1, 1, 2, 2].iter().map(|&x| ratio(x, 1)).collect();
        assert_eq!(values, expect);
        if let PositivityOutcome::Feasible(wpos) = &rec.nonnegative {
            assert!(wpos.is_nonnegative());
            assert_eq!(formula.form_values(wpos), expect);
        } else {
            panic!("expected a nonnegative solution for the D4 targets");
        }
    }

    #[test]
    fn c2_lattice_rank() {
        let g = builtin("C2").unwrap();
        let report = lattice_rank(&g, &[]);
        assert_eq!(report.weight_vars, 1);
        assert_eq!(report.rank, 1);
    }
}
