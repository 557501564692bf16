//! Parameter binding, instantiation and bounded enumeration of instances.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use thiserror::Error;

use super::template::{Distinctness, Template};

/// Largest admissible upper bound for enumeration and search intervals.
pub const MAX_INTERVAL: u64 = 1 << 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("parameter `{0}` is not bound")]
    UnboundParameter(String),
    #[error("template has no parameter `{0}`")]
    UnknownParameter(String),
    #[error("parameter `{0}` must be at least 1")]
    NonPositiveParameter(String),
    #[error("malformed parameter binding `{0}` (expected name=value)")]
    MalformedBinding(String),
    #[error("assignment has {got} values but the template has {expected} variables")]
    Arity { expected: usize, got: usize },
    #[error("variable `{var}` = {value} is below the minimum {min}")]
    BelowMinimum { var: String, value: BigUint, min: u64 },
    #[error("assignment violates the `{0}` distinctness policy")]
    Distinctness(Distinctness),
    #[error("instance value set must be non-empty")]
    EmptyInstance,
    #[error("interval [{lo}, {hi}] is invalid (need 1 <= lo <= hi <= {cap})", cap = MAX_INTERVAL)]
    Interval { lo: u64, hi: u64 },
}

/// Bound parameter values, ordered by name.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Params(BTreeMap<String, u64>);

impl Params {
    pub fn new() -> Params {
        Params::default()
    }

    pub fn with(mut self, name: &str, value: u64) -> Params {
        self.0.insert(name.to_string(), value);
        self
    }

    pub fn insert(&mut self, name: &str, value: u64) {
        self.0.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> Option<u64> {
        self.0.get(name).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Parse one `name=value` binding and add it.
    pub fn bind_str(&mut self, binding: &str) -> Result<(), ModelError> {
        let (k, v) = binding.split_once('=').ok_or_else(|| ModelError::MalformedBinding(binding.into()))?;
        let v: u64 = v.trim().parse().map_err(|_| ModelError::MalformedBinding(binding.into()))?;
        self.insert(k.trim(), v);
        Ok(())
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for Params {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Params, ModelError> {
        let mut p = Params::new();
        for part in s.split(',').filter(|p| !p.trim().is_empty()) {
            p.bind_str(part)?;
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct BoundTerm {
    coeff: BigUint,
    coeff_small: Option<u64>,
    vars: Vec<(usize, u32)>,
}

/// A form with all parameters replaced by their values.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoundForm {
    terms: Vec<BoundTerm>,
}

impl BoundForm {
    pub fn eval(&self, values: &[BigUint]) -> BigUint {
        let mut total = BigUint::default();
        for t in &self.terms {
            let mut term = t.coeff.clone();
            for &(v, e) in &t.vars {
                term *= values[v].pow(e);
            }
            total += term;
        }
        total
    }

    /// Exact value when it does not exceed `cap`, otherwise `None`.
    pub fn eval_capped(&self, values: &[u64], cap: u64) -> Option<u64> {
        let mut total: u64 = 0;
        for t in &self.terms {
            let mut term = t.coeff_small?;
            for &(v, e) in &t.vars {
                for _ in 0..e {
                    term = term.checked_mul(values[v]).filter(|&x| x <= cap)?;
                }
            }
            total = total.checked_add(term).filter(|&x| x <= cap)?;
        }
        (total <= cap).then_some(total)
    }

    fn swapped(&self, i: usize, j: usize) -> Vec<(Vec<(usize, u32)>, BigUint)> {
        let mut terms: Vec<(Vec<(usize, u32)>, BigUint)> = self
            .terms
            .iter()
            .map(|t| {
                let mut vars: Vec<(usize, u32)> = t
                    .vars
                    .iter()
                    .map(|&(v, e)| (if v == i { j } else if v == j { i } else { v }, e))
                    .collect();
                vars.sort_unstable();
                (vars, t.coeff.clone())
            })
            .collect();
        terms.sort();
        terms
    }
}

/// A template together with values for all of its parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundTemplate {
    template: Template,
    params: Params,
    forms: Vec<BoundForm>,
    /// For each variable, the previous variable of its symmetry class.
    symmetric_pred: Vec<Option<usize>>,
}

impl BoundTemplate {
    pub fn new(template: Template, params: &Params) -> Result<BoundTemplate, ModelError> {
        for (name, value) in params.iter() {
            if !template.parameters().iter().any(|p| p == name) {
                return Err(ModelError::UnknownParameter(name.into()));
            }
            if value == 0 {
                return Err(ModelError::NonPositiveParameter(name.into()));
            }
        }
        let mut values = Vec::new();
        for p in template.parameters() {
            values.push(params.get(p).ok_or_else(|| ModelError::UnboundParameter(p.clone()))?);
        }
        let forms: Vec<BoundForm> = template
            .forms()
            .iter()
            .map(|form| {
                let mut merged: BTreeMap<Vec<(usize, u32)>, BigUint> = BTreeMap::new();
                for term in form.terms() {
                    let mut c = term.coeff.clone();
                    for &(p, e) in &term.params {
                        c *= BigUint::from(values[p]).pow(e);
                    }
                    *merged.entry(term.vars.clone()).or_default() += c;
                }
                BoundForm {
                    terms: merged
                        .into_iter()
                        .map(|(vars, coeff)| BoundTerm { coeff_small: coeff.to_u64(), coeff, vars })
                        .collect(),
                }
            })
            .collect();

        let nvars = template.variables().len();
        let canon = |i: usize, j: usize| {
            let mut v: Vec<_> = forms.iter().map(|f| f.swapped(i, j)).collect();
            v.sort();
            v
        };
        let identity = canon(0, 0);
        // Transpositions that fix the form multiset; their closure partitions
        // the variables into classes acted on by the full symmetric group.
        let mut class: Vec<usize> = (0..nvars).collect();
        for i in 0..nvars {
            for j in (i + 1)..nvars {
                if canon(i, j) == identity {
                    let (a, b) = (class[i], class[j]);
                    for c in class.iter_mut() {
                        if *c == b {
                            *c = a;
                        }
                    }
                }
            }
        }
        let symmetric_pred = (0..nvars).map(|j| (0..j).rev().find(|&i| class[i] == class[j])).collect();

        Ok(BoundTemplate { template, params: params.clone(), forms, symmetric_pred })
    }

    pub fn template(&self) -> &Template {
        &self.template
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn forms(&self) -> &[BoundForm] {
        &self.forms
    }

    pub fn arity(&self) -> usize {
        self.template.variables().len()
    }

    /// `name` or `name[n=2]`, used to identify the configuration in reports.
    pub fn id(&self) -> String {
        if self.params.is_empty() {
            self.template.name().to_string()
        } else {
            format!("{}[{}]", self.template.name(), self.params)
        }
    }

    /// Classes of interchangeable variables, as lists of variable indices.
    pub fn symmetry_classes(&self) -> Vec<Vec<usize>> {
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for (j, pred) in self.symmetric_pred.iter().enumerate() {
            match pred {
                Some(p) => classes.iter_mut().find(|c| c.contains(p)).expect("pred class").push(j),
                None => classes.push(vec![j]),
            }
        }
        classes
    }

    /// Evaluate every form at `a` and return the realized value set.
    pub fn instantiate(&self, a: &Assignment) -> Result<InstanceValues, ModelError> {
        a.check(self)?;
        let raw: Vec<BigUint> = self.forms.iter().map(|f| f.eval(&a.values)).collect();
        let n = raw.len();
        let values = InstanceValues::new(raw)?;
        if self.template.distinctness() == Distinctness::Values && values.len() != n {
            return Err(ModelError::Distinctness(Distinctness::Values));
        }
        Ok(values)
    }

    /// All assignments (up to variable symmetry) whose values lie in `[lo, hi]`.
    pub fn enumerate(&self, lo: u64, hi: u64) -> Result<InstanceIter<'_>, ModelError> {
        self.enumerate_with(lo, hi, true)
    }

    pub fn enumerate_with(&self, lo: u64, hi: u64, canonical: bool) -> Result<InstanceIter<'_>, ModelError> {
        if lo == 0 || lo > hi || hi > MAX_INTERVAL {
            return Err(ModelError::Interval { lo, hi });
        }
        Ok(InstanceIter { raw: RawInstances::new(self, lo, hi, canonical) })
    }

    /// Value sets of all instances in `[lo, hi]`, as sorted machine integers.
    pub fn value_sets(&self, lo: u64, hi: u64) -> Result<Vec<Vec<u64>>, ModelError> {
        if lo == 0 || lo > hi || hi > MAX_INTERVAL {
            return Err(ModelError::Interval { lo, hi });
        }
        let mut raw = RawInstances::new(self, lo, hi, true);
        let mut out = Vec::new();
        while let Some(vals) = raw.next_values() {
            out.push(vals);
        }
        Ok(out)
    }
}

/// Values for a template's variables, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    pub values: Vec<BigUint>,
}

impl Assignment {
    pub fn new(values: Vec<BigUint>) -> Assignment {
        Assignment { values }
    }

    pub fn from_u64(values: &[u64]) -> Assignment {
        Assignment { values: values.iter().map(|&v| BigUint::from(v)).collect() }
    }

    fn check(&self, bound: &BoundTemplate) -> Result<(), ModelError> {
        let t = bound.template();
        if self.values.len() != t.variables().len() {
            return Err(ModelError::Arity { expected: t.variables().len(), got: self.values.len() });
        }
        for (v, value) in t.variables().iter().zip(&self.values) {
            if *value < BigUint::from(t.min_value()) {
                return Err(ModelError::BelowMinimum { var: v.clone(), value: value.clone(), min: t.min_value() });
            }
        }
        if t.distinctness() == Distinctness::Variables {
            let mut sorted = self.values.clone();
            sorted.sort();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(ModelError::Distinctness(Distinctness::Variables));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// The realized point set of one instance: sorted, strictly increasing, non-empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InstanceValues {
    values: Vec<BigUint>,
}

impl InstanceValues {
    pub fn new(mut values: Vec<BigUint>) -> Result<InstanceValues, ModelError> {
        if values.is_empty() {
            return Err(ModelError::EmptyInstance);
        }
        values.sort();
        values.dedup();
        Ok(InstanceValues { values })
    }

    pub fn from_u64(values: &[u64]) -> Result<InstanceValues, ModelError> {
        InstanceValues::new(values.iter().map(|&v| BigUint::from(v)).collect())
    }

    pub fn values(&self) -> &[BigUint] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> &BigUint {
        self.values.last().expect("non-empty")
    }

    pub fn to_u64(&self) -> Option<Vec<u64>> {
        self.values.iter().map(|v| v.to_u64()).collect()
    }
}

impl fmt::Display for InstanceValues {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Lexicographic odometer over assignments with monotone pruning.
///
/// Forms are non-decreasing in every variable, so once the least completion
/// of a prefix exceeds `hi`, no larger value at that position can succeed.
struct RawInstances<'a> {
    bound: &'a BoundTemplate,
    lo: u64,
    hi: u64,
    canonical: bool,
    current: Vec<u64>,
    started: bool,
    done: bool,
}

impl<'a> RawInstances<'a> {
    fn new(bound: &'a BoundTemplate, lo: u64, hi: u64, canonical: bool) -> RawInstances<'a> {
        RawInstances { bound, lo, hi, canonical, current: Vec::new(), started: false, done: false }
    }

    fn lower_bound(&self, var: usize) -> u64 {
        let min = self.bound.template.min_value();
        match self.bound.symmetric_pred[var] {
            Some(p) if self.canonical => self.current[p].max(min),
            _ => min,
        }
    }

    fn reset_from(&mut self, level: usize) {
        for v in level..self.current.len() {
            self.current[v] = self.lower_bound(v);
        }
    }

    fn feasible(&self) -> bool {
        self.bound.forms.iter().all(|f| f.eval_capped(&self.current, self.hi).is_some())
    }

    /// Advance to the next feasible vector in lexicographic order.
    fn step(&mut self) -> bool {
        let k = self.bound.arity();
        if !self.started {
            self.started = true;
            self.current = vec![0; k];
            self.reset_from(0);
            if self.feasible() {
                return true;
            }
            // Even the least vector overshoots.
            return false;
        }
        let mut level = k;
        while level > 0 {
            level -= 1;
            self.current[level] += 1;
            self.reset_from(level + 1);
            if self.feasible() {
                return true;
            }
        }
        false
    }

    fn accept(&self) -> Option<Vec<u64>> {
        let mut vals: Vec<u64> = self
            .bound
            .forms
            .iter()
            .map(|f| f.eval_capped(&self.current, self.hi).expect("feasible"))
            .collect();
        if vals.iter().any(|&v| v < self.lo) {
            return None;
        }
        let nforms = vals.len();
        vals.sort_unstable();
        vals.dedup();
        match self.bound.template.distinctness() {
            Distinctness::None => {}
            Distinctness::Variables => {
                let mut vs = self.current.clone();
                vs.sort_unstable();
                if vs.windows(2).any(|w| w[0] == w[1]) {
                    return None;
                }
            }
            Distinctness::Values => {
                if vals.len() != nforms {
                    return None;
                }
            }
        }
        Some(vals)
    }

    fn next_values(&mut self) -> Option<Vec<u64>> {
        self.next_pair().map(|(_, v)| v)
    }

    fn next_pair(&mut self) -> Option<(Vec<u64>, Vec<u64>)> {
        while !self.done {
            if !self.step() {
                self.done = true;
                break;
            }
            if let Some(vals) = self.accept() {
                return Some((self.current.clone(), vals));
            }
        }
        None
    }
}

/// Stream of `(assignment, values)` pairs in lexicographic assignment order.
pub struct InstanceIter<'a> {
    raw: RawInstances<'a>,
}

impl Iterator for InstanceIter<'_> {
    type Item = (Assignment, InstanceValues);

    fn next(&mut self) -> Option<Self::Item> {
        self.raw.next_pair().map(|(a, v)| {
            (Assignment::from_u64(&a), InstanceValues::from_u64(&v).expect("non-empty"))
        })
    }
}

/// Product of a slice of integers; one for the empty slice.
pub fn product<'a>(xs: impl IntoIterator<Item = &'a BigUint>) -> BigUint {
    xs.into_iter().fold(BigUint::one(), |acc, x| acc * x)
}
