//! Two-colorings of integer intervals.
//!
//! A coloring is either an explicit bit vector over `[lo, hi]` or a pure
//! rule evaluated on demand. Rules may span astronomically large domains,
//! which the thick-class procedures rely on, so queries take `BigUint`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use super::instance::InstanceValues;
use crate::bits::BitSet;

/// Class label, always 0 or 1.
pub type Color = u8;

/// Largest explicit coloring that can be materialized.
pub const MAX_EXPLICIT_LEN: u64 = 1 << 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColoringError {
    #[error("{value} is outside the coloring domain [{lo}, {hi}]")]
    OutOfDomain { value: BigUint, lo: BigUint, hi: BigUint },
    #[error("malformed coloring file: {0}")]
    Malformed(String),
    #[error("unknown coloring rule `{0}`")]
    UnknownRule(String),
    #[error("invalid rule parameter: {0}")]
    BadParameter(String),
}

/// Pure rule colorings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    /// Every integer gets `color`.
    Constant { color: Color },
    /// 0 below `t`, 1 from `t` on.
    Threshold { t: BigUint },
    /// Even integers get 0, odd ones 1.
    Parity,
    /// Pseudo-random: 1 with probability `per_mille / 1000`.
    Random { per_mille: u32, seed: u64 },
    /// Geometric blocks. With `e = floor(log_base v)`, `v` is on-block when
    /// `e >= skip` and `(e - skip) mod (width + gap) < width`. On-block
    /// integers get `on`; off-block integers get `1 - on` except for a
    /// pseudo-random `noise / 1000` fraction that also gets `on`.
    Blocks { base: u64, width: u64, gap: u64, skip: u64, on: Color, noise: u32, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Kind {
    Explicit(BitSet),
    Rule(Rule),
    Overlay { base: Box<Coloring>, overrides: BTreeMap<BigUint, Color> },
}

/// A 2-coloring of the integer interval `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    lo: BigUint,
    hi: BigUint,
    kind: Kind,
}

/// Outcome of asking whether `{a, 2a, ..., p·a}` lies inside one class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Containment {
    Yes,
    /// A multiple that is out of the class or out of the domain.
    No(BigUint),
    /// The dilation is too long to scan and the coloring gives no structural
    /// guarantee for it.
    Unknown,
}

/// Dilations with at most this many multiples are checked one by one.
pub const EXACT_DILATION_LIMIT: u64 = 1 << 12;

impl Coloring {
    pub fn explicit(lo: u64, colors: &[Color]) -> Result<Coloring, ColoringError> {
        if lo == 0 || colors.is_empty() {
            return Err(ColoringError::Malformed("explicit colorings need lo >= 1 and at least one value".into()));
        }
        let mut bits = BitSet::new(colors.len());
        for (i, &c) in colors.iter().enumerate() {
            if c > 1 {
                return Err(ColoringError::Malformed(format!("color {c} is not 0 or 1")));
            }
            bits.set(i, c == 1);
        }
        let hi = lo + colors.len() as u64 - 1;
        Ok(Coloring { lo: lo.into(), hi: hi.into(), kind: Kind::Explicit(bits) })
    }

    /// Explicit coloring from a `0`/`1` string starting at `lo`.
    pub fn from_bits_str(lo: u64, bits: &str) -> Result<Coloring, ColoringError> {
        let colors: Result<Vec<Color>, _> = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(ColoringError::Malformed(format!("unexpected character `{other}`"))),
            })
            .collect();
        Coloring::explicit(lo, &colors?)
    }

    pub fn rule(rule: Rule, lo: BigUint, hi: BigUint) -> Result<Coloring, ColoringError> {
        if lo.is_zero() || lo > hi {
            return Err(ColoringError::BadParameter("rule domain needs 1 <= lo <= hi".into()));
        }
        if let Rule::Blocks { base, width, .. } = &rule {
            if *base < 2 || *width == 0 {
                return Err(ColoringError::BadParameter("blocks needs L >= 2 and w >= 1".into()));
            }
        }
        Ok(Coloring { lo, hi, kind: Kind::Rule(rule) })
    }

    /// `base` with some values recolored.
    pub fn with_overrides(base: Coloring, overrides: BTreeMap<BigUint, Color>) -> Coloring {
        let (lo, hi) = (base.lo.clone(), base.hi.clone());
        let overrides = overrides.into_iter().filter(|(v, _)| *v >= lo && *v <= hi).collect();
        Coloring { lo, hi, kind: Kind::Overlay { base: Box::new(base), overrides } }
    }

    pub fn lo(&self) -> &BigUint {
        &self.lo
    }

    pub fn hi(&self) -> &BigUint {
        &self.hi
    }

    pub fn contains(&self, v: &BigUint) -> bool {
        *v >= self.lo && *v <= self.hi
    }

    pub fn is_explicit(&self) -> bool {
        matches!(self.kind, Kind::Explicit(_))
    }

    pub fn rule_ref(&self) -> Option<&Rule> {
        match &self.kind {
            Kind::Rule(r) => Some(r),
            _ => None,
        }
    }

    pub fn overrides(&self) -> Option<&BTreeMap<BigUint, Color>> {
        match &self.kind {
            Kind::Overlay { overrides, .. } => Some(overrides),
            _ => None,
        }
    }

    fn out_of_domain(&self, v: &BigUint) -> ColoringError {
        ColoringError::OutOfDomain { value: v.clone(), lo: self.lo.clone(), hi: self.hi.clone() }
    }

    pub fn color_of(&self, v: &BigUint) -> Result<Color, ColoringError> {
        if !self.contains(v) {
            return Err(self.out_of_domain(v));
        }
        Ok(self.color_unchecked(v))
    }

    pub fn color_of_u64(&self, v: u64) -> Result<Color, ColoringError> {
        if let Kind::Explicit(bits) = &self.kind {
            let lo = self.lo.to_u64().expect("explicit bounds fit u64");
            let hi = self.hi.to_u64().expect("explicit bounds fit u64");
            if v < lo || v > hi {
                return Err(self.out_of_domain(&v.into()));
            }
            return Ok(bits.get((v - lo) as usize) as Color);
        }
        self.color_of(&BigUint::from(v))
    }

    fn color_unchecked(&self, v: &BigUint) -> Color {
        match &self.kind {
            Kind::Explicit(bits) => {
                let idx = (v - &self.lo).to_usize().expect("explicit index");
                bits.get(idx) as Color
            }
            Kind::Rule(rule) => rule.color(v),
            Kind::Overlay { base, overrides } => match overrides.get(v) {
                Some(&c) => c,
                None => base.color_unchecked(v),
            },
        }
    }

    /// `Some(c)` iff every value has color `c`.
    pub fn monochromatic_color(&self, values: &InstanceValues) -> Result<Option<Color>, ColoringError> {
        let mut seen: Option<Color> = None;
        let mut mixed = false;
        for v in values.values() {
            let c = self.color_of(v)?;
            match seen {
                None => seen = Some(c),
                Some(s) if s != c => mixed = true,
                _ => {}
            }
        }
        Ok(if mixed { None } else { seen })
    }

    /// The explicit colors over `[lo, hi]`, if this coloring is explicit.
    pub fn to_colors(&self) -> Option<Vec<Color>> {
        match &self.kind {
            Kind::Explicit(bits) => Some((0..bits.len()).map(|i| bits.get(i) as Color).collect()),
            _ => None,
        }
    }

    /// Line 1 `lo hi`, line 2 the colors as a `0`/`1` string.
    pub fn to_file_string(&self) -> Option<String> {
        let colors = self.to_colors()?;
        let bits: String = colors.iter().map(|&c| if c == 1 { '1' } else { '0' }).collect();
        Some(format!("{} {}\n{}\n", self.lo, self.hi, bits))
    }

    pub fn parse_file(text: &str) -> Result<Coloring, ColoringError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| ColoringError::Malformed("empty file".into()))?;
        let mut parts = header.split_whitespace();
        let parse = |s: Option<&str>| -> Result<u64, ColoringError> {
            s.and_then(|s| s.parse().ok()).ok_or_else(|| ColoringError::Malformed("header must be `lo hi`".into()))
        };
        let lo = parse(parts.next())?;
        let hi = parse(parts.next())?;
        if parts.next().is_some() || lo == 0 || lo > hi {
            return Err(ColoringError::Malformed("header must be `lo hi` with 1 <= lo <= hi".into()));
        }
        let bits = lines.next().ok_or_else(|| ColoringError::Malformed("missing color line".into()))?.trim();
        if lines.next().is_some() {
            return Err(ColoringError::Malformed("trailing content".into()));
        }
        if bits.len() as u64 != hi - lo + 1 {
            return Err(ColoringError::Malformed(format!("expected {} colors, found {}", hi - lo + 1, bits.len())));
        }
        Coloring::from_bits_str(lo, bits)
    }

    /// Maximal run around `v` that is known, without scanning, to carry a
    /// single color. Returned bounds are clipped to the domain.
    pub fn run_at(&self, v: &BigUint) -> Option<(BigUint, BigUint, Color)> {
        if !self.contains(v) {
            return None;
        }
        match &self.kind {
            Kind::Explicit(_) => None,
            Kind::Rule(rule) => {
                let (s, e, c) = rule.run_at(v)?;
                Some((s.max(self.lo.clone()), e.map_or(self.hi.clone(), |e| e.min(self.hi.clone())), c))
            }
            Kind::Overlay { base, overrides } => {
                let (s, e, c) = base.run_at(v)?;
                // Shrink the run to the stretch around `v` without overrides
                // of the other color.
                let below = overrides.range(s.clone()..=v.clone()).rev().find(|(_, &oc)| oc != c);
                let above = overrides.range(v.clone()..=e.clone()).find(|(_, &oc)| oc != c);
                if below.map(|(k, _)| k == v).unwrap_or(false) {
                    return None;
                }
                let s = below.map_or(s, |(k, _)| k + 1u32);
                let e = above.map_or(e, |(k, _)| k - 1u32);
                Some((s, e, c))
            }
        }
    }

    /// Least structurally uniform run of color `class` ending at or after `v`,
    /// returned as `(max(start, v), end)`.
    pub fn next_run_of(&self, v: &BigUint, class: Color) -> Option<(BigUint, BigUint)> {
        let from = v.max(&self.lo).clone();
        if from > self.hi {
            return None;
        }
        let (s, e) = match &self.kind {
            Kind::Explicit(_) => return None,
            Kind::Rule(rule) => rule.next_run_of(&from, class)?,
            Kind::Overlay { base, overrides } => {
                let mut from = from.clone();
                loop {
                    let (s, e) = base.next_run_of(&from, class)?;
                    match overrides.range(s.clone()..=e.clone()).find(|(_, &oc)| oc != class) {
                        None => break (s, Some(e)),
                        Some((k, _)) if *k > s => break (s, Some(k - 1u32)),
                        Some((k, _)) => from = k + 1u32,
                    }
                }
            }
        };
        let e = e.map_or(self.hi.clone(), |e| e.min(self.hi.clone()));
        let s = s.max(from);
        (s <= e).then_some((s, e))
    }

    /// Is `{a, 2a, ..., p·a}` contained in class `class` (and the domain)?
    ///
    /// Short dilations are scanned; long ones need a structural guarantee
    /// from the coloring, otherwise the answer is `Unknown`.
    pub fn dilation_contained(&self, a: &BigUint, p: &BigUint, class: Color) -> Containment {
        if a.is_zero() || p.is_zero() {
            return Containment::Yes;
        }
        if *a < self.lo {
            return Containment::No(a.clone());
        }
        let top = a * p;
        if top > self.hi {
            return Containment::No(top);
        }
        let scan = p <= &BigUint::from(EXACT_DILATION_LIMIT) || self.is_explicit();
        if scan {
            let mut m = a.clone();
            let mut t = BigUint::one();
            while &t <= p {
                if self.color_unchecked(&m) != class {
                    return Containment::No(m);
                }
                m += a;
                t += 1u32;
            }
            return Containment::Yes;
        }
        match &self.kind {
            Kind::Explicit(_) => unreachable!("explicit colorings are scanned"),
            Kind::Rule(rule) => match rule.uniform_color(a, &top) {
                Some(c) if c == class => Containment::Yes,
                Some(_) => Containment::No(a.clone()),
                None if rule.color(a) != class => Containment::No(a.clone()),
                None => Containment::Unknown,
            },
            Kind::Overlay { base, overrides } => {
                for (v, &c) in overrides.range(a.clone()..=top.clone()) {
                    let (q, r) = v.div_rem(a);
                    if r.is_zero() && q <= *p && c != class {
                        return Containment::No(v.clone());
                    }
                }
                match base.dilation_contained(a, p, class) {
                    Containment::No(v) if overrides.get(&v) == Some(&class) => Containment::Unknown,
                    other => other,
                }
            }
        }
    }
}

impl fmt::Display for Coloring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Explicit(bits) => write!(f, "explicit[{}..{}; {} ones]", self.lo, self.hi, bits.count_ones()),
            Kind::Rule(rule) => write!(f, "rule:{}", RuleSpec { rule: rule.clone(), lo: self.lo.clone(), hi: self.hi.clone() }.params_string()),
            Kind::Overlay { base, overrides } => write!(f, "{base}+{} overrides", overrides.len()),
        }
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Deterministic hash of an integer, stable across platforms and releases.
pub fn stable_hash(seed: u64, v: &BigUint) -> u64 {
    let digits = v.to_u64_digits();
    let mut h = splitmix(seed ^ (digits.len() as u64).wrapping_mul(0xA24B_AED4_963E_E407));
    for d in digits {
        h = splitmix(h ^ d);
    }
    h
}

/// `floor(log_base v)` for `v >= 1`.
fn ilog(base: u64, v: &BigUint) -> u64 {
    let b = BigUint::from(base);
    let bits = v.bits().saturating_sub(1) as f64;
    let mut e = (bits / (base as f64).log2()).floor() as u64;
    e = e.saturating_sub(1);
    let mut p = b.pow(e as u32);
    while &p * &b <= *v {
        p *= &b;
        e += 1;
    }
    while p > *v && e > 0 {
        e -= 1;
        p = b.pow(e as u32);
    }
    e
}

impl Rule {
    pub fn color(&self, v: &BigUint) -> Color {
        match self {
            Rule::Constant { color } => *color,
            Rule::Threshold { t } => (v >= t) as Color,
            Rule::Parity => v.is_odd() as Color,
            Rule::Random { per_mille, seed } => (stable_hash(*seed, v) % 1000 < *per_mille as u64) as Color,
            Rule::Blocks { base, on, noise, seed, .. } => {
                if self.on_block(ilog(*base, v)) || stable_hash(*seed, v) % 1000 < *noise as u64 {
                    *on
                } else {
                    1 - *on
                }
            }
        }
    }

    fn on_block(&self, e: u64) -> bool {
        match self {
            Rule::Blocks { width, gap, skip, .. } => e >= *skip && (e - skip) % (width + gap) < *width,
            _ => false,
        }
    }

    /// For `Blocks`: the maximal run of exponents around `e` sharing its
    /// on/off status, as `(first, last)`; `last` is `None` when unbounded.
    fn exponent_run(&self, e: u64) -> (u64, Option<u64>) {
        let Rule::Blocks { width, gap, skip, .. } = self else { unreachable!() };
        if e < *skip {
            return (0, Some(skip - 1));
        }
        if *gap == 0 {
            return (*skip, None);
        }
        let period = width + gap;
        let start = e - (e - skip) % period;
        if e - start < *width {
            (start, Some(start + width - 1))
        } else {
            (start + width, Some(start + period - 1))
        }
    }

    /// `[base^first, base^(last+1) - 1]`.
    fn exponent_bounds(base: u64, first: u64, last: Option<u64>) -> (BigUint, Option<BigUint>) {
        let b = BigUint::from(base);
        let end = last.map(|l| b.pow((l + 1) as u32) - 1u32);
        (b.pow(first as u32), end)
    }

    fn run_at(&self, v: &BigUint) -> Option<(BigUint, Option<BigUint>, Color)> {
        match self {
            Rule::Constant { color } => Some((BigUint::one(), None, *color)),
            Rule::Threshold { t } => {
                if v < t {
                    Some((BigUint::one(), Some(t - 1u32), 0))
                } else {
                    Some((t.clone(), None, 1))
                }
            }
            Rule::Parity | Rule::Random { .. } => Some((v.clone(), Some(v.clone()), self.color(v))),
            Rule::Blocks { base, on, noise, .. } => {
                let e = ilog(*base, v);
                let on_block = self.on_block(e);
                if !on_block && *noise > 0 {
                    return Some((v.clone(), Some(v.clone()), self.color(v)));
                }
                let (first, last) = self.exponent_run(e);
                let (start, end) = Rule::exponent_bounds(*base, first, last);
                Some((start, end, if on_block { *on } else { 1 - *on }))
            }
        }
    }

    fn next_run_of(&self, v: &BigUint, class: Color) -> Option<(BigUint, Option<BigUint>)> {
        match self {
            Rule::Constant { color } => (*color == class).then(|| (v.clone(), None)),
            Rule::Threshold { t } => {
                if class == 1 {
                    Some((v.max(t).clone(), None))
                } else {
                    (v < t).then(|| (v.clone(), Some(t - 1u32)))
                }
            }
            Rule::Parity | Rule::Random { .. } => None,
            Rule::Blocks { base, on, noise, .. } => {
                let want_on = class == *on;
                if !want_on && *noise > 0 {
                    return None;
                }
                let mut e = ilog(*base, v);
                // Two run hops reach the next run of either status.
                for _ in 0..3 {
                    let (first, last) = self.exponent_run(e);
                    if self.on_block(e) == want_on {
                        let (start, end) = Rule::exponent_bounds(*base, first, last);
                        return Some((start.max(v.clone()), end));
                    }
                    e = last? + 1;
                }
                None
            }
        }
    }

    /// `Some(c)` if every integer in `[lo, hi]` is known to have color `c`.
    pub fn uniform_color(&self, lo: &BigUint, hi: &BigUint) -> Option<Color> {
        if lo == hi {
            return Some(self.color(lo));
        }
        let (_, end, c) = self.run_at(lo)?;
        match end {
            None => Some(c),
            Some(e) if e >= *hi => Some(c),
            Some(_) => None,
        }
    }
}

/// A rule together with its domain, as written on the command line:
/// `<name>:<k=v,...>` (the `rule:` prefix is optional).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSpec {
    pub rule: Rule,
    pub lo: BigUint,
    pub hi: BigUint,
}

/// Default upper end of a rule coloring's domain: `2^2048`.
pub fn default_rule_hi() -> BigUint {
    BigUint::one() << 2048u32
}

/// Parse `123`, `10^9` or `2^64`.
pub fn parse_big(s: &str) -> Option<BigUint> {
    let s = s.trim();
    if let Some((b, e)) = s.split_once('^') {
        let b: BigUint = b.trim().parse().ok()?;
        let e: u32 = e.trim().parse().ok()?;
        Some(b.pow(e))
    } else {
        s.parse().ok()
    }
}

impl RuleSpec {
    pub fn into_coloring(self) -> Result<Coloring, ColoringError> {
        Coloring::rule(self.rule, self.lo, self.hi)
    }

    fn params_string(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        let name = match &self.rule {
            Rule::Constant { color } => {
                parts.push(format!("c={color}"));
                "const"
            }
            Rule::Threshold { t } => {
                parts.push(format!("t={t}"));
                "threshold"
            }
            Rule::Parity => "parity",
            Rule::Random { per_mille, seed } => {
                parts.push(format!("p={per_mille}"));
                parts.push(format!("seed={seed}"));
                "random"
            }
            Rule::Blocks { base, width, gap, skip, on, noise, seed } => {
                parts.push(format!("L={base}"));
                parts.push(format!("w={width}"));
                parts.push(format!("g={gap}"));
                parts.push(format!("skip={skip}"));
                parts.push(format!("on={on}"));
                parts.push(format!("noise={noise}"));
                parts.push(format!("seed={seed}"));
                "blocks"
            }
        };
        if !self.lo.is_one() {
            parts.push(format!("lo={}", self.lo));
        }
        if self.hi != default_rule_hi() {
            parts.push(format!("hi={}", self.hi));
        }
        if parts.is_empty() {
            name.to_string()
        } else {
            format!("{name}:{}", parts.join(","))
        }
    }
}

impl fmt::Display for RuleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule:{}", self.params_string())
    }
}

impl FromStr for RuleSpec {
    type Err = ColoringError;

    fn from_str(s: &str) -> Result<RuleSpec, ColoringError> {
        let s = s.strip_prefix("rule:").unwrap_or(s);
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let mut kv: BTreeMap<String, String> = BTreeMap::new();
        for part in args.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| ColoringError::BadParameter(format!("`{part}` is not key=value")))?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        let mut take = |key: &str| kv.remove(key);
        let big = |key: &str, v: Option<String>| -> Result<Option<BigUint>, ColoringError> {
            v.map(|v| parse_big(&v).ok_or_else(|| ColoringError::BadParameter(format!("{key}={v}")))).transpose()
        };
        let num = |key: &str, v: Option<String>, default: u64| -> Result<u64, ColoringError> {
            match v {
                None => Ok(default),
                Some(v) => v.parse().map_err(|_| ColoringError::BadParameter(format!("{key}={v}"))),
            }
        };
        let color = |key: &str, v: Option<String>, default: u64| -> Result<Color, ColoringError> {
            match num(key, v, default)? {
                c @ 0..=1 => Ok(c as Color),
                c => Err(ColoringError::BadParameter(format!("{key}={c} is not a color"))),
            }
        };
        let lo = big("lo", take("lo"))?.unwrap_or_else(BigUint::one);
        let hi = big("hi", take("hi"))?.unwrap_or_else(default_rule_hi);
        let rule = match name {
            "const" | "constant" => Rule::Constant { color: color("c", take("c"), 0)? },
            "threshold" => Rule::Threshold {
                t: big("t", take("t"))?.ok_or_else(|| ColoringError::BadParameter("threshold needs t".into()))?,
            },
            "parity" => Rule::Parity,
            "random" => Rule::Random {
                per_mille: num("p", take("p"), 500)?.min(1000) as u32,
                seed: num("seed", take("seed"), 0)?,
            },
            "blocks" => {
                let base = num("L", take("L"), 16)?;
                let width = num("w", take("w"), 1)?;
                Rule::Blocks {
                    base,
                    width,
                    gap: num("g", take("g"), width)?,
                    skip: num("skip", take("skip"), 0)?,
                    on: color("on", take("on"), 0)?,
                    noise: num("noise", take("noise"), 0)?.min(1000) as u32,
                    seed: num("seed", take("seed"), 0)?,
                }
            }
            other => return Err(ColoringError::UnknownRule(other.to_string())),
        };
        if let Some(k) = kv.keys().next() {
            return Err(ColoringError::BadParameter(format!("unknown parameter `{k}` for rule `{name}`")));
        }
        Ok(RuleSpec { rule, lo, hi })
    }
}
