use std::fmt;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::model::{Color, Coloring};

/// Largest F-bound accepted by the syndeticity detector.
pub const MAX_SYNDETIC_FBOUND: u64 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassifyParams {
    pub fbound: u64,
    pub min_runs: usize,
    /// Range scanned for dilation centres `a` and covered integers `m`.
    pub window: (u64, u64),
}

impl Default for ClassifyParams {
    fn default() -> ClassifyParams {
        ClassifyParams { fbound: 8, min_runs: 3, window: (1, 100_000) }
    }
}

impl fmt::Display for ClassifyParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "fbound={} min-runs={} window=[{},{}]", self.fbound, self.min_runs, self.window.0, self.window.1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThickEvidence {
    pub class: Color,
    pub thick: bool,
    /// The first `min_runs` centres `a` with `[1, fbound]·a` in the class.
    pub centres: Vec<u64>,
    /// Number of valid centres in the window.
    pub valid: u64,
    pub scanned: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyndeticEvidence {
    pub class: Color,
    pub syndetic: bool,
    /// Least covering set, ordered by size then lexicographically.
    pub cover: Option<Vec<u64>>,
    /// An integer with no `s <= fbound` sending it into the class.
    pub uncovered: Option<u64>,
    pub scanned: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    ThickClass(Color),
    LocallyBalanced,
    Inconclusive,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::ThickClass(c) => write!(f, "thick-class-{c}"),
            Label::LocallyBalanced => f.write_str("locally-balanced"),
            Label::Inconclusive => f.write_str("inconclusive"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub label: Label,
    pub params: ClassifyParams,
    pub thick: [ThickEvidence; 2],
    pub syndetic: [SyndeticEvidence; 2],
}

impl Classification {
    pub fn render(&self) -> String {
        let mut out = format!("label: {}\nparams: {}\n", self.label, self.params);
        for t in &self.thick {
            let centres: Vec<String> = t.centres.iter().map(|a| a.to_string()).collect();
            out.push_str(&format!(
                "thick: class={} result={} valid={} scanned={} centres={}\n",
                t.class,
                t.thick,
                t.valid,
                t.scanned,
                if centres.is_empty() { "none".into() } else { centres.join(",") }
            ));
        }
        for s in &self.syndetic {
            let cover = s.cover.as_ref().map_or("none".to_string(), |c| {
                let parts: Vec<String> = c.iter().map(|v| v.to_string()).collect();
                format!("{{{}}}", parts.join(","))
            });
            let uncovered = s.uncovered.map_or("none".to_string(), |m| m.to_string());
            out.push_str(&format!(
                "syndetic: class={} result={} cover={cover} uncovered={uncovered} scanned={}\n",
                s.class, s.syndetic, s.scanned
            ));
        }
        out
    }
}

fn in_class(c: &Coloring, v: &BigUint, class: Color) -> bool {
    matches!(c.color_of(v), Ok(col) if col == class)
}

/// Clip `window` to the coloring's domain.
fn clip(c: &Coloring, window: (u64, u64)) -> Option<(u64, u64)> {
    let lo = c.lo().to_u64()?.max(window.0);
    let hi = c.hi().to_u64().map_or(window.1, |h| h.min(window.1));
    (lo <= hi).then_some((lo, hi))
}

/// Whether at least `min_runs` centres `a` in `window` have `[1, fbound]·a`
/// inside the class and the domain.
///
/// Checking `[1, fbound]` covers every `[1, f]` with `f <= fbound`.
pub fn is_thick(c: &Coloring, class: Color, fbound: u64, min_runs: usize, window: (u64, u64)) -> ThickEvidence {
    let fbound = fbound.max(1);
    let mut ev = ThickEvidence { class, thick: false, centres: Vec::new(), valid: 0, scanned: 0 };
    if let Some((lo, hi)) = clip(c, window) {
        for a in lo..=hi {
            ev.scanned += 1;
            let a = BigUint::from(a);
            if (1..=fbound).all(|f| in_class(c, &(&a * f), class)) {
                ev.valid += 1;
                if ev.centres.len() < min_runs {
                    ev.centres.push(a.to_u64().expect("window is u64"));
                }
            }
        }
    }
    ev.thick = ev.centres.len() >= min_runs.max(1);
    ev
}

/// Whether some `F ⊆ [1, fbound]` sends every `m` in `window` into the
/// class, i.e. `m·s` lies in the class for some `s ∈ F`.
pub fn is_syndetic(c: &Coloring, class: Color, fbound: u64, window: (u64, u64)) -> SyndeticEvidence {
    let fbound = fbound.clamp(1, MAX_SYNDETIC_FBOUND);
    let mut ev = SyndeticEvidence { class, syndetic: false, cover: None, uncovered: None, scanned: 0 };
    let Some((lo, hi)) = clip(c, window) else {
        return ev;
    };
    // Bit s-1 of a mask: m·s lies in the class.
    let mut masks: Vec<u32> = Vec::new();
    for m in lo..=hi {
        ev.scanned += 1;
        let m = BigUint::from(m);
        let mut mask = 0u32;
        for s in 1..=fbound {
            if in_class(c, &(&m * s), class) {
                mask |= 1 << (s - 1);
            }
        }
        if mask == 0 {
            ev.uncovered = m.to_u64();
            return ev;
        }
        masks.push(mask);
    }
    masks.sort_unstable();
    masks.dedup();
    let mut subsets: Vec<u32> = (1..1u32 << fbound).collect();
    subsets.sort_by_key(|&f| {
        let elems: Vec<u32> = (0..fbound as u32).filter(|i| f >> i & 1 == 1).collect();
        (f.count_ones(), elems)
    });
    if let Some(f) = subsets.into_iter().find(|&f| masks.iter().all(|&m| m & f != 0)) {
        ev.syndetic = true;
        ev.cover = Some((0..fbound).filter(|i| f >> i & 1 == 1).map(|i| i + 1).collect());
    }
    ev
}

/// Label the coloring from thickness and syndeticity of both classes.
///
/// When both classes are thick the class with more valid centres wins,
/// class 0 on a tie.
pub fn classify(c: &Coloring, params: &ClassifyParams) -> Classification {
    let thick = [0, 1].map(|k| is_thick(c, k, params.fbound, params.min_runs, params.window));
    let syndetic = [0, 1].map(|k| is_syndetic(c, k, params.fbound, params.window));
    let label = match (thick[0].thick, thick[1].thick) {
        (true, false) => Label::ThickClass(0),
        (false, true) => Label::ThickClass(1),
        (true, true) => Label::ThickClass((thick[1].valid > thick[0].valid) as Color),
        (false, false) if syndetic[0].syndetic && syndetic[1].syndetic => Label::LocallyBalanced,
        (false, false) => Label::Inconclusive,
    };
    Classification { label, params: *params, thick, syndetic }
}
