//! Chronological backtracking over colorings with unit propagation.
//!
//! Every value set yields two constraints, "not all 0" and "not all 1".
//! Each constraint keeps two watched members that do not yet carry the
//! forbidden color. Integers are decided in increasing order, color 0
//! first, so the first complete assignment reached is the
//! lexicographically least avoiding coloring.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Instant;

use super::index::InstanceIndex;

const UNSET: u8 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Stop {
    Nodes,
    Time,
    Cancelled,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Outcome {
    Sat(Vec<u8>),
    Unsat,
    Stopped(Stop),
}

/// Limits shared by every solver of one search.
pub(crate) struct Limits<'a> {
    pub max_nodes: u64,
    pub deadline: Option<Instant>,
    pub nodes: &'a AtomicU64,
    pub cancel: &'a AtomicBool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub(crate) struct Stats {
    pub nodes: u64,
    pub propagations: u64,
}

struct Frame {
    var: u32,
    trail_start: usize,
    flipped: bool,
}

pub(crate) struct Solver<'a> {
    sets: &'a [Vec<u32>],
    assign: Vec<u8>,
    /// `watches[c][v]`: constraints "not all `c`" currently watching `v`.
    watches: [Vec<Vec<u32>>; 2],
    /// Positions (within the set) of the two watched members, per polarity.
    watched: [Vec<[u32; 2]>; 2],
    trail: Vec<u32>,
    head: usize,
    frames: Vec<Frame>,
    pub stats: Stats,
}

impl<'a> Solver<'a> {
    pub fn new(index: &'a InstanceIndex) -> Solver<'a> {
        let width = index.width();
        let sets = index.sets();
        let mut watches: [Vec<Vec<u32>>; 2] = [vec![Vec::new(); width], vec![Vec::new(); width]];
        let mut watched: [Vec<[u32; 2]>; 2] = [Vec::with_capacity(sets.len()), Vec::with_capacity(sets.len())];
        for (id, set) in sets.iter().enumerate() {
            debug_assert!(set.len() >= 2, "singletons are handled before search");
            for c in 0..2 {
                watches[c][set[0] as usize].push(id as u32);
                watches[c][set[1] as usize].push(id as u32);
                watched[c].push([0, 1]);
            }
        }
        Solver {
            sets,
            assign: vec![UNSET; width],
            watches,
            watched,
            trail: Vec::with_capacity(width),
            head: 0,
            frames: Vec::new(),
            stats: Stats::default(),
        }
    }

    fn enqueue(&mut self, var: u32, color: u8) {
        self.assign[var as usize] = color;
        self.trail.push(var);
    }

    /// Assign `var` at the root; `false` when it contradicts what is there.
    pub fn assume(&mut self, var: u32, color: u8) -> bool {
        match self.assign[var as usize] {
            UNSET => {
                self.enqueue(var, color);
                self.propagate()
            }
            c => c == color,
        }
    }

    /// Process the queue to fixpoint; `false` on conflict.
    fn propagate(&mut self) -> bool {
        while self.head < self.trail.len() {
            let var = self.trail[self.head];
            self.head += 1;
            let c = self.assign[var as usize] as usize;
            let mut list = std::mem::take(&mut self.watches[c][var as usize]);
            let mut conflict = false;
            let mut i = 0;
            while i < list.len() {
                let id = list[i] as usize;
                let set = &self.sets[id];
                let w = &mut self.watched[c][id];
                let (mine, other) = if set[w[0] as usize] == var { (0, 1) } else { (1, 0) };
                let other_var = set[w[other] as usize];
                // Look for a replacement member that is not colored `c`.
                let replacement = (0..set.len() as u32)
                    .find(|&p| p != w[0] && p != w[1] && self.assign[set[p as usize] as usize] != c as u8);
                if let Some(p) = replacement {
                    w[mine] = p;
                    let nv = set[p as usize] as usize;
                    self.watches[c][nv].push(id as u32);
                    list.swap_remove(i);
                    continue;
                }
                match self.assign[other_var as usize] {
                    UNSET => {
                        self.assign[other_var as usize] = 1 - c as u8;
                        self.trail.push(other_var);
                        self.stats.propagations += 1;
                    }
                    oc if oc as usize == c => {
                        conflict = true;
                        break;
                    }
                    _ => {}
                }
                i += 1;
            }
            self.watches[c][var as usize] = list;
            if conflict {
                return false;
            }
        }
        true
    }

    fn undo_to(&mut self, len: usize) {
        while self.trail.len() > len {
            let v = self.trail.pop().expect("trail");
            self.assign[v as usize] = UNSET;
        }
        self.head = len;
    }

    fn next_unassigned(&self, from: usize) -> Option<u32> {
        (from..self.assign.len()).find(|&v| self.assign[v] == UNSET).map(|v| v as u32)
    }

    fn check_limits(&self, limits: &Limits<'_>) -> Option<Stop> {
        if limits.cancel.load(Ordering::Relaxed) {
            return Some(Stop::Cancelled);
        }
        if limits.nodes.load(Ordering::Relaxed) >= limits.max_nodes {
            return Some(Stop::Nodes);
        }
        if let Some(d) = limits.deadline {
            if self.stats.nodes.is_multiple_of(1024) && Instant::now() >= d {
                return Some(Stop::Time);
            }
        }
        None
    }

    /// Search below the current root assignment.
    pub fn solve(&mut self, limits: &Limits<'_>) -> Outcome {
        let mut root_ok = self.propagate();
        let mut from = 0usize;
        loop {
            if !root_ok {
                // Backtrack to the deepest decision with an untried branch.
                loop {
                    let Some(frame) = self.frames.pop() else { return Outcome::Unsat };
                    self.undo_to(frame.trail_start);
                    if !frame.flipped {
                        if let Some(stop) = self.count_node(limits) {
                            return Outcome::Stopped(stop);
                        }
                        self.frames.push(Frame { var: frame.var, trail_start: frame.trail_start, flipped: true });
                        self.enqueue(frame.var, 1);
                        from = frame.var as usize + 1;
                        break;
                    }
                }
                root_ok = self.propagate();
                continue;
            }
            let Some(var) = self.next_unassigned(from) else {
                return Outcome::Sat(self.assign.clone());
            };
            if let Some(stop) = self.count_node(limits) {
                return Outcome::Stopped(stop);
            }
            self.frames.push(Frame { var, trail_start: self.trail.len(), flipped: false });
            self.enqueue(var, 0);
            from = var as usize + 1;
            root_ok = self.propagate();
        }
    }

    fn count_node(&mut self, limits: &Limits<'_>) -> Option<Stop> {
        self.stats.nodes += 1;
        limits.nodes.fetch_add(1, Ordering::Relaxed);
        self.check_limits(limits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BoundTemplate, Params, Template};

    fn index(src: &str, lo: u64, hi: u64) -> InstanceIndex {
        let t = BoundTemplate::new(Template::parse(src).unwrap(), &Params::new()).unwrap();
        InstanceIndex::build(&t, lo, hi).unwrap()
    }

    fn run(idx: &InstanceIndex) -> Outcome {
        let nodes = AtomicU64::new(0);
        let cancel = AtomicBool::new(false);
        let limits = Limits { max_nodes: u64::MAX, deadline: None, nodes: &nodes, cancel: &cancel };
        let mut s = Solver::new(idx);
        if !s.assume(0, 0) {
            return Outcome::Unsat;
        }
        s.solve(&limits)
    }

    const SCHUR: &str = "template schur\nvars x y\nforms x; y; x+y\n";

    #[test]
    fn schur_four_and_five() {
        assert_eq!(run(&index(SCHUR, 1, 4)), Outcome::Sat(vec![0, 1, 1, 0]));
        assert_eq!(run(&index(SCHUR, 1, 5)), Outcome::Unsat);
    }

    #[test]
    fn node_budget_stops() {
        let idx = index(SCHUR, 1, 5);
        let nodes = AtomicU64::new(0);
        let cancel = AtomicBool::new(false);
        let limits = Limits { max_nodes: 1, deadline: None, nodes: &nodes, cancel: &cancel };
        let mut s = Solver::new(&idx);
        assert_eq!(s.solve(&limits), Outcome::Stopped(Stop::Nodes));
    }
}
