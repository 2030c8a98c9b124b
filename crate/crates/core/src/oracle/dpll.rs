//! A small DPLL solver: two watched literals, chronological backtracking.
//!
//! Literals use the DIMACS convention: variables are numbered from 1 and a
//! negative number is the negated variable.

pub type DpllLit = i32;

#[derive(Clone, Debug, Default)]
pub struct Dpll {
    num_vars: usize,
    clauses: Vec<Vec<DpllLit>>,
    has_empty: bool,
}

fn code(l: DpllLit) -> usize {
    2 * l.unsigned_abs() as usize + usize::from(l < 0)
}

struct Search {
    val: Vec<i8>,
    trail: Vec<DpllLit>,
    qhead: usize,
    watches: Vec<Vec<usize>>,
    clauses: Vec<Vec<DpllLit>>,
}

impl Search {
    fn value(&self, l: DpllLit) -> i8 {
        let v = self.val[l.unsigned_abs() as usize];
        if l < 0 {
            -v
        } else {
            v
        }
    }

    fn assign(&mut self, l: DpllLit) {
        self.val[l.unsigned_abs() as usize] = if l < 0 { -1 } else { 1 };
        self.trail.push(l);
    }

    /// Returns false on conflict.
    fn propagate(&mut self) -> bool {
        while self.qhead < self.trail.len() {
            let falsified = -self.trail[self.qhead];
            self.qhead += 1;
            let watchers = std::mem::take(&mut self.watches[code(falsified)]);
            let mut kept = Vec::with_capacity(watchers.len());
            let mut conflict = false;
            let mut iter = watchers.into_iter();
            for ci in iter.by_ref() {
                let clause = &mut self.clauses[ci];
                if clause[0] == falsified {
                    clause.swap(0, 1);
                }
                let first = clause[0];
                let first_val = {
                    let v = self.val[first.unsigned_abs() as usize];
                    if first < 0 { -v } else { v }
                };
                if first_val == 1 {
                    kept.push(ci);
                    continue;
                }
                let mut moved = false;
                for k in 2..clause.len() {
                    let l = clause[k];
                    let v = self.val[l.unsigned_abs() as usize];
                    let lv = if l < 0 { -v } else { v };
                    if lv != -1 {
                        clause.swap(1, k);
                        let w = clause[1];
                        self.watches[code(w)].push(ci);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                kept.push(ci);
                if first_val == -1 {
                    conflict = true;
                    break;
                }
                self.assign(first);
            }
            kept.extend(iter);
            self.watches[code(falsified)].extend(kept);
            if conflict {
                return false;
            }
        }
        true
    }

    fn undo_to(&mut self, len: usize) {
        for &l in &self.trail[len..] {
            self.val[l.unsigned_abs() as usize] = 0;
        }
        self.trail.truncate(len);
        self.qhead = len;
    }
}

impl Dpll {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn new_var(&mut self) -> DpllLit {
        self.num_vars += 1;
        self.num_vars as DpllLit
    }

    pub fn add_clause(&mut self, lits: &[DpllLit]) {
        let mut c: Vec<DpllLit> = lits.to_vec();
        c.sort_unstable();
        c.dedup();
        if c.windows(2).any(|w| w[0] == -w[1]) {
            return;
        }
        debug_assert!(c.iter().all(|l| *l != 0 && l.unsigned_abs() as usize <= self.num_vars));
        if c.is_empty() {
            self.has_empty = true;
        } else {
            self.clauses.push(c);
        }
    }

    /// A total model satisfying every clause and assumption, or `None`.
    pub fn solve(&self, assumptions: &[DpllLit]) -> Option<Vec<bool>> {
        if self.has_empty {
            return None;
        }
        let n = self.num_vars;
        let mut s = Search {
            val: vec![0; n + 1],
            trail: Vec::with_capacity(n),
            qhead: 0,
            watches: vec![Vec::new(); 2 * (n + 1)],
            clauses: Vec::with_capacity(self.clauses.len()),
        };
        let mut units: Vec<DpllLit> = assumptions.to_vec();
        for c in &self.clauses {
            if c.len() == 1 {
                units.push(c[0]);
            } else {
                let ci = s.clauses.len();
                s.watches[code(c[0])].push(ci);
                s.watches[code(c[1])].push(ci);
                s.clauses.push(c.clone());
            }
        }
        for u in units {
            match s.value(u) {
                1 => {}
                -1 => return None,
                _ => s.assign(u),
            }
        }
        if !s.propagate() {
            return None;
        }
        // (trail length before the decision, decision literal, already flipped)
        let mut decisions: Vec<(usize, DpllLit, bool)> = Vec::new();
        let mut cursor = 1;
        loop {
            let next = (cursor..=n).find(|&v| s.val[v] == 0);
            let Some(var) = next else {
                return Some((0..=n).map(|v| s.val[v] == 1).collect());
            };
            cursor = var;
            let lit = var as DpllLit;
            decisions.push((s.trail.len(), lit, false));
            s.assign(lit);
            while !s.propagate() {
                loop {
                    let (len, lit, flipped) = decisions.pop()?;
                    s.undo_to(len);
                    cursor = cursor.min(lit.unsigned_abs() as usize);
                    if !flipped {
                        decisions.push((len, -lit, true));
                        s.assign(-lit);
                        break;
                    }
                }
                cursor = 1;
            }
        }
    }
}
