//! Exact branch-and-bound for the cover decision problem.
//!
//! Positions `0..len` are kept as a fixed-width bitset of still-uncovered
//! positions. Primes are assigned offsets in increasing order. A node is
//! pruned when the best coverage remaining primes could still add (the sum,
//! over remaining primes, of their best residue class against the current
//! uncovered set) falls short of the number of uncovered positions. A node is
//! accepted as soon as the uncovered count is at most the number of remaining
//! primes, since any prime can be aimed at any single position.
//!
//! Offsets of a prime whose newly covered set is a subset of another offset's
//! set are dominated and skipped. Reflection `i -> len - 1 - i` is broken on
//! the first prime it acts on.
//!
//! The root is expanded breadth-first into an ordered list of subtrees which
//! are explored on a rayon pool. The answer comes from the lowest-index
//! subtree that succeeds, so it does not depend on the worker count.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::SearchConfig;
use crate::error::{Error, Result};

/// Longest interval the engine handles.
pub const MAX_LEN: usize = 64 * 16;

#[derive(Clone, Copy, PartialEq, Eq)]
struct Bits<const W: usize>([u64; W]);

impl<const W: usize> Bits<W> {
    fn empty() -> Self {
        Bits([0; W])
    }

    fn prefix(len: usize) -> Self {
        let mut b = Self::empty();
        for i in 0..len {
            b.set(i);
        }
        b
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }

    #[inline]
    fn and_count(&self, other: &Self) -> u32 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a & b).count_ones())
            .sum()
    }

    #[inline]
    fn and(&self, other: &Self) -> Self {
        let mut out = *self;
        for (o, b) in out.0.iter_mut().zip(other.0.iter()) {
            *o &= b;
        }
        out
    }

    #[inline]
    fn and_not(&self, other: &Self) -> Self {
        let mut out = *self;
        for (o, b) in out.0.iter_mut().zip(other.0.iter()) {
            *o &= !b;
        }
        out
    }

    #[inline]
    fn subset_of(&self, other: &Self) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a & !b == 0)
    }

    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + t)
            })
        })
    }
}

struct Problem<const W: usize> {
    /// Primes below `len`, ascending.
    active: Vec<u64>,
    /// `masks[base[j] + r]`: positions congruent to `r` mod `active[j]`.
    masks: Vec<Bits<W>>,
    base: Vec<usize>,
    /// `static_suffix[j]`: sum of `ceil(len / p)` over `active[j..]`.
    static_suffix: Vec<u32>,
    /// Primes `>= len`; each covers at most one position.
    wild: usize,
    /// Index of the prime the reflection is broken on.
    sym_prime: Option<usize>,
    len: usize,
    full: Bits<W>,
}

impl<const W: usize> Problem<W> {
    fn new(len: usize, primes: &[u64]) -> Self {
        let active: Vec<u64> = primes
            .iter()
            .copied()
            .filter(|&p| (p as usize) < len)
            .collect();
        let wild = primes.len() - active.len();
        let mut masks = Vec::new();
        let mut base = Vec::new();
        for &p in &active {
            base.push(masks.len());
            for r in 0..p as usize {
                let mut m = Bits::empty();
                let mut i = r;
                while i < len {
                    m.set(i);
                    i += p as usize;
                }
                masks.push(m);
            }
        }
        let mut static_suffix = vec![0u32; active.len() + 1];
        for j in (0..active.len()).rev() {
            static_suffix[j] = static_suffix[j + 1] + len.div_ceil(active[j] as usize) as u32;
        }
        let sym_prime = active
            .iter()
            .position(|&p| (0..p).any(|r| reflect_offset(r, len, p) != r));
        Problem {
            active,
            masks,
            base,
            static_suffix,
            wild,
            sym_prime,
            len,
            full: Bits::prefix(len),
        }
    }

    #[inline]
    fn mask(&self, j: usize, r: usize) -> &Bits<W> {
        &self.masks[self.base[j] + r]
    }

    fn best_class(&self, j: usize, u: &Bits<W>) -> u32 {
        let p = self.active[j] as usize;
        (0..p)
            .map(|r| u.and_count(self.mask(j, r)))
            .max()
            .unwrap_or(0)
    }

    /// False when the remaining primes cannot cover `u`.
    fn may_cover(&self, j: usize, u: &Bits<W>, need: u32) -> bool {
        let wild = self.wild as u32;
        if self.static_suffix[j] + wild < need {
            return false;
        }
        let mut dynamic = wild;
        for t in j..self.active.len() {
            dynamic += self.best_class(t, u);
            if dynamic >= need {
                return true;
            }
            if dynamic + self.static_suffix[t + 1] < need {
                return false;
            }
        }
        false
    }

    /// Offsets worth trying for `active[j]`, best first, with the uncovered
    /// set each leaves behind.
    fn children(&self, j: usize, u: &Bits<W>) -> Vec<(u32, Bits<W>)> {
        let p = self.active[j] as usize;
        let mut cand: Vec<(u32, u32, Bits<W>)> = Vec::with_capacity(p);
        for r in 0..p {
            if self.sym_prime == Some(j) && reflect_offset(r as u64, self.len, p as u64) < r as u64
            {
                continue;
            }
            let cov = u.and(self.mask(j, r));
            cand.push((cov.count(), r as u32, cov));
        }
        cand.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut kept: Vec<(u32, Bits<W>)> = Vec::with_capacity(cand.len());
        let mut kept_cov: Vec<Bits<W>> = Vec::with_capacity(cand.len());
        for (_, r, cov) in cand {
            if kept_cov.iter().any(|k| cov.subset_of(k)) {
                continue;
            }
            kept.push((r, u.and_not(&cov)));
            kept_cov.push(cov);
        }
        kept
    }

    /// Fill offsets for `active[j..]` and the wild primes so that each covers
    /// a distinct position of `u`. Requires `|u| <= remaining primes`.
    fn complete(&self, j: usize, u: &Bits<W>, prefix: &[u32], primes: &[u64]) -> Vec<u64> {
        let mut pos = u.ones();
        let mut offsets: Vec<u64> = prefix.iter().map(|&r| r as u64).collect();
        for &p in &self.active[j..] {
            offsets.push(pos.next().map_or(0, |i| i as u64 % p));
        }
        // active and wild primes interleave in `primes`; map back by value
        let mut active_iter = self.active.iter().zip(offsets).peekable();
        let mut out = Vec::with_capacity(primes.len());
        for &p in primes {
            match active_iter.peek() {
                Some(&(&q, r)) if q == p => {
                    out.push(r);
                    active_iter.next();
                }
                _ => out.push(pos.next().map_or(0, |i| i as u64 % p)),
            }
        }
        out
    }
}

pub(super) fn reflect_offset(r: u64, len: usize, p: u64) -> u64 {
    let l = len as u64 % p;
    (l + p - 1 + p - r % p) % p
}

struct Control {
    nodes: AtomicU64,
    aborted: AtomicBool,
    first_found: AtomicUsize,
    started: Instant,
    node_limit: u64,
    time_limit: Option<Duration>,
}

impl Control {
    fn charge(&self, n: u64) -> bool {
        let total = self.nodes.fetch_add(n, Ordering::Relaxed) + n;
        let over_time = self.time_limit.is_some_and(|t| self.started.elapsed() > t);
        if total > self.node_limit || over_time {
            self.aborted.store(true, Ordering::Relaxed);
        }
        !self.aborted.load(Ordering::Relaxed)
    }
}

enum Outcome<const W: usize> {
    Found(Vec<u32>, usize, Bits<W>),
    Exhausted,
    Aborted,
}

struct Walker<'a, const W: usize> {
    prob: &'a Problem<W>,
    ctl: &'a Control,
    task: usize,
    path: Vec<u32>,
    pending: u64,
}

const FLUSH: u64 = 1 << 12;

impl<const W: usize> Walker<'_, W> {
    fn tick(&mut self) -> bool {
        self.pending += 1;
        if self.pending >= FLUSH {
            let n = std::mem::take(&mut self.pending);
            if !self.ctl.charge(n) {
                return false;
            }
            if self.ctl.first_found.load(Ordering::Relaxed) < self.task {
                return false;
            }
        }
        true
    }

    fn dfs(&mut self, j: usize, u: &Bits<W>) -> Option<Option<(usize, Bits<W>)>> {
        if !self.tick() {
            return None;
        }
        let need = u.count();
        let remaining = (self.prob.active.len() - j + self.prob.wild) as u32;
        if need <= remaining {
            return Some(Some((j, *u)));
        }
        if j == self.prob.active.len() || !self.prob.may_cover(j, u, need) {
            return Some(None);
        }
        for (r, next) in self.prob.children(j, u) {
            self.path.push(r);
            match self.dfs(j + 1, &next)? {
                Some(hit) => return Some(Some(hit)),
                None => {
                    self.path.pop();
                }
            }
        }
        Some(None)
    }
}

/// Offsets per prime (aligned with `primes`) covering `0..len`, `None` if
/// no cover exists.
pub(super) fn solve(len: usize, primes: &[u64], cfg: &SearchConfig) -> Result<Option<Vec<u64>>> {
    if len > MAX_LEN {
        return Err(Error::OutOfRange(format!(
            "cover length {len} exceeds {MAX_LEN}"
        )));
    }
    match len.div_ceil(64).max(1) {
        1 => solve_w::<1>(len, primes, cfg),
        2 => solve_w::<2>(len, primes, cfg),
        3 | 4 => solve_w::<4>(len, primes, cfg),
        5..=8 => solve_w::<8>(len, primes, cfg),
        _ => solve_w::<16>(len, primes, cfg),
    }
}

fn solve_w<const W: usize>(
    len: usize,
    primes: &[u64],
    cfg: &SearchConfig,
) -> Result<Option<Vec<u64>>> {
    let prob = Problem::<W>::new(len, primes);
    let ctl = Control {
        nodes: AtomicU64::new(0),
        aborted: AtomicBool::new(false),
        first_found: AtomicUsize::new(usize::MAX),
        started: Instant::now(),
        node_limit: cfg.node_limit.unwrap_or(u64::MAX),
        time_limit: cfg.time_limit,
    };
    let budget_error = |ctl: &Control| Error::BudgetExceeded {
        nodes: ctl.nodes.load(Ordering::Relaxed),
        elapsed: ctl.started.elapsed(),
    };

    // breadth-first frontier of (path, depth, uncovered)
    let workers = cfg.workers.max(1);
    let target = if workers == 1 { 1 } else { 64 * workers };
    let mut frontier: Vec<(Vec<u32>, Bits<W>)> = vec![(Vec::new(), prob.full)];
    let mut depth = 0;
    while frontier.len() < target && depth < prob.active.len() {
        let mut next = Vec::new();
        for (path, u) in &frontier {
            let need = u.count();
            let remaining = (prob.active.len() - depth + prob.wild) as u32;
            if need <= remaining {
                return Ok(Some(prob.complete(depth, u, path, primes)));
            }
            if !prob.may_cover(depth, u, need) {
                continue;
            }
            for (r, child) in prob.children(depth, u) {
                let mut p = path.clone();
                p.push(r);
                next.push((p, child));
            }
        }
        if !ctl.charge(frontier.len() as u64) {
            return Err(budget_error(&ctl));
        }
        frontier = next;
        depth += 1;
        if frontier.is_empty() {
            return Ok(None);
        }
    }

    let run = |index: usize, path: &Vec<u32>, u: &Bits<W>| -> Outcome<W> {
        if ctl.first_found.load(Ordering::Relaxed) < index {
            return Outcome::Exhausted;
        }
        let mut walker = Walker {
            prob: &prob,
            ctl: &ctl,
            task: index,
            path: path.clone(),
            pending: 0,
        };
        let res = walker.dfs(depth, u);
        ctl.charge(walker.pending);
        match res {
            None => {
                if ctl.first_found.load(Ordering::Relaxed) < index {
                    Outcome::Exhausted
                } else {
                    Outcome::Aborted
                }
            }
            Some(None) => Outcome::Exhausted,
            Some(Some((j, rest))) => {
                ctl.first_found.fetch_min(index, Ordering::Relaxed);
                Outcome::Found(walker.path, j, rest)
            }
        }
    };

    let outcomes: Vec<Outcome<W>> = if workers == 1 {
        let mut out = Vec::with_capacity(frontier.len());
        for (i, (path, u)) in frontier.iter().enumerate() {
            let o = run(i, path, u);
            let stop = !matches!(o, Outcome::Exhausted);
            out.push(o);
            if stop {
                break;
            }
        }
        out
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
        pool.install(|| {
            frontier
                .par_iter()
                .enumerate()
                .map(|(i, (path, u))| run(i, path, u))
                .collect()
        })
    };

    let mut aborted = false;
    for o in outcomes {
        match o {
            Outcome::Found(path, j, rest) => {
                return Ok(Some(prob.complete(j, &rest, &path, primes)));
            }
            Outcome::Aborted => aborted = true,
            Outcome::Exhausted => {}
        }
    }
    if aborted || ctl.aborted.load(Ordering::Relaxed) {
        Err(budget_error(&ctl))
    } else {
        Ok(None)
    }
}
