//! Brute-force reference implementations over small explicit configurations.
//!
//! Nothing here uses the library's sweeps: reachability is a plain graph
//! search over the open edges and extremal paths come from listing every
//! turn sequence. Vertex sets are bitmasks over the window's sites.

#![allow(dead_code)]

use std::collections::BTreeSet;

use perctree::lattice::Direction;
use perctree::paths::{anti_leftmost_path, buds, leftmost_path, rightmost_path, PathRec};
use perctree::reach::{cluster, percolates_to};
use perctree::{EdgeRef, Environment, Error, ExplicitConfig, Side, Vertex, Window};

pub fn v(x: i64, t: i64) -> Vertex {
    Vertex::new(x, t).unwrap()
}

/// Every window shape with between 1 and `max_edges` internal edges, placed
/// with `t_min = 0` and `x_min` in `{0, 1}` to cover both parities.
pub fn shapes(max_edges: usize) -> Vec<Window> {
    let mut out = Vec::new();
    for h in 1..=max_edges as i64 {
        for w in 1..=(2 * max_edges as i64) {
            for x0 in 0..2 {
                let win = Window::new(x0, x0 + w - 1, 0, h).unwrap();
                let e = win.edges().count();
                if (1..=max_edges).contains(&e) {
                    out.push(win);
                }
            }
        }
    }
    out
}

const NONE: usize = usize::MAX;
const SIDES: [Side; 2] = [Side::Left, Side::Right];

fn side_bit(s: Side) -> usize {
    (s == Side::Right) as usize
}

fn dx(s: Side) -> i64 {
    if s == Side::Left {
        -1
    } else {
        1
    }
}

pub struct Oracle<'a> {
    pub cfg: &'a ExplicitConfig,
    pub w: Window,
    sites: Vec<Vertex>,
    grid: Vec<usize>,
    /// `down[i][s]`: site reached from `i` by an open edge on side `s`.
    down: Vec<[usize; 2]>,
    /// `up[i][s]`: site reached from `i` by walking an open edge backwards
    /// towards side `s`.
    up: Vec<[usize; 2]>,
}

impl<'a> Oracle<'a> {
    pub fn new(cfg: &'a ExplicitConfig) -> Self {
        let w = cfg.window();
        let sites: Vec<Vertex> = w.vertices().collect();
        assert!(sites.len() <= 64, "window too large for the oracle");
        let mut o = Oracle {
            cfg,
            w,
            grid: vec![NONE; w.width() * (w.t_max - w.t_min + 1) as usize],
            down: vec![[NONE; 2]; sites.len()],
            up: vec![[NONE; 2]; sites.len()],
            sites,
        };
        for (i, &a) in o.sites.iter().enumerate() {
            let k = o.cell(a);
            o.grid[k] = i;
        }
        for i in 0..o.sites.len() {
            let a = o.sites[i];
            for s in SIDES {
                let b = v(a.x() + dx(s), a.t() + 1);
                if w.contains(b) && cfg.is_open(EdgeRef::new(a, s)) {
                    o.down[i][side_bit(s)] = o.index(b);
                }
                let b = v(a.x() + dx(s), a.t() - 1);
                if w.contains(b) && cfg.is_open(EdgeRef::new(b, s.flip())) {
                    o.up[i][side_bit(s)] = o.index(b);
                }
            }
        }
        o
    }

    fn cell(&self, a: Vertex) -> usize {
        (a.t() - self.w.t_min) as usize * self.w.width() + (a.x() - self.w.x_min) as usize
    }

    pub fn index(&self, a: Vertex) -> usize {
        self.grid[self.cell(a)]
    }

    /// `None` when some member lies outside the window.
    pub fn mask_of(&self, set: &BTreeSet<Vertex>) -> Option<u64> {
        set.iter()
            .map(|&a| self.w.contains(a).then(|| 1u64 << self.index(a)))
            .sum()
    }

    pub fn set_of(&self, mask: u64) -> BTreeSet<Vertex> {
        (0..self.sites.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| self.sites[i])
            .collect()
    }

    /// Sites reachable from site `u` along open edges, skipping the edges
    /// whose bit `2 * from + side` is set in `banned`.
    pub fn reach(&self, u: usize, banned: u128) -> u64 {
        let mut seen = 1u64 << u;
        let mut stack = vec![u];
        while let Some(a) = stack.pop() {
            for s in 0..2 {
                let b = self.down[a][s];
                if b != NONE && banned >> (2 * a + s) & 1 == 0 && seen >> b & 1 == 0 {
                    seen |= 1 << b;
                    stack.push(b);
                }
            }
        }
        seen
    }

    /// Turn sequences of the open `n`-step paths from `u`, as bit strings
    /// read from the top bit down with 1 for a right turn; returns the
    /// smallest and the largest, i.e. the left-most and right-most paths.
    pub fn extremes(&self, u: usize, n: usize, dir: Direction) -> Option<(u32, u32)> {
        let step = match dir {
            Direction::Forward => &self.down,
            Direction::Backward => &self.up,
        };
        let mut best: Option<(u32, u32)> = None;
        for bits in 0..(1u32 << n) {
            let mut a = u;
            let open = (0..n).all(|i| {
                a = step[a][(bits >> (n - 1 - i) & 1) as usize];
                a != NONE
            });
            if open {
                best = Some(best.map_or((bits, bits), |(lo, hi)| (lo.min(bits), hi.max(bits))));
            }
        }
        best
    }

    /// Sites strictly on `side` of the path at the same level, reachable from
    /// `b` without path edges.
    pub fn buds(&self, b: Vertex, path: &[Vertex], side: Side) -> u64 {
        let mut banned = 0u128;
        for p in path.windows(2) {
            let s = if p[1].x() < p[0].x() {
                Side::Left
            } else {
                Side::Right
            };
            banned |= 1 << (2 * self.index(p[0]) + side_bit(s));
        }
        let col = |t: i64| path.iter().find(|p| p.t() == t).map(|p| p.x());
        let mut out = 0;
        let reach = self.reach(self.index(b), banned);
        for (i, a) in self.sites.iter().enumerate() {
            let keep = match col(a.t()) {
                Some(c) if side == Side::Right => a.x() > c,
                Some(c) => a.x() < c,
                None => false,
            };
            if keep && reach >> i & 1 == 1 {
                out |= 1 << i;
            }
        }
        out
    }
}

fn steps(bits: u32, n: usize) -> Vec<Side> {
    (0..n)
        .map(|i| {
            if bits >> (n - 1 - i) & 1 == 1 {
                Side::Right
            } else {
                Side::Left
            }
        })
        .collect()
}

fn cone_fits(w: Window, u: Vertex, n: i64, dir: Direction) -> bool {
    w.contains_window(&Window::cone_box(u, dir, n))
}

/// Compare every operation against the oracle on one configuration; returns
/// the number of individual comparisons.
pub fn check_config(cfg: &ExplicitConfig) -> Result<usize, String> {
    let o = Oracle::new(cfg);
    let w = o.w;
    let mut checks = 0;
    let fail = |what: &str, u: Vertex, detail: String| {
        Err(format!(
            "{what} at {u} in [{w}]: {detail}\n{}",
            cfg.to_text()
        ))
    };
    let mut level = vec![0u64; (w.t_max - w.t_min + 1) as usize];
    for (i, a) in o.sites.iter().enumerate() {
        level[(a.t() - w.t_min) as usize] |= 1 << i;
    }
    for (ui, &u) in o.sites.iter().enumerate() {
        let got = cluster(u, cfg, w).map_err(|e| e.to_string())?;
        let want = o.reach(ui, 0);
        if o.mask_of(&got) != Some(want) {
            return fail("cluster", u, format!("{got:?} vs {:?}", o.set_of(want)));
        }
        checks += 1;
        for n in 1..=(w.t_max - u.t()) {
            let fits = cone_fits(w, u, n, Direction::Forward);
            let perc = percolates_to(u, n, cfg);
            let any = want & level[(u.t() + n - w.t_min) as usize] != 0;
            match (&perc, fits) {
                (Err(Error::InsufficientWindow { .. }), false) => {}
                (Ok(p), true) if *p == any => {}
                _ => {
                    return fail(
                        "percolates_to",
                        u,
                        format!("n={n} got {perc:?}, reach says {any}, fits {fits}"),
                    )
                }
            }
            checks += 1;
            if !fits {
                continue;
            }
            let ext = o.extremes(ui, n as usize, Direction::Forward);
            for (prefer, got) in [
                (Side::Right, rightmost_path(u, n, cfg)),
                (Side::Left, leftmost_path(u, n, cfg)),
            ] {
                let want = ext
                    .map(|(lo, hi)| steps(if prefer == Side::Right { hi } else { lo }, n as usize));
                match (&got, &want) {
                    (Ok(p), Some(s)) if &p.steps == s => {}
                    (Err(Error::NoPath(_)), None) => {}
                    _ => {
                        return fail(
                            "extremal path",
                            u,
                            format!("n={n} {prefer:?}: {got:?} vs {want:?}"),
                        )
                    }
                }
                checks += 1;
                if prefer == Side::Right {
                    if let Ok(path) = &got {
                        checks += check_buds(&o, path)?;
                    }
                }
            }
        }
        for d in 1..=(u.t() - w.t_min) {
            if !cone_fits(w, u, d, Direction::Backward) {
                continue;
            }
            let got = anti_leftmost_path(u, d, cfg);
            let want = o
                .extremes(ui, d as usize, Direction::Backward)
                .map(|(lo, _)| steps(lo, d as usize));
            match (&got, &want) {
                (Ok(p), Some(s)) if &p.steps == s => {}
                (Err(Error::NoPath(_)), None) => {}
                _ => {
                    return fail(
                        "anti_leftmost_path",
                        u,
                        format!("d={d}: {got:?} vs {want:?}"),
                    )
                }
            }
            checks += 1;
        }
    }
    Ok(checks)
}

fn check_buds(o: &Oracle, path: &PathRec) -> Result<usize, String> {
    let vs = path.vertices();
    let mut checks = 0;
    for &b in &vs {
        for side in [Side::Right, Side::Left] {
            let got = buds(b, path, side, o.cfg, o.w).map_err(|e| e.to_string())?;
            let want = o.buds(b, &vs, side);
            if o.mask_of(&got) != Some(want) {
                return Err(format!(
                    "buds {side:?} of {b} on {path}: {got:?} vs {:?}\n{}",
                    o.set_of(want),
                    o.cfg.to_text()
                ));
            }
            checks += 1;
        }
    }
    Ok(checks)
}

/// Run [`check_config`] over every configuration of every shape.
pub fn exhaustive(max_edges: usize) -> Result<(usize, usize, usize), String> {
    let (mut configs, mut checks) = (0, 0);
    let shapes = shapes(max_edges);
    for &w in &shapes {
        let e = w.edges().count();
        for mask in 0..(1u64 << e) {
            checks += check_config(&ExplicitConfig::from_mask(w, mask))?;
            configs += 1;
        }
    }
    Ok((shapes.len(), configs, checks))
}
