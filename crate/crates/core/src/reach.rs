//! Oriented reachability: frontier evolution, forward and backward clusters,
//! and finite-volume percolation points.
//!
//! A site "percolates to height N" when its forward cluster reaches level
//! `t + N`. This is the finite-volume stand-in for an infinite cluster; the
//! sets `K_N` decrease in `N`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::band;
use crate::env::Environment;
use crate::error::{Error, Result};
use crate::lattice::{Direction, Vertex, Window};
use crate::rows::{step_down, step_up, BitRow};

/// Occupied columns of one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frontier {
    level: i64,
    columns: Vec<i64>,
}

impl Frontier {
    pub fn new(level: i64, columns: impl IntoIterator<Item = i64>) -> Result<Self> {
        let mut columns: Vec<i64> = columns.into_iter().collect();
        columns.sort_unstable();
        columns.dedup();
        if let Some(&x) = columns.iter().find(|&&x| (x + level).rem_euclid(2) != 0) {
            return Err(Error::InvalidVertex { x, t: level });
        }
        Ok(Frontier { level, columns })
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn columns(&self) -> &[i64] {
        &self.columns
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    /// Rightmost occupied column; `None` stands for `sup {} = -inf`.
    pub fn right_edge(&self) -> Option<i64> {
        self.columns.last().copied()
    }

    fn from_row(level: i64, row: &BitRow) -> Self {
        Frontier {
            level,
            columns: row.columns().collect(),
        }
    }
}

/// How an extinct frontier continues.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrontierRule {
    /// Plain transfer; once empty, stays empty.
    Plain,
    /// After extinction at step `k`, restart from a single particle at column
    /// `c + k`, where `c` is the rightmost initial column.
    Pruned,
}

fn bounds_check<E: Environment + ?Sized>(
    env: &E,
    needed: Window,
    what: &'static str,
) -> Result<()> {
    match env.bounds() {
        Some(have) if !have.contains_window(&needed) => {
            Err(Error::InsufficientWindow { what, needed, have })
        }
        _ => Ok(()),
    }
}

/// `xi_0 .. xi_steps` started from `a`.
pub fn evolve_frontier<E: Environment + ?Sized>(
    a: &Frontier,
    steps: i64,
    env: &E,
    rule: FrontierRule,
) -> Result<Vec<Frontier>> {
    if steps < 0 {
        return Err(Error::Contract(format!("negative step count {steps}")));
    }
    if let Some(b) = env.bounds() {
        if let Some(&x) = a
            .columns
            .iter()
            .find(|&&x| !b.contains(Vertex::at(x, a.level)))
        {
            return Err(Error::OutOfWindow(Vertex::at(x, a.level)));
        }
    }
    let (lo0, hi0) = match (a.columns.first(), a.columns.last()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ if rule == FrontierRule::Pruned => {
            return Err(Error::Contract(
                "pruned evolution needs a nonempty start".into(),
            ))
        }
        _ => (0, 0),
    };
    let mut out = vec![a.clone()];
    let mut row = BitRow::from_columns(lo0, hi0, a.columns.iter().copied());
    let mut span = (lo0, hi0);
    for k in 1..=steps {
        let t = a.level + k - 1;
        span = (span.0 - 1, span.1 + 1);
        row = step_up(env, &row, t, span.0, span.1);
        if row.is_empty() && rule == FrontierRule::Pruned {
            let c = hi0 + k;
            span = (span.0.min(c), span.1.max(c));
            row = BitRow::from_columns(span.0, span.1, [c]);
        }
        out.push(Frontier::from_row(t + 1, &row));
    }
    Ok(out)
}

/// Forward sweep from a set of sites on level `t0`: `rows[k]` holds the sites
/// of level `t0 + k` reachable from `start` inside the column spans given by
/// `span(level)`.
pub(crate) fn sweep_up<E: Environment + ?Sized>(
    env: &E,
    start: BitRow,
    t0: i64,
    steps: i64,
    span: impl Fn(i64) -> (i64, i64),
) -> Vec<BitRow> {
    let mut rows = Vec::with_capacity(steps as usize + 1);
    rows.push(start);
    for k in 1..=steps {
        let (lo, hi) = span(t0 + k);
        let next = step_up(env, &rows[k as usize - 1], t0 + k - 1, lo, hi);
        rows.push(next);
    }
    rows
}

/// Backward sweep from a set on level `top`: `rows[k]` holds the sites of level
/// `top - k` with an open oriented path into `start`.
pub(crate) fn sweep_down<E: Environment + ?Sized>(
    env: &E,
    start: BitRow,
    top: i64,
    steps: i64,
    span: impl Fn(i64) -> (i64, i64),
) -> Vec<BitRow> {
    let mut rows = Vec::with_capacity(steps as usize + 1);
    rows.push(start);
    for k in 1..=steps {
        let (lo, hi) = span(top - k);
        let next = step_down(env, &rows[k as usize - 1], top - k, lo, hi);
        rows.push(next);
    }
    rows
}

/// Sites whose forward cluster reaches level `horizon`, tabulated over a
/// region of levels `bottom..=horizon`.
#[derive(Clone, Debug)]
pub struct AliveField {
    horizon: i64,
    bottom: i64,
    rows: Vec<BitRow>,
}

impl AliveField {
    /// `span(t)` must grow by at least one column on each side per level going
    /// up, otherwise entries near the span edges are underestimated.
    pub fn compute<E: Environment + ?Sized>(
        env: &E,
        horizon: i64,
        bottom: i64,
        span: impl Fn(i64) -> (i64, i64),
    ) -> Self {
        let (lo, hi) = span(horizon);
        let top = BitRow::full(lo, hi, horizon);
        let mut rows = sweep_down(env, top, horizon, horizon - bottom, span);
        rows.reverse();
        AliveField {
            horizon,
            bottom,
            rows,
        }
    }

    /// Exact on the forward light cones of `origins`.
    pub fn over_cones<E: Environment + ?Sized>(env: &E, origins: &[Vertex], horizon: i64) -> Self {
        let t0 = origins
            .iter()
            .map(|v| v.t())
            .min()
            .expect("at least one origin");
        let lo = origins.iter().map(|v| v.x()).min().unwrap();
        let hi = origins.iter().map(|v| v.x()).max().unwrap();
        AliveField::compute(env, horizon, t0, |t| (lo - (t - t0), hi + (t - t0)))
    }

    pub fn horizon(&self) -> i64 {
        self.horizon
    }

    pub fn bottom(&self) -> i64 {
        self.bottom
    }

    pub fn row(&self, t: i64) -> Option<&BitRow> {
        if t < self.bottom || t > self.horizon {
            return None;
        }
        self.rows.get((t - self.bottom) as usize)
    }

    /// Whether `v` reaches the horizon; `false` outside the tabulated region.
    #[inline]
    pub fn alive(&self, v: Vertex) -> bool {
        self.row(v.t()).is_some_and(|r| r.get(v.x()))
    }
}

/// `C_u` restricted to `window`, found by a forward sweep that never leaves the
/// window.
pub fn cluster<E: Environment + ?Sized>(
    u: Vertex,
    env: &E,
    window: Window,
) -> Result<BTreeSet<Vertex>> {
    if !window.contains(u) {
        return Err(Error::OutOfWindow(u));
    }
    let rows = sweep_up(
        env,
        BitRow::from_columns(u.x(), u.x(), [u.x()]),
        u.t(),
        window.t_max - u.t(),
        |t| {
            let k = t - u.t();
            ((u.x() - k).max(window.x_min), (u.x() + k).min(window.x_max))
        },
    );
    Ok(collect_rows(&rows, u.t(), 1))
}

fn collect_rows(rows: &[BitRow], t0: i64, sign: i64) -> BTreeSet<Vertex> {
    rows.iter()
        .enumerate()
        .flat_map(|(k, r)| {
            r.columns()
                .map(move |x| Vertex::at(x, t0 + sign * k as i64))
        })
        .collect()
}

/// `{v : v -> u}` within `depth` levels below `u`.
pub fn anti_cluster<E: Environment + ?Sized>(
    u: Vertex,
    env: &E,
    depth: i64,
) -> Result<BTreeSet<Vertex>> {
    if depth < 0 {
        return Err(Error::Contract(format!("negative depth {depth}")));
    }
    if env.bounds().is_some_and(|b| !b.contains(u)) {
        return Err(Error::OutOfWindow(u));
    }
    let rows = sweep_down(
        env,
        BitRow::from_columns(u.x(), u.x(), [u.x()]),
        u.t(),
        depth,
        |t| {
            let k = u.t() - t;
            (u.x() - k, u.x() + k)
        },
    );
    Ok(collect_rows(&rows, u.t(), -1))
}

/// Does the forward cluster of `u` reach level `t(u) + n`?
pub fn percolates_to<E: Environment + ?Sized>(u: Vertex, n: i64, env: &E) -> Result<bool> {
    if n < 1 {
        return Err(Error::Contract(format!(
            "height must be at least 1, got {n}"
        )));
    }
    bounds_check(
        env,
        Window::cone_box(u, Direction::Forward, n),
        "percolates_to",
    )?;
    if let Some(s) = band::survives(env, u, u.t() + n) {
        return Ok(s);
    }
    let mut row = BitRow::from_columns(u.x(), u.x(), [u.x()]);
    for k in 1..=n {
        row = step_up(env, &row, u.t() + k - 1, u.x() - k, u.x() + k);
        if row.is_empty() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Does some site `n` levels below `u` reach `u`?
pub fn anti_percolates_to<E: Environment + ?Sized>(u: Vertex, n: i64, env: &E) -> Result<bool> {
    if n < 1 {
        return Err(Error::Contract(format!(
            "depth must be at least 1, got {n}"
        )));
    }
    bounds_check(
        env,
        Window::cone_box(u, Direction::Backward, n),
        "anti_percolates_to",
    )?;
    let mut row = BitRow::from_columns(u.x(), u.x(), [u.x()]);
    for k in 1..=n {
        row = step_down(env, &row, u.t() - k, u.x() - k, u.x() + k);
        if row.is_empty() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Finite-volume percolation points of a window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PercSet {
    pub window: Window,
    pub horizon: i64,
    pub bidirectional: bool,
    pub members: BTreeSet<Vertex>,
}

impl PercSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.members.contains(&v)
    }

    pub fn to_text(&self) -> String {
        format!(
            "N={} bidirectional={}\n{}",
            self.horizon,
            self.bidirectional as u8,
            vertex_lines(&self.members)
        )
    }
}

/// Sorted `x,t` lines.
pub fn vertex_lines<'a>(set: impl IntoIterator<Item = &'a Vertex>) -> String {
    let mut sorted: Vec<&Vertex> = set.into_iter().collect();
    sorted.sort();
    let mut out = String::new();
    for v in sorted {
        writeln!(out, "{v}").unwrap();
    }
    out
}

/// `K_N` (or, with `bidirectional`, the sites that also have an anti-oriented
/// open path of length `n` below them) within `window`.
pub fn perc_points<E: Environment + ?Sized>(
    window: Window,
    n: i64,
    env: &E,
    bidirectional: bool,
) -> Result<PercSet> {
    if n < 1 {
        return Err(Error::Contract(format!(
            "height must be at least 1, got {n}"
        )));
    }
    let needed = Window {
        x_min: window.x_min - n,
        x_max: window.x_max + n,
        t_min: if bidirectional {
            window.t_min - n
        } else {
            window.t_min
        },
        t_max: window.t_max + n,
    };
    bounds_check(env, needed, "perc_points")?;
    let mut members = BTreeSet::new();
    for t in window.t_min..=window.t_max {
        let span = |level: i64, centre: i64| {
            let k = (level - centre).abs();
            (window.x_min - k, window.x_max + k)
        };
        let top = t + n;
        let (lo, hi) = span(top, t);
        let down = sweep_down(env, BitRow::full(lo, hi, top), top, n, |l| span(l, t));
        let mut row = down[n as usize].clone();
        if bidirectional {
            let bottom = t - n;
            let (lo, hi) = span(bottom, t);
            let up = sweep_up(env, BitRow::full(lo, hi, bottom), bottom, n, |l| span(l, t));
            row.and_assign(&up[n as usize]);
        }
        members.extend(row.columns().map(|x| Vertex::at(x, t)));
    }
    Ok(PercSet {
        window,
        horizon: n,
        bidirectional,
        members,
    })
}

/// `(C_u1 ∪ C_u2) \ (C_u1 ∩ C_u2)` within `window`.
pub fn symmetric_difference<E: Environment + ?Sized>(
    u1: Vertex,
    u2: Vertex,
    env: &E,
    window: Window,
) -> Result<BTreeSet<Vertex>> {
    let a = cluster(u1, env, window)?;
    let b = cluster(u2, env, window)?;
    Ok(a.symmetric_difference(&b).copied().collect())
}

/// Per-level sizes of `C_u1 Δ C_u2` for levels `t0 ..= t0 + steps`, where both
/// origins sit on level `t0`; unclipped.
pub fn symmetric_difference_profile<E: Environment + ?Sized>(
    u1: Vertex,
    u2: Vertex,
    env: &E,
    steps: i64,
) -> Result<Vec<u64>> {
    if u1.t() != u2.t() {
        return Err(Error::Contract(
            "difference profile needs origins on one level".into(),
        ));
    }
    let (lo, hi) = (u1.x().min(u2.x()), u1.x().max(u2.x()));
    let span = |t: i64| (lo - (t - u1.t()), hi + (t - u1.t()));
    let mut a = BitRow::from_columns(lo, hi, [u1.x()]);
    let mut b = BitRow::from_columns(lo, hi, [u2.x()]);
    let mut sizes = Vec::with_capacity(steps as usize + 1);
    for k in 0..=steps {
        if k > 0 {
            if a == b {
                // equal rows evolve identically
                sizes.resize(steps as usize + 1, 0);
                break;
            }
            let (l, h) = span(u1.t() + k);
            a = step_up(env, &a, u1.t() + k - 1, l, h);
            b = step_up(env, &b, u1.t() + k - 1, l, h);
        }
        let mut d = a.clone();
        d.xor_assign(&b);
        sizes.push(d.count_ones());
    }
    Ok(sizes)
}
