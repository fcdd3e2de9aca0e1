//! Exact answers from a narrow band that follows the right edge of one cluster.
//!
//! Right-most paths and break points only look at sites close to the right
//! edge of `C_u`. Instead of sweeping the whole light cone, both the forward
//! and the backward pass run inside a band of fixed width ending at the right
//! edge, twice: once with everything left of the band empty (a lower bound)
//! and once with it full (an upper bound). Where the two bounds agree the
//! answer is exact; otherwise the caller falls back to the full sweep.

use crate::env::{Environment, Mirror};
use crate::kuczek::{self, BreakRecord};
use crate::lattice::{EdgeRef, Side, Vertex};
use crate::paths::greedy_steps;
use crate::reach::AliveField;
use crate::rows::{masks, BitRow, RowMasks};

pub(crate) const WIDTH: i64 = 128;

pub(crate) struct Track {
    origin: Vertex,
    width: i64,
    /// Right end of the band on level `t(u) + k`.
    band_hi: Vec<i64>,
    /// Right edge `r'` of the cluster.
    redge: Vec<i64>,
    alive_lo: Vec<BitRow>,
    alive_hi: Vec<BitRow>,
}

pub(crate) enum Tracked {
    /// The cluster of the origin dies below the horizon.
    Dead,
    Live(Track),
    /// The bounds disagree somewhere that matters.
    Unsure,
}

/// `row` widened leftwards to `from`, with every site of parity `t` in the new
/// part set.
fn with_left_fill(row: &BitRow, from: i64, t: i64) -> BitRow {
    if from >= row.lo() {
        return row.clone();
    }
    let mut out = row.extract(from, (row.hi() - from + 1) as usize);
    out.or_assign(&BitRow::full(from, row.lo() - 1, t).extract(from, out.len()));
    out
}

/// Transfer `src` (level `t`) into `[lo, lo + len)` on level `t + 1` using
/// precomputed masks over the source range.
fn up_with(m: &RowMasks, src: &BitRow, lo: i64, len: usize) -> BitRow {
    let s = src.extract(m.left.lo(), m.left.len());
    let mut r = m.right.clone();
    r.and_assign(&s);
    let mut l = m.left.clone();
    l.and_assign(&s);
    let mut next = r.shifted(lo, len, -1);
    next.or_assign(&l.shifted(lo, len, 1));
    next
}

/// Sites in the mask range with an open edge into `upper`.
fn down_with(m: &RowMasks, upper: &BitRow) -> BitRow {
    let (lo, len) = (m.left.lo(), m.left.len());
    let mut r = m.right.clone();
    r.and_assign(&upper.shifted(lo, len, 1));
    let mut l = m.left.clone();
    l.and_assign(&upper.shifted(lo, len, -1));
    r.or_assign(&l);
    r
}

/// Forward half: band positions and the right edge of `C_u` per level.
enum Forward {
    Dead,
    Live { band_hi: Vec<i64>, redge: Vec<i64> },
    Unsure,
}

fn forward<E: Environment + ?Sized>(env: &E, u: Vertex, horizon: i64, width: i64) -> Forward {
    let steps = horizon - u.t();
    let band_len = (width + 1) as usize;
    let mut band_hi = Vec::with_capacity(steps as usize + 1);
    let mut redge = Vec::with_capacity(steps as usize + 1);
    band_hi.push(u.x());
    redge.push(u.x());
    let mut lo_row = BitRow::from_columns(u.x() - width, u.x(), [u.x()]);
    let mut hi_row = lo_row.clone();
    for k in 1..=steps {
        let t = u.t() + k - 1;
        let prev_lo = band_hi[k as usize - 1] - width;
        // sites left of the cone cannot be occupied
        let cone_left = u.x() - (k - 1);
        let top = redge[k as usize - 1] + 1;
        let (new_lo, new_hi) = (top - width, top);
        let src_lo = new_lo - 1;
        let hi_src = with_left_fill(&hi_row, src_lo.max(cone_left).min(prev_lo), t);
        let m = masks(env, t, src_lo, (new_hi + 1 - src_lo + 1) as usize);
        lo_row = up_with(&m, &lo_row, new_lo, band_len);
        hi_row = up_with(&m, &hi_src, new_lo, band_len);
        band_hi.push(new_hi);
        let exact = new_lo <= u.x() - k;
        match (lo_row.max_col(), hi_row.max_col()) {
            (None, None) if exact => return Forward::Dead,
            (Some(a), Some(b)) if a == b => redge.push(a),
            _ => return Forward::Unsure,
        }
    }
    Forward::Live { band_hi, redge }
}

pub(crate) fn track<E: Environment + ?Sized>(
    env: &E,
    u: Vertex,
    horizon: i64,
    width: i64,
) -> Tracked {
    let steps = horizon - u.t();
    let band_len = (width + 1) as usize;
    let (band_hi, redge) = match forward(env, u, horizon, width) {
        Forward::Dead => return Tracked::Dead,
        Forward::Unsure => return Tracked::Unsure,
        Forward::Live { band_hi, redge } => (band_hi, redge),
    };

    let mut alive_lo = vec![BitRow::zeros(0, 0); steps as usize + 1];
    let mut alive_hi = vec![BitRow::zeros(0, 0); steps as usize + 1];
    let top = BitRow::full(
        band_hi[steps as usize] - width,
        band_hi[steps as usize],
        horizon,
    );
    alive_lo[steps as usize] = top.clone();
    alive_hi[steps as usize] = top;
    for k in (0..steps).rev() {
        let t = u.t() + k;
        let lo = band_hi[k as usize] - width;
        let m = masks(env, t, lo, band_len);
        let up_lo = band_hi[k as usize + 1] - width;
        let cone_left = u.x() - (k + 1);
        let upper_hi = with_left_fill(
            &alive_hi[k as usize + 1],
            (lo - 1).max(cone_left).min(up_lo),
            t + 1,
        );
        alive_lo[k as usize] = down_with(&m, &alive_lo[k as usize + 1]);
        alive_hi[k as usize] = down_with(&m, &upper_hi);
    }
    Tracked::Live(Track {
        origin: u,
        width,
        band_hi,
        redge,
        alive_lo,
        alive_hi,
    })
}

impl Track {
    /// Whether `v` reaches the horizon; `None` when the bounds disagree or `v`
    /// is outside the band. Only meaningful for `v` in the cluster of the
    /// origin.
    pub(crate) fn alive(&self, v: Vertex) -> Option<bool> {
        let k = v.t() - self.origin.t();
        if k < 0 || k as usize >= self.band_hi.len() {
            return None;
        }
        let hi = self.band_hi[k as usize];
        if v.x() > hi || v.x() < hi - self.width {
            return None;
        }
        if self.alive_lo[k as usize].get(v.x()) {
            Some(true)
        } else if !self.alive_hi[k as usize].get(v.x()) {
            Some(false)
        } else {
            None
        }
    }

    /// Right-most path of the origin to the horizon, as turns.
    pub(crate) fn rightmost_steps<E: Environment + ?Sized>(&self, env: &E) -> Option<Vec<Side>> {
        let steps = self.band_hi.len() - 1;
        let mut out = Vec::with_capacity(steps);
        let mut v = self.origin;
        for _ in 0..steps {
            let right = v.child(Side::Right);
            let side = if env.is_open(EdgeRef::new(v, Side::Right)) && self.alive(right)? {
                Side::Right
            } else {
                let left = v.child(Side::Left);
                if !(env.is_open(EdgeRef::new(v, Side::Left)) && self.alive(left)?) {
                    return None;
                }
                Side::Left
            };
            out.push(side);
            v = v.child(side);
        }
        Some(out)
    }

    /// Break records up to absolute level `last`.
    pub(crate) fn breaks(&self, last: i64) -> Option<Vec<BreakRecord>> {
        let mut records = Vec::new();
        let (mut prev_t, mut prev_x) = (0i64, self.origin.x());
        for k in 1..=(last - self.origin.t()) {
            let r = self.redge[k as usize];
            if self.alive(Vertex::at(r, self.origin.t() + k))? {
                records.push(BreakRecord {
                    t: k,
                    x: r - prev_x,
                    tau: k - prev_t,
                });
                prev_t = k;
                prev_x = r;
            }
        }
        Some(records)
    }
}

/// Banding only pays off on tall cones.
fn worth_banding(u: Vertex, horizon: i64, width: i64) -> bool {
    horizon - u.t() > 4 * width
}

/// Whether `C_u` reaches `horizon`; `None` when banding is not worth it or
/// cannot decide.
pub(crate) fn survives<E: Environment + ?Sized>(env: &E, u: Vertex, horizon: i64) -> Option<bool> {
    if !worth_banding(u, horizon, WIDTH) {
        return None;
    }
    [WIDTH, 8 * WIDTH]
        .into_iter()
        .find_map(|w| match forward(env, u, horizon, w) {
            Forward::Dead => Some(false),
            Forward::Live { .. } => Some(true),
            Forward::Unsure => None,
        })
}

/// Live tracks of `u` at widening bands; `Err(())` once `u` is known dead.
fn tracks<'a, E: Environment + ?Sized>(
    env: &'a E,
    u: Vertex,
    horizon: i64,
    width: i64,
) -> impl Iterator<Item = Result<Track, ()>> + 'a {
    [width, 8 * width]
        .into_iter()
        .filter_map(move |w| match track(env, u, horizon, w) {
            Tracked::Dead => Some(Err(())),
            Tracked::Live(tr) => match tr.alive(u) {
                Some(false) => Some(Err(())),
                Some(true) => Some(Ok(tr)),
                None => None,
            },
            Tracked::Unsure => None,
        })
}

fn rightmost_with<E: Environment + ?Sized>(
    env: &E,
    u: Vertex,
    horizon: i64,
    width: i64,
) -> Option<Vec<Side>> {
    if worth_banding(u, horizon, width) {
        for tr in tracks(env, u, horizon, width) {
            match tr {
                Err(()) => return None,
                Ok(tr) => {
                    if let Some(steps) = tr.rightmost_steps(env) {
                        return Some(steps);
                    }
                }
            }
        }
    }
    let alive = AliveField::over_cones(env, &[u], horizon);
    alive
        .alive(u)
        .then(|| greedy_steps(env, &alive, u, horizon - u.t(), Side::Right))
}

/// Extremal path of `u` up to `horizon` as turns, `None` when `u` does not
/// reach the horizon.
pub(crate) fn extremal_steps<E: Environment + ?Sized>(
    env: &E,
    u: Vertex,
    horizon: i64,
    prefer: Side,
) -> Option<Vec<Side>> {
    extremal_steps_with(env, u, horizon, prefer, WIDTH)
}

pub(crate) fn extremal_steps_with<E: Environment + ?Sized>(
    env: &E,
    u: Vertex,
    horizon: i64,
    prefer: Side,
    width: i64,
) -> Option<Vec<Side>> {
    match prefer {
        Side::Right => rightmost_with(env, u, horizon, width),
        Side::Left => rightmost_with(&Mirror(env), u.mirrored(), horizon, width)
            .map(|s| s.into_iter().map(Side::flip).collect()),
    }
}

/// Break records of `u` certified at `horizon`, kept up to level `last`;
/// `None` when `u` does not reach the horizon.
pub(crate) fn break_records<E: Environment + ?Sized>(
    env: &E,
    u: Vertex,
    horizon: i64,
    last: i64,
) -> Option<Vec<BreakRecord>> {
    break_records_with(env, u, horizon, last, WIDTH)
}

pub(crate) fn break_records_with<E: Environment + ?Sized>(
    env: &E,
    u: Vertex,
    horizon: i64,
    last: i64,
    width: i64,
) -> Option<Vec<BreakRecord>> {
    if worth_banding(u, horizon, width) {
        for tr in tracks(env, u, horizon, width) {
            match tr {
                Err(()) => return None,
                Ok(tr) => {
                    if let Some(records) = tr.breaks(last) {
                        return Some(records);
                    }
                }
            }
        }
    }
    let alive = AliveField::over_cones(env, &[u], horizon);
    kuczek::break_records(env, &alive, u, last).ok()
}
