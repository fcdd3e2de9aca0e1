//! Random environments: which oriented edges are open.
//!
//! [`EdgeConfig`] derives a uniform in `[0, 1)` for every edge from a
//! counter-based hash of `(seed, x, t, side)`, and opens the edge iff the
//! uniform is below `p`. Nothing is stored, so any window can be queried in any
//! order, and configurations at different `p` with the same seed are coupled
//! edge by edge.
//!
//! The hash is SplitMix64's finalizer applied to a per-level stream:
//!
//! ```text
//! key(seed)      = mix64(seed ^ 0x5851F42D4C957F2D)
//! row(seed, t)   = mix64(key(seed) + t * 0xD6E8FEB86659FD93)
//! hash(seed, e)  = mix64(row(seed, t) + (2x + s) * 0x9E3779B97F4A7C15)
//! uniform        = (hash >> 11) * 2^-53
//! ```
//!
//! with `s = 0` for the left edge and `s = 1` for the right edge, all
//! arithmetic wrapping on `u64` (negative coordinates as two's complement).
//!
//! Test vectors:
//!
//! | seed | edge      | hash                 |
//! |------|-----------|----------------------|
//! | 0    | `0,0,L`   | `0x1218b420e9e25949` |
//! | 0    | `0,0,R`   | `0xb12d3c42b20c715c` |
//! | 1    | `0,0,L`   | `0x9ceaeec1f066dd1e` |
//! | 42   | `-3,7,R`  | `0x3b8e19e92e83aeac` |

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::lattice::{EdgeRef, Side, Vertex, Window};
use crate::rows::BitRow;

const SEED_SALT: u64 = 0x5851_F42D_4C95_7F2D;
const ROW_MUL: u64 = 0xD6E8_FEB8_6659_FD93;
const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
fn seed_key(seed: u64) -> u64 {
    mix64(seed ^ SEED_SALT)
}

#[inline]
fn row_key(key: u64, t: i64) -> u64 {
    mix64(key.wrapping_add((t as u64).wrapping_mul(ROW_MUL)))
}

#[inline]
fn lane(x: i64, side: Side) -> u64 {
    let s = match side {
        Side::Left => 0,
        Side::Right => 1,
    };
    (x as u64).wrapping_mul(2).wrapping_add(s)
}

#[inline]
fn hash_in_row(row: u64, lane: u64) -> u64 {
    mix64(row.wrapping_add(lane.wrapping_mul(GAMMA)))
}

/// 64-bit hash of `(seed, edge)`.
pub fn edge_hash(seed: u64, e: EdgeRef) -> u64 {
    hash_in_row(
        row_key(seed_key(seed), e.from.t()),
        lane(e.from.x(), e.side),
    )
}

/// The edge's uniform in `[0, 1)`; bit-exact on every platform.
pub fn edge_uniform(seed: u64, e: EdgeRef) -> f64 {
    (edge_hash(seed, e) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Source of open/closed edges.
pub trait Environment: Sync {
    fn is_open(&self, e: EdgeRef) -> bool;

    /// Box outside which every edge is closed, for finite environments.
    fn bounds(&self) -> Option<Window> {
        None
    }

    /// Open-edge bits of level `t` for columns `lo..lo + len`: bit `i` of
    /// `left`/`right` is the left/right upper edge of column `lo + i`.
    /// The slices arrive zeroed.
    fn fill_row(&self, t: i64, lo: i64, len: usize, left: &mut [u64], right: &mut [u64]) {
        let start = if (lo + t).rem_euclid(2) == 0 { 0 } else { 1 };
        for i in (start..len).step_by(2) {
            let v = Vertex::at(lo + i as i64, t);
            if self.is_open(EdgeRef::new(v, Side::Left)) {
                left[i / 64] |= 1 << (i % 64);
            }
            if self.is_open(EdgeRef::new(v, Side::Right)) {
                right[i / 64] |= 1 << (i % 64);
            }
        }
    }
}

impl<E: Environment + ?Sized> Environment for &E {
    fn is_open(&self, e: EdgeRef) -> bool {
        (**self).is_open(e)
    }

    fn bounds(&self) -> Option<Window> {
        (**self).bounds()
    }

    fn fill_row(&self, t: i64, lo: i64, len: usize, left: &mut [u64], right: &mut [u64]) {
        (**self).fill_row(t, lo, len, left, right)
    }
}

/// The i.i.d. bond environment on the whole lattice.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeConfig {
    seed: u64,
    p: f64,
    key: u64,
    /// Open iff `hash >> 11 < threshold`, equivalent to `uniform < p`.
    threshold: u64,
}

impl EdgeConfig {
    /// Panics unless `p` lies in `[0, 1]`.
    pub fn new(seed: u64, p: f64) -> Self {
        assert!((0.0..=1.0).contains(&p), "p = {p} outside [0, 1]");
        // uniform = k * 2^-53 < p  <=>  k < ceil(p * 2^53); the product is exact
        let threshold = (p * (1u64 << 53) as f64).ceil() as u64;
        EdgeConfig {
            seed,
            p,
            key: seed_key(seed),
            threshold,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Same uniforms, different threshold.
    pub fn with_p(&self, p: f64) -> Self {
        EdgeConfig::new(self.seed, p)
    }

    pub fn uniform(&self, e: EdgeRef) -> f64 {
        edge_uniform(self.seed, e)
    }

    /// Materialize every edge of `window`.
    pub fn snapshot(&self, window: Window) -> ExplicitConfig {
        let mut cfg = ExplicitConfig::capture(self, window);
        cfg.p = Some(self.p);
        cfg.seed = Some(self.seed);
        cfg
    }
}

impl Environment for EdgeConfig {
    #[inline]
    fn is_open(&self, e: EdgeRef) -> bool {
        let h = hash_in_row(row_key(self.key, e.from.t()), lane(e.from.x(), e.side));
        (h >> 11) < self.threshold
    }

    fn fill_row(&self, t: i64, lo: i64, len: usize, left: &mut [u64], right: &mut [u64]) {
        let row = row_key(self.key, t);
        let thr = self.threshold;
        let start = if (lo + t).rem_euclid(2) == 0 { 0 } else { 1 };
        let mut i = start;
        while i < len {
            let base = ((lo + i as i64) as u64).wrapping_mul(2);
            let hl = hash_in_row(row, base);
            let hr = hash_in_row(row, base.wrapping_add(1));
            left[i / 64] |= (((hl >> 11) < thr) as u64) << (i % 64);
            right[i / 64] |= (((hr >> 11) < thr) as u64) << (i % 64);
            i += 2;
        }
    }
}

/// Is `edge_uniform(seed, e) < p`?
pub fn is_open(cfg: &EdgeConfig, e: EdgeRef) -> bool {
    cfg.is_open(e)
}

/// An explicit table of open flags for the edges of a window. Edges leaving the
/// window are closed.
#[derive(Clone, Debug, PartialEq)]
pub struct ExplicitConfig {
    window: Window,
    pub p: Option<f64>,
    pub seed: Option<u64>,
    flags: Vec<bool>,
}

impl ExplicitConfig {
    /// Every edge closed.
    pub fn closed(window: Window) -> Self {
        let n = window.width() * (window.t_max - window.t_min + 1) as usize * 2;
        ExplicitConfig {
            window,
            p: None,
            seed: None,
            flags: vec![false; n],
        }
    }

    pub fn from_fn(window: Window, mut open: impl FnMut(EdgeRef) -> bool) -> Self {
        let mut cfg = ExplicitConfig::closed(window);
        for e in window.edges().collect::<Vec<_>>() {
            if open(e) {
                let i = cfg.slot(e).unwrap();
                cfg.flags[i] = true;
            }
        }
        cfg
    }

    pub fn capture<E: Environment + ?Sized>(env: &E, window: Window) -> Self {
        ExplicitConfig::from_fn(window, |e| env.is_open(e))
    }

    /// Config whose edges, in `window.edges()` order, follow the bits of `mask`.
    pub fn from_mask(window: Window, mask: u64) -> Self {
        let mut k = 0;
        ExplicitConfig::from_fn(window, |_| {
            let open = mask >> k & 1 == 1;
            k += 1;
            open
        })
    }

    pub fn window(&self) -> Window {
        self.window
    }

    fn slot(&self, e: EdgeRef) -> Option<usize> {
        let w = &self.window;
        if !w.contains(e.from) || !w.contains(e.target()) {
            return None;
        }
        let cell = (e.from.t() - w.t_min) as usize * w.width() + (e.from.x() - w.x_min) as usize;
        Some(cell * 2 + (e.side == Side::Right) as usize)
    }

    /// Panics if `e` is not an edge of the window.
    pub fn set(&mut self, e: EdgeRef, open: bool) {
        let slot = self
            .slot(e)
            .unwrap_or_else(|| panic!("edge {e} not inside {}", self.window));
        self.flags[slot] = open;
    }

    /// Open each listed edge.
    pub fn with_open(mut self, edges: &[EdgeRef]) -> Self {
        for &e in edges {
            self.set(e, true);
        }
        self
    }

    /// Text form: a header `window x_min x_max t_min t_max; p; seed` (unknown
    /// `p`/`seed` written as `-`), then `x,t,L|R,0|1` per edge sorted by
    /// `(t, x, side)`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let p = self.p.map_or("-".to_string(), |p| p.to_string());
        let seed = self.seed.map_or("-".to_string(), |s| s.to_string());
        writeln!(out, "window {}; {p}; {seed}", self.window).unwrap();
        for e in self.window.edges() {
            writeln!(out, "{e},{}", self.is_open(e) as u8).unwrap();
        }
        out
    }

    pub fn load(text: &str) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Parse { line, msg };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let (_, header) = lines
            .find(|(_, l)| !l.is_empty())
            .ok_or_else(|| err(1, "missing header".into()))?;
        let parts: Vec<&str> = header.split(';').map(str::trim).collect();
        let dims: Vec<&str> = parts[0].split_whitespace().collect();
        if parts.len() != 3 || dims.len() != 5 || dims[0] != "window" {
            return Err(err(1, format!("bad header `{header}`")));
        }
        let nums: Vec<i64> = dims[1..]
            .iter()
            .map(|d| {
                d.parse()
                    .map_err(|_| err(1, format!("bad window bound `{d}`")))
            })
            .collect::<Result<_>>()?;
        let window =
            Window::new(nums[0], nums[1], nums[2], nums[3]).map_err(|e| err(1, e.to_string()))?;
        let p = match parts[1] {
            "-" => None,
            s => Some(
                s.parse::<f64>()
                    .map_err(|_| err(1, format!("bad p `{s}`")))?,
            ),
        };
        let seed = match parts[2] {
            "-" => None,
            s => Some(
                s.parse::<u64>()
                    .map_err(|_| err(1, format!("bad seed `{s}`")))?,
            ),
        };
        let mut cfg = ExplicitConfig::closed(window);
        cfg.p = p;
        cfg.seed = seed;
        let mut seen = vec![false; cfg.flags.len()];
        for (line, l) in lines {
            if l.is_empty() {
                continue;
            }
            let (edge, flag) = l
                .rsplit_once(',')
                .ok_or_else(|| err(line, format!("expected `x,t,L|R,0|1`, got `{l}`")))?;
            let e: EdgeRef = edge.parse().map_err(|e: Error| match e {
                Error::InvalidVertex { x, t } => {
                    err(line, format!("site ({x},{t}) has odd parity"))
                }
                other => err(line, other.to_string()),
            })?;
            let open = match flag.trim() {
                "0" => false,
                "1" => true,
                f => return Err(err(line, format!("bad flag `{f}`"))),
            };
            let slot = cfg
                .slot(e)
                .ok_or_else(|| err(line, format!("edge {e} not inside the window")))?;
            if std::mem::replace(&mut seen[slot], true) {
                return Err(err(line, format!("duplicate edge {e}")));
            }
            cfg.flags[slot] = open;
        }
        if let Some(missing) = window.edges().find(|e| !seen[cfg.slot(*e).unwrap()]) {
            return Err(err(
                text.lines().count() + 1,
                format!("missing edge {missing}"),
            ));
        }
        Ok(cfg)
    }
}

impl Environment for ExplicitConfig {
    fn is_open(&self, e: EdgeRef) -> bool {
        self.slot(e).is_some_and(|s| self.flags[s])
    }

    fn bounds(&self) -> Option<Window> {
        Some(self.window)
    }
}

/// The column-negated environment: edge `(x, t, s)` is open iff `(-x, t, !s)`
/// is open in the inner one.
pub struct Mirror<E>(pub E);

impl<E: Environment> Environment for Mirror<E> {
    fn is_open(&self, e: EdgeRef) -> bool {
        self.0
            .is_open(EdgeRef::new(e.from.mirrored(), e.side.flip()))
    }

    fn bounds(&self) -> Option<Window> {
        self.0.bounds().map(|w| Window {
            x_min: -w.x_max,
            x_max: -w.x_min,
            t_min: w.t_min,
            t_max: w.t_max,
        })
    }

    fn fill_row(&self, t: i64, lo: i64, len: usize, left: &mut [u64], right: &mut [u64]) {
        let mut ol = vec![0u64; left.len()];
        let mut or = vec![0u64; right.len()];
        self.0
            .fill_row(t, -(lo + len as i64 - 1), len, &mut ol, &mut or);
        reverse_bits(&or, len, left);
        reverse_bits(&ol, len, right);
    }
}

/// `dst` bit `i` = `src` bit `len - 1 - i`.
fn reverse_bits(src: &[u64], len: usize, dst: &mut [u64]) {
    let nw = len.div_ceil(64);
    let pad = (nw * 64 - len) as u32;
    for k in 0..nw {
        let hi = src[nw - 1 - k].reverse_bits();
        let lo = if k + 1 < nw {
            src[nw - 2 - k].reverse_bits()
        } else {
            0
        };
        dst[k] = if pad == 0 {
            hi
        } else {
            (hi >> pad) | (lo << (64 - pad))
        };
    }
}

/// Time reversal through level `pivot`: edge `(x, t) -> (x + d, t + 1)` is open
/// iff the inner edge `(x + d, 2 pivot - t - 1) -> (x, 2 pivot - t)` is.
pub struct Reversed<E> {
    pub inner: E,
    pub pivot: i64,
}

impl<E: Environment> Environment for Reversed<E> {
    fn is_open(&self, e: EdgeRef) -> bool {
        let from = Vertex::at(e.from.x() + e.side.dx(), 2 * self.pivot - e.from.t() - 1);
        self.inner.is_open(EdgeRef::new(from, e.side.flip()))
    }

    fn bounds(&self) -> Option<Window> {
        self.inner.bounds().map(|w| Window {
            x_min: w.x_min,
            x_max: w.x_max,
            t_min: 2 * self.pivot - w.t_max,
            t_max: 2 * self.pivot - w.t_min,
        })
    }

    fn fill_row(&self, t: i64, lo: i64, len: usize, left: &mut [u64], right: &mut [u64]) {
        // left(c) = inner right(c - 1), right(c) = inner left(c + 1), one level down
        let wide = len + 2;
        let mut ol = BitRow::zeros(lo - 1, wide);
        let mut or = BitRow::zeros(lo - 1, wide);
        self.inner.fill_row(
            2 * self.pivot - t - 1,
            lo - 1,
            wide,
            ol.words_mut(),
            or.words_mut(),
        );
        left.copy_from_slice(&or.shifted(lo, len, -1).words_mut()[..left.len()]);
        right.copy_from_slice(&ol.shifted(lo, len, 1).words_mut()[..right.len()]);
    }
}
