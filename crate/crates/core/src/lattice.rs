//! Geometry of the even oriented lattice.
//!
//! Sites are pairs `(x, t)` with `x + t` even. The level `t` increases upward
//! and every site has two upper edges, to `(x - 1, t + 1)` and `(x + 1, t + 1)`.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A site of the lattice. Ordered by level, then column.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Vertex {
    x: i64,
    t: i64,
}

impl Vertex {
    pub fn new(x: i64, t: i64) -> Result<Self> {
        if (x + t).rem_euclid(2) != 0 {
            return Err(Error::InvalidVertex { x, t });
        }
        Ok(Vertex { x, t })
    }

    /// Caller guarantees parity.
    #[inline]
    pub(crate) const fn at(x: i64, t: i64) -> Self {
        Vertex { x, t }
    }

    #[inline]
    pub const fn x(&self) -> i64 {
        self.x
    }

    #[inline]
    pub const fn t(&self) -> i64 {
        self.t
    }

    /// Target of the upper edge on `side`.
    #[inline]
    pub fn child(&self, side: Side) -> Vertex {
        Vertex::at(self.x + side.dx(), self.t + 1)
    }

    /// Source of the lower edge arriving from `side` (the lower-left parent
    /// reaches this vertex through its right edge).
    #[inline]
    pub fn parent(&self, side: Side) -> Vertex {
        Vertex::at(self.x + side.dx(), self.t - 1)
    }

    /// Column-negated copy.
    pub fn mirrored(&self) -> Vertex {
        Vertex::at(-self.x, self.t)
    }
}

impl Ord for Vertex {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.t, self.x).cmp(&(other.t, other.x))
    }
}

impl PartialOrd for Vertex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.x, self.t)
    }
}

impl FromStr for Vertex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            line: 0,
            msg: format!("expected `x,t`, got `{s}`"),
        };
        let (x, t) = s.trim().split_once(',').ok_or_else(bad)?;
        let x = x.trim().parse().map_err(|_| bad())?;
        let t = t.trim().parse().map_err(|_| bad())?;
        Vertex::new(x, t)
    }
}

/// Which of the two upper edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    #[inline]
    pub const fn dx(self) -> i64 {
        match self {
            Side::Left => -1,
            Side::Right => 1,
        }
    }

    pub const fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    pub const fn as_char(self) -> char {
        match self {
            Side::Left => 'L',
            Side::Right => 'R',
        }
    }

    pub fn from_char(c: char) -> Option<Side> {
        match c {
            'L' => Some(Side::Left),
            'R' => Some(Side::Right),
            _ => None,
        }
    }
}

/// An oriented upper edge of `from`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EdgeRef {
    pub from: Vertex,
    pub side: Side,
}

impl EdgeRef {
    pub fn new(from: Vertex, side: Side) -> Self {
        EdgeRef { from, side }
    }

    #[inline]
    pub fn target(&self) -> Vertex {
        self.from.child(self.side)
    }
}

impl Ord for EdgeRef {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.from, self.side).cmp(&(other.from, other.side))
    }
}

impl PartialOrd for EdgeRef {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for EdgeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.from, self.side.as_char())
    }
}

impl FromStr for EdgeRef {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            line: 0,
            msg: format!("expected `x,t,L|R`, got `{s}`"),
        };
        let (v, side) = s.trim().rsplit_once(',').ok_or_else(bad)?;
        let mut chars = side.trim().chars();
        let side = match (chars.next().and_then(Side::from_char), chars.next()) {
            (Some(side), None) => side,
            _ => return Err(bad()),
        };
        Ok(EdgeRef::new(v.parse()?, side))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Backward,
}

/// Closed box of sites. Anything outside is treated as absent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub x_min: i64,
    pub x_max: i64,
    pub t_min: i64,
    pub t_max: i64,
}

impl Window {
    pub fn new(x_min: i64, x_max: i64, t_min: i64, t_max: i64) -> Result<Self> {
        if x_min > x_max || t_min > t_max {
            return Err(Error::InvalidWindow(format!(
                "empty range x=[{x_min},{x_max}] t=[{t_min},{t_max}]"
            )));
        }
        // a single column on a single level can still miss the parity class
        if x_min == x_max && t_min == t_max && (x_min + t_min).rem_euclid(2) != 0 {
            return Err(Error::InvalidWindow(format!(
                "no lattice site in x={x_min}, t={t_min}"
            )));
        }
        Ok(Window {
            x_min,
            x_max,
            t_min,
            t_max,
        })
    }

    /// Smallest window containing the light cone of `u` up to `depth` levels.
    pub fn cone_box(u: Vertex, direction: Direction, depth: i64) -> Window {
        let (t_min, t_max) = match direction {
            Direction::Forward => (u.t, u.t + depth),
            Direction::Backward => (u.t - depth, u.t),
        };
        Window {
            x_min: u.x - depth,
            x_max: u.x + depth,
            t_min,
            t_max,
        }
    }

    #[inline]
    pub fn contains(&self, v: Vertex) -> bool {
        v.x >= self.x_min && v.x <= self.x_max && v.t >= self.t_min && v.t <= self.t_max
    }

    pub fn contains_window(&self, other: &Window) -> bool {
        other.x_min >= self.x_min
            && other.x_max <= self.x_max
            && other.t_min >= self.t_min
            && other.t_max <= self.t_max
    }

    pub fn width(&self) -> usize {
        (self.x_max - self.x_min + 1) as usize
    }

    /// Parity-valid columns on level `t`, ascending.
    pub fn columns(&self, t: i64) -> impl Iterator<Item = i64> {
        let first = if (self.x_min + t).rem_euclid(2) == 0 {
            self.x_min
        } else {
            self.x_min + 1
        };
        (first..=self.x_max).step_by(2)
    }

    /// All sites, sorted by `(t, x)`.
    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (self.t_min..=self.t_max).flat_map(move |t| self.columns(t).map(move |x| Vertex::at(x, t)))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices().count()
    }

    /// Edges with both endpoints inside, sorted by `(t, x, side)`.
    pub fn edges(&self) -> impl Iterator<Item = EdgeRef> + '_ {
        self.vertices()
            .flat_map(|v| [Side::Left, Side::Right].map(|s| EdgeRef::new(v, s)))
            .filter(|e| self.contains(e.target()))
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {}",
            self.x_min, self.x_max, self.t_min, self.t_max
        )
    }
}

/// `((x-1, t+1), (x+1, t+1))`.
pub fn upper_children(v: Vertex) -> (Vertex, Vertex) {
    (v.child(Side::Left), v.child(Side::Right))
}

/// `((x-1, t-1), (x+1, t-1))`.
pub fn lower_parents(v: Vertex) -> (Vertex, Vertex) {
    (v.parent(Side::Left), v.parent(Side::Right))
}

/// Light cone of `u`, truncated at `depth` levels: every site joined to `u` by
/// an oriented path (open or not) in the given direction.
pub fn cone(u: Vertex, direction: Direction, depth: i64) -> BTreeSet<Vertex> {
    cone_of_set(&[u], direction, depth).expect("a single vertex lies on one level")
}

/// Union of the cones of a set of sites on one horizontal line.
pub fn cone_of_set(a: &[Vertex], direction: Direction, depth: i64) -> Result<BTreeSet<Vertex>> {
    if depth < 0 {
        return Err(Error::Contract(format!("negative cone depth {depth}")));
    }
    let Some(first) = a.first() else {
        return Ok(BTreeSet::new());
    };
    if a.iter().any(|v| v.t != first.t) {
        return Err(Error::Contract(
            "cone_of_set needs all sites on one level".into(),
        ));
    }
    let sign = match direction {
        Direction::Forward => 1,
        Direction::Backward => -1,
    };
    let mut out = BTreeSet::new();
    for u in a {
        for k in 0..=depth {
            for x in (u.x - k..=u.x + k).step_by(2) {
                out.insert(Vertex::at(x, u.t + sign * k));
            }
        }
    }
    Ok(out)
}
