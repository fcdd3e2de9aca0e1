//! The forest of right-most paths restricted to a window.
//!
//! Every site of the window that reaches the horizon `t_max + N` gets one
//! mother: the next vertex of its right-most path. Because all vertices share
//! the same horizon, two right-most paths that meet stay together, so the
//! mother links form a forest. A vertex whose mother lies above or beside the
//! window is a root; each root spans one component.
//!
//! Daughters are ordered older first: the older daughter hangs off the lower
//! left of its mother, the younger off the lower right.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::env::Environment;
use crate::error::{Error, Result};
use crate::lattice::{EdgeRef, Side, Vertex, Window};
use crate::reach::AliveField;

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct Forest {
    window: Window,
    height: i64,
    horizon: i64,
    /// Dense by `index`; `None` for non-members.
    mother: Vec<Option<Vertex>>,
    /// Index of the component root, `NONE` for non-members.
    root: Vec<u32>,
    members: Vec<Vertex>,
}

/// Direct family of one vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Kinship {
    /// `None` for a root.
    pub mother: Option<Vertex>,
    /// Older first.
    pub daughters: Vec<Vertex>,
    pub sigma: u8,
}

/// All descendants of a vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub members: BTreeSet<Vertex>,
    /// Some descendant may have daughters outside the window.
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub root: Vertex,
    /// Sorted by level, then column.
    pub members: Vec<Vertex>,
}

/// Forest of right-most paths on `window`, certified against level
/// `window.t_max + n`.
///
/// A finite environment is treated as the whole world: its window must cover
/// `window` and reach the horizon, and everything outside it is closed.
pub fn build_forest<E: Environment + ?Sized>(window: Window, n: i64, env: &E) -> Result<Forest> {
    if n < 1 {
        return Err(Error::Contract(format!(
            "height must be at least 1, got {n}"
        )));
    }
    let horizon = window.t_max + n;
    if let Some(b) = env.bounds() {
        let need = Window {
            t_max: horizon,
            ..window
        };
        if !b.contains_window(&need) {
            return Err(Error::InsufficientWindow {
                what: "forest",
                needed: need,
                have: b,
            });
        }
    }
    let t0 = window.t_min;
    let alive = AliveField::compute(env, horizon, t0, |t| {
        (window.x_min - (t - t0), window.x_max + (t - t0))
    });
    let size = window.width() * (window.t_max - window.t_min + 1) as usize;
    let mut forest = Forest {
        window,
        height: n,
        horizon,
        mother: vec![None; size],
        root: vec![NONE; size],
        members: Vec::new(),
    };
    for v in window.vertices() {
        if !alive.alive(v) {
            continue;
        }
        let right = v.child(Side::Right);
        let m = if env.is_open(EdgeRef::new(v, Side::Right)) && alive.alive(right) {
            right
        } else {
            v.child(Side::Left)
        };
        let i = forest.index(v).unwrap();
        forest.mother[i] = Some(m);
        forest.members.push(v);
    }
    // top-down so that a mother's root is known before her daughters'
    for &v in forest.members.iter().rev() {
        let i = forest.index(v).unwrap();
        let m = forest.mother[i].unwrap();
        forest.root[i] = match forest.index(m) {
            Some(j) => forest.root[j],
            None => i as u32,
        };
    }
    Ok(forest)
}

impl Forest {
    #[inline]
    fn index(&self, v: Vertex) -> Option<usize> {
        if !self.window.contains(v) {
            return None;
        }
        let w = self.window.width();
        Some((v.t() - self.window.t_min) as usize * w + (v.x() - self.window.x_min) as usize)
    }

    fn vertex_of(&self, i: usize) -> Vertex {
        let w = self.window.width();
        Vertex::at(
            self.window.x_min + (i % w) as i64,
            self.window.t_min + (i / w) as i64,
        )
    }

    pub fn window(&self) -> Window {
        self.window
    }

    /// Relative certification height `N`.
    pub fn height(&self) -> i64 {
        self.height
    }

    /// Absolute certification level.
    pub fn horizon(&self) -> i64 {
        self.horizon
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.index(v).is_some_and(|i| self.mother[i].is_some())
    }

    /// Members sorted by level, then column.
    pub fn vertices(&self) -> &[Vertex] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    fn check(&self, u: Vertex) -> Result<usize> {
        self.index(u)
            .filter(|&i| self.mother[i].is_some())
            .ok_or(Error::NotInForest(u))
    }

    /// Mother's position, also when it lies outside the window.
    pub fn mother_vertex(&self, u: Vertex) -> Result<Vertex> {
        Ok(self.mother[self.check(u)?].unwrap())
    }

    /// Mother inside the window; `None` for roots.
    pub fn mother(&self, u: Vertex) -> Result<Option<Vertex>> {
        let m = self.mother_vertex(u)?;
        Ok(self.contains(m).then_some(m))
    }

    pub fn is_root(&self, u: Vertex) -> Result<bool> {
        Ok(self.mother(u)?.is_none())
    }

    fn mother_of(&self, slot: Vertex) -> Option<Vertex> {
        self.index(slot).and_then(|i| self.mother[i])
    }

    /// Daughters, older first. Slots outside the window count as empty.
    pub fn daughters(&self, u: Vertex) -> Result<Vec<Vertex>> {
        self.check(u)?;
        Ok(self.daughters_of(u))
    }

    fn daughters_of(&self, u: Vertex) -> Vec<Vertex> {
        [u.parent(Side::Left), u.parent(Side::Right)]
            .into_iter()
            .filter(|&d| self.mother_of(d) == Some(u))
            .collect()
    }

    /// 1 for an only or older daughter, 2 for a younger daughter with an
    /// older sister.
    pub fn sigma(&self, u: Vertex) -> Result<u8> {
        let m = self.mother_vertex(u)?;
        Ok(self.sigma_given(u, m))
    }

    fn sigma_given(&self, u: Vertex, m: Vertex) -> u8 {
        if u.x() > m.x() && self.mother_of(m.parent(Side::Left)) == Some(m) {
            2
        } else {
            1
        }
    }

    /// The younger sister of `u`, if `u` is an older daughter that has one.
    fn younger_sister(&self, u: Vertex, m: Vertex) -> Option<Vertex> {
        let s = m.parent(Side::Right);
        (u.x() < m.x() && self.mother_of(s) == Some(m)).then_some(s)
    }

    pub fn kinship(&self, u: Vertex) -> Result<Kinship> {
        Ok(Kinship {
            mother: self.mother(u)?,
            daughters: self.daughters_of(u),
            sigma: self.sigma(u)?,
        })
    }

    /// `M^n(u)`; `None` once the chain leaves the window.
    pub fn ancestor(&self, u: Vertex, n: usize) -> Result<Option<Vertex>> {
        self.check(u)?;
        let mut v = u;
        for _ in 0..n {
            match self.mother(v)? {
                Some(m) => v = m,
                None => return Ok(None),
            }
        }
        Ok(Some(v))
    }

    /// Root of the component holding `u`.
    pub fn root(&self, u: Vertex) -> Result<Vertex> {
        Ok(self.vertex_of(self.root[self.check(u)?] as usize))
    }

    pub fn same_component(&self, u: Vertex, v: Vertex) -> Result<bool> {
        Ok(self.root(u)? == self.root(v)?)
    }

    /// Closest common ancestor `z = M^i(u) = M^j(v)`, as `(z, i, j)`.
    pub fn common_ancestor(&self, u: Vertex, v: Vertex) -> Result<(Vertex, usize, usize)> {
        self.check(u)?;
        self.check(v)?;
        let undecidable =
            || Error::Undecidable(format!("{u} and {v} have no common ancestor in the window"));
        let (mut a, mut b) = (u, v);
        let (mut i, mut j) = (0usize, 0usize);
        while a.t() < b.t() {
            a = self.mother(a)?.ok_or_else(undecidable)?;
            i += 1;
        }
        while b.t() < a.t() {
            b = self.mother(b)?.ok_or_else(undecidable)?;
            j += 1;
        }
        while a != b {
            a = self.mother(a)?.ok_or_else(undecidable)?;
            b = self.mother(b)?.ok_or_else(undecidable)?;
            i += 1;
            j += 1;
        }
        Ok((a, i, j))
    }

    /// `sigma_{k-1}(u)`, with `sigma_{-1} = 0`.
    fn sigma_before(&self, u: Vertex, k: usize) -> Result<u8> {
        if k == 0 {
            return Ok(0);
        }
        let w = self
            .ancestor(u, k - 1)?
            .expect("inside the chain to a common ancestor");
        self.sigma(w)
    }

    /// Whether `u` comes before `v` in the succession order.
    pub fn precedes(&self, u: Vertex, v: Vertex) -> Result<bool> {
        let (_, i, j) = self.common_ancestor(u, v)?;
        Ok(self.sigma_before(u, i)? < self.sigma_before(v, j)?)
    }

    /// Next vertex of the succession line: the older daughter if any,
    /// otherwise the younger sister of the nearest ancestor-or-self that has
    /// one. `None` when the climb reaches a root first.
    pub fn successor(&self, u: Vertex) -> Result<Option<Vertex>> {
        self.check(u)?;
        if let Some(&d) = self.daughters_of(u).first() {
            return Ok(Some(d));
        }
        let mut w = u;
        while let Some(m) = self.mother(w)? {
            if let Some(s) = self.younger_sister(w, m) {
                return Ok(Some(s));
            }
            w = m;
        }
        Ok(None)
    }

    /// Inverse of [`Forest::successor`]: the mother of an older or only
    /// daughter; for a younger daughter, the last vertex reached from her older
    /// sister by always taking the youngest daughter.
    pub fn predecessor(&self, u: Vertex) -> Result<Option<Vertex>> {
        let Some(m) = self.mother(u)? else {
            return Ok(None);
        };
        if self.sigma_given(u, m) == 1 {
            return Ok(Some(m));
        }
        let mut w = m.parent(Side::Left);
        while let Some(&d) = self.daughters_of(w).last() {
            w = d;
        }
        Ok(Some(w))
    }

    /// `Pi^{-k}(u), .., u, .., Pi^k(u)`, cut where a step is undefined.
    pub fn succession_line(&self, u: Vertex, k: usize) -> Result<Vec<Vertex>> {
        let mut back = Vec::new();
        let mut w = u;
        for _ in 0..k {
            match self.predecessor(w)? {
                Some(p) => {
                    back.push(p);
                    w = p;
                }
                None => break,
            }
        }
        back.reverse();
        back.push(u);
        let mut w = u;
        for _ in 0..k {
            match self.successor(w)? {
                Some(s) => {
                    back.push(s);
                    w = s;
                }
                None => break,
            }
        }
        Ok(back)
    }

    /// Whole succession line of a component, from its root.
    pub fn line_from_root(&self, root: Vertex) -> Result<Vec<Vertex>> {
        if !self.is_root(root)? {
            return Err(Error::Contract(format!("{root} is not a root")));
        }
        let mut out = vec![root];
        let mut w = root;
        while let Some(s) = self.successor(w)? {
            out.push(s);
            w = s;
        }
        Ok(out)
    }

    fn touches_edge(&self, v: Vertex) -> bool {
        let w = &self.window;
        v.t() == w.t_min || v.x() - 1 < w.x_min || v.x() + 1 > w.x_max
    }

    /// `D(u, G)` within the window.
    pub fn branch(&self, u: Vertex) -> Result<Branch> {
        self.check(u)?;
        let mut members = BTreeSet::new();
        let mut truncated = false;
        let mut stack = vec![u];
        while let Some(w) = stack.pop() {
            members.insert(w);
            truncated |= self.touches_edge(w);
            stack.extend(self.daughters_of(w));
        }
        Ok(Branch { members, truncated })
    }

    pub fn components(&self) -> Vec<Component> {
        let mut by_root: std::collections::BTreeMap<u32, Vec<Vertex>> = Default::default();
        for &v in &self.members {
            by_root
                .entry(self.root[self.index(v).unwrap()])
                .or_default()
                .push(v);
        }
        let mut out: Vec<Component> = by_root
            .into_iter()
            .map(|(r, members)| Component {
                root: self.vertex_of(r as usize),
                members,
            })
            .collect();
        out.sort_by_key(|c| c.root);
        out
    }

    /// `child_x,child_t,mother_x,mother_t,sigma` per member, sorted by child.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::from("child_x,child_t,mother_x,mother_t,sigma\n");
        for &v in &self.members {
            let m = self.mother_vertex(v).unwrap();
            writeln!(
                out,
                "{},{},{},{},{}",
                v.x(),
                v.t(),
                m.x(),
                m.t(),
                self.sigma_given(v, m)
            )
            .unwrap();
        }
        out
    }
}
