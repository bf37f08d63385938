//! Stair-convexity primitives.
//!
//! A stair-path between two points first moves along the last axis, then
//! recurses on the remaining axes. The stair-convex hull of a finite set is the
//! smallest superset closed under stair-paths. Every predicate in this module
//! depends only on coordinate comparisons, so the routines are generic over
//! [`Coords`] and work for both `f64` points and exact rational points.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Read access to the coordinates of a point.
pub trait Coords {
    type Scalar: PartialOrd;

    fn coords(&self) -> &[Self::Scalar];

    fn dim(&self) -> usize {
        self.coords().len()
    }
}

/// A point in `R^d` with finite `f64` coordinates. The last coordinate is its height.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidDimension {
                dim: 0,
                reason: "a point needs at least one coordinate",
            });
        }
        if let Some(axis) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { axis });
        }
        Ok(Point(coords))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn height(&self) -> f64 {
        self.0[self.0.len() - 1]
    }

    /// Drops the last coordinate.
    pub fn project(&self) -> Point {
        Point(self.0[..self.0.len() - 1].to_vec())
    }

    /// Appends `last` as a new final coordinate.
    pub fn lift(&self, last: f64) -> Point {
        let mut v = self.0.clone();
        v.push(last);
        Point(v)
    }

    pub(crate) fn from_vec_unchecked(v: Vec<f64>) -> Self {
        debug_assert!(!v.is_empty());
        Point(v)
    }
}

/// Panics if `N == 0` or a coordinate is not finite.
impl<const N: usize> From<[f64; N]> for Point {
    fn from(coords: [f64; N]) -> Self {
        Point::new(coords.to_vec()).expect("invalid point literal")
    }
}

impl std::ops::Index<usize> for Point {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Coords for Point {
    type Scalar = f64;

    fn coords(&self) -> &[f64] {
        &self.0
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Position of a point relative to another, in `0..=d`.
///
/// `b` has type `j >= 1` with respect to `a` if `b_j > a_j` and `b_i < a_i` for
/// every later axis `i`; type `0` means `b` is below `a` on every axis.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TypeIndex(pub usize);

/// One axis-parallel leg of a stair-path. `axis` is zero-based.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub start: Point,
    pub end: Point,
    pub axis: usize,
}

impl Segment {
    /// Closed containment of `x` in this segment (exact comparisons).
    pub fn contains(&self, x: &Point) -> bool {
        if x.dim() != self.start.dim() {
            return false;
        }
        let (lo, hi) = min_max(self.start[self.axis], self.end[self.axis]);
        (0..x.dim()).all(|i| {
            if i == self.axis {
                lo <= x[i] && x[i] <= hi
            } else {
                x[i] == self.start[i]
            }
        })
    }

    /// The segment with its endpoints swapped.
    pub fn reversed(&self) -> Segment {
        Segment {
            start: self.end.clone(),
            end: self.start.clone(),
            axis: self.axis,
        }
    }
}

/// The stair-path between two points as an ordered chain of segments from `a` to `b`.
#[derive(Clone, Debug, PartialEq)]
pub struct StairPath {
    pub a: Point,
    pub b: Point,
    pub segments: Vec<Segment>,
}

impl StairPath {
    /// Corner points of the chain, starting at `a` and ending at `b`.
    pub fn vertices(&self) -> Vec<Point> {
        let mut out = vec![self.a.clone()];
        out.extend(self.segments.iter().map(|s| s.end.clone()));
        out
    }

    pub fn contains(&self, x: &Point) -> bool {
        if self.segments.is_empty() {
            return *x == self.a;
        }
        self.segments.iter().any(|s| s.contains(x))
    }
}

fn min_max(a: f64, b: f64) -> (f64, f64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn check_dims<P: Coords>(expected: usize, pts: &[&P]) -> Result<()> {
    for p in pts {
        if p.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: p.dim(),
            });
        }
    }
    Ok(())
}

/// Builds the stair-path `σ(a, b)`. Zero-length legs are omitted.
pub fn stair_path(a: &Point, b: &Point) -> Result<StairPath> {
    check_dims(a.dim(), &[b])?;
    let mut head: Vec<Segment> = Vec::new();
    let mut tail: Vec<Segment> = Vec::new();
    let mut from = a.clone();
    let mut to = b.clone();
    // Axes above `k` already agree between `from` and `to`.
    for k in (0..a.dim()).rev() {
        if from[k] == to[k] {
            continue;
        }
        if from[k] < to[k] {
            let mut next = from.clone();
            next.0[k] = to[k];
            head.push(Segment {
                start: from,
                end: next.clone(),
                axis: k,
            });
            from = next;
        } else {
            let mut prev = to.clone();
            prev.0[k] = from[k];
            tail.push(Segment {
                start: prev.clone(),
                end: to,
                axis: k,
            });
            to = prev;
        }
    }
    head.extend(tail.into_iter().rev());
    Ok(StairPath {
        a: a.clone(),
        b: b.clone(),
        segments: head,
    })
}

fn shared_axis<T: PartialOrd>(a: &[T], b: &[T]) -> Option<usize> {
    a.iter().zip(b).position(|(x, y)| x == y)
}

/// Type of `b` with respect to `a`.
pub fn type_of<P: Coords>(b: &P, a: &P) -> Result<TypeIndex> {
    check_dims(a.dim(), &[b])?;
    if let Some(axis) = shared_axis(a.coords(), b.coords()) {
        return Err(Error::SharedCoordinate { axis });
    }
    Ok(type_unchecked(b.coords(), a.coords()))
}

fn type_unchecked<T: PartialOrd>(b: &[T], a: &[T]) -> TypeIndex {
    let j = (0..a.len())
        .rev()
        .find(|&i| b[i] > a[i])
        .map_or(0, |i| i + 1);
    TypeIndex(j)
}

/// Lebesgue measures `v_0..v_d` of the regions of `[0,1]^d` holding points of
/// each type with respect to `a`.
pub fn type_region_volumes(a: &Point) -> Result<Vec<f64>> {
    for (axis, &v) in a.as_slice().iter().enumerate() {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::OutOfDomain {
                axis,
                value: v,
                domain: "the open unit interval",
            });
        }
    }
    Ok(type_volumes_closed(a.as_slice()))
}

/// Same as [`type_region_volumes`] without the open-cube check; used by optimizers
/// that evaluate on the closed cube.
pub(crate) fn type_volumes_closed(a: &[f64]) -> Vec<f64> {
    let d = a.len();
    let mut out = vec![0.0; d + 1];
    // suffix[j] = prod_{i >= j} a_i (zero-based)
    let mut suffix = 1.0;
    for j in (0..d).rev() {
        out[j + 1] = (1.0 - a[j]) * suffix;
        suffix *= a[j];
    }
    out[0] = suffix;
    out
}

fn ensure_generic<P: Coords>(pts: &[&P]) -> Result<()> {
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            if let Some(axis) = shared_axis(a.coords(), b.coords()) {
                return Err(Error::SharedCoordinate { axis });
            }
        }
    }
    Ok(())
}

/// Whether `a` lies in the stair-convex hull of `xs`, decided by types: every
/// type `0..=d` must be realised by some point of `xs`.
pub fn point_in_stconv<P: Coords>(xs: &[P], a: &P) -> Result<bool> {
    if xs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let d = a.dim();
    let mut seen = vec![false; d + 1];
    for x in xs {
        seen[type_of(x, a)?.0] = true;
    }
    Ok(seen.into_iter().all(|s| s))
}

/// Closed membership test built from horizontal slices: the slice of
/// `stconv(X)` at height `a_d` is the hull of the projections of the points of
/// `X` at or below that height, provided some point of `X` reaches it.
///
/// Unlike [`point_in_stconv`] this tolerates coordinate ties.
pub fn in_stconv_by_slices<P: Coords>(xs: &[P], a: &P) -> Result<bool> {
    check_dims(a.dim(), &xs.iter().collect::<Vec<_>>())?;
    let rows: Vec<&[P::Scalar]> = xs.iter().map(|x| x.coords()).collect();
    Ok(slice_member(&rows, a.coords()))
}

fn slice_member<T: PartialOrd>(xs: &[&[T]], a: &[T]) -> bool {
    if xs.is_empty() {
        return false;
    }
    let Some((h, rest)) = a.split_last() else {
        return true;
    };
    let k = rest.len();
    if !xs.iter().any(|x| x[k] >= *h) {
        return false;
    }
    let below: Vec<&[T]> = xs.iter().filter(|x| x[k] <= *h).map(|x| &x[..k]).collect();
    slice_member(&below, rest)
}

/// Decides whether `stconv(ys)` and `stconv(zs)` intersect.
///
/// All points of `ys ∪ zs` must be pairwise free of shared coordinate values.
/// With `s + t` points in dimension `d`: fewer than `d + 2` never intersect,
/// exactly `d + 2` are decided by peeling off the highest point, and larger
/// inputs are decided by the `(d + 2)`-subsets.
pub fn stconv_intersect<P: Coords>(ys: &[P], zs: &[P]) -> Result<bool> {
    if ys.is_empty() || zs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let d = ys[0].dim();
    let all: Vec<&P> = ys.iter().chain(zs).collect();
    check_dims(d, &all)?;
    if all.len() > 64 {
        return Err(Error::TooManyPoints { count: all.len() });
    }
    ensure_generic(&all)?;
    let rows: Vec<&[P::Scalar]> = all.iter().map(|p| p.coords()).collect();
    let in_y: u64 = (1u64 << ys.len()) - 1;
    Ok(intersect_masked(&rows, in_y, d))
}

/// [`stconv_intersect`] for exactly `d + 2` points, where only points from
/// different sets must avoid shared coordinate values. Ties inside one set,
/// such as a segment parallel to an axis, are allowed.
pub fn stconv_intersect_across<P: Coords>(ys: &[P], zs: &[P]) -> Result<bool> {
    if ys.is_empty() || zs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let d = ys[0].dim();
    let all: Vec<&P> = ys.iter().chain(zs).collect();
    check_dims(d, &all)?;
    if all.len() != d + 2 {
        return Err(Error::InvalidDimension {
            dim: d,
            reason: "needs exactly d + 2 points",
        });
    }
    for y in ys {
        for z in zs {
            if let Some(axis) = shared_axis(y.coords(), z.coords()) {
                return Err(Error::SharedCoordinate { axis });
            }
        }
    }
    let rows: Vec<&[P::Scalar]> = all.iter().map(|p| p.coords()).collect();
    let in_y: u64 = (1u64 << ys.len()) - 1;
    Ok(intersect_masked(&rows, in_y, d))
}

fn intersect_masked<T: PartialOrd>(rows: &[&[T]], in_y: u64, d: usize) -> bool {
    let n = rows.len();
    let need = d + 2;
    if n < need {
        return false;
    }
    let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    if n == need {
        return critical_intersect(rows, in_y, full, d);
    }
    // Enumerate every (d + 2)-subset in Gosper order.
    let mut mask: u64 = (1u64 << need) - 1;
    while mask & !full == 0 {
        if mask & in_y != 0 && mask & !in_y != 0 && critical_intersect(rows, in_y, mask, d) {
            return true;
        }
        let c = mask & mask.wrapping_neg();
        let r = mask.wrapping_add(c);
        if r == 0 {
            break;
        }
        mask = (((r ^ mask) >> 2) / c) | r;
    }
    false
}

fn two_highest<T: PartialOrd>(rows: &[&[T]], alive: u64, axis: usize) -> (usize, usize) {
    let mut top = usize::MAX;
    let mut second = usize::MAX;
    for i in 0..rows.len() {
        if alive >> i & 1 == 0 {
            continue;
        }
        if top == usize::MAX || rows[i][axis] > rows[top][axis] {
            second = top;
            top = i;
        } else if second == usize::MAX || rows[i][axis] > rows[second][axis] {
            second = i;
        }
    }
    (top, second)
}

/// Exactly `d + 2` alive points in dimension `d`.
fn critical_intersect<T: PartialOrd>(rows: &[&[T]], in_y: u64, alive: u64, d: usize) -> bool {
    critical_meet(rows, in_y, alive, d, |_, _| {})
}

/// Runs the peeling recursion; `record(axis, row)` receives, per axis, the row
/// whose coordinate the meeting point takes on that axis.
fn critical_meet<T: PartialOrd>(
    rows: &[&[T]],
    in_y: u64,
    mut alive: u64,
    d: usize,
    mut record: impl FnMut(usize, usize),
) -> bool {
    let mut dim = d;
    while dim > 1 {
        let axis = dim - 1;
        let (top, second) = two_highest(rows, alive, axis);
        if (in_y >> top & 1) == (in_y >> second & 1) {
            return false;
        }
        record(axis, second);
        alive &= !(1u64 << top);
        dim -= 1;
    }
    // Interval overlap on the first axis.
    let mut y_lo: Option<usize> = None;
    let mut y_hi: Option<usize> = None;
    let mut z_lo: Option<usize> = None;
    let mut z_hi: Option<usize> = None;
    for i in 0..rows.len() {
        if alive >> i & 1 == 0 {
            continue;
        }
        let (lo, hi) = if in_y >> i & 1 == 1 {
            (&mut y_lo, &mut y_hi)
        } else {
            (&mut z_lo, &mut z_hi)
        };
        if lo.is_none_or(|j| rows[i][0] < rows[j][0]) {
            *lo = Some(i);
        }
        if hi.is_none_or(|j| rows[i][0] > rows[j][0]) {
            *hi = Some(i);
        }
    }
    let (Some(yl), Some(yh), Some(zl), Some(zh)) = (y_lo, y_hi, z_lo, z_hi) else {
        return false;
    };
    let lo = if rows[yl][0] >= rows[zl][0] { yl } else { zl };
    let hi = if rows[yh][0] <= rows[zh][0] { yh } else { zh };
    if rows[lo][0] <= rows[hi][0] {
        record(0, lo);
        true
    } else {
        false
    }
}

/// For `|ys| + |zs| = d + 2`, returns the unique common point of the two
/// stair-convex hulls, if any.
pub fn stconv_meet_point(ys: &[Point], zs: &[Point]) -> Result<Option<Point>> {
    if ys.is_empty() || zs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let d = ys[0].dim();
    let all: Vec<&Point> = ys.iter().chain(zs).collect();
    check_dims(d, &all)?;
    if all.len() != d + 2 {
        return Err(Error::DimensionMismatch {
            expected: d + 2,
            found: all.len(),
        });
    }
    ensure_generic(&all)?;
    let rows: Vec<&[f64]> = all.iter().map(|p| p.as_slice()).collect();
    let in_y: u64 = (1u64 << ys.len()) - 1;
    let full: u64 = (1u64 << all.len()) - 1;
    let mut meet = vec![0.0; d];
    let hit = critical_meet(&rows, in_y, full, d, |axis, row| {
        meet[axis] = rows[row][axis]
    });
    Ok(hit.then(|| Point::from_vec_unchecked(meet)))
}

/// Whether the stair-path `σ(q, p)` meets the stair-simplex `stconv(zs)`,
/// where `zs` holds exactly `d` points.
pub fn stab_check<P: Coords + Clone>(q: &P, p: &P, zs: &[P]) -> Result<bool> {
    if zs.len() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: q.dim(),
            found: zs.len(),
        });
    }
    stconv_intersect(&[q.clone(), p.clone()], zs)
}

/// Allocation-light [`stab_check`] for `f64` coordinates on the sampling hot
/// path. Inputs must already be generic; returns `None` on a coordinate tie.
pub(crate) fn stab_check_rows(q: &[f64], p: &[f64], zs: &[&[f64]]) -> Option<bool> {
    let mut rows: Vec<&[f64]> = Vec::with_capacity(zs.len() + 2);
    rows.push(q);
    rows.push(p);
    rows.extend_from_slice(zs);
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            if shared_axis(a, b).is_some() {
                return None;
            }
        }
    }
    Some(intersect_masked(&rows, 0b11, q.len()))
}
