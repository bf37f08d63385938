//! Stretched point sets with exact integer coordinates, and the checks that
//! tie unit-cube stair computations to Euclidean stabbing counts.

use std::fmt;
use std::io::{self, Write};

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagonal::check_conditions;
use crate::error::{Error, Result};
use crate::rng::substream;
use crate::stair::{stab_check_rows, stconv_intersect_across, Coords, Point};
use crate::Rational;

/// Largest number of points a set may hold.
pub const MAX_POINTS: usize = 1 << 20;

/// Default cap on the number of `d`-subsets a census may enumerate.
pub const DEFAULT_CENSUS_LIMIT: u128 = 10_000_000;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetKind {
    Grid,
    Diagonal,
    Uniform,
}

impl fmt::Display for SetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SetKind::Grid => "grid",
            SetKind::Diagonal => "diagonal",
            SetKind::Uniform => "uniform",
        })
    }
}

/// A point with exact rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalPoint(Vec<Rational>);

impl RationalPoint {
    pub fn new(coords: Vec<Rational>) -> Self {
        RationalPoint(coords)
    }

    pub fn from_integers(coords: &[BigInt]) -> Self {
        RationalPoint(
            coords
                .iter()
                .map(|c| Rational::from_integer(c.clone()))
                .collect(),
        )
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        RationalPoint(
            coords
                .iter()
                .map(|&c| Rational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN))
            .collect()
    }
}

impl Coords for RationalPoint {
    type Scalar = Rational;

    fn coords(&self) -> &[Rational] {
        &self.0
    }
}

impl fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// An explicit stretched grid, stretched diagonal or evenly spaced grid.
#[derive(Clone, Debug)]
pub struct StretchedSet {
    kind: SetKind,
    dim: usize,
    size: usize,
    axes: Vec<Vec<BigInt>>,
    stretch: Vec<BigInt>,
}

/// Builds a set of the given kind in dimension `d`. `size` is the side `m`
/// for grids and the point count `n` for the diagonal.
///
/// Axis `i` starts at 1 and grows by the factor `K_i` at each step, where
/// `K_1 = 2^d` and `K_i = 2^d` times the last coordinate of axis `i - 1`. The
/// diagonal takes the `j`-th coordinate of every axis for its `j`-th point.
/// The uniform kind spaces each axis evenly over the stretched bounding box.
pub fn build_stretched(kind: SetKind, d: usize, size: usize) -> Result<StretchedSet> {
    if !(2..=16).contains(&d) {
        return Err(Error::InvalidDimension {
            dim: d,
            reason: "stretched sets need 2 <= d <= 16",
        });
    }
    if size < 2 {
        return Err(Error::InvalidDimension {
            dim: d,
            reason: "stretched sets need at least 2 points per axis",
        });
    }
    let count = match kind {
        SetKind::Diagonal => Some(size),
        SetKind::Grid | SetKind::Uniform => size.checked_pow(d as u32),
    };
    if count.is_none_or(|c| c > MAX_POINTS) {
        return Err(Error::TooManyPoints {
            count: count.unwrap_or(usize::MAX),
        });
    }

    let base = BigInt::from(1u64 << d);
    let mut axes = Vec::with_capacity(d);
    let mut stretch = Vec::with_capacity(d);
    let mut k = base.clone();
    for _ in 0..d {
        let mut axis = Vec::with_capacity(size);
        let mut x = BigInt::one();
        for _ in 0..size {
            axis.push(x.clone());
            x *= &k;
        }
        stretch.push(k.clone());
        k = &base * axis.last().expect("size >= 2");
        axes.push(axis);
    }
    if kind == SetKind::Uniform {
        let steps = BigInt::from(size - 1);
        for axis in &mut axes {
            let last = axis.last().expect("size >= 2").clone();
            let step = (&last - 1 + &steps - 1) / &steps;
            *axis = (0..size)
                .map(|j| BigInt::one() + &step * BigInt::from(j))
                .collect();
        }
    }
    Ok(StretchedSet {
        kind,
        dim: d,
        size,
        axes,
        stretch,
    })
}

impl StretchedSet {
    pub fn kind(&self) -> SetKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Side `m` of a grid, or point count `n` of a diagonal.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn axis(&self, i: usize) -> &[BigInt] {
        &self.axes[i]
    }

    pub fn stretch_factor(&self, i: usize) -> &BigInt {
        &self.stretch[i]
    }

    pub fn stretch_factors(&self) -> &[BigInt] {
        &self.stretch
    }

    pub fn point_count(&self) -> usize {
        match self.kind {
            SetKind::Diagonal => self.size,
            _ => self.size.pow(self.dim as u32),
        }
    }

    /// Per-axis indices of every point, in lexicographic order with the first
    /// axis varying slowest.
    pub fn point_indices(&self) -> Vec<Vec<usize>> {
        match self.kind {
            SetKind::Diagonal => (0..self.size).map(|j| vec![j; self.dim]).collect(),
            _ => (0..self.point_count())
                .map(|mut k| {
                    let mut idx = vec![0; self.dim];
                    for slot in idx.iter_mut().rev() {
                        *slot = k % self.size;
                        k /= self.size;
                    }
                    idx
                })
                .collect(),
        }
    }

    pub fn point_at(&self, idx: &[usize]) -> RationalPoint {
        RationalPoint::new(
            idx.iter()
                .enumerate()
                .map(|(i, &j)| Rational::from_integer(self.axes[i][j].clone()))
                .collect(),
        )
    }

    pub fn points(&self) -> Vec<RationalPoint> {
        self.point_indices()
            .iter()
            .map(|idx| self.point_at(idx))
            .collect()
    }

    /// Writes one point per line as space-separated decimal integers.
    pub fn write_points<W: Write>(&self, mut out: W) -> io::Result<()> {
        for idx in self.point_indices() {
            let line: Vec<String> = idx
                .iter()
                .enumerate()
                .map(|(i, &j)| self.axes[i][j].to_string())
                .collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        Ok(())
    }

    /// Inverse of [`pi_map_exact`] on one axis: the point of axis `i` that maps
    /// to `u ∈ [0, 1]`.
    pub fn pi_preimage(&self, i: usize, u: &Rational) -> Result<Rational> {
        let zero = Rational::zero();
        let one = Rational::one();
        if *u < zero || *u > one {
            return Err(Error::OutsideBoundingBox { axis: i });
        }
        let axis = &self.axes[i];
        let scaled = u * Rational::from_integer(BigInt::from(self.size - 1));
        let j = scaled
            .floor()
            .to_integer()
            .to_usize()
            .expect("in range")
            .min(self.size - 2);
        let frac = scaled - Rational::from_integer(BigInt::from(j));
        let lo = Rational::from_integer(axis[j].clone());
        let hi = Rational::from_integer(axis[j + 1].clone());
        Ok(&lo + frac * (hi - &lo))
    }

    /// Midpoint of the cell of axis `i` that a census places the unit-cube
    /// coordinate `c` in. Cells are `[x_j, x_{j+1}]` with the 1-based index
    /// `j = clamp(floor(c·m), 1, m - 1)`.
    pub fn cell_midpoint(&self, i: usize, c: f64) -> Result<Rational> {
        if !(0.0..=1.0).contains(&c) {
            return Err(Error::OutOfDomain {
                axis: i,
                value: c,
                domain: "[0, 1]",
            });
        }
        let m = self.size;
        let j = ((c * m as f64).floor() as usize).clamp(1, m - 1);
        let lo = &self.axes[i][j - 1];
        let hi = &self.axes[i][j];
        Ok(Rational::new(lo + hi, BigInt::from(2)))
    }
}

fn check_point_dim(s: &StretchedSet, x: &RationalPoint) -> Result<()> {
    if x.dim() != s.dim {
        return Err(Error::DimensionMismatch {
            expected: s.dim,
            found: x.dim(),
        });
    }
    Ok(())
}

/// The order-preserving piecewise-linear map from the bounding box of `s` to
/// the unit cube, sending the `j`-th axis value (1-based) to `(j-1)/(m-1)`.
pub fn pi_map_exact(s: &StretchedSet, x: &RationalPoint) -> Result<RationalPoint> {
    check_point_dim(s, x)?;
    let steps = Rational::from_integer(BigInt::from(s.size - 1));
    let coords = x
        .as_slice()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let axis = &s.axes[i];
            let first = Rational::from_integer(axis[0].clone());
            let last = Rational::from_integer(axis[s.size - 1].clone());
            if *v < first || *v > last {
                return Err(Error::OutsideBoundingBox { axis: i });
            }
            // Last j with axis[j] <= v, capped so that [j, j+1] is a cell.
            let j = axis
                .partition_point(|a| Rational::from_integer(a.clone()) <= *v)
                .saturating_sub(1)
                .min(s.size - 2);
            let lo = Rational::from_integer(axis[j].clone());
            let hi = Rational::from_integer(axis[j + 1].clone());
            let frac = (v - &lo) / (hi - lo);
            Ok((Rational::from_integer(BigInt::from(j)) + frac) / &steps)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RationalPoint::new(coords))
}

/// Floating image of [`pi_map_exact`].
pub fn pi_map(s: &StretchedSet, x: &RationalPoint) -> Result<Point> {
    Point::new(pi_map_exact(s, x)?.to_f64())
}

/// Whether `a` and `b` are far apart: on every axis the smaller coordinate
/// times `K_i` is at most the larger one.
pub fn far_apart(a: &RationalPoint, b: &RationalPoint, s: &StretchedSet) -> bool {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .zip(&s.stretch)
        .all(|((x, y), k)| {
            let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
            lo * Rational::from_integer(k.clone()) <= *hi
        })
}

/// Exact feasibility of `{x >= 0 : A x = b}` by phase-one simplex with Bland's
/// rule over the rationals.
fn feasible(a: &[Vec<Rational>], b: &[Rational]) -> bool {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let width = cols + rows + 1;
    let mut t: Vec<Vec<Rational>> = Vec::with_capacity(rows);
    for (i, (row, rhs)) in a.iter().zip(b).enumerate() {
        let flip = rhs.is_negative();
        let mut r = vec![Rational::zero(); width];
        for (j, v) in row.iter().enumerate() {
            r[j] = if flip { -v.clone() } else { v.clone() };
        }
        r[cols + i] = Rational::one();
        r[width - 1] = if flip { -rhs.clone() } else { rhs.clone() };
        t.push(r);
    }
    // Phase-one objective: the sum of artificials, expressed in nonbasics.
    let mut obj = vec![Rational::zero(); width];
    for r in &t {
        for j in 0..cols {
            obj[j] += &r[j];
        }
        obj[width - 1] += &r[width - 1];
    }
    let mut basis: Vec<usize> = (cols..cols + rows).collect();
    while let Some(enter) = (0..width - 1).find(|&j| obj[j].is_positive()) {
        let mut leave: Option<(usize, Rational)> = None;
        for (i, r) in t.iter().enumerate() {
            if r[enter].is_positive() {
                let ratio = &r[width - 1] / &r[enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((pr, _)) = leave else {
            // Unbounded direction cannot occur for a phase-one problem.
            break;
        };
        let pivot = t[pr][enter].clone();
        for v in t[pr].iter_mut() {
            *v /= &pivot;
        }
        let prow = t[pr].clone();
        for (i, r) in t.iter_mut().enumerate() {
            if i != pr && !r[enter].is_zero() {
                let f = r[enter].clone();
                for (v, p) in r.iter_mut().zip(&prow) {
                    if !p.is_zero() {
                        *v -= &f * p;
                    }
                }
            }
        }
        let f = obj[enter].clone();
        for (v, p) in obj.iter_mut().zip(&prow) {
            if !p.is_zero() {
                *v -= &f * p;
            }
        }
        basis[pr] = enter;
    }
    obj[width - 1].is_zero()
}

/// Determinant of an integer matrix by fraction-free elimination.
fn det_bareiss(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = false;
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(pr) = (k..n).find(|&r| !m[r][k].is_zero()) else {
            return BigInt::zero();
        };
        if pr != k {
            m.swap(k, pr);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign {
        -det
    } else {
        det
    }
}

/// Decides the square system of the `d = |zs|` case by Cramer's rule over the
/// integers. Returns `None` when the system is singular.
fn square_stab(q: &[Rational], dir: &[Rational], zs: &[RationalPoint]) -> Option<bool> {
    let d = q.len();
    // Rows: coordinate equations scaled to integers, then Σλ = 1.
    // Columns: λ_1..λ_d, t, rhs.
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(d + 1);
    for i in 0..d {
        let entries: Vec<Rational> = zs
            .iter()
            .map(|z| z.0[i].clone())
            .chain([-dir[i].clone(), q[i].clone()])
            .collect();
        let lcm = entries.iter().fold(BigInt::one(), |acc, e| {
            num_integer::Integer::lcm(&acc, e.denom())
        });
        rows.push(
            entries
                .iter()
                .map(|e| e.numer() * (&lcm / e.denom()))
                .collect(),
        );
    }
    let mut last = vec![BigInt::one(); d];
    last.extend([BigInt::zero(), BigInt::one()]);
    rows.push(last);

    let with_column = |replace: Option<usize>| -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| {
                (0..=d)
                    .map(|j| {
                        if Some(j) == replace {
                            r[d + 1].clone()
                        } else {
                            r[j].clone()
                        }
                    })
                    .collect()
            })
            .collect()
    };
    let det = det_bareiss(with_column(None));
    if det.is_zero() {
        return None;
    }
    let positive = det.is_positive();
    for j in 0..=d {
        let dj = det_bareiss(with_column(Some(j)));
        // Each unknown is dj / det and must be nonnegative.
        if !dj.is_zero() && dj.is_positive() != positive {
            return Some(false);
        }
        // t = dj / det must also be at most 1.
        if j == d && dj.abs() > det.abs() {
            return Some(false);
        }
    }
    Some(true)
}

/// Whether the segment `qp` meets the convex hull of `zs`, decided exactly.
///
/// Solves `Σ λ_i z_i = q + t (p - q)`, `Σ λ_i = 1`, `λ >= 0`, `0 <= t <= 1`.
/// When `zs` has `d` points and the system is square and regular, its unique
/// solution is checked directly; otherwise an exact simplex decides.
pub fn convex_stab_exact(
    q: &RationalPoint,
    p: &RationalPoint,
    zs: &[RationalPoint],
) -> Result<bool> {
    let d = q.dim();
    if zs.is_empty() {
        return Err(Error::EmptyInput);
    }
    for x in std::iter::once(p).chain(zs) {
        if x.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: x.dim(),
            });
        }
    }
    let k = zs.len();
    let dir: Vec<Rational> = (0..d).map(|i| &p.0[i] - &q.0[i]).collect();

    if k == d {
        if let Some(hit) = square_stab(&q.0, &dir, zs) {
            return Ok(hit);
        }
    }

    // Variables: λ_1..λ_k, t, s with t + s = 1.
    let cols = k + 2;
    let mut a = Vec::with_capacity(d + 2);
    let mut b = Vec::with_capacity(d + 2);
    for (i, di) in dir.iter().enumerate() {
        let mut row: Vec<Rational> = zs.iter().map(|z| z.0[i].clone()).collect();
        row.push(-di.clone());
        row.push(Rational::zero());
        a.push(row);
        b.push(q.0[i].clone());
    }
    let mut sum = vec![Rational::one(); k];
    sum.extend([Rational::zero(), Rational::zero()]);
    a.push(sum);
    b.push(Rational::one());
    let mut ts = vec![Rational::zero(); cols];
    ts[k] = Rational::one();
    ts[k + 1] = Rational::one();
    a.push(ts);
    b.push(Rational::one());
    Ok(feasible(&a, &b))
}

/// Outcome of an exhaustive census over all `d`-subsets of a set.
#[derive(Clone, Debug)]
pub struct StabCensus {
    pub total_simplices: u64,
    pub stabbed: u64,
    /// Subsets every point of which is far apart from both segment endpoints.
    pub far_apart: u64,
    pub fraction: Rational,
    pub segment: (RationalPoint, RationalPoint),
}

impl StabCensus {
    pub fn fraction_f64(&self) -> f64 {
        self.fraction.to_f64().unwrap_or(f64::NAN)
    }
}

/// Number of `d`-subsets a census of `s` would enumerate.
pub fn census_size(s: &StretchedSet) -> u128 {
    binomial(s.point_count() as u128, s.dim as u128)
}

/// [`stab_census_with_limit`] with [`DEFAULT_CENSUS_LIMIT`].
pub fn stab_census(s: &StretchedSet, q: &RationalPoint, p: &RationalPoint) -> Result<StabCensus> {
    stab_census_with_limit(s, q, p, DEFAULT_CENSUS_LIMIT)
}

/// Counts the `d`-subsets of `s` whose convex hull the segment `qp` meets,
/// using [`convex_stab_exact`] on every subset.
pub fn stab_census_with_limit(
    s: &StretchedSet,
    q: &RationalPoint,
    p: &RationalPoint,
    limit: u128,
) -> Result<StabCensus> {
    check_point_dim(s, q)?;
    check_point_dim(s, p)?;
    let needed = census_size(s);
    if needed > limit {
        return Err(Error::BudgetExceeded { needed, limit });
    }
    let pts = s.points();
    let d = s.dim;
    let n = pts.len();
    let far: Vec<bool> = pts
        .iter()
        .map(|z| far_apart(z, q, s) && far_apart(z, p, s))
        .collect();

    let per_first: Vec<Result<(u64, u64, u64)>> = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut counts = (0u64, 0u64, 0u64);
            if n - first < d {
                return Ok(counts);
            }
            // Remaining d-1 indices drawn from first+1..n in lexicographic order.
            let mut rest: Vec<usize> = (first + 1..first + d).collect();
            let mut subset: Vec<RationalPoint> = Vec::with_capacity(d);
            loop {
                subset.clear();
                subset.push(pts[first].clone());
                subset.extend(rest.iter().map(|&i| pts[i].clone()));
                counts.0 += 1;
                if convex_stab_exact(q, p, &subset)? {
                    counts.1 += 1;
                }
                if far[first] && rest.iter().all(|&i| far[i]) {
                    counts.2 += 1;
                }
                // Advance to the next combination.
                let r = rest.len();
                let mut i = r;
                while i > 0 && rest[i - 1] == n - r + i - 1 {
                    i -= 1;
                }
                if i == 0 {
                    break;
                }
                rest[i - 1] += 1;
                for k in i..r {
                    rest[k] = rest[k - 1] + 1;
                }
            }
            Ok(counts)
        })
        .collect();
    let (mut total, mut stabbed, mut far_count) = (0u64, 0u64, 0u64);
    for c in per_first {
        let (t, st, f) = c?;
        total += t;
        stabbed += st;
        far_count += f;
    }
    Ok(StabCensus {
        total_simplices: total,
        stabbed,
        far_apart: far_count,
        fraction: Rational::new(BigInt::from(stabbed), BigInt::from(total.max(1))),
        segment: (q.clone(), p.clone()),
    })
}

/// Places the unit-cube segment `(q, p)` in `s` at the midpoints of the cells
/// chosen by [`StretchedSet::cell_midpoint`].
pub fn census_segment(
    s: &StretchedSet,
    q: &Point,
    p: &Point,
) -> Result<(RationalPoint, RationalPoint)> {
    let place = |x: &Point| -> Result<RationalPoint> {
        if x.dim() != s.dim {
            return Err(Error::DimensionMismatch {
                expected: s.dim,
                found: x.dim(),
            });
        }
        Ok(RationalPoint::new(
            (0..s.dim)
                .map(|i| s.cell_midpoint(i, x[i]))
                .collect::<Result<Vec<_>>>()?,
        ))
    };
    Ok((place(q)?, place(p)?))
}

/// A segment and a `d`-subset of a stretched grid, far apart from each other.
#[derive(Clone, Debug)]
pub struct FarApartInstance {
    pub q: RationalPoint,
    pub p: RationalPoint,
    pub zs: Vec<RationalPoint>,
}

/// Draws a random far-apart instance on the grid `s`.
///
/// The `d` grid points use pairwise distinct indices on every axis. Each segment coordinate lies at a random rational position
/// inside a range that keeps it far apart from every used grid value on that
/// axis. Returns `None` unless `s` is a grid with side `m > d`.
pub fn far_apart_instance<R: Rng>(s: &StretchedSet, rng: &mut R) -> Option<FarApartInstance> {
    let d = s.dim;
    let m = s.size;
    if s.kind != SetKind::Grid || m <= d {
        return None;
    }
    let mut used: Vec<Vec<usize>> = Vec::with_capacity(d);
    for _ in 0..d {
        let picks = rand::seq::index::sample(rng, m, d).into_vec();
        used.push(picks);
    }
    let zs: Vec<RationalPoint> = (0..d)
        .map(|k| s.point_at(&(0..d).map(|i| used[i][k]).collect::<Vec<_>>()))
        .collect();

    let mut ranges: Vec<Vec<(usize, usize)>> = Vec::with_capacity(d);
    for axis_used in &used {
        let mut sorted = axis_used.clone();
        sorted.sort_unstable();
        let mut r = Vec::new();
        if sorted[0] >= 1 {
            r.push((0, sorted[0] - 1));
        }
        for w in sorted.windows(2) {
            if w[1] - w[0] >= 2 {
                r.push((w[0] + 1, w[1] - 1));
            }
        }
        let top = *sorted.last().expect("d >= 1");
        if top + 1 < m {
            r.push((top + 1, m - 1));
        }
        ranges.push(r);
    }

    let denom = BigInt::from(1u64 << 32);
    let draw = |rng: &mut R| -> RationalPoint {
        RationalPoint::new(
            (0..d)
                .map(|i| {
                    let (a, b) = ranges[i][rng.gen_range(0..ranges[i].len())];
                    let lo = Rational::from_integer(s.axes[i][a].clone());
                    let hi = Rational::from_integer(s.axes[i][b].clone());
                    let u =
                        Rational::new(BigInt::from(rng.gen_range(1u64..1u64 << 32)), denom.clone());
                    &lo + u * (hi - &lo)
                })
                .collect(),
        )
    };
    // Prefer endpoints without a shared coordinate; when every admissible
    // range on some axis is a single value the tie is forced.
    let mut q = draw(rng);
    let mut p = draw(rng);
    for _ in 0..16 {
        if q.as_slice().iter().zip(p.as_slice()).all(|(a, b)| a != b) {
            break;
        }
        q = draw(rng);
        p = draw(rng);
    }
    Some(FarApartInstance { q, p, zs })
}

/// Outcome of comparing the convex oracle with the stair predicate.
#[derive(Clone, Debug)]
pub struct TransferenceReport {
    pub dim: usize,
    pub side: usize,
    pub trials: usize,
    pub mismatches: usize,
    pub stabbed: usize,
    pub first_mismatch: Option<FarApartInstance>,
}

/// Decides one instance both ways: the exact convex oracle on the stretched
/// coordinates, and stair-hull intersection on the exact `π`-images.
pub fn transference_agrees(s: &StretchedSet, inst: &FarApartInstance) -> Result<(bool, bool)> {
    let convex = convex_stab_exact(&inst.q, &inst.p, &inst.zs)?;
    let ys = [pi_map_exact(s, &inst.q)?, pi_map_exact(s, &inst.p)?];
    let zs = inst
        .zs
        .iter()
        .map(|z| pi_map_exact(s, z))
        .collect::<Result<Vec<_>>>()?;
    let stair = stconv_intersect_across(&ys, &zs)?;
    Ok((convex, stair))
}

/// Runs `trials` random far-apart instances on the `d`-dimensional grid of
/// side `m`. Trial `k` draws from the substream `(seed, k)`.
pub fn transference_check(
    d: usize,
    m: usize,
    trials: usize,
    seed: u64,
) -> Result<TransferenceReport> {
    let s = build_stretched(SetKind::Grid, d, m)?;
    if m <= d {
        return Err(Error::InvalidDimension {
            dim: d,
            reason: "far-apart instances need side m > d",
        });
    }
    let outcomes: Vec<Result<(bool, bool, FarApartInstance)>> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(seed, k as u64, 0);
            let inst = far_apart_instance(&s, &mut rng).expect("grid with m > d");
            let (convex, stair) = transference_agrees(&s, &inst)?;
            Ok((convex, stair, inst))
        })
        .collect();
    let mut report = TransferenceReport {
        dim: d,
        side: m,
        trials,
        mismatches: 0,
        stabbed: 0,
        first_mismatch: None,
    };
    for o in outcomes {
        let (convex, stair, inst) = o?;
        if convex {
            report.stabbed += 1;
        }
        if convex != stair {
            report.mismatches += 1;
            report.first_mismatch.get_or_insert(inst);
        }
    }
    Ok(report)
}

/// Hit-fraction estimate with its binomial standard error.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
    pub hits: u64,
}

impl McEstimate {
    fn from_hits(hits: u64, samples: u64) -> Self {
        let r = hits as f64 / samples as f64;
        McEstimate {
            estimate: r,
            std_error: (r * (1.0 - r) / samples as f64).sqrt(),
            samples,
            hits,
        }
    }
}

const MC_CHUNK: u64 = 1 << 13;

fn check_mc_inputs(q: &Point, p: &Point, samples: u64) -> Result<()> {
    if q.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: q.dim(),
            found: p.dim(),
        });
    }
    if samples == 0 {
        return Err(Error::BudgetTooSmall {
            budget: 0,
            needed: 1,
        });
    }
    for x in [q, p] {
        for (axis, &v) in x.as_slice().iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfDomain {
                    axis,
                    value: v,
                    domain: "[0, 1]",
                });
            }
        }
    }
    // Redrawing samples cannot resolve a tie between the endpoints themselves.
    if let Some(axis) = (0..q.dim()).find(|&i| q[i] == p[i]) {
        return Err(Error::SharedCoordinate { axis });
    }
    Ok(())
}

/// Counts hits over `samples` draws, chunk `c` using the substream `(seed, c)`.
/// `draw` fills the `d` sample points; tuples with a coordinate tie are redrawn.
fn mc_count<F>(q: &Point, p: &Point, samples: u64, seed: u64, draw: F) -> u64
where
    F: Fn(&mut rand_chacha::ChaCha8Rng, &mut [Vec<f64>]) + Sync,
{
    let d = q.dim();
    let chunks = samples.div_ceil(MC_CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = substream(seed, c, 0);
            let len = MC_CHUNK.min(samples - c * MC_CHUNK);
            let mut zs = vec![vec![0.0; d]; d];
            let mut hits = 0u64;
            for _ in 0..len {
                loop {
                    draw(&mut rng, &mut zs);
                    let rows: Vec<&[f64]> = zs.iter().map(|z| z.as_slice()).collect();
                    if let Some(hit) = stab_check_rows(q.as_slice(), p.as_slice(), &rows) {
                        hits += hit as u64;
                        break;
                    }
                }
            }
            hits
        })
        .sum()
}

/// Monte Carlo estimate of the probability that `d` independent uniform points
/// of `[0,1]^d` span a stair-simplex meeting the stair-path `σ(q, p)`.
pub fn mc_estimate_recfsg(q: &Point, p: &Point, samples: u64, seed: u64) -> Result<McEstimate> {
    check_mc_inputs(q, p, samples)?;
    let hits = mc_count(q, p, samples, seed, |rng, zs| {
        for z in zs.iter_mut() {
            for v in z.iter_mut() {
                *v = rng.gen();
            }
        }
    });
    Ok(McEstimate::from_hits(hits, samples))
}

/// Monte Carlo estimate of `d!·FSD(q, p)`: the probability that `d` sorted
/// uniform values, taken as diagonal points `(a, ..., a)`, span a stair-simplex
/// meeting `σ(q, p)`.
pub fn mc_estimate_fsd(q: &Point, p: &Point, samples: u64, seed: u64) -> Result<McEstimate> {
    check_mc_inputs(q, p, samples)?;
    check_conditions(q.as_slice(), p.as_slice())?;
    let d = q.dim();
    let hits = mc_count(q, p, samples, seed, |rng, zs| {
        let mut a: Vec<f64> = (0..d).map(|_| rng.gen()).collect();
        a.sort_by(f64::total_cmp);
        for (z, &v) in zs.iter_mut().zip(&a) {
            z.fill(v);
        }
    });
    Ok(McEstimate::from_hits(hits, samples))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn grid_axes_follow_the_stretch_recurrence() {
        let s = build_stretched(SetKind::Grid, 2, 3).unwrap();
        let ints = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        assert_eq!(s.axis(0), ints(&[1, 4, 16]).as_slice());
        assert_eq!(s.axis(1), ints(&[1, 64, 4096]).as_slice());
        assert_eq!(s.stretch_factors(), ints(&[4, 64]).as_slice());
        assert_eq!(s.point_count(), 9);
    }

    #[test]
    fn diagonal_reuses_axes() {
        let s = build_stretched(SetKind::Diagonal, 3, 4).unwrap();
        let g = build_stretched(SetKind::Grid, 3, 4).unwrap();
        let pts = s.points();
        assert_eq!(pts.len(), 4);
        for (j, pt) in pts.iter().enumerate() {
            for i in 0..3 {
                assert_eq!(
                    pt.as_slice()[i],
                    Rational::from_integer(g.axis(i)[j].clone())
                );
            }
        }
    }

    #[test]
    fn consecutive_axis_values_are_far_apart() {
        for kind in [SetKind::Grid, SetKind::Diagonal] {
            let s = build_stretched(kind, 3, 5).unwrap();
            for i in 0..3 {
                assert_eq!(s.axis(i)[0], BigInt::one());
                for w in s.axis(i).windows(2) {
                    assert!(s.stretch_factor(i) * &w[0] <= w[1]);
                }
            }
        }
    }

    #[test]
    fn uniform_spans_the_stretched_box() {
        let u = build_stretched(SetKind::Uniform, 2, 3).unwrap();
        let ints = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        assert_eq!(u.axis(0), ints(&[1, 9, 17]).as_slice());
        assert_eq!(u.axis(1), ints(&[1, 2049, 4097]).as_slice());
    }

    #[test]
    fn build_rejects_bad_sizes() {
        assert!(build_stretched(SetKind::Grid, 1, 3).is_err());
        assert!(build_stretched(SetKind::Grid, 2, 1).is_err());
        assert!(matches!(
            build_stretched(SetKind::Grid, 16, 3),
            Err(Error::TooManyPoints { .. })
        ));
    }

    #[test]
    fn pi_sends_grid_points_to_the_uniform_grid() {
        let s = build_stretched(SetKind::Grid, 3, 4).unwrap();
        let corner = RationalPoint::from_i64(&[1, 1, 1]);
        assert_eq!(pi_map(&s, &corner).unwrap().as_slice(), &[0.0, 0.0, 0.0]);
        let idx = [2, 0, 3];
        let img = pi_map_exact(&s, &s.point_at(&idx)).unwrap();
        assert_eq!(img.as_slice(), &[r(2, 3), r(0, 1), r(1, 1)]);
        let mid = Rational::new(s.axis(1)[0].clone() + &s.axis(1)[1], BigInt::from(2));
        let x = RationalPoint::new(vec![Rational::one(), mid, Rational::one()]);
        assert_eq!(pi_map_exact(&s, &x).unwrap().as_slice()[1], r(1, 6));
    }

    #[test]
    fn pi_rejects_points_outside_the_box() {
        let s = build_stretched(SetKind::Grid, 2, 3).unwrap();
        let below = RationalPoint::new(vec![r(1, 2), r(1, 1)]);
        assert!(matches!(
            pi_map(&s, &below),
            Err(Error::OutsideBoundingBox { axis: 0 })
        ));
        let above = RationalPoint::from_i64(&[16, 4097]);
        assert!(matches!(
            pi_map(&s, &above),
            Err(Error::OutsideBoundingBox { axis: 1 })
        ));
    }

    #[test]
    fn pi_preimage_inverts_pi() {
        let s = build_stretched(SetKind::Grid, 2, 4).unwrap();
        for (n, d) in [(0, 1), (1, 7), (1, 3), (5, 9), (1, 1)] {
            let u = r(n, d);
            let x = s.pi_preimage(1, &u).unwrap();
            let pt = RationalPoint::new(vec![Rational::one(), x]);
            assert_eq!(pi_map_exact(&s, &pt).unwrap().as_slice()[1], u);
        }
    }

    #[test]
    fn far_apart_examples() {
        let s = build_stretched(SetKind::Grid, 2, 3).unwrap();
        let a = s.point_at(&[0, 0]);
        let b = s.point_at(&[1, 2]);
        let c = s.point_at(&[2, 0]);
        assert!(far_apart(&a, &b, &s));
        assert!(!far_apart(&a, &c, &s));
        assert!(!far_apart(&a, &a, &s));
    }

    #[test]
    fn convex_oracle_examples() {
        let zs = [
            RationalPoint::from_i64(&[0, 0]),
            RationalPoint::from_i64(&[2, 0]),
        ];
        let q = RationalPoint::from_i64(&[1, -1]);
        let p = RationalPoint::from_i64(&[1, 1]);
        assert!(convex_stab_exact(&q, &p, &zs).unwrap());
        let q = RationalPoint::from_i64(&[3, 1]);
        let p = RationalPoint::from_i64(&[4, 2]);
        assert!(!convex_stab_exact(&q, &p, &zs).unwrap());
    }

    #[test]
    fn convex_oracle_handles_degenerate_inputs() {
        // Segment collinear with a degenerate simplex: the square system is singular.
        let zs = [
            RationalPoint::from_i64(&[0, 0]),
            RationalPoint::from_i64(&[2, 0]),
        ];
        let on = [
            RationalPoint::from_i64(&[1, 0]),
            RationalPoint::from_i64(&[5, 0]),
        ];
        assert!(convex_stab_exact(&on[0], &on[1], &zs).unwrap());
        let off = [
            RationalPoint::from_i64(&[3, 0]),
            RationalPoint::from_i64(&[5, 0]),
        ];
        assert!(!convex_stab_exact(&off[0], &off[1], &zs).unwrap());
        let touching = [
            RationalPoint::from_i64(&[2, 0]),
            RationalPoint::from_i64(&[5, 0]),
        ];
        assert!(convex_stab_exact(&touching[0], &touching[1], &zs).unwrap());
        // Repeated vertex and a segment through it.
        let rep = [
            RationalPoint::from_i64(&[1, 1]),
            RationalPoint::from_i64(&[1, 1]),
        ];
        let q = RationalPoint::from_i64(&[0, 0]);
        let p = RationalPoint::from_i64(&[2, 2]);
        assert!(convex_stab_exact(&q, &p, &rep).unwrap());
        let p = RationalPoint::from_i64(&[2, 3]);
        assert!(!convex_stab_exact(&q, &p, &rep).unwrap());
        // More than d points.
        let tri = [
            RationalPoint::from_i64(&[0, 0]),
            RationalPoint::from_i64(&[4, 0]),
            RationalPoint::from_i64(&[0, 4]),
        ];
        let q = RationalPoint::from_i64(&[1, 1]);
        let p = RationalPoint::from_i64(&[1, 2]);
        assert!(convex_stab_exact(&q, &p, &tri).unwrap());
        let q = RationalPoint::from_i64(&[3, 3]);
        let p = RationalPoint::from_i64(&[5, 2]);
        assert!(!convex_stab_exact(&q, &p, &tri).unwrap());
    }

    #[test]
    fn bareiss_determinants() {
        let m = |rows: &[&[i64]]| -> Vec<Vec<BigInt>> {
            rows.iter()
                .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
                .collect()
        };
        assert_eq!(det_bareiss(m(&[&[2, 0], &[0, 3]])), BigInt::from(6));
        assert_eq!(det_bareiss(m(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
        assert_eq!(
            det_bareiss(m(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]])),
            BigInt::from(-3)
        );
        assert_eq!(det_bareiss(m(&[&[1, 2], &[2, 4]])), BigInt::zero());
        assert_eq!(
            det_bareiss(m(&[
                &[0, 2, 1, 3],
                &[1, 0, 0, 2],
                &[3, 1, 4, 0],
                &[2, 2, 0, 1]
            ])),
            BigInt::from(57)
        );
    }

    #[test]
    fn square_path_matches_simplex_path() {
        let s = build_stretched(SetKind::Grid, 2, 4).unwrap();
        let q = RationalPoint::new(vec![r(7, 2), r(300, 1)]);
        let p = RationalPoint::new(vec![r(50, 1), r(3, 2)]);
        let pts = s.points();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let zs = [pts[i].clone(), pts[j].clone()];
                let dir: Vec<Rational> = (0..2).map(|k| &p.0[k] - &q.0[k]).collect();
                let mut a = Vec::new();
                let mut b = Vec::new();
                for (k, dk) in dir.iter().enumerate() {
                    a.push(vec![
                        zs[0].0[k].clone(),
                        zs[1].0[k].clone(),
                        -dk.clone(),
                        Rational::zero(),
                    ]);
                    b.push(q.0[k].clone());
                }
                a.push(vec![
                    Rational::one(),
                    Rational::one(),
                    Rational::zero(),
                    Rational::zero(),
                ]);
                b.push(Rational::one());
                a.push(vec![
                    Rational::zero(),
                    Rational::zero(),
                    Rational::one(),
                    Rational::one(),
                ]);
                b.push(Rational::one());
                let lp = feasible(&a, &b);
                if let Some(fast) = square_stab(&q.0, &dir, &zs) {
                    assert_eq!(fast, lp, "{} {}", zs[0], zs[1]);
                }
            }
        }
    }

    #[test]
    fn census_outside_box_is_empty() {
        let s = build_stretched(SetKind::Grid, 2, 3).unwrap();
        let q = RationalPoint::from_i64(&[100, 1]);
        let p = RationalPoint::from_i64(&[100, 5000]);
        let c = stab_census(&s, &q, &p).unwrap();
        assert_eq!(c.total_simplices, 36);
        assert_eq!(c.stabbed, 0);
    }

    #[test]
    fn census_respects_its_limit() {
        let s = build_stretched(SetKind::Grid, 3, 5).unwrap();
        let q = RationalPoint::from_i64(&[1, 1, 1]);
        let err = stab_census_with_limit(&s, &q, &q, 1000).unwrap_err();
        assert!(matches!(
            err,
            Error::BudgetExceeded {
                needed: 317_750,
                limit: 1000
            }
        ));
    }

    #[test]
    fn cell_midpoints() {
        let s = build_stretched(SetKind::Grid, 2, 3).unwrap();
        assert_eq!(s.cell_midpoint(0, 0.0).unwrap(), r(5, 2));
        assert_eq!(s.cell_midpoint(0, 0.5).unwrap(), r(5, 2));
        assert_eq!(s.cell_midpoint(0, 0.7).unwrap(), r(10, 1));
        assert_eq!(s.cell_midpoint(0, 1.0).unwrap(), r(10, 1));
        assert!(s.cell_midpoint(0, 1.5).is_err());
    }

    #[test]
    fn export_writes_integers() {
        let s = build_stretched(SetKind::Grid, 2, 2).unwrap();
        let mut buf = Vec::new();
        s.write_points(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "1 1\n1 16\n4 1\n4 16\n");
    }

    #[test]
    fn mc_is_deterministic_and_checks_inputs() {
        let q: Point = [0.5, 0.9].into();
        let p: Point = [0.2, 0.4].into();
        let a = mc_estimate_recfsg(&q, &p, 20_000, 9).unwrap();
        let b = mc_estimate_recfsg(&q, &p, 20_000, 9).unwrap();
        assert_eq!(a, b);
        let tie: Point = [0.5, 0.4].into();
        assert!(matches!(
            mc_estimate_recfsg(&tie, &p, 10, 0),
            Err(Error::SharedCoordinate { axis: 1 })
        ));
        assert!(mc_estimate_recfsg(&q, &p, 0, 0).is_err());
        let bad_q: Point = [0.9, 0.9].into();
        assert!(matches!(
            mc_estimate_fsd(&bad_q, &p, 10, 0),
            Err(Error::ConditionViolation(_))
        ));
    }

    #[test]
    fn one_dimensional_interval_hit() {
        let q: Point = [0.3].into();
        let p: Point = [0.7].into();
        let e = mc_estimate_recfsg(&q, &p, 200_000, 1).unwrap();
        assert!((e.estimate - 0.4).abs() <= 4.0 * e.std_error, "{e:?}");
    }
}
