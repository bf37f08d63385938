//! Stretched-grid side: the probability that a random `d`-point stair-simplex in
//! the unit cube meets a stair-path, path types, and the per-type objectives
//! whose maxima bound the line-stabbing constant.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stair::{self, Point};
use crate::Scalar;

fn check_unit_cube(pt: &[f64]) -> Result<()> {
    for (axis, &v) in pt.iter().enumerate() {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::OutOfDomain {
                axis,
                value: v,
                domain: "[0, 1]",
            });
        }
    }
    Ok(())
}

fn factorial<T: Scalar>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, k| acc * T::from_usize(k).unwrap())
}

fn pow<T: Scalar>(x: &T, n: usize) -> T {
    (0..n).fold(T::one(), |acc, _| acc * x.clone())
}

/// Probability that a uniformly random `d`-tuple of points of `[0,1]^d` spans a
/// stair-simplex meeting `σ(q, p)`.
pub fn recfsg(q: &Point, p: &Point) -> Result<f64> {
    if q.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: q.dim(),
            found: p.dim(),
        });
    }
    check_unit_cube(q.as_slice())?;
    check_unit_cube(p.as_slice())?;
    Ok(recfsg_slices(q.as_slice(), p.as_slice()))
}

/// Unchecked evaluation of the stabbing recursion, generic so it can also run
/// in exact arithmetic.
///
/// With `x` the endpoint of larger height and `y` the other one,
/// `R_d = d!(x_d^d - y_d^d) Π_{i<d} y_i^i (1 - y_i) + d(1 - x_d) x_d^(d-1) R_{d-1}`
/// and `R_1 = x_1 - y_1`.
pub fn recfsg_slices<T: Scalar>(q: &[T], p: &[T]) -> T {
    let d = q.len();
    let mut total = T::zero();
    let mut weight = T::one();
    for k in (2..=d).rev() {
        let (x, y) = if p[k - 1] >= q[k - 1] { (p, q) } else { (q, p) };
        let xk = &x[k - 1];
        let yk = &y[k - 1];
        let mut head = factorial::<T>(k) * (pow(xk, k) - pow(yk, k));
        for i in 1..k {
            let yi = &y[i - 1];
            head = head * pow(yi, i) * (T::one() - yi.clone());
        }
        total = total + weight.clone() * head;
        weight = weight * T::from_usize(k).unwrap() * (T::one() - xk.clone()) * pow(xk, k - 1);
    }
    let base = if p[0] >= q[0] {
        p[0].clone() - q[0].clone()
    } else {
        q[0].clone() - p[0].clone()
    };
    total + weight * base
}

/// A stair-path type `T = { j : q_j < p_j }`, axes numbered from 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PathType {
    dim: usize,
    members: BTreeSet<usize>,
}

impl PathType {
    pub fn new(dim: usize, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let members: BTreeSet<usize> = members.into_iter().collect();
        if dim == 0 {
            return Err(Error::InvalidDimension {
                dim,
                reason: "path types need d >= 1",
            });
        }
        if let Some(&bad) = members.iter().find(|&&j| j == 0 || j > dim) {
            return Err(Error::OutOfDomain {
                axis: bad,
                value: bad as f64,
                domain: "the axis range 1..=d",
            });
        }
        Ok(PathType { dim, members })
    }

    /// The type realised by the pair `(q, p)`.
    pub fn of(q: &Point, p: &Point) -> Result<Self> {
        if q.dim() != p.dim() {
            return Err(Error::DimensionMismatch {
                expected: q.dim(),
                found: p.dim(),
            });
        }
        PathType::new(q.dim(), (1..=q.dim()).filter(|&j| q[j - 1] < p[j - 1]))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn members(&self) -> &BTreeSet<usize> {
        &self.members
    }

    pub fn contains(&self, axis: usize) -> bool {
        self.members.contains(&axis)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn complement(&self) -> PathType {
        PathType {
            dim: self.dim,
            members: (1..=self.dim)
                .filter(|j| !self.members.contains(j))
                .collect(),
        }
    }

    /// Neither the first nor the last axis belongs to the type.
    pub fn is_normalized(&self) -> bool {
        self.dim >= 2 && !self.contains(1) && !self.contains(self.dim)
    }
}

impl fmt::Display for PathType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.members.is_empty() {
            return write!(f, "{{}}");
        }
        write!(f, "{{")?;
        for (i, m) in self.members.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, "}}")
    }
}

/// Parses the member list of a type: `{2,3}`, `2,3`, `{}` or `empty`.
/// The dimension must be supplied separately through [`PathType::new`].
pub fn parse_members(s: &str) -> Result<Vec<usize>> {
    let t = s
        .trim()
        .trim_start_matches('{')
        .trim_end_matches('}')
        .trim();
    if t.is_empty() || t.eq_ignore_ascii_case("empty") || t == "∅" {
        return Ok(Vec::new());
    }
    t.split(',')
        .map(|x| {
            usize::from_str(x.trim()).map_err(|_| {
                Error::ConditionViolation(format!("cannot parse path type member {x:?}"))
            })
        })
        .collect()
}

/// The `2^(d-2)` normalized types: all subsets of `{2, .., d-1}`, in binary
/// counting order with axis 2 as the lowest bit.
pub fn enumerate_types(d: usize) -> Result<Vec<PathType>> {
    if d < 2 {
        return Err(Error::InvalidDimension {
            dim: d,
            reason: "path types are enumerated for d >= 2",
        });
    }
    let inner = d - 2;
    Ok((0u64..1 << inner)
        .map(|mask| PathType {
            dim: d,
            members: (0..inner)
                .filter(|b| mask >> b & 1 == 1)
                .map(|b| b + 2)
                .collect(),
        })
        .collect())
}

/// A stair-path together with its type.
#[derive(Clone, Debug, PartialEq)]
pub struct PathConfig {
    pub q: Point,
    pub p: Point,
    pub ty: PathType,
}

impl PathConfig {
    /// Checks that the sign pattern of `p - q` agrees with the type. Ties are
    /// accepted since they belong to the closure of every adjacent type.
    pub fn new(q: Point, p: Point, ty: PathType) -> Result<Self> {
        if q.dim() != ty.dim() || p.dim() != ty.dim() {
            return Err(Error::DimensionMismatch {
                expected: ty.dim(),
                found: q.dim().max(p.dim()),
            });
        }
        for j in 1..=ty.dim() {
            let (qj, pj) = (q[j - 1], p[j - 1]);
            let ok = if ty.contains(j) { qj <= pj } else { qj >= pj };
            if !ok {
                return Err(Error::InconsistentType { axis: j });
            }
        }
        Ok(PathConfig { q, p, ty })
    }
}

/// Maps `(T, q, p)` to an equivalent configuration with `d ∉ T` and `1 ∉ T`.
///
/// If `d ∈ T` the endpoints are swapped and `T` complemented; then, if
/// `1 ∈ T`, the first coordinate of both endpoints is reflected `x ↦ 1 - x`.
/// Both moves leave [`recfsg`] unchanged.
pub fn normalize_type(ty: &PathType, q: &Point, p: &Point) -> Result<PathConfig> {
    let cfg = PathConfig::new(q.clone(), p.clone(), ty.clone())?;
    let d = ty.dim();
    let (mut q, mut p, mut ty) = if cfg.ty.contains(d) {
        (cfg.p, cfg.q, cfg.ty.complement())
    } else {
        (cfg.q, cfg.p, cfg.ty)
    };
    if ty.contains(1) {
        let mut qv = q.into_vec();
        let mut pv = p.into_vec();
        qv[0] = 1.0 - qv[0];
        pv[0] = 1.0 - pv[0];
        q = Point::from_vec_unchecked(qv);
        p = Point::from_vec_unchecked(pv);
        ty.members.remove(&1);
    }
    Ok(PathConfig { q, p, ty })
}

/// Pushes the endpoints of a normalized configuration to the cube boundary:
/// `p_d = 0`, and `q_{max T} = 0` when `T` is nonempty, otherwise `q_1 = 1`.
pub fn extend_to_boundary(cfg: &PathConfig) -> Result<PathConfig> {
    let d = cfg.ty.dim();
    if cfg.ty.contains(d) {
        return Err(Error::NotNormalized("the last axis belongs to the type"));
    }
    let mut q = cfg.q.clone().into_vec();
    let mut p = cfg.p.clone().into_vec();
    p[d - 1] = 0.0;
    match cfg.ty.members().iter().next_back() {
        Some(&top) => q[top - 1] = 0.0,
        None => q[0] = 1.0,
    }
    Ok(PathConfig {
        q: Point::from_vec_unchecked(q),
        p: Point::from_vec_unchecked(p),
        ty: cfg.ty.clone(),
    })
}

/// A coordinate of one of the two path endpoints, axis numbered from 1.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Slot {
    Q(usize),
    P(usize),
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::Q(i) => write!(f, "q{i}"),
            Slot::P(i) => write!(f, "p{i}"),
        }
    }
}

/// Maximization problem for one normalized stretched-grid type.
///
/// The free vector lists `p_1..p_d` then `q_1..q_d`, skipping the two fixed
/// boundary coordinates. The objective is `recfsg(q, p) / d!` on the closed
/// region where `(q, p)` has the sign pattern of the type, and 0 elsewhere.
#[derive(Clone, Debug)]
pub struct ObjectiveSpec {
    pub dim: usize,
    pub ty: PathType,
    pub fixed: Vec<(Slot, f64)>,
    pub free_slots: Vec<Slot>,
    /// Pairs `(low, high)` that must satisfy `low <= high`.
    pub ordering_constraints: Vec<(Slot, Slot)>,
    scale: f64,
}

impl ObjectiveSpec {
    pub fn n_free(&self) -> usize {
        self.free_slots.len()
    }

    pub fn bounds(&self) -> Vec<(f64, f64)> {
        vec![(0.0, 1.0); self.n_free()]
    }

    /// Assembles `(q, p)` from a free vector. Values are not range checked.
    pub fn qp_from_free(&self, free: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut q = vec![0.0; self.dim];
        let mut p = vec![0.0; self.dim];
        let mut put = |slot: Slot, v: f64| match slot {
            Slot::Q(i) => q[i - 1] = v,
            Slot::P(i) => p[i - 1] = v,
        };
        for &(slot, v) in &self.fixed {
            put(slot, v);
        }
        for (&slot, &v) in self.free_slots.iter().zip(free) {
            put(slot, v);
        }
        (q, p)
    }

    /// Extracts the free vector from a full configuration.
    pub fn free_from_qp(&self, q: &[f64], p: &[f64]) -> Vec<f64> {
        self.free_slots
            .iter()
            .map(|s| match *s {
                Slot::Q(i) => q[i - 1],
                Slot::P(i) => p[i - 1],
            })
            .collect()
    }

    fn slot_value(q: &[f64], p: &[f64], s: Slot) -> f64 {
        match s {
            Slot::Q(i) => q[i - 1],
            Slot::P(i) => p[i - 1],
        }
    }

    pub fn is_feasible(&self, free: &[f64]) -> bool {
        if free.len() != self.n_free() || free.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return false;
        }
        let (q, p) = self.qp_from_free(free);
        self.ordering_constraints
            .iter()
            .all(|&(lo, hi)| Self::slot_value(&q, &p, lo) <= Self::slot_value(&q, &p, hi))
    }

    pub fn evaluate(&self, free: &[f64]) -> f64 {
        if !self.is_feasible(free) {
            return 0.0;
        }
        let (q, p) = self.qp_from_free(free);
        recfsg_slices(&q, &p) / self.scale
    }
}

/// Builds the objective for type `ty` in dimension `d >= 3`.
pub fn grid_objective(d: usize, ty: &PathType) -> Result<ObjectiveSpec> {
    if d < 3 {
        return Err(Error::InvalidDimension {
            dim: d,
            reason: "grid objectives are defined for d >= 3",
        });
    }
    if ty.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: ty.dim(),
        });
    }
    if !ty.is_normalized() {
        return Err(Error::NotNormalized("the type contains axis 1 or axis d"));
    }
    let fixed_q = match ty.members().iter().next_back() {
        Some(&top) => (Slot::Q(top), 0.0),
        None => (Slot::Q(1), 1.0),
    };
    let fixed = vec![fixed_q, (Slot::P(d), 0.0)];
    let free_slots = (1..=d)
        .map(Slot::P)
        .chain((1..=d).map(Slot::Q))
        .filter(|s| !fixed.iter().any(|(f, _)| f == s))
        .collect();
    let ordering_constraints = (1..=d)
        .map(|j| {
            if ty.contains(j) {
                (Slot::Q(j), Slot::P(j))
            } else {
                (Slot::P(j), Slot::Q(j))
            }
        })
        .collect();
    Ok(ObjectiveSpec {
        dim: d,
        ty: ty.clone(),
        fixed,
        free_slots,
        ordering_constraints,
        scale: factorial::<f64>(d),
    })
}

/// Product of the `d + 1` type-region volumes around `a`; it approximates the
/// fraction of full-dimensional simplices containing a point.
pub fn fsl_objective(a: &Point) -> Result<f64> {
    Ok(stair::type_region_volumes(a)?.iter().product())
}

/// [`fsl_objective`] on the closed cube, zero outside it. For optimizers.
pub fn fsl_objective_closed(a: &[f64]) -> f64 {
    if a.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return 0.0;
    }
    stair::type_volumes_closed(a).iter().product()
}
