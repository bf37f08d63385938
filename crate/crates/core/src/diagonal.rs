//! Stretched-diagonal side: the ordered-tuple stabbing measure for the
//! monotone path family, the explicit long path valid in every dimension, and
//! the fifteen dimension-3 objectives covering every path type.

use std::fmt;

use crate::error::{Error, Result};
use crate::{Rational, Scalar};

/// Endpoints `(q, p)` of a stair-path satisfying
/// `p_1 <= .. <= p_d`, `q_2 <= .. <= q_d <= q_1 = 1` and `p_i <= q_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalPathConfig<T = f64> {
    pub q: Vec<T>,
    pub p: Vec<T>,
}

impl<T: Scalar> DiagonalPathConfig<T> {
    pub fn new(q: Vec<T>, p: Vec<T>) -> Result<Self> {
        check_conditions(&q, &p)?;
        Ok(DiagonalPathConfig { q, p })
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }
}

impl DiagonalPathConfig<Rational> {
    pub fn to_f64(&self) -> DiagonalPathConfig<f64> {
        use num_traits::ToPrimitive;
        let conv = |v: &[Rational]| v.iter().map(|x| x.to_f64().unwrap()).collect();
        DiagonalPathConfig {
            q: conv(&self.q),
            p: conv(&self.p),
        }
    }
}

fn violation(rule: &str, detail: String) -> Error {
    Error::ConditionViolation(format!("{rule} fails: {detail}"))
}

/// Validates the monotone-path conditions; the error names the violated
/// inequality.
pub fn check_conditions<T: Scalar>(q: &[T], p: &[T]) -> Result<()> {
    if q.len() != p.len() {
        return Err(Error::DimensionMismatch {
            expected: q.len(),
            found: p.len(),
        });
    }
    if q.is_empty() {
        return Err(Error::InvalidDimension {
            dim: 0,
            reason: "diagonal paths need d >= 1",
        });
    }
    let zero = T::zero();
    let one = T::one();
    for (i, v) in q.iter().chain(p).enumerate() {
        if *v < zero || *v > one {
            let (name, idx) = if i < q.len() {
                ("q", i)
            } else {
                ("p", i - q.len())
            };
            return Err(violation(
                "0 ≤ x_i ≤ 1",
                format!("{name}_{} = {v}", idx + 1),
            ));
        }
    }
    for i in 0..q.len() {
        if p[i] > q[i] {
            return Err(violation(
                "p_i ≤ q_i",
                format!("p_{0} = {1} > q_{0} = {2}", i + 1, p[i], q[i]),
            ));
        }
    }
    if q[0] != one {
        return Err(violation("q_1 = 1", format!("q_1 = {}", q[0])));
    }
    for i in 1..p.len() {
        if p[i - 1] > p[i] {
            return Err(violation(
                "p_i ≤ p_{i+1}",
                format!("p_{} = {} > p_{} = {}", i, p[i - 1], i + 1, p[i]),
            ));
        }
    }
    for i in 2..q.len() {
        if q[i - 1] > q[i] {
            return Err(violation(
                "q_i ≤ q_{i+1}",
                format!("q_{} = {} > q_{} = {}", i, q[i - 1], i + 1, q[i]),
            ));
        }
    }
    Ok(())
}

/// Measure of ordered `(d-1)`-tuples `a_1 < .. < a_{d-1} < q_d` whose
/// diagonal points, projected to the first `d-1` axes, span a stair-simplex
/// meeting the projected path. Requires `d >= 2` and the monotone-path
/// conditions.
pub fn recfsd<T: Scalar>(q: &[T], p: &[T]) -> Result<T> {
    if q.len() < 2 {
        return Err(Error::InvalidDimension {
            dim: q.len(),
            reason: "the ordered-diagonal recursion starts at d = 2",
        });
    }
    check_conditions(q, p)?;
    Ok(recfsd_unchecked(q, p))
}

fn recfsd_unchecked<T: Scalar>(q: &[T], p: &[T]) -> T {
    let mut total = T::zero();
    let mut weight = T::one();
    // Dimension m = k + 1 contributes (q_k - p_k) p_1 Π_{i=2}^{k-1} (p_i - p_{i-1})
    // and passes weight (q_{k+1} - q_k) down to dimension k.
    for m in (3..=q.len()).rev() {
        let k = m - 1;
        let mut head = (q[k - 1].clone() - p[k - 1].clone()) * p[0].clone();
        for i in 2..k {
            head = head * (p[i - 1].clone() - p[i - 2].clone());
        }
        total = total + weight.clone() * head;
        weight = weight * (q[m - 1].clone() - q[k - 1].clone());
    }
    total + weight * (q[1].clone() - p[0].clone())
}

/// Measure of ordered `d`-tuples of diagonal points spanning a stair-simplex
/// that meets `σ(q, p)`, computed by lifting both endpoints with a final
/// coordinate 1.
pub fn fsd<T: Scalar>(q: &[T], p: &[T]) -> Result<T> {
    check_conditions(q, p)?;
    let lift = |v: &[T]| {
        let mut out = v.to_vec();
        out.push(T::one());
        out
    };
    Ok(recfsd_unchecked(&lift(q), &lift(p)))
}

/// The path `q = (1, 3/c, 4/c, .., (d+1)/c)`, `p = (1/c, 2/c, .., (d-1)/c, (d-1)/c)`
/// with `c = d + 2`, in exact arithmetic. Its measure is `1/(d+2)^(d-1)`.
pub fn theorem2_path(d: usize) -> Result<DiagonalPathConfig<Rational>> {
    if d < 3 {
        return Err(Error::InvalidDimension {
            dim: d,
            reason: "the long diagonal path is defined for d >= 3",
        });
    }
    let c = (d + 2) as i64;
    let r = |n: i64| Rational::new(n.into(), c.into());
    let q: Vec<Rational> = std::iter::once(Rational::from_integer(1.into()))
        .chain((3..=(d as i64 + 1)).map(r))
        .collect();
    let p: Vec<Rational> = (1..=(d as i64 - 1))
        .map(r)
        .chain([r(d as i64 - 1)])
        .collect();
    DiagonalPathConfig::new(q, p)
}

/// Free or fixed coordinate of a dimension-3 diagonal configuration. `p_3` is
/// always 0.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    P1,
    P2,
    Q1,
    Q2,
    Q3,
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Var::P1 => "p1",
            Var::P2 => "p2",
            Var::Q1 => "q1",
            Var::Q2 => "q2",
            Var::Q3 => "q3",
        };
        f.write_str(s)
    }
}

/// Values of the five coordinates that the dimension-3 objectives read.
#[derive(Clone, Debug, PartialEq)]
pub struct Vars<T> {
    pub p1: T,
    pub p2: T,
    pub q1: T,
    pub q2: T,
    pub q3: T,
}

impl<T: Clone> Vars<T> {
    pub fn get(&self, v: Var) -> &T {
        match v {
            Var::P1 => &self.p1,
            Var::P2 => &self.p2,
            Var::Q1 => &self.q1,
            Var::Q2 => &self.q2,
            Var::Q3 => &self.q3,
        }
    }

    fn set(&mut self, v: Var, x: T) {
        match v {
            Var::P1 => self.p1 = x,
            Var::P2 => self.p2 = x,
            Var::Q1 => self.q1 = x,
            Var::Q2 => self.q2 = x,
            Var::Q3 => self.q3 = x,
        }
    }

    /// Reads the coordinates from full endpoints `q, p` in dimension 3.
    pub fn from_qp(q: &[T], p: &[T]) -> Self {
        Vars {
            p1: p[0].clone(),
            p2: p[1].clone(),
            q1: q[0].clone(),
            q2: q[1].clone(),
            q3: q[2].clone(),
        }
    }
}

/// One of the fifteen dimension-3 diagonal objectives: a cubic polynomial
/// valid on a region cut out by chains of coordinate inequalities.
#[derive(Clone, Debug)]
pub struct Diag3Objective {
    pub id: usize,
    /// The set `{ j : q_j < p_j }` shared by every point of the region.
    pub type_label: &'static str,
    /// The coordinate pinned to the cube boundary besides `p_3 = 0`.
    pub fixed: (Var, f64),
    pub free: [Var; 4],
    /// Each chain `[a, b, c]` means `0 <= a <= b <= c <= 1`.
    pub domain_constraints: Vec<Vec<Var>>,
}

impl Diag3Objective {
    fn vars_from_free<T: Scalar>(&self, free: &[T]) -> Vars<T> {
        let mut v = Vars {
            p1: T::zero(),
            p2: T::zero(),
            q1: T::zero(),
            q2: T::zero(),
            q3: T::zero(),
        };
        v.set(self.fixed.0, T::from_f64(self.fixed.1).unwrap());
        for (&var, x) in self.free.iter().zip(free) {
            v.set(var, x.clone());
        }
        v
    }

    pub fn in_domain<T: Scalar>(&self, v: &Vars<T>) -> bool {
        let zero = T::zero();
        let one = T::one();
        self.domain_constraints.iter().all(|chain| {
            *v.get(chain[0]) >= zero
                && *v.get(chain[chain.len() - 1]) <= one
                && chain.windows(2).all(|w| v.get(w[0]) <= v.get(w[1]))
        })
    }

    /// Polynomial value without the domain clamp.
    pub fn body<T: Scalar>(&self, v: &Vars<T>) -> T {
        diag3_body(self.id, v)
    }

    /// Clamped value at explicit coordinates.
    pub fn eval_vars<T: Scalar>(&self, v: &Vars<T>) -> T {
        if self.in_domain(v) {
            self.body(v)
        } else {
            T::zero()
        }
    }

    /// Clamped value at the four free coordinates, in the order of `free`.
    pub fn evaluate(&self, free: &[f64]) -> f64 {
        if free.len() != 4 || free.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return 0.0;
        }
        self.eval_vars(&self.vars_from_free(free))
    }

    pub fn free_from_vars(&self, v: &Vars<f64>) -> Vec<f64> {
        self.free.iter().map(|&x| *v.get(x)).collect()
    }

    /// Full endpoints `(q, p)` for a free vector.
    pub fn qp_from_free(&self, free: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let v = self.vars_from_free(free);
        (vec![v.q1, v.q2, v.q3], vec![v.p1, v.p2, 0.0])
    }

    pub fn bounds(&self) -> Vec<(f64, f64)> {
        vec![(0.0, 1.0); 4]
    }
}

fn diag3_body<T: Scalar>(id: usize, v: &Vars<T>) -> T {
    let Vars { p1, p2, q1, q2, q3 } = v.clone();
    let one = T::one();
    let up = one.clone() - q3.clone();
    match id {
        1 => {
            p1.clone() * (q2.clone() - p2.clone()) * up.clone()
                + p1.clone() * (p2.clone() - p1.clone()) * (q3.clone() - p2)
                + (q2.clone() - p1) * up * (q3 - q2)
        }
        2 | 6 => {
            p1.clone() * (p2.clone() - p1.clone()) * (q3.clone() - p2.clone()) + p1 * up * (q3 - p2)
        }
        3 | 7 => p1.clone() * up * (q3 - p1),
        4 => {
            p1.clone() * (q2.clone() - p1.clone()) * up.clone() + (q2.clone() - p1) * up * (q3 - q2)
        }
        5 => {
            p1.clone() * (q2.clone() - p2.clone()) * up.clone()
                + p1.clone() * (p2.clone() - p1.clone()) * (q3.clone() - p2)
                + p1 * up * (q3 - q2)
        }
        8 => p1.clone() * (q2.clone() - p1.clone()) * up.clone() + p1 * up * (q3 - q2),
        9 => q2.clone() * up * (q3 - q2),
        10 => {
            (p2.clone() - q1.clone()) * q1.clone() * up.clone()
                + p1.clone() * (p2.clone() - p1.clone()) * (q3.clone() - p2.clone())
                + (q1 - p1) * up * (q3 - p2)
        }
        11 => {
            p1.clone() * (p2.clone() - p1.clone()) * (q3.clone() - p2.clone())
                + (p2.clone() - p1) * up * (q3 - p2)
        }
        12 | 15 => q1.clone() * up * (q3 - q1),
        13 => {
            (p2.clone() - q1.clone()) * q1.clone() * up.clone()
                + p1.clone() * (p2.clone() - p1.clone()) * (q3.clone() - p2.clone())
                + (p1 - q1) * up * (q3 - p2)
        }
        14 => {
            (p2.clone() - q1.clone()) * q1.clone() * up.clone() + (p2.clone() - q1) * up * (q3 - p2)
        }
        _ => unreachable!("catalog ids run from 1 to 15"),
    }
}

/// The fifteen dimension-3 stretched-diagonal objectives `F_1..F_15`.
pub fn diag3_catalog() -> Vec<Diag3Objective> {
    use Var::*;
    let entry = |id, type_label, chains: &[&[Var]]| {
        let (fixed, free) = match type_label {
            "{}" => ((Q1, 1.0), [P1, P2, Q2, Q3]),
            "{1}" => ((Q1, 0.0), [P1, P2, Q2, Q3]),
            _ => ((Q2, 0.0), [P1, P2, Q1, Q3]),
        };
        Diag3Objective {
            id,
            type_label,
            fixed,
            free,
            domain_constraints: chains.iter().map(|c| c.to_vec()).collect(),
        }
    };
    vec![
        entry(1, "{}", &[&[P1, P2, Q2, Q3]]),
        entry(2, "{}", &[&[P1, P2, Q3, Q2]]),
        entry(3, "{}", &[&[P2, P1, Q3, Q2]]),
        entry(4, "{}", &[&[P2, P1, Q2, Q3]]),
        entry(5, "{1}", &[&[P1, P2, Q2, Q3]]),
        entry(6, "{1}", &[&[P1, P2, Q3, Q2]]),
        entry(7, "{1}", &[&[P2, P1, Q3, Q2]]),
        entry(8, "{1}", &[&[P2, P1, Q2, Q3]]),
        entry(9, "{1}", &[&[P2, Q2, P1], &[Q2, Q3]]),
        entry(10, "{2}", &[&[P1, Q1, P2, Q3]]),
        entry(11, "{2}", &[&[P1, P2, Q1], &[P2, Q3]]),
        entry(12, "{2}", &[&[P1, Q1, Q3, P2]]),
        entry(13, "{1,2}", &[&[Q1, P1, P2, Q3]]),
        entry(14, "{1,2}", &[&[Q1, P2, P1], &[P2, Q3]]),
        entry(15, "{1,2}", &[&[Q1, P1], &[Q1, Q3, P2]]),
    ]
}
