//! Delzant polytopes `P = {x : ⟨x, v_r⟩ − λ_r ≥ 0}` and the lattice points of
//! their integer dilates.
//!
//! Normals are integer vectors and offsets exact rationals, so membership of
//! lattice points (including boundary points) is decided without rounding.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use num_rational::Ratio;
use num_traits::{Signed, Zero};

use crate::{Error, Result};

pub type Rational = Ratio<i64>;

/// Default cap on the number of bounding-box points scanned by [`DelzantPolytope::lattice_points`].
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 20_000_000;

/// One facet inequality `⟨x, normal⟩ − offset ≥ 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Facet {
    pub normal: Vec<i64>,
    pub offset: Rational,
}

impl Facet {
    pub fn new(normal: Vec<i64>, offset: Rational) -> Self {
        Facet { normal, offset }
    }

    /// `ℓ(x) = ⟨x, v⟩ − λ` at a real point.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let dot: f64 = self.normal.iter().zip(x).map(|(&v, &xi)| v as f64 * xi).sum();
        dot - ratio_to_f64(self.offset)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DelzantPolytope {
    dim: usize,
    facets: Vec<Facet>,
}

/// Outcome of [`DelzantPolytope::verify_delzant`]; violations are listed, not thrown.
#[derive(Debug, Clone, PartialEq)]
pub struct DelzantReport {
    pub non_primitive: Vec<usize>,
    pub bounded: bool,
    pub has_interior: bool,
    pub vertices: Vec<Vec<Rational>>,
    /// `(vertex index, reason)` for vertices failing simplicity or unimodularity.
    pub vertex_violations: Vec<(usize, String)>,
}

impl DelzantReport {
    pub fn is_valid(&self) -> bool {
        self.non_primitive.is_empty() && self.bounded && self.has_interior && self.vertex_violations.is_empty()
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for &r in &self.non_primitive {
            out.push(format!("facet {r}: normal is not primitive"));
        }
        if !self.bounded {
            out.push(String::from("feasible region is unbounded"));
        }
        if !self.has_interior {
            out.push(String::from("feasible region has empty interior"));
        }
        for (v, why) in &self.vertex_violations {
            out.push(format!("vertex {v}: {why}"));
        }
        out
    }
}

/// The lattice points `kP ∩ ℤ^m` in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticePointSet {
    pub k: u32,
    pub dim: usize,
    pub points: Vec<Vec<i64>>,
}

impl LatticePointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl DelzantPolytope {
    /// Builds a polytope from facet data; checks shapes only, see [`Self::verify_delzant`].
    pub fn new(dim: usize, facets: Vec<Facet>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidPolytope(String::from("dimension must be positive")));
        }
        for (r, f) in facets.iter().enumerate() {
            if f.normal.len() != dim {
                return Err(Error::InvalidPolytope(format!(
                    "facet {r} normal has length {}, expected {dim}",
                    f.normal.len()
                )));
            }
            if f.normal.iter().all(|&v| v == 0) {
                return Err(Error::InvalidPolytope(format!("facet {r} has a zero normal")));
            }
        }
        Ok(DelzantPolytope { dim, facets })
    }

    /// The standard simplex `{x ≥ 0, Σx ≤ 1}`.
    pub fn simplex(dim: usize) -> Self {
        let mut facets: Vec<Facet> = (0..dim)
            .map(|j| {
                let mut n = vec![0; dim];
                n[j] = 1;
                Facet::new(n, Rational::zero())
            })
            .collect();
        facets.push(Facet::new(vec![-1; dim], Rational::from_integer(-1)));
        DelzantPolytope { dim, facets }
    }

    /// The segment `[a, b]` with integer endpoints.
    pub fn segment(a: i64, b: i64) -> Self {
        DelzantPolytope {
            dim: 1,
            facets: vec![
                Facet::new(vec![1], Rational::from_integer(a)),
                Facet::new(vec![-1], Rational::from_integer(-b)),
            ],
        }
    }

    /// The cartesian product; facets of each factor are padded with zeros.
    pub fn product(factors: &[&DelzantPolytope]) -> Self {
        let dim: usize = factors.iter().map(|p| p.dim).sum();
        let mut facets = Vec::new();
        let mut offset = 0;
        for p in factors {
            for f in &p.facets {
                let mut n = vec![0; dim];
                n[offset..offset + p.dim].copy_from_slice(&f.normal);
                facets.push(Facet::new(n, f.offset));
            }
            offset += p.dim;
        }
        DelzantPolytope { dim, facets }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Closed membership: `ℓ_r(x) ≥ 0` for every facet.
    pub fn contains(&self, x: &[f64]) -> bool {
        self.facets.iter().all(|f| f.eval(x) >= 0.0)
    }

    /// Smallest facet value `min_r ℓ_r(x)`; positive exactly in the interior.
    pub fn interior_margin(&self, x: &[f64]) -> f64 {
        self.facets.iter().map(|f| f.eval(x)).fold(f64::INFINITY, f64::min)
    }

    /// Exact test `⟨α, v_r⟩ − k·λ_r ≥ 0` for all facets.
    pub fn contains_lattice_point(&self, alpha: &[i64], k: u32) -> bool {
        self.facets.iter().all(|f| facet_value_scaled(f, alpha, k) >= 0)
    }

    /// Exact test that `α/k` lies in the open interior.
    pub fn lattice_point_is_interior(&self, alpha: &[i64], k: u32) -> bool {
        self.facets.iter().all(|f| facet_value_scaled(f, alpha, k) > 0)
    }

    /// Vertices, computed by solving every `m`-subset of facet equalities and
    /// keeping the feasible solutions. Duplicates are removed.
    pub fn vertices(&self) -> Vec<Vec<Rational>> {
        let m = self.dim;
        let mut out: Vec<Vec<Rational>> = Vec::new();
        for subset in combinations(self.facets.len(), m) {
            let rows: Vec<Vec<Rational>> = subset
                .iter()
                .map(|&r| self.facets[r].normal.iter().map(|&v| Rational::from_integer(v)).collect())
                .collect();
            let rhs: Vec<Rational> = subset.iter().map(|&r| self.facets[r].offset).collect();
            if let Some(x) = solve_exact(rows, rhs) {
                let feasible = self.facets.iter().all(|f| exact_facet_value(f, &x) >= Rational::zero());
                if feasible && !out.contains(&x) {
                    out.push(x);
                }
            }
        }
        out.sort();
        out
    }

    /// Checks primitivity, boundedness, nonempty interior and the vertex
    /// unimodularity condition, collecting every violation.
    pub fn verify_delzant(&self) -> DelzantReport {
        let m = self.dim;
        let non_primitive: Vec<usize> = self
            .facets
            .iter()
            .enumerate()
            .filter(|(_, f)| f.normal.iter().fold(0i64, |g, &v| gcd(g, v)) != 1)
            .map(|(r, _)| r)
            .collect();

        let bounded = self.is_bounded();
        let vertices = if bounded { self.vertices() } else { Vec::new() };
        let has_interior = !vertices.is_empty() && {
            let n = Rational::from_integer(vertices.len() as i64);
            let centroid: Vec<Rational> = (0..m)
                .map(|j| vertices.iter().fold(Rational::zero(), |s, v| s + v[j]) / n)
                .collect();
            self.facets.iter().all(|f| exact_facet_value(f, &centroid) > Rational::zero())
        };

        let mut vertex_violations = Vec::new();
        for (i, v) in vertices.iter().enumerate() {
            let tight: Vec<usize> = (0..self.facets.len())
                .filter(|&r| exact_facet_value(&self.facets[r], v).is_zero())
                .collect();
            if tight.len() != m {
                vertex_violations.push((i, format!("{} facets meet (polytope not simple)", tight.len())));
                continue;
            }
            let rows: Vec<Vec<Rational>> = tight
                .iter()
                .map(|&r| self.facets[r].normal.iter().map(|&x| Rational::from_integer(x)).collect())
                .collect();
            let det = det_exact(rows);
            if det.abs() != Rational::from_integer(1) {
                vertex_violations.push((i, format!("normals have determinant {det}, not ±1")));
            }
        }
        DelzantReport { non_primitive, bounded, has_interior, vertices, vertex_violations }
    }

    fn is_bounded(&self) -> bool {
        let m = self.dim;
        let normals: Vec<Vec<Rational>> = self
            .facets
            .iter()
            .map(|f| f.normal.iter().map(|&v| Rational::from_integer(v)).collect())
            .collect();
        if rank_exact(normals.clone()) < m {
            return false;
        }
        // a nonzero recession direction exists iff one lies on an extreme ray,
        // i.e. in the null space of some m−1 normals
        let dominated = |d: &[i64]| {
            d.iter().any(|&x| x != 0)
                && self.facets.iter().all(|f| f.normal.iter().zip(d).map(|(a, b)| a * b).sum::<i64>() >= 0)
        };
        for subset in combinations(self.facets.len(), m - 1) {
            let d = null_direction(&subset.iter().map(|&r| self.facets[r].normal.clone()).collect::<Vec<_>>(), m);
            let neg: Vec<i64> = d.iter().map(|x| -x).collect();
            if dominated(&d) || dominated(&neg) {
                return false;
            }
        }
        true
    }

    /// Real bounding box of `P`, from its vertices.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let verts = self.vertices();
        let lo = (0..self.dim)
            .map(|j| verts.iter().map(|v| ratio_to_f64(v[j])).fold(f64::INFINITY, f64::min))
            .collect();
        let hi = (0..self.dim)
            .map(|j| verts.iter().map(|v| ratio_to_f64(v[j])).fold(f64::NEG_INFINITY, f64::max))
            .collect();
        (lo, hi)
    }

    /// `kP ∩ ℤ^m` with the default enumeration budget.
    pub fn lattice_points(&self, k: u32) -> Result<LatticePointSet> {
        self.lattice_points_with_budget(k, DEFAULT_ENUMERATION_BUDGET)
    }

    /// Bounding-box scan of the dilate `kP` with an exact test per point.
    pub fn lattice_points_with_budget(&self, k: u32, budget: u64) -> Result<LatticePointSet> {
        if k == 0 {
            return Err(Error::InvalidArgument(String::from("dilation k must be positive")));
        }
        let report = self.verify_delzant();
        if !report.is_valid() {
            return Err(Error::InvalidPolytope(report.violations().join("; ")));
        }
        let kr = Rational::from_integer(k as i64);
        let lo: Vec<i64> = (0..self.dim)
            .map(|j| report.vertices.iter().map(|v| (v[j] * kr).floor().to_integer()).min().unwrap_or(0))
            .collect();
        let hi: Vec<i64> = (0..self.dim)
            .map(|j| report.vertices.iter().map(|v| (v[j] * kr).ceil().to_integer()).max().unwrap_or(0))
            .collect();
        let box_points: u128 = lo.iter().zip(&hi).map(|(a, b)| (b - a + 1) as u128).product();
        if box_points > budget as u128 {
            return Err(Error::EnumerationBudget { k, box_points, budget });
        }
        let mut points = Vec::new();
        let mut alpha = lo.clone();
        'scan: loop {
            if self.contains_lattice_point(&alpha, k) {
                points.push(alpha.clone());
            }
            // odometer with the last coordinate fastest gives lexicographic order
            for j in (0..self.dim).rev() {
                if alpha[j] < hi[j] {
                    alpha[j] += 1;
                    continue 'scan;
                }
                alpha[j] = lo[j];
            }
            break;
        }
        Ok(LatticePointSet { k, dim: self.dim, points })
    }
}

pub fn ratio_to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Best rational approximation-free conversion for offsets given as decimals.
pub fn rational_from_parts(numer: i64, denom: i64) -> Result<Rational> {
    if denom == 0 {
        return Err(Error::InvalidArgument(String::from("zero denominator")));
    }
    Ok(Rational::new(numer, denom))
}

/// `den·(⟨α, v⟩ − k·λ)` with `den > 0` the denominator of `λ`.
fn facet_value_scaled(f: &Facet, alpha: &[i64], k: u32) -> i128 {
    let dot: i128 = f.normal.iter().zip(alpha).map(|(&v, &a)| v as i128 * a as i128).sum();
    dot * *f.offset.denom() as i128 - k as i128 * *f.offset.numer() as i128
}

fn exact_facet_value(f: &Facet, x: &[Rational]) -> Rational {
    f.normal.iter().zip(x).fold(Rational::zero(), |s, (&v, &xi)| s + xi * v) - f.offset
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// All `r`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if r > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        out.push(idx.clone());
        let mut i = r;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - r {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn solve_exact(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for c in 0..n {
        let piv = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, piv);
        b.swap(c, piv);
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c] / a[c][c];
                for j in c..n {
                    let t = a[c][j];
                    a[r][j] -= f * t;
                }
                let t = b[c];
                b[r] -= f * t;
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

fn det_exact(mut a: Vec<Vec<Rational>>) -> Rational {
    let n = a.len();
    let mut det = Rational::from_integer(1);
    for c in 0..n {
        let Some(piv) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return Rational::zero();
        };
        if piv != c {
            a.swap(c, piv);
            det = -det;
        }
        det *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for j in c..n {
                let t = a[c][j];
                a[r][j] -= f * t;
            }
        }
    }
    det
}

fn rank_exact(mut a: Vec<Vec<Rational>>) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(rank, piv);
        for r in rank + 1..rows {
            let f = a[r][c] / a[rank][c];
            for j in c..cols {
                let t = a[rank][j];
                a[r][j] -= f * t;
            }
        }
        rank += 1;
    }
    rank
}

/// Generalized cross product: the cofactor vector orthogonal to `m − 1` rows.
fn null_direction(rows: &[Vec<i64>], m: usize) -> Vec<i64> {
    if m == 1 {
        return vec![1];
    }
    (0..m)
        .map(|i| {
            let minor: Vec<Vec<Rational>> = rows
                .iter()
                .map(|r| (0..m).filter(|&j| j != i).map(|j| Rational::from_integer(r[j])).collect())
                .collect();
            let d = det_exact(minor).to_integer();
            if i % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> DelzantPolytope {
        DelzantPolytope::product(&[&DelzantPolytope::segment(0, 1), &DelzantPolytope::segment(0, 1)])
    }

    #[test]
    fn segment_membership() {
        let p = DelzantPolytope::segment(0, 1);
        assert!(p.contains(&[0.5]));
        assert!(p.contains(&[1.0]));
        assert!(!p.contains(&[1.1]));
    }

    #[test]
    fn small_lattice_counts() {
        assert_eq!(DelzantPolytope::segment(0, 1).lattice_points(3).unwrap().points, vec![vec![0], vec![1], vec![2], vec![3]]);
        assert_eq!(unit_square().lattice_points(2).unwrap().len(), 9);
        let simplex = DelzantPolytope::simplex(2).lattice_points(2).unwrap();
        assert_eq!(simplex.len(), 6);
        assert_eq!(simplex.points[0], vec![0, 0]);
        assert_eq!(simplex.points[5], vec![2, 0]);
    }

    #[test]
    fn valid_polytopes_pass() {
        assert!(DelzantPolytope::segment(0, 1).verify_delzant().is_valid());
        assert!(DelzantPolytope::simplex(2).verify_delzant().is_valid());
        assert!(DelzantPolytope::simplex(3).verify_delzant().is_valid());
        assert!(unit_square().verify_delzant().is_valid());
        assert_eq!(DelzantPolytope::simplex(2).vertices().len(), 3);
    }

    #[test]
    fn non_primitive_normal_is_reported() {
        let p = DelzantPolytope::new(
            2,
            vec![
                Facet::new(vec![2, 0], Rational::zero()),
                Facet::new(vec![0, 1], Rational::zero()),
                Facet::new(vec![-1, -1], Rational::from_integer(-1)),
            ],
        )
        .unwrap();
        let report = p.verify_delzant();
        assert!(!report.is_valid());
        assert_eq!(report.non_primitive, vec![0]);
        assert!(matches!(p.lattice_points(1), Err(Error::InvalidPolytope(_))));
    }

    #[test]
    fn non_unimodular_vertex_is_reported() {
        // triangle with vertices (0,0), (2,0), (0,1): the corner at (0,1) has det −2
        let p = DelzantPolytope::new(
            2,
            vec![
                Facet::new(vec![1, 0], Rational::zero()),
                Facet::new(vec![0, 1], Rational::zero()),
                Facet::new(vec![-1, -2], Rational::from_integer(-2)),
            ],
        )
        .unwrap();
        let report = p.verify_delzant();
        assert!(report.bounded && report.has_interior);
        assert_eq!(report.vertex_violations.len(), 1);
    }

    #[test]
    fn unbounded_and_degenerate_regions() {
        let orthant = DelzantPolytope::new(
            2,
            vec![Facet::new(vec![1, 0], Rational::zero()), Facet::new(vec![0, 1], Rational::zero())],
        )
        .unwrap();
        assert!(!orthant.verify_delzant().bounded);
        let strip = DelzantPolytope::new(
            2,
            vec![Facet::new(vec![1, 0], Rational::zero()), Facet::new(vec![-1, 0], Rational::from_integer(-1))],
        )
        .unwrap();
        assert!(!strip.verify_delzant().bounded);
        let point = DelzantPolytope::new(
            1,
            vec![Facet::new(vec![1], Rational::zero()), Facet::new(vec![-1], Rational::zero())],
        )
        .unwrap();
        assert!(!point.verify_delzant().has_interior);
    }

    #[test]
    fn rational_offsets_keep_boundary_points() {
        // [1/2, 3/2] dilated by 2 is [1, 3]
        let p = DelzantPolytope::new(
            1,
            vec![Facet::new(vec![1], Rational::new(1, 2)), Facet::new(vec![-1], Rational::new(-3, 2))],
        )
        .unwrap();
        assert_eq!(p.lattice_points(2).unwrap().points, vec![vec![1], vec![2], vec![3]]);
    }

    #[test]
    fn budget_is_enforced() {
        let r = DelzantPolytope::simplex(2).lattice_points_with_budget(100, 1000);
        assert!(matches!(r, Err(Error::EnumerationBudget { .. })));
    }

    #[test]
    fn combinations_enumerate_all_subsets() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
    }
}
