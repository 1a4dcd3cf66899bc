//! Rank-2 cone and fan combinatorics: lattice points of `C`, simplicial
//! subdivisions given by ray lists, Box elements and twisted sectors.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A lattice point `(a, b)` of `ℤ²`; `b` is the degree.
///
/// The cone `C` is spanned by `v_0 = (0,1)` and `v_n = (n,1)`, so membership
/// only depends on `0 ≤ a ≤ n·b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LatticePoint {
    pub a: i64,
    pub b: i64,
}

impl LatticePoint {
    pub const fn new(a: i64, b: i64) -> Self {
        LatticePoint { a, b }
    }

    pub const fn origin() -> Self {
        LatticePoint { a: 0, b: 0 }
    }

    /// `v_i = (i, 1)`.
    pub const fn generator(i: i64) -> Self {
        LatticePoint { a: i, b: 1 }
    }

    pub const fn degree(&self) -> i64 {
        self.b
    }

    pub fn add(&self, other: &LatticePoint) -> LatticePoint {
        LatticePoint::new(self.a + other.a, self.b + other.b)
    }

    pub fn in_cone(&self, n: i64) -> bool {
        self.b >= 0 && self.a >= 0 && self.a <= n * self.b
    }

    pub fn in_interior(&self, n: i64) -> bool {
        self.b > 0 && self.a > 0 && self.a < n * self.b
    }
}

/// A simplicial subdivision of `C`, encoded by its sorted ray indices
/// `0 = i_0 < i_1 < … < i_{r+1} = n`. Two-dimensional cones are the spans of
/// consecutive ray pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fan {
    n: i64,
    rays: Vec<i64>,
}

impl Fan {
    pub fn new(n: i64, rays: Vec<i64>) -> Result<Self> {
        if n < 1 {
            return Err(Error::Config(format!("n must be >= 1, got {n}")));
        }
        if rays.first() != Some(&0) || rays.last() != Some(&n) {
            return Err(Error::Config(format!(
                "rays must start at 0 and end at n = {n}, got {rays:?}"
            )));
        }
        if !rays.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Config(format!("rays must be strictly increasing, got {rays:?}")));
        }
        Ok(Fan { n, rays })
    }

    /// The coarsest subdivision: just the boundary rays.
    pub fn coarse(n: i64) -> Self {
        Fan::new(n, vec![0, n]).expect("coarse fan is valid")
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn rays(&self) -> &[i64] {
        &self.rays
    }

    pub fn is_ray(&self, i: i64) -> bool {
        self.rays.binary_search(&i).is_ok()
    }

    /// Rays strictly between the boundary rays `0` and `n`.
    pub fn interior_rays(&self) -> &[i64] {
        &self.rays[1..self.rays.len() - 1]
    }

    /// Consecutive ray pairs, i.e. the two-dimensional cones.
    pub fn adjacent_pairs(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.rays.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn are_adjacent(&self, i: i64, j: i64) -> bool {
        self.adjacent_pairs().any(|(p, q)| (p, q) == (i, j) || (p, q) == (j, i))
    }

    /// The unique 2-cone `(i, j)` with `i ≤ m ≤ j`.
    pub fn enclosing_cone(&self, m: i64) -> Option<(i64, i64)> {
        self.adjacent_pairs().find(|&(i, j)| i <= m && m <= j)
    }

    /// Lattice points of `C` with the given degree.
    pub fn degree_points(&self, d: i64) -> Vec<LatticePoint> {
        if d < 0 {
            return Vec::new();
        }
        (0..=self.n * d).map(|a| LatticePoint::new(a, d)).collect()
    }

    /// Lattice points of `C°` with the given degree.
    pub fn interior_degree_points(&self, d: i64) -> Vec<LatticePoint> {
        if d < 1 {
            return Vec::new();
        }
        (1..self.n * d).map(|a| LatticePoint::new(a, d)).collect()
    }
}

/// A Box element of the fan: the untwisted sector `(0,0)` or a degree-one
/// lattice point `(m,1)` interior to a 2-cone, with its fractional
/// coordinates along the cone's rays.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TwistedSector {
    Untwisted,
    Twisted {
        /// First coordinate of the box point `(m, 1)`.
        m: i64,
        /// Enclosing adjacent ray pair, `i < m < j`.
        rays: (i64, i64),
        /// `γ_i = (j-m)/(j-i)`.
        frac_i: Ratio<i64>,
        /// `γ_j = (m-i)/(j-i)`.
        frac_j: Ratio<i64>,
    },
}

impl TwistedSector {
    pub fn twisted(fan: &Fan, m: i64) -> Result<Self> {
        let (i, j) = fan
            .enclosing_cone(m)
            .filter(|&(i, j)| i < m && m < j)
            .ok_or_else(|| Error::Config(format!("{m} is not interior to a cone of the fan")))?;
        if fan.is_ray(m) {
            return Err(Error::Config(format!("{m} is a ray, not a box point")));
        }
        Ok(TwistedSector::Twisted {
            m,
            rays: (i, j),
            frac_i: Ratio::new(j - m, j - i),
            frac_j: Ratio::new(m - i, j - i),
        })
    }

    pub fn is_untwisted(&self) -> bool {
        matches!(self, TwistedSector::Untwisted)
    }

    /// The box point as a lattice point; `(0,0)` for the untwisted sector.
    pub fn point(&self) -> LatticePoint {
        match self {
            TwistedSector::Untwisted => LatticePoint::origin(),
            TwistedSector::Twisted { m, .. } => LatticePoint::new(*m, 1),
        }
    }

    /// Fractional coordinate of the sector at index `k` (zero off `σ(γ)`).
    pub fn frac_at(&self, k: i64) -> Ratio<i64> {
        match self {
            TwistedSector::Untwisted => Ratio::new(0, 1),
            TwistedSector::Twisted { rays: (i, j), frac_i, frac_j, .. } => {
                if k == *i {
                    *frac_i
                } else if k == *j {
                    *frac_j
                } else {
                    Ratio::new(0, 1)
                }
            }
        }
    }
}

/// All Box elements: the untwisted sector plus one twisted sector per
/// non-ray integer in `(0, n)`.
pub fn box_elements(fan: &Fan) -> Vec<TwistedSector> {
    let mut out = vec![TwistedSector::Untwisted];
    for m in 1..fan.n() {
        if !fan.is_ray(m) {
            out.push(TwistedSector::twisted(fan, m).expect("non-ray interior point"));
        }
    }
    out
}

/// Twisted sectors only, in increasing order of `m`.
pub fn twisted_sectors(fan: &Fan) -> Vec<TwistedSector> {
    box_elements(fan).into_iter().filter(|s| !s.is_untwisted()).collect()
}

/// The dual sector `γ* = Σ (1-γ_k) v_k`, i.e. the box point `i + j - m` of the
/// same cone. Rejects the untwisted sector.
pub fn dual_sector(sector: &TwistedSector) -> Result<TwistedSector> {
    match sector {
        TwistedSector::Untwisted => {
            Err(Error::Contract("the untwisted sector has no dual box point".into()))
        }
        TwistedSector::Twisted { m, rays: (i, j), frac_i, frac_j } => Ok(TwistedSector::Twisted {
            m: i + j - m,
            rays: (*i, *j),
            frac_i: *frac_j,
            frac_j: *frac_i,
        }),
    }
}

/// `|Box(σ_{ij})| = j - i`, counting `(0,0)`.
pub fn box_count(i: i64, j: i64) -> i64 {
    debug_assert!(i < j);
    j - i
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fan(n: i64, rays: &[i64]) -> Fan {
        Fan::new(n, rays.to_vec()).unwrap()
    }

    #[test]
    fn box_elements_coarse_n2() {
        let sectors = box_elements(&fan(2, &[0, 2]));
        assert_eq!(sectors.len(), 2);
        assert!(sectors[0].is_untwisted());
        match &sectors[1] {
            TwistedSector::Twisted { m, rays, frac_i, frac_j } => {
                assert_eq!((*m, *rays), (1, (0, 2)));
                assert_eq!(*frac_i, Ratio::new(1, 2));
                assert_eq!(*frac_j, Ratio::new(1, 2));
            }
            _ => panic!("expected twisted sector"),
        }
    }

    #[test]
    fn box_elements_full_subdivision_is_untwisted_only() {
        let sectors = box_elements(&fan(2, &[0, 1, 2]));
        assert_eq!(sectors.len(), 1);
        assert!(sectors[0].is_untwisted());
    }

    #[test]
    fn box_elements_n4_partial() {
        let f = fan(4, &[0, 1, 4]);
        let sectors = twisted_sectors(&f);
        assert_eq!(sectors.len(), 2);
        match &sectors[0] {
            TwistedSector::Twisted { m, rays, frac_i, frac_j } => {
                assert_eq!((*m, *rays), (2, (1, 4)));
                assert_eq!(*frac_i, Ratio::new(2, 3));
                assert_eq!(*frac_j, Ratio::new(1, 3));
            }
            _ => panic!(),
        }
        match &sectors[1] {
            TwistedSector::Twisted { m, frac_i, frac_j, .. } => {
                assert_eq!(*m, 3);
                assert_eq!(*frac_i, Ratio::new(1, 3));
                assert_eq!(*frac_j, Ratio::new(2, 3));
            }
            _ => panic!(),
        }
    }

    #[test]
    fn dual_sector_examples() {
        let f2 = fan(2, &[0, 2]);
        let s = TwistedSector::twisted(&f2, 1).unwrap();
        assert_eq!(dual_sector(&s).unwrap(), s);

        let f4 = fan(4, &[0, 1, 4]);
        let s2 = TwistedSector::twisted(&f4, 2).unwrap();
        let s3 = TwistedSector::twisted(&f4, 3).unwrap();
        assert_eq!(dual_sector(&s2).unwrap(), s3);
        assert_eq!(dual_sector(&s3).unwrap(), s2);

        assert!(dual_sector(&TwistedSector::Untwisted).is_err());
    }

    #[test]
    fn box_count_examples() {
        assert_eq!(box_count(0, 2), 2);
        assert_eq!(box_count(1, 4), 3);
        assert_eq!(box_count(0, 1), 1);
    }

    /// Normalized volume additivity and the sector count, over every fan with
    /// n ≤ 8.
    #[test]
    fn box_count_additivity_all_fans() {
        for n in 1..=8i64 {
            for mask in 0..(1u32 << (n - 1) as u32) {
                let mut rays = vec![0];
                for k in 1..n {
                    if mask & (1 << (k - 1)) != 0 {
                        rays.push(k);
                    }
                }
                rays.push(n);
                let f = fan(n, &rays);
                let vol: i64 = f.adjacent_pairs().map(|(i, j)| box_count(i, j)).sum();
                assert_eq!(vol, n);
                let twisted = twisted_sectors(&f).len() as i64;
                assert_eq!(twisted, n - (f.rays().len() as i64 - 1));
            }
        }
    }

    /// Involution and exact reconstruction of m from the fractional
    /// coordinates.
    #[test]
    fn dual_involution_and_frac_reconstruction() {
        for n in 2..=9i64 {
            for rays in [vec![0, n], vec![0, 1, n]] {
                let f = fan(n, &rays);
                for s in twisted_sectors(&f) {
                    let d = dual_sector(&s).unwrap();
                    assert_eq!(dual_sector(&d).unwrap(), s);
                    if let TwistedSector::Twisted { m, rays: (i, j), frac_i, frac_j } = &s {
                        assert_eq!(frac_i + frac_j, Ratio::new(1, 1));
                        assert_eq!(
                            frac_i * Ratio::from_integer(*i) + frac_j * Ratio::from_integer(*j),
                            Ratio::from_integer(*m)
                        );
                        // the dual stays in the same cone
                        if let TwistedSector::Twisted { rays: dual_rays, .. } = &d {
                            assert_eq!(dual_rays, &(*i, *j));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn invalid_fans_rejected() {
        assert!(Fan::new(0, vec![0, 0]).is_err());
        assert!(Fan::new(3, vec![0, 2]).is_err());
        assert!(Fan::new(3, vec![1, 3]).is_err());
        assert!(Fan::new(3, vec![0, 2, 2, 3]).is_err());
    }
}
