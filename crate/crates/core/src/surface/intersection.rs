//! The intersection pairing on the minimal resolution of the cubic surface
//! completing `U`, over the basis `L_1, ..., L_5, E_1, E_2`.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

pub const BASIS: [&str; 7] = ["L1", "L2", "L3", "L4", "L5", "E1", "E2"];

#[rustfmt::skip]
pub const INTERSECTION_MATRIX: [[i64; 7]; 7] = [
    [-1,  0,  1,  1,  0,  1,  0],
    [ 0, -1,  1,  0,  0,  0,  1],
    [ 1,  1, -1,  0,  0,  0,  0],
    [ 1,  0,  0, -1,  1,  0,  0],
    [ 0,  0,  0,  1, -1,  0,  1],
    [ 1,  0,  0,  0,  0, -2,  1],
    [ 0,  1,  0,  0,  1,  1, -2],
];

/// Rank of the geometric Picard group of the minimal resolution: a cubic
/// surface with one `A_2` point, so `7` after resolving.
pub const GEOMETRIC_PICARD_RANK: usize = 7;

/// Rows of the components at infinity: `L_1, L_2, L_3, E_1, E_2`.
pub const BOUNDARY: [usize; 5] = [0, 1, 2, 5, 6];

#[derive(Debug, Clone)]
pub struct IntersectionMatrix {
    pub entries: Vec<Vec<i64>>,
}

impl Default for IntersectionMatrix {
    fn default() -> Self {
        IntersectionMatrix {
            entries: INTERSECTION_MATRIX.iter().map(|r| r.to_vec()).collect(),
        }
    }
}

impl IntersectionMatrix {
    pub fn is_symmetric(&self) -> bool {
        let n = self.entries.len();
        (0..n).all(|i| (0..n).all(|j| self.entries[i][j] == self.entries[j][i]))
    }

    pub fn diagonal_ok(&self) -> bool {
        self.entries
            .iter()
            .enumerate()
            .all(|(i, r)| matches!(r[i], -1 | -2))
    }

    pub fn rows(&self, idx: &[usize]) -> Vec<Vec<i64>> {
        idx.iter().map(|&i| self.entries[i].clone()).collect()
    }

    /// Largest set of boundary components meeting pairwise.
    pub fn boundary_clique(&self) -> usize {
        let n = BOUNDARY.len();
        let meets = |a: usize, b: usize| self.entries[BOUNDARY[a]][BOUNDARY[b]] > 0;
        (1u32..1 << n)
            .filter(|mask| {
                (0..n).all(|a| {
                    (0..n).all(|b| a >= b || mask & (1 << a) == 0 || mask & (1 << b) == 0 || meets(a, b))
                })
            })
            .map(|mask| mask.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }
}

/// Rank over the rationals by fraction-free (Bareiss) elimination.
pub fn rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let (nr, nc) = (m.len(), m.first().map_or(0, |r| r.len()));
    let mut prev = BigInt::from(1);
    let mut r = 0;
    for c in 0..nc {
        let Some(p) = (r..nr).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..nr {
            for j in c + 1..nc {
                let v = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                m[i][j] = v / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        r += 1;
        if r == nr {
            break;
        }
    }
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RankReport {
    pub rank: usize,
    pub boundary_rank: usize,
    #[serde(rename = "rho_U")]
    pub rho_u: usize,
    pub b: usize,
    pub exponent: usize,
}

/// Rank of the pairing, rank of the boundary rows,
/// `rho_U = GEOMETRIC_PICARD_RANK - boundary_rank`, `b` and `rho_U + b`.
///
/// The embedded matrix itself has rank 6 (`L_4 + L_5` and `L_2 + L_3` pair
/// identically with every basis element), so `rank` is reported as computed
/// and `rho_U` does not depend on it.
///
/// On a surface with normal-crossing boundary at most two components pass
/// through a point, so `b` is the boundary clique size capped at 2.
pub fn intersection_rank_check() -> RankReport {
    let m = IntersectionMatrix::default();
    debug_assert!(m.is_symmetric() && m.diagonal_ok());
    let rank = rank(&m.entries);
    let boundary_rank = self::rank(&m.rows(&BOUNDARY));
    let b = m.boundary_clique().min(2);
    let rho_u = GEOMETRIC_PICARD_RANK.saturating_sub(boundary_rank);
    RankReport {
        rank,
        boundary_rank,
        rho_u,
        b,
        exponent: rho_u + b,
    }
}
