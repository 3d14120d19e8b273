//! Exact transportation simplex over rationals.
//!
//! Solves `min Σ c(i,j)·x(i,j)` subject to row sums `supply` and column sums
//! `demand`, with a northwest-corner start, MODI potentials, and Bland's rule
//! (smallest index) for both entering and leaving cells.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// An optimal basic plan together with dual potentials.
#[derive(Clone, Debug)]
pub struct TransportSolution {
    pub value: BigRational,
    /// `plan[i][j]`, dense.
    pub plan: Vec<Vec<BigRational>>,
    /// Row potentials `u` and column potentials `v` with `u_i + v_j ≤ c_ij`,
    /// tight on basic cells.
    pub u: Vec<BigRational>,
    pub v: Vec<BigRational>,
    pub pivots: usize,
}

/// Requires strictly positive, equal-mass `supply` and `demand`.
pub fn solve(
    supply: &[BigRational],
    demand: &[BigRational],
    cost: &[Vec<BigRational>],
) -> TransportSolution {
    let (m, n) = (supply.len(), demand.len());
    assert!(
        m > 0 && n > 0,
        "transportation problem needs nonempty supports"
    );
    debug_assert_eq!(
        supply.iter().sum::<BigRational>(),
        demand.iter().sum::<BigRational>(),
        "unbalanced transportation problem"
    );

    let mut x = vec![vec![BigRational::zero(); n]; m];
    let mut basic = vec![vec![false; n]; m];

    // Northwest corner; on simultaneous exhaustion only the row advances, so
    // the next cell enters the basis at zero and the basis stays a tree.
    let mut s = supply.to_vec();
    let mut d = demand.to_vec();
    let (mut i, mut j) = (0, 0);
    loop {
        let q = if s[i] < d[j] {
            s[i].clone()
        } else {
            d[j].clone()
        };
        x[i][j] = q.clone();
        basic[i][j] = true;
        s[i] -= &q;
        d[j] -= &q;
        if i == m - 1 && j == n - 1 {
            break;
        }
        if s[i].is_zero() && i < m - 1 {
            i += 1;
        } else {
            j += 1;
        }
    }

    let mut pivots = 0;
    loop {
        let (u, v) = potentials(&basic, cost);
        let entering = (0..m)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .find(|&(i, j)| !basic[i][j] && (&cost[i][j] - &u[i] - &v[j]).is_negative());
        let Some((ei, ej)) = entering else {
            let value = (0..m)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .filter(|&(i, j)| basic[i][j])
                .map(|(i, j)| &cost[i][j] * &x[i][j])
                .sum();
            return TransportSolution {
                value,
                plan: x,
                u,
                v,
                pivots,
            };
        };
        pivots += 1;

        // Tree path from column `ej` back to row `ei`; its cells alternate
        // between losing and gaining mass.
        let path = tree_path(&basic, ei, ej);
        let minus: Vec<(usize, usize)> = path.iter().step_by(2).copied().collect();
        let plus: Vec<(usize, usize)> = path.iter().skip(1).step_by(2).copied().collect();
        let theta = minus
            .iter()
            .map(|&(i, j)| x[i][j].clone())
            .min()
            .expect("cycle has a losing cell");
        let leaving = *minus
            .iter()
            .filter(|&&(i, j)| x[i][j] == theta)
            .min()
            .expect("some losing cell attains the minimum");

        x[ei][ej] += &theta;
        for &(i, j) in &plus {
            x[i][j] += &theta;
        }
        for &(i, j) in &minus {
            x[i][j] -= &theta;
        }
        basic[ei][ej] = true;
        basic[leaving.0][leaving.1] = false;
    }
}

fn potentials(
    basic: &[Vec<bool>],
    cost: &[Vec<BigRational>],
) -> (Vec<BigRational>, Vec<BigRational>) {
    let (m, n) = (basic.len(), basic[0].len());
    let mut u: Vec<Option<BigRational>> = vec![None; m];
    let mut v: Vec<Option<BigRational>> = vec![None; n];
    u[0] = Some(BigRational::zero());
    // Rows are nodes 0..m, columns m..m+n.
    let mut stack = vec![0usize];
    while let Some(node) = stack.pop() {
        if node < m {
            let i = node;
            let ui = u[i].clone().expect("visited row has a potential");
            for j in 0..n {
                if basic[i][j] && v[j].is_none() {
                    v[j] = Some(&cost[i][j] - &ui);
                    stack.push(m + j);
                }
            }
        } else {
            let j = node - m;
            let vj = v[j].clone().expect("visited column has a potential");
            for i in 0..m {
                if basic[i][j] && u[i].is_none() {
                    u[i] = Some(&cost[i][j] - &vj);
                    stack.push(i);
                }
            }
        }
    }
    (
        u.into_iter()
            .map(|p| p.expect("basis spans all rows"))
            .collect(),
        v.into_iter()
            .map(|p| p.expect("basis spans all columns"))
            .collect(),
    )
}

/// Basic cells on the unique tree path from column `col` to row `row`.
fn tree_path(basic: &[Vec<bool>], row: usize, col: usize) -> Vec<(usize, usize)> {
    let (m, n) = (basic.len(), basic[0].len());
    let start = m + col;
    let mut parent: Vec<Option<usize>> = vec![None; m + n];
    let mut seen = vec![false; m + n];
    seen[start] = true;
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(node) = queue.pop_front() {
        if node == row {
            break;
        }
        let neighbours: Vec<usize> = if node < m {
            (0..n).filter(|&j| basic[node][j]).map(|j| m + j).collect()
        } else {
            (0..m).filter(|&i| basic[i][node - m]).collect()
        };
        for next in neighbours {
            if !seen[next] {
                seen[next] = true;
                parent[next] = Some(node);
                queue.push_back(next);
            }
        }
    }
    let mut cells = Vec::new();
    let mut node = row;
    while node != start {
        let p = parent[node].expect("basis is a spanning tree");
        let cell = if node < m {
            (node, p - m)
        } else {
            (p, node - m)
        };
        cells.push(cell);
        node = p;
    }
    cells.reverse();
    cells
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn point_masses() {
        let sol = solve(&[q(1, 1)], &[q(1, 1)], &[vec![q(3, 10)]]);
        assert_eq!(sol.value, q(3, 10));
    }

    #[test]
    fn split_source() {
        let sol = solve(
            &[q(1, 2), q(1, 2)],
            &[q(1, 1)],
            &[vec![q(1, 5)], vec![q(3, 5)]],
        );
        assert_eq!(sol.value, q(2, 5));
    }

    #[test]
    fn prefers_cheap_diagonal() {
        // Northwest corner starts on the expensive cells.
        let cost = vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(1, 1)]];
        let sol = solve(&[q(1, 2), q(1, 2)], &[q(1, 2), q(1, 2)], &cost);
        assert_eq!(sol.value, q(0, 1));
        assert!(sol.pivots >= 1);
        for i in 0..2 {
            for j in 0..2 {
                assert!(&sol.u[i] + &sol.v[j] <= cost[i][j]);
            }
        }
    }

    #[test]
    fn degenerate_start() {
        let cost = vec![
            vec![q(1, 1), q(1, 2), q(0, 1)],
            vec![q(1, 3), q(1, 1), q(1, 4)],
            vec![q(0, 1), q(1, 5), q(1, 1)],
        ];
        let third = q(1, 3);
        let sol = solve(
            &[third.clone(), third.clone(), third.clone()],
            &[third.clone(), third.clone(), third],
            &cost,
        );
        // Best permutation: (0,2), (1,0), (2,1) = 0 + 1/3 + 1/5.
        assert_eq!(sol.value, q(8, 15) * q(1, 3));
    }
}
