//! Dense complex Gauss–Jordan elimination.

use crate::algebra::Scalar;

/// Reduced row echelon form of an augmented system `A x = b`.
#[derive(Clone, Debug)]
pub(crate) struct Reduced {
    /// `(row, column)` of every pivot, in column order.
    pub pivots: Vec<(usize, usize)>,
    /// Columns without a pivot, in column order.
    pub free: Vec<usize>,
    pub a: Vec<Vec<Scalar>>,
    pub rhs: Vec<Scalar>,
    pub consistent: bool,
}

/// Eliminates column by column, choosing the largest entry of the current
/// column as pivot. A column whose best candidate is below `eps` stays free.
/// Rows are scaled to unit max-norm first so the threshold is relative.
pub(crate) fn reduce(mut a: Vec<Vec<Scalar>>, mut rhs: Vec<Scalar>, eps: f64) -> Reduced {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    for (row, b) in a.iter_mut().zip(rhs.iter_mut()) {
        let scale = row.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if scale > 0.0 {
            row.iter_mut().for_each(|z| *z /= scale);
            *b /= scale;
        }
    }

    let mut pivots = Vec::new();
    let mut free = Vec::new();
    let mut next = 0;
    for col in 0..cols {
        let best = (next..rows).max_by(|&i, &j| {
            a[i][col]
                .norm()
                .partial_cmp(&a[j][col].norm())
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(j.cmp(&i))
        });
        let Some(best) = best.filter(|&r| a[r][col].norm() >= eps) else {
            free.push(col);
            continue;
        };
        a.swap(next, best);
        rhs.swap(next, best);
        let p = a[next][col];
        a[next].iter_mut().for_each(|z| *z /= p);
        rhs[next] /= p;
        for r in 0..rows {
            if r == next {
                continue;
            }
            let f = a[r][col];
            if f == Scalar::new(0.0, 0.0) {
                continue;
            }
            for c in 0..cols {
                let v = a[next][c];
                a[r][c] -= f * v;
            }
            let v = rhs[next];
            rhs[r] -= f * v;
            a[r][col] = Scalar::new(0.0, 0.0);
        }
        pivots.push((next, col));
        next += 1;
    }
    let consistent = rhs[next..].iter().all(|b| b.norm() < eps);
    Reduced {
        pivots,
        free,
        a,
        rhs,
        consistent,
    }
}

/// Solves a square system; `None` when singular within `eps`.
pub(crate) fn solve_square(a: Vec<Vec<Scalar>>, b: Vec<Scalar>, eps: f64) -> Option<Vec<Scalar>> {
    let n = b.len();
    let red = reduce(a, b, eps);
    if !red.free.is_empty() || !red.consistent {
        return None;
    }
    let mut x = vec![Scalar::new(0.0, 0.0); n];
    for &(row, col) in &red.pivots {
        x[col] = red.rhs[row];
    }
    Some(x)
}
