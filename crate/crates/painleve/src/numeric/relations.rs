//! Detection of polynomial relations among sampled solution columns via
//! singular-value thresholding of the monomial evaluation matrix.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};

/// A candidate algebraic relation among the named columns: a near-null
/// direction of the monomial evaluation matrix up to the requested total
/// degree. The coefficient vector has unit length; the score is the
/// associated singular value relative to the largest one.
#[derive(Debug, Clone, Serialize)]
pub struct RelationCandidate {
    pub variables: Vec<String>,
    /// Exponent vectors over `variables`, one per coefficient.
    pub monomials: Vec<Vec<u32>>,
    pub coeffs: Vec<f64>,
    pub score: f64,
}

impl RelationCandidate {
    /// Value of the relation at one sample point (one value per variable).
    pub fn eval(&self, point: &[f64]) -> f64 {
        self.monomials
            .iter()
            .zip(self.coeffs.iter())
            .map(|(exps, c)| {
                let mut v = *c;
                for (x, &e) in point.iter().zip(exps.iter()) {
                    if e > 0 {
                        v *= x.powi(e as i32);
                    }
                }
                v
            })
            .sum()
    }

    /// Human-readable form with coefficients rescaled so the largest
    /// magnitude is 1; negligible terms are dropped.
    pub fn display(&self) -> String {
        let max = self
            .coeffs
            .iter()
            .fold(0.0_f64, |m, c| m.max(c.abs()))
            .max(f64::MIN_POSITIVE);
        let mut parts = Vec::new();
        for (exps, c) in self.monomials.iter().zip(self.coeffs.iter()) {
            let scaled = c / max;
            if scaled.abs() < 1e-6 {
                continue;
            }
            let mut factors = Vec::new();
            for (name, &e) in self.variables.iter().zip(exps.iter()) {
                if e == 1 {
                    factors.push(name.clone());
                } else if e > 1 {
                    factors.push(format!("{name}^{e}"));
                }
            }
            let mono = if factors.is_empty() {
                "1".to_string()
            } else {
                factors.join("*")
            };
            parts.push(format!("{scaled:+.4}*{mono}"));
        }
        parts.join(" ")
    }
}

/// Exponent vectors of all monomials in `nvars` variables with total degree
/// at most `degree`, constant first, then by total degree.
pub fn monomial_basis(nvars: usize, degree: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; nvars];
    gen_monomials(&mut out, &mut cur, 0, degree);
    out.sort_by_key(|e| (e.iter().sum::<u32>(), e.clone()));
    out
}

fn gen_monomials(out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, pos: usize, budget: u32) {
    if pos == cur.len() {
        out.push(cur.clone());
        return;
    }
    for e in 0..=budget {
        cur[pos] = e;
        gen_monomials(out, cur, pos + 1, budget - e);
    }
    cur[pos] = 0;
}

/// Builds the monomial evaluation matrix over the sample columns, scales its
/// columns to unit norm, and reports every right-singular direction whose
/// singular value is below `eps` times the largest singular value, sorted by
/// score. An empty list means no relation was detected up to the degree — a
/// necessary check for algebraic independence, not a proof.
pub fn detect_relations(
    names: &[String],
    columns: &[Vec<f64>],
    degree: u32,
    eps: f64,
) -> Result<Vec<RelationCandidate>> {
    assert_eq!(names.len(), columns.len(), "one name per column");
    let nvars = columns.len();
    let rows = columns.first().map(|c| c.len()).unwrap_or(0);
    assert!(
        columns.iter().all(|c| c.len() == rows),
        "ragged sample columns"
    );
    let basis = monomial_basis(nvars, degree);
    let m = basis.len();
    if rows < 3 * m {
        return Err(Error::InsufficientSamples {
            needed: 3 * m,
            got: rows,
        });
    }

    let mut a = DMatrix::<f64>::zeros(rows, m);
    for (j, exps) in basis.iter().enumerate() {
        for i in 0..rows {
            let mut v = 1.0;
            for (col, &e) in columns.iter().zip(exps.iter()) {
                if e > 0 {
                    v *= col[i].powi(e as i32);
                }
            }
            a[(i, j)] = v;
        }
    }

    // Column scaling to unit norm keeps the monomial matrix conditioned.
    let mut scales = vec![1.0_f64; m];
    for j in 0..m {
        let norm = a.column(j).norm();
        if norm > 0.0 {
            scales[j] = norm;
            for i in 0..rows {
                a[(i, j)] /= norm;
            }
        }
    }

    let svd = a.clone().svd(false, true);
    let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
    let sigma = &svd.singular_values;
    let sigma_max = sigma.iter().cloned().fold(0.0_f64, f64::max);
    if sigma_max == 0.0 {
        return Ok(Vec::new());
    }

    // Null directions in unscaled coefficient space.
    let mut vecs: Vec<Vec<f64>> = Vec::new();
    for k in 0..sigma.len() {
        if sigma[k] / sigma_max >= eps {
            continue;
        }
        vecs.push((0..m).map(|j| v_t[(k, j)] / scales[j]).collect());
    }
    // A multi-dimensional null space comes back as an arbitrary orthogonal
    // basis; row reduction restores sparse canonical generators.
    if vecs.len() > 1 {
        rref(&mut vecs);
    }

    let mut out = Vec::new();
    for mut coeffs in vecs {
        let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        for c in coeffs.iter_mut() {
            *c /= norm;
        }
        // Residual of the scaled matrix along the rescaled direction; for a
        // pure singular vector this is exactly its singular value.
        let mut v: Vec<f64> = coeffs.iter().zip(&scales).map(|(c, s)| c * s).collect();
        let vnorm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        for c in v.iter_mut() {
            *c /= vnorm;
        }
        let residual = (&a * DMatrix::from_column_slice(m, 1, &v)).norm();
        out.push(RelationCandidate {
            variables: names.to_vec(),
            monomials: basis.clone(),
            coeffs,
            score: residual / sigma_max,
        });
    }
    out.sort_by(|a, b| a.score.total_cmp(&b.score));
    Ok(out)
}

/// Reduced row echelon form with pivoting by column order (constant first),
/// choosing the largest-magnitude pivot; pivot signs are made positive.
fn rref(rows: &mut [Vec<f64>]) {
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut next_row = 0;
    for col in 0..ncols {
        if next_row >= rows.len() {
            break;
        }
        let (best, mag) = (next_row..rows.len())
            .map(|r| (r, rows[r][col].abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if mag < 1e-7 {
            continue;
        }
        rows.swap(next_row, best);
        let pivot = rows[next_row][col];
        for v in rows[next_row].iter_mut() {
            *v /= pivot;
        }
        for r in 0..rows.len() {
            if r != next_row {
                let f = rows[r][col];
                if f != 0.0 {
                    for j in 0..ncols {
                        let sub = f * rows[next_row][j];
                        rows[r][j] -= sub;
                    }
                }
            }
        }
        next_row += 1;
    }
}

/// Largest residual of the candidate over held-out sample columns.
pub fn candidate_max_residual(cand: &RelationCandidate, columns: &[Vec<f64>]) -> f64 {
    let rows = columns.first().map(|c| c.len()).unwrap_or(0);
    let mut point = vec![0.0; columns.len()];
    let mut max = 0.0_f64;
    for i in 0..rows {
        for (slot, col) in point.iter_mut().zip(columns.iter()) {
            *slot = col[i];
        }
        max = max.max(cand.eval(&point).abs());
    }
    max
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_counts() {
        // C(v + d, d) monomials in v variables of degree <= d.
        assert_eq!(monomial_basis(2, 2).len(), 6);
        assert_eq!(monomial_basis(3, 3).len(), 20);
        assert_eq!(monomial_basis(5, 3).len(), 56);
        assert_eq!(monomial_basis(2, 0).len(), 1);
    }

    #[test]
    fn recovers_ty_plus_one() {
        // y = -1/t sampled at 50 points: the relation t*y + 1 = 0.
        let ts: Vec<f64> = (0..50).map(|i| 1.0 + 0.05 * i as f64).collect();
        let ys: Vec<f64> = ts.iter().map(|t| -1.0 / t).collect();
        let names = vec!["t".to_string(), "y".to_string()];
        let found = detect_relations(&names, &[ts, ys], 2, 1e-6).unwrap();
        assert!(!found.is_empty());
        let top = &found[0];
        assert!(top.score < 1e-10, "score {}", top.score);
        // coefficient pattern proportional to t*y + 1
        let idx_ty = top
            .monomials
            .iter()
            .position(|e| e == &vec![1u32, 1])
            .unwrap();
        let idx_one = top.monomials.iter().position(|e| e == &vec![0u32, 0]).unwrap();
        let ratio = top.coeffs[idx_ty] / top.coeffs[idx_one];
        assert!((ratio - 1.0).abs() < 1e-8, "ratio {ratio}");
        for (j, c) in top.coeffs.iter().enumerate() {
            if j != idx_ty && j != idx_one {
                assert!(c.abs() < 1e-8 * top.coeffs[idx_one].abs());
            }
        }
    }

    #[test]
    fn constant_zero_column() {
        let ts: Vec<f64> = (0..30).map(|i| 1.0 + 0.1 * i as f64).collect();
        let ys = vec![0.0; 30];
        let names = vec!["t".to_string(), "y".to_string()];
        let found = detect_relations(&names, &[ts, ys], 1, 1e-6).unwrap();
        assert!(!found.is_empty());
        // the best candidate is supported on the y monomial alone
        let top = &found[0];
        let idx_y = top.monomials.iter().position(|e| e == &vec![0u32, 1]).unwrap();
        assert!(top.coeffs[idx_y].abs() > 0.99);
    }

    #[test]
    fn independent_columns_give_nothing() {
        // t and e-ish pseudo-random data have no low-degree relation.
        let ts: Vec<f64> = (0..60).map(|i| 1.0 + 0.05 * i as f64).collect();
        let ys: Vec<f64> = (0..60)
            .map(|i| ((i * 2654435761_usize % 1000) as f64) / 1000.0 + 0.1)
            .collect();
        let names = vec!["t".to_string(), "y".to_string()];
        let found = detect_relations(&names, &[ts, ys], 2, 1e-6).unwrap();
        assert!(found.is_empty());
    }

    #[test]
    fn insufficient_samples() {
        let names = vec!["t".to_string()];
        let err = detect_relations(&names, &[vec![1.0, 2.0]], 3, 1e-6);
        assert!(matches!(err, Err(Error::InsufficientSamples { .. })));
    }

    #[test]
    fn holdout_residual_of_true_relation() {
        let ts: Vec<f64> = (0..100).map(|i| 1.0 + 0.01 * i as f64).collect();
        let ys: Vec<f64> = ts.iter().map(|t| -1.0 / t).collect();
        let names = vec!["t".to_string(), "y".to_string()];
        let (fit_t, hold_t) = ts.split_at(50);
        let (fit_y, hold_y) = ys.split_at(50);
        let found =
            detect_relations(&names, &[fit_t.to_vec(), fit_y.to_vec()], 2, 1e-6).unwrap();
        let top = &found[0];
        let r = candidate_max_residual(top, &[hold_t.to_vec(), hold_y.to_vec()]);
        assert!(r < 1e-9, "holdout residual {r}");
    }
}
