#![allow(dead_code)]

use boltseq::{InteractionMatrix, TamCoefficients};

/// Coefficients measured with friction mu = 0.2.
pub fn mu02() -> TamCoefficients<f64> {
    TamCoefficients::new(-0.147, -0.147, -0.018, 0.002)
}

/// Coefficients measured with friction mu = 0.3.
pub fn mu03() -> TamCoefficients<f64> {
    TamCoefficients::new(-0.139, -0.138, -0.019, -0.002)
}

/// Dense Gaussian elimination with partial pivoting. Knows nothing about
/// triangular structure; used as an independent check on back-substitution.
pub fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            let pivot_row = a[col].clone();
            for (x, p) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= f * p;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

pub fn dense(a: &InteractionMatrix<f64>) -> Vec<Vec<f64>> {
    a.rows().map(<[f64]>::to_vec).collect()
}

pub fn relative_std(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    var.sqrt() / mean
}
