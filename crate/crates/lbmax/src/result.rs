use serde::{Deserialize, Serialize};

/// Ascending eigenpairs of a weighted Laplace-Beltrami problem together with
/// the weighted volume and the normalized values lambda_k * volume.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenResult {
    pub eigenvalues: Vec<f64>,
    /// orthonormal in the weighted inner product of the discretization
    #[serde(skip)]
    pub eigenvectors: Vec<Vec<f64>>,
    pub volume: f64,
    pub normalized: Vec<f64>,
    #[serde(skip)]
    pub residuals: Vec<f64>,
}

impl EigenResult {
    pub fn new(eigenvalues: Vec<f64>, eigenvectors: Vec<Vec<f64>>, volume: f64, residuals: Vec<f64>) -> Self {
        let normalized = eigenvalues.iter().map(|l| l * volume).collect();
        EigenResult { eigenvalues, eigenvectors, volume, normalized, residuals }
    }

    /// Relative gap between lambda_k and its nearest neighbour in the result.
    pub fn relative_gap(&self, k: usize) -> f64 {
        let l = self.eigenvalues[k];
        let mut g = f64::INFINITY;
        if k > 0 {
            g = g.min(l - self.eigenvalues[k - 1]);
        }
        if k + 1 < self.eigenvalues.len() {
            g = g.min(self.eigenvalues[k + 1] - l);
        }
        g / l.abs().max(1.0)
    }
}
