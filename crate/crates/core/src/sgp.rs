//! Switching graph perceptron: a kernel perceptron with the Laplacian kernel
//! `K = L⁺ + R_L 1 1ᵀ` whose weight vector is projected back onto the ball
//! `‖w‖_K <= γ` after each mistake.
//!
//! The weight vector is kept as `w = K c`, so `‖w‖_K² = cᵀ K c` is updated in
//! `O(1)` and each mistake costs `O(n)`.

use nalgebra::{Cholesky, DMatrix, DVector};
use thiserror::Error;

use crate::graph::{Graph, GraphError, Labeling};

/// Largest graph the dense kernel is built for (a 4096-vertex kernel takes
/// 128 MiB).
pub const SGP_MAX_VERTICES: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SgpError {
    #[error("graph has {n} vertices; the dense kernel supports at most {max}")]
    TooLarge { n: usize, max: usize },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("kernel matrix is not positive definite")]
    Singular,
    #[error("update called without a preceding predict")]
    Protocol,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// The graph kernel `L⁺ + (max_i L⁺_ii) 1 1ᵀ`.
pub fn sgp_kernel(graph: &Graph) -> Result<DMatrix<f64>, SgpError> {
    if graph.n() > SGP_MAX_VERTICES {
        return Err(SgpError::TooLarge { n: graph.n(), max: SGP_MAX_VERTICES });
    }
    let mut k = graph.laplacian_pinv()?.into_matrix();
    let r = k.diagonal().max();
    k.add_scalar_mut(r);
    Ok(k)
}

/// `max_k sqrt(u_kᵀ K⁻¹ u_k)`: the smallest radius containing every labeling.
pub fn sgp_gamma_oracle(labelings: &[Labeling], kernel: &DMatrix<f64>) -> Result<f64, SgpError> {
    let chol = Cholesky::new(kernel.clone()).ok_or(SgpError::Singular)?;
    let mut gamma: f64 = 0.0;
    for u in labelings {
        if u.len() != kernel.nrows() {
            return Err(SgpError::Graph(GraphError::LengthMismatch { expected: kernel.nrows(), got: u.len() }));
        }
        let v = DVector::from_iterator(u.len(), u.as_slice().iter().map(|&x| x as f64));
        let x = chol.solve(&v);
        gamma = gamma.max(v.dot(&x).max(0.0).sqrt());
    }
    Ok(gamma)
}

#[derive(Debug, Clone)]
pub struct Sgp {
    kernel: DMatrix<f64>,
    gamma: f64,
    coef: DVector<f64>,
    w: DVector<f64>,
    normsq: f64,
    mistakes: u64,
    pending: Option<(usize, i8)>,
}

impl Sgp {
    pub fn new(kernel: DMatrix<f64>, gamma: f64) -> Result<Self, SgpError> {
        if !kernel.is_square() || kernel.nrows() == 0 {
            return Err(SgpError::Parameter("kernel must be a non-empty square matrix".into()));
        }
        if gamma.is_nan() || gamma <= 0.0 {
            return Err(SgpError::Parameter(format!("gamma must be positive, got {gamma}")));
        }
        let n = kernel.nrows();
        Ok(Sgp { kernel, gamma, coef: DVector::zeros(n), w: DVector::zeros(n), normsq: 0.0, mistakes: 0, pending: None })
    }

    pub fn from_graph(graph: &Graph, gamma: f64) -> Result<Self, SgpError> {
        Self::new(sgp_kernel(graph)?, gamma)
    }

    pub fn n(&self) -> usize {
        self.kernel.nrows()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn mistakes(&self) -> u64 {
        self.mistakes
    }

    pub fn kernel(&self) -> &DMatrix<f64> {
        &self.kernel
    }

    pub fn coefficients(&self) -> &DVector<f64> {
        &self.coef
    }

    pub fn weights(&self) -> &DVector<f64> {
        &self.w
    }

    /// Incrementally maintained `‖w‖_K²`.
    pub fn norm_sq(&self) -> f64 {
        self.normsq
    }

    /// `cᵀ K c` computed from scratch.
    pub fn norm_sq_recomputed(&self) -> f64 {
        self.coef.dot(&(&self.kernel * &self.coef))
    }

    pub fn predict(&mut self, vertex: usize) -> Result<i8, SgpError> {
        if vertex >= self.n() {
            return Err(SgpError::Parameter(format!("vertex {vertex} out of range for n = {}", self.n())));
        }
        let prediction = if self.w[vertex] < 0.0 { -1 } else { 1 };
        self.pending = Some((vertex, prediction));
        Ok(prediction)
    }

    pub fn update(&mut self, label: i8) -> Result<bool, SgpError> {
        if label != 1 && label != -1 {
            return Err(SgpError::Parameter(format!("label must be -1 or +1, got {label}")));
        }
        let (v, prediction) = self.pending.take().ok_or(SgpError::Protocol)?;
        if prediction == label {
            return Ok(false);
        }
        let kvv = self.kernel[(v, v)];
        let delta = label as f64 / kvv;
        self.normsq += 2.0 * delta * self.w[v] + delta * delta * kvv;
        self.coef[v] += delta;
        self.w.axpy(delta, &self.kernel.column(v), 1.0);
        if self.normsq > self.gamma * self.gamma {
            let scale = self.gamma / self.normsq.sqrt();
            self.coef *= scale;
            self.w *= scale;
            self.normsq = self.gamma * self.gamma;
        }
        self.mistakes += 1;
        Ok(true)
    }

    pub fn step(&mut self, vertex: usize, label: i8) -> Result<(i8, bool), SgpError> {
        let p = self.predict(vertex)?;
        Ok((p, self.update(label)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_of_single_edge() {
        let k = sgp_kernel(&Graph::path(2)).unwrap();
        for (i, j, v) in [(0, 0, 0.5), (0, 1, 0.0), (1, 1, 0.5)] {
            assert!((k[(i, j)] - v).abs() < 1e-12);
        }
    }

    #[test]
    fn kernel_is_positive_definite() {
        let g = Graph::new(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (1, 3)]).unwrap();
        let k = sgp_kernel(&g).unwrap();
        assert!((&k - k.transpose()).amax() < 1e-12);
        assert!(k.clone().symmetric_eigen().eigenvalues.min() > 0.0);
        let r = k.diagonal().max() - g.laplacian_pinv().unwrap().matrix().diagonal().max();
        for i in 0..5 {
            assert!((k.row(i).sum() - 5.0 * r).abs() < 1e-9);
        }
    }

    #[test]
    fn first_mistake_norm() {
        let mut s = Sgp::from_graph(&Graph::path(2), 1e6).unwrap();
        assert_eq!(s.predict(0).unwrap(), 1);
        assert!(s.update(-1).unwrap());
        assert!((s.weights()[0] + 1.0).abs() < 1e-12);
        assert!((s.norm_sq() - 2.0).abs() < 1e-12);
        assert!((s.norm_sq_recomputed() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_oracle_on_single_edge() {
        let k = sgp_kernel(&Graph::path(2)).unwrap();
        let u = Labeling::constant(2, 1);
        assert!((sgp_gamma_oracle(std::slice::from_ref(&u), &k).unwrap() - 2.0).abs() < 1e-12);
        let v = Labeling::new(vec![1, -1]).unwrap();
        let g1 = sgp_gamma_oracle(std::slice::from_ref(&u), &k).unwrap();
        let g2 = sgp_gamma_oracle(&[u, v], &k).unwrap();
        assert!(g2 >= g1);
    }

    #[test]
    fn projection_keeps_norm_bounded() {
        let g = Graph::cycle(12);
        let mut s = Sgp::from_graph(&g, 0.8).unwrap();
        for t in 0..300usize {
            let v = (t * 5) % 12;
            let y = if (v < 6) ^ (t / 50 % 2 == 1) { 1 } else { -1 };
            s.step(v, y).unwrap();
            assert!(s.norm_sq() <= 0.64 + 1e-12);
            if t % 100 == 0 {
                assert!((s.norm_sq() - s.norm_sq_recomputed()).abs() < 1e-8);
            }
        }
    }
}
