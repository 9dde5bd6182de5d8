//! Linearised best-response dynamics `x(t+1) = a + A_K x(t)`, valid when the
//! antenna height is negligible next to the inter-station distances.

use nalgebra::{DMatrix, DVector};

use super::spectral::{row_sum_bounds, spectral_radius};
use crate::error::{Error, Result};
use crate::scenario::ScenarioConfig;

/// Boundary-row coefficient `g(α) = (2^((1+α)/α) - 2^(2/α)) / (4 - 2^(2/α))`.
pub fn g_alpha(alpha: f64) -> f64 {
    let c = 2f64.powf(2.0 / alpha);
    (2f64.powf((1.0 + alpha) / alpha) - c) / (4.0 - c)
}

/// Affine term of the last station, `(4 - 2^((1+α)/α)) L / (4 - 2^(2/α))`.
fn last_offset(alpha: f64, length: f64) -> f64 {
    let c = 2f64.powf(2.0 / alpha);
    (4.0 - 2f64.powf((1.0 + alpha) / alpha)) * length / (4.0 - c)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearBrdModel {
    /// Coefficient matrix `A_K`.
    pub matrix: DMatrix<f64>,
    /// Affine term; only the last entry is nonzero.
    pub offset: DVector<f64>,
    pub g_alpha: f64,
}

impl LinearBrdModel {
    pub fn players(&self) -> usize {
        self.offset.len()
    }

    /// One simultaneous step.
    pub fn step(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.offset + &self.matrix * x
    }
}

/// Builds `A_K` and `a` for the scenario.
pub fn linearized_model(cfg: &ScenarioConfig) -> Result<LinearBrdModel> {
    let k = cfg.players();
    if k < 2 {
        return Err(Error::InvalidConfig("linearised dynamics need K >= 2".into()));
    }
    let g = g_alpha(cfg.alpha());
    let mut a = DMatrix::zeros(k, k);
    a[(0, 1)] = g;
    a[(k - 1, k - 2)] = g;
    for i in 1..k - 1 {
        a[(i, i - 1)] = 0.5;
        a[(i, i + 1)] = 0.5;
    }
    let mut offset = DVector::zeros(k);
    offset[k - 1] = last_offset(cfg.alpha(), cfg.length());
    Ok(LinearBrdModel {
        matrix: a,
        offset,
        g_alpha: g,
    })
}

/// Update of station `k` alone: identity except row `k`, which is row `k`
/// of `A_K`; the affine part is `a_K` when `k` is the last station.
pub fn sequential_update_matrix(k: usize, cfg: &ScenarioConfig) -> Result<(DMatrix<f64>, DVector<f64>)> {
    cfg.check_player(k)?;
    let model = linearized_model(cfg)?;
    let n = model.players();
    let mut m = DMatrix::<f64>::identity(n, n);
    m.set_row(k, &model.matrix.row(k));
    let mut offset = DVector::zeros(n);
    offset[k] = model.offset[k];
    Ok((m, offset))
}

/// Affine map of one full round `k = 1..K` of sequential updates.
pub fn composed_sequential_map(cfg: &ScenarioConfig) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let n = cfg.players();
    let mut m = DMatrix::<f64>::identity(n, n);
    let mut c = DVector::zeros(n);
    for k in 0..n {
        let (mk, ak) = sequential_update_matrix(k, cfg)?;
        c = &ak + &mk * c;
        m = &mk * m;
    }
    Ok((m, c))
}

/// Spectral data certifying convergence of both update schedules.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceCertificate {
    pub g_alpha: f64,
    pub rho_simultaneous: f64,
    pub row_sum_min: f64,
    pub row_sum_max: f64,
    /// `ρ(A_K^k)` for each single-station update.
    pub rho_single: Vec<f64>,
    /// `ρ` of the composed round-robin linear part.
    pub rho_sequential: f64,
}

impl ConvergenceCertificate {
    /// Both schedules contract and the simultaneous radius sits in the row-sum bracket.
    pub fn holds(&self) -> bool {
        let tol = 1e-9;
        self.rho_simultaneous < 1.0
            && self.rho_sequential < 1.0
            && self.rho_simultaneous >= self.row_sum_min - tol
            && self.rho_simultaneous <= self.row_sum_max + tol
    }
}

pub fn convergence_certificate(cfg: &ScenarioConfig, tol: f64) -> Result<ConvergenceCertificate> {
    let model = linearized_model(cfg)?;
    let (row_sum_min, row_sum_max) = row_sum_bounds(&model.matrix);
    let rho_single = (0..cfg.players())
        .map(|k| sequential_update_matrix(k, cfg).and_then(|(m, _)| spectral_radius(&m, tol)))
        .collect::<Result<Vec<_>>>()?;
    let (composed, _) = composed_sequential_map(cfg)?;
    Ok(ConvergenceCertificate {
        g_alpha: model.g_alpha,
        rho_simultaneous: spectral_radius(&model.matrix, tol)?,
        row_sum_min,
        row_sum_max,
        rho_single,
        rho_sequential: spectral_radius(&composed, tol)?,
    })
}
