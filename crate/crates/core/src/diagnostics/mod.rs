//! Exact information quantities on small discrete joints, the
//! data-processing check for `(Y, IR) → X → m`, distillation curves read
//! back from trajectory logs, and a toy-MDP information check.
//!
//! Mutual information is reported in bits throughout this module.

mod curves;
mod toy;

pub use curves::{distillation_curves, DistillationSeries, EpisodeSeries};
pub use toy::{information_check, memory_answer_mi, InfoCheckConfig, InfoReport, PolicyInfo};

use crate::error::DiagnosticsError;
use serde::{Deserialize, Serialize};

/// Dense joint distribution, row-major with the last variable fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointTable {
    names: Vec<String>,
    sizes: Vec<usize>,
    probs: Vec<f64>,
}

const SUM_TOL: f64 = 1e-12;

impl JointTable {
    pub fn new(names: &[&str], sizes: &[usize], probs: Vec<f64>) -> Result<Self, DiagnosticsError> {
        let bad = |m: String| Err(DiagnosticsError::Contract(m));
        if names.len() != sizes.len() || names.is_empty() {
            return bad("one support size per variable, at least one variable".into());
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return bad(format!("duplicate variable `{n}`"));
            }
        }
        let cells: usize = sizes.iter().product();
        if cells != probs.len() || cells == 0 {
            return bad(format!("{} probabilities for {cells} cells", probs.len()));
        }
        if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return bad(format!("invalid probability {p}"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOL * (cells as f64).max(1.0) {
            return bad(format!("probabilities sum to {total}"));
        }
        Ok(Self {
            names: names.iter().map(|s| s.to_string()).collect(),
            sizes: sizes.to_vec(),
            probs,
        })
    }

    /// Normalizes nonnegative weights into a table.
    pub fn from_weights(names: &[&str], sizes: &[usize], weights: Vec<f64>) -> Result<Self, DiagnosticsError> {
        let total: f64 = weights.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(DiagnosticsError::Contract("weights must have a positive finite sum".into()));
        }
        Self::new(names, sizes, weights.into_iter().map(|w| w / total).collect())
    }

    /// Empirical joint of paired observations (counts over the observed support).
    pub fn empirical(names: &[&str], observations: &[Vec<usize>]) -> Result<Self, DiagnosticsError> {
        if observations.is_empty() {
            return Err(DiagnosticsError::Contract("no observations".into()));
        }
        let mut sizes = vec![0usize; names.len()];
        for o in observations {
            if o.len() != names.len() {
                return Err(DiagnosticsError::Contract("observation arity differs from variable count".into()));
            }
            for (s, &v) in sizes.iter_mut().zip(o) {
                *s = (*s).max(v + 1);
            }
        }
        let mut counts = vec![0.0; sizes.iter().product()];
        for o in observations {
            counts[flat_index(&sizes, o)] += 1.0;
        }
        Self::from_weights(names, &sizes, counts)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    fn var(&self, name: &str) -> Result<usize, DiagnosticsError> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| DiagnosticsError::Contract(format!("unknown variable `{name}`")))
    }

    fn vars(&self, names: &[&str]) -> Result<Vec<usize>, DiagnosticsError> {
        names.iter().map(|n| self.var(n)).collect()
    }

    /// Marginal over `vars` (in the given order), dense.
    fn marginal(&self, vars: &[usize]) -> (Vec<usize>, Vec<f64>) {
        let sizes: Vec<usize> = vars.iter().map(|&v| self.sizes[v]).collect();
        let mut out = vec![0.0; sizes.iter().product::<usize>().max(1)];
        let mut idx = vec![0usize; self.sizes.len()];
        for &p in &self.probs {
            if p > 0.0 {
                let sub: Vec<usize> = vars.iter().map(|&v| idx[v]).collect();
                out[flat_index(&sizes, &sub)] += p;
            }
            increment(&mut idx, &self.sizes);
        }
        (sizes, out)
    }
}

fn flat_index(sizes: &[usize], idx: &[usize]) -> usize {
    idx.iter().zip(sizes).fold(0, |acc, (&i, &s)| acc * s + i)
}

fn increment(idx: &mut [usize], sizes: &[usize]) {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < sizes[k] {
            return;
        }
        idx[k] = 0;
    }
}

/// `I(A; B | C)` in bits by direct summation. Empty `cond` gives `I(A; B)`.
pub fn exact_mi(j: &JointTable, a: &[&str], b: &[&str], cond: &[&str]) -> Result<f64, DiagnosticsError> {
    let (va, vb, vc) = (j.vars(a)?, j.vars(b)?, j.vars(cond)?);
    if va.is_empty() || vb.is_empty() {
        return Err(DiagnosticsError::Contract("both variable sets must be non-empty".into()));
    }
    let all: Vec<usize> = va.iter().chain(&vb).chain(&vc).copied().collect();
    for (i, v) in all.iter().enumerate() {
        if all[..i].contains(v) {
            return Err(DiagnosticsError::Contract(format!("variable `{}` appears in more than one set", j.names[*v])));
        }
    }
    let (sizes, pabc) = j.marginal(&all);
    let ac: Vec<usize> = va.iter().chain(&vc).copied().collect();
    let bc: Vec<usize> = vb.iter().chain(&vc).copied().collect();
    let (s_ac, p_ac) = j.marginal(&ac);
    let (s_bc, p_bc) = j.marginal(&bc);
    let (s_c, p_c) = j.marginal(&vc);
    let (na, nb) = (va.len(), vb.len());
    let mut idx = vec![0usize; sizes.len()];
    let mut mi = 0.0;
    for &p in &pabc {
        if p > 0.0 {
            let ia: Vec<usize> = idx[..na].iter().chain(&idx[na + nb..]).copied().collect();
            let ib: Vec<usize> = idx[na..].to_vec();
            let ic = &idx[na + nb..];
            let pc = if vc.is_empty() { 1.0 } else { p_c[flat_index(&s_c, ic)] };
            mi += p * (p * pc / (p_ac[flat_index(&s_ac, &ia)] * p_bc[flat_index(&s_bc, &ib)])).log2();
        }
        increment(&mut idx, &sizes);
    }
    // Rounding can leave an exactly independent pair a hair below zero.
    Ok(mi.max(0.0))
}

/// Quantities and verdict of the data-processing check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DpiReport {
    /// `I((Y, IR); m)`.
    pub i_yir_m: f64,
    pub i_x_m: f64,
    pub i_y_m: f64,
    /// `I(IR; m | Y)`.
    pub i_ir_m_given_y: f64,
    pub tol: f64,
    /// `I((Y,IR); m) ≤ I(X; m)`.
    pub dpi_holds: bool,
    /// `I(IR; m | Y) ≤ I(X; m) − I(Y; m)`.
    pub conditional_bound_holds: bool,
}

impl DpiReport {
    pub fn passed(&self) -> bool {
        self.dpi_holds && self.conditional_bound_holds
    }
}

/// Tolerance of the Markov-property check and both inequalities.
pub const DPI_TOL: f64 = 1e-10;

/// Verifies `p(m | x, y, ir) = p(m | x)` and then both DPI consequences.
pub fn dpi_bound_check(j: &JointTable, y: &str, ir: &str, x: &str, m: &str) -> Result<DpiReport, DiagnosticsError> {
    let [vy, vir, vx, vm] = [j.var(y)?, j.var(ir)?, j.var(x)?, j.var(m)?];
    let (s4, p4) = j.marginal(&[vy, vir, vx, vm]);
    let (s3, p3) = j.marginal(&[vy, vir, vx]);
    let (s_xm, p_xm) = j.marginal(&[vx, vm]);
    let (s_x, p_x) = j.marginal(&[vx]);
    for yi in 0..s4[0] {
        for ri in 0..s4[1] {
            for xi in 0..s4[2] {
                let pyrx = p3[flat_index(&s3, &[yi, ri, xi])];
                if pyrx <= 0.0 {
                    continue;
                }
                for mi in 0..s4[3] {
                    let joint = p4[flat_index(&s4, &[yi, ri, xi, mi])] / pyrx;
                    let marginal = p_xm[flat_index(&s_xm, &[xi, mi])] / p_x[flat_index(&s_x, &[xi])];
                    if (joint - marginal).abs() > DPI_TOL {
                        return Err(DiagnosticsError::MarkovViolation {
                            m: mi,
                            x: xi,
                            y: yi,
                            ir: ri,
                            joint_conditional: joint,
                            marginal_conditional: marginal,
                        });
                    }
                }
            }
        }
    }
    let i_yir_m = exact_mi(j, &[y, ir], &[m], &[])?;
    let i_x_m = exact_mi(j, &[x], &[m], &[])?;
    let i_y_m = exact_mi(j, &[y], &[m], &[])?;
    let i_ir_m_given_y = exact_mi(j, &[ir], &[m], &[y])?;
    Ok(DpiReport {
        i_yir_m,
        i_x_m,
        i_y_m,
        i_ir_m_given_y,
        tol: DPI_TOL,
        dpi_holds: i_yir_m <= i_x_m + DPI_TOL,
        conditional_bound_holds: i_ir_m_given_y <= i_x_m - i_y_m + DPI_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn copy_channel_is_one_bit() {
        let j = JointTable::new(&["y", "m"], &[2, 2], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!((exact_mi(&j, &["y"], &["m"], &[]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn independent_is_zero() {
        let j = JointTable::new(&["a", "b"], &[2, 3], vec![0.1, 0.2, 0.2, 0.1, 0.2, 0.2]).unwrap();
        assert!(exact_mi(&j, &["a"], &["b"], &[]).unwrap().abs() < 1e-15);
    }

    #[test]
    fn overlap_and_bad_tables_rejected() {
        let j = JointTable::new(&["a", "b"], &[2, 2], vec![0.25; 4]).unwrap();
        assert!(exact_mi(&j, &["a"], &["a"], &[]).is_err());
        assert!(exact_mi(&j, &["a"], &["b"], &["b"]).is_err());
        assert!(JointTable::new(&["a"], &[2], vec![0.6, 0.6]).is_err());
        assert!(JointTable::new(&["a"], &[2], vec![1.5, -0.5]).is_err());
    }

    #[test]
    fn markov_violation_reported() {
        // m copies y directly, bypassing x.
        let mut w = vec![0.0; 16];
        for y in 0..2 {
            for x in 0..2 {
                w[((y * 2) * 2 + x) * 2 + y] = 1.0;
            }
        }
        let j = JointTable::from_weights(&["y", "ir", "x", "m"], &[2, 2, 2, 2], w).unwrap();
        assert!(matches!(dpi_bound_check(&j, "y", "ir", "x", "m"), Err(DiagnosticsError::MarkovViolation { .. })));
    }

    #[test]
    fn identity_and_constant_channels() {
        let mut w = vec![0.0; 2 * 2 * 4 * 4];
        for y in 0..2 {
            for ir in 0..2 {
                let x = y * 2 + ir;
                w[((y * 2 + ir) * 4 + x) * 4 + x] = 1.0;
            }
        }
        let j = JointTable::from_weights(&["y", "ir", "x", "m"], &[2, 2, 4, 4], w).unwrap();
        let r = dpi_bound_check(&j, "y", "ir", "x", "m").unwrap();
        assert!(r.passed());
        assert!((r.i_x_m - 2.0).abs() < 1e-12 && (r.i_yir_m - 2.0).abs() < 1e-12);

        let w = vec![1.0; 8];
        let j = JointTable::from_weights(&["y", "ir", "x", "m"], &[2, 2, 2, 1], w).unwrap();
        let r = dpi_bound_check(&j, "y", "ir", "x", "m").unwrap();
        assert!(r.passed() && r.i_x_m.abs() < 1e-15 && r.i_yir_m.abs() < 1e-15);
    }
}
