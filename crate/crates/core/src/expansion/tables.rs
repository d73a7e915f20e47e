//! Weight-coefficient tables for the third-order expansion.
//!
//! Every weight is an iterated time integral whose layers are products of the
//! frozen vols and their log-space derivatives. The rows are stored as data
//! (factor tuples) rather than hand-coded arithmetic so tests can audit each
//! row mechanically against the quadrature path.
//!
//! Indices are 1-based to match the standard numbering of these tables. The
//! C table has no row 13 in its source (the numbering jumps from 12 to 14);
//! the gap is preserved rather than filled with an invented value. Rows C72
//! and C76 are carried and audited but not referenced by any assembly.

use crate::model::LogCoeffBundle;

/// One multiplicative layer of a weight: a product of two frozen
/// coefficients out of `{lambda, lambda_y, lambda_yy, sigma, sigma_z,
/// sigma_zz}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolFactor {
    /// lambda^2
    Lam2,
    /// sigma^2
    Sig2,
    /// lambda sigma
    LamSig,
    /// lambda lambda_y
    LamLamY,
    /// lambda_y sigma
    LamYSig,
    /// lambda sigma_z
    LamSigZ,
    /// lambda_y^2
    LamY2,
    /// lambda lambda_yy
    LamLamYY,
    /// lambda_yy sigma
    LamYYSig,
    /// lambda sigma_zz
    LamSigZZ,
    /// sigma sigma_z
    SigSigZ,
    /// lambda_y sigma_z
    LamYSigZ,
}

impl VolFactor {
    /// Evaluate the factor on a frozen coefficient bundle.
    pub fn eval(self, b: &LogCoeffBundle) -> f64 {
        match self {
            VolFactor::Lam2 => b.lam * b.lam,
            VolFactor::Sig2 => b.sig * b.sig,
            VolFactor::LamSig => b.lam * b.sig,
            VolFactor::LamLamY => b.lam * b.lam_y,
            VolFactor::LamYSig => b.lam_y * b.sig,
            VolFactor::LamSigZ => b.lam * b.sig_z,
            VolFactor::LamY2 => b.lam_y * b.lam_y,
            VolFactor::LamLamYY => b.lam * b.lam_yy,
            VolFactor::LamYYSig => b.lam_yy * b.sig,
            VolFactor::LamSigZZ => b.lam * b.sig_zz,
            VolFactor::SigSigZ => b.sig * b.sig_z,
            VolFactor::LamYSigZ => b.lam_y * b.sig_z,
        }
    }

    /// Whether the factor contains a vol derivative. Every table row has at
    /// least one such layer, which is what makes all corrections vanish in
    /// the log-normal limit.
    pub fn has_derivative(self) -> bool {
        !matches!(self, VolFactor::Lam2 | VolFactor::Sig2 | VolFactor::LamSig)
    }
}

/// A table row: 1-based index plus its ordered integrand layers.
#[derive(Debug, Clone, Copy)]
pub struct WeightRow {
    pub index: usize,
    pub factors: &'static [VolFactor],
}

use VolFactor::*;

/// Two-layer weights A1..A11.
pub static A_ROWS: [WeightRow; 11] = [
    WeightRow { index: 1, factors: &[Lam2, LamLamY] },
    WeightRow { index: 2, factors: &[Lam2, LamLamYY] },
    WeightRow { index: 3, factors: &[Lam2, LamY2] },
    WeightRow { index: 4, factors: &[LamSig, LamYSig] },
    WeightRow { index: 5, factors: &[LamSig, LamYSigZ] },
    WeightRow { index: 6, factors: &[LamSig, LamSigZ] },
    WeightRow { index: 7, factors: &[LamSig, LamLamY] },
    WeightRow { index: 8, factors: &[Lam2, LamYSig] },
    WeightRow { index: 9, factors: &[Sig2, LamSigZ] },
    WeightRow { index: 10, factors: &[Lam2, LamYYSig] },
    WeightRow { index: 11, factors: &[Sig2, LamSigZZ] },
];

/// Three-layer weights B1..B42.
pub static B_ROWS: [WeightRow; 42] = [
    WeightRow { index: 1, factors: &[Lam2, LamLamY, LamLamY] },
    WeightRow { index: 2, factors: &[Lam2, Lam2, LamLamYY] },
    WeightRow { index: 3, factors: &[Lam2, Lam2, LamY2] },
    WeightRow { index: 4, factors: &[LamSig, LamYSig, LamYSig] },
    WeightRow { index: 5, factors: &[LamSig, LamSigZ, LamYSig] },
    WeightRow { index: 6, factors: &[LamSig, LamSigZ, LamSigZ] },
    WeightRow { index: 7, factors: &[LamSig, LamSig, LamYSigZ] },
    WeightRow { index: 8, factors: &[LamSig, LamSig, LamYYSig] },
    WeightRow { index: 9, factors: &[LamSig, LamSig, LamSigZZ] },
    WeightRow { index: 10, factors: &[Lam2, LamYSig, LamYSig] },
    WeightRow { index: 11, factors: &[LamSig, LamLamY, LamYSig] },
    WeightRow { index: 12, factors: &[LamSig, LamYSig, LamLamY] },
    WeightRow { index: 13, factors: &[Sig2, LamSigZ, LamYSig] },
    WeightRow { index: 14, factors: &[LamSig, Sig2, LamYSigZ] },
    WeightRow { index: 15, factors: &[Sig2, LamSig, LamYSigZ] },
    WeightRow { index: 16, factors: &[Lam2, LamSig, LamYYSig] },
    WeightRow { index: 17, factors: &[LamSig, Lam2, LamYYSig] },
    WeightRow { index: 18, factors: &[LamSig, LamSig, LamLamYY] },
    WeightRow { index: 19, factors: &[LamSig, LamSig, LamY2] },
    WeightRow { index: 20, factors: &[LamSig, LamSigZ, LamLamY] },
    WeightRow { index: 21, factors: &[Sig2, LamSigZ, LamSigZ] },
    WeightRow { index: 22, factors: &[LamSig, Lam2, LamYSigZ] },
    WeightRow { index: 23, factors: &[Lam2, LamSig, LamYSigZ] },
    WeightRow { index: 24, factors: &[LamSig, Sig2, LamSigZZ] },
    WeightRow { index: 25, factors: &[Sig2, LamSig, LamSigZZ] },
    WeightRow { index: 26, factors: &[Lam2, LamLamY, LamYSig] },
    WeightRow { index: 27, factors: &[Lam2, LamYSig, LamLamY] },
    WeightRow { index: 28, factors: &[LamSig, LamLamY, LamLamY] },
    WeightRow { index: 29, factors: &[Lam2, Lam2, LamYYSig] },
    WeightRow { index: 30, factors: &[Lam2, LamSig, LamLamYY] },
    WeightRow { index: 31, factors: &[LamSig, Lam2, LamLamYY] },
    WeightRow { index: 32, factors: &[Sig2, LamSigZ, LamLamY] },
    WeightRow { index: 33, factors: &[Lam2, Sig2, LamYSigZ] },
    WeightRow { index: 34, factors: &[Sig2, Lam2, LamYSigZ] },
    WeightRow { index: 35, factors: &[Lam2, LamSig, LamY2] },
    WeightRow { index: 36, factors: &[Sig2, SigSigZ, LamSigZ] },
    WeightRow { index: 37, factors: &[Sig2, Sig2, LamSigZZ] },
    WeightRow { index: 38, factors: &[LamSig, LamLamY, LamSigZ] },
    WeightRow { index: 39, factors: &[Lam2, LamYSig, LamSigZ] },
    WeightRow { index: 40, factors: &[LamSig, LamYSig, LamSigZ] },
    WeightRow { index: 41, factors: &[LamSig, SigSigZ, LamSigZ] },
    WeightRow { index: 42, factors: &[LamSig, Lam2, LamY2] },
];

/// Four-layer weights C1..C87 (C13 absent in the source numbering).
pub static C_ROWS: [WeightRow; 86] = [
    WeightRow { index: 1, factors: &[LamSig, LamSig, LamSigZ, LamSigZ] },
    WeightRow { index: 2, factors: &[LamSig, LamSigZ, LamSig, LamSigZ] },
    WeightRow { index: 3, factors: &[LamSig, LamSig, LamYSig, LamSigZ] },
    WeightRow { index: 4, factors: &[LamSig, LamYSig, LamSig, LamSigZ] },
    WeightRow { index: 5, factors: &[Lam2, LamLamY, Sig2, LamSigZ] },
    WeightRow { index: 6, factors: &[Lam2, Sig2, LamLamY, LamSigZ] },
    WeightRow { index: 7, factors: &[Sig2, Lam2, LamLamY, LamSigZ] },
    WeightRow { index: 8, factors: &[Lam2, LamYSig, Sig2, LamSigZ] },
    WeightRow { index: 9, factors: &[LamSig, LamLamY, Sig2, LamSigZ] },
    WeightRow { index: 10, factors: &[Sig2, LamSigZ, Sig2, LamSigZ] },
    WeightRow { index: 11, factors: &[Sig2, Sig2, LamSigZ, LamSigZ] },
    WeightRow { index: 12, factors: &[Lam2, Sig2, LamYSig, LamSigZ] },
    WeightRow { index: 14, factors: &[Sig2, Lam2, LamYSig, LamSigZ] },
    WeightRow { index: 15, factors: &[LamSig, Sig2, LamLamY, LamSigZ] },
    WeightRow { index: 16, factors: &[Sig2, LamSig, LamLamY, LamSigZ] },
    WeightRow { index: 17, factors: &[Lam2, LamLamY, LamSig, LamSigZ] },
    WeightRow { index: 18, factors: &[LamSig, Lam2, LamLamY, LamSigZ] },
    WeightRow { index: 19, factors: &[Lam2, LamSig, LamLamY, LamSigZ] },
    WeightRow { index: 20, factors: &[LamSig, LamYSig, Sig2, LamSigZ] },
    WeightRow { index: 21, factors: &[LamSig, Sig2, LamYSig, LamSigZ] },
    WeightRow { index: 22, factors: &[Sig2, LamSig, LamYSig, LamSigZ] },
    WeightRow { index: 23, factors: &[LamSig, LamSigZ, Sig2, LamSigZ] },
    WeightRow { index: 24, factors: &[LamSig, Sig2, LamSigZ, LamSigZ] },
    WeightRow { index: 25, factors: &[Sig2, LamSig, LamSigZ, LamSigZ] },
    WeightRow { index: 26, factors: &[LamSig, Lam2, LamYSig, LamSigZ] },
    WeightRow { index: 27, factors: &[LamSig, LamSig, LamLamY, LamSigZ] },
    WeightRow { index: 28, factors: &[Lam2, LamSig, LamYSig, LamSigZ] },
    WeightRow { index: 29, factors: &[Sig2, LamSigZ, LamSig, LamSigZ] },
    WeightRow { index: 30, factors: &[Lam2, LamYSig, LamSig, LamSigZ] },
    WeightRow { index: 31, factors: &[LamSig, LamLamY, LamSig, LamSigZ] },
    WeightRow { index: 32, factors: &[Lam2, LamLamY, Lam2, LamLamY] },
    WeightRow { index: 33, factors: &[Lam2, Lam2, LamLamY, LamLamY] },
    WeightRow { index: 34, factors: &[LamSig, LamYSig, LamSig, LamLamY] },
    WeightRow { index: 35, factors: &[LamSig, LamSig, LamYSig, LamLamY] },
    WeightRow { index: 36, factors: &[LamSig, LamSigZ, LamSig, LamLamY] },
    WeightRow { index: 37, factors: &[LamSig, LamSig, LamSigZ, LamLamY] },
    WeightRow { index: 38, factors: &[Lam2, LamYSig, LamSig, LamLamY] },
    WeightRow { index: 39, factors: &[LamSig, LamLamY, LamSig, LamLamY] },
    WeightRow { index: 40, factors: &[LamSig, LamYSig, Lam2, LamLamY] },
    WeightRow { index: 41, factors: &[Sig2, LamSigZ, LamSig, LamLamY] },
    WeightRow { index: 42, factors: &[Lam2, LamSig, LamYSig, LamLamY] },
    WeightRow { index: 43, factors: &[LamSig, Lam2, LamYSig, LamLamY] },
    WeightRow { index: 44, factors: &[LamSig, LamSig, LamLamY, LamLamY] },
    WeightRow { index: 45, factors: &[LamSig, Sig2, LamSigZ, LamLamY] },
    WeightRow { index: 46, factors: &[Sig2, LamSig, LamSigZ, LamLamY] },
    WeightRow { index: 47, factors: &[LamSig, LamSigZ, Lam2, LamLamY] },
    WeightRow { index: 48, factors: &[LamSig, Lam2, LamSigZ, LamLamY] },
    WeightRow { index: 49, factors: &[Lam2, LamSig, LamSigZ, LamLamY] },
    WeightRow { index: 50, factors: &[Lam2, LamLamY, LamSig, LamLamY] },
    WeightRow { index: 51, factors: &[Lam2, LamYSig, Lam2, LamLamY] },
    WeightRow { index: 52, factors: &[LamSig, LamLamY, Lam2, LamLamY] },
    WeightRow { index: 53, factors: &[Sig2, LamSigZ, Lam2, LamLamY] },
    WeightRow { index: 54, factors: &[Lam2, Lam2, LamYSig, LamLamY] },
    WeightRow { index: 55, factors: &[Lam2, LamSig, LamLamY, LamLamY] },
    WeightRow { index: 56, factors: &[LamSig, Lam2, LamLamY, LamLamY] },
    WeightRow { index: 57, factors: &[Lam2, Sig2, LamSigZ, LamLamY] },
    WeightRow { index: 58, factors: &[Sig2, Lam2, LamSigZ, LamLamY] },
    WeightRow { index: 59, factors: &[LamSig, LamYSig, LamSig, LamYSig] },
    WeightRow { index: 60, factors: &[LamSig, LamSig, LamYSig, LamYSig] },
    WeightRow { index: 61, factors: &[LamSig, LamSigZ, LamSig, LamYSig] },
    WeightRow { index: 62, factors: &[LamSig, LamSig, LamSigZ, LamYSig] },
    WeightRow { index: 63, factors: &[Lam2, LamYSig, LamSig, LamYSig] },
    WeightRow { index: 64, factors: &[LamSig, LamLamY, LamSig, LamYSig] },
    WeightRow { index: 65, factors: &[LamSig, LamYSig, Lam2, LamYSig] },
    WeightRow { index: 66, factors: &[Sig2, LamSigZ, LamSig, LamYSig] },
    WeightRow { index: 67, factors: &[Lam2, LamSig, LamYSig, LamYSig] },
    WeightRow { index: 68, factors: &[LamSig, Lam2, LamYSig, LamYSig] },
    WeightRow { index: 69, factors: &[LamSig, LamSig, LamLamY, LamYSig] },
    WeightRow { index: 70, factors: &[LamSig, Sig2, LamSigZ, LamYSig] },
    WeightRow { index: 71, factors: &[Sig2, LamSig, LamSigZ, LamYSig] },
    WeightRow { index: 72, factors: &[LamSig, LamLamY, LamSig, LamYSig] },
    WeightRow { index: 73, factors: &[LamSig, LamSigZ, Lam2, LamYSig] },
    WeightRow { index: 74, factors: &[LamSig, Lam2, LamSigZ, LamYSig] },
    WeightRow { index: 75, factors: &[Lam2, LamSig, LamSigZ, LamYSig] },
    WeightRow { index: 76, factors: &[LamSig, LamSig, LamLamY, LamYSig] },
    WeightRow { index: 77, factors: &[Lam2, LamLamY, Lam2, LamYSig] },
    WeightRow { index: 78, factors: &[Lam2, Lam2, LamLamY, LamYSig] },
    WeightRow { index: 79, factors: &[Lam2, LamLamY, LamSig, LamYSig] },
    WeightRow { index: 80, factors: &[Lam2, LamYSig, Lam2, LamYSig] },
    WeightRow { index: 81, factors: &[LamSig, LamLamY, Lam2, LamYSig] },
    WeightRow { index: 82, factors: &[Sig2, LamSigZ, Lam2, LamYSig] },
    WeightRow { index: 83, factors: &[Lam2, Lam2, LamYSig, LamYSig] },
    WeightRow { index: 84, factors: &[Lam2, LamSig, LamLamY, LamYSig] },
    WeightRow { index: 85, factors: &[LamSig, Lam2, LamLamY, LamYSig] },
    WeightRow { index: 86, factors: &[Lam2, Sig2, LamSigZ, LamYSig] },
    WeightRow { index: 87, factors: &[Sig2, Lam2, LamSigZ, LamYSig] },
];

/// C-row indices that no assembly references (duplicated rows in the source
/// table); kept for the audit.
pub const UNUSED_C_INDICES: [usize; 2] = [72, 76];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_sizes_and_indices() {
        assert_eq!(A_ROWS.len(), 11);
        assert_eq!(B_ROWS.len(), 42);
        assert_eq!(C_ROWS.len(), 86);
        for (i, row) in A_ROWS.iter().enumerate() {
            assert_eq!(row.index, i + 1);
            assert_eq!(row.factors.len(), 2);
        }
        for (i, row) in B_ROWS.iter().enumerate() {
            assert_eq!(row.index, i + 1);
            assert_eq!(row.factors.len(), 3);
        }
        // C numbering jumps over 13.
        let mut expected = 1;
        for row in &C_ROWS {
            if expected == 13 {
                expected += 1;
            }
            assert_eq!(row.index, expected);
            assert_eq!(row.factors.len(), 4);
            expected += 1;
        }
    }

    #[test]
    fn every_row_carries_a_derivative_factor() {
        for row in A_ROWS.iter().chain(&B_ROWS).chain(&C_ROWS) {
            assert!(
                row.factors.iter().any(|f| f.has_derivative()),
                "row without derivative factor: {row:?}"
            );
        }
    }

    #[test]
    fn factor_eval() {
        let b = LogCoeffBundle {
            lam: 2.0,
            lam_y: 3.0,
            lam_yy: 5.0,
            sig: 7.0,
            sig_z: 11.0,
            sig_zz: 13.0,
        };
        assert_eq!(Lam2.eval(&b), 4.0);
        assert_eq!(Sig2.eval(&b), 49.0);
        assert_eq!(LamSig.eval(&b), 14.0);
        assert_eq!(LamLamY.eval(&b), 6.0);
        assert_eq!(LamYSig.eval(&b), 21.0);
        assert_eq!(LamSigZ.eval(&b), 22.0);
        assert_eq!(LamY2.eval(&b), 9.0);
        assert_eq!(LamLamYY.eval(&b), 10.0);
        assert_eq!(LamYYSig.eval(&b), 35.0);
        assert_eq!(LamSigZZ.eval(&b), 26.0);
        assert_eq!(SigSigZ.eval(&b), 77.0);
        assert_eq!(LamYSigZ.eval(&b), 33.0);
    }
}
