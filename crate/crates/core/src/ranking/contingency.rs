use thiserror::Error;

/// Raised when derived cells of a contingency table come out negative.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("internal invariant violation: {0}")]
pub struct InvariantViolation(pub String);

/// Observed 2x2 table: rows = first component present/absent, columns =
/// second component present/absent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contingency2x2 {
    pub o11: f64,
    pub o12: f64,
    pub o21: f64,
    pub o22: f64,
}

impl Contingency2x2 {
    pub fn new(o11: f64, o12: f64, o21: f64, o22: f64) -> Self {
        Contingency2x2 { o11, o12, o21, o22 }
    }

    /// Fills the table from the joint count, the two component counts and
    /// the total. Rounding residue below `1e-9 * n` is clamped to zero.
    pub fn from_margins(o11: f64, r1: f64, c1: f64, n: f64) -> Result<Self, InvariantViolation> {
        let tol = 1e-9 * n.abs().max(1.0);
        let cell = |v: f64, name: &str| {
            if v < -tol {
                Err(InvariantViolation(format!(
                    "negative contingency cell {name} = {v} (O11={o11}, R1={r1}, C1={c1}, N={n})"
                )))
            } else {
                Ok(v.max(0.0))
            }
        };
        Ok(Contingency2x2 {
            o11: cell(o11, "O11")?,
            o12: cell(r1 - o11, "O12")?,
            o21: cell(c1 - o11, "O21")?,
            o22: cell(n - r1 - c1 + o11, "O22")?,
        })
    }

    pub fn r1(&self) -> f64 {
        self.o11 + self.o12
    }

    pub fn r2(&self) -> f64 {
        self.o21 + self.o22
    }

    pub fn c1(&self) -> f64 {
        self.o11 + self.o21
    }

    pub fn c2(&self) -> f64 {
        self.o12 + self.o22
    }

    pub fn n(&self) -> f64 {
        self.o11 + self.o12 + self.o21 + self.o22
    }

    pub fn observed(&self) -> [[f64; 2]; 2] {
        [[self.o11, self.o12], [self.o21, self.o22]]
    }

    /// Expected frequencies under independence, `E_ij = R_i C_j / N`.
    pub fn expected(&self) -> [[f64; 2]; 2] {
        let n = self.n();
        if n == 0.0 {
            return [[0.0; 2]; 2];
        }
        let r = [self.r1(), self.r2()];
        let c = [self.c1(), self.c2()];
        [
            [r[0] * c[0] / n, r[0] * c[1] / n],
            [r[1] * c[0] / n, r[1] * c[1] / n],
        ]
    }

    /// Pearson's statistic. Cells with zero expectation (an empty margin)
    /// contribute nothing.
    pub fn chi2(&self) -> f64 {
        let o = self.observed();
        let e = self.expected();
        let mut s = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                if e[i][j] > 0.0 {
                    let d = o[i][j] - e[i][j];
                    s += d * d / e[i][j];
                }
            }
        }
        s
    }

    /// Log-likelihood ratio statistic (natural log); empty cells are skipped.
    pub fn g2(&self) -> f64 {
        let o = self.observed();
        let e = self.expected();
        let mut s = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                if o[i][j] > 0.0 && e[i][j] > 0.0 {
                    s += o[i][j] * (o[i][j] / e[i][j]).ln();
                }
            }
        }
        2.0 * s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn margins_and_expectations() {
        let t = Contingency2x2::new(10.0, 10.0, 10.0, 70.0);
        assert_eq!((t.r1(), t.c1(), t.n()), (20.0, 20.0, 100.0));
        assert_eq!(t.expected(), [[4.0, 16.0], [16.0, 64.0]]);
        assert_eq!(t.chi2(), 14.0625);
    }

    #[test]
    fn from_margins_reproduces_table() {
        let t = Contingency2x2::from_margins(10.0, 20.0, 20.0, 100.0).unwrap();
        assert_eq!(t, Contingency2x2::new(10.0, 10.0, 10.0, 70.0));
    }

    #[test]
    fn degenerate_full_table() {
        let t = Contingency2x2::from_margins(5.0, 5.0, 5.0, 5.0).unwrap();
        assert_eq!(t.o22, 0.0);
        assert_eq!(t.chi2(), 0.0);
        assert_eq!(t.g2(), 0.0);
    }

    #[test]
    fn inconsistent_margins_rejected() {
        assert!(Contingency2x2::from_margins(10.0, 5.0, 20.0, 100.0).is_err());
        assert!(Contingency2x2::from_margins(10.0, 60.0, 60.0, 100.0).is_err());
    }

    #[test]
    fn independence_is_zero() {
        let t = Contingency2x2::new(4.0, 16.0, 16.0, 64.0);
        assert!(t.chi2().abs() < 1e-12);
        assert!(t.g2().abs() < 1e-12);
    }

    #[test]
    fn empty_cell_is_finite() {
        let t = Contingency2x2::new(10.0, 0.0, 5.0, 85.0);
        assert!(t.g2().is_finite());
        assert!(t.g2() > 0.0);
    }
}
