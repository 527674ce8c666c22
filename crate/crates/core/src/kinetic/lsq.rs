//! Two-dimensional least-squares gradient over a point stencil.

/// The normal-equation determinant fell at or below the tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularSystem {
    pub det: f64,
}

/// Running sums of the 2×2 normal equations for `N` simultaneous fields.
#[derive(Debug, Clone, Copy)]
pub struct LeastSquares<const N: usize> {
    sxx: f64,
    syy: f64,
    sxy: f64,
    sxf: [f64; N],
    syf: [f64; N],
}

impl<const N: usize> Default for LeastSquares<N> {
    fn default() -> Self {
        LeastSquares {
            sxx: 0.0,
            syy: 0.0,
            sxy: 0.0,
            sxf: [0.0; N],
            syf: [0.0; N],
        }
    }
}

impl<const N: usize> LeastSquares<N> {
    #[inline]
    pub fn add(&mut self, dx: f64, dy: f64, df: [f64; N]) {
        self.sxx += dx * dx;
        self.syy += dy * dy;
        self.sxy += dx * dy;
        for ((sx, sy), f) in self.sxf.iter_mut().zip(&mut self.syf).zip(df) {
            *sx += dx * f;
            *sy += dy * f;
        }
    }

    #[inline]
    pub fn determinant(&self) -> f64 {
        self.sxx * self.syy - self.sxy * self.sxy
    }

    /// Solves for `(∂f/∂x, ∂f/∂y)` of every field.
    #[inline]
    pub fn solve(&self, det_tol: f64) -> Result<([f64; N], [f64; N]), SingularSystem> {
        let det = self.determinant();
        if !(det > det_tol) {
            return Err(SingularSystem { det });
        }
        let mut fx = [0.0; N];
        let mut fy = [0.0; N];
        for c in 0..N {
            fx[c] = (self.syy * self.sxf[c] - self.sxy * self.syf[c]) / det;
            fy[c] = (self.sxx * self.syf[c] - self.sxy * self.sxf[c]) / det;
        }
        Ok((fx, fy))
    }
}

/// Least-squares derivatives from `(Δx, Δy, Δf)` samples.
pub fn ls_derivatives<const N: usize>(
    deltas: &[(f64, f64, [f64; N])],
    det_tol: f64,
) -> Result<([f64; N], [f64; N]), SingularSystem> {
    let mut acc = LeastSquares::<N>::default();
    for &(dx, dy, df) in deltas {
        acc.add(dx, dy, df);
    }
    acc.solve(det_tol)
}
