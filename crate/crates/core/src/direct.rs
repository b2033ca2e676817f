//! Direct solve of the discrete steady state, used as an oracle for the
//! iterative solver.
//!
//! Per component and inside pixel `c`:
//!
//! ```text
//! (h_c + n_c·g_c/(dx·dy))·v_c − (g_c/(dx·dy))·Σ_{inside nbrs} v = h_c·∂f_c
//! ```
//!
//! where `n_c` counts the neighbors that lie inside Ω (mirrored neighbors
//! cancel against the center). Unknowns are numbered row-major over Ω, so
//! the matrix is banded with half-bandwidth at most the grid width.

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::mask::{Boundary, DomainMask, Stencil};
use crate::solver::{initial_field, GvfParams};

/// Largest |Ω| accepted by [`direct_steady_solve`].
pub const DIRECT_LIMIT: usize = 4096;

const PIVOT_TOLERANCE: f64 = 1e-10;

struct Banded {
    n: usize,
    bw: usize,
    // row-major, 2*bw + 1 entries per row, column offset -bw..=bw
    data: Vec<f64>,
    diag_scale: Vec<f64>,
}

impl Banded {
    fn new(n: usize, bw: usize) -> Self {
        Self {
            n,
            bw,
            data: vec![0.0; n * (2 * bw + 1)],
            diag_scale: vec![0.0; n],
        }
    }

    #[inline]
    fn at(&mut self, row: usize, col: usize) -> &mut f64 {
        let off = col + self.bw - row;
        &mut self.data[row * (2 * self.bw + 1) + off]
    }

    /// In-place LU without pivoting; the system is diagonally dominant.
    fn factor(&mut self) -> Result<()> {
        let (n, bw) = (self.n, self.bw);
        for k in 0..n {
            let pivot = *self.at(k, k);
            if !(pivot.abs() > PIVOT_TOLERANCE * self.diag_scale[k]) {
                return Err(Error::Rank { row: k, pivot });
            }
            let last = (k + bw).min(n - 1);
            for i in k + 1..=last {
                let factor = *self.at(i, k) / pivot;
                if factor == 0.0 {
                    continue;
                }
                *self.at(i, k) = factor;
                for j in k + 1..=last {
                    let a = *self.at(k, j);
                    if a != 0.0 {
                        *self.at(i, j) -= factor * a;
                    }
                }
            }
        }
        Ok(())
    }

    #[allow(clippy::needless_range_loop)]
    fn solve(&mut self, rhs: &mut [f64]) {
        let (n, bw) = (self.n, self.bw);
        for i in 0..n {
            let first = i.saturating_sub(bw);
            let mut s = rhs[i];
            for j in first..i {
                s -= *self.at(i, j) * rhs[j];
            }
            rhs[i] = s;
        }
        for i in (0..n).rev() {
            let last = (i + bw).min(n - 1);
            let mut s = rhs[i];
            for j in i + 1..=last {
                s -= *self.at(i, j) * rhs[j];
            }
            rhs[i] = s / *self.at(i, i);
        }
    }
}

/// Exact steady state of the explicit scheme with mirrored borders.
/// `∇f` is clamped with `p.threshold`.
pub fn direct_steady_solve(
    f: &ScalarField,
    p: &GvfParams,
    mask: &DomainMask,
) -> Result<VectorField> {
    let grad = initial_field(f, p.threshold)?;
    direct_steady_solve_from_gradient(&grad, p, mask)
}

pub fn direct_steady_solve_from_gradient(
    grad_f: &VectorField,
    p: &GvfParams,
    mask: &DomainMask,
) -> Result<VectorField> {
    let spec = *grad_f.spec();
    spec.check_same(mask.spec())?;
    if p.boundary != Boundary::Mirror {
        return Err(Error::Unsupported(
            "direct steady solve supports mirrored borders only".into(),
        ));
    }
    let inside = mask.count();
    if inside > DIRECT_LIMIT {
        return Err(Error::Size {
            inside,
            limit: DIRECT_LIMIT,
        });
    }
    let stencil = Stencil::new(mask, Boundary::Mirror);
    let mut unknown = vec![usize::MAX; spec.len()];
    for (n, &c) in stencil.cells.iter().enumerate() {
        unknown[c] = n;
    }
    let bw = stencil
        .cells
        .iter()
        .zip(&stencil.neighbors)
        .flat_map(|(&c, nb)| nb.iter().map(move |&k| (c, k)))
        .map(|(c, k)| unknown[c].abs_diff(unknown[k]))
        .max()
        .unwrap_or(0);

    let inv_area = 1.0 / spec.cell_area();
    let mut a = Banded::new(inside, bw);
    for (n, &c) in stencil.cells.iter().enumerate() {
        let g = p.g.at(c) * inv_area;
        let h = p.h.at(c);
        let mut diag = h;
        for &k in &stencil.neighbors[n] {
            if k != c {
                diag += g;
                *a.at(n, unknown[k]) -= g;
            }
        }
        *a.at(n, n) += diag;
        a.diag_scale[n] = h + 4.0 * g;
        if a.diag_scale[n] == 0.0 {
            return Err(Error::Rank { row: n, pivot: 0.0 });
        }
    }
    a.factor()?;

    let mut out = VectorField::zeros(spec);
    let (gu, gv) = (grad_f.u.values(), grad_f.v.values());
    let mut rhs_u: Vec<f64> = stencil.cells.iter().map(|&c| p.h.at(c) * gu[c]).collect();
    let mut rhs_v: Vec<f64> = stencil.cells.iter().map(|&c| p.h.at(c) * gv[c]).collect();
    a.solve(&mut rhs_u);
    a.solve(&mut rhs_v);
    for (n, &c) in stencil.cells.iter().enumerate() {
        out.u.values_mut()[c] = rhs_u[n];
        out.v.values_mut()[c] = rhs_v[n];
    }
    Ok(out)
}
