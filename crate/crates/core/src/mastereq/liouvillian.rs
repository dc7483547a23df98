use std::collections::HashMap;

use num_complex::Complex64 as C64;

use super::LindbladGenerator;
use crate::linalg::{hermitize, CMatrix, DensityMatrix, HilbertDims, Operator};

/// Generator compiled to a sparse matrix acting on row-major vectorised states,
/// `v[i·D + k] = ρ_ik`.
#[derive(Clone, Debug)]
pub struct Liouvillian {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

pub struct Workspace {
    k: [Vec<C64>; 4],
    tmp: Vec<C64>,
}

impl Liouvillian {
    pub fn from_generator(gen: &LindbladGenerator) -> Self {
        let d = gen.dim();
        let n = d * d;
        let h = gen.hamiltonian().matrix();
        let i = C64::new(0.0, 1.0);
        let id = CMatrix::identity(d, d);

        // Each term is c·AρB; row-major vec(AρB) = (A ⊗ Bᵀ) vec(ρ).
        let mut terms: Vec<(C64, CMatrix, CMatrix)> = vec![(-i, h.clone(), id.clone()), (i, id.clone(), h.clone())];
        for (j, rate) in gen.dissipators() {
            let j = j.matrix();
            let jd = j.adjoint();
            let jdj = &jd * j;
            let r = C64::new(*rate, 0.0);
            terms.push((r, j.clone(), jd));
            terms.push((-0.5 * r, jdj.clone(), id.clone()));
            terms.push((-0.5 * r, id.clone(), jdj));
        }
        let nonzeros = |m: &CMatrix| -> Vec<(usize, usize, C64)> {
            let mut out = Vec::new();
            for r in 0..m.nrows() {
                for c in 0..m.ncols() {
                    if m[(r, c)] != C64::new(0.0, 0.0) {
                        out.push((r, c, m[(r, c)]));
                    }
                }
            }
            out
        };
        let mut acc: HashMap<(usize, usize), C64> = HashMap::new();
        for (coef, a, b) in &terms {
            let nb = nonzeros(b);
            for (ai, aj, av) in nonzeros(a) {
                for &(bl, bk, bv) in &nb {
                    *acc.entry((ai * d + bk, aj * d + bl)).or_insert(C64::new(0.0, 0.0)) += coef * av * bv;
                }
            }
        }
        let mut entries: Vec<((usize, usize), C64)> =
            acc.into_iter().filter(|(_, v)| *v != C64::new(0.0, 0.0)).collect();
        entries.sort_unstable_by_key(|(k, _)| *k);
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(entries.len());
        let mut vals = Vec::with_capacity(entries.len());
        for ((r, c), v) in entries {
            row_ptr[r + 1] += 1;
            cols.push(c);
            vals.push(v);
        }
        for r in 0..n {
            row_ptr[r + 1] += row_ptr[r];
        }
        Liouvillian { dim: d, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn vectorize(rho: &CMatrix) -> Vec<C64> {
        let d = rho.nrows();
        let mut v = Vec::with_capacity(d * d);
        for i in 0..d {
            for k in 0..d {
                v.push(rho[(i, k)]);
            }
        }
        v
    }

    pub fn unvectorize(v: &[C64], d: usize) -> CMatrix {
        CMatrix::from_row_slice(d, d, v)
    }

    pub(crate) fn state_from(v: &[C64], dims: HilbertDims) -> DensityMatrix {
        let d = dims.total();
        let mut m = Self::unvectorize(v, d);
        hermitize(&mut m);
        DensityMatrix::new_unchecked(Operator::new(dims, m).expect("dimension fixed by construction"))
    }

    pub fn apply_into(&self, v: &[C64], out: &mut [C64]) {
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for idx in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[idx] * v[self.cols[idx]];
            }
            *o = acc;
        }
    }

    pub fn workspace(&self) -> Workspace {
        let n = self.dim * self.dim;
        let z = vec![C64::new(0.0, 0.0); n];
        Workspace { k: [z.clone(), z.clone(), z.clone(), z.clone()], tmp: z }
    }

    /// One classical fourth-order Runge–Kutta step, in place.
    pub fn rk4_step(&self, v: &mut [C64], dt: f64, w: &mut Workspace) {
        let Workspace { k, tmp } = w;
        let [k1, k2, k3, k4] = k;
        self.apply_into(v, k1);
        for ((t, x), a) in tmp.iter_mut().zip(v.iter()).zip(k1.iter()) {
            *t = x + a * (0.5 * dt);
        }
        self.apply_into(tmp, k2);
        for ((t, x), a) in tmp.iter_mut().zip(v.iter()).zip(k2.iter()) {
            *t = x + a * (0.5 * dt);
        }
        self.apply_into(tmp, k3);
        for ((t, x), a) in tmp.iter_mut().zip(v.iter()).zip(k3.iter()) {
            *t = x + a * dt;
        }
        self.apply_into(tmp, k4);
        let s = dt / 6.0;
        for idx in 0..v.len() {
            v[idx] += (k1[idx] + (k2[idx] + k3[idx]) * 2.0 + k4[idx]) * s;
        }
    }
}
