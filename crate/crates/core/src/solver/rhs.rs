use super::{BoundaryData, ChannelGrid, ConservedField, GHOST};
use crate::gas::GasParams;

/// Fourier collocation derivative on `n` equispaced points of the unit
/// period. For even `n` the Nyquist mode is annihilated.
#[derive(Debug, Clone)]
pub struct SpectralDiff {
    n: usize,
    d1: Vec<f64>,
    d2: Vec<f64>,
    // Transposes, so that application along the fast index vectorises.
    d1t: Vec<f64>,
    d2t: Vec<f64>,
}

impl SpectralDiff {
    pub fn new(n: usize) -> Self {
        let mut d1 = vec![0.0; n * n];
        if n > 1 {
            let pi = std::f64::consts::PI;
            for j in 0..n {
                for l in 0..n {
                    if j != l {
                        let d = j as f64 - l as f64;
                        let sign = if (j + n - l) % 2 == 0 { 1.0 } else { -1.0 };
                        d1[j * n + l] = pi * sign / (pi * d / n as f64).tan();
                    }
                }
            }
        }
        let mut d2 = vec![0.0; n * n];
        for j in 0..n {
            for l in 0..n {
                d2[j * n + l] = (0..n).map(|k| d1[j * n + k] * d1[k * n + l]).sum();
            }
        }
        let transpose = |m: &[f64]| -> Vec<f64> { (0..n * n).map(|k| m[(k % n) * n + k / n]).collect() };
        SpectralDiff {
            n,
            d1t: transpose(&d1),
            d2t: transpose(&d2),
            d1,
            d2,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn trivial(&self) -> bool {
        self.n == 1
    }

    /// First derivative of a periodic sequence.
    pub fn derivative(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n).map(|j| (0..n).map(|l| self.d1[j * n + l] * v[l]).sum()).collect()
    }

    /// Second derivative of a periodic sequence.
    pub fn second_derivative(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n).map(|j| (0..n).map(|l| self.d2[j * n + l] * v[l]).sum()).collect()
    }

    /// Applies `mat` along the slow index of an `n x m` plane.
    #[inline]
    fn along_rows(mat: &[f64], n: usize, m: usize, src: &[f64], dst: &mut [f64]) {
        for j in 0..n {
            let row = &mut dst[j * m..(j + 1) * m];
            row.fill(0.0);
            for l in 0..n {
                let c = mat[j * n + l];
                if c != 0.0 {
                    let s = &src[l * m..(l + 1) * m];
                    for (r, v) in row.iter_mut().zip(s) {
                        *r += c * v;
                    }
                }
            }
        }
    }

    /// Applies a matrix along the fast index of an `m x n` plane, given its
    /// transpose `mat_t`.
    #[inline]
    fn along_cols(mat_t: &[f64], n: usize, m: usize, src: &[f64], dst: &mut [f64]) {
        for j in 0..m {
            let s = &src[j * n..(j + 1) * n];
            let d = &mut dst[j * n..(j + 1) * n];
            d.fill(0.0);
            for (l, &v) in s.iter().enumerate() {
                let r = &mat_t[l * n..(l + 1) * n];
                for (o, c) in d.iter_mut().zip(r) {
                    *o += c * v;
                }
            }
        }
    }
}

/// Direction of a transverse derivative.
#[derive(Clone, Copy)]
enum Dir {
    X2,
    X3,
}

/// Right-hand side evaluator with reusable work arrays.
#[derive(Debug, Clone)]
pub struct Rhs {
    grid: ChannelGrid,
    gas: GasParams,
    s2: SpectralDiff,
    s3: SpectralDiff,
    cons: [Vec<f64>; 5],
    prim: [Vec<f64>; 5],
    f1: [Vec<f64>; 5],
    tdiv: Vec<f64>,
    scratch: Vec<Vec<f64>>,
}

const NSCRATCH: usize = 40;

impl Rhs {
    pub fn new(grid: ChannelGrid, gas: GasParams) -> Self {
        let np = (grid.n1 + 2 * GHOST) * grid.plane();
        let z = || vec![0.0; np];
        Rhs {
            grid,
            gas,
            s2: SpectralDiff::new(grid.n2),
            s3: SpectralDiff::new(grid.n3),
            cons: [z(), z(), z(), z(), z()],
            prim: [z(), z(), z(), z(), z()],
            f1: [z(), z(), z(), z(), z()],
            tdiv: z(),
            scratch: vec![vec![0.0; grid.plane()]; NSCRATCH],
        }
    }

    pub fn grid(&self) -> &ChannelGrid {
        &self.grid
    }

    fn transverse(&self, dir: Dir, second: bool, src: &[f64], dst: &mut [f64]) {
        let (n2, n3) = (self.grid.n2, self.grid.n3);
        match dir {
            Dir::X2 => {
                if self.s2.trivial() {
                    dst.fill(0.0);
                } else {
                    let m = if second { &self.s2.d2 } else { &self.s2.d1 };
                    SpectralDiff::along_rows(m, n2, n3, src, dst);
                }
            }
            Dir::X3 => {
                if self.s3.trivial() {
                    dst.fill(0.0);
                } else {
                    let m = if second { &self.s3.d2t } else { &self.s3.d1t };
                    SpectralDiff::along_cols(m, n3, n2, src, dst);
                }
            }
        }
    }

    /// Copies the interior, fills ghost planes and derives padded primitive,
    /// flux and transverse-divergence arrays.
    fn prepare(&mut self, field: &ConservedField, t: f64, bc: &dyn BoundaryData) {
        let g = self.grid;
        let p = g.plane();
        let n1 = g.n1;
        for (c, src) in field.components().iter().enumerate() {
            self.cons[c][GHOST * p..(GHOST + n1) * p].copy_from_slice(src);
        }
        for gp in 0..GHOST {
            for (plane_idx, i) in [(gp, gp as isize - GHOST as isize), (GHOST + n1 + gp, (n1 + gp) as isize)] {
                let s = bc.state(g.x1(i), t);
                let vals = [s.rho, s.m[0], s.m[1], s.m[2], s.energy];
                for c in 0..5 {
                    self.cons[c][plane_idx * p..(plane_idx + 1) * p].fill(vals[c]);
                }
            }
        }
        let g1 = self.gas.gamma - 1.0;
        let np = self.cons[0].len();
        for idx in 0..np {
            let r = self.cons[0][idx];
            let inv = 1.0 / r;
            let (m1, m2, m3, e) = (self.cons[1][idx], self.cons[2][idx], self.cons[3][idx], self.cons[4][idx]);
            let (u1, u2, u3) = (m1 * inv, m2 * inv, m3 * inv);
            let th = e * inv - 0.5 * (u1 * u1 + u2 * u2 + u3 * u3);
            let pr = g1 * r * th;
            self.prim[0][idx] = u1;
            self.prim[1][idx] = u2;
            self.prim[2][idx] = u3;
            self.prim[3][idx] = th;
            self.prim[4][idx] = pr;
            self.f1[0][idx] = m1;
            self.f1[1][idx] = m1 * u1 + pr;
            self.f1[2][idx] = m2 * u1;
            self.f1[3][idx] = m3 * u1;
            self.f1[4][idx] = (e + pr) * u1;
        }
        let mut a = std::mem::take(&mut self.scratch[0]);
        let mut b = std::mem::take(&mut self.scratch[1]);
        let mut tdiv = std::mem::take(&mut self.tdiv);
        for pl in 0..n1 + 2 * GHOST {
            let r = pl * p..(pl + 1) * p;
            self.transverse(Dir::X2, false, &self.prim[1][r.clone()], &mut a);
            self.transverse(Dir::X3, false, &self.prim[2][r.clone()], &mut b);
            for (q, out) in tdiv[r].iter_mut().enumerate() {
                *out = a[q] + b[q];
            }
        }
        self.tdiv = tdiv;
        self.scratch[0] = a;
        self.scratch[1] = b;
    }

    /// Evaluates `dU/dt` into `out` and returns the transverse-averaged mass
    /// fluxes through the left and right boundary faces.
    pub fn eval(&mut self, field: &ConservedField, t: f64, bc: &dyn BoundaryData, out: &mut [Vec<f64>; 5]) -> [f64; 2] {
        self.prepare(field, t, bc);
        let g = self.grid;
        let p = g.plane();
        let n1 = g.n1;
        let dx = g.dx1();
        let i12 = 1.0 / (12.0 * dx);
        let i12s = 1.0 / (12.0 * dx * dx);
        let mu = self.gas.mu;
        let lam = self.gas.lambda;
        let kappa = self.gas.kappa;

        let mut sc = std::mem::take(&mut self.scratch);
        // scratch layout
        const ACC: usize = 0; // 5 accumulators
        const GX: usize = 5; // 5 transverse flux planes
        const TD: usize = 10; // transverse derivative output
        const DU2: usize = 11; // d2 u_c, 3
        const DU3: usize = 14; // d3 u_c, 3
        const LAPU: usize = 17; // transverse laplacian u_c, 3
        const LAPT: usize = 20;
        const DIVU: usize = 21;
        const DDIV2: usize = 22;
        const DDIV3: usize = 23;
        const D1U: usize = 24; // x1 derivative of u_c, theta: 4
        const D11U: usize = 28; // x1 second derivative of u_c, theta: 4
        const D1TD: usize = 32;

        for i in 0..n1 {
            let pc = (i + GHOST) * p;
            let cr = pc..pc + p;
            // x1 convective flux divergence
            for e in 0..5 {
                let f = &self.f1[e];
                let acc = &mut sc[ACC + e];
                for q in 0..p {
                    let k = pc + q;
                    acc[q] = -(-f[k + 2 * p] + 8.0 * f[k + p] - 8.0 * f[k - p] + f[k - 2 * p]) * i12;
                }
            }
            // x1 derivatives of u and theta
            for c in 0..4 {
                let f = &self.prim[c];
                let (lo, hi) = sc.split_at_mut(D11U);
                let d1 = &mut lo[D1U + c];
                let d11 = &mut hi[c];
                for q in 0..p {
                    let k = pc + q;
                    let (fm2, fm1, f0, fp1, fp2) = (f[k - 2 * p], f[k - p], f[k], f[k + p], f[k + 2 * p]);
                    d1[q] = (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) * i12;
                    d11[q] = (-fp2 + 16.0 * fp1 - 30.0 * f0 + 16.0 * fm1 - fm2) * i12s;
                }
            }
            {
                let f = &self.tdiv;
                let d = &mut sc[D1TD];
                for q in 0..p {
                    let k = pc + q;
                    d[q] = (-f[k + 2 * p] + 8.0 * f[k + p] - 8.0 * f[k - p] + f[k - 2 * p]) * i12;
                }
            }
            let u1 = &self.prim[0][cr.clone()];
            let u2 = &self.prim[1][cr.clone()];
            let u3 = &self.prim[2][cr.clone()];
            let th = &self.prim[3][cr.clone()];
            let pr = &self.prim[4][cr.clone()];
            let r = &self.cons[0][cr.clone()];
            let m1 = &self.cons[1][cr.clone()];
            let m2 = &self.cons[2][cr.clone()];
            let m3 = &self.cons[3][cr.clone()];
            let en = &self.cons[4][cr.clone()];
            let _ = r;
            let transverse_active = !(self.s2.trivial() && self.s3.trivial());
            if transverse_active {
                // x2 fluxes
                for q in 0..p {
                    sc[GX][q] = m2[q];
                    sc[GX + 1][q] = m1[q] * u2[q];
                    sc[GX + 2][q] = m2[q] * u2[q] + pr[q];
                    sc[GX + 3][q] = m3[q] * u2[q];
                    sc[GX + 4][q] = (en[q] + pr[q]) * u2[q];
                }
                for e in 0..5 {
                    let (lo, hi) = sc.split_at_mut(TD);
                    self.transverse(Dir::X2, false, &lo[GX + e], &mut hi[0]);
                    for q in 0..p {
                        lo[ACC + e][q] -= hi[0][q];
                    }
                }
                // x3 fluxes
                for q in 0..p {
                    sc[GX][q] = m3[q];
                    sc[GX + 1][q] = m1[q] * u3[q];
                    sc[GX + 2][q] = m2[q] * u3[q];
                    sc[GX + 3][q] = m3[q] * u3[q] + pr[q];
                    sc[GX + 4][q] = (en[q] + pr[q]) * u3[q];
                }
                for e in 0..5 {
                    let (lo, hi) = sc.split_at_mut(TD);
                    self.transverse(Dir::X3, false, &lo[GX + e], &mut hi[0]);
                    for q in 0..p {
                        lo[ACC + e][q] -= hi[0][q];
                    }
                }
                for (c, u) in [u1, u2, u3].into_iter().enumerate() {
                    self.transverse(Dir::X2, false, u, &mut sc[DU2 + c]);
                    self.transverse(Dir::X3, false, u, &mut sc[DU3 + c]);
                    self.transverse(Dir::X2, true, u, &mut sc[TD]);
                    let (lo, hi) = sc.split_at_mut(LAPU);
                    self.transverse(Dir::X3, true, u, &mut hi[c]);
                    for q in 0..p {
                        hi[c][q] += lo[TD][q];
                    }
                }
                self.transverse(Dir::X2, true, th, &mut sc[TD]);
                {
                    let (lo, hi) = sc.split_at_mut(LAPT);
                    self.transverse(Dir::X3, true, th, &mut hi[0]);
                    for q in 0..p {
                        hi[0][q] += lo[TD][q];
                    }
                }
                for q in 0..p {
                    sc[DIVU][q] = sc[D1U][q] + self.tdiv[pc + q];
                }
                {
                    let (lo, hi) = sc.split_at_mut(DDIV2);
                    let (d2, d3) = hi.split_at_mut(1);
                    self.transverse(Dir::X2, false, &lo[DIVU], &mut d2[0]);
                    self.transverse(Dir::X3, false, &lo[DIVU], &mut d3[0]);
                }
            } else {
                for k in [DU2, DU2 + 1, DU2 + 2, DU3, DU3 + 1, DU3 + 2, LAPU, LAPU + 1, LAPU + 2, LAPT, DDIV2, DDIV3] {
                    sc[k].fill(0.0);
                }
                for q in 0..p {
                    sc[DIVU][q] = sc[D1U][q];
                }
            }
            let mpl = mu + lam;
            for q in 0..p {
                let grad = [
                    [sc[D1U][q], sc[DU2][q], sc[DU3][q]],
                    [sc[D1U + 1][q], sc[DU2 + 1][q], sc[DU3 + 1][q]],
                    [sc[D1U + 2][q], sc[DU2 + 2][q], sc[DU3 + 2][q]],
                ];
                let divu = sc[DIVU][q];
                let ddiv = [sc[D11U][q] + sc[D1TD][q], sc[DDIV2][q], sc[DDIV3][q]];
                let mut work = 0.0;
                let u = [u1[q], u2[q], u3[q]];
                for c in 0..3 {
                    let div_s = mu * (sc[D11U + c][q] + sc[LAPU + c][q]) + mpl * ddiv[c];
                    sc[ACC + 1 + c][q] += div_s;
                    work += u[c] * div_s;
                }
                let mut sg = lam * divu * divu;
                for c in 0..3 {
                    for d in 0..3 {
                        sg += mu * (grad[c][d] + grad[d][c]) * grad[c][d];
                    }
                }
                sc[ACC + 4][q] += kappa * (sc[D11U + 3][q] + sc[LAPT][q]) + work + sg;
            }
            for e in 0..5 {
                out[e][i * p..(i + 1) * p].copy_from_slice(&sc[ACC + e]);
            }
        }
        self.scratch = sc;

        let f = &self.f1[0];
        let face = |pl: usize| -> f64 {
            let mut s = 0.0;
            for q in 0..p {
                let k = pl * p + q;
                s += (-f[k + 2 * p] + 7.0 * f[k + p] + 7.0 * f[k] - f[k - p]) / 12.0;
            }
            s / p as f64
        };
        [face(GHOST - 1), face(GHOST + n1 - 1)]
    }
}
