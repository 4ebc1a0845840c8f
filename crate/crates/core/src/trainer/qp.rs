//! Primal-dual interior-point solver for
//!
//! ```text
//! minimize  1/2 sum_k d_k x_k^2 + sum_i max_j (a_ij . x + c_ij)
//! ```
//!
//! written in epigraph form with one slack `xi_i` per sample and one linear
//! constraint `xi_i >= a_ij . x + c_ij` per piece. Both the joint
//! classifier/rejector objective and the hinge-loss SVM have this shape.
//! The Newton system is reduced to the `n x n` block in `x`; slacks and
//! multipliers are recovered per sample.

use nalgebra::{Cholesky, DMatrix, DVector};

/// Curvature added on coordinates without regularization so the barrier
/// subproblems stay bounded when the optimal set is not.
const FREE_COORD_RIDGE: f64 = 1e-10;

const STEP_FRACTION: f64 = 0.995;

#[derive(Debug, Clone)]
pub(crate) struct PiecewiseQp {
    n: usize,
    diag: Vec<f64>,
    /// `offsets[i]..offsets[i + 1]` are the pieces of sample `i`.
    offsets: Vec<usize>,
    coeffs: Vec<f64>,
    consts: Vec<f64>,
}

#[derive(Debug, Clone)]
pub(crate) struct QpOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Best objective seen after each iteration.
    pub history: Vec<f64>,
}

impl PiecewiseQp {
    pub fn new(diag: Vec<f64>) -> Self {
        PiecewiseQp {
            n: diag.len(),
            diag,
            offsets: vec![0],
            coeffs: Vec::new(),
            consts: Vec::new(),
        }
    }

    /// Adds one sample whose loss is the max over `pieces` of `a . x + c`.
    pub fn push_sample<'a>(&mut self, pieces: impl IntoIterator<Item = (&'a [f64], f64)>) {
        for (a, c) in pieces {
            assert_eq!(a.len(), self.n);
            self.coeffs.extend_from_slice(a);
            self.consts.push(c);
        }
        self.offsets.push(self.consts.len());
        assert!(
            self.offsets[self.offsets.len() - 1] > self.offsets[self.offsets.len() - 2],
            "sample without pieces"
        );
    }

    fn samples(&self) -> usize {
        self.offsets.len() - 1
    }

    fn piece(&self, p: usize) -> &[f64] {
        &self.coeffs[p * self.n..(p + 1) * self.n]
    }

    fn affine(&self, p: usize, x: &[f64]) -> f64 {
        dot(self.piece(p), x) + self.consts[p]
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        let reg: f64 = 0.5 * self.diag.iter().zip(x).map(|(d, v)| d * v * v).sum::<f64>();
        let loss: f64 = (0..self.samples())
            .map(|i| {
                (self.offsets[i]..self.offsets[i + 1])
                    .map(|p| self.affine(p, x))
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .sum();
        reg + loss
    }

    pub fn solve(&self, tolerance: f64, max_iterations: usize) -> QpOutcome {
        let n = self.n;
        let m = self.samples();
        let np = self.consts.len();
        let diag: Vec<f64> = self
            .diag
            .iter()
            .map(|&d| if d > 0.0 { d } else { FREE_COORD_RIDGE })
            .collect();

        let mut x = vec![0.0; n];
        let mut xi = vec![0.0; m];
        let mut s = vec![0.0; np];
        let mut z = vec![0.0; np];
        for i in 0..m {
            let range = self.offsets[i]..self.offsets[i + 1];
            let top = range.clone().map(|p| self.consts[p]).fold(0.0, f64::max);
            xi[i] = top + 1.0;
            let k = range.len() as f64;
            for p in range {
                s[p] = xi[i] - self.consts[p];
                z[p] = 1.0 / k;
            }
        }

        let mut best_x = x.clone();
        let mut best_obj = self.objective(&x);
        let mut history = Vec::new();
        let scale = 1.0 + best_obj.abs();

        let mut rx = vec![0.0; n];
        let mut rxi = vec![0.0; m];
        let mut rp = vec![0.0; np];

        for iter in 0..max_iterations {
            // Residuals.
            for k in 0..n {
                rx[k] = diag[k] * x[k];
            }
            for p in 0..np {
                let a = self.piece(p);
                for k in 0..n {
                    rx[k] += z[p] * a[k];
                }
            }
            for i in 0..m {
                let range = self.offsets[i]..self.offsets[i + 1];
                rxi[i] = 1.0 - range.clone().map(|p| z[p]).sum::<f64>();
                for p in range {
                    rp[p] = s[p] - xi[i] + self.affine(p, &x);
                }
            }
            let gap: f64 = s.iter().zip(&z).map(|(a, b)| a * b).sum();
            let mu = gap / np as f64;
            let dual_inf = norm_inf(&rx).max(norm_inf(&rxi));
            let primal_inf = norm_inf(&rp);
            if gap <= tolerance * scale && dual_inf <= tolerance * scale && primal_inf <= tolerance * scale {
                return QpOutcome {
                    x: best_x,
                    iterations: iter,
                    converged: true,
                    history,
                };
            }

            let Some(system) = NewtonSystem::factor(self, &diag, &s, &z) else {
                break;
            };

            // Predictor.
            let rc_aff: Vec<f64> = s.iter().zip(&z).map(|(a, b)| a * b).collect();
            let aff = system.direction(self, &rx, &rxi, &rp, &rc_aff, &s, &z);
            let alpha_aff = max_step(&s, &aff.ds).min(max_step(&z, &aff.dz));
            let mu_aff = s
                .iter()
                .zip(&aff.ds)
                .zip(z.iter().zip(&aff.dz))
                .map(|((si, dsi), (zi, dzi))| (si + alpha_aff * dsi) * (zi + alpha_aff * dzi))
                .sum::<f64>()
                / np as f64;
            let sigma = (mu_aff / mu).powi(3).clamp(0.0, 1.0);

            // Corrector.
            let rc: Vec<f64> = (0..np)
                .map(|p| s[p] * z[p] + aff.ds[p] * aff.dz[p] - sigma * mu)
                .collect();
            let dir = system.direction(self, &rx, &rxi, &rp, &rc, &s, &z);
            let alpha = (STEP_FRACTION * max_step(&s, &dir.ds).min(max_step(&z, &dir.dz))).min(1.0);

            for k in 0..n {
                x[k] += alpha * dir.dx[k];
            }
            for i in 0..m {
                xi[i] += alpha * dir.dxi[i];
            }
            for p in 0..np {
                s[p] += alpha * dir.ds[p];
                z[p] += alpha * dir.dz[p];
            }

            let obj = self.objective(&x);
            if obj < best_obj {
                best_obj = obj;
                best_x.copy_from_slice(&x);
            }
            history.push(best_obj);
        }

        QpOutcome {
            x: best_x,
            iterations: history.len(),
            converged: false,
            history,
        }
    }
}

impl super::descent::Subdifferentiable for PiecewiseQp {
    fn value(&self, x: &[f64]) -> f64 {
        self.objective(x)
    }

    /// Regularization gradient plus, per sample, the first piece attaining
    /// the max.
    fn subgradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g: Vec<f64> = self.diag.iter().zip(x).map(|(d, v)| d * v).collect();
        for i in 0..self.samples() {
            let mut arg = self.offsets[i];
            let mut top = self.affine(arg, x);
            for p in (self.offsets[i] + 1)..self.offsets[i + 1] {
                let v = self.affine(p, x);
                if v > top {
                    top = v;
                    arg = p;
                }
            }
            for (gk, ak) in g.iter_mut().zip(self.piece(arg)) {
                *gk += ak;
            }
        }
        g
    }
}

struct Direction {
    dx: Vec<f64>,
    dxi: Vec<f64>,
    ds: Vec<f64>,
    dz: Vec<f64>,
}

struct NewtonSystem {
    chol: Cholesky<f64, nalgebra::Dyn>,
    /// Per-piece weights `z/s`.
    weights: Vec<f64>,
    /// Per-sample weight totals.
    totals: Vec<f64>,
    /// Per-sample weighted mean piece, `m x n` row-major.
    means: Vec<f64>,
}

impl NewtonSystem {
    fn factor(qp: &PiecewiseQp, diag: &[f64], s: &[f64], z: &[f64]) -> Option<Self> {
        let n = qp.n;
        let m = qp.samples();
        let weights: Vec<f64> = z.iter().zip(s).map(|(z, s)| z / s).collect();
        let mut totals = vec![0.0; m];
        let mut means = vec![0.0; m * n];
        let mut mat = DMatrix::<f64>::zeros(n, n);
        for (k, d) in diag.iter().enumerate() {
            mat[(k, k)] = *d;
        }
        let mut diff = vec![0.0; n];
        for i in 0..m {
            let range = qp.offsets[i]..qp.offsets[i + 1];
            let total: f64 = range.clone().map(|p| weights[p]).sum();
            totals[i] = total;
            let mean = &mut means[i * n..(i + 1) * n];
            for p in range.clone() {
                let share = weights[p] / total;
                for (mk, ak) in mean.iter_mut().zip(qp.piece(p)) {
                    *mk += share * ak;
                }
            }
            // Weighted covariance of the pieces, accumulated pairwise so that
            // a dominant weight does not cancel catastrophically.
            for p in range.clone() {
                for q in (p + 1)..range.end {
                    let coef = weights[p] * weights[q] / total;
                    if coef == 0.0 {
                        continue;
                    }
                    let (ap, aq) = (qp.piece(p), qp.piece(q));
                    let mut any = false;
                    for k in 0..n {
                        diff[k] = ap[k] - aq[k];
                        any |= diff[k] != 0.0;
                    }
                    if !any {
                        continue;
                    }
                    for c in 0..n {
                        if diff[c] == 0.0 {
                            continue;
                        }
                        let t = coef * diff[c];
                        for r in c..n {
                            mat[(r, c)] += t * diff[r];
                        }
                    }
                }
            }
        }
        for c in 0..n {
            for r in (c + 1)..n {
                mat[(c, r)] = mat[(r, c)];
            }
        }
        let chol = Cholesky::new(mat.clone()).or_else(|| {
            let bump = 1e-12 * (1.0 + mat.diagonal().amax());
            let mut m2 = mat;
            for k in 0..n {
                m2[(k, k)] += bump;
            }
            Cholesky::new(m2)
        })?;
        Some(NewtonSystem {
            chol,
            weights,
            totals,
            means,
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn direction(
        &self,
        qp: &PiecewiseQp,
        rx: &[f64],
        rxi: &[f64],
        rp: &[f64],
        rc: &[f64],
        s: &[f64],
        z: &[f64],
    ) -> Direction {
        let n = qp.n;
        let m = qp.samples();
        let np = s.len();
        let g: Vec<f64> = (0..np).map(|p| (-rc[p] + z[p] * rp[p]) / s[p]).collect();

        let mut rhs = DVector::<f64>::from_iterator(n, rx.iter().map(|v| -v));
        let mut shifted = vec![0.0; m];
        for i in 0..m {
            let mean = &self.means[i * n..(i + 1) * n];
            let range = qp.offsets[i]..qp.offsets[i + 1];
            let mut g_total = 0.0;
            for p in range {
                g_total += g[p];
                let a = qp.piece(p);
                for k in 0..n {
                    rhs[k] -= (a[k] - mean[k]) * g[p];
                }
            }
            for k in 0..n {
                rhs[k] -= mean[k] * rxi[i];
            }
            shifted[i] = (g_total - rxi[i]) / self.totals[i];
        }
        let dx = self.chol.solve(&rhs);
        let dx: Vec<f64> = dx.iter().copied().collect();

        let mut dxi = vec![0.0; m];
        let mut ds = vec![0.0; np];
        let mut dz = vec![0.0; np];
        for i in 0..m {
            let mean = &self.means[i * n..(i + 1) * n];
            dxi[i] = shifted[i] + dot(mean, &dx);
            for p in qp.offsets[i]..qp.offsets[i + 1] {
                let move_p = dxi[i] - dot(qp.piece(p), &dx);
                ds[p] = -rp[p] + move_p;
                dz[p] = g[p] - self.weights[p] * move_p;
            }
        }
        Direction { dx, dxi, ds, dz }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Largest step in `[0, 1]`-unbounded form keeping `v + t dv >= 0`.
fn max_step(v: &[f64], dv: &[f64]) -> f64 {
    v.iter()
        .zip(dv)
        .filter(|(_, d)| **d < 0.0)
        .map(|(x, d)| -x / d)
        .fold(1.0 / STEP_FRACTION, f64::min)
}
