use rayon::prelude::*;

use super::config::OptimizerKind;
use crate::scalar::Real;

const CHUNK: usize = 4096;

/// First-order optimizer over RGB texels with values clamped to [0,1].
/// Adam moments and bias corrections are per texel and advance only on
/// steps where the texel is active.
#[derive(Debug, Clone)]
pub(crate) struct TexelOptimizer<S> {
    kind: OptimizerKind,
    lr: S,
    m: Vec<[S; 3]>,
    v: Vec<[S; 3]>,
    steps: Vec<i32>,
}

impl<S: Real> TexelOptimizer<S> {
    pub fn new(kind: OptimizerKind, lr: f64, texels: usize) -> Self {
        let moments = match kind {
            OptimizerKind::Adam { .. } => texels,
            OptimizerKind::Sgd => 0,
        };
        Self {
            kind,
            lr: S::lit(lr),
            m: vec![[S::zero(); 3]; moments],
            v: vec![[S::zero(); 3]; moments],
            steps: vec![0; moments],
        }
    }

    /// One step on every texel flagged in `active`. `grad(i)` is the gradient of
    /// texel `i`; the absolute applied change is added to `magnitude`.
    pub fn step<G>(&mut self, texels: &mut [[S; 3]], magnitude: &mut [S], active: &[bool], grad: G)
    where
        G: Fn(usize) -> [S; 3] + Sync,
    {
        let lr = self.lr;
        let clamp01 = |x: S| x.max(S::zero()).min(S::one());
        match self.kind {
            OptimizerKind::Sgd => {
                texels
                    .par_chunks_mut(CHUNK)
                    .zip(magnitude.par_chunks_mut(CHUNK))
                    .enumerate()
                    .for_each(|(c, (tx, mag))| {
                        let base = c * CHUNK;
                        for k in 0..tx.len() {
                            if !active[base + k] {
                                continue;
                            }
                            let g = grad(base + k);
                            let old = tx[k];
                            let new = [0, 1, 2].map(|i| clamp01(old[i] - lr * g[i]));
                            mag[k] += (new[0] - old[0]).abs() + (new[1] - old[1]).abs() + (new[2] - old[2]).abs();
                            tx[k] = new;
                        }
                    });
            }
            OptimizerKind::Adam { beta1, beta2, epsilon } => {
                let (b1, b2, eps) = (S::lit(beta1), S::lit(beta2), S::lit(epsilon));
                let (one_b1, one_b2) = (S::one() - b1, S::one() - b2);
                texels
                    .par_chunks_mut(CHUNK)
                    .zip(magnitude.par_chunks_mut(CHUNK))
                    .zip(self.m.par_chunks_mut(CHUNK))
                    .zip(self.v.par_chunks_mut(CHUNK))
                    .zip(self.steps.par_chunks_mut(CHUNK))
                    .enumerate()
                    .for_each(|(c, ((((tx, mag), m), v), n))| {
                        let base = c * CHUNK;
                        for k in 0..tx.len() {
                            if !active[base + k] {
                                continue;
                            }
                            let g = grad(base + k);
                            n[k] += 1;
                            let c1 = S::one() / (S::one() - b1.powi(n[k]));
                            let c2 = S::one() / (S::one() - b2.powi(n[k]));
                            let old = tx[k];
                            let mut new = old;
                            for i in 0..3 {
                                m[k][i] = b1 * m[k][i] + one_b1 * g[i];
                                v[k][i] = b2 * v[k][i] + one_b2 * g[i] * g[i];
                                let step = lr * (m[k][i] * c1) / ((v[k][i] * c2).sqrt() + eps);
                                new[i] = clamp01(old[i] - step);
                            }
                            mag[k] += (new[0] - old[0]).abs() + (new[1] - old[1]).abs() + (new[2] - old[2]).abs();
                            tx[k] = new;
                        }
                    });
            }
        }
    }
}
