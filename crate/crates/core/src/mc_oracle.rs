//! Monte Carlo and quadrature oracles.
//!
//! Rows are split into `streams` contiguous blocks; block `k` draws from
//! ChaCha8 seeded with `seed` on stream `k`, so the output depends only on
//! the plan, never on how rayon schedules the blocks.

use std::io::{self, Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::gamma_ext::{GammaMixtureModel, SibuyaModel};
use crate::mixing::{MixingDistribution, MixingKind};
use crate::numeric::Integrator;

/// What a plan samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SimModel {
    /// `X_i = E_i / Θ` with unit exponentials `E_i`.
    Frailty { mixing: MixingDistribution },
    /// `X_i = G_{α_i} / Θ`.
    GammaMixture {
        shapes: Vec<f64>,
        mixing: MixingDistribution,
    },
}

impl From<&GammaMixtureModel> for SimModel {
    fn from(m: &GammaMixtureModel) -> Self {
        SimModel::GammaMixture {
            shapes: m.shapes.clone(),
            mixing: m.mixing,
        }
    }
}

impl From<&SibuyaModel> for SimModel {
    fn from(m: &SibuyaModel) -> Self {
        SimModel::from(&m.as_gamma_mixture())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationPlan {
    pub model: SimModel,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub streams: usize,
}

impl SimulationPlan {
    pub fn frailty(mixing: MixingDistribution, n: usize, samples: usize, seed: u64) -> Self {
        SimulationPlan {
            model: SimModel::Frailty { mixing },
            n,
            samples,
            seed,
            streams: 64,
        }
    }

    pub fn with_streams(mut self, streams: usize) -> Self {
        self.streams = streams;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::param("samples", "must be >= 1"));
        }
        if self.streams == 0 {
            return Err(Error::param("streams", "must be >= 1"));
        }
        if self.n == 0 {
            return Err(Error::param("n", "dimension must be >= 1"));
        }
        if let SimModel::GammaMixture { shapes, .. } = &self.model {
            if shapes.len() != self.n {
                return Err(Error::DimensionMismatch {
                    expected: shapes.len(),
                    got: self.n,
                });
            }
            if shapes.iter().any(|&a| !(a > 0.0)) {
                return Err(Error::param("shapes", "shape must be positive"));
            }
        }
        Ok(())
    }

    fn stream_ranges(&self) -> Vec<(u64, usize, usize)> {
        let s = self.streams.min(self.samples);
        (0..s)
            .map(|k| (k as u64, k * self.samples / s, (k + 1) * self.samples / s))
            .collect()
    }

    /// Draws the rows of every block in parallel and folds each block with
    /// `fold`; blocks come back in stream order.
    fn map_blocks<T, F>(&self, fold: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&mut dyn FnMut(&mut Vec<f64>), usize) -> T + Sync,
    {
        let (mixing, shapes) = match &self.model {
            SimModel::Frailty { mixing } => (mixing, None),
            SimModel::GammaMixture { shapes, mixing } => (mixing, Some(shapes)),
        };
        let theta = mixing.sampler();
        let gammas: Option<Vec<Gamma<f64>>> =
            shapes.map(|sh| sh.iter().map(|&a| Gamma::new(a, 1.0).expect("validated")).collect());
        let n = self.n;
        self.stream_ranges()
            .into_par_iter()
            .map(|(k, lo, hi)| {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                rng.set_stream(k);
                let mut draw = |row: &mut Vec<f64>| {
                    row.clear();
                    let th = theta.sample(&mut rng);
                    for i in 0..n {
                        let y: f64 = match &gammas {
                            Some(g) => g[i].sample(&mut rng),
                            None => rng.sample(Exp1),
                        };
                        row.push(y / th);
                    }
                };
                fold(&mut draw, hi - lo)
            })
            .collect()
    }
}

/// Samples stored column-major: `data[i * samples + j]` is row `j`, column `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub data: Vec<f64>,
}

impl SampleMatrix {
    pub fn column(&self, i: usize) -> &[f64] {
        &self.data[i * self.samples..(i + 1) * self.samples]
    }

    pub fn row(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.data[i * self.samples + j]).collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.samples)
            .map(|j| (0..self.n).map(|i| self.data[i * self.samples + j]).sum())
            .collect()
    }
}

/// Full sample matrix (`samples × n`), one shared Θ draw per row.
pub fn sample_vector(plan: &SimulationPlan) -> Result<SampleMatrix> {
    plan.validate()?;
    let n = plan.n;
    let blocks: Vec<Vec<f64>> = plan.map_blocks(|draw, rows| {
        let mut out = Vec::with_capacity(rows * n);
        let mut row = Vec::with_capacity(n);
        for _ in 0..rows {
            draw(&mut row);
            out.extend_from_slice(&row);
        }
        out
    });
    let mut data = vec![0.0; n * plan.samples];
    let mut j = 0;
    for block in blocks {
        for row in block.chunks_exact(n) {
            for (i, v) in row.iter().enumerate() {
                data[i * plan.samples + j] = *v;
            }
            j += 1;
        }
    }
    Ok(SampleMatrix {
        n,
        samples: plan.samples,
        seed: plan.seed,
        data,
    })
}

/// Row sums only; identical to `sample_vector(plan).row_sums()`.
pub fn sample_sums(plan: &SimulationPlan) -> Result<Vec<f64>> {
    plan.validate()?;
    let blocks: Vec<Vec<f64>> = plan.map_blocks(|draw, rows| {
        let mut out = Vec::with_capacity(rows);
        let mut row = Vec::with_capacity(plan.n);
        for _ in 0..rows {
            draw(&mut row);
            out.push(row.iter().sum());
        }
        out
    });
    Ok(blocks.concat())
}

/// Sample mean and its standard error.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

/// Sample Pearson correlation.
pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}

/// Kolmogorov–Smirnov distance between the empirical cdf of `sample` and
/// `cdf`, evaluating `cdf` at every order statistic.
pub fn empirical_ks<F>(sample: &[f64], cdf: F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    empirical_ks_bounded(sample, cdf, sample.len())
}

/// Upper bound on the KS distance using at most `evaluations` cdf calls.
///
/// Between two evaluated order statistics `a < b` monotonicity bounds the
/// gap by `max(F(x_b) - a/N, (b+1)/N - F(x_a))`; with `evaluations >= N`
/// this is the exact statistic.
pub fn empirical_ks_bounded<F>(sample: &[f64], cdf: F, evaluations: usize) -> Result<f64>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    if sample.is_empty() {
        return Err(Error::param("sample", "empty sample"));
    }
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let total = xs.len();
    let nf = total as f64;
    let stride = total.div_ceil(evaluations.max(1)).max(1);
    let mut idx: Vec<usize> = (0..total).step_by(stride).collect();
    if *idx.last().unwrap() != total - 1 {
        idx.push(total - 1);
    }
    let vals: Vec<f64> = idx.par_iter().map(|&i| cdf(xs[i])).collect::<Result<Vec<f64>>>()?;
    let mut d: f64 = 0.0;
    if stride == 1 {
        for (k, &i) in idx.iter().enumerate() {
            let f = vals[k];
            d = d.max((f - i as f64 / nf).abs()).max(((i + 1) as f64 / nf - f).abs());
        }
        return Ok(d);
    }
    for k in 0..idx.len() {
        let (a, fa) = (idx[k], vals[k]);
        let (b, fb) = if k + 1 < idx.len() {
            (idx[k + 1], vals[k + 1])
        } else {
            (a, fa)
        };
        d = d.max(fb - a as f64 / nf).max((b + 1) as f64 / nf - fa);
        d = d.max(a as f64 / nf - fa).max(fb - (b + 1) as f64 / nf);
    }
    Ok(d)
}

/// `∫ x^{n-1} θ^n e^{-θx} / Γ(n) dF_Θ(θ)` by adaptive quadrature.
pub fn quadrature_mixture_pdf(m: &MixingDistribution, n: usize, x: f64) -> Result<f64> {
    if matches!(m.kind(), MixingKind::PositiveStable { alpha } if alpha < 1.0) {
        return Err(Error::Unsupported(
            "stable frailty has no usable density; use the Monte Carlo oracle".into(),
        ));
    }
    if n == 0 {
        return Err(Error::param("n", "dimension must be >= 1"));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::param("x", format!("need 0 < x < inf, got {x}")));
    }
    let nf = n as f64;
    let lead = (nf - 1.0) * x.ln() - ln_gamma(nf);
    let q = Integrator::new(1e-300, 1e-13).with_max_segments(8000);
    let peak = nf / x;
    m.expect(
        |th: f64| (lead + nf * th.ln() - th * x).exp(),
        &[0.1 * peak, peak, 4.0 * peak, 20.0 * peak],
        &q,
    )
}

const MAGIC: &[u8; 8] = b"MIXAGG01";

/// Binary layout: magic, then `n`, `samples`, `seed` as little-endian u64,
/// then the column-major doubles (little-endian).
pub fn write_samples_binary<W: Write>(mut w: W, m: &SampleMatrix) -> io::Result<()> {
    w.write_all(MAGIC)?;
    for v in [m.n as u64, m.samples as u64, m.seed] {
        w.write_all(&v.to_le_bytes())?;
    }
    for v in &m.data {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()
}

pub fn read_samples_binary<R: Read>(mut r: R) -> io::Result<SampleMatrix> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(io::Error::new(io::ErrorKind::InvalidData, "bad sample file magic"));
    }
    let mut word = [0u8; 8];
    let mut header = [0u64; 3];
    for h in &mut header {
        r.read_exact(&mut word)?;
        *h = u64::from_le_bytes(word);
    }
    let (n, samples, seed) = (header[0] as usize, header[1] as usize, header[2]);
    let len = n
        .checked_mul(samples)
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidData, "sample file header overflows"))?;
    let mut data = Vec::with_capacity(len);
    for _ in 0..len {
        r.read_exact(&mut word)?;
        data.push(f64::from_le_bytes(word));
    }
    Ok(SampleMatrix { n, samples, seed, data })
}

/// CSV with header `x1,...,xn`, one row per sample, shortest round-trip digits.
pub fn write_samples_csv<W: Write>(mut w: W, m: &SampleMatrix) -> io::Result<()> {
    let header: Vec<String> = (1..=m.n).map(|i| format!("x{i}")).collect();
    writeln!(w, "{}", header.join(","))?;
    for j in 0..m.samples {
        let row: Vec<String> = m.row(j).iter().map(|v| format!("{v:?}")).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()
}
