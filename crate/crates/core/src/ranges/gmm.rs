//! One-dimensional Gaussian mixtures fitted by EM and selected by BIC.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::pattern::Component;

pub const VARIANCE_FLOOR: f64 = 1e-9;
const NOISE_SIGMA: f64 = 1e-3;
const TOLERANCE: f64 = 1e-6;
const MAX_ITERATIONS: usize = 200;
const LN_2PI: f64 = 1.837_877_066_409_345_5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureFit {
    /// Sorted by mean, in the units of the input values.
    pub components: Vec<Component>,
    /// BIC of the winning fit on the standardized sample.
    pub bic: f64,
    pub seed: u64,
    pub modes: usize,
}

/// Result of a single EM run on raw values.
#[derive(Clone, Debug)]
pub struct EmTrace {
    pub components: Vec<Component>,
    /// Total log-likelihood after each iteration, starting with the initial parameters.
    pub log_likelihood: Vec<f64>,
}

impl EmTrace {
    pub fn final_log_likelihood(&self) -> f64 {
        *self.log_likelihood.last().expect("trace has at least one entry")
    }
}

/// Fits mixtures with 1..=`modes_max` components, `restarts` times each, and
/// returns the one with the lowest BIC; ties go to fewer modes.
///
/// Returns `None` for an empty sample. A sample without spread yields one
/// component at the common value with the variance floor.
pub fn fit_gmm(values: &[f64], modes_max: usize, restarts: usize, seed: u64) -> Option<MixtureFit> {
    if values.is_empty() || modes_max == 0 {
        return None;
    }
    let n = values.len() as f64;
    let shift = values.iter().sum::<f64>() / n;
    let scale = (values.iter().map(|v| (v - shift).powi(2)).sum::<f64>() / n).sqrt();
    if !scale.is_finite() || scale <= 0.0 {
        return Some(MixtureFit {
            components: vec![Component {
                weight: 1.0,
                mean: values[0],
                variance: VARIANCE_FLOOR,
            }],
            bic: f64::NEG_INFINITY,
            seed,
            modes: 1,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sample: Vec<f64> = values.iter().map(|v| (v - shift) / scale).collect();
    sample.shuffle(&mut rng);
    let noise = Normal::new(0.0, NOISE_SIGMA).expect("valid sigma");
    for v in &mut sample {
        *v += noise.sample(&mut rng);
    }

    let mut best: Option<(f64, Vec<Component>)> = None;
    for modes in 1..=modes_max.min(sample.len()) {
        for _ in 0..restarts.max(1) {
            let init = kmeans_plus_plus(&sample, modes, &mut rng);
            let trace = em(&sample, init);
            let ll = trace.final_log_likelihood();
            if !ll.is_finite() {
                continue;
            }
            let bic = (3 * modes - 1) as f64 * n.ln() - 2.0 * ll;
            if best.as_ref().map_or(true, |(b, _)| bic < *b) {
                best = Some((bic, trace.components));
            }
        }
    }
    let (bic, comps) = best?;
    let mut components: Vec<Component> = comps
        .into_iter()
        .map(|c| Component {
            weight: c.weight,
            mean: c.mean * scale + shift,
            variance: c.variance * scale * scale,
        })
        .collect();
    components.sort_by(|a, b| a.mean.total_cmp(&b.mean));
    Some(MixtureFit {
        modes: components.len(),
        components,
        bic,
        seed,
    })
}

/// Initial parameters from k-means++ seeding followed by one assignment step.
pub fn kmeans_plus_plus(sample: &[f64], k: usize, rng: &mut impl Rng) -> Vec<Component> {
    let mut centers = vec![sample[rng.random_range(0..sample.len())]];
    let mut dist: Vec<f64> = sample.iter().map(|x| (x - centers[0]).powi(2)).collect();
    while centers.len() < k {
        let total: f64 = dist.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut idx = sample.len() - 1;
            for (i, d) in dist.iter().enumerate() {
                if target < *d {
                    idx = i;
                    break;
                }
                target -= d;
            }
            sample[idx]
        } else {
            sample[rng.random_range(0..sample.len())]
        };
        centers.push(next);
        for (d, x) in dist.iter_mut().zip(sample) {
            *d = d.min((x - next).powi(2));
        }
    }

    let mut sums = vec![(0.0f64, 0.0f64, 0usize); k];
    for &x in sample {
        let j = (0..k)
            .min_by(|&a, &b| (x - centers[a]).abs().total_cmp(&(x - centers[b]).abs()))
            .unwrap();
        sums[j].0 += x;
        sums[j].1 += x * x;
        sums[j].2 += 1;
    }
    let n = sample.len() as f64;
    let overall = sample.iter().map(|x| x * x).sum::<f64>() / n - (sample.iter().sum::<f64>() / n).powi(2);
    let comps = sums
        .iter()
        .zip(&centers)
        .map(|(&(s, ss, c), &center)| {
            if c <= 1 {
                return Component {
                    weight: (c.max(1)) as f64 / n,
                    mean: if c == 1 { s } else { center },
                    variance: overall.max(VARIANCE_FLOOR),
                };
            }
            let m = s / c as f64;
            Component {
                weight: c as f64 / n,
                mean: m,
                variance: (ss / c as f64 - m * m).max(VARIANCE_FLOOR),
            }
        })
        .collect();
    normalize_weights(comps)
}

fn normalize_weights(mut comps: Vec<Component>) -> Vec<Component> {
    let total: f64 = comps.iter().map(|c| c.weight).sum();
    for c in &mut comps {
        c.weight /= total;
    }
    comps
}

/// Runs EM from `init` until the log-likelihood gains less than 1e-6 or
/// 200 iterations pass. Variances are floored at 1e-9.
pub fn em(sample: &[f64], init: Vec<Component>) -> EmTrace {
    let k = init.len();
    let n = sample.len();
    let mut comps = init;
    let mut resp = vec![0.0; n * k];
    let mut ll = e_step(sample, &comps, &mut resp);
    let mut trace = vec![ll];
    for _ in 0..MAX_ITERATIONS {
        for j in 0..k {
            let mut nk = 0.0;
            let mut sum = 0.0;
            for i in 0..n {
                nk += resp[i * k + j];
                sum += resp[i * k + j] * sample[i];
            }
            if nk <= f64::MIN_POSITIVE {
                comps[j].weight = 0.0;
                continue;
            }
            let mean = sum / nk;
            let mut sq = 0.0;
            for i in 0..n {
                sq += resp[i * k + j] * (sample[i] - mean).powi(2);
            }
            comps[j] = Component {
                weight: nk / n as f64,
                mean,
                variance: (sq / nk).max(VARIANCE_FLOOR),
            };
        }
        let next = e_step(sample, &comps, &mut resp);
        trace.push(next);
        let gain = next - ll;
        ll = next;
        if gain.is_nan() || gain < TOLERANCE {
            break;
        }
    }
    EmTrace {
        components: comps,
        log_likelihood: trace,
    }
}

/// Fills responsibilities and returns the total log-likelihood.
fn e_step(sample: &[f64], comps: &[Component], resp: &mut [f64]) -> f64 {
    let k = comps.len();
    let consts: Vec<(f64, f64)> = comps
        .iter()
        .map(|c| {
            let log_w = if c.weight > 0.0 { c.weight.ln() } else { f64::NEG_INFINITY };
            (log_w - 0.5 * (LN_2PI + c.variance.ln()), 0.5 / c.variance)
        })
        .collect();
    let mut total = 0.0;
    for (i, &x) in sample.iter().enumerate() {
        let row = &mut resp[i * k..(i + 1) * k];
        let mut max = f64::NEG_INFINITY;
        for (j, c) in comps.iter().enumerate() {
            row[j] = consts[j].0 - consts[j].1 * (x - c.mean).powi(2);
            max = max.max(row[j]);
        }
        let mut sum = 0.0;
        for r in row.iter_mut() {
            *r = (*r - max).exp();
            sum += *r;
        }
        for r in row.iter_mut() {
            *r /= sum;
        }
        total += max + sum.ln();
    }
    total
}
