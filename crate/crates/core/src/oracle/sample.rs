//! One-sided Monte-Carlo check: a sampled prefix that certifies the
//! formula proves positive probability.

use num_traits::ToPrimitive;
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{eval_prefix, Letter, Verdict3};
use crate::error::{Error, Result};
use crate::formula::{substitute, Formula};
use crate::markov::MarkovChain;
use crate::valuation::Valuation;

pub const ALGORITHM: &str = "ChaCha8";

/// Trials are split across this many streams of the generator; the result
/// does not depend on how streams are scheduled.
pub const STREAMS: u64 = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleReport {
    pub samples: usize,
    pub certified_true: usize,
    pub certified_false: usize,
    pub unknown: usize,
    pub seed: u64,
    pub algorithm: &'static str,
}

impl SampleReport {
    pub fn fraction(&self) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            self.certified_true as f64 / self.samples as f64
        }
    }
}

struct Sampler {
    rows: Vec<(Vec<usize>, WeightedIndex<f64>)>,
}

impl Sampler {
    fn new(mc: &MarkovChain) -> Self {
        let rows = (0..mc.len())
            .map(|s| {
                let targets = mc.succ(s).iter().map(|(t, _)| *t).collect();
                let weights: Vec<f64> = mc
                    .succ(s)
                    .iter()
                    .map(|(_, p)| p.to_f64().unwrap_or(0.0))
                    .collect();
                let dist = WeightedIndex::new(weights).expect("rows are stochastic");
                (targets, dist)
            })
            .collect();
        Sampler { rows }
    }

    fn path(&self, mc: &MarkovChain, len: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let mut s = mc.init();
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            out.push(s);
            let (targets, dist) = &self.rows[s];
            s = targets[dist.sample(rng)];
        }
        out
    }
}

/// Samples `samples` trajectories of `horizon` states and evaluates `phi`
/// under `v` on each as a prefix.
pub fn sample_lower_bound(
    mc: &MarkovChain,
    phi: &Formula,
    v: &Valuation,
    samples: usize,
    horizon: usize,
    seed: u64,
) -> Result<SampleReport> {
    if horizon == 0 {
        return Err(Error::Usage("horizon must be at least 1".into()));
    }
    let psi = substitute(phi, v)?;
    let sampler = Sampler::new(mc);
    let mut report = SampleReport {
        samples,
        certified_true: 0,
        certified_false: 0,
        unknown: 0,
        seed,
        algorithm: ALGORITHM,
    };
    for stream in 0..STREAMS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let share = samples / STREAMS as usize + usize::from((stream as usize) < samples % STREAMS as usize);
        for _ in 0..share {
            let word: Vec<Letter> = sampler
                .path(mc, horizon, &mut rng)
                .into_iter()
                .map(|s| mc.label(s).clone())
                .collect();
            match eval_prefix(&word, &psi) {
                Verdict3::True => report.certified_true += 1,
                Verdict3::False => report.certified_false += 1,
                Verdict3::Unknown => report.unknown += 1,
            }
        }
    }
    Ok(report)
}
