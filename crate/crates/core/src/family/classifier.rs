use num_bigint::{BigInt, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::insertion::{enumerate_sites, AttachmentSite};
use crate::dendrogram::Dendrogram;
use crate::error::{Error, Result};
use crate::padic::{valuation, Rational, Valuation};

/// How to weigh the attachment sites of a new datum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassifierMode {
    /// Equal weight per site.
    Uniform,
    /// Haar measure on the p-adic integers of the set of points attaching at
    /// each site.
    Haar,
    /// Caller-supplied weights, aligned with [`enumerate_sites`].
    User(Vec<Rational>),
}

/// Probability distribution over the attachment sites of a dendrogram.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttachmentDistribution {
    pub sites: Vec<AttachmentSite>,
    pub weights: Vec<Rational>,
}

impl AttachmentDistribution {
    pub fn weight_of(&self, site: &AttachmentSite) -> Rational {
        self.sites
            .iter()
            .position(|s| s == site)
            .map_or_else(Rational::zero, |k| self.weights[k].clone())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("distribution serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let dist: AttachmentDistribution = serde_json::from_str(text).map_err(Error::from_json)?;
        if dist.sites.len() != dist.weights.len() {
            return Err(Error::InvalidWeights(format!(
                "{} sites but {} weights",
                dist.sites.len(),
                dist.weights.len()
            )));
        }
        Ok(dist)
    }
}

/// Unnormalized Haar weights: for each site, the measure of the set of
/// `x` in `Z_p` whose end attaches there. For integral data they sum to 1.
///
/// With `t` ranging over levels, `{x : v(x - a) = t}` has measure
/// `p^-t - p^-(t+1)`, which gives in closed form
/// - an edge from level `r` to a vertex at level `s`: `p^-(r+1) - p^-s`,
/// - a leaf edge below level `r`: `p^-(r+1)`,
/// - a vertex at level `l` with `k` children: `(p - k) p^-(l+1)`,
/// - the edge above a root at level `L >= 0`: `1 - p^-L`.
pub fn haar_weights(d: &Dendrogram) -> Result<Vec<(AttachmentSite, Rational)>> {
    let p = d.prime();
    for x in d.points().iter().filter_map(|x| x.as_finite()) {
        if let Valuation::Finite(v) = valuation(x, p) {
            if v < 0 {
                return Err(Error::UnsupportedMeasure {
                    prime: p.get(),
                    point: x.to_string(),
                    valuation: v,
                });
            }
        }
    }
    let pb = p.to_bigint();
    let inv_pow = |k: i64| Rational::pow(&pb, -k);
    let weights = enumerate_sites(d)
        .into_iter()
        .map(|site| {
            let w = match &site {
                AttachmentSite::Edge {
                    upper: Valuation::Finite(root),
                    lower: Valuation::NegInfinity,
                    ..
                } => &Rational::one() - &inv_pow(*root),
                AttachmentSite::Edge {
                    lower: Valuation::Finite(r),
                    upper: Valuation::Finite(s),
                    ..
                } => &inv_pow(r + 1) - &inv_pow(*s),
                AttachmentSite::Edge {
                    lower: Valuation::Finite(r),
                    upper: Valuation::Infinity,
                    ..
                } => inv_pow(r + 1),
                AttachmentSite::Edge { .. } => unreachable!("edge bounds are ordered"),
                AttachmentSite::Vertex { level, children, .. } => {
                    &Rational::from((p.get() - *children as u64) as i64) * &inv_pow(level + 1)
                }
            };
            (site, w)
        })
        .collect();
    Ok(weights)
}

fn normalize(weights: Vec<Rational>) -> Result<Vec<Rational>> {
    if let Some(w) = weights.iter().find(|w| w.is_negative()) {
        return Err(Error::InvalidWeights(format!("negative weight {w}")));
    }
    let total: Rational = weights.iter().cloned().sum();
    if total.is_zero() {
        return Err(Error::InvalidWeights("weights sum to zero".into()));
    }
    Ok(weights.iter().map(|w| w / &total).collect())
}

pub fn attachment_distribution(d: &Dendrogram, mode: &ClassifierMode) -> Result<AttachmentDistribution> {
    let (sites, raw): (Vec<_>, Vec<_>) = match mode {
        ClassifierMode::Uniform => enumerate_sites(d).into_iter().map(|s| (s, Rational::one())).unzip(),
        ClassifierMode::Haar => haar_weights(d)?.into_iter().unzip(),
        ClassifierMode::User(weights) => {
            let sites = enumerate_sites(d);
            if sites.len() != weights.len() {
                return Err(Error::InvalidWeights(format!(
                    "dendrogram has {} attachment sites but {} weights were given",
                    sites.len(),
                    weights.len()
                )));
            }
            (sites, weights.clone())
        }
    };
    Ok(AttachmentDistribution {
        sites,
        weights: normalize(raw)?,
    })
}

/// Exact sampler over a distribution with rational weights.
///
/// Weights are scaled to integers over their common denominator and a
/// uniform integer below the total picks the site, so frequencies converge to
/// the exact weights.
pub struct SiteSampler<'a> {
    dist: &'a AttachmentDistribution,
    cumulative: Vec<BigInt>,
    total: BigInt,
    rng: ChaCha8Rng,
}

impl<'a> SiteSampler<'a> {
    pub fn new(dist: &'a AttachmentDistribution, seed: u64) -> Result<Self> {
        let denom = dist
            .weights
            .iter()
            .fold(BigInt::one(), |acc, w| acc.lcm(w.denominator()));
        let mut cumulative = Vec::with_capacity(dist.weights.len());
        let mut total = BigInt::zero();
        for w in &dist.weights {
            if w.is_negative() {
                return Err(Error::InvalidWeights(format!("negative weight {w}")));
            }
            total += w.numerator() * (&denom / w.denominator());
            cumulative.push(total.clone());
        }
        if total.is_zero() {
            return Err(Error::InvalidWeights("weights sum to zero".into()));
        }
        Ok(SiteSampler {
            dist,
            cumulative,
            total,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn sample(&mut self) -> &'a AttachmentSite {
        let u = self.rng.gen_bigint_range(&BigInt::zero(), &self.total);
        let k = self.cumulative.partition_point(|c| *c <= u);
        &self.dist.sites[k]
    }
}

/// One draw from `dist`, reproducible for a fixed seed.
pub fn sample_insertion(dist: &AttachmentDistribution, seed: u64) -> Result<AttachmentSite> {
    Ok(SiteSampler::new(dist, seed)?.sample().clone())
}

/// `count` successive draws from one seeded stream.
pub fn sample_insertions(dist: &AttachmentDistribution, seed: u64, count: usize) -> Result<Vec<AttachmentSite>> {
    let mut sampler = SiteSampler::new(dist, seed)?;
    Ok((0..count).map(|_| sampler.sample().clone()).collect())
}
