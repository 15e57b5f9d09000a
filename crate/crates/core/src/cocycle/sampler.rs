//! Reference measures for orbit starting points, selected by name.

use rand::Rng;

use crate::base::{FiberCoord, SkewPoint};
use crate::error::{LabError, Result};
use crate::seeding;

/// Points that can be drawn uniformly or on a stratified grid.
pub trait SamplePoint: Clone + Send + Sync + 'static {
    fn uniform(rng: &mut impl Rng) -> Self;

    /// Cell `index` of a stratified grid with `total` cells, jittered by `u`.
    fn grid(index: usize, total: usize, jitter: [f64; 3]) -> Self;
}

impl SamplePoint for SkewPoint {
    fn uniform(rng: &mut impl Rng) -> Self {
        SkewPoint::new(rng.random(), rng.random(), rng.random())
    }

    fn grid(index: usize, total: usize, jitter: [f64; 3]) -> Self {
        let side = (total as f64).cbrt().ceil().max(1.0) as usize;
        let (i, j, k) = (index % side, (index / side) % side, (index / side / side) % side);
        let c = |n: usize, u: f64| (n as f64 + u) / side as f64;
        SkewPoint::new(c(i, jitter[0]), c(j, jitter[1]), c(k, jitter[2]))
    }
}

impl SamplePoint for FiberCoord {
    fn uniform(rng: &mut impl Rng) -> Self {
        FiberCoord::new(rng.random())
    }

    fn grid(index: usize, total: usize, jitter: [f64; 3]) -> Self {
        FiberCoord::new((index as f64 + jitter[0]) / total.max(1) as f64)
    }
}

/// Draws the starting point of orbit `index` out of `total`.
pub trait MeasureSampler<P>: Send + Sync {
    fn name(&self) -> &'static str;

    fn sample(&self, index: usize, total: usize, seed: u64) -> P;
}

/// I.i.d. Lebesgue (volume) samples.
#[derive(Debug, Clone, Copy, Default)]
pub struct LebesgueSampler;

impl<P: SamplePoint> MeasureSampler<P> for LebesgueSampler {
    fn name(&self) -> &'static str {
        "lebesgue"
    }

    fn sample(&self, index: usize, _total: usize, seed: u64) -> P {
        P::uniform(&mut seeding::rng(seeding::derive(seed, index as u64)))
    }
}

/// Stratified fiber × base grid with one seeded jitter shared by all cells.
#[derive(Debug, Clone, Copy, Default)]
pub struct GridSampler;

impl<P: SamplePoint> MeasureSampler<P> for GridSampler {
    fn name(&self) -> &'static str {
        "grid"
    }

    fn sample(&self, index: usize, total: usize, seed: u64) -> P {
        let mut rng = seeding::rng(seeding::derive(seed, u64::MAX));
        P::grid(index, total, [rng.random(), rng.random(), rng.random()])
    }
}

/// Every registered sampler.
pub fn sampler_registry<P: SamplePoint>() -> Vec<Box<dyn MeasureSampler<P>>> {
    vec![Box::new(LebesgueSampler), Box::new(GridSampler)]
}

pub fn sampler_by_name<P: SamplePoint>(name: &str) -> Result<Box<dyn MeasureSampler<P>>> {
    let registry = sampler_registry::<P>();
    let available: Vec<String> = registry.iter().map(|s| s.name().to_string()).collect();
    registry
        .into_iter()
        .find(|s| s.name() == name)
        .ok_or(LabError::UnknownStrategy {
            name: name.to_string(),
            available: available.join(", "),
        })
}
