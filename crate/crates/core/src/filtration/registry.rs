use std::collections::BTreeMap;
use std::sync::Arc;

use super::{dtm_unchecked, rdad_unchecked};
use crate::error::{Error, Result};
use crate::neighbors::{DensityProfile, NeighborIndex};

/// Reusable per-thread buffer for neighbor selection.
#[derive(Debug, Default)]
pub struct Scratch(Vec<(f64, usize)>);

/// A filtration function ready to be evaluated at arbitrary points.
/// Implementations are pure: the value depends only on `x`.
pub trait Filtration: Send + Sync {
    fn name(&self) -> &'static str;

    fn eval_with(&self, x: &[f64], scratch: &mut Scratch) -> f64;

    fn eval(&self, x: &[f64]) -> f64 {
        self.eval_with(x, &mut Scratch::default())
    }
}

/// What a strategy may draw on when it is built.
pub struct FiltrationInputs {
    pub index: Arc<NeighborIndex>,
    pub profile: Option<Arc<DensityProfile>>,
    pub k_dtm: Option<usize>,
}

impl FiltrationInputs {
    fn profile(&self, who: &str) -> Result<Arc<DensityProfile>> {
        let p = self
            .profile
            .clone()
            .ok_or_else(|| Error::InvalidParameter(format!("{who} needs a density profile")))?;
        p.check_matches(&self.index)?;
        Ok(p)
    }

    fn k_dtm(&self, who: &str) -> Result<usize> {
        let k = self
            .k_dtm
            .ok_or_else(|| Error::InvalidParameter(format!("{who} needs k_dtm")))?;
        if k == 0 || k > self.index.len() {
            return Err(Error::RankOutOfRange {
                k,
                n: self.index.len(),
            });
        }
        Ok(k)
    }
}

/// Named constructor for one family of filtration functions.
pub trait FiltrationStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn uses_k_dtm(&self) -> bool;
    fn uses_density(&self) -> bool;
    fn build(&self, inputs: &FiltrationInputs) -> Result<Box<dyn Filtration>>;
}

/// Filtration strategies keyed by name. The default registry holds
/// `distance`, `dtm`, `dad` and `rdad`.
pub struct FiltrationRegistry {
    strategies: BTreeMap<&'static str, Box<dyn FiltrationStrategy>>,
}

impl FiltrationRegistry {
    pub fn empty() -> Self {
        Self {
            strategies: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, strategy: Box<dyn FiltrationStrategy>) {
        self.strategies.insert(strategy.name(), strategy);
    }

    pub fn get(&self, name: &str) -> Result<&dyn FiltrationStrategy> {
        self.strategies
            .get(name)
            .map(|s| s.as_ref())
            .ok_or_else(|| Error::UnknownName {
                what: "filtration",
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.strategies.keys().copied().collect()
    }
}

impl Default for FiltrationRegistry {
    fn default() -> Self {
        let mut reg = Self::empty();
        reg.register(Box::new(DistanceStrategy));
        reg.register(Box::new(DtmStrategy));
        reg.register(Box::new(DadStrategy));
        reg.register(Box::new(RdadStrategy));
        reg
    }
}

/// Distance to the nearest sample point.
pub struct DistanceFunction {
    pub index: Arc<NeighborIndex>,
}

impl Filtration for DistanceFunction {
    fn name(&self) -> &'static str {
        "distance"
    }

    fn eval_with(&self, x: &[f64], scratch: &mut Scratch) -> f64 {
        dtm_unchecked(&self.index, x, 1, &mut scratch.0)
    }
}

pub struct DistanceToMeasure {
    pub index: Arc<NeighborIndex>,
    pub k_dtm: usize,
}

impl Filtration for DistanceToMeasure {
    fn name(&self) -> &'static str {
        "dtm"
    }

    fn eval_with(&self, x: &[f64], scratch: &mut Scratch) -> f64 {
        dtm_unchecked(&self.index, x, self.k_dtm, &mut scratch.0)
    }
}

pub struct DensityAwareDistance {
    pub index: Arc<NeighborIndex>,
    pub profile: Arc<DensityProfile>,
}

impl Filtration for DensityAwareDistance {
    fn name(&self) -> &'static str {
        "dad"
    }

    fn eval_with(&self, x: &[f64], scratch: &mut Scratch) -> f64 {
        rdad_unchecked(&self.index, &self.profile, x, 1, &mut scratch.0)
    }
}

pub struct RobustDensityAwareDistance {
    pub index: Arc<NeighborIndex>,
    pub profile: Arc<DensityProfile>,
    pub k_dtm: usize,
}

impl Filtration for RobustDensityAwareDistance {
    fn name(&self) -> &'static str {
        "rdad"
    }

    fn eval_with(&self, x: &[f64], scratch: &mut Scratch) -> f64 {
        rdad_unchecked(&self.index, &self.profile, x, self.k_dtm, &mut scratch.0)
    }
}

struct DistanceStrategy;
struct DtmStrategy;
struct DadStrategy;
struct RdadStrategy;

impl FiltrationStrategy for DistanceStrategy {
    fn name(&self) -> &'static str {
        "distance"
    }
    fn uses_k_dtm(&self) -> bool {
        false
    }
    fn uses_density(&self) -> bool {
        false
    }
    fn build(&self, inputs: &FiltrationInputs) -> Result<Box<dyn Filtration>> {
        Ok(Box::new(DistanceFunction {
            index: inputs.index.clone(),
        }))
    }
}

impl FiltrationStrategy for DtmStrategy {
    fn name(&self) -> &'static str {
        "dtm"
    }
    fn uses_k_dtm(&self) -> bool {
        true
    }
    fn uses_density(&self) -> bool {
        false
    }
    fn build(&self, inputs: &FiltrationInputs) -> Result<Box<dyn Filtration>> {
        Ok(Box::new(DistanceToMeasure {
            index: inputs.index.clone(),
            k_dtm: inputs.k_dtm("dtm")?,
        }))
    }
}

impl FiltrationStrategy for DadStrategy {
    fn name(&self) -> &'static str {
        "dad"
    }
    fn uses_k_dtm(&self) -> bool {
        false
    }
    fn uses_density(&self) -> bool {
        true
    }
    fn build(&self, inputs: &FiltrationInputs) -> Result<Box<dyn Filtration>> {
        Ok(Box::new(DensityAwareDistance {
            index: inputs.index.clone(),
            profile: inputs.profile("dad")?,
        }))
    }
}

impl FiltrationStrategy for RdadStrategy {
    fn name(&self) -> &'static str {
        "rdad"
    }
    fn uses_k_dtm(&self) -> bool {
        true
    }
    fn uses_density(&self) -> bool {
        true
    }
    fn build(&self, inputs: &FiltrationInputs) -> Result<Box<dyn Filtration>> {
        Ok(Box::new(RobustDensityAwareDistance {
            index: inputs.index.clone(),
            profile: inputs.profile("rdad")?,
            k_dtm: inputs.k_dtm("rdad")?,
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neighbors::{density_profile, PointCloud};

    #[test]
    fn default_names() {
        let reg = FiltrationRegistry::default();
        assert_eq!(reg.names(), vec!["dad", "distance", "dtm", "rdad"]);
        let err = reg.get("kde").err().unwrap().to_string();
        assert!(err.contains("distance"), "{err}");
    }

    #[test]
    fn strategies_report_their_names() {
        let index = Arc::new(NeighborIndex::new(
            PointCloud::new(1, vec![0.0, 1.0, 2.0, 10.0]).unwrap(),
        ));
        let profile = Arc::new(density_profile(&index, 2).unwrap());
        let inputs = FiltrationInputs {
            index,
            profile: Some(profile),
            k_dtm: Some(2),
        };
        let reg = FiltrationRegistry::default();
        for name in reg.names() {
            let f = reg.get(name).unwrap().build(&inputs).unwrap();
            assert_eq!(f.name(), name);
            assert!(f.eval(&[0.5]) >= 0.0);
        }
    }

    #[test]
    fn density_strategies_need_a_profile() {
        let index = Arc::new(NeighborIndex::new(
            PointCloud::new(1, vec![0.0, 1.0]).unwrap(),
        ));
        let inputs = FiltrationInputs {
            index,
            profile: None,
            k_dtm: Some(1),
        };
        let reg = FiltrationRegistry::default();
        assert!(reg.get("dad").unwrap().build(&inputs).is_err());
        assert!(reg.get("dtm").unwrap().build(&inputs).is_ok());
    }
}
