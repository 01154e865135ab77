use std::sync::Arc;

use crate::cubical::{
    build_complex, EngineRegistry, PersistenceDiagram, PersistenceEngine, UnionFindEngine,
    DEFAULT_PRIME,
};
use crate::error::{Error, Result};
use crate::filtration::{
    build_field_with, FiltrationRegistry, FiltrationSpec, GridSpec, ScalarField,
};
use crate::neighbors::PointCloud;

/// Points to diagram on one fixed grid. Bootstrap replicates share the
/// pipeline, hence its grid.
#[derive(Clone)]
pub struct Pipeline {
    spec: FiltrationSpec,
    grid: GridSpec,
    engine: Arc<dyn PersistenceEngine>,
    filtrations: Arc<FiltrationRegistry>,
}

impl Pipeline {
    /// Default filtrations and the union-find engine over `Z/11Z`.
    pub fn new(spec: FiltrationSpec, grid: GridSpec) -> Self {
        let engine = UnionFindEngine::new(DEFAULT_PRIME).expect("default prime");
        Self::with_engine(spec, grid, Arc::new(engine))
    }

    pub fn with_engine(
        spec: FiltrationSpec,
        grid: GridSpec,
        engine: Arc<dyn PersistenceEngine>,
    ) -> Self {
        Self {
            spec,
            grid,
            engine,
            filtrations: Arc::new(FiltrationRegistry::default()),
        }
    }

    /// Engine looked up by name in the default registry.
    pub fn with_named_engine(
        spec: FiltrationSpec,
        grid: GridSpec,
        engine: &str,
        prime: u32,
    ) -> Result<Self> {
        let engine = EngineRegistry::default().build(engine, prime)?;
        Ok(Self::with_engine(spec, grid, Arc::from(engine)))
    }

    pub fn with_filtrations(mut self, registry: Arc<FiltrationRegistry>) -> Self {
        self.filtrations = registry;
        self
    }

    pub fn spec(&self) -> &FiltrationSpec {
        &self.spec
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn engine(&self) -> &dyn PersistenceEngine {
        self.engine.as_ref()
    }

    pub fn field(&self, cloud: &PointCloud, parallel: bool) -> Result<ScalarField> {
        build_field_with(&self.filtrations, cloud, &self.spec, &self.grid, parallel)
    }

    pub fn diagram(&self, cloud: &PointCloud, parallel: bool) -> Result<PersistenceDiagram> {
        let field = self.field(cloud, parallel)?;
        self.diagram_of(&field)
    }

    pub fn diagram_of(&self, field: &ScalarField) -> Result<PersistenceDiagram> {
        if field.grid() != &self.grid {
            return Err(Error::InvalidParameter(
                "field grid differs from the pipeline grid".into(),
            ));
        }
        Ok(self.engine.diagram(&build_complex(field)?))
    }
}
