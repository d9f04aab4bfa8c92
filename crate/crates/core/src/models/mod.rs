//! Runtime regression models behind one fit/predict contract.
//!
//! Four models ship with the library:
//!
//! * [`ModelId::Gbm`]: gradient-boosted regression trees over all encoded
//!   features.
//! * [`ModelId::Bom`]: an optimistic decomposition with a linear
//!   input-behavior model and a cubic-polynomial scale-out model.
//! * [`ModelId::Ogb`]: the same decomposition with gradient boosting for
//!   both submodels.
//! * [`ModelId::Ernest`]: a parametric baseline fitting a fixed feature map
//!   of problem size and scale-out with non-negative least squares.
//!
//! Additional models plug in through [`ModelFactory`] and register in a
//! [`ModelCatalog`] under a custom id. Every fitted model remembers the
//! fingerprint of the encoding it was trained with and rejects rows encoded
//! differently.

mod ernest;
mod gbm;
mod linear;
mod optimistic;
mod tree;

pub use ernest::{fit_ernest, ErnestModel};
pub use gbm::{fit_gbm, GbmModel, GbmParams};
pub use linear::{fit_linear, LinearModel};
pub use optimistic::{fit_optimistic, fit_poly3_ssm, IbmKind, OptimisticModel, SsmCurve, SsmKind};

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::dataset::{EncodedRow, FeatureMatrix};

/// Predictions never fall below this floor (one millisecond).
pub const MIN_PREDICTION_MS: f64 = 1.0;

/// Identifies a model implementation.
///
/// The declaration order of the built-in ids is also their tie-break order
/// during model selection.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModelId {
    Gbm,
    Bom,
    Ogb,
    Ernest,
    Custom(String),
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelId::Gbm => write!(f, "gbm"),
            ModelId::Bom => write!(f, "bom"),
            ModelId::Ogb => write!(f, "ogb"),
            ModelId::Ernest => write!(f, "ernest"),
            ModelId::Custom(name) => write!(f, "{name}"),
        }
    }
}

impl FromStr for ModelId {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, ModelError> {
        if s.is_empty() {
            return Err(ModelError::UnknownModel { id: s.to_string() });
        }
        Ok(match s {
            "gbm" => ModelId::Gbm,
            "bom" => ModelId::Bom,
            "ogb" => ModelId::Ogb,
            "ernest" => ModelId::Ernest,
            other => ModelId::Custom(other.to_string()),
        })
    }
}

/// Errors from fitting or applying models.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("cannot fit a model on an empty training set")]
    EmptyTrainingSet,
    #[error("no group of records shares its context across two or more scale-outs")]
    InsufficientScaleOutVariation,
    #[error("row was encoded under a different schema than the model was trained with")]
    SchemaFingerprintMismatch,
    #[error("the schema declares no leading numeric problem-size feature")]
    MissingSizeFeature,
    #[error("model id {id:?} is unknown or empty")]
    UnknownModel { id: String },
    #[error("a factory for model id {id} is already registered")]
    DuplicateModelId { id: ModelId },
}

/// The prediction half of the model contract.
///
/// Implementations are immutable after fitting and safe to share across
/// threads; `predict_row` returns the raw regression value without the
/// runtime floor.
pub trait Regressor: Send + Sync {
    fn predict_row(&self, row: &[f64]) -> f64;
}

/// A fitted model bound to the encoding it was trained with.
pub struct FittedModel {
    id: ModelId,
    fingerprint: u64,
    inner: Box<dyn Regressor>,
}

impl FittedModel {
    pub fn from_parts(id: ModelId, fingerprint: u64, inner: Box<dyn Regressor>) -> Self {
        FittedModel { id, fingerprint, inner }
    }

    pub fn id(&self) -> &ModelId {
        &self.id
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// Predicts the gross runtime in milliseconds for an encoded row.
    ///
    /// The result is finite and at least [`MIN_PREDICTION_MS`]. Rows from a
    /// different encoder are rejected.
    pub fn predict(&self, row: &EncodedRow) -> Result<f64, ModelError> {
        if row.fingerprint != self.fingerprint {
            return Err(ModelError::SchemaFingerprintMismatch);
        }
        Ok(self.inner.predict_row(&row.values).max(MIN_PREDICTION_MS))
    }

    /// The same fitted model reported under a different id.
    pub fn with_id(mut self, id: ModelId) -> FittedModel {
        self.id = id;
        self
    }
}

impl fmt::Debug for FittedModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FittedModel")
            .field("id", &self.id)
            .field("fingerprint", &self.fingerprint)
            .finish_non_exhaustive()
    }
}

/// Builds fitted models from encoded training data.
pub trait ModelFactory: Send + Sync {
    fn id(&self) -> ModelId;
    fn fit(&self, x: &FeatureMatrix, y: &[f64]) -> Result<FittedModel, ModelError>;
}

/// The registry of available model factories.
///
/// Factories keep their registration order: the built-ins first, custom
/// registrations after, which is also the candidate order used for
/// tie-breaking in model selection.
pub struct ModelCatalog {
    factories: Vec<Box<dyn ModelFactory>>,
}

impl ModelCatalog {
    /// A catalog holding the four built-in models with default parameters.
    pub fn with_defaults() -> Self {
        ModelCatalog {
            factories: vec![
                Box::new(GbmFactory::default()),
                Box::new(BomFactory),
                Box::new(OgbFactory::default()),
                Box::new(ErnestFactory),
            ],
        }
    }

    /// An empty catalog, for fully custom setups.
    pub fn empty() -> Self {
        ModelCatalog { factories: Vec::new() }
    }

    /// Registers an additional factory. Ids must be unique.
    pub fn register(&mut self, factory: Box<dyn ModelFactory>) -> Result<(), ModelError> {
        let id = factory.id();
        if self.get(&id).is_some() {
            return Err(ModelError::DuplicateModelId { id });
        }
        self.factories.push(factory);
        Ok(())
    }

    pub fn get(&self, id: &ModelId) -> Option<&dyn ModelFactory> {
        self.factories.iter().find(|f| f.id() == *id).map(AsRef::as_ref)
    }

    /// All registered ids, in registration order.
    pub fn ids(&self) -> Vec<ModelId> {
        self.factories.iter().map(|f| f.id()).collect()
    }
}

impl Default for ModelCatalog {
    fn default() -> Self {
        ModelCatalog::with_defaults()
    }
}

impl fmt::Debug for ModelCatalog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModelCatalog").field("ids", &self.ids()).finish()
    }
}

/// Predicts a constant, used as the degraded fallback when a fit fails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantModel {
    pub value: f64,
}

impl Regressor for ConstantModel {
    fn predict_row(&self, _row: &[f64]) -> f64 {
        self.value
    }
}

/// Gradient boosting over all encoded features.
#[derive(Debug, Default, Clone)]
pub struct GbmFactory {
    pub params: GbmParams,
}

impl ModelFactory for GbmFactory {
    fn id(&self) -> ModelId {
        ModelId::Gbm
    }

    fn fit(&self, x: &FeatureMatrix, y: &[f64]) -> Result<FittedModel, ModelError> {
        let model = fit_gbm(x, y, &self.params)?;
        Ok(FittedModel::from_parts(self.id(), x.fingerprint(), Box::new(model)))
    }
}

/// Optimistic decomposition: linear inputs model, cubic scale-out model.
#[derive(Debug, Clone, Copy, Default)]
pub struct BomFactory;

impl ModelFactory for BomFactory {
    fn id(&self) -> ModelId {
        ModelId::Bom
    }

    fn fit(&self, x: &FeatureMatrix, y: &[f64]) -> Result<FittedModel, ModelError> {
        let model = fit_optimistic(x, y, IbmKind::Linear, SsmKind::Poly3)?;
        Ok(FittedModel::from_parts(self.id(), x.fingerprint(), Box::new(model)))
    }
}

/// Optimistic decomposition with gradient boosting for both submodels.
#[derive(Debug, Default, Clone)]
pub struct OgbFactory {
    pub params: GbmParams,
}

impl ModelFactory for OgbFactory {
    fn id(&self) -> ModelId {
        ModelId::Ogb
    }

    fn fit(&self, x: &FeatureMatrix, y: &[f64]) -> Result<FittedModel, ModelError> {
        let model = fit_optimistic(x, y, IbmKind::Gbm(self.params.clone()), SsmKind::Gbm(self.params.clone()))?;
        Ok(FittedModel::from_parts(self.id(), x.fingerprint(), Box::new(model)))
    }
}

/// Registers an existing factory under a new id.
///
/// This is how parameter variants of the built-in families join the
/// catalog: the same fitting code, a distinct name in reports.
pub struct AliasFactory {
    id: ModelId,
    inner: Box<dyn ModelFactory>,
}

impl AliasFactory {
    pub fn new(id: ModelId, inner: Box<dyn ModelFactory>) -> Self {
        AliasFactory { id, inner }
    }
}

impl std::fmt::Debug for AliasFactory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AliasFactory")
            .field("id", &self.id)
            .field("inner", &self.inner.id())
            .finish()
    }
}

impl ModelFactory for AliasFactory {
    fn id(&self) -> ModelId {
        self.id.clone()
    }

    fn fit(&self, x: &FeatureMatrix, y: &[f64]) -> Result<FittedModel, ModelError> {
        Ok(self.inner.fit(x, y)?.with_id(self.id.clone()))
    }
}

/// The parametric scale-out baseline.
#[derive(Debug, Clone, Copy, Default)]
pub struct ErnestFactory;

impl ModelFactory for ErnestFactory {
    fn id(&self) -> ModelId {
        ModelId::Ernest
    }

    fn fit(&self, x: &FeatureMatrix, y: &[f64]) -> Result<FittedModel, ModelError> {
        let model = fit_ernest(x, y)?;
        Ok(FittedModel::from_parts(self.id(), x.fingerprint(), Box::new(model)))
    }
}
