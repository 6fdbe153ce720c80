use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::system::GroupElement;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regularity {
    Continuous,
    L1,
    Stepwise,
}

type Evaluator<P> = dyn Fn(&GroupElement) -> Result<P> + Send + Sync;

/// A map `A: G → M`, evaluated lazily along orbits.
pub struct OrbitFunction<P> {
    eval: Arc<Evaluator<P>>,
    regularity: Regularity,
}

impl<P> Clone for OrbitFunction<P> {
    fn clone(&self) -> Self {
        Self { eval: Arc::clone(&self.eval), regularity: self.regularity }
    }
}

impl<P> fmt::Debug for OrbitFunction<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OrbitFunction").field("regularity", &self.regularity).finish_non_exhaustive()
    }
}

impl<P> OrbitFunction<P> {
    pub fn new(regularity: Regularity, f: impl Fn(&GroupElement) -> Result<P> + Send + Sync + 'static) -> Self {
        Self { eval: Arc::new(f), regularity }
    }

    pub fn evaluate(&self, g: &GroupElement) -> Result<P> {
        (self.eval)(g)
    }

    pub fn regularity(&self) -> Regularity {
        self.regularity
    }
}
