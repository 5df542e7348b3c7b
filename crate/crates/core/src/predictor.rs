//! A common trial protocol for all learners.

use crate::qbayes::QBayes;
use crate::scs::ScsEngine;
use crate::sgp::Sgp;
use crate::spine::Spine;
use crate::Result;

/// An online binary classifier over indices `0..n`. Every trial is one
/// `predict` followed by one `update` with the true label.
pub trait OnlinePredictor {
    fn predict(&mut self, index: usize) -> Result<i8>;

    /// Reveals the label of the last prediction; returns whether it was a
    /// mistake.
    fn update(&mut self, label: i8) -> Result<bool>;

    fn mistakes(&self) -> u64;

    fn step(&mut self, index: usize, label: i8) -> Result<(i8, bool)> {
        let p = self.predict(index)?;
        Ok((p, self.update(label)?))
    }
}

impl OnlinePredictor for ScsEngine {
    fn predict(&mut self, index: usize) -> Result<i8> {
        Ok(ScsEngine::predict(self, index)?)
    }

    fn update(&mut self, label: i8) -> Result<bool> {
        Ok(ScsEngine::update(self, label)?.mistake)
    }

    fn mistakes(&self) -> u64 {
        ScsEngine::mistakes(self)
    }
}

impl OnlinePredictor for QBayes {
    fn predict(&mut self, index: usize) -> Result<i8> {
        Ok(QBayes::predict(self, index)?.0)
    }

    fn update(&mut self, label: i8) -> Result<bool> {
        Ok(QBayes::update(self, label)?)
    }

    fn mistakes(&self) -> u64 {
        QBayes::mistakes(self)
    }
}

impl OnlinePredictor for Sgp {
    fn predict(&mut self, index: usize) -> Result<i8> {
        Ok(Sgp::predict(self, index)?)
    }

    fn update(&mut self, label: i8) -> Result<bool> {
        Ok(Sgp::update(self, label)?)
    }

    fn mistakes(&self) -> u64 {
        Sgp::mistakes(self)
    }
}

/// Runs a position-indexed learner on graph vertices by translating each
/// vertex to its spine position.
#[derive(Debug, Clone)]
pub struct OnSpine<P> {
    spine: Spine,
    inner: P,
}

impl<P> OnSpine<P> {
    pub fn new(spine: Spine, inner: P) -> Self {
        OnSpine { spine, inner }
    }

    pub fn spine(&self) -> &Spine {
        &self.spine
    }

    pub fn inner(&self) -> &P {
        &self.inner
    }

    pub fn inner_mut(&mut self) -> &mut P {
        &mut self.inner
    }
}

impl<P: OnlinePredictor> OnlinePredictor for OnSpine<P> {
    fn predict(&mut self, vertex: usize) -> Result<i8> {
        let position = if vertex < self.spine.len() { self.spine.position_of(vertex) } else { vertex };
        self.inner.predict(position)
    }

    fn update(&mut self, label: i8) -> Result<bool> {
        self.inner.update(label)
    }

    fn mistakes(&self) -> u64 {
        self.inner.mistakes()
    }
}

impl<P: OnlinePredictor + ?Sized> OnlinePredictor for Box<P> {
    fn predict(&mut self, index: usize) -> Result<i8> {
        (**self).predict(index)
    }

    fn update(&mut self, label: i8) -> Result<bool> {
        (**self).update(label)
    }

    fn mistakes(&self) -> u64 {
        (**self).mistakes()
    }
}
