//! Switching cluster specialists with delayed fixed-share updates.
//!
//! Every specialist `ε` keeps a stored weight `ω̂_ε` and the mistake count
//! `p_ε` at which it was last synchronised. When it next wakes up, the fixed
//! share updates it missed are applied in one step:
//!
//! ```text
//! ω = d ω̂ + (1 - d) / |E|,   d = (1 - α)^(m - p_ε)
//! ```
//!
//! [`EagerScs`] applies the share to every specialist on every mistake and is
//! kept as an equivalence oracle. Both engines draw `(1 - α)^k` from the same
//! sequentially multiplied table and sum active weights in index order, so
//! their predictions agree bit for bit.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::bases::{Basis, BasisError, BasisKind};

/// Largest `n` for which the full basis is built without opting in.
pub const QUADRATIC_MEMORY_LIMIT: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScsError {
    #[error("full basis with n = {n} needs about {megabytes} MB; pass allow_quadratic to proceed")]
    QuadraticMemory { n: usize, megabytes: usize },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("no correct active weight at position {position} after mistake {mistakes}")]
    ZeroCorrectMass { position: usize, mistakes: u64 },
    #[error("update called without a preceding predict")]
    Protocol,
    #[error(transparent)]
    Basis(#[from] BasisError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaMode {
    Fixed(f64),
    /// `α = 1 / (m + 1)` where `m` is the current mistake count.
    TimeVarying,
}

impl AlphaMode {
    fn validate(self) -> Result<Self, ScsError> {
        if let AlphaMode::Fixed(a) = self {
            if !(0.0..=1.0).contains(&a) {
                return Err(ScsError::Parameter(format!("alpha must lie in [0, 1], got {a}")));
            }
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub prediction: i8,
    pub mistake: bool,
    pub active: usize,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ScsOptions {
    pub allow_quadratic: bool,
}

#[inline]
fn shared_weight(hat: f64, decay: f64, inv_size: f64) -> f64 {
    decay * hat + (1.0 - decay) * inv_size
}

#[inline]
fn rescaled_weight(w: f64, active_mass: f64, correct_mass: f64) -> f64 {
    w * active_mass / correct_mass
}

#[inline]
fn sign(x: f64) -> i8 {
    if x < 0.0 {
        -1
    } else {
        1
    }
}

fn label_of(index: usize) -> i8 {
    if index % 2 == 1 {
        1
    } else {
        -1
    }
}

/// `(1 - α)^k` for `k = 0, 1, ...`, each entry the previous times `1 - α`.
#[derive(Debug, Clone)]
struct DecayTable {
    factor: f64,
    powers: Vec<f64>,
}

impl DecayTable {
    fn new(alpha: f64) -> Self {
        DecayTable { factor: 1.0 - alpha, powers: vec![1.0] }
    }

    fn get(&mut self, k: usize) -> f64 {
        while self.powers.len() <= k {
            let last = *self.powers.last().unwrap();
            self.powers.push(last * self.factor);
        }
        self.powers[k]
    }
}

fn check_memory(basis: &Basis, options: ScsOptions) -> Result<(), ScsError> {
    if basis.kind() == BasisKind::Full && basis.n() > QUADRATIC_MEMORY_LIMIT && !options.allow_quadratic {
        let megabytes = basis.size() * 12 / (1 << 20);
        return Err(ScsError::QuadraticMemory { n: basis.n(), megabytes });
    }
    Ok(())
}

#[derive(Debug, Clone)]
struct Pending {
    position: usize,
    prediction: i8,
    started: Instant,
}

/// The delayed-update engine. Each trial is `predict(position)` followed by
/// `update(label)`.
#[derive(Debug, Clone)]
pub struct ScsEngine {
    basis: Basis,
    alpha: AlphaMode,
    hat: Vec<f64>,
    synced: Vec<u32>,
    mistakes: u32,
    inv_size: f64,
    decay: DecayTable,
    active: Vec<(usize, f64)>,
    pending: Option<Pending>,
}

impl ScsEngine {
    pub fn new(basis: Basis, alpha: AlphaMode) -> Result<Self, ScsError> {
        Self::with_options(basis, alpha, ScsOptions::default())
    }

    pub fn with_options(basis: Basis, alpha: AlphaMode, options: ScsOptions) -> Result<Self, ScsError> {
        let alpha = alpha.validate()?;
        check_memory(&basis, options)?;
        let size = basis.size();
        let fixed = match alpha {
            AlphaMode::Fixed(a) => a,
            AlphaMode::TimeVarying => 0.0,
        };
        Ok(ScsEngine {
            basis,
            alpha,
            hat: vec![1.0 / size as f64; size],
            synced: vec![0; size],
            mistakes: 0,
            inv_size: 1.0 / size as f64,
            decay: DecayTable::new(fixed),
            active: Vec::new(),
            pending: None,
        })
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn mistakes(&self) -> u64 {
        self.mistakes as u64
    }

    /// Current switching rate (`1 / (m + 1)` in time-varying mode).
    pub fn alpha(&self) -> f64 {
        match self.alpha {
            AlphaMode::Fixed(a) => a,
            AlphaMode::TimeVarying => 1.0 / (self.mistakes as f64 + 1.0),
        }
    }

    fn decay_for(&mut self, gap: u32) -> f64 {
        match self.alpha {
            AlphaMode::Fixed(_) => self.decay.get(gap as usize),
            AlphaMode::TimeVarying => (1.0 - self.alpha()).powi(gap as i32),
        }
    }

    /// Stored (not yet shared) weights, indexed by the basis bijection.
    pub fn stored_weights(&self) -> &[f64] {
        &self.hat
    }

    /// Current weight of specialist `index`, with pending shares applied.
    pub fn weight(&mut self, index: usize) -> f64 {
        let d = self.decay_for(self.mistakes - self.synced[index]);
        shared_weight(self.hat[index], d, self.inv_size)
    }

    /// Sum of current weights over the whole basis (1 up to rounding).
    pub fn total_weight(&mut self) -> f64 {
        (0..self.hat.len()).map(|i| self.weight(i)).sum()
    }

    pub fn predict(&mut self, position: usize) -> Result<i8, ScsError> {
        let started = Instant::now();
        let mut active = std::mem::take(&mut self.active);
        active.clear();
        let mut margin = 0.0;
        for index in self.basis.active_indices(position)? {
            let w = self.weight(index);
            margin += w * label_of(index) as f64;
            active.push((index, w));
        }
        self.active = active;
        let prediction = sign(margin);
        self.pending = Some(Pending { position, prediction, started });
        Ok(prediction)
    }

    pub fn update(&mut self, label: i8) -> Result<TrialOutcome, ScsError> {
        if label != 1 && label != -1 {
            return Err(ScsError::Parameter(format!("label must be -1 or +1, got {label}")));
        }
        let pending = self.pending.take().ok_or(ScsError::Protocol)?;
        let mistake = pending.prediction != label;
        if mistake {
            let mut active_mass = 0.0;
            let mut correct_mass = 0.0;
            for &(index, w) in &self.active {
                active_mass += w;
                if label_of(index) == label {
                    correct_mass += w;
                }
            }
            if correct_mass <= 0.0 {
                return Err(ScsError::ZeroCorrectMass { position: pending.position, mistakes: self.mistakes as u64 });
            }
            for &(index, w) in &self.active {
                self.hat[index] = if label_of(index) == label { rescaled_weight(w, active_mass, correct_mass) } else { 0.0 };
                self.synced[index] = self.mistakes;
            }
            self.mistakes = self
                .mistakes
                .checked_add(1)
                .ok_or_else(|| ScsError::Parameter("mistake counter overflow".into()))?;
        }
        Ok(TrialOutcome { prediction: pending.prediction, mistake, active: self.active.len(), elapsed: pending.started.elapsed() })
    }

    pub fn step(&mut self, position: usize, label: i8) -> Result<TrialOutcome, ScsError> {
        self.predict(position)?;
        self.update(label)
    }
}

/// Reference engine that applies the fixed-share update to every specialist
/// on every mistake. Each weight is held as `d ω̂ + (1 - d) / |E|` with the
/// factor `d` multiplied by `1 - α` eagerly.
#[derive(Debug, Clone)]
pub struct EagerScs {
    basis: Basis,
    factor: f64,
    hat: Vec<f64>,
    decay: Vec<f64>,
    inv_size: f64,
    mistakes: u64,
}

impl EagerScs {
    pub fn new(basis: Basis, alpha: f64) -> Result<Self, ScsError> {
        AlphaMode::Fixed(alpha).validate()?;
        check_memory(&basis, ScsOptions::default())?;
        let size = basis.size();
        Ok(EagerScs {
            basis,
            factor: 1.0 - alpha,
            hat: vec![1.0 / size as f64; size],
            decay: vec![1.0; size],
            inv_size: 1.0 / size as f64,
            mistakes: 0,
        })
    }

    pub fn mistakes(&self) -> u64 {
        self.mistakes
    }

    pub fn weight(&self, index: usize) -> f64 {
        shared_weight(self.hat[index], self.decay[index], self.inv_size)
    }

    /// One full trial; returns the prediction.
    pub fn step(&mut self, position: usize, label: i8) -> Result<i8, ScsError> {
        self.basis.check_position(position)?;
        let awake: Vec<usize> = (0..self.hat.len())
            .filter(|&i| self.basis.specialist(i).map(|s| s.is_awake(position)).unwrap_or(false))
            .collect();
        let weights: Vec<f64> = awake.iter().map(|&i| self.weight(i)).collect();
        let mut margin = 0.0;
        for (&i, &w) in awake.iter().zip(&weights) {
            margin += w * label_of(i) as f64;
        }
        let prediction = sign(margin);
        if prediction != label {
            let mut active_mass = 0.0;
            let mut correct_mass = 0.0;
            for (&i, &w) in awake.iter().zip(&weights) {
                active_mass += w;
                if label_of(i) == label {
                    correct_mass += w;
                }
            }
            if correct_mass <= 0.0 {
                return Err(ScsError::ZeroCorrectMass { position, mistakes: self.mistakes });
            }
            for (&i, &w) in awake.iter().zip(&weights) {
                self.hat[i] = if label_of(i) == label { rescaled_weight(w, active_mass, correct_mass) } else { 0.0 };
                self.decay[i] = 1.0;
            }
            for d in &mut self.decay {
                *d *= self.factor;
            }
            self.mistakes += 1;
        }
        Ok(prediction)
    }
}

/// Prediction sequence of the eager engine on `(position, label)` trials.
pub fn scs_eager_reference(basis: Basis, alpha: f64, stream: &[(usize, i8)]) -> Result<Vec<i8>, ScsError> {
    let mut engine = EagerScs::new(basis, alpha)?;
    stream.iter().map(|&(v, y)| engine.step(v, y)).collect()
}

/// Prediction sequence of the delayed engine on `(position, label)` trials.
pub fn scs_predictions(basis: Basis, alpha: AlphaMode, stream: &[(usize, i8)]) -> Result<Vec<i8>, ScsError> {
    let mut engine = ScsEngine::new(basis, alpha)?;
    stream.iter().map(|&(v, y)| engine.step(v, y).map(|o| o.prediction)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use rand::Rng;

    fn basis(kind: BasisKind, n: usize) -> Basis {
        Basis::new(kind, n).unwrap()
    }

    #[test]
    fn fresh_weights_are_uniform() {
        for kind in [BasisKind::Full, BasisKind::BinaryTree] {
            let mut e = ScsEngine::new(basis(kind, 2), AlphaMode::Fixed(0.1)).unwrap();
            assert_eq!(e.stored_weights(), &[1.0 / 6.0; 6]);
            assert!((e.total_weight() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fresh_prediction_is_plus() {
        let mut e = ScsEngine::new(basis(BasisKind::BinaryTree, 8), AlphaMode::Fixed(0.2)).unwrap();
        assert_eq!(e.predict(5).unwrap(), 1);
    }

    #[test]
    fn delayed_share_arithmetic() {
        assert!((shared_weight(0.0, 0.5, 1.0 / 20.0) - 0.025).abs() < 1e-15);
        assert_eq!(shared_weight(0.37, 1.0, 0.1), 0.37);
    }

    #[test]
    fn loss_update_preserves_active_mass() {
        assert!((rescaled_weight(0.3, 0.4, 0.3) - 0.4).abs() < 1e-15);
        let mut e = ScsEngine::new(basis(BasisKind::BinaryTree, 8), AlphaMode::Fixed(0.0)).unwrap();
        let before: f64 = e.basis().active_indices(3).unwrap().map(|i| e.stored_weights()[i]).sum();
        e.predict(3).unwrap();
        assert!(e.update(-1).unwrap().mistake);
        let after: f64 = e.basis().active_indices(3).unwrap().map(|i| e.stored_weights()[i]).sum();
        assert!((before - after).abs() < 1e-15);
    }

    #[test]
    fn correct_trial_leaves_state_unchanged() {
        let mut e = ScsEngine::new(basis(BasisKind::Full, 6), AlphaMode::Fixed(0.3)).unwrap();
        e.step(2, -1).unwrap();
        let hat = e.stored_weights().to_vec();
        let synced = e.synced.clone();
        let p = e.predict(4).unwrap();
        assert!(!e.update(p).unwrap().mistake);
        assert_eq!(e.stored_weights(), &hat[..]);
        assert_eq!(e.synced, synced);
    }

    #[test]
    fn time_varying_alpha_halves_after_first_mistake() {
        let mut e = ScsEngine::new(basis(BasisKind::BinaryTree, 4), AlphaMode::TimeVarying).unwrap();
        assert_eq!(e.alpha(), 1.0);
        e.step(0, -1).unwrap();
        assert_eq!(e.alpha(), 0.5);
    }

    #[test]
    fn update_requires_predict() {
        let mut e = ScsEngine::new(basis(BasisKind::Full, 3), AlphaMode::Fixed(0.1)).unwrap();
        assert_eq!(e.update(1), Err(ScsError::Protocol));
        assert!(matches!(ScsEngine::new(basis(BasisKind::Full, 3), AlphaMode::Fixed(1.5)), Err(ScsError::Parameter(_))));
    }

    #[test]
    fn full_basis_is_gated() {
        let big = basis(BasisKind::Full, QUADRATIC_MEMORY_LIMIT + 1);
        assert!(matches!(ScsEngine::new(big, AlphaMode::Fixed(0.1)), Err(ScsError::QuadraticMemory { .. })));
    }

    #[test]
    fn weights_stay_above_share_floor() {
        let alpha = 0.2;
        let mut e = ScsEngine::new(basis(BasisKind::BinaryTree, 16), AlphaMode::Fixed(alpha)).unwrap();
        let mut rng = rng_from_seed(5);
        for _ in 0..300 {
            let v = rng.random_range(0..16);
            let y = if rng.random_bool(0.5) { 1 } else { -1 };
            e.step(v, y).unwrap();
        }
        let size = e.basis().size() as f64;
        for i in 0..e.hat.len() {
            if e.synced[i] < e.mistakes {
                assert!(e.weight(i) >= alpha / size * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn delayed_matches_eager_small() {
        let mut rng = rng_from_seed(9);
        for kind in [BasisKind::Full, BasisKind::BinaryTree] {
            for alpha in [0.0, 0.1, 0.5] {
                let n = 8;
                let stream: Vec<(usize, i8)> = (0..200)
                    .map(|t| {
                        let v = rng.random_range(0..n);
                        let y = if (v < 4) ^ (t >= 100 && alpha > 0.0) { 1 } else { -1 };
                        (v, y)
                    })
                    .collect();
                let b = basis(kind, n);
                assert_eq!(
                    scs_predictions(b, AlphaMode::Fixed(alpha), &stream).unwrap(),
                    scs_eager_reference(b, alpha, &stream).unwrap()
                );
            }
        }
    }
}
