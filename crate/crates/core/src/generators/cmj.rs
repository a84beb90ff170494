//! Crump–Mode–Jagers trees stopped at a given number of individuals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::Rng;
use rand_distr::{Distribution, Exp, Gamma};
use serde::{Deserialize, Serialize};

use super::attachment::{sample_preferential_attachment, AttachmentSpec};
use crate::error::{Error, Result};
use crate::tree::{RootedTree, NO_PARENT};

pub const MAX_RESTARTS: usize = 1000;

/// Law of a single positive waiting time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimeLaw {
    Exponential { rate: f64 },
    Deterministic { value: f64 },
    Gamma { shape: f64, scale: f64 },
}

impl TimeLaw {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            TimeLaw::Exponential { rate } => rate > 0.0 && rate.is_finite(),
            TimeLaw::Deterministic { value } => value > 0.0 && value.is_finite(),
            TimeLaw::Gamma { shape, scale } => shape > 0.0 && scale > 0.0 && shape.is_finite() && scale.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!("waiting times must be positive: {self:?}")))
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            TimeLaw::Exponential { rate } => Exp::new(rate).expect("validated").sample(rng),
            TimeLaw::Deterministic { value } => value,
            TimeLaw::Gamma { shape, scale } => Gamma::new(shape, scale).expect("validated").sample(rng),
        }
    }

    /// E e^{-θT}.
    pub fn laplace(&self, theta: f64) -> f64 {
        match *self {
            TimeLaw::Exponential { rate } => rate / (rate + theta),
            TimeLaw::Deterministic { value } => (-theta * value).exp(),
            TimeLaw::Gamma { shape, scale } => (1.0 + scale * theta).powf(-shape),
        }
    }

    /// d/dθ E e^{-θT} = -E T e^{-θT}.
    pub fn laplace_derivative(&self, theta: f64) -> f64 {
        match *self {
            TimeLaw::Exponential { rate } => -rate / (rate + theta).powi(2),
            TimeLaw::Deterministic { value } => -value * (-theta * value).exp(),
            TimeLaw::Gamma { shape, scale } => -shape * scale * (1.0 + scale * theta).powf(-shape - 1.0),
        }
    }
}

/// Reproduction law of one individual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BirthSpec {
    /// Children arrive at rate χ·(children so far) + ρ.
    LinearWeight { chi: f64, rho: f64 },
    /// Children at the points of a renewal process, at most `max_children`.
    Renewal {
        gap: TimeLaw,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_children: Option<usize>,
    },
    /// Exactly `slots` children at i.i.d. ages.
    IndependentSlots { time: TimeLaw, slots: usize },
}

impl BirthSpec {
    /// Yule process: Exp(1) gaps, no cap.
    pub fn yule() -> Self {
        BirthSpec::Renewal { gap: TimeLaw::Exponential { rate: 1.0 }, max_children: None }
    }

    /// Two children at independent Exp(1) ages.
    pub fn bst() -> Self {
        BirthSpec::IndependentSlots { time: TimeLaw::Exponential { rate: 1.0 }, slots: 2 }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            BirthSpec::LinearWeight { chi, rho } => AttachmentSpec::new(*chi, *rho).validate(),
            BirthSpec::Renewal { gap, max_children } => {
                gap.validate()?;
                if *max_children == Some(0) {
                    return Err(Error::InvalidSpec("renewal births need max_children ≥ 1".into()));
                }
                Ok(())
            }
            BirthSpec::IndependentSlots { time, slots } => {
                time.validate()?;
                if *slots == 0 {
                    return Err(Error::InvalidSpec("independent slots need at least one slot".into()));
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, PartialEq)]
struct Event {
    time: f64,
    seq: u64,
    parent: usize,
}

impl Eq for Event {}

impl Ord for Event {
    // reversed: BinaryHeap is a max-heap and we want the earliest event
    fn cmp(&self, other: &Self) -> Ordering {
        other.time.total_cmp(&self.time).then(other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The family tree at the moment the population first reaches n.
/// Children are ordered by birth time.
pub fn sample_cmj_tree<R: Rng + ?Sized>(spec: &BirthSpec, n: usize, rng: &mut R) -> Result<RootedTree> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::EmptyTree);
    }
    if let BirthSpec::LinearWeight { chi, rho } = *spec {
        return sample_preferential_attachment(AttachmentSpec::new(chi, rho), n, rng);
    }
    for _ in 0..=MAX_RESTARTS {
        if let Some(tree) = simulate(spec, n, rng)? {
            return Ok(tree);
        }
    }
    Err(Error::Extinction { restarts: MAX_RESTARTS, n })
}

/// One run of the event queue; `None` if the population dies out first.
fn simulate<R: Rng + ?Sized>(spec: &BirthSpec, n: usize, rng: &mut R) -> Result<Option<RootedTree>> {
    let mut sim =
        Sim { parent: Vec::with_capacity(n), children: Vec::with_capacity(n), queue: BinaryHeap::new(), seq: 0 };
    sim.birth(spec, NO_PARENT, 0.0, rng);
    while sim.parent.len() < n {
        let Some(ev) = sim.queue.pop() else {
            return Ok(None);
        };
        let p = ev.parent;
        sim.children[p] += 1;
        sim.birth(spec, p, ev.time, rng);
        if let BirthSpec::Renewal { gap, max_children } = spec {
            if max_children.is_none_or(|m| sim.children[p] < m) {
                sim.schedule(ev.time + gap.sample(rng), p);
            }
        }
    }
    RootedTree::from_parent_vec(sim.parent).map(Some)
}

struct Sim {
    parent: Vec<usize>,
    children: Vec<usize>,
    queue: BinaryHeap<Event>,
    seq: u64,
}

impl Sim {
    fn schedule(&mut self, time: f64, parent: usize) {
        self.queue.push(Event { time, seq: self.seq, parent });
        self.seq += 1;
    }

    fn birth<R: Rng + ?Sized>(&mut self, spec: &BirthSpec, p: usize, t: f64, rng: &mut R) {
        let v = self.parent.len();
        self.parent.push(p);
        self.children.push(0);
        match spec {
            BirthSpec::Renewal { gap, .. } => self.schedule(t + gap.sample(rng), v),
            BirthSpec::IndependentSlots { time, slots } => {
                for _ in 0..*slots {
                    self.schedule(t + time.sample(rng), v);
                }
            }
            BirthSpec::LinearWeight { .. } => unreachable!("delegated to preferential attachment"),
        }
    }
}
