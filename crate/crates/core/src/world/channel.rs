//! Vehicle-to-vehicle relay of pedestrian kinematics.
//!
//! Messages are broadcast once per period while the sender has a detection,
//! pass a range check and a seeded Bernoulli drop, and are delivered after a
//! fixed latency.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::world::sensor::Observation;

/// Slack for comparing accumulated step times against period and latency.
const TIME_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel {
    /// Delivery delay, s.
    pub latency: f64,
    /// Probability that a broadcast is lost.
    pub drop_prob: f64,
    /// Maximum sender-receiver distance, m.
    pub range: f64,
    /// Broadcast interval, s.
    pub period: f64,
    pub seed: u64,
}

impl Default for ChannelModel {
    fn default() -> Self {
        Self {
            latency: 0.0,
            drop_prob: 0.0,
            range: 300.0,
            period: 0.02,
            seed: 0,
        }
    }
}

impl ChannelModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.latency >= 0.0 && self.latency.is_finite()) {
            return Err(Error::invalid("latency", "must be nonnegative"));
        }
        if !(0.0..=1.0).contains(&self.drop_prob) {
            return Err(Error::invalid("drop_prob", "must lie in [0, 1]"));
        }
        if self.range.is_nan() || self.range <= 0.0 {
            return Err(Error::invalid("v2v_range", "must be positive"));
        }
        if !(self.period > 0.0 && self.period.is_finite()) {
            return Err(Error::invalid("broadcast_period", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct V2VMessage {
    pub sent_at: f64,
    pub ped_pos: Vec2,
    pub ped_vel: Vec2,
}

impl V2VMessage {
    /// Constant-velocity prediction of the pedestrian position at `t`.
    pub fn extrapolate(&self, t: f64) -> Vec2 {
        self.ped_pos + self.ped_vel * (t - self.sent_at).max(0.0)
    }
}

/// Live channel: the model plus its queue and random stream.
#[derive(Debug, Clone)]
pub struct Channel {
    pub model: ChannelModel,
    in_flight: VecDeque<V2VMessage>,
    last_sent: Option<f64>,
    sent: u64,
    dropped: u64,
    rng: ChaCha8Rng,
}

impl Channel {
    pub fn new(model: ChannelModel) -> Result<Self> {
        model.validate()?;
        Ok(Self {
            model,
            in_flight: VecDeque::new(),
            last_sent: None,
            sent: 0,
            dropped: 0,
            rng: ChaCha8Rng::seed_from_u64(model.seed),
        })
    }

    pub fn in_flight(&self) -> impl Iterator<Item = &V2VMessage> {
        self.in_flight.iter()
    }

    pub fn sent(&self) -> u64 {
        self.sent
    }

    pub fn dropped(&self) -> u64 {
        self.dropped
    }

    /// Broadcasts `detection` if a period has elapsed, then returns the newest
    /// message whose latency has expired by `t`.
    pub fn step(
        &mut self,
        t: f64,
        detection: Option<Observation>,
        sender: Vec2,
        receiver: Vec2,
    ) -> Option<V2VMessage> {
        if let Some(obs) = detection {
            let due = self
                .last_sent
                .is_none_or(|s| t - s >= self.model.period - TIME_EPS);
            if due {
                self.last_sent = Some(t);
                self.sent += 1;
                let lost =
                    self.model.drop_prob > 0.0 && self.rng.random::<f64>() < self.model.drop_prob;
                let reachable = (receiver - sender).norm() <= self.model.range;
                if lost || !reachable {
                    self.dropped += 1;
                } else {
                    self.in_flight.push_back(V2VMessage {
                        sent_at: t,
                        ped_pos: obs.pos,
                        ped_vel: obs.vel,
                    });
                }
            }
        }

        let mut delivered = None;
        while let Some(front) = self.in_flight.front() {
            if front.sent_at + self.model.latency <= t + TIME_EPS {
                delivered = self.in_flight.pop_front();
            } else {
                break;
            }
        }
        delivered
    }
}
