//! Signed misclassification costs.
//!
//! Every example carries a signed cost Δ = r(+1) − r(−1): its sign is the
//! label and its magnitude is what a mistake on it costs. The functions here
//! turn the raw annotations we know how to handle (vote counts, a measurement
//! and a threshold, a rating on an ordinal scale, an explicit reward pair)
//! into Δ.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary action / class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Neg,
    Pos,
}

impl Label {
    pub fn as_i8(self) -> i8 {
        match self {
            Label::Neg => -1,
            Label::Pos => 1,
        }
    }

    pub fn from_i8(v: i8) -> Option<Label> {
        match v {
            -1 => Some(Label::Neg),
            1 => Some(Label::Pos),
            _ => None,
        }
    }

    /// 0 for `Neg`, 1 for `Pos`.
    pub fn index(self) -> usize {
        match self {
            Label::Neg => 0,
            Label::Pos => 1,
        }
    }

    pub fn flipped(self) -> Label {
        match self {
            Label::Neg => Label::Pos,
            Label::Pos => Label::Neg,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Neg => f.write_str("-1"),
            Label::Pos => f.write_str("+1"),
        }
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Label> {
        match s.trim() {
            "-1" => Ok(Label::Neg),
            "1" | "+1" => Ok(Label::Pos),
            other => Err(Error::invalid(format!("label must be -1 or +1, got {other:?}"))),
        }
    }
}

/// Label of a signed cost. Δ = 0 maps to `Pos`, matching the Δ̂ ≥ 0 decision
/// rule; such examples carry zero weight in NEC either way.
pub fn label_of(delta: f64) -> Label {
    if delta >= 0.0 {
        Label::Pos
    } else {
        Label::Neg
    }
}

/// A feature vector paired with its signed cost.
#[derive(Debug, Clone, PartialEq)]
pub struct CostedExample {
    pub features: Vec<f64>,
    pub delta: f64,
}

impl CostedExample {
    pub fn new(features: Vec<f64>, delta: f64) -> Result<Self> {
        if !delta.is_finite() {
            return Err(Error::NonFinite("delta"));
        }
        if features.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("features"));
        }
        Ok(CostedExample { features, delta })
    }

    pub fn label(&self) -> Label {
        label_of(self.delta)
    }

    pub fn cost(&self) -> f64 {
        self.delta.abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VoteCount {
    pub yes: u64,
    pub no: u64,
}

impl VoteCount {
    pub fn new(yes: u64, no: u64) -> Self {
        VoteCount { yes, no }
    }
}

/// Laplace-smoothed log-odds of the yes vote, `ln((yes + 1) / (no + 1))`.
pub fn votes_to_delta(votes: VoteCount) -> f64 {
    // ln of each term separately keeps the result exactly antisymmetric.
    ((votes.yes as f64) + 1.0).ln() - ((votes.no as f64) + 1.0).ln()
}

/// Signed distance of a measurement from a decision threshold.
pub fn threshold_to_delta(z: f64, tau: f64) -> Result<f64> {
    if !z.is_finite() || !tau.is_finite() {
        return Err(Error::NonFinite("threshold input"));
    }
    Ok(z - tau)
}

/// Which side of the rating midpoint counts as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Δ = midpoint − score: low ratings are positive.
    MidpointMinusScore,
    /// Δ = score − midpoint: high ratings are positive.
    ScoreMinusMidpoint,
}

impl FromStr for Orientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "midpoint_minus_score" => Ok(Orientation::MidpointMinusScore),
            "score_minus_midpoint" => Ok(Orientation::ScoreMinusMidpoint),
            other => Err(Error::invalid(format!(
                "orientation must be midpoint_minus_score or score_minus_midpoint, got {other:?}"
            ))),
        }
    }
}

/// An ordinal rating scale, e.g. 1..=7 with midpoint 4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatingScale {
    pub low: f64,
    pub high: f64,
    pub midpoint: f64,
    pub orientation: Orientation,
}

impl RatingScale {
    pub fn new(low: f64, high: f64, midpoint: f64, orientation: Orientation) -> Result<Self> {
        if !(low.is_finite() && high.is_finite() && midpoint.is_finite()) {
            return Err(Error::NonFinite("rating scale"));
        }
        if !(low <= midpoint && midpoint <= high) {
            return Err(Error::invalid(format!(
                "rating midpoint {midpoint} is not inside [{low}, {high}]"
            )));
        }
        Ok(RatingScale {
            low,
            high,
            midpoint,
            orientation,
        })
    }
}

pub fn rating_to_delta(score: f64, scale: &RatingScale) -> Result<f64> {
    if !score.is_finite() {
        return Err(Error::NonFinite("rating"));
    }
    if score < scale.low || score > scale.high {
        return Err(Error::RatingOutOfScale {
            score,
            low: scale.low,
            high: scale.high,
        });
    }
    Ok(match scale.orientation {
        Orientation::MidpointMinusScore => scale.midpoint - score,
        Orientation::ScoreMinusMidpoint => score - scale.midpoint,
    })
}

/// Rewards of the two actions for one example.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardPair {
    reward_neg: f64,
    reward_pos: f64,
}

impl RewardPair {
    pub fn new(reward_neg: f64, reward_pos: f64) -> Result<Self> {
        if !reward_neg.is_finite() || !reward_pos.is_finite() {
            return Err(Error::NonFinite("reward"));
        }
        Ok(RewardPair {
            reward_neg,
            reward_pos,
        })
    }

    pub fn reward_neg(&self) -> f64 {
        self.reward_neg
    }

    pub fn reward_pos(&self) -> f64 {
        self.reward_pos
    }
}

pub fn rewards_to_delta(rewards: RewardPair) -> f64 {
    rewards.reward_pos - rewards.reward_neg
}
