// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumCast, ToPrimitive};

/// Real scalar used for demands, capacities and every derived metric.
///
/// Implemented for `f64` (the default everywhere) and `f32`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumCast + Sum + Debug + Display + Send + Sync + 'static
{
    /// Absolute tolerance for comparisons against thresholds and for tie detection.
    fn tolerance() -> Self;

    /// Converts an `f64` literal; panics only if the value is unrepresentable.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn tolerance() -> f64 {
        1e-9
    }
}

// 1e-9 is below f32 resolution at the magnitudes used here (demands up to a few
// hundred), so the single-precision tolerance is scaled accordingly.
impl Scalar for f32 {
    fn tolerance() -> f32 {
        1e-4
    }
}

/// Sum of the `k` largest values of `loads` together with the sorted indices that
/// realise it. Among equal values the smaller indices are preferred, which makes
/// the returned index set the lexicographically smallest maximiser.
///
/// When `k` exceeds `loads.len()` every index is taken.
pub fn top_k_sum<T: Scalar>(loads: &[T], k: usize) -> (T, Vec<usize>) {
    let take = k.min(loads.len());
    let mut order: Vec<usize> = (0..loads.len()).collect();
    order.sort_by(|&a, &b| {
        loads[b]
            .partial_cmp(&loads[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    order.truncate(take);
    order.sort_unstable();
    let total = order.iter().fold(T::zero(), |acc, &i| acc + loads[i]);
    (total, order)
}

/// Sum of the `k` largest values only; avoids the allocation of [`top_k_sum`].
pub fn top_k_value<T: Scalar>(loads: &[T], k: usize, scratch: &mut Vec<T>) -> T {
    if k >= loads.len() {
        return loads.iter().fold(T::zero(), |acc, &x| acc + x);
    }
    if k == 1 {
        return loads.iter().fold(T::zero(), |acc, &x| acc.max(x));
    }
    scratch.clear();
    scratch.extend_from_slice(loads);
    scratch.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    scratch[..k].iter().fold(T::zero(), |acc, &x| acc + x)
}

/// Tracks the best value seen so far and every candidate within tolerance of it,
/// so the final witness can be the smallest key among near-optimal candidates.
#[derive(Debug, Clone)]
pub(crate) struct NearBest<T, K> {
    maximize: bool,
    best: Option<T>,
    candidates: Vec<(T, K)>,
}

impl<T: Scalar, K: Ord> NearBest<T, K> {
    pub(crate) fn maximizing() -> Self {
        NearBest { maximize: true, best: None, candidates: Vec::new() }
    }

    pub(crate) fn minimizing() -> Self {
        NearBest { maximize: false, best: None, candidates: Vec::new() }
    }

    fn better(&self, a: T, b: T) -> bool {
        if self.maximize {
            a > b
        } else {
            a < b
        }
    }

    fn within(&self, value: T, best: T) -> bool {
        let eps = T::tolerance();
        if self.maximize {
            value >= best - eps
        } else {
            value <= best + eps
        }
    }

    /// Whether `value` could still end up among the near-optimal candidates.
    pub(crate) fn admits(&self, value: T) -> bool {
        match self.best {
            None => true,
            Some(b) => self.within(value, b),
        }
    }

    /// Offers a candidate. Candidates that are no better than an existing one with
    /// a smaller or equal key are dropped, so the list stays an antichain.
    pub(crate) fn offer(&mut self, value: T, key: impl FnOnce() -> K) {
        if !self.admits(value) {
            return;
        }
        let key = key();
        if self.candidates.iter().any(|(v, k)| !self.better(value, *v) && *k <= key) {
            return;
        }
        if self.best.map_or(true, |b| self.better(value, b)) {
            self.best = Some(value);
            let (maximize, eps) = (self.maximize, T::tolerance());
            self.candidates.retain(|(v, _)| {
                if maximize {
                    *v >= value - eps
                } else {
                    *v <= value + eps
                }
            });
        }
        let maximize = self.maximize;
        self.candidates.retain(|(v, k)| {
            let no_better = if maximize { *v <= value } else { *v >= value };
            !(no_better && *k >= key)
        });
        self.candidates.push((value, key));
    }

    /// Best value and the smallest key among candidates within tolerance of it.
    pub(crate) fn finish(self) -> Option<(T, K)> {
        let best = self.best?;
        let key = self.candidates.into_iter().map(|(_, k)| k).min()?;
        Some((best, key))
    }
}
