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

//! Channel assignment schemes: load-greedy, interference-free via edge
//! colouring, and uniform random.

mod coloring;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::netmodel::{ChannelAssignment, Network};
use crate::scalar::Scalar;

pub use coloring::{edge_color, EdgeColoring};

/// Seed used by the CLI when none is given.
pub const DEFAULT_SEED: u64 = 0x5eed_c0de;

fn check_order(n_edges: usize, order: &[usize]) -> Result<()> {
    let mut seen = vec![false; n_edges];
    for &e in order {
        if e >= n_edges || std::mem::replace(&mut seen[e], true) {
            return Err(Error::InvalidOrder(e));
        }
    }
    if order.len() != n_edges {
        return Err(Error::AssignmentLength { got: order.len(), expected: n_edges });
    }
    Ok(())
}

/// Processes links in `order`, giving each the channel with the least demand
/// already placed on links at either endpoint. Ties go to the lowest channel.
pub fn greedy_assign<T: Scalar>(net: &Network<T>, order: &[usize]) -> Result<ChannelAssignment> {
    if net.n_channels() == 0 {
        return Err(Error::NoChannels);
    }
    check_order(net.n_edges(), order)?;
    let nw = net.n_channels();
    let mut load = vec![T::zero(); net.n_nodes() * nw];
    let mut channel_of = vec![0; net.n_edges()];
    for &e in order {
        let l = net.edge(e);
        let mut best = 0;
        let mut best_load = T::infinity();
        for w in 0..nw {
            let x = load[l.u * nw + w] + load[l.v * nw + w];
            if x < best_load {
                best = w;
                best_load = x;
            }
        }
        channel_of[e] = best;
        load[l.u * nw + best] = load[l.u * nw + best] + l.demand;
        load[l.v * nw + best] = load[l.v * nw + best] + l.demand;
    }
    Ok(ChannelAssignment::from_vec_unchecked(channel_of))
}

/// Greedy in input link order.
pub fn greedy_assign_default<T: Scalar>(net: &Network<T>) -> Result<ChannelAssignment> {
    let order: Vec<usize> = (0..net.n_edges()).collect();
    greedy_assign(net, &order)
}

/// Seeded uniform permutation of `0..n`.
pub fn shuffled_order(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    order
}

/// Colour classes sorted by descending total demand (ties by colour index),
/// the i-th class going to the `(i mod |W|)`-th channel in order of descending
/// total capacity (ties by channel index, so with homogeneous capacities the
/// i-th class lands on channel `i mod |W|`).
pub fn ifa_from_coloring<T: Scalar>(net: &Network<T>, coloring: &EdgeColoring) -> ChannelAssignment {
    let mut classes: Vec<(T, usize, Vec<usize>)> = coloring
        .classes()
        .into_iter()
        .enumerate()
        .filter(|(_, c)| !c.is_empty())
        .map(|(color, c)| (c.iter().map(|&e| net.demand(e)).sum(), color, c))
        .collect();
    classes.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite demands").then(a.1.cmp(&b.1)));
    let nw = net.n_channels();
    let mut channels: Vec<(T, usize)> =
        (0..nw).map(|w| ((0..net.n_edges()).map(|e| net.capacity(w, e)).sum::<T>(), w)).collect();
    channels.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite").then(a.1.cmp(&b.1)));
    let mut channel_of = vec![0; net.n_edges()];
    for (i, (_, _, class)) in classes.iter().enumerate() {
        for &e in class {
            channel_of[e] = channels[i % nw].1;
        }
    }
    ChannelAssignment::from_vec_unchecked(channel_of)
}

/// Interference-free assignment whenever `|W| > d_max`; otherwise classes wrap
/// around the channels.
pub fn ifa_assign<T: Scalar>(net: &Network<T>) -> ChannelAssignment {
    ifa_from_coloring(net, &edge_color(net))
}

/// Each link independently uniform over the channels.
pub fn random_assign<T: Scalar>(net: &Network<T>, seed: u64) -> ChannelAssignment {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nw = net.n_channels();
    ChannelAssignment::from_vec_unchecked((0..net.n_edges()).map(|_| rng.gen_range(0..nw)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{is_interference_free, recovery_capacity, Mode};
    use crate::netmodel::Capacity;
    use proptest::prelude::*;
    use rand::Rng;

    fn net(n: usize, nw: usize, edges: &[(usize, usize, f64)]) -> Network {
        Network::new(n, nw, edges.to_vec(), Capacity::Uniform(100.0)).unwrap()
    }

    fn random_net(n: usize, nw: usize, p: f64, seed: u64) -> Network {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    edges.push((u, v, rng.gen_range(1..=10) as f64));
                }
            }
        }
        Network::new(n, nw, edges, Capacity::Uniform(100.0)).unwrap()
    }

    #[test]
    fn greedy_star_trace() {
        let g = net(4, 2, &[(0, 1, 3.0), (0, 2, 2.0), (0, 3, 1.0)]);
        let y = greedy_assign(&g, &[0, 1, 2]).unwrap();
        assert_eq!(y.as_slice(), &[0, 1, 1]);
    }

    #[test]
    fn greedy_tie_breaks() {
        let g = net(2, 4, &[(0, 1, 5.0)]);
        assert_eq!(greedy_assign_default(&g).unwrap().as_slice(), &[0]);
        let g = net(4, 2, &[(0, 1, 5.0), (2, 3, 7.0)]);
        assert_eq!(greedy_assign_default(&g).unwrap().as_slice(), &[0, 0]);
    }

    #[test]
    fn greedy_rejects_bad_order() {
        let g = net(3, 2, &[(0, 1, 1.0), (1, 2, 1.0)]);
        assert!(matches!(greedy_assign(&g, &[0, 0]), Err(Error::InvalidOrder(0))));
        assert!(matches!(greedy_assign(&g, &[0, 5]), Err(Error::InvalidOrder(5))));
        assert!(matches!(greedy_assign(&g, &[1]), Err(Error::AssignmentLength { .. })));
    }

    #[test]
    fn ifa_triangle_is_interference_free() {
        let g = net(3, 3, &[(0, 1, 1.0), (1, 2, 4.0), (0, 2, 2.0)]);
        let y = ifa_assign(&g);
        assert!(is_interference_free(&g, &y));
        let rep = recovery_capacity(&g, &y, 1, Mode::Exact).unwrap();
        assert_eq!(rep.capacity.exact(), Some(4.0));
    }

    #[test]
    fn ifa_path_two_channels() {
        let g = net(4, 2, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]);
        let y = ifa_assign(&g);
        assert!(is_interference_free(&g, &y));
    }

    #[test]
    fn ifa_star_folds_classes() {
        let g = net(5, 2, &[(0, 1, 1.0), (0, 2, 2.0), (0, 3, 3.0), (0, 4, 4.0)]);
        let y = ifa_assign(&g);
        for w in 0..2 {
            let same = g.incident(0).iter().filter(|&&e| y.channel(e) == w).count();
            assert!(same <= 2);
        }
    }

    #[test]
    fn random_single_channel_and_determinism() {
        let g = random_net(12, 1, 0.5, 3);
        assert!(random_assign(&g, 99).as_slice().iter().all(|&w| w == 0));
        let g = random_net(12, 4, 0.5, 3);
        assert_eq!(random_assign(&g, 7), random_assign(&g, 7));
        assert_ne!(random_assign(&g, 7), random_assign(&g, 8));
    }

    #[test]
    fn random_frequencies_binomial() {
        let g = random_net(80, 2, 0.5, 11);
        let n = g.n_edges() as f64;
        let ones = random_assign(&g, 5).as_slice().iter().filter(|&&w| w == 1).count() as f64;
        let sigma = (n * 0.25).sqrt();
        assert!((ones - n / 2.0).abs() <= 5.0 * sigma, "{ones} of {n}");
    }

    #[test]
    fn shuffled_order_is_permutation() {
        let mut o = shuffled_order(50, 1);
        assert_ne!(o, (0..50).collect::<Vec<_>>());
        o.sort_unstable();
        assert_eq!(o, (0..50).collect::<Vec<_>>());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn ifa_interference_free_when_enough_channels(n in 2usize..14, p in 0.1f64..0.9, seed in any::<u64>(), extra in 1usize..3) {
            let g = random_net(n, 1, p, seed);
            let g = Network::new(n, g.max_degree() + extra,
                g.edges().iter().map(|l| (l.u, l.v, l.demand)).collect(), Capacity::Uniform(100.0)).unwrap();
            prop_assert!(is_interference_free(&g, &ifa_assign(&g)));
        }

        #[test]
        fn ifa_per_node_collisions_bounded(n in 2usize..14, p in 0.1f64..0.9, seed in any::<u64>(), nw in 1usize..5) {
            let g = random_net(n, nw, p, seed);
            let y = ifa_assign(&g);
            let bound = (g.max_degree() + 1).div_ceil(nw);
            for v in 0..n {
                for w in 0..nw {
                    let same = g.incident(v).iter().filter(|&&e| y.channel(e) == w).count();
                    prop_assert!(same <= bound);
                }
            }
        }

        #[test]
        fn greedy_argmin_unchanged_by_own_demand(n in 2usize..12, p in 0.2f64..0.9, seed in any::<u64>(), nw in 1usize..5) {
            let g = random_net(n, nw, p, seed);
            let order = shuffled_order(g.n_edges(), seed);
            let y = greedy_assign(&g, &order).unwrap();
            // replay counting the in-flight link on every channel
            let mut load = vec![vec![0.0; nw]; n];
            for &e in &order {
                let l = g.edge(e);
                let mut best = 0;
                let mut best_load = f64::INFINITY;
                for w in 0..nw {
                    let x = load[l.u][w] + load[l.v][w] + 2.0 * l.demand;
                    if x < best_load {
                        best = w;
                        best_load = x;
                    }
                }
                prop_assert_eq!(best, y.channel(e));
                load[l.u][best] += l.demand;
                load[l.v][best] += l.demand;
            }
        }
    }
}
