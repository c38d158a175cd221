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

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::metrics::{compute_m1, feasibility_ratio, recovery_capacity, Mode};
use crate::netmodel::Capacity;

const EPS: f64 = 1e-9;

fn all_assignments(n_edges: usize, nw: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = nw.pow(n_edges as u32);
    (0..total).map(move |mut i| {
        let mut y = vec![0; n_edges];
        for slot in y.iter_mut() {
            *slot = i % nw;
            i /= nw;
        }
        y
    })
}

/// Exhaustive reference: minimum of `f` over all assignments, and the
/// lexicographically smallest assignment within tolerance of it.
fn brute<F: Fn(&ChannelAssignment) -> Option<f64>>(net: &Network, f: F) -> Option<(f64, Vec<usize>)> {
    let scored: Vec<(f64, Vec<usize>)> = all_assignments(net.n_edges(), net.n_channels())
        .filter_map(|y| {
            let a = ChannelAssignment::new(net, y.clone()).unwrap();
            f(&a).map(|v| (v, y))
        })
        .collect();
    let best = scored.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    scored.into_iter().filter(|s| s.0 <= best + EPS).map(|s| s.1).min().map(|y| (best, y))
}

fn capacity_of(net: &Network, y: &ChannelAssignment, k: usize) -> f64 {
    recovery_capacity(net, y, k, Mode::Exact).unwrap().capacity.exact().unwrap()
}

fn beta_of(net: &Network, y: &ChannelAssignment) -> f64 {
    feasibility_ratio(net, y, Mode::Exact).unwrap().beta.exact().unwrap()
}

fn random_net(seed: u64, max_nodes: usize, max_edges: usize, nw: usize, homogeneous: bool) -> Network {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=max_nodes);
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    for i in (1..pairs.len()).rev() {
        pairs.swap(i, rng.gen_range(0..=i));
    }
    let m = rng.gen_range(1..=max_edges.min(pairs.len()));
    let edges = pairs[..m].iter().map(|&(u, v)| (u, v, rng.gen_range(1..=20) as f64)).collect();
    let capacity = if homogeneous {
        Capacity::Uniform(rng.gen_range(20..=60) as f64)
    } else {
        Capacity::Matrix((0..nw).map(|_| (0..m).map(|_| rng.gen_range(15..=60) as f64).collect()).collect())
    };
    Network::new(n, nw, edges, capacity).unwrap()
}

fn unit_net(n: usize, nw: usize, edges: &[(usize, usize, f64)], r: f64) -> Network {
    Network::new(n, nw, edges.to_vec(), Capacity::Uniform(r)).unwrap()
}

#[test]
fn triangle_optimum_is_one() {
    let g = unit_net(3, 3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)], 1.0);
    let res = solve_whiterec_exact(&g, 1, DEFAULT_BUDGET).unwrap();
    assert!(res.proven_optimal);
    assert!((res.objective.unwrap() - 1.0).abs() < EPS);
    assert_eq!(res.best_assignment.unwrap().as_slice(), &[0, 1, 2]);
}

#[test]
fn triangle_single_channel_relaxation() {
    let g = unit_net(3, 1, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)], 1.0);
    let res = solve_whiterecinf_exact(&g, 1, DEFAULT_BUDGET).unwrap();
    assert!((res.objective.unwrap() - 3.0).abs() < EPS);
    let approx = solve_whiterec_approx_exact(&g, 1, DEFAULT_BUDGET).unwrap();
    assert!((approx.objective.unwrap() - 2.0).abs() < EPS);
}

#[test]
fn infeasible_star() {
    let g = unit_net(4, 1, &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)], 2.0);
    let res = solve_whiterec_exact(&g, 1, DEFAULT_BUDGET).unwrap();
    assert!(res.is_infeasible());
    assert_eq!(res.best_assignment, None);
    let v = res.to_json(&g);
    assert!(v["objective"].is_null() && v["assignment"].is_null());
    assert_eq!(v["proven_optimal"], true);
    let feasi = solve_feasi_exact(&g, DEFAULT_BUDGET).unwrap();
    assert!((feasi.objective.unwrap() - 2.0 / 3.0).abs() < EPS);
}

#[test]
fn single_link_beta() {
    let g = unit_net(2, 1, &[(0, 1, 10.0)], 100.0);
    let res = solve_feasi_exact(&g, DEFAULT_BUDGET).unwrap();
    assert!((res.objective.unwrap() - 10.0).abs() < EPS);
}

#[test]
fn edgeless_network() {
    let g = unit_net(3, 2, &[], 1.0);
    let res = solve_whiterec_exact(&g, 1, DEFAULT_BUDGET).unwrap();
    assert_eq!(res.objective, Some(0.0));
    assert_eq!(res.explored, 1);
    let feasi = solve_feasi_exact(&g, DEFAULT_BUDGET).unwrap();
    assert_eq!(feasi.objective, Some(f64::INFINITY));
}

#[test]
fn budget_exhaustion_keeps_incumbent() {
    let g = random_net(5, 9, 14, 3, true);
    let res = solve_whiterecinf_exact(&g, 1, 1).unwrap();
    assert!(!res.proven_optimal);
    assert!(res.explored <= 1);
    assert!(res.objective.is_some(), "warm start supplies an incumbent");
    let cold = Oracle { budget: 0, warm_start: false }.solve(&g, Problem::WhiteRecInf, 1).unwrap();
    assert!(!cold.proven_optimal);
    assert_eq!(cold.objective, None);
}

#[test]
fn rejects_zero_k_and_large_networks() {
    let g = unit_net(3, 2, &[(0, 1, 1.0)], 1.0);
    assert!(matches!(solve_whiterec_exact(&g, 0, 10), Err(Error::InvalidK)));
    let big = unit_net(30, 2, &[(0, 1, 1.0)], 1.0);
    assert!(matches!(solve_whiterec_exact(&big, 1, 10), Err(Error::OracleTooLarge { .. })));
}

#[test]
fn json_field_order() {
    let g = unit_net(3, 3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)], 1.0);
    let res = solve_whiterec_exact(&g, 1, DEFAULT_BUDGET).unwrap();
    let text = serde_json::to_string(&res.to_json(&g)).unwrap();
    assert_eq!(
        text,
        format!(
            r#"{{"objective":1.000000000,"proven_optimal":true,"explored":{},"assignment":{{"0":"w0","1":"w1","2":"w2"}}}}"#,
            res.explored
        )
    );
}

#[test]
fn odd_terms_skip_dominated_sets() {
    // a triangle with a pendant path, plus an isolated link
    let g = unit_net(7, 1, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0), (5, 6, 1.0)], 1.0);
    let terms = search::odd_terms(&g);
    let members: Vec<_> = terms.iter().map(|t| t.members.clone()).collect();
    assert_eq!(members, vec![vec![0, 1, 2], vec![0, 1, 2, 3, 4]]);
    // an even cycle is bipartite
    let c4 = unit_net(5, 1, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0), (3, 4, 1.0)], 1.0);
    assert!(search::odd_terms(&c4).is_empty());
}

/// Optimal two-way split of `items` by enumerating every subset.
fn best_partition(items: &[f64]) -> f64 {
    let total: f64 = items.iter().sum();
    (0u32..1 << items.len())
        .map(|mask| {
            let s: f64 = items.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, x)| x).sum();
            s.max(total - s)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Whether `items` fit into `bins` bins of unit size, by trying every placement.
fn packs(items: &[f64], bins: usize) -> bool {
    fn place(items: &[f64], fill: &mut Vec<f64>) -> bool {
        let Some((&x, rest)) = items.split_first() else { return true };
        for b in 0..fill.len() {
            if fill[b] + x <= 1.0 + 1e-12 {
                fill[b] += x;
                let ok = place(rest, fill);
                fill[b] -= x;
                if ok {
                    return true;
                }
            }
        }
        false
    }
    place(items, &mut vec![0.0; bins])
}

#[test]
fn star_partition_matches_subset_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..40 {
        let n = rng.gen_range(1..=8);
        let items: Vec<f64> = (0..n).map(|_| rng.gen_range(1..=30) as f64).collect();
        let edges: Vec<_> = items.iter().enumerate().map(|(i, &r)| (0, i + 1, r)).collect();
        let g = unit_net(n + 1, 2, &edges, 1e6);
        let res = solve_whiterecinf_exact(&g, 1, DEFAULT_BUDGET).unwrap();
        assert_eq!(res.objective.unwrap(), best_partition(&items), "{items:?}");
    }
}

#[test]
fn star_bin_packing_matches_packer() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..40 {
        let n = rng.gen_range(1..=7);
        let bins = rng.gen_range(1..=3);
        let items: Vec<f64> = (0..n).map(|_| rng.gen_range(1..=10) as f64 / 16.0).collect();
        let edges: Vec<_> = items.iter().enumerate().map(|(i, &r)| (0, i + 1, r)).collect();
        let g = unit_net(n + 1, bins, &edges, 1.0);
        let res = solve_feasi_exact(&g, DEFAULT_BUDGET).unwrap();
        let beta = res.objective.unwrap();
        assert_eq!(beta >= 1.0 - EPS, packs(&items, bins), "{items:?} into {bins}");
        let whiterec = solve_whiterec_exact(&g, 1, DEFAULT_BUDGET).unwrap();
        assert_eq!(whiterec.objective.is_some(), packs(&items, bins));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn whiterec_matches_exhaustive(seed in any::<u64>(), nw in 1usize..4, k in 1usize..4) {
        let g = random_net(seed, 7, 7, nw, seed % 2 == 0);
        let res = solve_whiterec_exact(&g, k, DEFAULT_BUDGET).unwrap();
        prop_assert!(res.proven_optimal);
        let reference = brute(&g, |y| (beta_of(&g, y) >= 1.0 - EPS).then(|| capacity_of(&g, y, k)));
        match reference {
            None => prop_assert!(res.is_infeasible()),
            Some((best, y)) => {
                prop_assert!((res.objective.unwrap() - best).abs() < 1e-7);
                prop_assert_eq!(res.best_assignment.unwrap().as_slice().to_vec(), y);
            }
        }
    }

    #[test]
    fn relaxations_match_exhaustive(seed in any::<u64>(), nw in 1usize..4, k in 1usize..4) {
        let g = random_net(seed, 7, 7, nw, false);
        let inf = solve_whiterecinf_exact(&g, k, DEFAULT_BUDGET).unwrap();
        let (best, y) = brute(&g, |y| Some(capacity_of(&g, y, k))).unwrap();
        prop_assert!((inf.objective.unwrap() - best).abs() < 1e-7);
        prop_assert_eq!(inf.best_assignment.unwrap().as_slice().to_vec(), y);

        let approx = solve_whiterec_approx_exact(&g, k, DEFAULT_BUDGET).unwrap();
        let (best, y) = brute(&g, |y| Some(compute_m1(&g, y, k).unwrap().0)).unwrap();
        prop_assert!((approx.objective.unwrap() - best).abs() < 1e-7);
        prop_assert_eq!(approx.best_assignment.unwrap().as_slice().to_vec(), y);

        let whiterec = solve_whiterec_exact(&g, k, DEFAULT_BUDGET).unwrap();
        if let Some(c) = whiterec.objective {
            prop_assert!(inf.objective.unwrap() <= c + EPS);
        }
    }

    #[test]
    fn feasi_matches_exhaustive(seed in any::<u64>(), nw in 1usize..4) {
        let g = random_net(seed, 7, 7, nw, seed % 3 == 0);
        let res = solve_feasi_exact(&g, DEFAULT_BUDGET).unwrap();
        // maximizing beta is minimizing the normalized load 1 / beta
        let (best, y) = brute(&g, |y| Some(1.0 / beta_of(&g, y))).unwrap();
        prop_assert!((res.objective.unwrap() - 1.0 / best).abs() < 1e-7);
        prop_assert_eq!(res.best_assignment.unwrap().as_slice().to_vec(), y);
    }

    #[test]
    fn homogeneous_feasi_tracks_single_preemption(seed in any::<u64>(), nw in 1usize..4) {
        let g = random_net(seed, 8, 9, nw, true);
        let r = g.capacity(0, 0);
        let beta = solve_feasi_exact(&g, DEFAULT_BUDGET).unwrap();
        let c1 = solve_whiterecinf_exact(&g, 1, DEFAULT_BUDGET).unwrap();
        prop_assert!((beta.objective.unwrap() - r / c1.objective.unwrap()).abs() < 1e-7);
        let y = beta.best_assignment.unwrap();
        prop_assert!((capacity_of(&g, &y, 1) - c1.objective.unwrap()).abs() < 1e-7);
    }

    #[test]
    fn optimum_respects_node_demand_bound(seed in any::<u64>(), nw in 1usize..4, k in 1usize..4) {
        let g = random_net(seed, 9, 11, nw, true);
        let res = solve_whiterecinf_exact(&g, k, DEFAULT_BUDGET).unwrap();
        let bound = k.min(nw) as f64 / nw as f64 * g.max_node_demand();
        prop_assert!(res.objective.unwrap() >= bound - EPS);
    }
}
