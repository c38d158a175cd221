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

use super::*;
use crate::netmodel::{Capacity, OddSet};

const EPS: f64 = 1e-9;

/// Channel subsets of size `min(k, |W|)`, enumerated directly.
fn channel_subsets(n_channels: usize, k: usize) -> Vec<Vec<usize>> {
    let k = k.min(n_channels);
    (0u32..1 << n_channels)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n_channels).filter(|w| m & (1 << w) != 0).collect())
        .collect()
}

/// Definition-level M1: max over nodes and explicit channel subsets.
fn brute_m1(net: &Network, y: &ChannelAssignment, k: usize) -> f64 {
    let mut best = 0.0f64;
    for v in 0..net.n_nodes() {
        for s in channel_subsets(net.n_channels(), k) {
            let sum: f64 = (0..net.n_edges())
                .filter(|&e| net.edge(e).touches(v) && s.contains(&y.channel(e)))
                .map(|e| net.demand(e))
                .sum();
            best = best.max(sum);
        }
    }
    best
}

/// Definition-level M2: every odd subset by bitmask, every channel subset.
fn brute_m2(net: &Network, y: &ChannelAssignment, k: usize) -> f64 {
    let n = net.n_nodes();
    let mut best = 0.0f64;
    for mask in 0u32..1 << n {
        let size = mask.count_ones() as usize;
        if size < 3 || size % 2 == 0 {
            continue;
        }
        for s in channel_subsets(net.n_channels(), k) {
            let sum: f64 = net
                .edges()
                .iter()
                .enumerate()
                .filter(|(e, l)| mask & (1 << l.u) != 0 && mask & (1 << l.v) != 0 && s.contains(&y.channel(*e)))
                .map(|(_, l)| l.demand)
                .sum();
            best = best.max(2.0 / (size as f64 - 1.0) * sum);
        }
    }
    best
}

/// Definition-level β: min over node and odd-set constraints of the inverse
/// normalised load.
fn brute_beta(net: &Network, y: &ChannelAssignment) -> f64 {
    let n = net.n_nodes();
    let mut worst = 0.0f64;
    for w in 0..net.n_channels() {
        for mask in 1u32..1 << n {
            let size = mask.count_ones() as usize;
            let scale = if size == 1 {
                1.0
            } else if size >= 3 && size % 2 == 1 {
                2.0 / (size as f64 - 1.0)
            } else {
                continue;
            };
            let load: f64 = (0..net.n_edges())
                .filter(|&e| y.channel(e) == w)
                .filter(|&e| {
                    let l = net.edge(e);
                    if size == 1 {
                        mask & (1 << l.u) != 0 || mask & (1 << l.v) != 0
                    } else {
                        mask & (1 << l.u) != 0 && mask & (1 << l.v) != 0
                    }
                })
                .map(|e| net.demand(e) / net.capacity(w, e))
                .sum();
            worst = worst.max(scale * load);
        }
    }
    if worst > 0.0 {
        1.0 / worst
    } else {
        f64::INFINITY
    }
}

fn uniform(n: usize, w: usize, edges: &[(usize, usize, f64)], cap: f64) -> Network {
    Network::new(n, w, edges.to_vec(), Capacity::Uniform(cap)).unwrap()
}

fn assign(net: &Network, ch: &[usize]) -> ChannelAssignment {
    ChannelAssignment::new(net, ch.to_vec()).unwrap()
}

fn path4() -> Network {
    uniform(4, 3, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)], 100.0)
}

fn k3(w: usize) -> Network {
    uniform(3, w, &[(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)], 1.0)
}

#[test]
fn channel_load_examples() {
    let star = uniform(3, 2, &[(0, 1, 2.0), (0, 2, 3.0)], 10.0);
    let y = assign(&star, &[0, 0]);
    assert_eq!(channel_load_at_node(&star, &y, 0, 0).unwrap(), 5.0);
    assert_eq!(channel_load_at_node(&star, &y, 0, 1).unwrap(), 0.0);
    assert!(channel_load_at_node(&star, &y, 5, 0).is_err());
    assert!(channel_load_at_node(&star, &y, 0, 2).is_err());

    let tri = k3(3);
    let y = assign(&tri, &[0, 1, 2]);
    for v in 0..3 {
        for w in 0..3 {
            let load = channel_load_at_node(&tri, &y, v, w).unwrap();
            assert!(load == 0.0 || load == 1.0);
        }
    }
}

#[test]
fn m1_path_examples() {
    // Assignment I: two adjacent links share channel w1.
    let net = path4();
    let y1 = assign(&net, &[1, 1, 2]);
    let (m1, w) = compute_m1(&net, &y1, 1).unwrap();
    assert_eq!(m1, brute_m1(&net, &y1, 1));
    assert_eq!(m1, 2.0);
    assert_eq!(w, Some(NodeWitness { node: 1, channels: vec![1] }));

    // Assignment II: w1 reused only on non-adjacent links.
    let y2 = assign(&net, &[1, 2, 1]);
    let (m1, _) = compute_m1(&net, &y2, 1).unwrap();
    assert_eq!(m1, brute_m1(&net, &y2, 1));
    assert_eq!(m1, 1.0);

    assert!(matches!(compute_m1(&net, &y2, 0), Err(Error::InvalidK)));
}

#[test]
fn m1_all_channels_is_max_node_demand() {
    let net = uniform(4, 2, &[(0, 1, 2.0), (0, 2, 5.0), (0, 3, 1.5), (1, 2, 4.0)], 10.0);
    let y = assign(&net, &[0, 1, 0, 1]);
    for k in [2, 3, 7] {
        assert_eq!(compute_m1(&net, &y, k).unwrap().0, net.max_node_demand());
    }
}

#[test]
fn m2_k3_examples() {
    let net = k3(3);
    let same = assign(&net, &[1, 1, 1]);
    let (m2, w) = compute_m2_exact(&net, &same, 1).unwrap();
    assert_eq!(m2, brute_m2(&net, &same, 1));
    assert_eq!(m2, 3.0);
    let w = w.unwrap();
    assert_eq!(w.set, OddSet::new(vec![0, 1, 2]).unwrap());
    assert_eq!(w.channels, vec![1]);

    let ifa = assign(&net, &[0, 1, 2]);
    let (m2, _) = compute_m2_exact(&net, &ifa, 1).unwrap();
    assert_eq!(m2, brute_m2(&net, &ifa, 1));
    assert_eq!(m2, 1.0);
}

#[test]
fn recovery_capacity_examples() {
    let net = path4();
    let c = |ch: &[usize]| recovery_capacity(&net, &assign(&net, ch), 1, Mode::Exact).unwrap().capacity;
    assert_eq!(c(&[1, 1, 2]), Estimate::Exact(2.0));
    assert_eq!(c(&[1, 2, 1]), Estimate::Exact(1.0));

    let tri = k3(1);
    let y = assign(&tri, &[0, 0, 0]);
    let r = recovery_capacity(&tri, &y, 1, Mode::Exact).unwrap();
    assert_eq!(r.m1, 2.0);
    assert_eq!(r.capacity, Estimate::Exact(3.0));
    assert_eq!(r.capacity.lo(), 1.5 * r.m1);
}

#[test]
fn exact_refused_above_cap() {
    let edges: Vec<_> = (0..19).map(|i| (i, i + 1, 1.0)).collect();
    let net = uniform(20, 2, &edges, 5.0);
    let y = assign(&net, &vec![0; 19]);
    let err = compute_m2_exact(&net, &y, 1).unwrap_err();
    assert!(err.to_string().contains("exact odd-set enumeration disabled"), "{err}");
    assert!(recovery_capacity(&net, &y, 1, Mode::Exact).is_err());
    assert!(recovery_capacity(&net, &y, 1, Mode::Bracket).is_ok());
    assert!(Evaluator::with_cap(20).m2_exact(&net, &y, 1).is_ok());
}

#[test]
fn bracket_examples() {
    let tri = k3(1);
    let y = assign(&tri, &[0, 0, 0]);
    let (lo, hi) = compute_m2_bracket(&tri, &y, 1).unwrap();
    assert_eq!(lo, 3.0);
    assert!(lo <= 3.0 && 3.0 <= hi);

    // 5-cycle with an interference-free assignment: the 1.25 factor applies.
    let c5 = uniform(5, 3, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0), (4, 0, 1.0)], 9.0);
    let y = assign(&c5, &[0, 1, 0, 1, 2]);
    assert!(is_interference_free(&c5, &y));
    let (lo, hi) = compute_m2_bracket(&c5, &y, 1).unwrap();
    assert_eq!(lo, 1.0);
    assert_eq!(hi, 1.25);

    let empty = Network::<f64>::new(4, 2, vec![], Capacity::Uniform(1.0)).unwrap();
    let y = assign(&empty, &[]);
    assert_eq!(compute_m2_bracket(&empty, &y, 2).unwrap(), (0.0, 0.0));
    let r = recovery_capacity(&empty, &y, 1, Mode::Exact).unwrap();
    assert_eq!(r.capacity, Estimate::Exact(0.0));
}

#[test]
fn feasibility_examples() {
    let single = Network::new(2, 1, vec![(0, 1, 10.0)], Capacity::Uniform(100.0)).unwrap();
    let y = assign(&single, &[0]);
    let f = feasibility_ratio(&single, &y, Mode::Exact).unwrap();
    assert_eq!(f.beta, Estimate::Exact(10.0));
    assert_eq!(f.feasible, Feasibility::Yes);
    assert_eq!(f.witness_z1, Some((0, 0)));

    let star = |cap: f64| uniform(4, 1, &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)], cap);
    let s2 = star(2.0);
    let y = assign(&s2, &[0, 0, 0]);
    assert_eq!(feasibility_ratio(&s2, &y, Mode::Exact).unwrap().z1, 2.0 / 3.0);
    assert_eq!(is_feasible(&s2, &y), Feasibility::No);
    let s3 = star(3.0);
    assert_eq!(is_feasible(&s3, &y), Feasibility::Yes);

    let tri = k3(3);
    let y = assign(&tri, &[0, 1, 2]);
    let f = feasibility_ratio(&tri, &y, Mode::Exact).unwrap();
    assert_eq!(f.z1, 1.0);
    assert_eq!(f.z2, Estimate::Exact(1.0));
    assert_eq!(f.beta, Estimate::Exact(1.0));
    assert_eq!(f.feasible, Feasibility::Yes);

    let empty = Network::<f64>::new(3, 2, vec![], Capacity::Uniform(1.0)).unwrap();
    let f = feasibility_ratio(&empty, &assign(&empty, &[]), Mode::Exact).unwrap();
    assert!(f.beta.lo().is_infinite());
    assert_eq!(f.feasible, Feasibility::Yes);
}

#[test]
fn interference_free_examples() {
    let tri = k3(3);
    assert!(is_interference_free(&tri, &assign(&tri, &[0, 1, 2])));
    assert!(!is_interference_free(&tri, &assign(&tri, &[0, 0, 2])));
    let p = path4();
    assert!(is_interference_free(&p, &assign(&p, &[1, 2, 1])));
    assert!(!is_interference_free(&p, &assign(&p, &[1, 1, 2])));
}

#[test]
fn f32_matches_f64_on_examples() {
    let net: Network<f32> =
        Network::new(3, 1, vec![(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)], Capacity::Uniform(1.0)).unwrap();
    let y = ChannelAssignment::new(&net, vec![0, 0, 0]).unwrap();
    let r = recovery_capacity(&net, &y, 1, Mode::Exact).unwrap();
    assert_eq!(r.capacity, Estimate::Exact(3.0f32));
}

#[test]
fn report_json_fields() {
    let net = path4();
    let y = assign(&net, &[1, 1, 2]);
    let r = recovery_capacity(&net, &y, 1, Mode::Exact).unwrap();
    let f = feasibility_ratio(&net, &y, Mode::Exact).unwrap();
    let text = serde_json::to_string(&evaluation_json(&net, &r, &f)).unwrap();
    assert_eq!(
        text,
        r#"{"m1":2.000000000,"m2":2.000000000,"capacity":2.000000000,"k":1,"witness_m1":{"node":"n1","channels":["w1"]},"witness_m2":{"nodes":["n0","n1","n2"],"channels":["w1"]},"mode":"exact","z1":50.000000000,"z2":50.000000000,"beta":50.000000000,"feasible":"yes"}"#
    );
    let r = recovery_capacity(&net, &y, 1, Mode::Bracket).unwrap();
    let f = feasibility_ratio(&net, &y, Mode::Bracket).unwrap();
    let v = evaluation_json(&net, &r, &f);
    let obj = v.as_object().unwrap();
    assert!(obj.contains_key("m2_lo") && obj.contains_key("m2_hi"));
    assert!(!obj.contains_key("m2") && !obj.contains_key("witness_m2"));
}

fn arb_instance(max_nodes: usize) -> impl Strategy<Value = (Network, ChannelAssignment)> {
    (3..=max_nodes, 1usize..=4).prop_flat_map(|(n, w)| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let np = pairs.len();
        (
            proptest::collection::vec(proptest::bool::weighted(0.5), np),
            proptest::collection::vec(1u32..=20, np),
            proptest::collection::vec(0..w, np),
            proptest::collection::vec(1u32..=40, w),
        )
            .prop_map(move |(keep, dem, ch, caps)| {
                let mut edges = Vec::new();
                let mut chans = Vec::new();
                for i in 0..np {
                    if keep[i] {
                        edges.push((pairs[i].0, pairs[i].1, dem[i] as f64));
                        chans.push(ch[i]);
                    }
                }
                let caps = caps.iter().map(|&c| c as f64).collect();
                let net = Network::new(n, w, edges, Capacity::PerChannel(caps)).unwrap();
                let y = ChannelAssignment::new(&net, chans).unwrap();
                (net, y)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn exact_metrics_match_definition((net, y) in arb_instance(7), k in 1usize..5) {
        let r = recovery_capacity(&net, &y, k, Mode::Exact).unwrap();
        prop_assert!((r.m1 - brute_m1(&net, &y, k)).abs() <= EPS);
        prop_assert!((r.m2.lo() - brute_m2(&net, &y, k)).abs() <= EPS);
        let beta = feasibility_ratio(&net, &y, Mode::Exact).unwrap().beta.lo();
        let expected = brute_beta(&net, &y);
        prop_assert!(beta == expected || (beta - expected).abs() <= EPS * expected.max(1.0));
    }

    #[test]
    fn capacity_bracket_and_monotone_in_k((net, y) in arb_instance(8)) {
        let mut prev = 0.0;
        for k in 1..=net.n_channels() + 2 {
            let r = recovery_capacity(&net, &y, k, Mode::Exact).unwrap();
            let c = r.capacity.lo();
            prop_assert!(r.m1 <= c + EPS && c <= 1.5 * r.m1 + EPS);
            prop_assert!(c + EPS >= prev);
            prev = c;
            let b = recovery_capacity(&net, &y, k, Mode::Bracket).unwrap();
            prop_assert!(b.m2.contains(r.m2.lo()));
            prop_assert!(b.capacity.contains(c));
        }
        let w = net.n_channels();
        let at_w = recovery_capacity(&net, &y, w, Mode::Exact).unwrap().capacity.lo();
        let beyond = recovery_capacity(&net, &y, w + 3, Mode::Exact).unwrap().capacity.lo();
        prop_assert_eq!(at_w, beyond);
    }

    #[test]
    fn beta_brackets_capacity((net, y) in arb_instance(8)) {
        let c1 = recovery_capacity(&net, &y, 1, Mode::Exact).unwrap().capacity.lo();
        let f = feasibility_ratio(&net, &y, Mode::Exact).unwrap();
        if let Some((rmin, rmax)) = net.capacity_range() {
            let beta = f.beta.lo();
            prop_assert!(rmin / c1 <= beta * (1.0 + EPS) && beta <= rmax / c1 * (1.0 + EPS));
        }
        let fb = feasibility_ratio(&net, &y, Mode::Bracket).unwrap();
        prop_assert!(fb.beta.lo() <= f.beta.lo() * (1.0 + EPS) && f.beta.lo() <= fb.beta.hi() * (1.0 + EPS));
    }

    #[test]
    fn scale_covariance((net, y) in arb_instance(7), k in 1usize..4, lambda in 0.1f64..10.0) {
        let r = recovery_capacity(&net, &y, k, Mode::Exact).unwrap();
        let scaled = net.scaled_demands(lambda).unwrap();
        let s = recovery_capacity(&scaled, &y, k, Mode::Exact).unwrap();
        let tol = 1e-9 * (1.0 + r.capacity.lo() * lambda);
        prop_assert!((s.m1 - lambda * r.m1).abs() <= tol);
        prop_assert!((s.m2.lo() - lambda * r.m2.lo()).abs() <= tol);
        prop_assert!((s.capacity.lo() - lambda * r.capacity.lo()).abs() <= tol);
        // Power-of-two scaling is exact in binary floating point, so witnesses agree.
        let d = recovery_capacity(&net.scaled_demands(4.0).unwrap(), &y, k, Mode::Exact).unwrap();
        prop_assert_eq!(d.witness_m1, r.witness_m1);
        prop_assert_eq!(d.witness_m2, r.witness_m2);
    }
}
