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

//! Proper edge colouring with at most `d_max + 1` colours (Misra and Gries,
//! "A constructive proof of Vizing's theorem", 1992).

use serde_json::{Map, Value};

use crate::netmodel::Network;
use crate::scalar::Scalar;

/// Total map from links to colours `0..=d_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeColoring {
    color_of: Vec<usize>,
    palette: usize,
}

impl EdgeColoring {
    pub fn color(&self, e: usize) -> usize {
        self.color_of[e]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.color_of
    }

    /// Palette size `d_max + 1`.
    pub fn palette(&self) -> usize {
        self.palette
    }

    /// Number of distinct colours actually used.
    pub fn colors_used(&self) -> usize {
        let mut used = vec![false; self.palette];
        self.color_of.iter().for_each(|&c| used[c] = true);
        used.into_iter().filter(|&u| u).count()
    }

    /// Colour classes (matchings) indexed by colour.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.palette];
        for (e, &c) in self.color_of.iter().enumerate() {
            out[c].push(e);
        }
        out
    }

    /// No two links sharing a node carry the same colour.
    pub fn is_proper<T: Scalar>(&self, net: &Network<T>) -> bool {
        (0..net.n_nodes()).all(|v| {
            let mut seen = vec![false; self.palette];
            net.incident(v).iter().all(|&e| !std::mem::replace(&mut seen[self.color_of[e]], true))
        })
    }

    /// `{"colors": {"<edge index>": <colour>, ...}}`.
    pub fn to_json(&self) -> Value {
        let colors: Map<String, Value> =
            self.color_of.iter().enumerate().map(|(e, &c)| (e.to_string(), Value::from(c))).collect();
        let mut root = Map::new();
        root.insert("colors".into(), Value::Object(colors));
        Value::Object(root)
    }
}

struct MisraGries<'a, T> {
    net: &'a Network<T>,
    colors: Vec<Option<usize>>,
    // at[v][c]: the link at v currently coloured c
    at: Vec<Vec<Option<usize>>>,
}

impl<'a, T: Scalar> MisraGries<'a, T> {
    fn new(net: &'a Network<T>) -> Self {
        let palette = net.max_degree() + 1;
        MisraGries {
            net,
            colors: vec![None; net.n_edges()],
            at: vec![vec![None; palette]; net.n_nodes()],
        }
    }

    fn is_free(&self, v: usize, c: usize) -> bool {
        self.at[v][c].is_none()
    }

    fn free_color(&self, v: usize) -> usize {
        self.at[v].iter().position(Option::is_none).expect("d_max + 1 colours leave one free")
    }

    fn recolor(&mut self, updates: &[(usize, usize)]) {
        for &(e, _) in updates {
            if let Some(old) = self.colors[e] {
                let l = self.net.edge(e);
                self.at[l.u][old] = None;
                self.at[l.v][old] = None;
            }
        }
        for &(e, c) in updates {
            let l = self.net.edge(e);
            self.at[l.u][c] = Some(e);
            self.at[l.v][c] = Some(e);
            self.colors[e] = Some(c);
        }
    }

    /// Maximal fan at `u` starting with the uncoloured link `e`; returns the fan
    /// links and their far endpoints.
    fn maximal_fan(&self, e: usize, u: usize) -> (Vec<usize>, Vec<usize>) {
        let mut links = vec![e];
        let mut ends = vec![self.net.edge(e).other(u)];
        loop {
            let last = *ends.last().expect("fan is non-empty");
            let next = self.net.incident(u).iter().copied().find(|&f| {
                let x = self.net.edge(f).other(u);
                match self.colors[f] {
                    Some(c) => self.is_free(last, c) && !ends.contains(&x),
                    None => false,
                }
            });
            match next {
                Some(f) => {
                    links.push(f);
                    ends.push(self.net.edge(f).other(u));
                }
                None => return (links, ends),
            }
        }
    }

    /// Swaps `c` and `d` along the maximal path from `u` alternating `d, c, d, ...`.
    fn invert_path(&mut self, u: usize, c: usize, d: usize) {
        let mut updates = Vec::new();
        let (mut node, mut col) = (u, d);
        while let Some(f) = self.at[node][col] {
            if updates.iter().any(|&(g, _)| g == f) {
                break;
            }
            updates.push((f, if col == c { d } else { c }));
            node = self.net.edge(f).other(node);
            col = if col == c { d } else { c };
        }
        self.recolor(&updates);
    }

    fn run(mut self) -> Vec<usize> {
        for e in 0..self.net.n_edges() {
            let u = self.net.edge(e).u;
            let (links, ends) = self.maximal_fan(e, u);
            let c = self.free_color(u);
            let d = self.free_color(*ends.last().expect("fan is non-empty"));
            if c != d {
                self.invert_path(u, c, d);
            }
            // first fan node where d is free; its prefix is still a fan
            let w = ends.iter().position(|&x| self.is_free(x, d)).expect("some fan node has d free");
            let mut updates: Vec<(usize, usize)> = (0..w)
                .map(|i| (links[i], self.colors[links[i + 1]].expect("fan links are coloured")))
                .collect();
            updates.push((links[w], d));
            self.recolor(&updates);
        }
        self.colors.into_iter().map(|c| c.expect("every link coloured")).collect()
    }
}

/// Proper edge colouring with palette `d_max + 1`; each colour class is a matching.
pub fn edge_color<T: Scalar>(net: &Network<T>) -> EdgeColoring {
    let palette = net.max_degree() + 1;
    EdgeColoring { color_of: MisraGries::new(net).run(), palette }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::Capacity;
    use proptest::prelude::*;

    fn net(n: usize, edges: &[(usize, usize)]) -> Network {
        Network::new(n, 1, edges.iter().map(|&(u, v)| (u, v, 1.0)).collect(), Capacity::Uniform(1.0)).unwrap()
    }

    #[test]
    fn triangle_needs_three() {
        let g = net(3, &[(0, 1), (1, 2), (0, 2)]);
        let c = edge_color(&g);
        assert!(c.is_proper(&g));
        assert_eq!(c.colors_used(), 3);
    }

    #[test]
    fn star_uses_one_colour_per_link() {
        let g = net(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]);
        let c = edge_color(&g);
        assert!(c.is_proper(&g));
        assert_eq!(c.colors_used(), 5);
    }

    #[test]
    fn even_cycle_within_bound() {
        let g = net(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let c = edge_color(&g);
        assert!(c.is_proper(&g));
        assert!(c.colors_used() <= 3);
        assert_eq!(c.palette(), 3);
    }

    #[test]
    fn petersen_graph() {
        let outer: Vec<(usize, usize)> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
        let spokes: Vec<(usize, usize)> = (0..5).map(|i| (i, i + 5)).collect();
        let inner: Vec<(usize, usize)> = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5)).collect();
        let edges: Vec<_> = outer.into_iter().chain(spokes).chain(inner).collect();
        let g = net(10, &edges);
        let c = edge_color(&g);
        assert!(c.is_proper(&g));
        assert!(c.colors_used() <= 4);
    }

    #[test]
    fn json_export() {
        let g = net(3, &[(0, 1), (1, 2)]);
        let c = edge_color(&g);
        let v = c.to_json();
        assert_eq!(v["colors"].as_object().unwrap().len(), 2);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]
        #[test]
        fn proper_with_at_most_dmax_plus_one(n in 2usize..16, density in 0.05f64..1.0, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(density) {
                        edges.push((u, v));
                    }
                }
            }
            let g = net(n, &edges);
            let c = edge_color(&g);
            prop_assert!(c.is_proper(&g));
            prop_assert!(c.as_slice().iter().all(|&x| x <= g.max_degree()));
        }
    }
}
