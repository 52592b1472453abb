use std::collections::{BTreeMap, BTreeSet};

use rustc_hash::FxHashMap as HashMap;

use super::Clustering;
use crate::bounds::{check_outcome_range, check_probability, mixed_upper_coefficient};
use crate::error::{Error, Result};
use crate::graph::InterferenceGraph;
use crate::matching::max_weight_matching;

#[derive(Debug, Clone, Copy, Default)]
struct Link {
    /// `D_kx`
    out: f64,
    /// `D_xk`
    inn: f64,
}

/// Change in the sufficient statistics caused by merging two clusters.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LocalDelta {
    within: f64,
    sq_sizes: f64,
    delta_n2: f64,
}

impl LocalDelta {
    fn close_to(&self, other: &LocalDelta) -> bool {
        let near = |a: f64, b: f64| (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()));
        near(self.within, other.within) && near(self.sq_sizes, other.sq_sizes) && near(self.delta_n2, other.delta_n2)
    }
}

/// Incremental bookkeeping for the surrogate objective
/// `rho^2 (K S2 + c2 |delta n^2|) / n^2` with `rho = T / W`.
#[derive(Debug, Clone)]
pub(crate) struct MergeState {
    n: usize,
    total: f64,
    within: f64,
    sq_sizes: f64,
    delta_n2: f64,
    k_coef: f64,
    c2: f64,
    members: Vec<Vec<usize>>,
    links: Vec<BTreeMap<usize, Link>>,
}

impl MergeState {
    pub(crate) fn new(graph: &InterferenceGraph, clustering: &Clustering, k_coef: f64, c2: f64) -> Result<Self> {
        clustering.check_matches(graph)?;
        let m = clustering.len();
        let mut links: Vec<BTreeMap<usize, Link>> = vec![BTreeMap::new(); m];
        let mut within = 0.0;
        for e in graph.edges() {
            let (k, l) = (clustering.cluster_of(e.unit), clustering.cluster_of(e.neighbor));
            if k == l {
                within += e.weight;
            } else {
                links[k].entry(l).or_default().out += e.weight;
                links[l].entry(k).or_default().inn += e.weight;
            }
        }
        let delta_n2 = links
            .iter()
            .flat_map(|row| row.values())
            .map(|link| link.out * link.inn)
            .sum();
        Ok(Self {
            n: graph.n(),
            total: graph.total_weight(),
            within,
            sq_sizes: clustering.clusters().iter().map(|c| (c.len() * c.len()) as f64).sum(),
            delta_n2,
            k_coef,
            c2,
            members: clustering.clusters().to_vec(),
            links,
        })
    }

    fn objective(&self, within: f64, sq_sizes: f64, delta_n2: f64) -> f64 {
        if within == 0.0 {
            return f64::INFINITY;
        }
        let rho = self.total / within;
        let n2 = (self.n * self.n) as f64;
        rho * rho * (self.k_coef * sq_sizes + self.c2 * delta_n2.abs()) / n2
    }

    pub(crate) fn surrogate(&self) -> f64 {
        self.objective(self.within, self.sq_sizes, self.delta_n2)
    }

    pub(crate) fn local(&self, k: usize, l: usize) -> LocalDelta {
        let kl = self.links[k].get(&l).copied().unwrap_or_default();
        let (small, large, small_is_k) = if self.links[k].len() <= self.links[l].len() {
            (&self.links[k], &self.links[l], true)
        } else {
            (&self.links[l], &self.links[k], false)
        };
        let mut common = 0.0;
        for (x, a) in small {
            if *x == k || *x == l {
                continue;
            }
            if let Some(b) = large.get(x) {
                let (lk, ll) = if small_is_k { (a, b) } else { (b, a) };
                common += lk.out * ll.inn + ll.out * lk.inn;
            }
        }
        let size = |c: usize| self.members[c].len() as f64;
        LocalDelta {
            within: kl.out + kl.inn,
            sq_sizes: 2.0 * size(k) * size(l),
            delta_n2: -2.0 * kl.out * kl.inn + 2.0 * common,
        }
    }

    pub(crate) fn delta_a(&self, d: LocalDelta) -> f64 {
        let before = self.surrogate();
        let after = self.objective(
            self.within + d.within,
            self.sq_sizes + d.sq_sizes,
            self.delta_n2 + d.delta_n2,
        );
        match (before.is_finite(), after.is_finite()) {
            (_, false) => f64::INFINITY,
            (false, true) => f64::NEG_INFINITY,
            (true, true) => after - before,
        }
    }

    /// Merges `l` into `k`.
    fn merge(&mut self, k: usize, l: usize) {
        let d = self.local(k, l);
        self.within += d.within;
        self.sq_sizes += d.sq_sizes;
        self.delta_n2 += d.delta_n2;

        let moved = std::mem::take(&mut self.members[l]);
        self.members[k].extend(moved);
        let row = std::mem::take(&mut self.links[l]);
        self.links[k].remove(&l);
        for (x, link) in row {
            if x == k {
                continue;
            }
            let entry = self.links[k].entry(x).or_default();
            entry.out += link.out;
            entry.inn += link.inn;
            let back = self.links[x].remove(&l).unwrap_or_default();
            let entry = self.links[x].entry(k).or_default();
            entry.out += back.out;
            entry.inn += back.inn;
        }
    }

    /// Clusters adjacent to `k`, plus those two hops away when `two_hop`.
    fn near(&self, k: usize, two_hop: bool) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for &x in self.links[k].keys() {
            out.insert(x);
            if two_hop {
                out.extend(self.links[x].keys().copied());
            }
        }
        out.remove(&k);
        out
    }

    /// Deltas of every adjacent pair, and of pairs two hops apart when
    /// `two_hop`, accumulating shared-neighbor terms per middle cluster.
    fn initial_pairs(&self, two_hop: bool) -> Vec<((usize, usize), LocalDelta)> {
        let m = self.links.len();
        if !two_hop {
            return (0..m)
                .flat_map(|k| self.links[k].keys().filter(move |&&l| k < l).map(move |&l| (k, l)))
                .map(|(k, l)| ((k, l), self.local(k, l)))
                .collect();
        }
        let mut shared: HashMap<(usize, usize), f64> = HashMap::default();
        for row in &self.links {
            let nbrs: Vec<(&usize, &Link)> = row.iter().collect();
            for (i, &(&u, a)) in nbrs.iter().enumerate() {
                for &(&v, b) in &nbrs[i + 1..] {
                    // D_ux D_xv + D_vx D_xu
                    *shared.entry((u, v)).or_default() += a.inn * b.out + b.inn * a.out;
                }
            }
        }
        for (k, row) in self.links.iter().enumerate() {
            for &l in row.keys().filter(|&&l| k < l) {
                shared.entry((k, l)).or_default();
            }
        }
        shared
            .into_iter()
            .map(|((k, l), common)| {
                let kl = self.links[k].get(&l).copied().unwrap_or_default();
                let d = LocalDelta {
                    within: kl.out + kl.inn,
                    sq_sizes: 2.0 * (self.members[k].len() * self.members[l].len()) as f64,
                    delta_n2: -2.0 * kl.out * kl.inn + 2.0 * common,
                };
                ((k, l), d)
            })
            .collect()
    }

    fn into_clustering(self) -> Result<Clustering> {
        let n = self.n;
        Clustering::new(n, self.members.into_iter().filter(|c| !c.is_empty()).collect())
    }
}

/// Tracked merge candidates. A pair that adds no within-cluster weight and
/// whose `|delta n^2|` change cannot outweigh its `eta` growth never lowers
/// the surrogate, whatever the global state; such pairs are kept dormant
/// for bookkeeping and skipped by the scan.
struct Candidates {
    k_coef: f64,
    c2: f64,
    live: BTreeMap<(usize, usize), LocalDelta>,
    dormant: HashMap<(usize, usize), LocalDelta>,
}

impl Candidates {
    fn new(k_coef: f64, c2: f64) -> Self {
        Self {
            k_coef,
            c2,
            live: BTreeMap::new(),
            dormant: HashMap::default(),
        }
    }

    fn put(&mut self, key: (usize, usize), d: LocalDelta) {
        self.remove(key);
        if d.within != 0.0 || self.c2 * d.delta_n2.abs() > self.k_coef * d.sq_sizes {
            self.live.insert(key, d);
        } else {
            self.dormant.insert(key, d);
        }
    }

    fn remove(&mut self, key: (usize, usize)) -> Option<LocalDelta> {
        self.live.remove(&key).or_else(|| self.dormant.remove(&key))
    }

    /// Smallest `Delta A`, ties to the smallest pair.
    fn best(&self, state: &MergeState) -> Option<((usize, usize), f64)> {
        let mut best: Option<((usize, usize), f64)> = None;
        for (&key, &d) in &self.live {
            let value = state.delta_a(d);
            if best.is_none_or(|(_, b)| value < b) {
                best = Some((key, value));
            }
        }
        best
    }
}

/// Agglomerative clustering that starts from a maximum-weight matching and
/// repeatedly applies the merge that most decreases the surrogate variance
/// bound, stopping once no merge decreases it.
///
/// Only adjacent cluster pairs are tracked, plus pairs two hops apart when
/// some weight is negative: for any other pair the merge leaves `rho` and
/// `delta` unchanged, or only grows `|delta|`, while `eta` grows, so the
/// surrogate strictly increases.
pub fn greedy_clustering(graph: &InterferenceGraph, p: f64, y_l: f64, y_m: f64) -> Result<Clustering> {
    let two_hop = graph.edges().iter().any(|e| e.weight < 0.0);
    greedy_with(graph, p, y_l, y_m, two_hop)
}

fn greedy_with(graph: &InterferenceGraph, p: f64, y_l: f64, y_m: f64, two_hop: bool) -> Result<Clustering> {
    check_probability(p)?;
    check_outcome_range(y_l, y_m)?;
    let a = graph.max_positive_row_sum();
    if a <= 0.0 {
        return Err(Error::invalid("greedy clustering needs at least one positive weight"));
    }
    let k_coef = mixed_upper_coefficient(p, y_l, y_m);
    let c2 = ((y_m - y_l) / a).powi(2);

    let matching = max_weight_matching(graph);
    let mut matched = vec![false; graph.n()];
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &(i, j) in &matching.pairs {
        matched[i] = true;
        matched[j] = true;
        clusters.push(vec![i, j]);
    }
    clusters.extend((0..graph.n()).filter(|&i| !matched[i]).map(|i| vec![i]));
    let initial = Clustering::new(graph.n(), clusters)?;

    let mut state = MergeState::new(graph, &initial, k_coef, c2)?;
    let mut candidates = Candidates::new(k_coef, c2);
    for (key, d) in state.initial_pairs(two_hop) {
        candidates.put(key, d);
    }

    while let Some(((k, l), value)) = candidates.best(&state) {
        if value >= 0.0 || value.is_nan() {
            break;
        }
        let near_k = state.near(k, two_hop);
        let near_l = state.near(l, two_hop);
        let old_k = state.links[k].clone();
        let old_l = state.links[l].clone();
        state.merge(k, l);

        let mut previous: HashMap<(usize, usize), LocalDelta> = HashMap::default();
        for (c, near) in [(k, &near_k), (l, &near_l)] {
            for &y in near {
                if let Some(d) = candidates.remove((c.min(y), c.max(y))) {
                    previous.insert((c, y), d);
                }
            }
        }
        let kl = old_k.get(&l).copied().unwrap_or_default();
        for y in state.near(k, two_hop) {
            let d = if two_hop {
                // Every pair within two hops is tracked, so the merged pair
                // follows from the cached (k, y) and (l, y) pairs.
                let ky = old_k.get(&y).copied().unwrap_or_default();
                let ly = old_l.get(&y).copied().unwrap_or_default();
                let common = |c: usize, link: Link| {
                    previous
                        .get(&(c, y))
                        .map_or(0.0, |d| 0.5 * d.delta_n2 + link.out * link.inn)
                };
                let shared = common(k, ky) - (kl.out * ly.out + ly.inn * kl.inn) + common(l, ly)
                    - (kl.inn * ky.out + ky.inn * kl.out);
                let (out, inn) = (ky.out + ly.out, ky.inn + ly.inn);
                LocalDelta {
                    within: out + inn,
                    sq_sizes: 2.0 * (state.members[k].len() * state.members[y].len()) as f64,
                    delta_n2: -2.0 * out * inn + 2.0 * shared,
                }
            } else {
                state.local(k, y)
            };
            debug_assert!(d.close_to(&state.local(k, y)), "{d:?} vs {:?}", state.local(k, y));
            candidates.put((k.min(y), k.max(y)), d);
        }
        // Pairs touching both merged clusters gain the cross products via the
        // new cluster: D_uk D_lv + D_ul D_kv + D_vk D_lu + D_vl D_ku.
        for (&u, lu) in &old_l {
            if u == k {
                continue;
            }
            let ku = old_k.get(&u).copied().unwrap_or_default();
            let u_in_k = old_k.contains_key(&u);
            for (&v, kv) in &old_k {
                if v == l || v == u || (u_in_k && old_l.contains_key(&v) && u > v) {
                    continue;
                }
                let lv = old_l.get(&v).copied().unwrap_or_default();
                let cross = ku.inn * lv.out + lu.inn * kv.out + kv.inn * lu.out + lv.inn * ku.out;
                let key = (u.min(v), u.max(v));
                match candidates.remove(key) {
                    Some(mut d) => {
                        d.delta_n2 += 2.0 * cross;
                        candidates.put(key, d);
                    }
                    None if two_hop => candidates.put(key, state.local(u, v)),
                    None => {}
                }
            }
        }
    }
    state.into_clustering()
}
