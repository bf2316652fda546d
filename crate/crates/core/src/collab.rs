//! Coauthor graphs, community detection, cluster homophily metrics and
//! collaboration-strength matrices between ethnicities.

use crate::classifier::EthnicityLabel;
use crate::corpus::{label_of, AuthorLabels, PublicationRecord};
use crate::names::FullName;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

const L: usize = EthnicityLabel::ALL.len();

pub const DEFAULT_MIN_CLUSTER_SIZE: usize = 10;
pub const DEFAULT_RESTARTS: usize = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CollabError {
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("periods {0} and {1} overlap")]
    OverlappingPeriods(Period, Period),
    #[error("invalid period: {0}")]
    InvalidPeriod(String),
}

/// Undirected coauthor graph. Nodes are sorted by normalized name.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CoauthorGraph {
    nodes: Vec<FullName>,
    labels: Vec<EthnicityLabel>,
    adjacency: Vec<BTreeMap<usize, u64>>,
}

impl CoauthorGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[FullName] {
        &self.nodes
    }

    pub fn label(&self, node: usize) -> EthnicityLabel {
        self.labels[node]
    }

    pub fn labels(&self) -> &[EthnicityLabel] {
        &self.labels
    }

    pub fn index_of(&self, name: &FullName) -> Option<usize> {
        self.nodes.binary_search(name).ok()
    }

    pub fn weight(&self, a: usize, b: usize) -> u64 {
        self.adjacency[a].get(&b).copied().unwrap_or(0)
    }

    pub fn neighbors(&self, node: usize) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.adjacency[node].iter().map(|(&j, &w)| (j, w))
    }

    /// Each undirected edge once as `(a, b, weight)` with `a < b`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, adj)| adj.range(i + 1..).map(move |(&j, &w)| (i, j, w)))
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    pub fn total_weight(&self) -> u64 {
        self.edges().map(|e| e.2).sum()
    }

    pub fn to_weighted(&self) -> WeightedGraph {
        WeightedGraph {
            adj: self
                .adjacency
                .iter()
                .map(|a| a.iter().map(|(&j, &w)| (j, w as f64)).collect())
                .collect(),
        }
    }

    /// Subgraph induced by `keep` (indices into this graph, any order).
    pub fn induced(&self, keep: &[usize]) -> CoauthorGraph {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let remap: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        CoauthorGraph {
            nodes: keep.iter().map(|&i| self.nodes[i].clone()).collect(),
            labels: keep.iter().map(|&i| self.labels[i]).collect(),
            adjacency: keep
                .iter()
                .map(|&i| {
                    self.adjacency[i]
                        .iter()
                        .filter_map(|(j, &w)| remap.get(j).map(|&nj| (nj, w)))
                        .collect()
                })
                .collect(),
        }
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.node_count()];
        let mut out = Vec::new();
        for start in 0..self.node_count() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &u in self.adjacency[v].keys() {
                    if !seen[u] {
                        seen[u] = true;
                        comp.push(u);
                        queue.push_back(u);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Edge list as `name_a<TAB>name_b<TAB>weight` lines.
    pub fn edge_list(&self) -> String {
        let mut out = String::new();
        for (a, b, w) in self.edges() {
            out.push_str(&format!("{}\t{}\t{}\n", self.nodes[a], self.nodes[b], w));
        }
        out
    }
}

fn in_range(year: i32, range: Option<Period>) -> bool {
    range.is_none_or(|p| p.contains(year))
}

/// One node per distinct author in range; edge weight counts coauthored papers.
pub fn build_graph(records: &[PublicationRecord], labels: &AuthorLabels, range: Option<Period>) -> CoauthorGraph {
    let selected: Vec<&PublicationRecord> = records.iter().filter(|r| in_range(r.year, range)).collect();
    let names: BTreeSet<&FullName> = selected.iter().flat_map(|r| r.authors.iter()).collect();
    let nodes: Vec<FullName> = names.into_iter().cloned().collect();
    let labels_vec = nodes.iter().map(|n| label_of(labels, n)).collect();
    let mut adjacency = vec![BTreeMap::new(); nodes.len()];
    for r in selected {
        let idx: Vec<usize> = r
            .authors
            .iter()
            .map(|a| nodes.binary_search(a).expect("author collected above"))
            .collect();
        for (x, &a) in idx.iter().enumerate() {
            for &b in &idx[x + 1..] {
                if a != b {
                    *adjacency[a].entry(b).or_insert(0) += 1;
                    *adjacency[b].entry(a).or_insert(0) += 1;
                }
            }
        }
    }
    CoauthorGraph {
        nodes,
        labels: labels_vec,
        adjacency,
    }
}

/// Largest connected component; among equal sizes the one holding the
/// lexicographically smallest name wins.
pub fn largest_component(graph: &CoauthorGraph) -> Result<CoauthorGraph, CollabError> {
    let comps = graph.components();
    // Components come ordered by smallest member, so the first maximum wins ties.
    let best = comps
        .iter()
        .reduce(|best, c| if c.len() > best.len() { c } else { best })
        .ok_or(CollabError::EmptyGraph)?;
    Ok(graph.induced(best))
}

/// Symmetric weighted adjacency lists; a self-loop entry `(i, w)` holds the
/// diagonal matrix element `A_ii`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WeightedGraph {
    pub adj: Vec<Vec<(usize, f64)>>,
}

impl WeightedGraph {
    /// Builds from undirected edges; repeated edges add up.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Self {
        let mut m = vec![BTreeMap::<usize, f64>::new(); n];
        for &(a, b, w) in edges {
            *m[a].entry(b).or_insert(0.0) += w;
            if a != b {
                *m[b].entry(a).or_insert(0.0) += w;
            }
        }
        WeightedGraph {
            adj: m.into_iter().map(|r| r.into_iter().collect()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    fn degrees(&self) -> Vec<f64> {
        self.adj.iter().map(|r| r.iter().map(|e| e.1).sum()).collect()
    }
}

/// Newman-Girvan modularity with resolution `gamma` for a node-to-community
/// assignment.
pub fn modularity(graph: &WeightedGraph, communities: &[usize], gamma: f64) -> f64 {
    let k = graph.degrees();
    let m2: f64 = k.iter().sum();
    if m2 == 0.0 {
        return 0.0;
    }
    let n_comm = communities.iter().max().map_or(0, |m| m + 1);
    let mut internal = vec![0.0; n_comm];
    let mut tot = vec![0.0; n_comm];
    for (i, row) in graph.adj.iter().enumerate() {
        tot[communities[i]] += k[i];
        for &(j, w) in row {
            if communities[j] == communities[i] {
                internal[communities[i]] += w;
            }
        }
    }
    internal
        .iter()
        .zip(&tot)
        .map(|(&a, &t)| a / m2 - gamma * (t / m2) * (t / m2))
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LouvainResult {
    /// Community id per node; ids are numbered by smallest member.
    pub communities: Vec<usize>,
    pub modularity: f64,
    /// Modularity after every local-move pass of the chosen run, starting
    /// with the singleton partition.
    pub pass_modularity: Vec<f64>,
}

const MOVE_EPS: f64 = 1e-12;
const MAX_PASSES: usize = 1000;

/// Moves nodes between communities until no single move helps. Returns the
/// community of each node and whether anything moved.
fn local_moves(
    g: &WeightedGraph,
    gamma: f64,
    rng: &mut ChaCha8Rng,
    trace: &mut Vec<f64>,
) -> (Vec<usize>, bool) {
    let n = g.len();
    let k = g.degrees();
    let m2: f64 = k.iter().sum();
    let mut comm: Vec<usize> = (0..n).collect();
    let mut tot = k.clone();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut link = vec![0.0; n];
    let mut seen = vec![false; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut moved_any = false;
    if m2 == 0.0 {
        return (comm, false);
    }
    for _ in 0..MAX_PASSES {
        let mut moved = false;
        for &i in &order {
            for &c in &touched {
                link[c] = 0.0;
                seen[c] = false;
            }
            touched.clear();
            for &(j, w) in &g.adj[i] {
                if j != i {
                    if !seen[comm[j]] {
                        seen[comm[j]] = true;
                        touched.push(comm[j]);
                    }
                    link[comm[j]] += w;
                }
            }
            let old = comm[i];
            tot[old] -= k[i];
            let gain = |c: usize, tot: &[f64]| link[c] - gamma * tot[c] * k[i] / m2;
            let mut best = old;
            let mut best_gain = gain(old, &tot);
            for &c in &touched {
                let gc = gain(c, &tot);
                if gc > best_gain + MOVE_EPS {
                    best = c;
                    best_gain = gc;
                }
            }
            tot[best] += k[i];
            comm[i] = best;
            if best != old {
                moved = true;
            }
        }
        if !moved {
            break;
        }
        moved_any = true;
        trace.push(modularity(g, &renumber(&comm), gamma));
    }
    (comm, moved_any)
}

/// Relabels communities 0.. in order of their smallest member.
fn renumber(comm: &[usize]) -> Vec<usize> {
    let mut map = BTreeMap::new();
    comm.iter()
        .map(|&c| {
            let next = map.len();
            *map.entry(c).or_insert(next)
        })
        .collect()
}

fn aggregate(g: &WeightedGraph, comm: &[usize]) -> WeightedGraph {
    let n = comm.iter().max().map_or(0, |m| m + 1);
    let mut m = vec![BTreeMap::<usize, f64>::new(); n];
    for (i, row) in g.adj.iter().enumerate() {
        for &(j, w) in row {
            *m[comm[i]].entry(comm[j]).or_insert(0.0) += w;
        }
    }
    WeightedGraph {
        adj: m.into_iter().map(|r| r.into_iter().collect()).collect(),
    }
}

fn louvain_once(g: &WeightedGraph, gamma: f64, rng: &mut ChaCha8Rng) -> LouvainResult {
    let mut assignment: Vec<usize> = (0..g.len()).collect();
    let mut trace = vec![modularity(g, &assignment, gamma)];
    let mut level = g.clone();
    loop {
        let (comm, moved) = local_moves(&level, gamma, rng, &mut trace);
        if !moved {
            break;
        }
        let comm = renumber(&comm);
        for a in assignment.iter_mut() {
            *a = comm[*a];
        }
        level = aggregate(&level, &comm);
    }
    let communities = renumber(&assignment);
    LouvainResult {
        modularity: modularity(g, &communities, gamma),
        communities,
        pass_modularity: trace,
    }
}

/// Multi-level modularity optimization (Louvain). Runs `restarts` times
/// with node orders drawn from `seed` and keeps the best partition; the
/// earliest run wins ties.
pub fn louvain(graph: &WeightedGraph, seed: u64, gamma: f64, restarts: usize) -> LouvainResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<LouvainResult> = None;
    for _ in 0..restarts.max(1) {
        let r = louvain_once(graph, gamma, &mut rng);
        if best.as_ref().is_none_or(|b| r.modularity > b.modularity + MOVE_EPS) {
            best = Some(r);
        }
    }
    best.expect("at least one run")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CommunityOptions {
    pub resolution: f64,
    pub restarts: usize,
}

impl Default for CommunityOptions {
    fn default() -> Self {
        CommunityOptions {
            resolution: 1.0,
            restarts: DEFAULT_RESTARTS,
        }
    }
}

/// Community detection on a coauthor graph; returns member lists (node
/// indices) ordered by community id.
pub fn detect_communities(graph: &CoauthorGraph, seed: u64, options: CommunityOptions) -> Vec<Vec<usize>> {
    let result = louvain(&graph.to_weighted(), seed, options.resolution, options.restarts);
    let n = result.communities.iter().max().map_or(0, |m| m + 1);
    let mut out = vec![Vec::new(); n];
    for (node, &c) in result.communities.iter().enumerate() {
        out[c].push(node);
    }
    out
}

/// Shannon entropy (natural log) of a count distribution.
pub fn entropy(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / t;
            -p * p.ln()
        })
        .sum::<f64>()
        .max(0.0)
}

/// Largest label fraction and its label index (first label on ties).
pub fn purity(counts: &[usize]) -> (f64, usize) {
    let total: usize = counts.iter().sum();
    let (idx, &max) = counts
        .iter()
        .enumerate()
        .reduce(|best, cur| if cur.1 > best.1 { cur } else { best })
        .expect("non-empty counts");
    if total == 0 {
        return (0.0, idx);
    }
    (max as f64 / total as f64, idx)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cluster {
    pub id: usize,
    pub members: Vec<FullName>,
    pub label_counts: [usize; L],
    pub purity: f64,
    pub purity_label: EthnicityLabel,
    pub entropy: f64,
}

impl Cluster {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterReport {
    /// Every cluster, including those below `min_size`.
    pub clusters: Vec<Cluster>,
    pub min_size: usize,
    /// Entropy of the label distribution over all clustered nodes.
    pub global_entropy: f64,
}

impl ClusterReport {
    pub fn reported(&self) -> impl Iterator<Item = &Cluster> {
        self.clusters.iter().filter(move |c| c.size() >= self.min_size)
    }

    /// `name<TAB>cluster<TAB>label` lines for every clustered node.
    pub fn assignments(&self, labels: &AuthorLabels) -> String {
        let mut rows: Vec<(&FullName, usize)> = self
            .clusters
            .iter()
            .flat_map(|c| c.members.iter().map(move |m| (m, c.id)))
            .collect();
        rows.sort();
        let mut out = String::new();
        for (name, id) in rows {
            out.push_str(&format!("{name}\t{id}\t{}\n", label_of(labels, name)));
        }
        out
    }
}

/// Purity and entropy for each cluster (member lists of names).
pub fn cluster_stats(clusters: &[Vec<FullName>], labels: &AuthorLabels, min_size: usize) -> ClusterReport {
    let mut global = [0usize; L];
    let clusters = clusters
        .iter()
        .enumerate()
        .map(|(id, members)| {
            let mut counts = [0usize; L];
            for m in members {
                counts[label_of(labels, m).index()] += 1;
            }
            for (g, c) in global.iter_mut().zip(&counts) {
                *g += c;
            }
            let (p, idx) = purity(&counts);
            Cluster {
                id,
                members: members.clone(),
                label_counts: counts,
                purity: p,
                purity_label: EthnicityLabel::ALL[idx],
                entropy: entropy(&counts),
            }
        })
        .collect();
    ClusterReport {
        clusters,
        min_size,
        global_entropy: entropy(&global),
    }
}

/// Inclusive year range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Period {
    pub start: i32,
    pub end: i32,
}

impl Period {
    pub fn new(start: i32, end: i32) -> Result<Self, CollabError> {
        if start > end {
            return Err(CollabError::InvalidPeriod(format!("{start}-{end}")));
        }
        Ok(Period { start, end })
    }

    pub fn contains(&self, year: i32) -> bool {
        (self.start..=self.end).contains(&year)
    }

    pub fn overlaps(&self, other: &Period) -> bool {
        self.start <= other.end && other.start <= self.end
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.start, self.end)
    }
}

impl FromStr for Period {
    type Err = CollabError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CollabError::InvalidPeriod(s.to_string());
        let (a, b) = s.trim().split_once('-').ok_or_else(bad)?;
        Period::new(a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?)
    }
}

pub fn default_periods() -> Vec<Period> {
    [(1936, 1980), (1981, 1990), (1991, 2000), (2001, 2010)]
        .into_iter()
        .map(|(s, e)| Period { start: s, end: e })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrengthMode {
    /// Each author pair of a K-author paper carries 2 / (K (K - 1)).
    #[default]
    Fractional,
    /// Each author pair counts once.
    Coauthorships,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollabMatrix {
    pub period: Period,
    pub mode: StrengthMode,
    /// Symmetric, indexed by `label.index()`.
    pub cs: [[f64; L]; L],
    /// `cs` divided by its column sums.
    pub ncs: [[f64; L]; L],
    /// Papers in the period with at least two authors.
    pub multi_author_papers: usize,
}

impl CollabMatrix {
    pub fn cs(&self, a: EthnicityLabel, b: EthnicityLabel) -> f64 {
        self.cs[a.index()][b.index()]
    }

    pub fn ncs(&self, a: EthnicityLabel, b: EthnicityLabel) -> f64 {
        self.ncs[a.index()][b.index()]
    }

    /// Sum over unordered label pairs, the diagonal counted once.
    pub fn total(&self) -> f64 {
        (0..L).map(|i| self.cs[i][i..].iter().sum::<f64>()).sum()
    }

    /// CSV with a label header row; OTH row and column optional.
    pub fn to_csv(&self, normalized: bool, include_oth: bool) -> String {
        let m = if normalized { &self.ncs } else { &self.cs };
        let labels: Vec<EthnicityLabel> = EthnicityLabel::ALL
            .into_iter()
            .filter(|l| include_oth || l.is_class())
            .collect();
        let mut header = vec!["label"];
        header.extend(labels.iter().map(|l| l.code()));
        crate::bibliometrics::to_csv(&header, |w| {
            for &row in &labels {
                let mut rec = vec![row.code().to_string()];
                rec.extend(labels.iter().map(|&col| m[row.index()][col.index()].to_string()));
                w.write_record(rec)?;
            }
            Ok(())
        })
    }
}

pub fn collab_matrix(
    records: &[PublicationRecord],
    labels: &AuthorLabels,
    period: Period,
    mode: StrengthMode,
) -> CollabMatrix {
    let mut cs = [[0.0f64; L]; L];
    let mut papers = 0;
    for r in records.iter().filter(|r| period.contains(r.year)) {
        let k = r.authors.len();
        if k < 2 {
            continue;
        }
        papers += 1;
        let w = match mode {
            StrengthMode::Fractional => 2.0 / (k * (k - 1)) as f64,
            StrengthMode::Coauthorships => 1.0,
        };
        let ls: Vec<usize> = r.authors.iter().map(|a| label_of(labels, a).index()).collect();
        for (x, &a) in ls.iter().enumerate() {
            for &b in &ls[x + 1..] {
                cs[a][b] += w;
                if a != b {
                    cs[b][a] += w;
                }
            }
        }
    }
    let mut ncs = [[0.0f64; L]; L];
    for j in 0..L {
        let col: f64 = (0..L).map(|i| cs[i][j]).sum();
        if col > 0.0 {
            for i in 0..L {
                ncs[i][j] = cs[i][j] / col;
            }
        }
    }
    CollabMatrix {
        period,
        mode,
        cs,
        ncs,
        multi_author_papers: papers,
    }
}

pub fn check_disjoint(periods: &[Period]) -> Result<(), CollabError> {
    for (i, a) in periods.iter().enumerate() {
        for b in &periods[i + 1..] {
            if a.overlaps(b) {
                return Err(CollabError::OverlappingPeriods(*a, *b));
            }
        }
    }
    Ok(())
}

pub fn period_evolution(
    records: &[PublicationRecord],
    labels: &AuthorLabels,
    periods: &[Period],
    mode: StrengthMode,
) -> Result<Vec<CollabMatrix>, CollabError> {
    check_disjoint(periods)?;
    Ok(periods
        .iter()
        .map(|&p| collab_matrix(records, labels, p, mode))
        .collect())
}
