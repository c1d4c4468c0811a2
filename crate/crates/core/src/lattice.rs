//! The lattice structure of the interval-bi-noncrossing family: explicit
//! enumeration with an order matrix, the interval decomposition along interior
//! central positions, its inverse gluing map, joins, down-intervals, and a
//! process-wide cache keyed by the face string.
//!
//! Interior central positions `l_1 < ... < l_m` (central labels strictly
//! between the endpoints) cut `{1..n}` into overlapping intervals
//! `[l_{i-1}, l_i]` with sentinels `l_0 = 1`, `l_{m+1} = n`. Restriction to
//! those intervals is a bijection onto the product of the per-interval
//! noncrossing families, preserving and reflecting the refinement order.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::chi::{is_ibnc, ChiMap, Face};
use crate::error::{Error, Result};
use crate::partitions::{Partition, SubPartition, DEFAULT_ENUMERATION_CAP};
use crate::{catalan, enumerate_ibnc_capped};

/// Interior central positions with sentinels: `(1, l_1, ..., l_m, n)`.
pub fn c_positions(chi: &ChiMap) -> Vec<usize> {
    let n = chi.n();
    let mut out = vec![1];
    for k in 2..n {
        if chi.face(k) == Face::Central {
            out.push(k);
        }
    }
    out.push(n);
    out
}

/// The closed intervals `[l_{i-1}, l_i]` cut out by the interior central
/// positions; consecutive intervals share their endpoint.
pub fn intervals(chi: &ChiMap) -> Vec<(usize, usize)> {
    let cp = c_positions(chi);
    cp.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Closed-form size of the IBNC family: the product of Catalan numbers of the
/// interval lengths.
pub fn ibnc_count_formula(chi: &ChiMap) -> u64 {
    intervals(chi)
        .iter()
        .map(|&(a, b)| catalan(b - a + 1))
        .product()
}

/// Restrictions of an IBNC partition to the intervals `[l_{i-1}, l_i]`, with
/// original indices kept.
pub fn decompose(pi: &Partition, chi: &ChiMap) -> Result<Vec<SubPartition>> {
    if !is_ibnc(pi, chi)? {
        return Err(Error::Domain(format!(
            "partition {pi} is not interval-bi-noncrossing for {chi}"
        )));
    }
    intervals(chi)
        .iter()
        .map(|&(a, b)| {
            let ground: Vec<usize> = (a..=b).collect();
            pi.restrict(&ground)
        })
        .collect()
}

/// Inverse of [`decompose`]: glues per-interval partitions along the shared
/// endpoints. Blocks containing a shared point `l_i` in the two neighboring
/// intervals are merged; all other blocks pass through.
pub fn compose(parts: &[SubPartition], chi: &ChiMap) -> Result<Partition> {
    let ivs = intervals(chi);
    if parts.len() != ivs.len() {
        return Err(Error::SizeMismatch(format!(
            "{} interval parts given, labeling has {} intervals",
            parts.len(),
            ivs.len()
        )));
    }
    for (part, &(a, b)) in parts.iter().zip(&ivs) {
        let expected: Vec<usize> = (a..=b).collect();
        if part.ground() != expected.as_slice() {
            return Err(Error::InvalidArgument(format!(
                "part {part} does not partition the interval [{a}, {b}]"
            )));
        }
        let sub_chi = chi.restrict(&expected)?;
        if !is_ibnc(&part.relabel(), &sub_chi)? {
            return Err(Error::Domain(format!(
                "part {part} is not interval-bi-noncrossing on [{a}, {b}]"
            )));
        }
    }
    // Union-find over 1..=n; each part's blocks fuse their members, and the
    // shared endpoints fuse neighboring parts.
    let n = chi.n();
    let mut parent: Vec<usize> = (0..=n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut root = x;
        while parent[root] != root {
            root = parent[root];
        }
        let mut cur = x;
        while parent[cur] != root {
            let next = parent[cur];
            parent[cur] = root;
            cur = next;
        }
        root
    }
    for part in parts {
        for block in part.blocks() {
            for w in block.windows(2) {
                let a = find(&mut parent, w[0]);
                let b = find(&mut parent, w[1]);
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for x in 1..=n {
        let root = find(&mut parent, x);
        groups.entry(root).or_default().push(x);
    }
    let blocks: Vec<Vec<usize>> = groups.into_values().collect();
    let glued = Partition::new(n, blocks)?;
    debug_assert!(is_ibnc(&glued, chi)?, "glued partition must be IBNC");
    Ok(glued)
}

/// The enumerated IBNC family of a labeling with its order matrix and
/// memoized Möbius values.
pub struct IbncLattice {
    chi: ChiMap,
    elements: Vec<Partition>,
    index: HashMap<Partition, usize>,
    leq: Vec<bool>,
    c_interior: Vec<usize>,
    bottom: usize,
    top: usize,
    mobius: OnceLock<Vec<i64>>,
}

impl IbncLattice {
    /// Enumerates the lattice for a labeling. Prefer [`lattice_for`], which
    /// caches per face string.
    pub fn new(chi: ChiMap) -> Result<Self> {
        Self::with_elements(chi, None)
    }

    fn with_elements(chi: ChiMap, precomputed: Option<Vec<Partition>>) -> Result<Self> {
        let elements = match precomputed {
            Some(e) => e,
            None => enumerate_ibnc_capped(&chi, DEFAULT_ENUMERATION_CAP)?,
        };
        let size = elements.len();
        let index: HashMap<Partition, usize> = elements
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, p)| (p, i))
            .collect();
        let mut leq = vec![false; size * size];
        for (i, a) in elements.iter().enumerate() {
            for (j, b) in elements.iter().enumerate() {
                leq[i * size + j] = a.leq(b)?;
            }
        }
        let bottom = index[&Partition::singletons(chi.n())];
        let top = index[&Partition::full(chi.n())];
        Ok(IbncLattice {
            c_interior: c_positions(&chi),
            chi,
            elements,
            index,
            leq,
            bottom,
            top,
            mobius: OnceLock::new(),
        })
    }

    pub fn chi(&self) -> &ChiMap {
        &self.chi
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Partition] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Partition {
        &self.elements[i]
    }

    pub fn index_of(&self, pi: &Partition) -> Option<usize> {
        self.index.get(pi).copied()
    }

    /// Interior central positions with sentinels, as in [`c_positions`].
    pub fn c_interior(&self) -> &[usize] {
        &self.c_interior
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    /// Order matrix lookup by element indices.
    pub fn leq_idx(&self, i: usize, j: usize) -> bool {
        self.leq[i * self.elements.len() + j]
    }

    /// Möbius value between two elements by index; zero when incomparable.
    /// Computed once for the whole lattice by the interval recursion
    /// `mu(a, a) = 1`, `mu(a, b) = -sum_{a <= c < b} mu(a, c)`.
    pub fn mobius_idx(&self, i: usize, j: usize) -> i64 {
        let size = self.elements.len();
        let table = self.mobius.get_or_init(|| {
            let mut mu = vec![0i64; size * size];
            // Linear extension: refinement strictly decreases the block count,
            // so sorting by block count descending orders every chain.
            let mut order: Vec<usize> = (0..size).collect();
            order.sort_by_key(|&k| std::cmp::Reverse(self.elements[k].num_blocks()));
            for a in 0..size {
                mu[a * size + a] = 1;
                for &b in &order {
                    if b == a || !self.leq_idx(a, b) {
                        continue;
                    }
                    let mut acc = 0i64;
                    for &c in &order {
                        if c != b && self.leq_idx(a, c) && self.leq_idx(c, b) {
                            acc += mu[a * size + c];
                        }
                    }
                    mu[a * size + b] = -acc;
                }
            }
            mu
        });
        table[i * size + j]
    }

    /// Möbius value from an element to the top.
    pub fn mobius_to_top(&self, i: usize) -> i64 {
        self.mobius_idx(i, self.top)
    }

    /// All elements below `pi` in the lattice order.
    pub fn down_interval(&self, pi: &Partition) -> Result<Vec<Partition>> {
        let j = self.index_of(pi).ok_or_else(|| {
            Error::Domain(format!(
                "{pi} is not an element of the lattice for {}",
                self.chi
            ))
        })?;
        Ok((0..self.len())
            .filter(|&i| self.leq_idx(i, j))
            .map(|i| self.elements[i].clone())
            .collect())
    }

    /// Indices of all elements below the element at `j`.
    pub fn down_interval_idx(&self, j: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.leq_idx(i, j)).collect()
    }

    /// Least upper bound, computed componentwise through the interval
    /// decomposition, with the exhaustive scan as a fallback.
    pub fn join(&self, sigma: &Partition, pi: &Partition) -> Result<Partition> {
        self.require_element(sigma)?;
        self.require_element(pi)?;
        let parts_s = decompose(sigma, &self.chi)?;
        let parts_p = decompose(pi, &self.chi)?;
        let mut joined = Vec::with_capacity(parts_s.len());
        for (ps, pp) in parts_s.iter().zip(&parts_p) {
            let ground = ps.ground().to_vec();
            let sub_chi = self.chi.restrict(&ground)?;
            let sub = lattice_for(&sub_chi)?;
            let j = sub.join_bruteforce(&ps.relabel(), &pp.relabel())?;
            let blocks: Vec<Vec<usize>> = j
                .blocks()
                .iter()
                .map(|b| b.iter().map(|&x| ground[x - 1]).collect())
                .collect();
            joined.push(SubPartition::new(ground, blocks)?);
        }
        let result = compose(&joined, &self.chi)?;
        // The componentwise construction is validated exhaustively in tests;
        // an upper-bound check guards it at runtime, with the scan as backup.
        if sigma.leq(&result)? && pi.leq(&result)? {
            Ok(result)
        } else {
            self.join_bruteforce(sigma, pi)
        }
    }

    /// Least upper bound by scanning the element list.
    pub fn join_bruteforce(&self, sigma: &Partition, pi: &Partition) -> Result<Partition> {
        let i = self.require_element(sigma)?;
        let j = self.require_element(pi)?;
        let uppers: Vec<usize> = (0..self.len())
            .filter(|&k| self.leq_idx(i, k) && self.leq_idx(j, k))
            .collect();
        let &least = uppers
            .iter()
            .find(|&&k| uppers.iter().all(|&u| self.leq_idx(k, u)))
            .ok_or_else(|| Error::Domain("no least upper bound found".into()))?;
        Ok(self.elements[least].clone())
    }

    fn require_element(&self, pi: &Partition) -> Result<usize> {
        self.index_of(pi).ok_or_else(|| {
            Error::Domain(format!(
                "{pi} is not an element of the lattice for {}",
                self.chi
            ))
        })
    }
}

#[derive(Serialize, Deserialize)]
struct CachedLattice {
    chi: String,
    elements: Vec<String>,
}

fn disk_cache_path(chi: &ChiMap) -> Option<std::path::PathBuf> {
    let dir = std::env::var_os("IBNC_CACHE_DIR")?;
    Some(std::path::Path::new(&dir).join(format!("ibnc-{chi}.json")))
}

fn load_disk_cache(chi: &ChiMap) -> Option<Vec<Partition>> {
    let path = disk_cache_path(chi)?;
    let text = std::fs::read_to_string(path).ok()?;
    let cached: CachedLattice = serde_json::from_str(&text).ok()?;
    if cached.chi != chi.to_string() || cached.elements.is_empty() {
        return None;
    }
    cached.elements.iter().map(|s| s.parse().ok()).collect()
}

fn store_disk_cache(chi: &ChiMap, elements: &[Partition]) {
    let Some(path) = disk_cache_path(chi) else {
        return;
    };
    let cached = CachedLattice {
        chi: chi.to_string(),
        elements: elements.iter().map(|p| p.to_string()).collect(),
    };
    if let Some(parent) = path.parent() {
        let _ = std::fs::create_dir_all(parent);
    }
    if let Ok(text) = serde_json::to_string(&cached) {
        let _ = std::fs::write(path, text);
    }
}

static LATTICE_CACHE: OnceLock<RwLock<HashMap<String, Arc<IbncLattice>>>> = OnceLock::new();

/// The lattice for a labeling, from the process-wide cache. Lookups are
/// concurrent; construction of a missing entry is serialized. When
/// `IBNC_CACHE_DIR` is set, enumerated element lists are persisted there and
/// reused across processes.
pub fn lattice_for(chi: &ChiMap) -> Result<Arc<IbncLattice>> {
    let cache = LATTICE_CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    let key = chi.to_string();
    if let Some(found) = cache.read().unwrap().get(&key) {
        return Ok(Arc::clone(found));
    }
    let elements = load_disk_cache(chi);
    let from_disk = elements.is_some();
    let lattice = Arc::new(IbncLattice::with_elements(chi.clone(), elements)?);
    if !from_disk {
        store_disk_cache(chi, lattice.elements());
    }
    let mut write = cache.write().unwrap();
    let entry = write.entry(key).or_insert_with(|| Arc::clone(&lattice));
    Ok(Arc::clone(entry))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chi::enumerate_ibnc;

    fn chi(s: &str) -> ChiMap {
        s.parse().unwrap()
    }

    fn p(s: &str) -> Partition {
        s.parse().unwrap()
    }

    fn chi8() -> ChiMap {
        chi("llrcrcrl")
    }

    #[test]
    fn c_positions_examples() {
        assert_eq!(c_positions(&chi8()), vec![1, 4, 6, 8]);
        assert_eq!(c_positions(&chi("lrlr")), vec![1, 4]);
        assert_eq!(c_positions(&chi("clc")), vec![1, 3]);
        assert_eq!(c_positions(&chi("l")), vec![1, 1]);
    }

    #[test]
    fn count_formula_examples() {
        assert_eq!(ibnc_count_formula(&chi8()), 350);
        assert_eq!(ibnc_count_formula(&chi("llll")), catalan(4));
        assert_eq!(ibnc_count_formula(&chi("lccl")), 2 * 2 * 2);
    }

    #[test]
    fn decompose_examples() {
        let pi3 = p("1,2|3,4,6,8|5|7");
        let parts = decompose(&pi3, &chi8()).unwrap();
        assert_eq!(parts.len(), 3);
        assert_eq!(parts[0].to_string(), "1,2|3,4");
        assert_eq!(parts[1].to_string(), "4,6|5");
        assert_eq!(parts[2].to_string(), "6,8|7");

        let top = decompose(&Partition::full(8), &chi8()).unwrap();
        assert!(top.iter().all(|part| part.blocks().len() == 1));
        let bot = decompose(&Partition::singletons(8), &chi8()).unwrap();
        assert!(bot
            .iter()
            .all(|part| part.blocks().iter().all(|b| b.len() == 1)));

        let pi2 = p("1,2|3,5,7,8|4,6");
        assert!(decompose(&pi2, &chi8()).is_err());
    }

    #[test]
    fn compose_round_trips_every_element() {
        for s in ["llrcrcrl", "llll", "lrlr", "lccr", "crclc"] {
            let cm = chi(s);
            for pi in enumerate_ibnc(&cm).unwrap() {
                let parts = decompose(&pi, &cm).unwrap();
                assert_eq!(compose(&parts, &cm).unwrap(), pi, "{s} / {pi}");
            }
        }
    }

    #[test]
    fn compose_glues_across_shared_points() {
        let cm = chi("lclcl");
        // All-singleton parts: the shared points stay singletons, giving 0_n.
        let ivs = intervals(&cm);
        let parts: Vec<SubPartition> = ivs
            .iter()
            .map(|&(a, b)| {
                SubPartition::new((a..=b).collect(), (a..=b).map(|x| vec![x]).collect()).unwrap()
            })
            .collect();
        assert_eq!(compose(&parts, &cm).unwrap(), Partition::singletons(5));
        // One-block parts chain through every shared point, giving 1_n.
        let parts: Vec<SubPartition> = ivs
            .iter()
            .map(|&(a, b)| SubPartition::full((a..=b).collect()).unwrap())
            .collect();
        assert_eq!(compose(&parts, &cm).unwrap(), Partition::full(5));
        // A part that crosses on its interval is rejected.
        let bad = vec![
            SubPartition::new((1..=5).collect(), vec![vec![1, 3], vec![2, 4], vec![5]]).unwrap(),
        ];
        assert!(compose(&bad, &chi("lllll")).is_err());
        // Wrong number of parts for the labeling.
        assert!(compose(&parts[..1], &cm).is_err());
    }

    #[test]
    fn join_examples() {
        let lat = lattice_for(&chi("lll")).unwrap();
        let j = lat.join(&p("1,3|2"), &p("1|2,3")).unwrap();
        assert_eq!(j, Partition::full(3));
        let pi = p("1,2|3");
        assert_eq!(lat.join(&pi, &Partition::singletons(3)).unwrap(), pi);
        assert_eq!(
            lat.join(&pi, &Partition::full(3)).unwrap(),
            Partition::full(3)
        );
    }

    #[test]
    fn join_matches_bruteforce_and_is_least() {
        for s in ["llrcrcrl", "lclc", "rcl", "lllll"] {
            let cm = chi(s);
            let lat = lattice_for(&cm).unwrap();
            let n = lat.len();
            for i in (0..n).step_by(3) {
                for j in (0..n).step_by(2) {
                    let a = lat.element(i).clone();
                    let b = lat.element(j).clone();
                    let fast = lat.join(&a, &b).unwrap();
                    let brute = lat.join_bruteforce(&a, &b).unwrap();
                    assert_eq!(fast, brute, "{s}: join({a}, {b})");
                    assert!(a.leq(&fast).unwrap() && b.leq(&fast).unwrap());
                    for k in 0..n {
                        if lat.leq_idx(i, k) && lat.leq_idx(j, k) {
                            let c = lat.element(k);
                            assert!(fast.leq(c).unwrap(), "{s}: {fast} does not precede {c}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn down_interval_examples() {
        let lat = lattice_for(&chi8()).unwrap();
        assert_eq!(
            lat.down_interval(&Partition::singletons(8)).unwrap(),
            vec![Partition::singletons(8)]
        );
        assert_eq!(
            lat.down_interval(&Partition::full(8)).unwrap().len(),
            lat.len()
        );

        // Cardinality factors over the blocks of the reference partition:
        // 2 from {1,2} and 8 from {3,4,6,8}, the singletons contributing 1.
        let pi3 = p("1,2|3,4,6,8|5|7");
        let down = lat.down_interval(&pi3).unwrap();
        let mut product = 1usize;
        for block in pi3.blocks() {
            let sub_chi = chi8().restrict(block).unwrap();
            product *= enumerate_ibnc(&sub_chi).unwrap().len();
        }
        assert_eq!(down.len(), product);
        assert_eq!(down.len(), 16);
        assert!(lat.down_interval(&p("1,8|2,3,4,5,6,7")).is_err());
    }

    #[test]
    fn down_interval_factors_over_blocks() {
        for s in ["lcr", "llrr", "lclc", "rclcr"] {
            let cm = chi(s);
            let lat = lattice_for(&cm).unwrap();
            for pi in lat.elements() {
                let mut product = 1usize;
                for block in pi.blocks() {
                    let sub_chi = cm.restrict(block).unwrap();
                    product *= enumerate_ibnc(&sub_chi).unwrap().len();
                }
                assert_eq!(lat.down_interval(pi).unwrap().len(), product, "{s} / {pi}");
            }
        }
    }

    #[test]
    fn refinement_membership_criterion() {
        // For sigma <= pi with pi in the lattice: sigma is in the lattice
        // exactly when each restriction to a block of pi is admissible there.
        for s in ["lclr", "lcrcl", "llrcl"] {
            let cm = chi(s);
            let lat = lattice_for(&cm).unwrap();
            let all = crate::partitions::enumerate_partitions(cm.n()).unwrap();
            for pi in lat.elements() {
                for sigma in &all {
                    if !sigma.leq(pi).unwrap() {
                        continue;
                    }
                    let blockwise = pi.blocks().iter().all(|block| {
                        let sub_chi = cm.restrict(block).unwrap();
                        let restricted = sigma.restrict(block).unwrap().relabel();
                        is_ibnc(&restricted, &sub_chi).unwrap()
                    });
                    assert_eq!(
                        is_ibnc(sigma, &cm).unwrap(),
                        blockwise,
                        "{s}: {sigma} vs {pi}"
                    );
                }
            }
        }
    }

    #[test]
    fn disk_cache_roundtrip() {
        let dir = std::env::temp_dir().join(format!("ibnc-cache-test-{}", std::process::id()));
        let cm = chi("lcrl");
        let elements = enumerate_ibnc(&cm).unwrap();
        store_disk_cache_in(&dir, &cm, &elements);
        let loaded = load_disk_cache_from(&dir, &cm).unwrap();
        assert_eq!(loaded, elements);
        let _ = std::fs::remove_dir_all(&dir);
    }

    fn store_disk_cache_in(dir: &std::path::Path, cm: &ChiMap, elements: &[Partition]) {
        let cached = CachedLattice {
            chi: cm.to_string(),
            elements: elements.iter().map(|p| p.to_string()).collect(),
        };
        std::fs::create_dir_all(dir).unwrap();
        let path = dir.join(format!("ibnc-{cm}.json"));
        std::fs::write(path, serde_json::to_string(&cached).unwrap()).unwrap();
    }

    fn load_disk_cache_from(dir: &std::path::Path, cm: &ChiMap) -> Option<Vec<Partition>> {
        let text = std::fs::read_to_string(dir.join(format!("ibnc-{cm}.json"))).ok()?;
        let cached: CachedLattice = serde_json::from_str(&text).ok()?;
        cached.elements.iter().map(|s| s.parse().ok()).collect()
    }
}
