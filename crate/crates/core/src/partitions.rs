//! Set partitions of `{1..n}` in canonical block form: enumeration, the
//! reversed refinement order, meet, restriction to index subsets, and kernels
//! of label sequences.
//!
//! Canonical form: every block is internally sorted and blocks are listed in
//! increasing order of their minimum element. All equality, hashing and
//! ordering go through this form.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Default ground-set cap for exhaustive enumeration. Bell(10) = 115975.
pub const DEFAULT_ENUMERATION_CAP: usize = 10;

/// A partition of `{1..n}` into disjoint nonempty blocks, kept in canonical
/// form (blocks sorted, blocks ordered by least element).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Builds a partition from arbitrary blocks, validating disjointness and
    /// coverage of `{1..n}` and normalizing to canonical form.
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "ground-set size must be >= 1".into(),
            ));
        }
        let mut seen = vec![false; n + 1];
        let mut canonical: Vec<Vec<usize>> = Vec::with_capacity(blocks.len());
        for block in blocks {
            if block.is_empty() {
                return Err(Error::InvalidArgument("empty block".into()));
            }
            let mut b = block;
            b.sort_unstable();
            for &x in &b {
                if x == 0 || x > n {
                    return Err(Error::InvalidArgument(format!(
                        "element {x} outside ground set 1..={n}"
                    )));
                }
                if seen[x] {
                    return Err(Error::InvalidArgument(format!("element {x} repeated")));
                }
                seen[x] = true;
            }
            canonical.push(b);
        }
        if let Some(missing) = (1..=n).find(|&x| !seen[x]) {
            return Err(Error::InvalidArgument(format!(
                "element {missing} not covered"
            )));
        }
        canonical.sort_unstable_by_key(|b| b[0]);
        Ok(Partition {
            n,
            blocks: canonical,
        })
    }

    /// The discrete partition `0_n` (all singletons).
    pub fn singletons(n: usize) -> Self {
        assert!(n >= 1, "ground-set size must be >= 1");
        Partition {
            n,
            blocks: (1..=n).map(|x| vec![x]).collect(),
        }
    }

    /// The one-block partition `1_n`.
    pub fn full(n: usize) -> Self {
        assert!(n >= 1, "ground-set size must be >= 1");
        Partition {
            n,
            blocks: vec![(1..=n).collect()],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Block index of each element; entry `k-1` holds the block of element `k`.
    /// Blocks are numbered in canonical order starting at 0.
    pub fn block_ids(&self) -> Vec<usize> {
        let mut ids = vec![0usize; self.n];
        for (b, block) in self.blocks.iter().enumerate() {
            for &x in block {
                ids[x - 1] = b;
            }
        }
        ids
    }

    /// Reversed refinement order: `self <= other` iff every block of `self`
    /// is contained in some block of `other`.
    pub fn leq(&self, other: &Partition) -> Result<bool> {
        if self.n != other.n {
            return Err(Error::SizeMismatch(format!(
                "partitions of different ground sets ({} vs {})",
                self.n, other.n
            )));
        }
        let ids = other.block_ids();
        Ok(self.blocks.iter().all(|block| {
            let id = ids[block[0] - 1];
            block[1..].iter().all(|&x| ids[x - 1] == id)
        }))
    }

    /// Greatest lower bound in `P(n)`: blocks are the nonempty pairwise
    /// intersections of blocks of the two arguments.
    pub fn meet(&self, other: &Partition) -> Result<Partition> {
        if self.n != other.n {
            return Err(Error::SizeMismatch(format!(
                "partitions of different ground sets ({} vs {})",
                self.n, other.n
            )));
        }
        let a = self.block_ids();
        let b = other.block_ids();
        let mut groups: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for x in 1..=self.n {
            groups.entry((a[x - 1], b[x - 1])).or_default().push(x);
        }
        let mut blocks: Vec<Vec<usize>> = groups.into_values().collect();
        blocks.sort_unstable_by_key(|bl| bl[0]);
        Ok(Partition { n: self.n, blocks })
    }

    /// Restriction to a subset `S` of the ground set. Blocks are the nonempty
    /// traces `V ∩ S`; elements keep their original indices.
    pub fn restrict(&self, ground: &[usize]) -> Result<SubPartition> {
        if ground.is_empty() {
            return Err(Error::InvalidArgument(
                "restriction to the empty set".into(),
            ));
        }
        let mut sorted = ground.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != ground.len() {
            return Err(Error::InvalidArgument(
                "restriction set has repeated elements".into(),
            ));
        }
        if sorted[0] == 0 || *sorted.last().unwrap() > self.n {
            return Err(Error::InvalidArgument(format!(
                "restriction set not contained in 1..={}",
                self.n
            )));
        }
        let member: std::collections::HashSet<usize> = sorted.iter().copied().collect();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for block in &self.blocks {
            let trace: Vec<usize> = block
                .iter()
                .copied()
                .filter(|x| member.contains(x))
                .collect();
            if !trace.is_empty() {
                blocks.push(trace);
            }
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(SubPartition {
            ground: sorted,
            blocks,
        })
    }

    /// Kernel of a label sequence: `i ~ j` iff `labels[i-1] == labels[j-1]`.
    pub fn kernel<T: Eq + Hash>(labels: &[T]) -> Result<Partition> {
        if labels.is_empty() {
            return Err(Error::InvalidArgument(
                "kernel of an empty label sequence".into(),
            ));
        }
        let mut groups: HashMap<&T, Vec<usize>> = HashMap::new();
        for (i, label) in labels.iter().enumerate() {
            groups.entry(label).or_default().push(i + 1);
        }
        let mut blocks: Vec<Vec<usize>> = groups.into_values().collect();
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(Partition {
            n: labels.len(),
            blocks,
        })
    }

    /// Whether the partition is noncrossing with respect to the total order
    /// given as a permutation of `{1..n}` (position k = k-th smallest).
    ///
    /// Single left-to-right sweep over the order keeping a stack of open
    /// blocks; a block revisited while not on top witnesses a crossing.
    pub fn is_noncrossing_under(&self, order: &[usize]) -> Result<bool> {
        if order.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "order has length {}, partition has ground set 1..={}",
                order.len(),
                self.n
            )));
        }
        let mut seen = vec![false; self.n + 1];
        for &x in order {
            if x == 0 || x > self.n || seen[x] {
                return Err(Error::InvalidArgument(
                    "order is not a permutation of the ground set".into(),
                ));
            }
            seen[x] = true;
        }
        let ids = self.block_ids();
        let mut remaining: Vec<usize> = self.blocks.iter().map(|b| b.len()).collect();
        let mut open = vec![false; self.blocks.len()];
        let mut stack: Vec<usize> = Vec::new();
        for &x in order {
            let b = ids[x - 1];
            match stack.last() {
                Some(&top) if top == b => {}
                _ if open[b] => return Ok(false),
                _ => {
                    stack.push(b);
                    open[b] = true;
                }
            }
            remaining[b] -= 1;
            while let Some(&top) = stack.last() {
                if remaining[top] == 0 {
                    stack.pop();
                } else {
                    break;
                }
            }
        }
        Ok(true)
    }
}

/// Textual form: blocks as comma-separated sorted integers, separated by `|`,
/// e.g. `1,2|3,5,7,8|4,6`.
impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for block in &self.blocks {
            if !first {
                write!(f, "|")?;
            }
            first = false;
            let items: Vec<String> = block.iter().map(|x| x.to_string()).collect();
            write!(f, "{}", items.join(","))?;
        }
        Ok(())
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Parses the `1,2|3,5` form. The ground-set size is the largest element;
    /// the blocks must cover `1..=n` exactly.
    fn from_str(s: &str) -> Result<Self> {
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut max = 0usize;
        for part in s.split('|') {
            let mut block = Vec::new();
            for item in part.split(',') {
                let item = item.trim();
                if item.is_empty() {
                    return Err(Error::Parse(format!(
                        "empty element in partition string {s:?}"
                    )));
                }
                let x: usize = item.parse().map_err(|_| {
                    Error::Parse(format!("bad integer {item:?} in partition string"))
                })?;
                max = max.max(x);
                block.push(x);
            }
            blocks.push(block);
        }
        if max == 0 {
            return Err(Error::Parse("empty partition string".into()));
        }
        Partition::new(max, blocks).map_err(|e| Error::Parse(format!("{s:?}: {e}")))
    }
}

/// A partition of an arbitrary sorted index set (a restriction of a
/// [`Partition`] that keeps original indices rather than renumbering).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubPartition {
    ground: Vec<usize>,
    blocks: Vec<Vec<usize>>,
}

impl SubPartition {
    /// Builds a sub-partition over an explicit ground set, validating and
    /// canonicalizing just like [`Partition::new`].
    pub fn new(ground: Vec<usize>, blocks: Vec<Vec<usize>>) -> Result<Self> {
        if ground.is_empty() {
            return Err(Error::InvalidArgument("empty ground set".into()));
        }
        let mut g = ground;
        g.sort_unstable();
        g.dedup();
        let member: std::collections::HashSet<usize> = g.iter().copied().collect();
        let mut seen: std::collections::HashSet<usize> = std::collections::HashSet::new();
        let mut canonical: Vec<Vec<usize>> = Vec::with_capacity(blocks.len());
        for block in blocks {
            if block.is_empty() {
                return Err(Error::InvalidArgument("empty block".into()));
            }
            let mut b = block;
            b.sort_unstable();
            for &x in &b {
                if !member.contains(&x) {
                    return Err(Error::InvalidArgument(format!(
                        "element {x} outside the ground set"
                    )));
                }
                if !seen.insert(x) {
                    return Err(Error::InvalidArgument(format!("element {x} repeated")));
                }
            }
            canonical.push(b);
        }
        if seen.len() != g.len() {
            return Err(Error::InvalidArgument(
                "blocks do not cover the ground set".into(),
            ));
        }
        canonical.sort_unstable_by_key(|b| b[0]);
        Ok(SubPartition {
            ground: g,
            blocks: canonical,
        })
    }

    /// The one-block partition of a ground set.
    pub fn full(ground: Vec<usize>) -> Result<Self> {
        let blocks = vec![ground.clone()];
        SubPartition::new(ground, blocks)
    }

    pub fn ground(&self) -> &[usize] {
        &self.ground
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Order-preserving relabeling onto `{1..k}`: element `ground[i]` becomes
    /// `i+1`. Structure-dependent quantities (refinement order, Möbius values)
    /// are invariant under this map.
    pub fn relabel(&self) -> Partition {
        let rank: HashMap<usize, usize> = self
            .ground
            .iter()
            .enumerate()
            .map(|(i, &x)| (x, i + 1))
            .collect();
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.iter().map(|x| rank[x]).collect())
            .collect();
        Partition {
            n: self.ground.len(),
            blocks,
        }
    }
}

impl fmt::Display for SubPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for block in &self.blocks {
            if !first {
                write!(f, "|")?;
            }
            first = false;
            let items: Vec<String> = block.iter().map(|x| x.to_string()).collect();
            write!(f, "{}", items.join(","))?;
        }
        Ok(())
    }
}

/// All partitions of `{1..n}` in deterministic lexicographic order of their
/// restricted-growth strings, under the default cap.
pub fn enumerate_partitions(n: usize) -> Result<Vec<Partition>> {
    enumerate_partitions_capped(n, DEFAULT_ENUMERATION_CAP)
}

/// All partitions of `{1..n}` with an explicit cap.
pub fn enumerate_partitions_capped(n: usize, cap: usize) -> Result<Vec<Partition>> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "ground-set size must be >= 1".into(),
        ));
    }
    if n > cap {
        return Err(Error::SizeLimit { n, cap });
    }
    // Restricted-growth strings: a[0] = 0, a[i] <= max(a[0..i]) + 1.
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    enumerate_rgs(&mut rgs, 1, 0, &mut out);
    Ok(out)
}

fn enumerate_rgs(rgs: &mut Vec<usize>, pos: usize, max_used: usize, out: &mut Vec<Partition>) {
    let n = rgs.len();
    if pos == n {
        let num_blocks = max_used + 1;
        let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); num_blocks];
        for (i, &b) in rgs.iter().enumerate() {
            blocks[b].push(i + 1);
        }
        out.push(Partition { n, blocks });
        return;
    }
    for value in 0..=max_used + 1 {
        rgs[pos] = value;
        enumerate_rgs(rgs, pos + 1, max_used.max(value), out);
    }
}
