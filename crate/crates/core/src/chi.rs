//! Face labelings of word positions, the induced total order, and the
//! admissible partition families they carve out of `P(n)`.
//!
//! A [`ChiMap`] assigns each position one of three faces (left, right,
//! central). Left and central positions come first in increasing natural
//! order, right positions follow in decreasing natural order; that is the
//! total order [`ChiOrder`]. A partition is *interval-bi-noncrossing* (IBNC)
//! when it is noncrossing with respect to that order and any block straddling
//! a central position contains it.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::partitions::{enumerate_partitions_capped, Partition, DEFAULT_ENUMERATION_CAP};

/// One of the three faces a word position can belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Face {
    Left,
    Right,
    Central,
}

impl Face {
    pub fn as_char(self) -> char {
        match self {
            Face::Left => 'l',
            Face::Right => 'r',
            Face::Central => 'c',
        }
    }

    pub fn from_char(c: char) -> Result<Face> {
        match c {
            'l' | 'L' => Ok(Face::Left),
            'r' | 'R' => Ok(Face::Right),
            'c' | 'C' => Ok(Face::Central),
            other => Err(Error::Parse(format!(
                "invalid face character {other:?}, expected l, r or c"
            ))),
        }
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// A labeling of positions `1..=n` by faces. Textual form is a string over
/// `{l, r, c}`, e.g. `llrcrcrl`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChiMap {
    labels: Vec<Face>,
}

impl ChiMap {
    pub fn new(labels: Vec<Face>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidArgument(
                "face labeling must be nonempty".into(),
            ));
        }
        Ok(ChiMap { labels })
    }

    /// Constant labeling of length `n`.
    pub fn constant(n: usize, face: Face) -> Self {
        assert!(n >= 1);
        ChiMap {
            labels: vec![face; n],
        }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Face of position `k` (1-based).
    pub fn face(&self, k: usize) -> Face {
        self.labels[k - 1]
    }

    pub fn labels(&self) -> &[Face] {
        &self.labels
    }

    /// Positions carrying a given face, ascending.
    pub fn positions_of(&self, face: Face) -> Vec<usize> {
        (1..=self.n()).filter(|&k| self.face(k) == face).collect()
    }

    /// Restriction to a sorted index subset, relabeled onto `1..=k` in order.
    pub fn restrict(&self, ground: &[usize]) -> Result<ChiMap> {
        if ground.is_empty() {
            return Err(Error::InvalidArgument(
                "restriction to the empty set".into(),
            ));
        }
        let mut labels = Vec::with_capacity(ground.len());
        let mut prev = 0usize;
        for &x in ground {
            if x == 0 || x > self.n() {
                return Err(Error::InvalidArgument(format!(
                    "index {x} outside 1..={}",
                    self.n()
                )));
            }
            if x <= prev {
                return Err(Error::InvalidArgument(
                    "restriction set must be strictly increasing".into(),
                ));
            }
            prev = x;
            labels.push(self.face(x));
        }
        Ok(ChiMap { labels })
    }

    /// The induced total order.
    pub fn order(&self) -> ChiOrder {
        chi_order(self)
    }
}

impl fmt::Display for ChiMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for face in &self.labels {
            write!(f, "{face}")?;
        }
        Ok(())
    }
}

impl FromStr for ChiMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::Parse("empty face string".into()));
        }
        let labels = s.chars().map(Face::from_char).collect::<Result<Vec<_>>>()?;
        Ok(ChiMap { labels })
    }
}

/// The total order induced by a face labeling: left/central positions
/// ascending, then right positions descending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChiOrder {
    sequence: Vec<usize>,
}

impl ChiOrder {
    /// Position `k` holds the k-th smallest element (1-based indexing into the
    /// returned slice is 0-based).
    pub fn sequence(&self) -> &[usize] {
        &self.sequence
    }

    /// Rank of each element under the order; entry `k-1` is the 0-based rank
    /// of element `k`.
    pub fn ranks(&self) -> Vec<usize> {
        let mut ranks = vec![0usize; self.sequence.len()];
        for (r, &x) in self.sequence.iter().enumerate() {
            ranks[x - 1] = r;
        }
        ranks
    }
}

/// Builds the total order of a labeling.
pub fn chi_order(chi: &ChiMap) -> ChiOrder {
    let mut sequence: Vec<usize> = (1..=chi.n())
        .filter(|&k| chi.face(k) != Face::Right)
        .collect();
    let mut right: Vec<usize> = chi.positions_of(Face::Right);
    right.reverse();
    sequence.extend(right);
    ChiOrder { sequence }
}

/// Whether `pi` is noncrossing with respect to the order induced by `chi`.
pub fn is_chi_noncrossing(pi: &Partition, chi: &ChiMap) -> Result<bool> {
    if pi.n() != chi.n() {
        return Err(Error::SizeMismatch(format!(
            "partition of 1..={} against labeling of length {}",
            pi.n(),
            chi.n()
        )));
    }
    pi.is_noncrossing_under(chi_order(chi).sequence())
}

/// Whether every block of `pi` that straddles a central position contains it:
/// for all `i < j < k` with `i, k` in one block and `chi(j)` central, `j` lies
/// in that block.
pub fn is_chi_interval(pi: &Partition, chi: &ChiMap) -> Result<bool> {
    if pi.n() != chi.n() {
        return Err(Error::SizeMismatch(format!(
            "partition of 1..={} against labeling of length {}",
            pi.n(),
            chi.n()
        )));
    }
    let ids = pi.block_ids();
    for j in 1..=chi.n() {
        if chi.face(j) != Face::Central {
            continue;
        }
        for block in pi.blocks() {
            // A block straddles j exactly when min < j < max.
            if block[0] < j && *block.last().unwrap() > j && ids[j - 1] != ids[block[0] - 1] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Interval-bi-noncrossing: both conditions at once.
pub fn is_ibnc(pi: &Partition, chi: &ChiMap) -> Result<bool> {
    Ok(is_chi_noncrossing(pi, chi)? && is_chi_interval(pi, chi)?)
}

/// All IBNC partitions for a labeling, in the deterministic enumeration order
/// of `P(n)`, under the default cap.
pub fn enumerate_ibnc(chi: &ChiMap) -> Result<Vec<Partition>> {
    enumerate_ibnc_capped(chi, DEFAULT_ENUMERATION_CAP)
}

/// All IBNC partitions with an explicit cap.
pub fn enumerate_ibnc_capped(chi: &ChiMap, cap: usize) -> Result<Vec<Partition>> {
    let all = enumerate_partitions_capped(chi.n(), cap)?;
    let mut out = Vec::new();
    for pi in all {
        if is_ibnc(&pi, chi)? {
            out.push(pi);
        }
    }
    Ok(out)
}

/// Bi-noncrossing partitions: the special case of a labeling with no central
/// positions. Errors if a central label is present.
pub fn enumerate_bnc(chibar: &ChiMap) -> Result<Vec<Partition>> {
    if chibar.labels().contains(&Face::Central) {
        return Err(Error::InvalidArgument(
            "bi-noncrossing enumeration requires a labeling over {l, r} only".into(),
        ));
    }
    enumerate_ibnc(chibar)
}

/// Renders a monospace two-column diagram of a labeling: one row per index
/// top to bottom, left/central indices in the left column, right indices in
/// the right column. Central rows use a white node `o` and carry a dashed
/// rule; other nodes are `*`. With a partition, each node is annotated with
/// its 1-based block number.
pub fn render_diagram(chi: &ChiMap, pi: Option<&Partition>) -> Result<String> {
    if let Some(pi) = pi {
        if pi.n() != chi.n() {
            return Err(Error::SizeMismatch(format!(
                "partition of 1..={} against labeling of length {}",
                pi.n(),
                chi.n()
            )));
        }
    }
    let n = chi.n();
    let ids = pi.map(|p| p.block_ids());
    let node = |k: usize| -> String {
        let sym = if chi.face(k) == Face::Central {
            'o'
        } else {
            '*'
        };
        match &ids {
            Some(ids) => format!("{sym}:{}", ids[k - 1] + 1),
            None => sym.to_string(),
        }
    };
    let idx_w = n.to_string().len();
    let node_w = (1..=n).map(|k| node(k).len()).max().unwrap();
    let left_w = idx_w + 1 + node_w;
    let mut out = String::new();
    for k in 1..=n {
        let line = if chi.face(k) == Face::Right {
            format!("{:left_w$} | {:>node_w$} {:>idx_w$}", "", node(k), k)
        } else {
            let cell = format!("{:>idx_w$} {:<node_w$}", k, node(k));
            if chi.face(k) == Face::Central {
                let rule = "-".repeat(node_w + idx_w + 1);
                format!("{cell} +-{rule}")
            } else {
                format!("{cell} |")
            }
        };
        out.push_str(line.trim_end());
        out.push('\n');
    }
    Ok(out)
}

/// Catalan number `C(k)`.
pub fn catalan(k: usize) -> u64 {
    let mut c: u64 = 1;
    for i in 0..k {
        c = c * 2 * (2 * i as u64 + 1) / (i as u64 + 2);
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chi(s: &str) -> ChiMap {
        s.parse().unwrap()
    }

    fn p(s: &str) -> Partition {
        s.parse().unwrap()
    }

    /// The n = 8 reference labeling: left at 1, 2, 8, central at 4, 6, right
    /// at 3, 5, 7.
    fn chi8() -> ChiMap {
        chi("llrcrcrl")
    }

    #[test]
    fn order_examples() {
        assert_eq!(chi("llll").order().sequence(), &[1, 2, 3, 4]);
        assert_eq!(chi("rrrr").order().sequence(), &[4, 3, 2, 1]);
        assert_eq!(chi8().order().sequence(), &[1, 2, 4, 6, 8, 7, 5, 3]);
    }

    #[test]
    fn chi_noncrossing_examples() {
        let pi2 = p("1,2|3,5,7,8|4,6");
        let pi1 = p("1,8|2,3,4,5,6,7");
        assert!(is_chi_noncrossing(&pi2, &chi8()).unwrap());
        assert!(!is_chi_noncrossing(&pi1, &chi8()).unwrap());
        assert!(is_chi_noncrossing(&Partition::singletons(8), &chi8()).unwrap());
        assert!(is_chi_noncrossing(&Partition::singletons(3), &chi8()).is_err());
    }

    #[test]
    fn chi_interval_examples() {
        let pi3 = p("1,2|3,4,6,8|5|7");
        let pi2 = p("1,2|3,5,7,8|4,6");
        assert!(is_chi_interval(&pi3, &chi8()).unwrap());
        assert!(!is_chi_interval(&pi2, &chi8()).unwrap());
        // No central labels: the condition is vacuous.
        let pi = p("1,4|2,3");
        assert!(is_chi_interval(&pi, &chi("lrlr")).unwrap());
    }

    #[test]
    fn ibnc_examples() {
        let pi3 = p("1,2|3,4,6,8|5|7");
        let pi1 = p("1,8|2,3,4,5,6,7");
        assert!(is_ibnc(&pi3, &chi8()).unwrap());
        assert!(!is_ibnc(&pi1, &chi8()).unwrap());
        assert!(is_ibnc(&Partition::full(8), &chi8()).unwrap());
    }

    #[test]
    fn enumerate_ibnc_examples() {
        let got = enumerate_ibnc(&chi("lcl")).unwrap();
        assert_eq!(got.len(), 4);
        assert!(!got.contains(&p("1,3|2")));

        // 350 = C(4) * C(3) * C(3) from the three central-bounded intervals.
        assert_eq!(enumerate_ibnc(&chi8()).unwrap().len(), 350);

        assert_eq!(
            enumerate_ibnc(&chi("llll")).unwrap().len(),
            catalan(4) as usize
        );
    }

    #[test]
    fn enumerate_bnc_examples() {
        assert_eq!(enumerate_bnc(&chi("lr")).unwrap().len(), 2);
        assert_eq!(
            enumerate_bnc(&chi("lrlr")).unwrap().len(),
            catalan(4) as usize
        );
        assert_eq!(
            enumerate_bnc(&chi("rlrll")).unwrap().len(),
            catalan(5) as usize
        );
        assert!(enumerate_bnc(&chi("lcr")).is_err());
    }

    #[test]
    fn bnc_count_is_catalan_for_all_maps_up_to_7() {
        for n in 1..=7usize {
            for bits in 0..(1u32 << n) {
                let labels: Vec<Face> = (0..n)
                    .map(|k| {
                        if bits >> k & 1 == 1 {
                            Face::Right
                        } else {
                            Face::Left
                        }
                    })
                    .collect();
                let cb = ChiMap::new(labels).unwrap();
                assert_eq!(
                    enumerate_bnc(&cb).unwrap().len(),
                    catalan(n) as usize,
                    "{cb}"
                );
            }
        }
    }

    #[test]
    fn central_at_ends_only_reduces_to_noncrossing_filter() {
        // With central labels confined to the endpoints, the interval
        // condition is vacuous and IBNC coincides with the noncrossing family.
        for n in 1..=6usize {
            for ends in 0..9usize {
                for bits in 0..(1u32 << n.saturating_sub(2)) {
                    let mut labels = Vec::with_capacity(n);
                    let faces = [Face::Left, Face::Right, Face::Central];
                    labels.push(faces[ends % 3]);
                    for k in 0..n.saturating_sub(2) {
                        labels.push(if bits >> k & 1 == 1 {
                            Face::Right
                        } else {
                            Face::Left
                        });
                    }
                    if n >= 2 {
                        labels.push(faces[ends / 3]);
                    }
                    let cm = ChiMap::new(labels).unwrap();
                    let ibnc = enumerate_ibnc(&cm).unwrap();
                    let nc: Vec<Partition> = crate::partitions::enumerate_partitions(n)
                        .unwrap()
                        .into_iter()
                        .filter(|pi| is_chi_noncrossing(pi, &cm).unwrap())
                        .collect();
                    assert_eq!(ibnc, nc, "{cm}");
                }
            }
        }
    }

    #[test]
    fn all_interior_central_gives_interval_partitions() {
        for n in 2..=7usize {
            let mut labels = vec![Face::Central; n];
            labels[0] = Face::Left;
            labels[n - 1] = Face::Right;
            let cm = ChiMap::new(labels).unwrap();
            let ibnc = enumerate_ibnc(&cm).unwrap();
            for pi in &ibnc {
                // Interval partition: every block is a contiguous range.
                for block in pi.blocks() {
                    let (lo, hi) = (block[0], *block.last().unwrap());
                    assert_eq!(block.len(), hi - lo + 1, "{pi} under {cm}");
                }
            }
            assert_eq!(ibnc.len(), 1 << (n - 1));
        }
    }

    #[test]
    fn diagram_examples() {
        let two = render_diagram(&chi("lr"), None).unwrap();
        let lines: Vec<&str> = two.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("1 *"));
        assert!(lines[1].ends_with("* 2"));

        let pi3 = p("1,2|3,4,6,8|5|7");
        let dia = render_diagram(&chi8(), Some(&pi3)).unwrap();
        let lines: Vec<&str> = dia.lines().collect();
        assert_eq!(lines.len(), 8);
        let expected_blocks = [1, 1, 2, 2, 3, 2, 4, 2];
        for (k, line) in lines.iter().enumerate() {
            assert!(
                line.contains(&format!(":{}", expected_blocks[k])),
                "row {}: {line}",
                k + 1
            );
        }
        // Central rows are flagged.
        assert!(lines[3].contains('o') && lines[3].contains("--"));
        assert!(lines[5].contains('o') && lines[5].contains("--"));
        // Right-face rows sit in the right column.
        assert!(lines[2].trim_start().starts_with('|'));

        let all_c = render_diagram(&chi("ccc"), None).unwrap();
        assert_eq!(all_c.matches('o').count(), 3);
    }

    #[test]
    fn parse_display_roundtrip() {
        for s in ["l", "llrcrcrl", "rrr", "c"] {
            assert_eq!(chi(s).to_string(), s);
        }
        assert!("".parse::<ChiMap>().is_err());
        assert!("lxr".parse::<ChiMap>().is_err());
    }

    #[test]
    fn restrict_keeps_label_order() {
        let cm = chi8();
        let r = cm.restrict(&[3, 4, 6, 8]).unwrap();
        assert_eq!(r.to_string(), "rccl");
        assert!(cm.restrict(&[4, 3]).is_err());
        assert!(cm.restrict(&[]).is_err());
    }
}
