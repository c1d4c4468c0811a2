//! Operator words, moment functionals, the partitioned functional, cumulants
//! built by Möbius inversion over the admissible lattice, the
//! moment/cumulant transforms in both directions, the kernel-constrained
//! moment recursion, mixed-cumulant vanishing reports, and additive
//! convolution in cumulant coordinates.

use std::collections::HashMap;
use std::fmt;

use num::{BigInt, BigRational, One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::chi::{is_ibnc, ChiMap, Face};
use crate::error::{Error, Result};
use crate::lattice::{lattice_for, IbncLattice};
use crate::partitions::Partition;

/// One position of an operator word: which algebra family it comes from,
/// which face within the family, and an opaque tag distinguishing elements of
/// one face (for example `creation` / `annihilation`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub index: String,
    pub face: Face,
    pub tag: String,
}

impl Letter {
    pub fn new(index: impl Into<String>, face: Face, tag: impl Into<String>) -> Self {
        Letter {
            index: index.into(),
            face,
            tag: tag.into(),
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.index, self.face, self.tag)
    }
}

/// A nonempty sequence of letters. The face sequence induces the word's
/// labeling and the index sequence induces its kernel partition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn new(letters: Vec<Letter>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::InvalidArgument("word must be nonempty".into()));
        }
        Ok(Word { letters })
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// The labeling induced by the letters' faces.
    pub fn chi(&self) -> ChiMap {
        ChiMap::new(self.letters.iter().map(|l| l.face).collect()).expect("word is nonempty")
    }

    /// Kernel of the index sequence: positions with equal algebra index share
    /// a block.
    pub fn omega_kernel(&self) -> Partition {
        let indices: Vec<&str> = self.letters.iter().map(|l| l.index.as_str()).collect();
        Partition::kernel(&indices).expect("word is nonempty")
    }

    /// Whether all letters come from one algebra family.
    pub fn constant_index(&self) -> bool {
        self.letters
            .iter()
            .all(|l| l.index == self.letters[0].index)
    }

    /// Subword at the given sorted 1-based positions.
    pub fn subword(&self, positions: &[usize]) -> Word {
        Word {
            letters: positions
                .iter()
                .map(|&p| self.letters[p - 1].clone())
                .collect(),
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// An oracle assigning an exact rational to every operator word over a
/// declared alphabet, up to a declared length. Values must exist for every
/// subword (arbitrary subsequence) of a valid query, because the partitioned
/// functional evaluates block subwords.
pub trait MomentFunctional: Sync {
    fn letters(&self) -> &[Letter];
    fn max_len(&self) -> usize;
    fn moment(&self, word: &Word) -> Result<BigRational>;
}

/// An oracle for one-block cumulants of arbitrary subwords; the labeling is
/// the one induced by the word.
pub trait CumulantOracle: Sync {
    fn kappa(&self, word: &Word) -> Result<BigRational>;
}

/// A moment functional backed by an explicit table keyed by letter sequences.
#[derive(Debug, Clone)]
pub struct MomentTable {
    letters: Vec<Letter>,
    values: HashMap<Vec<usize>, BigRational>,
    max_len: usize,
}

impl MomentTable {
    pub fn new(letters: Vec<Letter>) -> Self {
        MomentTable {
            letters,
            values: HashMap::new(),
            max_len: 0,
        }
    }

    fn letter_id(&self, letter: &Letter) -> Result<usize> {
        self.letters
            .iter()
            .position(|l| l == letter)
            .ok_or_else(|| {
                Error::InvalidArgument(format!("letter {letter} not in the table alphabet"))
            })
    }

    fn key_for(&self, word: &Word) -> Result<Vec<usize>> {
        word.letters().iter().map(|l| self.letter_id(l)).collect()
    }

    pub fn insert(&mut self, word: &Word, value: BigRational) -> Result<()> {
        let key = self.key_for(word)?;
        self.max_len = self.max_len.max(key.len());
        self.values.insert(key, value);
        Ok(())
    }

    /// Inserts by letter indices into the alphabet.
    pub fn insert_indices(&mut self, key: Vec<usize>, value: BigRational) -> Result<()> {
        if key.iter().any(|&i| i >= self.letters.len()) {
            return Err(Error::InvalidArgument("letter index out of range".into()));
        }
        if key.is_empty() {
            return Err(Error::InvalidArgument(
                "the empty word is not a queryable moment".into(),
            ));
        }
        self.max_len = self.max_len.max(key.len());
        self.values.insert(key, value);
        Ok(())
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &BigRational)> {
        self.values.iter()
    }

    pub fn word_for(&self, key: &[usize]) -> Word {
        Word {
            letters: key.iter().map(|&i| self.letters[i].clone()).collect(),
        }
    }
}

impl MomentFunctional for MomentTable {
    fn letters(&self) -> &[Letter] {
        &self.letters
    }

    fn max_len(&self) -> usize {
        self.max_len
    }

    fn moment(&self, word: &Word) -> Result<BigRational> {
        let key = self
            .key_for(word)
            .map_err(|_| Error::OracleGap(word.to_string()))?;
        self.values
            .get(&key)
            .cloned()
            .ok_or_else(|| Error::OracleGap(word.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
struct TableEntryJson {
    word: Vec<usize>,
    value: String,
}

#[derive(Serialize, Deserialize)]
struct LetterJson {
    index: String,
    face: String,
    tag: String,
}

/// On-disk table form: letters plus entries keyed by letter indices, values
/// as exact rational strings. Either a moment table or a cumulant table.
#[derive(Serialize, Deserialize)]
struct TableJson {
    letters: Vec<LetterJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    moments: Option<Vec<TableEntryJson>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cumulants: Option<Vec<TableEntryJson>>,
}

/// Which of the two table kinds a file holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    Moments,
    Cumulants,
}

impl MomentTable {
    /// Serializes deterministically: entries sorted by length then
    /// lexicographically, values in reduced `p/q` form.
    pub fn to_json(&self, kind: TableKind) -> String {
        let mut keys: Vec<&Vec<usize>> = self.values.keys().collect();
        keys.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let entries: Vec<TableEntryJson> = keys
            .into_iter()
            .map(|k| TableEntryJson {
                word: k.clone(),
                value: self.values[k].to_string(),
            })
            .collect();
        let letters = self
            .letters
            .iter()
            .map(|l| LetterJson {
                index: l.index.clone(),
                face: l.face.to_string(),
                tag: l.tag.clone(),
            })
            .collect();
        let table = match kind {
            TableKind::Moments => TableJson {
                letters,
                moments: Some(entries),
                cumulants: None,
            },
            TableKind::Cumulants => TableJson {
                letters,
                moments: None,
                cumulants: Some(entries),
            },
        };
        let mut text = serde_json::to_string_pretty(&table).expect("table serialization");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<(Self, TableKind)> {
        let table: TableJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("table file: {e}")))?;
        let letters = table
            .letters
            .into_iter()
            .map(|l| {
                let mut chars = l.face.chars();
                let c = chars
                    .next()
                    .ok_or_else(|| Error::Parse("empty face in letter".into()))?;
                if chars.next().is_some() {
                    return Err(Error::Parse(format!("bad face {:?} in letter", l.face)));
                }
                Ok(Letter::new(l.index, Face::from_char(c)?, l.tag))
            })
            .collect::<Result<Vec<_>>>()?;
        let (entries, kind) = match (table.moments, table.cumulants) {
            (Some(e), None) => (e, TableKind::Moments),
            (None, Some(e)) => (e, TableKind::Cumulants),
            _ => {
                return Err(Error::Parse(
                    "table file must hold exactly one of \"moments\" or \"cumulants\"".into(),
                ))
            }
        };
        let mut out = MomentTable::new(letters);
        for entry in entries {
            let value: BigRational = entry
                .value
                .parse()
                .map_err(|_| Error::Parse(format!("bad rational {:?}", entry.value)))?;
            out.insert_indices(entry.word, value)?;
        }
        Ok((out, kind))
    }
}

/// A random moment table over an alphabet: independent small rationals for
/// every word up to `max_n`. Used by the randomized verification suites.
pub fn random_moment_table(letters: Vec<Letter>, max_n: usize, rng: &mut impl Rng) -> MomentTable {
    let mut table = MomentTable::new(letters);
    let alphabet = table.letters.len();
    for len in 1..=max_n {
        let mut key = vec![0usize; len];
        loop {
            let numer = rng.gen_range(-9i64..=9);
            let denom = rng.gen_range(1i64..=4);
            table
                .insert_indices(
                    key.clone(),
                    BigRational::new(BigInt::from(numer), BigInt::from(denom)),
                )
                .expect("valid key");
            // Odometer increment over the alphabet.
            let mut pos = len;
            loop {
                if pos == 0 {
                    break;
                }
                key[pos - 1] += 1;
                if key[pos - 1] < alphabet {
                    break;
                }
                key[pos - 1] = 0;
                pos -= 1;
            }
            if pos == 0 {
                break;
            }
        }
    }
    table
}

/// All words over an alphabet with lengths in `1..=max_n`, in deterministic
/// order (shorter first, then lexicographic by letter index).
pub fn words_up_to(letters: &[Letter], max_n: usize) -> Vec<Word> {
    let mut out = Vec::new();
    for len in 1..=max_n {
        let mut key = vec![0usize; len];
        loop {
            out.push(Word {
                letters: key.iter().map(|&i| letters[i].clone()).collect(),
            });
            let mut pos = len;
            loop {
                if pos == 0 {
                    break;
                }
                key[pos - 1] += 1;
                if key[pos - 1] < letters.len() {
                    break;
                }
                key[pos - 1] = 0;
                pos -= 1;
            }
            if pos == 0 {
                break;
            }
        }
    }
    out
}

/// The partitioned functional: the product over the blocks of `pi` of the
/// moment of the block subword (block positions taken in natural order).
pub fn phi_partitioned(
    phi: &dyn MomentFunctional,
    pi: &Partition,
    word: &Word,
) -> Result<BigRational> {
    if pi.n() != word.len() {
        return Err(Error::SizeMismatch(format!(
            "partition of 1..={} against a word of length {}",
            pi.n(),
            word.len()
        )));
    }
    let mut product = BigRational::one();
    for block in pi.blocks() {
        product *= phi.moment(&word.subword(block))?;
    }
    Ok(product)
}

/// The cumulant attached to a labeling and an admissible partition: the
/// Möbius-weighted sum of partitioned moments over the down-interval of `pi`.
pub fn cumulant(
    chi: &ChiMap,
    pi: &Partition,
    word: &Word,
    phi: &dyn MomentFunctional,
) -> Result<BigRational> {
    if *chi != word.chi() {
        return Err(Error::Domain(format!(
            "labeling {chi} does not match the word's face sequence {}",
            word.chi()
        )));
    }
    if !is_ibnc(pi, chi)? {
        return Err(Error::Domain(format!(
            "{pi} is not interval-bi-noncrossing for {chi}"
        )));
    }
    let lattice = lattice_for(chi)?;
    let j = lattice
        .index_of(pi)
        .expect("admissible partition is in the lattice");
    let mut acc = BigRational::zero();
    for i in lattice.down_interval_idx(j) {
        let mu = lattice.mobius_idx(i, j);
        if mu == 0 {
            continue;
        }
        let phi_sigma = phi_partitioned(phi, lattice.element(i), word)?;
        acc += BigRational::from(BigInt::from(mu)) * phi_sigma;
    }
    Ok(acc)
}

/// One-block cumulant of a word under its own induced labeling.
pub fn one_block_cumulant(word: &Word, phi: &dyn MomentFunctional) -> Result<BigRational> {
    cumulant(&word.chi(), &Partition::full(word.len()), word, phi)
}

/// A cumulant oracle computed from a moment functional by Möbius inversion,
/// memoized per letter sequence.
pub struct MomentBackedCumulants<'a> {
    phi: &'a dyn MomentFunctional,
    memo: std::sync::Mutex<HashMap<Vec<Letter>, BigRational>>,
}

impl<'a> MomentBackedCumulants<'a> {
    pub fn new(phi: &'a dyn MomentFunctional) -> Self {
        MomentBackedCumulants {
            phi,
            memo: std::sync::Mutex::new(HashMap::new()),
        }
    }
}

impl CumulantOracle for MomentBackedCumulants<'_> {
    fn kappa(&self, word: &Word) -> Result<BigRational> {
        if let Some(v) = self.memo.lock().unwrap().get(word.letters()) {
            return Ok(v.clone());
        }
        let value = one_block_cumulant(word, self.phi)?;
        self.memo
            .lock()
            .unwrap()
            .insert(word.letters().to_vec(), value.clone());
        Ok(value)
    }
}

/// Rebuilds a moment from one-block cumulants: the sum over the admissible
/// lattice of the product, over blocks, of the block-subword cumulants.
pub fn moments_from_cumulants(
    chi: &ChiMap,
    word: &Word,
    kappa: &dyn CumulantOracle,
) -> Result<BigRational> {
    if *chi != word.chi() {
        return Err(Error::Domain(format!(
            "labeling {chi} does not match the word's face sequence {}",
            word.chi()
        )));
    }
    let lattice = lattice_for(chi)?;
    let mut acc = BigRational::zero();
    for pi in lattice.elements() {
        let mut term = BigRational::one();
        for block in pi.blocks() {
            term *= kappa.kappa(&word.subword(block))?;
            if term.is_zero() {
                break;
            }
        }
        acc += term;
    }
    Ok(acc)
}

/// For each lattice element `sigma`, the integer weight
/// `sum over pi in the lattice with sigma <= pi <= eps of mu(sigma, pi)`.
/// `eps` need not be a lattice element.
pub fn star_coefficients(lattice: &IbncLattice, eps: &Partition) -> Result<Vec<i64>> {
    if eps.n() != lattice.chi().n() {
        return Err(Error::SizeMismatch(format!(
            "kernel of 1..={} against labeling of length {}",
            eps.n(),
            lattice.chi().n()
        )));
    }
    let size = lattice.len();
    let below_eps: Vec<bool> = (0..size)
        .map(|i| lattice.element(i).leq(eps).expect("same ground set"))
        .collect();
    let mut coeff = vec![0i64; size];
    for (j, &ok) in below_eps.iter().enumerate() {
        if !ok {
            continue;
        }
        for (i, slot) in coeff.iter_mut().enumerate() {
            if lattice.leq_idx(i, j) {
                *slot += lattice.mobius_idx(i, j);
            }
        }
    }
    Ok(coeff)
}

/// The kernel-constrained moment recursion: with `eps` the kernel of the
/// word's index sequence, returns
/// `sum over sigma of (sum over pi with sigma <= pi <= eps of mu(sigma, pi))
/// times the partitioned moment of sigma`. For a family whose mixed
/// cumulants vanish this reproduces the plain moment.
pub fn moment_recursion_star(word: &Word, phi: &dyn MomentFunctional) -> Result<BigRational> {
    let chi = word.chi();
    let eps = word.omega_kernel();
    let lattice = lattice_for(&chi)?;
    let coeff = star_coefficients(&lattice, &eps)?;
    let mut acc = BigRational::zero();
    for (i, &c) in coeff.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let phi_sigma = phi_partitioned(phi, lattice.element(i), word)?;
        acc += BigRational::from(BigInt::from(c)) * phi_sigma;
    }
    Ok(acc)
}

/// Outcome of a mixed-cumulant vanishing sweep.
#[derive(Debug)]
pub struct MixedCumulantReport {
    /// Words with non-constant index sequence that were checked.
    pub checked: usize,
    /// Words whose one-block cumulant was nonzero, with the value.
    pub violations: Vec<(Word, BigRational)>,
    /// Words the oracle could not evaluate.
    pub gaps: Vec<(Word, Error)>,
}

impl MixedCumulantReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.gaps.is_empty()
    }
}

/// Checks that every mixed one-block cumulant vanishes: enumerates all words
/// over the functional's alphabet with non-constant index sequence up to
/// `max_n` and reports the nonzero ones.
pub fn vanishing_mixed_cumulants_report(
    phi: &dyn MomentFunctional,
    max_n: usize,
) -> Result<MixedCumulantReport> {
    let mut report = MixedCumulantReport {
        checked: 0,
        violations: Vec::new(),
        gaps: Vec::new(),
    };
    for word in words_up_to(phi.letters(), max_n) {
        if word.constant_index() {
            continue;
        }
        report.checked += 1;
        match one_block_cumulant(&word, phi) {
            Ok(value) if value.is_zero() => {}
            Ok(value) => report.violations.push((word, value)),
            Err(e) => report.gaps.push((word, e)),
        }
    }
    Ok(report)
}

struct SummedCumulants<'a> {
    a: MomentBackedCumulants<'a>,
    b: MomentBackedCumulants<'a>,
}

impl CumulantOracle for SummedCumulants<'_> {
    fn kappa(&self, word: &Word) -> Result<BigRational> {
        Ok(self.a.kappa(word)? + self.b.kappa(word)?)
    }
}

/// Additive convolution: one-block cumulants of the two inputs are added
/// letter-wise and moments are rebuilt from the sums. The result is a table
/// over the shared alphabet covering words up to `max_n`. The two inputs are
/// treated as carrying disjoint tags, which is what makes the cumulants add.
pub fn ffb_convolve(
    mu_a: &dyn MomentFunctional,
    mu_b: &dyn MomentFunctional,
    max_n: usize,
) -> Result<MomentTable> {
    if mu_a.letters() != mu_b.letters() {
        return Err(Error::InvalidArgument(
            "convolution inputs must share one letter alphabet".into(),
        ));
    }
    if mu_a.max_len() < max_n || mu_b.max_len() < max_n {
        return Err(Error::InvalidArgument(format!(
            "convolution inputs must cover words up to length {max_n}"
        )));
    }
    let oracle = SummedCumulants {
        a: MomentBackedCumulants::new(mu_a),
        b: MomentBackedCumulants::new(mu_b),
    };
    let mut out = MomentTable::new(mu_a.letters().to_vec());
    for word in words_up_to(mu_a.letters(), max_n) {
        let value = moments_from_cumulants(&word.chi(), &word, &oracle)?;
        out.insert(&word, value)?;
    }
    Ok(out)
}
