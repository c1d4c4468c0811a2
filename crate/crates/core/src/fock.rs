//! Exact truncated full Fock space over a finite-dimensional coefficient
//! space: sparse rational operators, vacuum-state moments, the triples of
//! faces they realize, and executable checks of the structural identities
//! (projection commutation, monotone factorization, classical independence of
//! the two outer faces, grouping, and boundary replacement of central
//! factors).
//!
//! All defining operators have entries in {0, 1}; every identity asserted
//! here is an exact equality of rationals, never a numerical approximation.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use num::{BigInt, BigRational, One, Zero};

use crate::chi::Face;
use crate::cumulants::{Letter, MomentFunctional, Word};
use crate::error::{Error, Result};

/// Default cap on the number of basis vectors.
pub const DEFAULT_BASIS_CAP: usize = 500_000;

/// Orthonormal basis of the Fock space over `C^d` truncated at tensor degree
/// `degree`: all words over `{1..d}` of length `0..=degree` in graded
/// lexicographic order, the empty word (the vacuum) first.
#[derive(Debug)]
pub struct FockBasis {
    d: usize,
    degree: usize,
    words: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
}

/// Builds a truncated basis under the default size cap.
pub fn build_basis(d: usize, degree: usize) -> Result<Arc<FockBasis>> {
    build_basis_capped(d, degree, DEFAULT_BASIS_CAP)
}

/// Builds a truncated basis with an explicit size cap.
pub fn build_basis_capped(d: usize, degree: usize, cap: usize) -> Result<Arc<FockBasis>> {
    if d == 0 || degree == 0 {
        return Err(Error::InvalidArgument(
            "coefficient dimension and truncation degree must be >= 1".into(),
        ));
    }
    let mut size: usize = 0;
    let mut layer: usize = 1;
    for _ in 0..=degree {
        size = size
            .checked_add(layer)
            .filter(|&s| s <= cap)
            .ok_or(Error::SizeLimit { n: usize::MAX, cap })?;
        layer = layer.saturating_mul(d);
    }
    let mut words: Vec<Vec<u8>> = vec![Vec::new()];
    let mut current: Vec<Vec<u8>> = vec![Vec::new()];
    for _ in 1..=degree {
        let mut next = Vec::with_capacity(current.len() * d);
        for w in &current {
            for letter in 1..=d as u8 {
                let mut longer = w.clone();
                longer.push(letter);
                next.push(longer);
            }
        }
        words.extend(next.iter().cloned());
        current = next;
    }
    let index = words
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, w)| (w, i))
        .collect();
    Ok(Arc::new(FockBasis {
        d,
        degree,
        words,
        index,
    }))
}

impl FockBasis {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The tensor word of a basis vector; index 0 is the vacuum.
    pub fn word(&self, i: usize) -> &[u8] {
        &self.words[i]
    }

    pub fn index_of(&self, word: &[u8]) -> Option<usize> {
        self.index.get(word).copied()
    }

    /// Index of the degree-one vector `e_i`.
    pub fn e(&self, i: usize) -> usize {
        self.index[&vec![i as u8]]
    }
}

/// A sparse exact-rational linear map on a truncated basis, stored
/// column-major. Creation parts truncate silently at the top degree, which is
/// exact for vacuum moments as long as the word length stays within the
/// truncation degree.
#[derive(Debug, Clone)]
pub struct FockOperator {
    basis: Arc<FockBasis>,
    cols: Vec<Vec<(usize, BigRational)>>,
}

impl FockOperator {
    fn from_columns(
        basis: Arc<FockBasis>,
        mut f: impl FnMut(usize, &[u8]) -> Vec<(usize, BigRational)>,
    ) -> Self {
        let cols = (0..basis.len())
            .map(|c| {
                let mut col = f(c, basis.word(c));
                col.retain(|(_, v)| !v.is_zero());
                col.sort_by_key(|&(row, _)| row);
                col
            })
            .collect();
        FockOperator { basis, cols }
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    /// Matrix entry at (row, column).
    pub fn entry(&self, row: usize, col: usize) -> BigRational {
        match self.cols[col].binary_search_by_key(&row, |&(r, _)| r) {
            Ok(pos) => self.cols[col][pos].1.clone(),
            Err(_) => BigRational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_empty())
    }

    fn same_basis(&self, other: &FockOperator) -> Result<()> {
        if !Arc::ptr_eq(&self.basis, &other.basis) {
            return Err(Error::InvalidArgument(
                "operators live on different bases".into(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &FockOperator) -> Result<FockOperator> {
        self.same_basis(other)?;
        let basis = Arc::clone(&self.basis);
        let cols = self
            .cols
            .iter()
            .zip(&other.cols)
            .map(|(a, b)| {
                let mut acc: BTreeMap<usize, BigRational> = BTreeMap::new();
                for (row, v) in a.iter().chain(b) {
                    *acc.entry(*row).or_insert_with(BigRational::zero) += v.clone();
                }
                acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
            })
            .collect();
        Ok(FockOperator { basis, cols })
    }

    pub fn sub(&self, other: &FockOperator) -> Result<FockOperator> {
        self.add(&other.scale(&BigRational::from(BigInt::from(-1))))
    }

    pub fn scale(&self, factor: &BigRational) -> FockOperator {
        let cols = self
            .cols
            .iter()
            .map(|col| {
                col.iter()
                    .map(|(row, v)| (*row, v * factor))
                    .filter(|(_, v)| !v.is_zero())
                    .collect()
            })
            .collect();
        FockOperator {
            basis: Arc::clone(&self.basis),
            cols,
        }
    }

    /// Operator composition `self * other` (apply `other` first). The product
    /// is exact on inputs whose images under `other` stay within the
    /// truncation degree.
    pub fn multiply(&self, other: &FockOperator) -> Result<FockOperator> {
        self.same_basis(other)?;
        let basis = Arc::clone(&self.basis);
        let cols = other
            .cols
            .iter()
            .map(|col| {
                let mut acc: BTreeMap<usize, BigRational> = BTreeMap::new();
                for (mid, v) in col {
                    for (row, w) in &self.cols[*mid] {
                        *acc.entry(*row).or_insert_with(BigRational::zero) += v * w;
                    }
                }
                acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
            })
            .collect();
        Ok(FockOperator { basis, cols })
    }

    /// Plain transpose; for the real rational entries used here this is the
    /// adjoint for the inner product making the tensor words orthonormal.
    pub fn transpose(&self) -> FockOperator {
        let mut cols: Vec<Vec<(usize, BigRational)>> = vec![Vec::new(); self.basis.len()];
        for (c, col) in self.cols.iter().enumerate() {
            for (r, v) in col {
                cols[*r].push((c, v.clone()));
            }
        }
        for col in &mut cols {
            col.sort_by_key(|&(row, _)| row);
        }
        FockOperator {
            basis: Arc::clone(&self.basis),
            cols,
        }
    }

    /// Applies the operator to a sparse vector.
    pub fn apply(&self, vec: &BTreeMap<usize, BigRational>) -> BTreeMap<usize, BigRational> {
        let mut out: BTreeMap<usize, BigRational> = BTreeMap::new();
        for (col, x) in vec {
            for (row, v) in &self.cols[*col] {
                let entry = out.entry(*row).or_insert_with(BigRational::zero);
                *entry += v * x;
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    /// When every column maps its basis vector to either zero or exactly one
    /// basis vector with coefficient 1, returns that index map. Single
    /// creation, annihilation and projection generators all qualify, which
    /// gives the verification sweeps an integer-only evaluation path.
    pub fn unit_action(&self) -> Option<Vec<Option<usize>>> {
        let one = BigRational::one();
        self.cols
            .iter()
            .map(|col| match col.as_slice() {
                [] => Some(None),
                [(row, v)] if *v == one => Some(Some(*row)),
                _ => None,
            })
            .collect()
    }

    /// CSV dump of the nonzero entries as `row,col,value` lines, sorted.
    pub fn dump_csv(&self) -> String {
        let mut triples: Vec<(usize, usize, &BigRational)> = Vec::new();
        for (c, col) in self.cols.iter().enumerate() {
            for (r, v) in col {
                triples.push((*r, c, v));
            }
        }
        triples.sort_by_key(|&(r, c, _)| (r, c));
        let mut out = String::from("row,col,value\n");
        for (r, c, v) in triples {
            writeln!(out, "{r},{c},{v}").expect("string write");
        }
        out
    }
}

fn vector_entries(h: &[BigRational], basis: &FockBasis) -> Result<Vec<(usize, BigRational)>> {
    if h.len() != basis.d() {
        return Err(Error::SizeMismatch(format!(
            "vector of dimension {}, coefficient space has dimension {}",
            h.len(),
            basis.d()
        )));
    }
    Ok(h.iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(i, v)| (i + 1, v.clone()))
        .collect())
}

/// Left creation by a coefficient vector: prepends the vector as a tensor
/// factor; the vacuum goes to the vector itself. Top-degree outputs truncate
/// to zero.
pub fn left_creation(basis: &Arc<FockBasis>, h: &[BigRational]) -> Result<FockOperator> {
    let entries = vector_entries(h, basis)?;
    Ok(FockOperator::from_columns(Arc::clone(basis), |_, word| {
        if word.len() == basis.degree() {
            return Vec::new();
        }
        entries
            .iter()
            .map(|(i, v)| {
                let mut longer = Vec::with_capacity(word.len() + 1);
                longer.push(*i as u8);
                longer.extend_from_slice(word);
                (basis.index_of(&longer).expect("within degree"), v.clone())
            })
            .collect()
    }))
}

/// Left annihilation: the adjoint of [`left_creation`]; strips the first
/// tensor factor against the vector and kills the vacuum.
pub fn left_annihilation(basis: &Arc<FockBasis>, h: &[BigRational]) -> Result<FockOperator> {
    let entries = vector_entries(h, basis)?;
    Ok(FockOperator::from_columns(Arc::clone(basis), |_, word| {
        let Some((&first, rest)) = word.split_first() else {
            return Vec::new();
        };
        entries
            .iter()
            .filter(|(i, _)| *i as u8 == first)
            .map(|(_, v)| (basis.index_of(rest).expect("shorter word"), v.clone()))
            .collect()
    }))
}

/// Right creation: appends the vector as a tensor factor; the vacuum goes to
/// the vector itself.
pub fn right_creation(basis: &Arc<FockBasis>, h: &[BigRational]) -> Result<FockOperator> {
    let entries = vector_entries(h, basis)?;
    Ok(FockOperator::from_columns(Arc::clone(basis), |_, word| {
        if word.len() == basis.degree() {
            return Vec::new();
        }
        entries
            .iter()
            .map(|(i, v)| {
                let mut longer = word.to_vec();
                longer.push(*i as u8);
                (basis.index_of(&longer).expect("within degree"), v.clone())
            })
            .collect()
    }))
}

/// Right annihilation: strips the last tensor factor against the vector.
pub fn right_annihilation(basis: &Arc<FockBasis>, h: &[BigRational]) -> Result<FockOperator> {
    let entries = vector_entries(h, basis)?;
    Ok(FockOperator::from_columns(Arc::clone(basis), |_, word| {
        let Some((&last, rest)) = word.split_last() else {
            return Vec::new();
        };
        entries
            .iter()
            .filter(|(i, _)| *i as u8 == last)
            .map(|(_, v)| (basis.index_of(rest).expect("shorter word"), v.clone()))
            .collect()
    }))
}

fn basis_vector(i: usize, basis: &FockBasis) -> Result<()> {
    if i == 0 || i > basis.d() {
        return Err(Error::InvalidArgument(format!(
            "coefficient index {i} outside 1..={}",
            basis.d()
        )));
    }
    Ok(())
}

/// Rank-two diagonal projection onto the span of the vacuum and `e_i`; the
/// central face of a triple is cut out by it.
pub fn projection_level(basis: &Arc<FockBasis>, i: usize) -> Result<FockOperator> {
    basis_vector(i, basis)?;
    Ok(FockOperator::from_columns(Arc::clone(basis), |c, word| {
        if word.is_empty() || word == [i as u8] {
            vec![(c, BigRational::one())]
        } else {
            Vec::new()
        }
    }))
}

/// Diagonal projection onto the vacuum together with all the vectors `e_i`
/// for `i` in a set; the merged central face of a grouped family uses it.
pub fn projection_level_set(basis: &Arc<FockBasis>, indices: &[usize]) -> Result<FockOperator> {
    for &i in indices {
        basis_vector(i, basis)?;
    }
    let set: Vec<u8> = indices.iter().map(|&i| i as u8).collect();
    Ok(FockOperator::from_columns(Arc::clone(basis), |c, word| {
        if word.is_empty() || (word.len() == 1 && set.contains(&word[0])) {
            vec![(c, BigRational::one())]
        } else {
            Vec::new()
        }
    }))
}

/// Diagonal projection onto the vacuum and the whole first tensor level.
pub fn projection_first_level(basis: &Arc<FockBasis>) -> FockOperator {
    FockOperator::from_columns(Arc::clone(basis), |c, word| {
        if word.len() <= 1 {
            vec![(c, BigRational::one())]
        } else {
            Vec::new()
        }
    })
}

/// Diagonal projection onto the vacuum and all pure tensor powers of `e_i`;
/// this is the projection that commutes with the index-`i` left face.
pub fn projection_block(basis: &Arc<FockBasis>, i: usize) -> Result<FockOperator> {
    basis_vector(i, basis)?;
    Ok(FockOperator::from_columns(Arc::clone(basis), |c, word| {
        if word.iter().all(|&x| x == i as u8) {
            vec![(c, BigRational::one())]
        } else {
            Vec::new()
        }
    }))
}

/// Exact vacuum expectation of an operator product: the coefficient of the
/// vacuum in `ops[0] ops[1] ... ops[k-1]` applied to it (the last operator
/// acts first). Exactness requires the sequence length to stay within the
/// truncation degree, since each operator shifts degree by at most one.
pub fn vacuum_expectation(ops: &[&FockOperator]) -> Result<BigRational> {
    if ops.is_empty() {
        return Err(Error::InvalidArgument("empty operator sequence".into()));
    }
    let basis = ops[0].basis();
    for op in ops {
        if !Arc::ptr_eq(op.basis(), basis) {
            return Err(Error::InvalidArgument(
                "operators live on different bases".into(),
            ));
        }
    }
    if ops.len() > basis.degree() {
        return Err(Error::Truncation {
            len: ops.len(),
            degree: basis.degree(),
        });
    }
    let mut vec = BTreeMap::from([(0usize, BigRational::one())]);
    for op in ops.iter().rev() {
        vec = op.apply(&vec);
        if vec.is_empty() {
            return Ok(BigRational::zero());
        }
    }
    Ok(vec.get(&0).cloned().unwrap_or_else(BigRational::zero))
}

/// The six generators of one triple of faces: left creation/annihilation,
/// right creation/annihilation, and the level-projected central pair.
pub struct FockTriple {
    pub index: usize,
    pub left: [FockOperator; 2],
    pub right: [FockOperator; 2],
    pub central: [FockOperator; 2],
}

impl FockTriple {
    /// Generator for a face; slot 0 is the creation-type element, slot 1 the
    /// annihilation-type element.
    pub fn generator(&self, face: Face, slot: usize) -> &FockOperator {
        match face {
            Face::Left => &self.left[slot],
            Face::Right => &self.right[slot],
            Face::Central => &self.central[slot],
        }
    }
}

/// Builds the triple for every coefficient index of the basis: triple `i`
/// uses `e_i` and the rank-two level projection at `i`.
pub fn build_triples(basis: &Arc<FockBasis>) -> Result<Vec<FockTriple>> {
    let mut triples = Vec::with_capacity(basis.d());
    for i in 1..=basis.d() {
        let mut e = vec![BigRational::zero(); basis.d()];
        e[i - 1] = BigRational::one();
        let l = left_creation(basis, &e)?;
        let ls = left_annihilation(basis, &e)?;
        let r = right_creation(basis, &e)?;
        let rs = right_annihilation(basis, &e)?;
        let p = projection_level(basis, i)?;
        let c = p.multiply(&l)?.multiply(&p)?;
        let cs = p.multiply(&ls)?.multiply(&p)?;
        triples.push(FockTriple {
            index: i,
            left: [l, ls],
            right: [r, rs],
            central: [c, cs],
        });
    }
    Ok(triples)
}

pub const TAG_CREATION: &str = "creation";
pub const TAG_ANNIHILATION: &str = "annihilation";

/// The moment functional of the full family of triples: letters are
/// (index, face, creation | annihilation) and moments are vacuum
/// expectations of the corresponding generator products.
pub struct TripleFamily {
    basis: Arc<FockBasis>,
    triples: Vec<FockTriple>,
    letters: Vec<Letter>,
    ops: HashMap<Letter, usize>,
}

impl TripleFamily {
    pub fn new(basis: &Arc<FockBasis>) -> Result<Self> {
        let triples = build_triples(basis)?;
        let mut letters = Vec::new();
        let mut ops = HashMap::new();
        for (t, triple) in triples.iter().enumerate() {
            for face in [Face::Left, Face::Right, Face::Central] {
                for (slot, tag) in [TAG_CREATION, TAG_ANNIHILATION].iter().enumerate() {
                    let letter = Letter::new(triple.index.to_string(), face, *tag);
                    ops.insert(letter.clone(), t * 6 + face_slot_offset(face, slot));
                    letters.push(letter);
                }
            }
        }
        Ok(TripleFamily {
            basis: Arc::clone(basis),
            triples,
            letters,
            ops,
        })
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn triples(&self) -> &[FockTriple] {
        &self.triples
    }

    /// The generator an alphabet letter stands for.
    pub fn operator(&self, letter: &Letter) -> Result<&FockOperator> {
        let flat = *self
            .ops
            .get(letter)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown letter {letter}")))?;
        let triple = &self.triples[flat / 6];
        let (face, slot) = face_slot_from_offset(flat % 6);
        Ok(triple.generator(face, slot))
    }
}

fn face_slot_offset(face: Face, slot: usize) -> usize {
    let f = match face {
        Face::Left => 0,
        Face::Right => 1,
        Face::Central => 2,
    };
    f * 2 + slot
}

fn face_slot_from_offset(offset: usize) -> (Face, usize) {
    let face = match offset / 2 {
        0 => Face::Left,
        1 => Face::Right,
        _ => Face::Central,
    };
    (face, offset % 2)
}

impl MomentFunctional for TripleFamily {
    fn letters(&self) -> &[Letter] {
        &self.letters
    }

    fn max_len(&self) -> usize {
        self.basis.degree()
    }

    fn moment(&self, word: &Word) -> Result<BigRational> {
        let ops = word
            .letters()
            .iter()
            .map(|l| self.operator(l))
            .collect::<Result<Vec<_>>>()?;
        vacuum_expectation(&ops)
    }
}

/// A family with the index set partitioned into groups, each group acting as
/// one merged triple: left and right faces pool the group's generators and
/// the central face conjugates them by the group-level projection.
pub struct GroupedFamily {
    basis: Arc<FockBasis>,
    letters: Vec<Letter>,
    ops: HashMap<Letter, FockOperator>,
}

impl GroupedFamily {
    pub fn new(basis: &Arc<FockBasis>, groups: &[Vec<usize>]) -> Result<Self> {
        let mut letters = Vec::new();
        let mut ops = HashMap::new();
        for group in groups {
            if group.is_empty() {
                return Err(Error::InvalidArgument("empty index group".into()));
            }
            let name: Vec<String> = group.iter().map(|i| i.to_string()).collect();
            let name = name.join("+");
            let p = projection_level_set(basis, group)?;
            for &i in group {
                let mut e = vec![BigRational::zero(); basis.d()];
                e[i - 1] = BigRational::one();
                let l = left_creation(basis, &e)?;
                let ls = left_annihilation(basis, &e)?;
                let r = right_creation(basis, &e)?;
                let rs = right_annihilation(basis, &e)?;
                let c = p.multiply(&l)?.multiply(&p)?;
                let cs = p.multiply(&ls)?.multiply(&p)?;
                for (face, op, tag) in [
                    (Face::Left, l, format!("{TAG_CREATION}.{i}")),
                    (Face::Left, ls, format!("{TAG_ANNIHILATION}.{i}")),
                    (Face::Right, r, format!("{TAG_CREATION}.{i}")),
                    (Face::Right, rs, format!("{TAG_ANNIHILATION}.{i}")),
                    (Face::Central, c, format!("{TAG_CREATION}.{i}")),
                    (Face::Central, cs, format!("{TAG_ANNIHILATION}.{i}")),
                ] {
                    let letter = Letter::new(name.clone(), face, tag);
                    ops.insert(letter.clone(), op);
                    letters.push(letter);
                }
            }
        }
        Ok(GroupedFamily {
            basis: Arc::clone(basis),
            letters,
            ops,
        })
    }
}

impl MomentFunctional for GroupedFamily {
    fn letters(&self) -> &[Letter] {
        &self.letters
    }

    fn max_len(&self) -> usize {
        self.basis.degree()
    }

    fn moment(&self, word: &Word) -> Result<BigRational> {
        let ops = word
            .letters()
            .iter()
            .map(|l| {
                self.ops
                    .get(l)
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown letter {l}")))
            })
            .collect::<Result<Vec<_>>>()?;
        vacuum_expectation(&ops)
    }
}

/// One named exact check of a structural identity.
#[derive(Debug)]
pub struct StructuralCheck {
    pub name: String,
    pub passed: bool,
    /// Number of instances verified.
    pub instances: usize,
    /// A witnessing configuration when the check failed.
    pub witness: Option<String>,
}

/// Report of the structural identity checks.
#[derive(Debug)]
pub struct StructuralReport {
    pub checks: Vec<StructuralCheck>,
}

impl StructuralReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Runs the structural identity checks on a model with at least three
/// coefficient dimensions and truncation degree at least six:
///
/// * commutation of the block projection with its own left face,
/// * the monotone law: a left- or right-face factor from one index pulls out
///   of central-face neighbors of other indices,
/// * classical independence of the left faces against the right faces of the
///   complementary indices (commutation and factorization),
/// * vanishing mixed cumulants after grouping indices into merged triples,
/// * boundary replacement of central first and last factors by left-face
///   elements with the same vacuum action.
pub fn structural_tests(basis: &Arc<FockBasis>) -> Result<StructuralReport> {
    if basis.d() < 3 || basis.degree() < 6 {
        return Err(Error::InvalidArgument(
            "structural checks need dimension >= 3 and degree >= 6".into(),
        ));
    }
    let family = TripleFamily::new(basis)?;
    let checks = vec![
        check_block_commutation(basis)?,
        check_monotone(&family)?,
        check_classical_independence(&family)?,
        check_grouping(basis)?,
        check_boundary_replacement(basis, &family)?,
    ];
    Ok(StructuralReport { checks })
}

fn check_block_commutation(basis: &Arc<FockBasis>) -> Result<StructuralCheck> {
    let mut instances = 0;
    let mut witness = None;
    for i in 1..=basis.d() {
        let q = projection_block(basis, i)?;
        let mut e = vec![BigRational::zero(); basis.d()];
        e[i - 1] = BigRational::one();
        for (name, op) in [
            ("creation", left_creation(basis, &e)?),
            ("annihilation", left_annihilation(basis, &e)?),
        ] {
            instances += 1;
            let commutator = q.multiply(&op)?.sub(&op.multiply(&q)?)?;
            if !commutator.is_zero() && witness.is_none() {
                witness = Some(format!("index {i}, left {name}"));
            }
        }
    }
    Ok(StructuralCheck {
        name: "block projection commutes with its left face".into(),
        passed: witness.is_none(),
        instances,
        witness,
    })
}

/// Small pools of algebra elements for the monotone sweep: pure left-face and
/// pure right-face elements of index 1, and central-face elements of index 2.
fn monotone_pools(family: &TripleFamily) -> Result<(Vec<FockOperator>, Vec<FockOperator>)> {
    let t1 = &family.triples()[0];
    let t2 = &family.triples()[1];
    let outer = vec![
        t1.left[0].clone(),
        t1.left[0].add(&t1.left[1])?,
        t1.left[1].multiply(&t1.left[0])?,
        t1.right[0].add(&t1.right[1])?,
        t1.right[1].multiply(&t1.right[0])?,
    ];
    let central = vec![
        t2.central[0].clone(),
        t2.central[0].add(&t2.central[1])?,
        t2.central[1].multiply(&t2.central[0])?,
        t2.central[0].multiply(&t2.central[1])?,
    ];
    Ok((outer, central))
}

fn check_monotone(family: &TripleFamily) -> Result<StructuralCheck> {
    let (outer, central) = monotone_pools(family)?;
    let pool: Vec<(&FockOperator, bool)> = outer
        .iter()
        .map(|op| (op, true))
        .chain(central.iter().map(|op| (op, false)))
        .collect();
    let mut instances = 0;
    let mut witness = None;
    for len in 3..=5usize {
        let mut choice = vec![0usize; len];
        'words: loop {
            let word: Vec<(&FockOperator, bool)> = choice.iter().map(|&c| pool[c]).collect();
            for k in 1..len - 1 {
                // The pulled-out middle is an outer-face element whose
                // neighbors both come from central faces of another index.
                if word[k].1 && !word[k - 1].1 && !word[k + 1].1 {
                    instances += 1;
                    let full: Vec<&FockOperator> = word.iter().map(|&(op, _)| op).collect();
                    let mut rest = full.clone();
                    rest.remove(k);
                    let lhs = vacuum_expectation(&full)?;
                    let rhs = vacuum_expectation(&[full[k]])? * vacuum_expectation(&rest)?;
                    if lhs != rhs && witness.is_none() {
                        witness = Some(format!("pattern {choice:?}, middle at {}", k + 1));
                    }
                }
            }
            let mut pos = len;
            while pos > 0 {
                choice[pos - 1] += 1;
                if choice[pos - 1] < pool.len() {
                    break;
                }
                choice[pos - 1] = 0;
                pos -= 1;
            }
            if pos == 0 {
                break 'words;
            }
        }
    }
    Ok(StructuralCheck {
        name: "outer-face factors pull out of central neighbors".into(),
        passed: witness.is_none(),
        instances,
        witness,
    })
}

fn check_classical_independence(family: &TripleFamily) -> Result<StructuralCheck> {
    let t1 = &family.triples()[0];
    let t2 = &family.triples()[1];
    let lefts = [
        t1.left[0].clone(),
        t1.left[1].clone(),
        t1.left[0].add(&t1.left[1])?,
    ];
    let rights = [
        t2.right[0].clone(),
        t2.right[1].clone(),
        t2.right[0].add(&t2.right[1])?,
    ];
    let mut instances = 0;
    let mut witness = None;
    // Commutation as matrices, on columns below the top degree (both
    // composition orders are truncation-exact there).
    let basis = family.basis();
    for (a, x) in lefts.iter().enumerate() {
        for (b, y) in rights.iter().enumerate() {
            instances += 1;
            let commutator = x.multiply(y)?.sub(&y.multiply(x)?)?;
            let clean = (0..basis.len())
                .filter(|&c| basis.word(c).len() < basis.degree())
                .all(|c| (0..basis.len()).all(|r| commutator.entry(r, c).is_zero()));
            if !clean && witness.is_none() {
                witness = Some(format!("commutator of left {a} with right {b}"));
            }
        }
    }
    // Factorization of mixed vacuum moments for words up to length 5 over one
    // left and one right element, in every arrangement.
    let x = lefts[2].clone();
    let y = rights[2].clone();
    for len in 1..=5usize {
        for mask in 0..(1u32 << len) {
            instances += 1;
            let word: Vec<&FockOperator> = (0..len)
                .map(|k| if mask >> k & 1 == 1 { &y } else { &x })
                .collect();
            let xs: Vec<&FockOperator> = word
                .iter()
                .copied()
                .filter(|op| std::ptr::eq(*op, &x))
                .collect();
            let ys: Vec<&FockOperator> = word
                .iter()
                .copied()
                .filter(|op| std::ptr::eq(*op, &y))
                .collect();
            let lhs = vacuum_expectation(&word)?;
            let phix = if xs.is_empty() {
                BigRational::one()
            } else {
                vacuum_expectation(&xs)?
            };
            let phiy = if ys.is_empty() {
                BigRational::one()
            } else {
                vacuum_expectation(&ys)?
            };
            if lhs != phix * phiy && witness.is_none() {
                witness = Some(format!("length {len}, arrangement {mask:b}"));
            }
        }
    }
    Ok(StructuralCheck {
        name: "left faces classically independent of complementary right faces".into(),
        passed: witness.is_none(),
        instances,
        witness,
    })
}

fn check_grouping(basis: &Arc<FockBasis>) -> Result<StructuralCheck> {
    let grouped = GroupedFamily::new(basis, &[vec![1, 2], vec![3]])?;
    let report = crate::cumulants::vanishing_mixed_cumulants_report(&grouped, 4)?;
    let witness = report
        .violations
        .first()
        .map(|(w, v)| format!("word [{w}] has cumulant {v}"))
        .or_else(|| report.gaps.first().map(|(w, e)| format!("word [{w}]: {e}")));
    Ok(StructuralCheck {
        name: "merged triples keep mixed cumulants at zero".into(),
        passed: report.passed(),
        instances: report.checked,
        witness,
    })
}

/// For a central-face element `z`, the left-face element with the same
/// one-sided vacuum action: `b l* + g l* l` built from the two vacuum-row
/// entries of `z` (left slot), and `a l + g l* l` from the vacuum-column
/// entries (right slot).
fn replacement_left_slot(
    z: &FockOperator,
    i: usize,
    basis: &Arc<FockBasis>,
) -> Result<FockOperator> {
    let mut e = vec![BigRational::zero(); basis.d()];
    e[i - 1] = BigRational::one();
    let l = left_creation(basis, &e)?;
    let ls = left_annihilation(basis, &e)?;
    let beta = z.entry(0, basis.e(i));
    let gamma = z.entry(0, 0);
    ls.scale(&beta).add(&ls.multiply(&l)?.scale(&gamma))
}

fn replacement_right_slot(
    z: &FockOperator,
    j: usize,
    basis: &Arc<FockBasis>,
) -> Result<FockOperator> {
    let mut e = vec![BigRational::zero(); basis.d()];
    e[j - 1] = BigRational::one();
    let l = left_creation(basis, &e)?;
    let ls = left_annihilation(basis, &e)?;
    let alpha = z.entry(basis.e(j), 0);
    let gamma = z.entry(0, 0);
    l.scale(&alpha).add(&ls.multiply(&l)?.scale(&gamma))
}

fn check_boundary_replacement(
    basis: &Arc<FockBasis>,
    family: &TripleFamily,
) -> Result<StructuralCheck> {
    let t1 = &family.triples()[0];
    let t2 = &family.triples()[1];
    let centrals_first: Vec<FockOperator> = vec![
        t1.central[0].clone(),
        t1.central[1].clone(),
        t1.central[0].add(&t1.central[1])?,
        t1.central[1].multiply(&t1.central[0])?,
        t1.central[0].multiply(&t1.central[1])?,
    ];
    let centrals_last: Vec<FockOperator> = vec![
        t2.central[0].clone(),
        t2.central[1].clone(),
        t2.central[0].add(&t2.central[1])?,
        t2.central[1].multiply(&t2.central[0])?,
    ];
    // Middles: all generator words of length <= 2 over both triples plus the
    // index-3 generators, so the replaced word mixes every face kind.
    let mut gens: Vec<&FockOperator> = Vec::new();
    for t in family.triples().iter().take(3) {
        gens.extend([
            &t.left[0],
            &t.left[1],
            &t.right[0],
            &t.right[1],
            &t.central[0],
            &t.central[1],
        ]);
    }
    let mut middles: Vec<Vec<&FockOperator>> = gens.iter().map(|&g| vec![g]).collect();
    for &a in gens.iter().step_by(2) {
        for &b in gens.iter().step_by(3) {
            middles.push(vec![a, b]);
        }
    }
    let mut instances = 0;
    let mut witness = None;
    for (zi, z1) in centrals_first.iter().enumerate() {
        let r1 = replacement_left_slot(z1, 1, basis)?;
        for (zj, zn) in centrals_last.iter().enumerate() {
            let r2 = replacement_right_slot(zn, 2, basis)?;
            for middle in &middles {
                instances += 1;
                let mut original: Vec<&FockOperator> = vec![z1];
                original.extend(middle.iter().copied());
                original.push(zn);
                let mut replaced: Vec<&FockOperator> = vec![&r1];
                replaced.extend(middle.iter().copied());
                replaced.push(&r2);
                if vacuum_expectation(&original)? != vacuum_expectation(&replaced)?
                    && witness.is_none()
                {
                    witness = Some(format!(
                        "central pair ({zi}, {zj}), middle length {}",
                        middle.len()
                    ));
                }
            }
        }
    }
    Ok(StructuralCheck {
        name: "central boundary factors replaceable by matching left-face elements".into(),
        passed: witness.is_none(),
        instances,
        witness,
    })
}
