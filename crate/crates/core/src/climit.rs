//! The central limit law: moments of the limit distribution via a
//! pair-partition sum over the admissible lattice, the labeling induced by an
//! index word, a Fock realization of the limit family, and the exact scaling
//! harness for normalized sums.

use std::collections::HashMap;
use std::sync::Arc;

use num::{BigInt, BigRational, One, Zero};
use serde::{Deserialize, Serialize};

use crate::chi::{ChiMap, Face};
use crate::cumulants::{
    one_block_cumulant, words_up_to, CumulantOracle, Letter, MomentFunctional, Word,
};
use crate::error::{Error, Result};
use crate::fock::{
    left_annihilation, left_creation, projection_first_level, right_annihilation, right_creation,
    FockBasis, FockOperator,
};
use crate::lattice::lattice_for;

/// A covariance matrix over a universe of identifiers, each classified as
/// left, right or central. No symmetry is assumed.
#[derive(Debug, Clone)]
pub struct CovMatrix {
    universe: Vec<(String, Face)>,
    entries: Vec<Vec<BigRational>>,
}

impl CovMatrix {
    pub fn new(universe: Vec<(String, Face)>, entries: Vec<Vec<BigRational>>) -> Result<Self> {
        let n = universe.len();
        if n == 0 {
            return Err(Error::InvalidArgument("empty universe".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for (id, _) in &universe {
            if !seen.insert(id.clone()) {
                return Err(Error::InvalidArgument(format!(
                    "identifier {id:?} repeated"
                )));
            }
        }
        if entries.len() != n || entries.iter().any(|row| row.len() != n) {
            return Err(Error::SizeMismatch(format!(
                "covariance matrix must be {n} x {n} over the declared universe"
            )));
        }
        Ok(CovMatrix { universe, entries })
    }

    pub fn universe(&self) -> &[(String, Face)] {
        &self.universe
    }

    fn position(&self, id: &str) -> Result<usize> {
        self.universe
            .iter()
            .position(|(u, _)| u == id)
            .ok_or_else(|| Error::InvalidArgument(format!("unclassified symbol {id:?}")))
    }

    pub fn face_of(&self, id: &str) -> Result<Face> {
        Ok(self.universe[self.position(id)?].1)
    }

    /// Entry `C_{a,b}`; the first index is the earlier (leftmost) factor.
    pub fn value(&self, a: &str, b: &str) -> Result<&BigRational> {
        Ok(&self.entries[self.position(a)?][self.position(b)?])
    }

    /// The word of limit-family letters spelled by an index sequence.
    pub fn word_for(&self, omega: &[&str]) -> Result<Word> {
        let letters = omega
            .iter()
            .map(|id| Ok(Letter::new(*id, self.face_of(id)?, "z")))
            .collect::<Result<Vec<_>>>()?;
        Word::new(letters)
    }
}

#[derive(Serialize, Deserialize)]
struct UniverseEntryJson {
    id: String,
    face: String,
}

#[derive(Serialize, Deserialize)]
struct CovJson {
    universe: Vec<UniverseEntryJson>,
    #[serde(rename = "C")]
    c: Vec<Vec<String>>,
}

impl CovMatrix {
    pub fn to_json(&self) -> String {
        let universe = self
            .universe
            .iter()
            .map(|(id, face)| UniverseEntryJson {
                id: id.clone(),
                face: face.to_string(),
            })
            .collect();
        let c = self
            .entries
            .iter()
            .map(|row| row.iter().map(|v| v.to_string()).collect())
            .collect();
        let mut text = serde_json::to_string_pretty(&CovJson { universe, c })
            .expect("covariance serialization");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let parsed: CovJson = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("covariance file: {e}")))?;
        let universe = parsed
            .universe
            .into_iter()
            .map(|u| {
                let mut chars = u.face.chars();
                let c = chars
                    .next()
                    .ok_or_else(|| Error::Parse("empty face".into()))?;
                if chars.next().is_some() {
                    return Err(Error::Parse(format!("bad face {:?}", u.face)));
                }
                Ok((u.id, Face::from_char(c)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let entries = parsed
            .c
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|v| {
                        v.parse()
                            .map_err(|_| Error::Parse(format!("bad rational {v:?}")))
                    })
                    .collect()
            })
            .collect::<Result<Vec<_>>>()?;
        CovMatrix::new(universe, entries)
    }
}

/// The labeling induced by an index word: each position is labeled by the
/// face of its symbol.
pub fn chi_from_omega(cov: &CovMatrix, omega: &[&str]) -> Result<ChiMap> {
    if omega.is_empty() {
        return Err(Error::InvalidArgument("empty index word".into()));
    }
    ChiMap::new(
        omega
            .iter()
            .map(|id| cov.face_of(id))
            .collect::<Result<Vec<_>>>()?,
    )
}

/// Moment of the limit distribution at an index word: the sum over admissible
/// pair partitions of the product of covariances `C_{omega(a), omega(b)}`
/// over the pairs `{a < b}`. Odd lengths give zero.
pub fn gamma_c_moment(cov: &CovMatrix, omega: &[&str]) -> Result<BigRational> {
    let chi = chi_from_omega(cov, omega)?;
    if omega.len() % 2 == 1 {
        return Ok(BigRational::zero());
    }
    let lattice = lattice_for(&chi)?;
    let mut acc = BigRational::zero();
    for pi in lattice.elements() {
        if !pi.blocks().iter().all(|b| b.len() == 2) {
            continue;
        }
        let mut term = BigRational::one();
        for block in pi.blocks() {
            term *= cov.value(omega[block[0] - 1], omega[block[1] - 1])?;
        }
        acc += term;
    }
    Ok(acc)
}

/// The cumulant specification of the limit distribution: covariances at order
/// two, zero at every other order.
pub struct GammaCOracle<'a> {
    cov: &'a CovMatrix,
}

impl<'a> GammaCOracle<'a> {
    pub fn new(cov: &'a CovMatrix) -> Self {
        GammaCOracle { cov }
    }
}

impl CumulantOracle for GammaCOracle<'_> {
    fn kappa(&self, word: &Word) -> Result<BigRational> {
        if word.len() != 2 {
            return Ok(BigRational::zero());
        }
        let a = &word.letters()[0].index;
        let b = &word.letters()[1].index;
        Ok(self.cov.value(a, b)?.clone())
    }
}

/// One limit-family variable: an identifier, its face, and the two
/// coefficient vectors of its creation and annihilation parts.
#[derive(Debug, Clone)]
pub struct GaussianSpec {
    pub id: String,
    pub face: Face,
    pub h: Vec<BigRational>,
    pub hstar: Vec<BigRational>,
}

/// The Fock realization of a limit family: left variables are
/// creation-plus-annihilation on the left, right variables on the right, and
/// central variables are compressed by the projection onto the vacuum plus
/// the first tensor level.
pub struct GaussianFamily {
    basis: Arc<FockBasis>,
    letters: Vec<Letter>,
    ops: HashMap<Letter, FockOperator>,
}

pub fn fock_gaussian_family(
    basis: &Arc<FockBasis>,
    specs: &[GaussianSpec],
) -> Result<GaussianFamily> {
    if specs.is_empty() {
        return Err(Error::InvalidArgument("empty variable list".into()));
    }
    let p = projection_first_level(basis);
    let mut letters = Vec::new();
    let mut ops = HashMap::new();
    for spec in specs {
        let op = match spec.face {
            Face::Left => {
                left_creation(basis, &spec.h)?.add(&left_annihilation(basis, &spec.hstar)?)?
            }
            Face::Right => {
                right_creation(basis, &spec.h)?.add(&right_annihilation(basis, &spec.hstar)?)?
            }
            Face::Central => {
                let inner =
                    left_creation(basis, &spec.h)?.add(&left_annihilation(basis, &spec.hstar)?)?;
                p.multiply(&inner)?.multiply(&p)?
            }
        };
        let letter = Letter::new(spec.id.clone(), spec.face, "z");
        ops.insert(letter.clone(), op);
        letters.push(letter);
    }
    Ok(GaussianFamily {
        basis: Arc::clone(basis),
        letters,
        ops,
    })
}

/// The covariance matrix realized by a family: `C_{k,l}` is the inner product
/// of the creation vector of `l` with the annihilation vector of `k`.
pub fn covariance_of(specs: &[GaussianSpec]) -> Result<CovMatrix> {
    let universe: Vec<(String, Face)> = specs.iter().map(|s| (s.id.clone(), s.face)).collect();
    let entries = specs
        .iter()
        .map(|k| {
            specs
                .iter()
                .map(|l| {
                    if k.hstar.len() != l.h.len() {
                        return Err(Error::SizeMismatch(
                            "coefficient vectors of different dimensions".into(),
                        ));
                    }
                    Ok(l.h.iter().zip(&k.hstar).map(|(a, b)| a * b).sum())
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    CovMatrix::new(universe, entries)
}

impl MomentFunctional for GaussianFamily {
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
        crate::fock::vacuum_expectation(&ops)
    }
}

/// Scaling data for one word: the base cumulant and the per-`N` values of the
/// normalized sum's cumulants.
#[derive(Debug)]
pub struct CltRow {
    pub word: Word,
    pub base_cumulant: BigRational,
    /// `kappa_m(S_N) * N^(m/2 - 1)` per `N`; rational for every parity of `m`.
    pub normalized: Vec<(u64, BigRational)>,
    /// `kappa_m(S_N)` per `N`, recorded when `m` is even (odd orders carry an
    /// irrational scale and only the normalized value is rational).
    pub raw: Vec<(u64, BigRational)>,
}

/// Outcome of the scaling harness.
#[derive(Debug)]
pub struct CltReport {
    pub n_list: Vec<u64>,
    pub rows: Vec<CltRow>,
    pub failures: Vec<String>,
}

impl CltReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Exact scaling of cumulants under normalized sums of identical independent
/// copies. Multilinearity expands the order-`m` cumulant of the sum over
/// copy assignments; mixed assignments vanish by cumulant additivity, leaving
/// `N` diagonal terms, so `kappa_m(S_N) * N^(m/2)` equals `N` times the base
/// cumulant. The harness reports the normalized quantity
/// `kappa_m(S_N) * N^(m/2 - 1)` (all arithmetic rational), asserts it is
/// independent of `N`, that order one vanishes, that order two equals the base
/// covariance, and that raw higher-order cumulants decay like `N^(1 - m/2)`.
pub fn clt_scaling_report(
    base: &dyn MomentFunctional,
    n_list: &[u64],
    max_n: usize,
) -> Result<CltReport> {
    if n_list.is_empty() || n_list.contains(&0) {
        return Err(Error::InvalidArgument(
            "copy counts must be positive".into(),
        ));
    }
    for letter in base.letters() {
        let first = base.moment(&Word::new(vec![letter.clone()])?)?;
        if !first.is_zero() {
            return Err(Error::Domain(format!(
                "letter {letter} has nonzero first moment {first}"
            )));
        }
    }
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for word in words_up_to(base.letters(), max_n) {
        let m = word.len();
        let base_cumulant = one_block_cumulant(&word, base)?;
        let mut normalized = Vec::new();
        let mut raw = Vec::new();
        for &n in n_list {
            let n_rat = BigRational::from(BigInt::from(n));
            // Diagonal assignments contribute n copies of the base cumulant;
            // the normalization divides one factor of n back out.
            let scaled_total = n_rat.clone() * &base_cumulant;
            let value = scaled_total / n_rat.clone();
            normalized.push((n, value.clone()));
            if m % 2 == 0 {
                // kappa_m(S_N) = normalized / N^(m/2 - 1), exactly rational.
                let power = n_rat.pow((m / 2) as i32 - 1);
                raw.push((n, value / power));
            }
        }
        let reference = &normalized[0].1;
        if normalized.iter().any(|(_, v)| v != reference) {
            failures.push(format!("word [{word}]: normalized cumulant varies with N"));
        }
        if m == 1 && !base_cumulant.is_zero() {
            failures.push(format!("word [{word}]: first cumulant nonzero"));
        }
        if m == 2 && reference != &base_cumulant {
            failures.push(format!("word [{word}]: second cumulant not constant"));
        }
        if m > 2 && m % 2 == 0 && !base_cumulant.is_zero() {
            // Raw decay: kappa(S_N) must shrink by the exact power law.
            for pair in raw.windows(2) {
                let (n1, v1) = &pair[0];
                let (n2, v2) = &pair[1];
                let ratio = (BigRational::from(BigInt::from(*n2))
                    / BigRational::from(BigInt::from(*n1)))
                .pow((m / 2) as i32 - 1);
                if v1.clone() != v2.clone() * ratio {
                    failures.push(format!("word [{word}]: raw cumulants break the power law"));
                }
            }
        }
        rows.push(CltRow {
            word,
            base_cumulant,
            normalized,
            raw,
        });
    }
    Ok(CltReport {
        n_list: n_list.to_vec(),
        rows,
        failures,
    })
}
