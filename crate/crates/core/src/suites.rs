//! Named verification suites behind the command-line `verify` subcommand and
//! the acceptance tests: exhaustive and randomized checks of the counting
//! identities, the lattice isomorphism, Möbius inversion, mixed-cumulant
//! vanishing in the operator model, the central limit scaling, and additive
//! convolution. Every check is an exact comparison of rationals or integers.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num::{BigInt, BigRational, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::chi::{enumerate_ibnc, is_chi_noncrossing, ChiMap, Face};
use crate::climit::{
    clt_scaling_report, covariance_of, fock_gaussian_family, gamma_c_moment, GammaCOracle,
    GaussianSpec,
};
use crate::cumulants::{
    ffb_convolve, moment_recursion_star, moments_from_cumulants, one_block_cumulant,
    star_coefficients, words_up_to, Letter, MomentBackedCumulants, MomentFunctional, Word,
};
use crate::error::{Error, Result};
use crate::fock::{build_basis, structural_tests, TripleFamily};
use crate::lattice::{compose, decompose, ibnc_count_formula, lattice_for};
use crate::partitions::{enumerate_partitions, Partition};

/// One named check with its outcome.
#[derive(Debug, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// A suite's worth of checks.
#[derive(Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckLine>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serialization");
        text.push('\n');
        text
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite: {}", self.suite)?;
        for check in &self.checks {
            let mark = if check.passed { "PASS" } else { "FAIL" };
            writeln!(f, "[{mark}] {} ({})", check.name, check.detail)?;
        }
        Ok(())
    }
}

/// Knobs shared by the randomized suites.
#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub seed: u64,
    pub samples: usize,
    pub max_n: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 7,
            samples: 100,
            max_n: 7,
        }
    }
}

/// A uniformly random labeling of random length `1..=max_n`.
pub fn sample_chi(rng: &mut impl Rng, max_n: usize) -> ChiMap {
    let n = rng.gen_range(1..=max_n);
    let labels = (0..n)
        .map(|_| match rng.gen_range(0..3) {
            0 => Face::Left,
            1 => Face::Right,
            _ => Face::Central,
        })
        .collect();
    ChiMap::new(labels).expect("nonempty")
}

fn check(name: &str, passed: bool, detail: String) -> CheckLine {
    CheckLine {
        name: name.to_string(),
        passed,
        detail,
    }
}

/// Counting, the endpoint lemma, the interval decomposition bijection with
/// its order isomorphism, and the down-interval product law.
pub fn run_lattice_suite(cfg: SuiteConfig) -> Result<SuiteReport> {
    let mut checks = Vec::new();

    // Brute-force counts against the Catalan product formula, on random
    // labelings plus the fixed reference cases.
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut samples: Vec<ChiMap> = (0..cfg.samples)
        .map(|_| sample_chi(&mut rng, cfg.max_n))
        .collect();
    samples.push("llrcrcrl".parse().unwrap());
    samples.push(ChiMap::constant(cfg.max_n.min(8), Face::Left));
    for _ in 0..8 {
        let n = rng.gen_range(1..=cfg.max_n.min(7));
        let labels = (0..n)
            .map(|_| {
                if rng.gen_bool(0.5) {
                    Face::Left
                } else {
                    Face::Right
                }
            })
            .collect();
        samples.push(ChiMap::new(labels).unwrap());
    }
    let count_failures: Vec<String> = samples
        .par_iter()
        .filter_map(|chi| {
            let brute = enumerate_ibnc(chi).ok()?.len() as u64;
            let formula = ibnc_count_formula(chi);
            (brute != formula).then(|| format!("{chi}: {brute} vs {formula}"))
        })
        .collect();
    let reference = enumerate_ibnc(&"llrcrcrl".parse().unwrap())?.len();
    checks.push(check(
        "family size equals the Catalan interval product",
        count_failures.is_empty() && reference == 350,
        format!(
            "{} labelings, reference n=8 count {reference}",
            samples.len()
        ),
    ));

    // Labelings with central positions only at the endpoints: the family is
    // exactly the noncrossing filter. Exhaustive through max_n (capped at 7).
    let mut lemma_failures = Vec::new();
    let mut lemma_cases = 0usize;
    for n in 1..=cfg.max_n.min(7) {
        let faces = [Face::Left, Face::Right, Face::Central];
        let interior = n.saturating_sub(2);
        for ends in 0..9usize {
            if n == 1 && ends >= 3 {
                break;
            }
            for bits in 0..(1u32 << interior) {
                let mut labels = Vec::with_capacity(n);
                labels.push(faces[ends % 3]);
                for k in 0..interior {
                    labels.push(if bits >> k & 1 == 1 {
                        Face::Right
                    } else {
                        Face::Left
                    });
                }
                if n >= 2 {
                    labels.push(faces[ends / 3]);
                }
                let chi = ChiMap::new(labels)?;
                lemma_cases += 1;
                let ibnc = enumerate_ibnc(&chi)?;
                let nc: Vec<Partition> = enumerate_partitions(n)?
                    .into_iter()
                    .filter(|pi| is_chi_noncrossing(pi, &chi).unwrap())
                    .collect();
                if ibnc != nc {
                    lemma_failures.push(chi.to_string());
                }
            }
        }
    }
    checks.push(check(
        "endpoint central labels leave only the noncrossing condition",
        lemma_failures.is_empty(),
        format!("{lemma_cases} labelings, exhaustive"),
    ));

    // Interval decomposition: a bijection onto the product of the component
    // families that preserves and reflects the order.
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    let bijection_samples: Vec<ChiMap> = (0..cfg.samples)
        .map(|_| sample_chi(&mut rng, cfg.max_n))
        .collect();
    let bijection_failures: Vec<String> = bijection_samples
        .par_iter()
        .filter_map(|chi| bijection_check(chi).err().map(|e| format!("{chi}: {e}")))
        .collect();
    checks.push(check(
        "interval decomposition is an order isomorphism",
        bijection_failures.is_empty(),
        format!(
            "{} labelings{}",
            bijection_samples.len(),
            bijection_failures
                .first()
                .map(|f| format!("; first failure {f}"))
                .unwrap_or_default()
        ),
    ));

    // Down-interval cardinality factors over blocks.
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(2));
    let down_samples: Vec<ChiMap> = (0..cfg.samples.min(40))
        .map(|_| sample_chi(&mut rng, cfg.max_n.min(7)))
        .collect();
    let down_failures: Vec<String> = down_samples
        .par_iter()
        .filter_map(|chi| {
            down_interval_check(chi)
                .err()
                .map(|e| format!("{chi}: {e}"))
        })
        .collect();
    checks.push(check(
        "down-interval size is the product over blocks",
        down_failures.is_empty(),
        format!("{} labelings", down_samples.len()),
    ));

    Ok(SuiteReport {
        suite: "lattice".into(),
        checks,
    })
}

/// Decomposition/composition bijection and order isomorphism for one
/// labeling; an error describes the first failure.
pub fn bijection_check(chi: &ChiMap) -> Result<()> {
    let lattice = lattice_for(chi)?;
    let mut seen = std::collections::HashSet::new();
    let mut parts_of: Vec<Vec<Partition>> = Vec::with_capacity(lattice.len());
    for pi in lattice.elements() {
        let parts = decompose(pi, chi)?;
        if compose(&parts, chi)? != *pi {
            return Err(Error::Domain(format!(
                "composition does not invert at {pi}"
            )));
        }
        let key: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
        if !seen.insert(key) {
            return Err(Error::Domain(format!("decomposition collides at {pi}")));
        }
        parts_of.push(parts.iter().map(|p| p.relabel()).collect());
    }
    // Surjectivity by counting: the image size equals the product of the
    // component family sizes.
    let mut product = 1usize;
    for (a, b) in crate::lattice::intervals(chi) {
        let ground: Vec<usize> = (a..=b).collect();
        let sub = lattice_for(&chi.restrict(&ground)?)?;
        product = product.saturating_mul(sub.len());
    }
    if product != lattice.len() {
        return Err(Error::Domain(format!(
            "image size {} differs from product {product}",
            lattice.len()
        )));
    }
    // Order preserved and reflected, componentwise.
    for i in 0..lattice.len() {
        for j in 0..lattice.len() {
            let componentwise = parts_of[i]
                .iter()
                .zip(&parts_of[j])
                .all(|(a, b)| a.leq(b).expect("same interval"));
            if componentwise != lattice.leq_idx(i, j) {
                return Err(Error::Domain(format!(
                    "order mismatch at ({}, {})",
                    lattice.element(i),
                    lattice.element(j)
                )));
            }
        }
    }
    Ok(())
}

/// Down-interval sizes factor over blocks for one labeling.
pub fn down_interval_check(chi: &ChiMap) -> Result<()> {
    let lattice = lattice_for(chi)?;
    for pi in lattice.elements() {
        let mut product = 1usize;
        for block in pi.blocks() {
            let sub = lattice_for(&chi.restrict(block)?)?;
            product = product.saturating_mul(sub.len());
        }
        let down = lattice.down_interval(pi)?.len();
        if down != product {
            return Err(Error::Domain(format!("{pi}: {down} vs {product}")));
        }
    }
    Ok(())
}

/// Möbius recursion against the multiplicative block formula, the inversion
/// identity, and the reference value.
pub fn run_mobius_suite(cfg: SuiteConfig) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(10));
    let samples: Vec<ChiMap> = (0..cfg.samples)
        .map(|_| sample_chi(&mut rng, cfg.max_n.min(7)))
        .collect();

    let product_failures: Vec<String> = samples
        .par_iter()
        .filter_map(|chi| {
            mobius_product_check(chi)
                .err()
                .map(|e| format!("{chi}: {e}"))
        })
        .collect();
    checks.push(check(
        "block product formula matches the interval recursion",
        product_failures.is_empty(),
        format!(
            "{} labelings{}",
            samples.len(),
            product_failures
                .first()
                .map(|f| format!("; first failure {f}"))
                .unwrap_or_default()
        ),
    ));

    let inversion_failures: Vec<String> = samples
        .par_iter()
        .filter_map(|chi| {
            mobius_inversion_check(chi)
                .err()
                .map(|e| format!("{chi}: {e}"))
        })
        .collect();
    checks.push(check(
        "Mobius convolved with zeta is the unit, both ways",
        inversion_failures.is_empty(),
        format!("{} labelings, integer-exact", samples.len()),
    ));

    // API-level convolution over rationals on moderate sizes.
    let mut api_failures = Vec::new();
    for chi in samples.iter().filter(|c| c.n() <= 5).take(12) {
        let lattice = lattice_for(chi)?;
        let m = crate::mobius::mobius_bruteforce(Arc::clone(&lattice));
        let z = crate::mobius::zeta(Arc::clone(&lattice));
        let d = crate::mobius::delta(Arc::clone(&lattice));
        let mz = crate::mobius::convolve(&m, &z)?;
        let zm = crate::mobius::convolve(&z, &m)?;
        for i in 0..lattice.len() {
            for j in 0..lattice.len() {
                if lattice.leq_idx(i, j)
                    && (mz.value_idx(i, j)? != d.value_idx(i, j)?
                        || zm.value_idx(i, j)? != d.value_idx(i, j)?)
                {
                    api_failures.push(chi.to_string());
                }
            }
        }
    }
    checks.push(check(
        "incidence-algebra convolution agrees over rationals",
        api_failures.is_empty(),
        "moderate lattices".into(),
    ));

    let reference = lattice_for(&"llrcrcrl".parse().unwrap())?;
    let mu = reference.mobius_idx(reference.bottom(), reference.top());
    checks.push(check(
        "reference n=8 bottom-to-top value is -20",
        mu == -20,
        format!("got {mu}"),
    ));

    Ok(SuiteReport {
        suite: "mobius".into(),
        checks,
    })
}

/// Block product formula against the interval recursion on every
/// comparable pair of one labeling's lattice.
pub fn mobius_product_check(chi: &ChiMap) -> Result<()> {
    let lattice = lattice_for(chi)?;
    for i in 0..lattice.len() {
        for j in 0..lattice.len() {
            if !lattice.leq_idx(i, j) {
                continue;
            }
            let brute = BigRational::from(BigInt::from(lattice.mobius_idx(i, j)));
            let product =
                crate::mobius::mobius_product(lattice.element(i), lattice.element(j), &lattice)?;
            if brute != product {
                return Err(Error::Domain(format!(
                    "({}, {}): {brute} vs {product}",
                    lattice.element(i),
                    lattice.element(j)
                )));
            }
        }
    }
    Ok(())
}

/// Integer-exact two-sided inversion identity on one labeling's lattice.
pub fn mobius_inversion_check(chi: &ChiMap) -> Result<()> {
    let lattice = lattice_for(chi)?;
    let size = lattice.len();
    for i in 0..size {
        for j in 0..size {
            if !lattice.leq_idx(i, j) {
                continue;
            }
            let mut mu_zeta = 0i64;
            let mut zeta_mu = 0i64;
            for c in 0..size {
                if lattice.leq_idx(i, c) && lattice.leq_idx(c, j) {
                    mu_zeta += lattice.mobius_idx(i, c);
                    zeta_mu += lattice.mobius_idx(c, j);
                }
            }
            let unit = i64::from(i == j);
            if mu_zeta != unit || zeta_mu != unit {
                return Err(Error::Domain(format!(
                    "({}, {}): {mu_zeta} / {zeta_mu}",
                    lattice.element(i),
                    lattice.element(j)
                )));
            }
        }
    }
    Ok(())
}

/// Outcome of the exhaustive operator-model sweep.
#[derive(Debug)]
pub struct SweepOutcome {
    /// All words checked against the kernel-constrained recursion.
    pub words_checked: usize,
    /// Words with non-constant index sequence whose cumulant was checked.
    pub mixed_checked: usize,
    /// Mixed words whose cumulant failed to vanish.
    pub mixed_violations: usize,
    /// Words re-evaluated through the general rational path.
    pub cross_checked: usize,
    pub failures: Vec<String>,
}

/// Exhaustively sweeps every generator word of the model up to `max_n`:
/// the vacuum moment must equal the kernel-constrained Möbius recursion, and
/// every mixed one-block cumulant must vanish. Evaluation walks basis indices
/// (all generators are unit-coefficient), with a strided cross-check through
/// the general rational path.
pub fn independence_sweep(
    family: &TripleFamily,
    max_n: usize,
    cross_check_stride: usize,
) -> Result<SweepOutcome> {
    let degree = family.basis().degree();
    if max_n > degree {
        return Err(Error::Truncation { len: max_n, degree });
    }
    let letters = family.letters().to_vec();
    let actions: Vec<Vec<Option<usize>>> = letters
        .iter()
        .map(|l| {
            family
                .operator(l)?
                .unit_action()
                .ok_or_else(|| Error::Domain(format!("generator {l} is not unit-coefficient")))
        })
        .collect::<Result<Vec<_>>>()?;
    let letter_indices: Vec<usize> = letters
        .iter()
        .map(|l| l.index.parse::<usize>().expect("numeric algebra index"))
        .collect();

    // Group letters by face; a position with a fixed face label ranges over
    // exactly these letters.
    let mut by_face: HashMap<Face, Vec<usize>> = HashMap::new();
    for (id, letter) in letters.iter().enumerate() {
        by_face.entry(letter.face).or_default().push(id);
    }

    let faces = [Face::Left, Face::Right, Face::Central];
    let mut patterns: Vec<Vec<Face>> = Vec::new();
    for len in 1..=max_n {
        let mut choice = vec![0usize; len];
        loop {
            patterns.push(choice.iter().map(|&c| faces[c]).collect());
            let mut pos = len;
            while pos > 0 {
                choice[pos - 1] += 1;
                if choice[pos - 1] < 3 {
                    break;
                }
                choice[pos - 1] = 0;
                pos -= 1;
            }
            if pos == 0 {
                break;
            }
        }
    }

    let outcomes: Vec<Result<SweepOutcome>> = patterns
        .par_iter()
        .map(|pattern| {
            sweep_pattern(
                pattern,
                family,
                &letters,
                &actions,
                &letter_indices,
                &by_face,
                cross_check_stride,
            )
        })
        .collect();
    let mut total = SweepOutcome {
        words_checked: 0,
        mixed_checked: 0,
        mixed_violations: 0,
        cross_checked: 0,
        failures: Vec::new(),
    };
    for outcome in outcomes {
        let o = outcome?;
        total.words_checked += o.words_checked;
        total.mixed_checked += o.mixed_checked;
        total.mixed_violations += o.mixed_violations;
        total.cross_checked += o.cross_checked;
        total.failures.extend(o.failures);
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn sweep_pattern(
    pattern: &[Face],
    family: &TripleFamily,
    letters: &[Letter],
    actions: &[Vec<Option<usize>>],
    letter_indices: &[usize],
    by_face: &HashMap<Face, Vec<usize>>,
    cross_check_stride: usize,
) -> Result<SweepOutcome> {
    let len = pattern.len();
    let chi = ChiMap::new(pattern.to_vec())?;
    let lattice = lattice_for(&chi)?;
    let size = lattice.len();
    // Per element: its blocks as position bitmasks, and the weight to the top.
    let block_masks: Vec<Vec<u32>> = lattice
        .elements()
        .iter()
        .map(|pi| {
            pi.blocks()
                .iter()
                .map(|b| b.iter().fold(0u32, |m, &p| m | 1 << (p - 1)))
                .collect()
        })
        .collect();
    let mu_top: Vec<i64> = (0..size).map(|i| lattice.mobius_to_top(i)).collect();

    let slots: Vec<&Vec<usize>> = pattern.iter().map(|f| &by_face[f]).collect();
    let per_slot = slots[0].len();
    let mut star_cache: HashMap<Vec<u8>, Vec<i64>> = HashMap::new();
    let mut phi_memo = vec![-1i8; 1 << len];
    let mut outcome = SweepOutcome {
        words_checked: 0,
        mixed_checked: 0,
        mixed_violations: 0,
        cross_checked: 0,
        failures: Vec::new(),
    };

    let mut choice = vec![0usize; len];
    loop {
        let word_letters: Vec<usize> = (0..len).map(|p| slots[p][choice[p]]).collect();
        // Kernel of the index sequence, as a first-occurrence numbering.
        let mut kernel_key = vec![0u8; len];
        let mut groups: Vec<usize> = Vec::new();
        for (p, &lid) in word_letters.iter().enumerate() {
            let idx = letter_indices[lid];
            let g = match groups.iter().position(|&x| x == idx) {
                Some(g) => g,
                None => {
                    groups.push(idx);
                    groups.len() - 1
                }
            };
            kernel_key[p] = g as u8;
        }
        let non_constant = groups.len() > 1;

        phi_memo[..1 << len].fill(-1);
        let full_mask = ((1u32 << len) - 1) as usize;
        let phi = |mask: usize, memo: &mut Vec<i8>| -> i64 {
            if memo[mask] >= 0 {
                return i64::from(memo[mask]);
            }
            let mut state = 0usize;
            let mut ok = true;
            for p in (0..len).rev() {
                if mask >> p & 1 == 1 {
                    match actions[word_letters[p]][state] {
                        Some(next) => state = next,
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
            }
            let value = i64::from(ok && state == 0);
            memo[mask] = value as i8;
            value
        };

        let direct = phi(full_mask, &mut phi_memo);
        let coeffs = match star_cache.get(&kernel_key) {
            Some(c) => c,
            None => {
                let eps = kernel_partition(&kernel_key)?;
                let c = star_coefficients(&lattice, &eps)?;
                star_cache.entry(kernel_key.clone()).or_insert(c)
            }
        };
        let mut star = 0i64;
        let mut kappa = 0i64;
        for s in 0..size {
            let c = coeffs[s];
            let m = mu_top[s];
            if c == 0 && m == 0 {
                continue;
            }
            let mut product = 1i64;
            for &mask in &block_masks[s] {
                if phi(mask as usize, &mut phi_memo) == 0 {
                    product = 0;
                    break;
                }
            }
            if product != 0 {
                star += c;
                kappa += m;
            }
        }
        outcome.words_checked += 1;
        if star != direct {
            outcome.failures.push(format!(
                "recursion mismatch at [{}]: {star} vs {direct}",
                describe(letters, &word_letters)
            ));
        }
        if non_constant {
            outcome.mixed_checked += 1;
            if kappa != 0 {
                outcome.mixed_violations += 1;
                outcome.failures.push(format!(
                    "nonzero mixed cumulant {kappa} at [{}]",
                    describe(letters, &word_letters)
                ));
            }
        }
        // The stride is per pattern task; the first word of every short
        // pattern is also re-checked so small lengths stay covered.
        let strided = outcome.words_checked.is_multiple_of(cross_check_stride);
        if strided || (outcome.words_checked == 1 && len <= 3) {
            outcome.cross_checked += 1;
            let word = Word::new(word_letters.iter().map(|&id| letters[id].clone()).collect())?;
            let general = family.moment(&word)?;
            let star_general = moment_recursion_star(&word, family)?;
            let kappa_general = one_block_cumulant(&word, family)?;
            if general != BigRational::from(BigInt::from(direct))
                || star_general != BigRational::from(BigInt::from(star))
                || kappa_general != BigRational::from(BigInt::from(kappa))
            {
                outcome.failures.push(format!(
                    "fast path diverges from the rational path at [{word}]"
                ));
            }
        }

        let mut pos = len;
        while pos > 0 {
            choice[pos - 1] += 1;
            if choice[pos - 1] < per_slot {
                break;
            }
            choice[pos - 1] = 0;
            pos -= 1;
        }
        if pos == 0 {
            break;
        }
    }
    Ok(outcome)
}

fn kernel_partition(key: &[u8]) -> Result<Partition> {
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for (p, &g) in key.iter().enumerate() {
        let g = g as usize;
        if g == blocks.len() {
            blocks.push(Vec::new());
        }
        blocks[g].push(p + 1);
    }
    Partition::new(key.len(), blocks)
}

fn describe(letters: &[Letter], word: &[usize]) -> String {
    word.iter()
        .map(|&id| letters[id].to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// The operator-model independence suite: the exhaustive sweep plus the
/// structural identities.
pub fn run_independence_suite(indices: usize, max_n: usize) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    let basis = build_basis(indices.max(1), max_n.max(2))?;
    let family = TripleFamily::new(&basis)?;
    let sweep = independence_sweep(&family, max_n, 2999)?;
    let sweep_passed = sweep.failures.is_empty();
    checks.push(check(
        "vacuum moments satisfy the kernel-constrained recursion",
        sweep_passed,
        format!("{} words", sweep.words_checked),
    ));
    checks.push(check(
        "mixed cumulants vanish exactly",
        sweep.mixed_violations == 0,
        format!(
            "{} nonzero mixed cumulants in {} words",
            sweep.mixed_violations, sweep.mixed_checked
        ),
    ));
    checks.push(check(
        "integer path agrees with the rational path",
        sweep_passed,
        format!("{} strided cross-checks", sweep.cross_checked),
    ));
    if let Some(first) = sweep.failures.first() {
        checks.push(check("first sweep failure", false, first.clone()));
    }

    let structure_basis = build_basis(indices.max(3), 6)?;
    let report = structural_tests(&structure_basis)?;
    for c in report.checks {
        checks.push(check(
            &c.name,
            c.passed,
            format!(
                "{} instances{}",
                c.instances,
                c.witness
                    .map(|w| format!("; witness {w}"))
                    .unwrap_or_default()
            ),
        ));
    }
    Ok(SuiteReport {
        suite: "independence".into(),
        checks,
    })
}

/// A memoizing wrapper so repeated subword moments are computed once.
pub struct MemoizedMoments<'a> {
    inner: &'a dyn MomentFunctional,
    memo: std::sync::RwLock<HashMap<Vec<Letter>, BigRational>>,
}

impl<'a> MemoizedMoments<'a> {
    pub fn new(inner: &'a dyn MomentFunctional) -> Self {
        MemoizedMoments {
            inner,
            memo: std::sync::RwLock::new(HashMap::new()),
        }
    }
}

impl MomentFunctional for MemoizedMoments<'_> {
    fn letters(&self) -> &[Letter] {
        self.inner.letters()
    }

    fn max_len(&self) -> usize {
        self.inner.max_len()
    }

    fn moment(&self, word: &Word) -> Result<BigRational> {
        if let Some(v) = self.memo.read().unwrap().get(word.letters()) {
            return Ok(v.clone());
        }
        let value = self.inner.moment(word)?;
        self.memo
            .write()
            .unwrap()
            .insert(word.letters().to_vec(), value.clone());
        Ok(value)
    }
}

fn clt_fixture_specs() -> Vec<GaussianSpec> {
    let r = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
    vec![
        GaussianSpec {
            id: "i".into(),
            face: Face::Left,
            h: vec![r(1, 1), r(1, 2), r(0, 1)],
            hstar: vec![r(1, 1), r(0, 1), r(1, 3)],
        },
        GaussianSpec {
            id: "j".into(),
            face: Face::Right,
            h: vec![r(0, 1), r(1, 1), r(1, 1)],
            hstar: vec![r(1, 2), r(1, 1), r(0, 1)],
        },
        GaussianSpec {
            id: "k".into(),
            face: Face::Central,
            h: vec![r(1, 1), r(0, 1), r(2, 1)],
            hstar: vec![r(1, 3), r(1, 1), r(1, 1)],
        },
    ]
}

/// The limit-law suite: the pair sum against the cumulant specification, the
/// operator realization, the scaling harness, the pinned fourth-moment
/// values, and additive convolution against a two-copy model.
pub fn run_clt_suite(max_n: usize) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    let specs = clt_fixture_specs();
    let cov = covariance_of(&specs)?;
    let ids = ["i", "j", "k"];

    // Pair-partition sum equals the lattice sum with covariances at order two.
    let oracle = GammaCOracle::new(&cov);
    let mut omegas: Vec<Vec<&str>> = Vec::new();
    for len in 1..=max_n {
        let mut choice = vec![0usize; len];
        loop {
            omegas.push(choice.iter().map(|&c| ids[c]).collect());
            let mut pos = len;
            while pos > 0 {
                choice[pos - 1] += 1;
                if choice[pos - 1] < ids.len() {
                    break;
                }
                choice[pos - 1] = 0;
                pos -= 1;
            }
            if pos == 0 {
                break;
            }
        }
    }
    let pair_failures: Vec<String> = omegas
        .par_iter()
        .filter_map(|omega| {
            let word = cov.word_for(omega).ok()?;
            let pairs = gamma_c_moment(&cov, omega).ok()?;
            let lattice_sum = moments_from_cumulants(&word.chi(), &word, &oracle).ok()?;
            (pairs != lattice_sum).then(|| format!("{omega:?}"))
        })
        .collect();
    checks.push(check(
        "pair sum equals the order-two cumulant specification",
        pair_failures.is_empty(),
        format!("{} index words", omegas.len()),
    ));

    // The operator realization reproduces every moment of the limit law.
    let basis = build_basis(3, max_n.max(2))?;
    let family = fock_gaussian_family(&basis, &specs)?;
    let memo = MemoizedMoments::new(&family);
    let realization_failures: Vec<String> = omegas
        .iter()
        .filter_map(|omega| {
            let word = cov.word_for(omega).ok()?;
            let model = memo.moment(&word).ok()?;
            let limit = gamma_c_moment(&cov, omega).ok()?;
            (model != limit).then(|| format!("{omega:?}: {model} vs {limit}"))
        })
        .collect();
    checks.push(check(
        "operator realization matches the limit law",
        realization_failures.is_empty(),
        format!(
            "{} index words{}",
            omegas.len(),
            realization_failures
                .first()
                .map(|f| format!("; first failure {f}"))
                .unwrap_or_default()
        ),
    ));

    // Scaling harness on the limit family (all higher cumulants zero) and on
    // a centered base with nonzero higher cumulants (nontrivial power law).
    let scaling = clt_scaling_report(&memo, &[1, 4, 16], max_n)?;
    checks.push(check(
        "normalized cumulants of scaled sums are copy-count independent",
        scaling.passed(),
        format!("{} words, N in {{1, 4, 16}}", scaling.rows.len()),
    ));
    let table = centered_fixture_table(max_n);
    let table_memo = MemoizedMoments::new(&table);
    let rich = clt_scaling_report(&table_memo, &[1, 4, 16], max_n)?;
    let mut law_witnessed = max_n < 4;
    if max_n >= 4 {
        for row in rich
            .rows
            .iter()
            .filter(|r| r.word.len() == 4 && !r.base_cumulant.is_zero())
        {
            let at4 = &row.raw.iter().find(|(n, _)| *n == 4).unwrap().1;
            let at16 = &row.raw.iter().find(|(n, _)| *n == 16).unwrap().1;
            let four = BigRational::from(BigInt::from(4));
            if *at4 == at16.clone() * four {
                law_witnessed = true;
                break;
            }
        }
    }
    checks.push(check(
        "raw fourth cumulants decay by the copy count",
        rich.passed() && law_witnessed,
        format!("{} words on the centered fixture", rich.rows.len()),
    ));

    // Pinned fourth-order values.
    let cii = cov.value("i", "i")?.clone();
    let ckk = cov.value("k", "k")?.clone();
    let cjj = cov.value("j", "j")?.clone();
    let cij = cov.value("i", "j")?.clone();
    let left4 = gamma_c_moment(&cov, &["i", "i", "i", "i"])?;
    let central4 = gamma_c_moment(&cov, &["k", "k", "k", "k"])?;
    let mixed4 = gamma_c_moment(&cov, &["i", "j", "i", "j"])?;
    let two = BigRational::from(BigInt::from(2));
    let pinned = left4 == two * cii.clone() * cii.clone()
        && central4 == ckk.clone() * ckk
        && mixed4 == cii * cjj + cij.clone() * cij;
    checks.push(check(
        "pinned fourth moments reproduced",
        pinned,
        "left 2C^2, central C^2, alternating C_ii C_jj + C_ij^2".into(),
    ));

    // Convolution against a genuine two-copy operator model.
    checks.push(convolution_check()?);

    Ok(SuiteReport {
        suite: "clt".into(),
        checks,
    })
}

/// An abstract single-triple alphabet mapped onto one index of an operator
/// model: the two convolution inputs use disjoint indices of one basis.
struct CopyFunctional<'a> {
    family: &'a TripleFamily,
    letters: Vec<Letter>,
    target_index: String,
}

impl CopyFunctional<'_> {
    fn translate(&self, word: &Word) -> Result<Word> {
        Word::new(
            word.letters()
                .iter()
                .map(|l| Letter::new(self.target_index.clone(), l.face, l.tag.clone()))
                .collect(),
        )
    }
}

impl MomentFunctional for CopyFunctional<'_> {
    fn letters(&self) -> &[Letter] {
        &self.letters
    }

    fn max_len(&self) -> usize {
        self.family.basis().degree()
    }

    fn moment(&self, word: &Word) -> Result<BigRational> {
        self.family.moment(&self.translate(word)?)
    }
}

/// Additive convolution against the two-copy operator model.
pub fn convolution_check() -> Result<CheckLine> {
    let basis = build_basis(2, 4)?;
    let family = TripleFamily::new(&basis)?;
    let abstract_letters: Vec<Letter> = [Face::Left, Face::Right, Face::Central]
        .into_iter()
        .flat_map(|face| {
            [crate::fock::TAG_CREATION, crate::fock::TAG_ANNIHILATION]
                .into_iter()
                .map(move |tag| Letter::new("x", face, tag))
        })
        .collect();
    let copy_a = CopyFunctional {
        family: &family,
        letters: abstract_letters.clone(),
        target_index: "1".into(),
    };
    let copy_b = CopyFunctional {
        family: &family,
        letters: abstract_letters.clone(),
        target_index: "2".into(),
    };
    let convolved = ffb_convolve(&copy_a, &copy_b, 4)?;

    // Letter-wise cumulant additivity.
    let kappa_sum = MomentBackedCumulants::new(&convolved);
    let kappa_a = MomentBackedCumulants::new(&copy_a);
    let kappa_b = MomentBackedCumulants::new(&copy_b);
    use crate::cumulants::CumulantOracle;
    let mut additive = true;
    for word in words_up_to(&abstract_letters, 4) {
        if kappa_sum.kappa(&word)? != kappa_a.kappa(&word)? + kappa_b.kappa(&word)? {
            additive = false;
            break;
        }
    }

    // The convolved moments match the summed-generator model.
    let mut matches = true;
    for word in words_up_to(&abstract_letters, 4) {
        let summed: Vec<crate::fock::FockOperator> = word
            .letters()
            .iter()
            .map(|l| {
                let a = family.operator(&Letter::new("1", l.face, l.tag.clone()))?;
                let b = family.operator(&Letter::new("2", l.face, l.tag.clone()))?;
                a.add(b)
            })
            .collect::<Result<Vec<_>>>()?;
        let refs: Vec<&crate::fock::FockOperator> = summed.iter().collect();
        if crate::fock::vacuum_expectation(&refs)? != convolved.moment(&word)? {
            matches = false;
            break;
        }
    }

    Ok(check(
        "additive convolution matches the two-copy model",
        additive && matches,
        "words up to length 4, cumulants letter-wise additive".into(),
    ))
}

/// A centered three-faced moment table with nonzero higher cumulants: the
/// scaling harness shows a nontrivial power law on it.
pub fn centered_fixture_table(max_n: usize) -> crate::cumulants::MomentTable {
    let letters = vec![
        Letter::new("a", Face::Left, "z"),
        Letter::new("b", Face::Right, "z"),
        Letter::new("k", Face::Central, "z"),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(20240131);
    let mut table = crate::cumulants::random_moment_table(letters.clone(), max_n, &mut rng);
    for letter in &letters {
        let word = Word::new(vec![letter.clone()]).expect("nonempty");
        table
            .insert(&word, BigRational::zero())
            .expect("known letter");
    }
    table
}

/// The scaling report of the centered fixture table, for the demo front end.
pub fn clt_demo_report(max_n: usize, n_list: &[u64]) -> Result<crate::climit::CltReport> {
    let table = centered_fixture_table(max_n);
    let memo = MemoizedMoments::new(&table);
    clt_scaling_report(&memo, n_list, max_n)
}

/// Runs every suite at default sizes.
pub fn run_all(seed: u64) -> Result<Vec<SuiteReport>> {
    let lattice_cfg = SuiteConfig {
        seed,
        samples: 60,
        max_n: 8,
    };
    let mobius_cfg = SuiteConfig {
        seed,
        samples: 40,
        max_n: 7,
    };
    Ok(vec![
        run_lattice_suite(lattice_cfg)?,
        run_mobius_suite(mobius_cfg)?,
        run_independence_suite(2, 5)?,
        run_clt_suite(5)?,
    ])
}
