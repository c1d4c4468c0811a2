//! Incidence algebra on an enumerated lattice: the delta and zeta functions,
//! their convolution, the Möbius function by zeta inversion, and the
//! multiplicative block formula as an independently checkable fast path.

use std::collections::HashMap;
use std::sync::Arc;

use num::{BigInt, BigRational, One, Zero};

use crate::error::{Error, Result};
use crate::lattice::{lattice_for, IbncLattice};
use crate::partitions::Partition;

/// A rational-valued function on the comparable pairs of a lattice.
pub struct IncidenceFunction {
    lattice: Arc<IbncLattice>,
    values: HashMap<(usize, usize), BigRational>,
}

impl IncidenceFunction {
    /// Tabulates `f` on every comparable pair of element indices.
    pub fn tabulate(
        lattice: Arc<IbncLattice>,
        mut f: impl FnMut(usize, usize) -> BigRational,
    ) -> Self {
        let mut values = HashMap::new();
        for i in 0..lattice.len() {
            for j in 0..lattice.len() {
                if lattice.leq_idx(i, j) {
                    values.insert((i, j), f(i, j));
                }
            }
        }
        IncidenceFunction { lattice, values }
    }

    pub fn lattice(&self) -> &Arc<IbncLattice> {
        &self.lattice
    }

    /// Value on a comparable pair of element indices.
    pub fn value_idx(&self, i: usize, j: usize) -> Result<&BigRational> {
        self.values
            .get(&(i, j))
            .ok_or_else(|| Error::Domain(format!("elements {i} and {j} are not comparable")))
    }

    /// Value on a comparable pair of partitions.
    pub fn value(&self, sigma: &Partition, pi: &Partition) -> Result<&BigRational> {
        let i = self
            .lattice
            .index_of(sigma)
            .ok_or_else(|| Error::Domain(format!("{sigma} is not an element of the lattice")))?;
        let j = self
            .lattice
            .index_of(pi)
            .ok_or_else(|| Error::Domain(format!("{pi} is not an element of the lattice")))?;
        self.value_idx(i, j)
    }
}

/// The convolution unit: 1 on the diagonal, 0 elsewhere.
pub fn delta(lattice: Arc<IbncLattice>) -> IncidenceFunction {
    IncidenceFunction::tabulate(lattice, |i, j| {
        if i == j {
            BigRational::one()
        } else {
            BigRational::zero()
        }
    })
}

/// The order indicator: 1 on every comparable pair.
pub fn zeta(lattice: Arc<IbncLattice>) -> IncidenceFunction {
    IncidenceFunction::tabulate(lattice, |_, _| BigRational::one())
}

/// Convolution `(f * g)(a, b) = sum over a <= c <= b of f(a, c) g(c, b)`.
pub fn convolve(f: &IncidenceFunction, g: &IncidenceFunction) -> Result<IncidenceFunction> {
    if f.lattice.chi() != g.lattice.chi() {
        return Err(Error::InvalidArgument(format!(
            "convolution of incidence functions on different lattices ({} vs {})",
            f.lattice.chi(),
            g.lattice.chi()
        )));
    }
    let lattice = Arc::clone(&f.lattice);
    let size = lattice.len();
    let mut values = HashMap::new();
    for i in 0..size {
        for j in 0..size {
            if !lattice.leq_idx(i, j) {
                continue;
            }
            let mut acc = BigRational::zero();
            for c in 0..size {
                if lattice.leq_idx(i, c) && lattice.leq_idx(c, j) {
                    acc += f.values[&(i, c)].clone() * &g.values[&(c, j)];
                }
            }
            values.insert((i, j), acc);
        }
    }
    Ok(IncidenceFunction { lattice, values })
}

/// The Möbius function, tabulated from the interval recursion
/// `mu(a, a) = 1`, `mu(a, b) = -sum_{a <= c < b} mu(a, c)`; it is the unique
/// convolution inverse of [`zeta`].
pub fn mobius_bruteforce(lattice: Arc<IbncLattice>) -> IncidenceFunction {
    IncidenceFunction::tabulate(Arc::clone(&lattice), |i, j| {
        BigRational::from(BigInt::from(lattice.mobius_idx(i, j)))
    })
}

/// Möbius value by the multiplicative block formula: the product over the
/// blocks `V` of `pi` of the Möbius value from the restriction of `sigma` to
/// `V` up to the one-block partition, each taken in the lattice of the
/// restricted labeling. Empty restrictions contribute the factor 1.
pub fn mobius_product(
    sigma: &Partition,
    pi: &Partition,
    lattice: &IbncLattice,
) -> Result<BigRational> {
    let i = lattice
        .index_of(sigma)
        .ok_or_else(|| Error::Domain(format!("{sigma} is not an element of the lattice")))?;
    let j = lattice
        .index_of(pi)
        .ok_or_else(|| Error::Domain(format!("{pi} is not an element of the lattice")))?;
    if !lattice.leq_idx(i, j) {
        return Err(Error::Domain(format!("{sigma} does not precede {pi}")));
    }
    let mut product: i64 = 1;
    for block in pi.blocks() {
        let sub_chi = lattice.chi().restrict(block)?;
        let sub = lattice_for(&sub_chi)?;
        let restricted = sigma.restrict(block)?.relabel();
        let idx = sub.index_of(&restricted).ok_or_else(|| {
            Error::Domain(format!(
                "restriction {restricted} missing from the block lattice"
            ))
        })?;
        product *= sub.mobius_to_top(idx);
    }
    Ok(BigRational::from(BigInt::from(product)))
}
