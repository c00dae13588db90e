use std::sync::Arc;

use num_traits::One;

use super::encoding::{first_elements, CeSetOracle};
use super::oracle::{ExactOracle, OracleError, SharedOracle, VectorOracle};
use super::PresentationError;
use crate::effective::{SharedEnumeration, StageCursor};
use crate::exactnum::rational::{ceil_log2, pow2};
use crate::exactnum::{pow_interval, Exponent, GaussianRational, Rational};
use crate::lpspace::{norm_pow, overlaps_near, LpVector};

/// A linear isometry given by the images of the standard basis.
pub trait IsometryOracle: Send + Sync {
    fn image(&self, j: usize) -> Result<SharedOracle, PresentationError>;
}

impl<T: IsometryOracle + ?Sized> IsometryOracle for Arc<T> {
    fn image(&self, j: usize) -> Result<SharedOracle, PresentationError> {
        (**self).image(j)
    }
}

/// `e_j ↦ e_j`.
#[derive(Clone, Copy, Debug, Default)]
pub struct IdentityIsometry;

impl IsometryOracle for IdentityIsometry {
    fn image(&self, j: usize) -> Result<SharedOracle, PresentationError> {
        Ok(Arc::new(ExactOracle(LpVector::basis(j))))
    }
}

/// A vector within `2^-k` of `v / ‖v‖_p`.
pub fn normalize(v: &LpVector, p: &Exponent, k: u32) -> LpVector {
    if v.is_zero() {
        return LpVector::zero();
    }
    // |1 − c‖v‖| <= width(c) ‖v‖ with ‖v‖ <= 1 + Σ|v_n|
    let size = v.l1_bound() + Rational::one();
    let w = k + 2 + ceil_log2(&size).max(0) as u32;
    let inv = pow_interval(&norm_pow(v, p, w + 8), &-p.recip(), w);
    v.scale_real(&inv.midpoint().to_rational())
}

/// `v / ‖v‖_p` for an exact nonzero `v`.
pub struct NormalizedOracle {
    pub v: LpVector,
    pub p: Exponent,
}

impl VectorOracle for NormalizedOracle {
    fn approx(&self, k: u32) -> Result<LpVector, OracleError> {
        Ok(normalize(&self.v, &self.p, k))
    }
}

/// The isometry onto the closed span of the encoding presentation built
/// from a decidable `C`: `S(3k) = e_{2a_k} + e_{2a_k+1}`, `S(3k+1) =
/// e_{2c_k}`, `S(3k+2) = e_{2c_k+1}` with `a_k` the increasing enumeration
/// of the complement. Past the last element of a finite `C` only the
/// `a`-vectors remain.
pub struct EncodingIsometry {
    set: CeSetOracle,
    p: Exponent,
    budget: usize,
}

pub fn oracle_isometry(set: CeSetOracle, p: Exponent, budget: usize) -> Result<EncodingIsometry, PresentationError> {
    if set.decider.is_none() {
        return Err(PresentationError::DeciderMissing);
    }
    Ok(EncodingIsometry { set, p, budget })
}

impl EncodingIsometry {
    /// The `k`-th element of the complement.
    fn complement(&self, k: usize) -> Result<usize, PresentationError> {
        let d = self.set.decider.as_ref().expect("checked at construction");
        let mut seen = 0;
        for n in 0..self.budget {
            if !d(n) {
                if seen == k {
                    return Ok(n);
                }
                seen += 1;
            }
        }
        Err(PresentationError::StageBudgetExceeded(format!("complement element {k} not found below {}", self.budget)))
    }

    fn element(&self, k: usize) -> Result<usize, PresentationError> {
        let found = first_elements(&self.set, k + 1, self.budget)?;
        found.get(k).map(|(_, c)| *c).ok_or_else(|| {
            PresentationError::StageBudgetExceeded(format!("element c_{k} not enumerated within {} stages", self.budget))
        })
    }

    /// `S(j)` as an exact vector.
    pub fn structure_vector(&self, j: usize) -> Result<LpVector, PresentationError> {
        let pair = |a: usize| &LpVector::basis(2 * a) + &LpVector::basis(2 * a + 1);
        if let Some(card) = self.set.cardinality {
            if j >= 3 * card {
                return Ok(pair(self.complement(card + j - 3 * card)?));
            }
        }
        let k = j / 3;
        Ok(match j % 3 {
            0 => pair(self.complement(k)?),
            1 => LpVector::basis(2 * self.element(k)?),
            _ => LpVector::basis(2 * self.element(k)? + 1),
        })
    }
}

impl IsometryOracle for EncodingIsometry {
    fn image(&self, j: usize) -> Result<SharedOracle, PresentationError> {
        let v = self.structure_vector(j)?;
        Ok(Arc::new(NormalizedOracle { v, p: self.p.clone() }))
    }
}

#[derive(Clone, Debug)]
pub struct DecodeConfig {
    /// Dovetailing steps before giving up.
    pub max_steps: usize,
}

impl Default for DecodeConfig {
    fn default() -> Self {
        DecodeConfig { max_steps: 10_000 }
    }
}

/// Decides `n ∈ C` from an isometry onto the encoding presentation's space
/// and an enumeration of `C`. At step `t` the enumeration advances one
/// stage and every pair `(j, k)` with `j + k = t` is tried: `T(e_j)`
/// certified to overlap both `e_2n` and `e_2n+1` shows `n ∉ C`.
pub fn decode_set(
    t0: &(impl IsometryOracle + ?Sized),
    enumeration: &SharedEnumeration<usize>,
    n: usize,
    p: &Exponent,
    config: &DecodeConfig,
) -> Result<bool, PresentationError> {
    if p.is_two() {
        return Err(PresentationError::Lp(crate::lpspace::LpError::ParallelogramLaw));
    }
    let a = LpVector::basis(2 * n);
    let b = LpVector::basis(2 * n + 1);
    let mut cursor: Box<dyn StageCursor<usize>> = enumeration.cursor();
    let mut images: Vec<SharedOracle> = Vec::new();
    for t in 0..config.max_steps {
        if cursor.advance()?.contains(&n) {
            return Ok(true);
        }
        for j in 0..=t {
            let k = (t - j) as u32;
            if j == images.len() {
                images.push(t0.image(j)?);
            }
            let u = images[j].approx(k)?;
            if u.get(2 * n).is_zero() || u.get(2 * n + 1).is_zero() {
                continue;
            }
            let delta = pow2(-(k as i64));
            if overlaps_near(&u, &delta, &a, p, k + 4) && overlaps_near(&u, &delta, &b, p, k + 4) {
                return Ok(false);
            }
        }
    }
    Err(PresentationError::StageBudgetExceeded(format!("membership of {n} undecided after {} steps", config.max_steps)))
}

/// Approximates `T(v)` within `2^-k` from the basis images of a norm-one
/// linear map.
pub fn extend_linear_map(
    images: &(impl IsometryOracle + ?Sized),
    v: &(impl VectorOracle + ?Sized),
    k: u32,
) -> Result<LpVector, PresentationError> {
    let u = v.approx(k + 1)?;
    let mass = u.entries().map(|(_, a)| a.l1_bound()).fold(Rational::one(), |acc, x| acc + x);
    let guard = ceil_log2(&mass).max(0) as u32;
    let mut out = LpVector::zero();
    for (j, alpha) in u.entries() {
        let w = images.image(j)?.approx(k + 1 + guard)?;
        out = &out + &w.scale(alpha);
    }
    Ok(out)
}

/// Image of a finite combination `Σ α_j e_j` given exactly.
pub fn apply_exact(
    images: &(impl IsometryOracle + ?Sized),
    coefficients: &[(usize, GaussianRational)],
    k: u32,
) -> Result<LpVector, PresentationError> {
    extend_linear_map(images, &ExactOracle(LpVector::from_entries(coefficients.iter().cloned())), k)
}
