use std::collections::HashSet;
use std::sync::{Arc, Mutex};

use num_traits::{One, Signed, Zero};

use super::chains::{ChainConfig, NormFamily, RealOracle};
use super::partition::ChainPartition;
use super::tree::{epsilon, is_terminal, value_of};
use super::DisintError;
use crate::exactnum::rational::{ceil_log2, max, pow2};
use crate::exactnum::{pow_rational, Rational};
use crate::lpspace::{unit_functional_apply, AtomCertificate, LpError, LpVector};
use crate::presentation::{normalize, IsometryOracle, OracleError, PresentationError, SharedOracle, VectorOracle};

/// A vector within `2^-k` of `g_n = inf φ[C_n]`: descend `C_n` until
/// `‖φ(ν) − g_n‖_p = (‖φ(ν)‖_p^p − ‖g_n‖_p^p)^(1/p)` is below `2^-(k+1)`.
pub fn approximate_infimum(
    part: &ChainPartition,
    norm: &dyn RealOracle,
    n: usize,
    k: u32,
    config: &ChainConfig,
) -> Result<LpVector, DisintError> {
    let p = part.exponent();
    let phi = part.disintegration();
    let origin = part.origin(n)?;
    let size = value_of(phi, &origin)?.norm(p, 4).hi_rational() + Rational::one();
    let cp = p.ceil();
    let j = cp * (k + 2) + 8 + cp * ceil_log2(&size).max(0) as u32;
    let (lo, _) = norm.enclose(j)?;
    let lo = max(&lo, &Rational::zero());
    let floor = pow_rational(&lo, p.value(), j + 4).lo_rational();
    let target = pow_rational(&pow2(-(k as i64) - 1), p.value(), j + 4).lo_rational();
    let mut node = origin;
    for _ in 0..config.max_depth {
        let v = value_of(phi, &node)?;
        if is_terminal(phi, &node) {
            return Ok(v.truncate(k + 1));
        }
        if v.norm_pow(p, j + 4).hi_rational() - &floor < target {
            return Ok(v.truncate(k + 1));
        }
        node = match part.successor(&node)? {
            Some(next) => next,
            None => return Ok(v.truncate(k + 1)),
        };
    }
    Err(DisintError::StageBudgetExceeded(format!("chain {n} not within 2^-{k} of its infimum")))
}

#[derive(Clone, Debug)]
pub struct ReconstructConfig {
    pub chain: ChainConfig,
    /// Dovetailing steps when searching for nonzero infima.
    pub max_steps: usize,
}

impl Default for ReconstructConfig {
    fn default() -> Self {
        ReconstructConfig { chain: ChainConfig::default(), max_steps: 4096 }
    }
}

struct Search {
    step: usize,
    found: HashSet<usize>,
    /// `(n, L)` in order of certification, with `0 < L <= ‖g_n‖_p`.
    order: Vec<(usize, Rational)>,
}

/// `e_k ↦ g_{n_k} / ‖g_{n_k}‖_p`, where `n_0, n_1, …` lists the chains
/// with nonzero infimum in the order their norms are certified positive.
pub struct ReconstructedIsometry {
    part: Arc<ChainPartition>,
    norms: NormFamily,
    config: ReconstructConfig,
    search: Mutex<Search>,
}

pub fn reconstruct_isometry(
    norms: NormFamily,
    part: Arc<ChainPartition>,
    config: ReconstructConfig,
) -> Result<ReconstructedIsometry, DisintError> {
    if part.exponent().is_two() {
        return Err(LpError::ParallelogramLaw.into());
    }
    Ok(ReconstructedIsometry {
        part,
        norms,
        config,
        search: Mutex::new(Search { step: 0, found: HashSet::new(), order: Vec::new() }),
    })
}

impl ReconstructedIsometry {
    /// The chain behind `e_k` and a positive lower bound for its norm.
    pub fn member(&self, k: usize) -> Result<(usize, Rational), DisintError> {
        let mut s = self.search.lock().unwrap_or_else(|e| e.into_inner());
        while s.order.len() <= k {
            if s.step >= self.config.max_steps {
                return Err(DisintError::StageBudgetExceeded(format!(
                    "only {} nonzero chain infima certified in {} steps",
                    s.order.len(),
                    self.config.max_steps
                )));
            }
            let t = s.step;
            for n in 0..=t {
                if s.found.contains(&n) {
                    continue;
                }
                let precision = (t - n) as u32;
                let (lo, _) = match (self.norms)(n).enclose(precision) {
                    Ok(e) => e,
                    Err(DisintError::StageBudgetExceeded(_) | DisintError::ChainBudget { .. }) => continue,
                    Err(e) => return Err(e),
                };
                if lo.is_positive() {
                    s.found.insert(n);
                    s.order.push((n, lo));
                }
            }
            s.step += 1;
        }
        Ok(s.order[k].clone())
    }
}

struct ImageOracle {
    part: Arc<ChainPartition>,
    norm: Arc<dyn RealOracle>,
    n: usize,
    lower: Rational,
    config: ChainConfig,
}

impl VectorOracle for ImageOracle {
    fn approx(&self, k: u32) -> Result<LpVector, OracleError> {
        // ‖x/‖x‖ − g/‖g‖‖ <= 2‖x − g‖ / ‖g‖
        let extra = (-ceil_log2(&self.lower)).max(0) as u32;
        let g = approximate_infimum(&self.part, self.norm.as_ref(), self.n, k + 3 + extra, &self.config)
            .map_err(|e| match e {
                DisintError::StageBudgetExceeded(s) => OracleError::BudgetExceeded(s),
                e => OracleError::Failed(e.to_string()),
            })?;
        Ok(normalize(&g, self.part.exponent(), k + 1))
    }
}

impl IsometryOracle for ReconstructedIsometry {
    fn image(&self, j: usize) -> Result<SharedOracle, PresentationError> {
        let (n, lower) = self.member(j).map_err(|e| match e {
            DisintError::StageBudgetExceeded(s) => PresentationError::StageBudgetExceeded(s),
            e => PresentationError::Parse(e.to_string()),
        })?;
        Ok(Arc::new(ImageOracle {
            part: self.part.clone(),
            norm: (self.norms)(n),
            n,
            lower,
            config: self.config.chain.clone(),
        }))
    }
}

/// `q` with `|q − ‖g_n‖_p| < 2^-k`, from an isometry `T` onto the space:
/// dovetails nodes `ν` of `C_n` against basis indices `j`, stopping at a
/// node of norm below `2^-k` or one whose mass sits on the coordinate
/// carrying `T(e_j)`.
pub fn norms_from_isometry(
    t: &(impl IsometryOracle + ?Sized),
    part: &ChainPartition,
    n: usize,
    k: u32,
    config: &ReconstructConfig,
) -> Result<Rational, DisintError> {
    let p = part.exponent();
    if p.is_two() {
        return Err(LpError::ParallelogramLaw.into());
    }
    let phi = part.disintegration();
    let small = pow2(-(k as i64));
    let delta = pow2(-(k as i64) - 2);
    let mut chain = vec![part.origin(n)?];
    let mut ended = false;
    let mut coordinate: Vec<Option<usize>> = Vec::new();
    for step in 0..config.max_steps {
        for d in 0..=step {
            let j = step - d;
            while !ended && chain.len() <= d {
                match part.successor(chain.last().expect("chain is non-empty"))? {
                    Some(next) => chain.push(next),
                    None => ended = true,
                }
            }
            if d >= chain.len() {
                continue;
            }
            let node = &chain[d];
            let v = value_of(phi, node)?;
            let w = k + 8 + 2 * d.min(256) as u32;
            if v.norm(p, w).hi_rational() < small {
                return Ok(Rational::zero());
            }
            while coordinate.len() <= j {
                let u = t.image(coordinate.len())?.approx(3)?;
                let quarter = Rational::new(1.into(), 4.into());
                coordinate.push(u.entries().find(|(_, z)| z.norm_sqr() > quarter).map(|(m, _)| m));
            }
            let Some(m) = coordinate[j] else { continue };
            let lambda = unit_functional_apply(&AtomCertificate::unit(m), &v, p, k + 2)?;
            let modulus = pow_rational(&lambda.norm_sqr(), &Rational::new(1.into(), 2.into()), k + 4);
            let reach = modulus.lo_rational() - &delta;
            if !reach.is_positive() {
                continue;
            }
            let slack = if is_terminal(phi, node) { Rational::zero() } else { epsilon(node, phi, p, w)?.hi_rational() };
            let lhs = v.norm_pow(p, w).hi_rational() + slack;
            let rhs = pow_rational(&reach, p.value(), w).lo_rational() * Rational::from_integer(2.into());
            if lhs < rhs {
                return Ok(modulus.midpoint().to_rational());
            }
        }
    }
    Err(DisintError::StageBudgetExceeded(format!("norm of chain {n} not found in {} steps", config.max_steps)))
}

/// Exact `‖g_n‖_p` for the spine: `0` for `n = 0`, else `2^-(n-1)`.
pub fn spine_norm(n: usize) -> Rational {
    if n == 0 {
        Rational::zero()
    } else {
        pow2(-(n as i64 - 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disintegration::{build_partition, exact_norms, FiniteDisintegration, PartitionConfig, Spine};
    use crate::exactnum::rational::{int, rat};
    use crate::exactnum::Exponent;
    use crate::lpspace::norm;
    use crate::presentation::{ExactOracle, IdentityIsometry};

    fn spine(p: Exponent) -> Arc<ChainPartition> {
        Arc::new(build_partition(Arc::new(Spine), p, PartitionConfig::default()))
    }

    fn spine_exact() -> NormFamily {
        exact_norms((0..64).map(spine_norm).collect())
    }

    #[test]
    fn infima_approximated() {
        let part = spine(Exponent::one());
        let g = approximate_infimum(&part, &super::super::ExactReal(int(0)), 0, 10, &ChainConfig::default()).unwrap();
        assert!(norm(&g, part.exponent(), 20).hi_rational() < pow2(-10));
        let g = approximate_infimum(&part, &super::super::ExactReal(rat(1, 4)), 3, 10, &ChainConfig::default()).unwrap();
        assert_eq!(g, LpVector::from_real([(2, rat(1, 4))]));
    }

    #[test]
    fn spine_reconstruction() {
        let part = spine(Exponent::one());
        let t = reconstruct_isometry(spine_exact(), part, ReconstructConfig::default()).unwrap();
        for j in 0..6 {
            assert_eq!(t.member(j).unwrap().0, j + 1);
            let img = t.image(j).unwrap().approx(12).unwrap();
            assert_eq!(img, LpVector::basis(j));
        }
    }

    #[test]
    fn two_leaf_reconstruction() {
        let p = Exponent::from_ratio(3, 1).unwrap();
        let part = Arc::new(build_partition(Arc::new(FiniteDisintegration::two_leaf()), p.clone(), PartitionConfig::default()));
        let t = reconstruct_isometry(exact_norms(vec![int(1), int(1)]), part, ReconstructConfig::default()).unwrap();
        let mut images: Vec<LpVector> = (0..2).map(|j| t.image(j).unwrap().approx(10).unwrap()).collect();
        images.sort_by_key(|v| v.support().next());
        assert_eq!(images, vec![LpVector::basis(0), LpVector::basis(1)]);
        assert!(t.image(2).is_err());
        let v = crate::presentation::extend_linear_map(&t, &ExactOracle(LpVector::basis(0)), 8).unwrap();
        assert!(norm(&v, &p, 20).contains_rational(&int(1)));
    }

    #[test]
    fn norms_from_identity() {
        let part = spine(Exponent::one());
        let cfg = ReconstructConfig::default();
        let q = norms_from_isometry(&IdentityIsometry, &part, 1, 4, &cfg).unwrap();
        assert!((q - int(1)).abs() < rat(1, 16));
        assert_eq!(norms_from_isometry(&IdentityIsometry, &part, 0, 4, &cfg).unwrap(), int(0));
        let q = norms_from_isometry(&IdentityIsometry, &part, 3, 6, &cfg).unwrap();
        assert!((q - rat(1, 4)).abs() < rat(1, 64));
    }

    #[test]
    fn round_trip_through_reconstruction() {
        let part = spine(Exponent::from_ratio(3, 1).unwrap());
        let t = reconstruct_isometry(spine_exact(), part.clone(), ReconstructConfig::default()).unwrap();
        for n in 0..6 {
            let q = norms_from_isometry(&t, &part, n, 8, &ReconstructConfig::default()).unwrap();
            assert!((q - spine_norm(n)).abs() < rat(2, 256), "chain {n}");
        }
    }
}
