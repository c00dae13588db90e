use num_traits::Zero;

use super::norms::{norm, norm_sq_exact, phi_box};
use super::{LpError, LpVector};
use crate::exactnum::rational::pow2;
use crate::exactnum::{
    zero_find_with, ComplexBox, DyadicInterval, Exponent, GaussianRational, IntervalFunction, Rational,
    ZeroFindConfig,
};
use crate::presentation::VectorOracle;

/// `f ⪯ g`: `f = g · χ_A` for some set `A`.
pub fn subvector_leq(f: &LpVector, g: &LpVector) -> bool {
    f.entries().all(|(n, z)| &g.get(n) == z)
}

/// `⟨f,g⟩ = Σ f(n) conj(g(n))`.
pub fn pairing(f: &LpVector, g: &LpVector) -> GaussianRational {
    f.entries()
        .map(|(n, z)| z * &g.get(n).conj())
        .fold(GaussianRational::zero(), |acc, t| &acc + &t)
}

/// Certifies that a vector is `scalar · e_index`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomCertificate {
    pub index: usize,
    pub scalar: GaussianRational,
}

impl AtomCertificate {
    pub fn new(index: usize, scalar: GaussianRational) -> Result<Self, LpError> {
        if scalar.is_zero() {
            return Err(LpError::NotAnAtom("zero scalar".into()));
        }
        Ok(AtomCertificate { index, scalar })
    }

    pub fn unit(index: usize) -> Self {
        AtomCertificate { index, scalar: GaussianRational::one() }
    }

    pub fn from_vector(v: &LpVector) -> Option<Self> {
        let mut it = v.entries();
        let (n, z) = it.next()?;
        if it.next().is_some() {
            return None;
        }
        Some(AtomCertificate { index: n, scalar: z.clone() })
    }

    /// `|scalar| = 1`, checked exactly.
    pub fn is_unit(&self) -> bool {
        self.scalar.is_unimodular()
    }

    pub fn vector(&self) -> LpVector {
        LpVector::from_entries([(self.index, self.scalar.clone())])
    }
}

/// `λ ↦ σ₀(u − λf, f)` as an interval function. For a unit atom `f` its
/// unique zero is `f*(u)`.
pub struct AtomResidual<'a> {
    pub u: &'a LpVector,
    pub atom: &'a AtomCertificate,
    pub p: &'a Exponent,
}

impl IntervalFunction for AtomResidual<'_> {
    fn eval(&self, lambda: &ComplexBox, prec: u32) -> ComplexBox {
        // the residual is flat to second order at its zero
        let w = 2 * prec + 16;
        let c = ComplexBox::from_gaussian(&self.atom.scalar, w);
        let a = &ComplexBox::from_gaussian(&self.u.get(self.atom.index), w) - &(lambda * &c);
        // coordinates off the atom contribute exactly zero
        let phi = phi_box(&a, &c, self.p, w);
        ComplexBox::new(phi.abs(), DyadicInterval::zero())
    }
}

/// `λ̂` with `|λ̂ − f*(g)| < 2^-k` for a unit atom `f`, reading `g` only
/// through its approximations.
pub fn unit_functional_apply(
    f: &AtomCertificate,
    g: &(impl VectorOracle + ?Sized),
    p: &Exponent,
    k: u32,
) -> Result<GaussianRational, LpError> {
    unit_functional_apply_with(f, g, p, k, &ZeroFindConfig::default())
}

const NORM_SEARCH: u32 = 256;

pub fn unit_functional_apply_with(
    f: &AtomCertificate,
    g: &(impl VectorOracle + ?Sized),
    p: &Exponent,
    k: u32,
    config: &ZeroFindConfig,
) -> Result<GaussianRational, LpError> {
    if !f.is_unit() {
        return Err(LpError::NotAnAtom(format!("|{}| is not 1", f.scalar)));
    }
    let small = pow2(-(k as i64));
    let mut positive = false;
    for j in k + 1..k + 1 + NORM_SEARCH {
        let err = pow2(-(j as i64));
        let n = norm(&g.approx(j)?, p, j + 1);
        if n.hi_rational() + &err < small {
            // |f*(g)| <= ‖g‖
            return Ok(GaussianRational::zero());
        }
        if n.lo_rational() - &err > Rational::zero() {
            positive = true;
            break;
        }
    }
    if !positive {
        return Err(LpError::NormUndecided { k });
    }
    let u = g.approx(k + 2)?;
    if p.is_two() {
        return Ok(polar(&u, &f.vector()));
    }
    let radius = norm(&u, p, 8).hi_rational();
    let residual = AtomResidual { u: &u, atom: f, p };
    if residual.eval(&ComplexBox::zero(), k) == ComplexBox::zero() {
        // an exact zero at the origin is the unique one
        return Ok(GaussianRational::zero());
    }
    Ok(zero_find_with(&residual, &radius, k + 1, config)?)
}

/// `⟨u,f⟩ = ¼ Σ_m i^m ‖u + i^m f‖_2^2`.
fn polar(u: &LpVector, f: &LpVector) -> GaussianRational {
    let mut unit = GaussianRational::one();
    let mut acc = GaussianRational::zero();
    for _ in 0..4 {
        let s = norm_sq_exact(&(u + &f.scale(&unit)));
        acc = &acc + &unit.scale(&s);
        unit = &unit * &GaussianRational::i();
    }
    acc.scale(&Rational::new(1.into(), 4.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::{int, rat};
    use crate::presentation::ExactOracle;

    fn close(a: &GaussianRational, b: &GaussianRational, k: u32) -> bool {
        (a - b).norm_sqr() < pow2(-2 * k as i64)
    }

    #[test]
    fn subvector_examples() {
        let e0 = LpVector::basis(0);
        let e01 = &e0 + &LpVector::basis(1);
        assert!(subvector_leq(&e0, &e01));
        assert!(!subvector_leq(&e0.scale_real(&int(2)), &e01));
        assert!(subvector_leq(&LpVector::zero(), &e01));
    }

    #[test]
    fn pairing_examples() {
        let e0 = LpVector::basis(0);
        assert_eq!(pairing(&e0, &e0), GaussianRational::one());
        let v = LpVector::from_real([(0, int(3)), (1, int(1))]);
        assert_eq!(pairing(&v, &e0), GaussianRational::real(int(3)));
        let a = LpVector::from_entries([(2, GaussianRational::new(int(1), int(1)))]);
        let b = LpVector::from_entries([(2, GaussianRational::i())]);
        assert_eq!(pairing(&a, &b), GaussianRational::new(int(1), int(-1)));
    }

    #[test]
    fn atom_certificates() {
        assert!(AtomCertificate::new(0, GaussianRational::zero()).is_err());
        let a = AtomCertificate::new(3, GaussianRational::new(rat(3, 5), rat(4, 5))).unwrap();
        assert!(a.is_unit());
        assert_eq!(AtomCertificate::from_vector(&a.vector()), Some(a));
        assert_eq!(AtomCertificate::from_vector(&(&LpVector::basis(0) + &LpVector::basis(1))), None);
    }

    #[test]
    fn functional_examples() {
        let g = ExactOracle(LpVector::from_real([(0, int(3)), (1, int(1))]));
        let f = AtomCertificate::unit(0);
        let three = GaussianRational::real(int(3));
        let p = Exponent::from_ratio(3, 2).unwrap();
        assert!(close(&unit_functional_apply(&f, &g, &p, 10).unwrap(), &three, 10));
        let two = Exponent::from_ratio(2, 1).unwrap();
        assert_eq!(unit_functional_apply(&f, &g, &two, 10).unwrap(), three);
        let e1 = ExactOracle(LpVector::basis(1));
        for p in [Exponent::one(), p, two] {
            assert_eq!(unit_functional_apply(&f, &e1, &p, 4).unwrap(), GaussianRational::zero());
        }
    }

    #[test]
    fn functional_complex_atom() {
        let c = GaussianRational::new(rat(3, 5), rat(-4, 5));
        let f = AtomCertificate::new(2, c.clone()).unwrap();
        let z = GaussianRational::new(rat(1, 3), int(2));
        let g = ExactOracle(LpVector::from_entries([(2, z.clone()), (5, GaussianRational::one())]));
        // f*(g) = g(2) conj(c)
        let want = &z * &c.conj();
        for p in [Exponent::one(), Exponent::from_ratio(3, 1).unwrap()] {
            let got = unit_functional_apply(&f, &g, &p, 12).unwrap();
            assert!(close(&got, &want, 12), "p={p}: {got}");
        }
    }

    #[test]
    fn non_unit_rejected() {
        let f = AtomCertificate::new(0, GaussianRational::real(int(2))).unwrap();
        let g = ExactOracle(LpVector::basis(0));
        assert!(matches!(unit_functional_apply(&f, &g, &Exponent::one(), 4), Err(LpError::NotAnAtom(_))));
    }
}
