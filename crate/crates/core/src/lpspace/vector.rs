use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_traits::Zero;

use crate::exactnum::{GaussianRational, NumError, Rational};

/// A finitely supported vector of `l^p` with Gaussian-rational entries.
/// Zero entries are never stored, so the key set is the support.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LpVector {
    entries: BTreeMap<usize, GaussianRational>,
}

impl LpVector {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The standard basis vector `e_n`.
    pub fn basis(n: usize) -> Self {
        Self::from_entries([(n, GaussianRational::one())])
    }

    pub fn from_entries(items: impl IntoIterator<Item = (usize, GaussianRational)>) -> Self {
        let mut v = Self::zero();
        for (n, z) in items {
            v.add_at(n, &z);
        }
        v
    }

    pub fn from_real(items: impl IntoIterator<Item = (usize, Rational)>) -> Self {
        Self::from_entries(items.into_iter().map(|(n, q)| (n, GaussianRational::real(q))))
    }

    pub fn get(&self, n: usize) -> GaussianRational {
        self.entries.get(&n).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, &GaussianRational)> {
        self.entries.iter().map(|(n, z)| (*n, z))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.keys().copied()
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn disjoint_from(&self, other: &Self) -> bool {
        let (small, large) = if self.entries.len() <= other.entries.len() { (self, other) } else { (other, self) };
        small.entries.keys().all(|n| !large.entries.contains_key(n))
    }

    pub fn add_at(&mut self, n: usize, z: &GaussianRational) {
        let v = &self.get(n) + z;
        if v.is_zero() {
            self.entries.remove(&n);
        } else {
            self.entries.insert(n, v);
        }
    }

    pub fn set(&mut self, n: usize, z: GaussianRational) {
        if z.is_zero() {
            self.entries.remove(&n);
        } else {
            self.entries.insert(n, z);
        }
    }

    pub fn scale(&self, a: &GaussianRational) -> Self {
        if a.is_zero() {
            return Self::zero();
        }
        LpVector { entries: self.entries.iter().map(|(n, z)| (*n, z * a)).collect() }
    }

    pub fn scale_real(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        LpVector { entries: self.entries.iter().map(|(n, z)| (*n, z.scale(q))).collect() }
    }

    /// `self · χ_A`.
    pub fn restrict(&self, keep: impl Fn(usize) -> bool) -> Self {
        LpVector { entries: self.entries.iter().filter(|(n, _)| keep(**n)).map(|(n, z)| (*n, z.clone())).collect() }
    }

    /// Upper bound for the l^1 norm, `Σ (|re| + |im|)`.
    pub fn l1_bound(&self) -> Rational {
        self.entries.values().map(GaussianRational::l1_bound).fold(Rational::zero(), |a, b| a + b)
    }
}

impl Add for &LpVector {
    type Output = LpVector;
    fn add(self, rhs: &LpVector) -> LpVector {
        let mut out = self.clone();
        for (n, z) in rhs.entries() {
            out.add_at(n, z);
        }
        out
    }
}

impl Sub for &LpVector {
    type Output = LpVector;
    fn sub(self, rhs: &LpVector) -> LpVector {
        self + &(-rhs)
    }
}

impl Neg for &LpVector {
    type Output = LpVector;
    fn neg(self) -> LpVector {
        LpVector { entries: self.entries.iter().map(|(n, z)| (*n, -z)).collect() }
    }
}

impl fmt::Display for LpVector {
    /// Space-separated `index:value` terms; the zero vector is empty.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, z) in &self.entries {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{n}:{z}")?;
        }
        Ok(())
    }
}

impl FromStr for LpVector {
    type Err = NumError;

    fn from_str(s: &str) -> Result<Self, NumError> {
        // the imaginary marker ` i` is split off by whitespace; glue it back
        let mut terms: Vec<String> = Vec::new();
        for tok in s.split_whitespace() {
            match (tok, terms.last_mut()) {
                ("i", Some(last)) => last.push_str(" i"),
                ("i", None) => return Err(NumError::Parse(format!("dangling `i` in vector `{s}`"))),
                _ => terms.push(tok.to_string()),
            }
        }
        let mut v = LpVector::zero();
        for term in terms {
            let (idx, val) = term
                .split_once(':')
                .ok_or_else(|| NumError::Parse(format!("vector term `{term}` must be index:value")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| NumError::Parse(format!("bad index `{idx}` in vector term `{term}`")))?;
            let val: GaussianRational = val.parse()?;
            v.add_at(idx, &val);
        }
        Ok(v)
    }
}
