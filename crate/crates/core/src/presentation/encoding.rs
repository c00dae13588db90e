use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;
use std::sync::Arc;

use super::PresentationError;
use crate::disintegration::VectorDescription;
use crate::effective::{FnEnumeration, ListEnumeration, SharedEnumeration, StageCursor, StageEnumeration};
use crate::exactnum::Exponent;
use crate::lpspace::LpVector;

pub type Decider = Arc<dyn Fn(usize) -> bool + Send + Sync>;

/// A c.e. set `C`: a one-to-one enumeration, optionally with a decider
/// and the number of elements when `C` is known to be finite.
#[derive(Clone)]
pub struct CeSetOracle {
    pub enumeration: SharedEnumeration<usize>,
    pub decider: Option<Decider>,
    pub cardinality: Option<usize>,
}

impl CeSetOracle {
    pub fn enumerated(enumeration: SharedEnumeration<usize>) -> Self {
        CeSetOracle { enumeration, decider: None, cardinality: None }
    }

    /// A finite set given by its recorded enumeration; the decider and the
    /// cardinality are read off the record.
    pub fn finite(record: ListEnumeration<usize>) -> Result<Self, PresentationError> {
        let mut cursor = record.cursor();
        let mut set = BTreeSet::new();
        for stage in 0..record.len() {
            for n in cursor.advance()? {
                if !set.insert(n) {
                    return Err(PresentationError::DuplicateEnumeration { element: n, stage });
                }
            }
        }
        let set = Arc::new(set);
        let cardinality = Some(set.len());
        Ok(CeSetOracle { enumeration: Arc::new(record), decider: Some(Arc::new(move |n| set.contains(&n))), cardinality })
    }

    /// Elements listed in order, all at stage 0.
    pub fn from_elements(elements: &[usize]) -> Result<Self, PresentationError> {
        Self::finite(ListEnumeration::at_once(elements.to_vec()))
    }

    /// A decidable set enumerated in increasing order: `n` at stage `n`.
    pub fn decidable(decider: Decider) -> Self {
        let d = decider.clone();
        let enumeration = Arc::new(FnEnumeration::new(move |s: usize| if d(s) { vec![s] } else { vec![] }));
        CeSetOracle { enumeration, decider: Some(decider), cardinality: None }
    }

    /// Whether every element enumerated by `stage` is accepted by the decider.
    pub fn decider_agrees(&self, stage: usize) -> Result<bool, PresentationError> {
        let Some(d) = &self.decider else { return Ok(true) };
        Ok(self.enumeration.snapshot(stage)?.into_iter().all(|n| d(n)))
    }
}

/// A structure map `n ↦ R(n)` revealed in stages.
pub trait Presentation: Send + Sync {
    /// `R(n)` if it is defined by `stage`.
    fn vector(&self, n: usize, stage: usize) -> Result<Option<VectorDescription>, PresentationError>;
}

/// `R(n) = e_n`, all defined at stage 0.
#[derive(Clone, Copy, Debug, Default)]
pub struct StandardPresentation;

impl Presentation for StandardPresentation {
    fn vector(&self, n: usize, _stage: usize) -> Result<Option<VectorDescription>, PresentationError> {
        Ok(Some(VectorDescription::Exact(LpVector::basis(n))))
    }
}

/// `R(2k) = e_2k + e_2k+1` and `R(2k+1) = e_{2 c_k}`.
#[derive(Clone)]
pub struct EncodingPresentation {
    pub set: CeSetOracle,
    pub p: Exponent,
}

pub fn build_encoding_presentation(set: CeSetOracle, p: Exponent) -> EncodingPresentation {
    EncodingPresentation { set, p }
}

/// The first `count` elements of a one-to-one enumeration, in order, with
/// the stage each appeared at; stops after `stages` stages.
pub(crate) fn first_elements(
    set: &CeSetOracle,
    count: usize,
    stages: usize,
) -> Result<Vec<(usize, usize)>, PresentationError> {
    let mut cursor: Box<dyn StageCursor<usize>> = set.enumeration.cursor();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for s in 0..stages {
        if out.len() >= count {
            break;
        }
        for n in cursor.advance()? {
            if !seen.insert(n) {
                return Err(PresentationError::DuplicateEnumeration { element: n, stage: s });
            }
            out.push((s, n));
        }
    }
    out.truncate(count);
    Ok(out)
}

impl Presentation for EncodingPresentation {
    fn vector(&self, n: usize, stage: usize) -> Result<Option<VectorDescription>, PresentationError> {
        let k = n / 2;
        let v = if n % 2 == 0 {
            &LpVector::basis(2 * k) + &LpVector::basis(2 * k + 1)
        } else {
            let found = first_elements(&self.set, k + 1, stage + 1)?;
            match found.get(k) {
                Some((_, c)) => LpVector::basis(2 * c),
                None => return Ok(None),
            }
        };
        Ok(Some(VectorDescription::Exact(v)))
    }
}

/// `n<TAB>vector` lines for the entries `n < count` defined by `stage`.
pub fn dump_presentation(
    r: &(impl Presentation + ?Sized),
    count: usize,
    stage: usize,
) -> Result<String, PresentationError> {
    let mut out = String::new();
    for n in 0..count {
        if let Some(v) = r.vector(n, stage)? {
            writeln!(out, "{n}\t{v}").expect("writing to a String");
        }
    }
    Ok(out)
}

/// Reads an explicit decider window, lines `n<TAB>0|1`.
pub fn parse_decider_window(text: &str) -> Result<BTreeSet<usize>, PresentationError> {
    let mut members = BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = || PresentationError::Parse(format!("line {}: expected `n<TAB>0|1`, got `{line}`", i + 1));
        let mut it = line.split_whitespace();
        let n: usize = it.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
        match it.next() {
            Some("1") => {
                members.insert(n);
            }
            Some("0") => {}
            _ => return Err(bad()),
        }
        if it.next().is_some() {
            return Err(bad());
        }
    }
    Ok(members)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(v: LpVector) -> Option<VectorDescription> {
        Some(VectorDescription::Exact(v))
    }

    fn e(n: usize) -> LpVector {
        LpVector::basis(n)
    }

    #[test]
    fn encoding_examples() {
        let r = build_encoding_presentation(CeSetOracle::from_elements(&[1]).unwrap(), Exponent::one());
        assert_eq!(r.vector(0, 0).unwrap(), exact(&e(0) + &e(1)));
        assert_eq!(r.vector(1, 0).unwrap(), exact(e(2)));
        assert_eq!(r.vector(2, 0).unwrap(), exact(&e(2) + &e(3)));
        assert_eq!(r.vector(3, 50).unwrap(), None);

        let empty = build_encoding_presentation(CeSetOracle::from_elements(&[]).unwrap(), Exponent::one());
        for n in [1, 3, 5] {
            assert_eq!(empty.vector(n, 20).unwrap(), None);
        }

        let evens = CeSetOracle::decidable(Arc::new(|n| n % 2 == 0));
        let r = build_encoding_presentation(evens, Exponent::one());
        assert_eq!(r.vector(3, 2).unwrap(), exact(e(4)));
        // c_1 = 2 appears at stage 2
        assert_eq!(r.vector(3, 1).unwrap(), None);
    }

    #[test]
    fn duplicates_rejected() {
        assert!(matches!(
            CeSetOracle::from_elements(&[3, 1, 3]),
            Err(PresentationError::DuplicateEnumeration { element: 3, .. })
        ));
        let liar = CeSetOracle::enumerated(Arc::new(ListEnumeration::new(vec![vec![2], vec![2]])));
        let r = build_encoding_presentation(liar, Exponent::one());
        assert!(matches!(r.vector(3, 5), Err(PresentationError::DuplicateEnumeration { element: 2, stage: 1 })));
    }

    #[test]
    fn stage_stability() {
        let set = CeSetOracle::decidable(Arc::new(|n| n % 3 == 1));
        let r = build_encoding_presentation(set, Exponent::one());
        for n in 0..12 {
            let mut first = None;
            for s in 0..40 {
                let v = r.vector(n, s).unwrap();
                if first.is_some() {
                    assert_eq!(v, first);
                } else {
                    first = v;
                }
            }
        }
    }

    #[test]
    fn decider_window_and_dump() {
        let w = parse_decider_window("0\t0\n1\t1\n2\t0\n").unwrap();
        assert_eq!(w.into_iter().collect::<Vec<_>>(), vec![1]);
        assert!(parse_decider_window("0\t2").is_err());
        let r = build_encoding_presentation(CeSetOracle::from_elements(&[1]).unwrap(), Exponent::one());
        assert_eq!(dump_presentation(&r, 4, 0).unwrap(), "0\t0:1/1 1:1/1\n1\t2:1/1\n2\t2:1/1 3:1/1\n");
        let set = CeSetOracle::from_elements(&[4, 0]).unwrap();
        assert!(set.decider_agrees(3).unwrap());
        assert_eq!(set.enumeration.snapshot(0).unwrap(), vec![4, 0]);
    }
}
