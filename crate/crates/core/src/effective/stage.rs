use std::collections::BTreeMap;
use std::fmt::{Display, Write as _};
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use super::EffectiveError;

/// A deterministic stage-by-stage enumeration. Every cursor replays the
/// same items at the same stages.
pub trait StageEnumeration<T>: Send + Sync {
    fn cursor(&self) -> Box<dyn StageCursor<T>>;

    /// Items first appearing at stage `s`.
    fn emit(&self, s: usize) -> Result<Vec<T>, EffectiveError> {
        let mut c = self.cursor();
        for _ in 0..s {
            c.advance()?;
        }
        c.advance()
    }

    /// Everything emitted at stages `0..=s`.
    fn snapshot(&self, s: usize) -> Result<Vec<T>, EffectiveError> {
        let mut c = self.cursor();
        let mut out = Vec::new();
        for _ in 0..=s {
            out.extend(c.advance()?);
        }
        Ok(out)
    }
}

pub trait StageCursor<T>: Send {
    /// The stage the next call to `advance` produces.
    fn stage(&self) -> usize;
    fn advance(&mut self) -> Result<Vec<T>, EffectiveError>;
}

impl<T, E: StageEnumeration<T> + ?Sized> StageEnumeration<T> for Arc<E> {
    fn cursor(&self) -> Box<dyn StageCursor<T>> {
        (**self).cursor()
    }
}

pub type SharedEnumeration<T> = Arc<dyn StageEnumeration<T>>;

/// Enumeration given by a pure function of the stage.
pub struct FnEnumeration<F>(pub Arc<F>);

impl<F> FnEnumeration<F> {
    pub fn new(f: F) -> Self {
        FnEnumeration(Arc::new(f))
    }
}

struct FnCursor<F> {
    f: Arc<F>,
    stage: usize,
}

impl<T, F> StageEnumeration<T> for FnEnumeration<F>
where
    T: 'static,
    F: Fn(usize) -> Vec<T> + Send + Sync + 'static,
{
    fn cursor(&self) -> Box<dyn StageCursor<T>> {
        Box::new(FnCursor { f: self.0.clone(), stage: 0 })
    }
}

impl<T, F> StageCursor<T> for FnCursor<F>
where
    F: Fn(usize) -> Vec<T> + Send + Sync,
{
    fn stage(&self) -> usize {
        self.stage
    }

    fn advance(&mut self) -> Result<Vec<T>, EffectiveError> {
        let out = (self.f)(self.stage);
        self.stage += 1;
        Ok(out)
    }
}

/// Shares one run of an enumeration between all cursors: stages are
/// computed once, on demand, and replayed from memory.
pub struct CachedEnumeration<T> {
    state: Arc<Mutex<CacheState<T>>>,
}

struct CacheState<T> {
    source: Box<dyn StageCursor<T>>,
    stages: Vec<Vec<T>>,
    failure: Option<EffectiveError>,
}

impl<T: 'static> CachedEnumeration<T> {
    pub fn new(source: &(impl StageEnumeration<T> + ?Sized)) -> Self {
        let state = CacheState { source: source.cursor(), stages: Vec::new(), failure: None };
        CachedEnumeration { state: Arc::new(Mutex::new(state)) }
    }
}

struct CachedCursor<T> {
    state: Arc<Mutex<CacheState<T>>>,
    stage: usize,
}

impl<T: Clone + Send + 'static> StageEnumeration<T> for CachedEnumeration<T> {
    fn cursor(&self) -> Box<dyn StageCursor<T>> {
        Box::new(CachedCursor { state: self.state.clone(), stage: 0 })
    }
}

impl<T: Clone + Send> StageCursor<T> for CachedCursor<T> {
    fn stage(&self) -> usize {
        self.stage
    }

    fn advance(&mut self) -> Result<Vec<T>, EffectiveError> {
        let mut st = self.state.lock().unwrap_or_else(|e| e.into_inner());
        while st.stages.len() <= self.stage {
            if let Some(e) = &st.failure {
                return Err(e.clone());
            }
            match st.source.advance() {
                Ok(items) => st.stages.push(items),
                Err(e) => {
                    st.failure = Some(e.clone());
                    return Err(e);
                }
            }
        }
        let out = st.stages[self.stage].clone();
        self.stage += 1;
        Ok(out)
    }
}

/// A finite recorded enumeration; stages past the end emit nothing.
#[derive(Clone, Debug, Default)]
pub struct ListEnumeration<T> {
    stages: Arc<Vec<Vec<T>>>,
}

impl<T> ListEnumeration<T> {
    pub fn new(stages: Vec<Vec<T>>) -> Self {
        ListEnumeration { stages: Arc::new(stages) }
    }

    /// Everything emitted at stage 0.
    pub fn at_once(items: Vec<T>) -> Self {
        Self::new(vec![items])
    }

    /// Number of recorded stages.
    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }
}

struct ListCursor<T> {
    stages: Arc<Vec<Vec<T>>>,
    stage: usize,
}

impl<T: Clone + Send + Sync + 'static> StageEnumeration<T> for ListEnumeration<T> {
    fn cursor(&self) -> Box<dyn StageCursor<T>> {
        Box::new(ListCursor { stages: self.stages.clone(), stage: 0 })
    }
}

impl<T: Clone + Send + Sync> StageCursor<T> for ListCursor<T> {
    fn stage(&self) -> usize {
        self.stage
    }

    fn advance(&mut self) -> Result<Vec<T>, EffectiveError> {
        let out = self.stages.get(self.stage).cloned().unwrap_or_default();
        self.stage += 1;
        Ok(out)
    }
}

/// `s<TAB>item` lines for stages `0..stages`.
pub fn format_stages<T: Display>(
    e: &(impl StageEnumeration<T> + ?Sized),
    stages: usize,
) -> Result<String, EffectiveError> {
    let mut c = e.cursor();
    let mut out = String::new();
    for s in 0..stages {
        for item in c.advance()? {
            writeln!(out, "{s}\t{item}").expect("writing to a String");
        }
    }
    Ok(out)
}

/// Reads `s<TAB>item` lines; blank lines and `#` comments are skipped.
pub fn parse_stages<T>(text: &str) -> Result<ListEnumeration<T>, EffectiveError>
where
    T: FromStr,
    T::Err: Display,
{
    let mut by_stage: BTreeMap<usize, Vec<T>> = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |why: String| EffectiveError::Parse(format!("line {}: {why}", i + 1));
        let (s, item) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| bad(format!("expected `stage<TAB>item`, got `{line}`")))?;
        let s: usize = s.parse().map_err(|_| bad(format!("bad stage `{s}`")))?;
        let item = item.trim().parse::<T>().map_err(|e| bad(e.to_string()))?;
        by_stage.entry(s).or_default().push(item);
    }
    let len = by_stage.keys().next_back().map_or(0, |s| s + 1);
    let mut stages: Vec<Vec<T>> = (0..len).map(|_| Vec::new()).collect();
    for (s, items) in by_stage {
        stages[s] = items;
    }
    Ok(ListEnumeration::new(stages))
}
