use serde::{Deserialize, Serialize};

use super::stream::{EdgeUpdate, GraphStream, Model};
use crate::error::{Error, Result};

/// Things whose memory footprint can be charged in machine words.
///
/// Node ids and counters are one word, edges two.
pub trait WordCount {
    fn words(&self) -> usize;
}

impl WordCount for usize {
    fn words(&self) -> usize {
        1
    }
}

impl<T: WordCount> WordCount for Vec<T> {
    fn words(&self) -> usize {
        self.iter().map(WordCount::words).sum()
    }
}

impl<T: WordCount> WordCount for Option<T> {
    fn words(&self) -> usize {
        self.as_ref().map_or(1, WordCount::words)
    }
}

impl WordCount for crate::graph::Edge {
    fn words(&self) -> usize {
        2
    }
}

/// Pass counter and word-level space accountant.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Meter {
    pub passes: usize,
    pub words_current: usize,
    pub words_peak: usize,
    /// Word budget; checked against the peak at every charge.
    pub budget: Option<usize>,
    pub strict: bool,
    /// Largest advisory overage observed (non-strict mode only).
    pub overage: usize,
}

impl Meter {
    pub fn new() -> Self {
        Meter::default()
    }

    pub fn with_budget(budget: usize, strict: bool) -> Self {
        Meter { budget: Some(budget), strict, ..Meter::default() }
    }

    /// Records the words currently held. In strict mode a peak above the
    /// budget is an error; otherwise the overage is only remembered.
    pub fn charge(&mut self, words: usize) -> Result<()> {
        self.words_current = words;
        self.words_peak = self.words_peak.max(words);
        if let Some(budget) = self.budget {
            if self.words_peak > budget {
                if self.strict {
                    return Err(Error::BudgetExceeded { peak: self.words_peak, budget });
                }
                self.overage = self.overage.max(self.words_peak - budget);
            }
        }
        Ok(())
    }

    pub fn report(&self, algorithm: &str, params: serde_json::Value) -> MeterReport {
        MeterReport {
            schema: "meter/v1".into(),
            passes: self.passes,
            words_peak: self.words_peak,
            algorithm: algorithm.into(),
            params,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeterReport {
    pub schema: String,
    pub passes: usize,
    pub words_peak: usize,
    pub algorithm: String,
    pub params: serde_json::Value,
}

/// A stream together with the meter that watches it.
///
/// Passes borrow the session mutably, so a second pass cannot be opened
/// while one is still alive:
///
/// ```compile_fail
/// use semistream::harness::{generate, Generator, StreamSession};
/// let stream = generate(&Generator::Path(4), 0).unwrap();
/// let mut session = StreamSession::new(&stream);
/// let first = session.pass();
/// let second = session.pass();
/// drop(first);
/// ```
#[derive(Debug)]
pub struct StreamSession<'a> {
    stream: &'a GraphStream,
    pub meter: Meter,
}

impl<'a> StreamSession<'a> {
    pub fn new(stream: &'a GraphStream) -> Self {
        StreamSession { stream, meter: Meter::new() }
    }

    pub fn with_meter(stream: &'a GraphStream, meter: Meter) -> Self {
        StreamSession { stream, meter }
    }

    pub fn n(&self) -> usize {
        self.stream.n()
    }

    pub fn model(&self) -> Model {
        self.stream.model()
    }

    pub fn passes(&self) -> usize {
        self.meter.passes
    }

    /// Opens a pass. The pass is counted when the iterator is dropped,
    /// whether or not it was read to the end.
    pub fn pass(&mut self) -> Pass<'_> {
        Pass { updates: self.stream.updates().iter(), meter: &mut self.meter }
    }

    /// Runs `f` over every update of one full pass.
    pub fn for_each(&mut self, mut f: impl FnMut(EdgeUpdate)) {
        for up in self.pass() {
            f(up);
        }
    }

    pub fn charge(&mut self, words: usize) -> Result<()> {
        self.meter.charge(words)
    }
}

pub struct Pass<'s> {
    updates: std::slice::Iter<'s, EdgeUpdate>,
    meter: &'s mut Meter,
}

impl Iterator for Pass<'_> {
    type Item = EdgeUpdate;

    fn next(&mut self) -> Option<EdgeUpdate> {
        self.updates.next().copied()
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        self.updates.size_hint()
    }
}

impl Drop for Pass<'_> {
    fn drop(&mut self) {
        self.meter.passes += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_counts_on_exhaustion_and_on_empty() {
        let s = GraphStream::new(3, Model::InsertionOnly, vec![EdgeUpdate::insert(0, 1), EdgeUpdate::insert(1, 2)]).unwrap();
        let mut session = StreamSession::new(&s);
        assert_eq!(session.pass().count(), 2);
        assert_eq!(session.passes(), 1);
        let empty = GraphStream::new(3, Model::InsertionOnly, vec![]).unwrap();
        let mut session = StreamSession::new(&empty);
        assert_eq!(session.pass().count(), 0);
        assert_eq!(session.passes(), 1);
    }

    #[test]
    fn strict_budget_fails() {
        let mut m = Meter::with_budget(10, true);
        assert!(m.charge(5).is_ok());
        assert!(matches!(m.charge(11), Err(Error::BudgetExceeded { peak: 11, budget: 10 })));
        let mut m = Meter::with_budget(10, false);
        m.charge(15).unwrap();
        m.charge(3).unwrap();
        assert_eq!((m.overage, m.words_peak, m.words_current), (5, 15, 3));
    }
}
