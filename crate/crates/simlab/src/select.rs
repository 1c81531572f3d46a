use emogen_core::evolution::{Population, ScoredSelection, Selection, Selector};
use emogen_core::metrics::{MetricSuite, PreparedTarget};
use emogen_core::{Error, Result};

/// Selects the `count` members closest to the target: the nearest becomes
/// the elite, the rest follow in ascending distance with ties broken by
/// member index. Members whose distance is undefined rank last.
pub fn auto_select(
    suite: &MetricSuite,
    target: &PreparedTarget,
    pop: &Population,
    count: usize,
) -> Result<ScoredSelection> {
    if count == 0 || count > pop.len() {
        return Err(Error::invalid(format!(
            "cannot select {count} of {} members",
            pop.len()
        )));
    }
    let mut scores = Vec::with_capacity(pop.len());
    for m in &pop.members {
        match suite.distance(target, &m.weights) {
            Ok(d) => scores.push(Some(d)),
            Err(Error::UndefinedMetric(_)) => scores.push(None),
            Err(e) => return Err(e),
        }
    }
    if scores.iter().all(Option::is_none) {
        return Err(Error::UndefinedMetric(format!(
            "{} is undefined for every member",
            target.kind
        )));
    }
    let key = |i: usize| scores[i].unwrap_or(f64::INFINITY);
    let mut order: Vec<usize> = (0..pop.len()).collect();
    order.sort_by(|&a, &b| key(a).total_cmp(&key(b)).then(a.cmp(&b)));
    Ok(ScoredSelection {
        selection: Selection::new(order[0], order[1..count].to_vec()),
        scores: Some(scores),
    })
}

/// Metric-driven stand-in for a participant.
pub struct AutoSelector<'a> {
    suite: &'a MetricSuite,
    target: &'a PreparedTarget,
    schedule: &'a [usize],
}

impl<'a> AutoSelector<'a> {
    pub fn new(suite: &'a MetricSuite, target: &'a PreparedTarget, schedule: &'a [usize]) -> Self {
        AutoSelector {
            suite,
            target,
            schedule,
        }
    }
}

impl Selector for AutoSelector<'_> {
    fn select(&mut self, pop: &Population) -> std::result::Result<ScoredSelection, String> {
        let count = *self
            .schedule
            .get(pop.generation)
            .ok_or_else(|| format!("no selection count for generation {}", pop.generation))?;
        auto_select(self.suite, self.target, pop, count).map_err(|e| e.to_string())
    }
}
