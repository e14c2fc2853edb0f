//! Candidate model selection: RESET as a first filter, then AIC and BIC
//! rankings of the survivors.

use alloc::vec::Vec;

use super::diagnostics::{diagnose, Battery, DiagnosticOptions};
use super::ols::{fit_ols, DesignSpec, FittedModel};
use super::StatsError;
use crate::types::EconomicRow;

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Survivor,
    /// RESET rejected at the selection level.
    ResetRejected,
    /// RESET could not be computed.
    ResetFailed(StatsError),
    FitFailed(StatsError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionEntry {
    pub spec: DesignSpec,
    pub model: Option<FittedModel>,
    pub battery: Option<Battery>,
    pub status: Status,
    /// 1-based position among survivors.
    pub aic_rank: Option<usize>,
    pub bic_rank: Option<usize>,
}

impl SelectionEntry {
    pub fn excluded(&self) -> bool {
        self.status != Status::Survivor
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    /// One entry per candidate, in input order.
    pub entries: Vec<SelectionEntry>,
    /// Survivor indices ordered by AIC, then BIC.
    pub by_aic: Vec<usize>,
    pub by_bic: Vec<usize>,
}

impl Selection {
    pub fn best_by_aic(&self) -> Option<&SelectionEntry> {
        self.by_aic.first().map(|&i| &self.entries[i])
    }

    pub fn best_by_bic(&self) -> Option<&SelectionEntry> {
        self.by_bic.first().map(|&i| &self.entries[i])
    }
}

pub fn select_model(
    candidates: &[DesignSpec],
    rows: &[EconomicRow],
    opts: &DiagnosticOptions,
) -> Result<Selection, StatsError> {
    if candidates.is_empty() {
        return Err(StatsError::NoCandidates);
    }
    let entries: Vec<SelectionEntry> = candidates
        .iter()
        .map(|spec| match fit_ols(spec, rows) {
            Ok(model) => {
                let battery = diagnose(&model, opts);
                let status = match &battery.reset {
                    Ok(t) if t.reject => Status::ResetRejected,
                    Ok(_) => Status::Survivor,
                    Err(e) => Status::ResetFailed(e.clone()),
                };
                SelectionEntry {
                    spec: spec.clone(),
                    model: Some(model),
                    battery: Some(battery),
                    status,
                    aic_rank: None,
                    bic_rank: None,
                }
            }
            Err(e) => SelectionEntry {
                spec: spec.clone(),
                model: None,
                battery: None,
                status: Status::FitFailed(e),
                aic_rank: None,
                bic_rank: None,
            },
        })
        .collect();
    let mut sel = Selection { entries, by_aic: Vec::new(), by_bic: Vec::new() };
    let survivors: Vec<usize> = (0..sel.entries.len()).filter(|&i| !sel.entries[i].excluded()).collect();
    let crit = |i: usize, aic: bool| {
        let m = sel.entries[i].model.as_ref().expect("survivors are fitted");
        if aic {
            m.aic
        } else {
            m.bic
        }
    };
    let mut by_aic = survivors.clone();
    by_aic.sort_by(|&a, &b| crit(a, true).total_cmp(&crit(b, true)).then(a.cmp(&b)));
    let mut by_bic = survivors;
    by_bic.sort_by(|&a, &b| crit(a, false).total_cmp(&crit(b, false)).then(a.cmp(&b)));
    for (rank, &i) in by_aic.iter().enumerate() {
        sel.entries[i].aic_rank = Some(rank + 1);
    }
    for (rank, &i) in by_bic.iter().enumerate() {
        sel.entries[i].bic_rank = Some(rank + 1);
    }
    sel.by_aic = by_aic;
    sel.by_bic = by_bic;
    Ok(sel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::ols::Regressor;
    use crate::stats::transform::{Lambda, Transform};
    use crate::types::UfCode;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use rand_distr::StandardNormal;

    /// Rows whose per-thousand total ratio is `f(income)` plus noise.
    fn rows(n: usize, seed: u64, f: impl Fn(f64) -> f64) -> Vec<EconomicRow> {
        let mut rng = StdRng::seed_from_u64(seed);
        (0..n)
            .map(|i| {
                let income = rng.random_range(500.0..2500.0);
                let noise: f64 = rng.sample(StandardNormal);
                let ratio = f(income) + 0.5 * noise;
                EconomicRow {
                    uf: UfCode::new((i % 27) as u8 + 1).unwrap(),
                    hdi: rng.random_range(0.6..0.85),
                    income_pc: income,
                    le_birth: rng.random_range(66.0..79.0),
                    density: rng.random_range(2.0..400.0),
                    population: 1_000_000,
                    bnf_total: libm::round(ratio * 1000.0) as u64,
                    bnf_elderly: 0,
                    bnf_disabled: 0,
                }
            })
            .collect()
    }

    #[test]
    fn single_passing_candidate_wins() {
        let data = rows(60, 1, |x| 5.0 + 0.004 * x);
        let specs = [DesignSpec::linear(super::super::ols::Response::Total, &[Regressor::Income])];
        let sel = select_model(&specs, &data, &DiagnosticOptions::default()).unwrap();
        assert_eq!(sel.by_aic, [0]);
        assert_eq!(sel.entries[0].aic_rank, Some(1));
    }

    #[test]
    fn quadratic_truth_ranks_first() {
        use super::super::ols::Response::Total;
        let data = rows(200, 2, |x| 40.0 - 0.03 * x + 1e-5 * x * x);
        let specs = [
            DesignSpec::linear(Total, &[Regressor::Income]),
            DesignSpec::quadratic(Total, &[Regressor::Income]),
            DesignSpec::quadratic(Total, &[Regressor::Income])
                .with_transform(Transform::YeoJohnson(Lambda::Fixed(1.0))),
        ];
        let sel = select_model(&specs, &data, &DiagnosticOptions::default()).unwrap();
        assert_eq!(sel.entries[0].status, Status::ResetRejected);
        assert!(sel.entries[0].excluded() && sel.entries[0].aic_rank.is_none());
        assert!(matches!(sel.best_by_aic().unwrap().spec.terms.len(), 2));
        assert_eq!(sel.by_aic.len(), 2);
    }

    #[test]
    fn all_filtered_leaves_no_survivors() {
        use super::super::ols::Response::Total;
        let data = rows(200, 3, |x| 40.0 - 0.03 * x + 1e-5 * x * x);
        let specs = [DesignSpec::linear(Total, &[Regressor::Income])];
        let sel = select_model(&specs, &data, &DiagnosticOptions::default()).unwrap();
        assert!(sel.by_aic.is_empty() && sel.best_by_bic().is_none());
        assert_eq!(select_model(&[], &data, &DiagnosticOptions::default()), Err(StatsError::NoCandidates));
    }
}
