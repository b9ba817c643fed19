use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Cba,
    StaticMcda,
    DynamicMcda,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Cba => "cba",
            Method::StaticMcda => "static_mcda",
            Method::DynamicMcda => "dynamic_mcda",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptionTotal {
    pub option: u32,
    pub total: f64,
}

/// Per-option totals and the resulting order, best first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingOutcome {
    pub method: Method,
    /// Totals in input order.
    pub totals: Vec<OptionTotal>,
    pub order: Vec<u32>,
}

impl RankingOutcome {
    /// Sort by descending total; equal totals go to the lower option id.
    pub fn from_totals(method: Method, totals: Vec<OptionTotal>) -> Result<Self> {
        if totals.is_empty() {
            return Err(Error::EmptyRanking);
        }
        let order = order_by_total(&totals);
        Ok(Self {
            method,
            totals,
            order,
        })
    }

    pub fn best(&self) -> u32 {
        self.order[0]
    }

    pub fn total_of(&self, option: u32) -> Option<f64> {
        self.totals
            .iter()
            .find(|t| t.option == option)
            .map(|t| t.total)
    }
}

pub(crate) fn order_by_total(totals: &[OptionTotal]) -> Vec<u32> {
    let mut sorted: Vec<&OptionTotal> = totals.iter().collect();
    sorted.sort_by(|a, b| b.total.total_cmp(&a.total).then(a.option.cmp(&b.option)));
    sorted.into_iter().map(|t| t.option).collect()
}

/// Sort `index` (positions into `options`/`totals`) best first under the
/// same tie rule, without allocating.
pub(crate) fn sort_positions(options: &[u32], totals: &[f64], index: &mut [usize]) {
    index.sort_by(|&a, &b| totals[b].total_cmp(&totals[a]).then(options[a].cmp(&options[b])));
}
