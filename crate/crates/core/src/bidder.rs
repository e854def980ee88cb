//! Bidder types: private marginal valuations and the demand they reveal.

use crate::error::{Error, Result};

/// Integer currency units. Prices and valuations share this scale.
pub type Price = u32;

/// A bidder's marginal valuations, weakly decreasing. Entry `j` is the value
/// of the `(j+1)`-th channel; the vector length is the bidder's demand cap.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ValuationVector(Vec<Price>);

impl ValuationVector {
    pub fn new(values: Vec<Price>) -> Result<Self> {
        if values.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Instance(format!(
                "marginal valuations must be weakly decreasing: {values:?}"
            )));
        }
        Ok(ValuationVector(values))
    }

    /// Sorts the values into weakly decreasing order first.
    pub fn from_unsorted(mut values: Vec<Price>) -> Self {
        values.sort_unstable_by(|a, b| b.cmp(a));
        ValuationVector(values)
    }

    pub fn values(&self) -> &[Price] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max(&self) -> Price {
        self.0.first().copied().unwrap_or(0)
    }

    /// Number of channels valued strictly above `price`.
    ///
    /// Values are sorted descending, so this is the partition point.
    #[inline]
    pub fn demand_at(&self, price: Price) -> u32 {
        self.0.partition_point(|&v| v > price) as u32
    }

    /// Total value of the first `count` channels.
    pub fn value_of(&self, count: usize) -> u64 {
        self.0.iter().take(count).map(|&v| v as u64).sum()
    }
}

/// Free-function form of [`ValuationVector::demand_at`].
pub fn demand_at_price(values: &ValuationVector, price: Price) -> u32 {
    values.demand_at(price)
}

/// Valuations of every bidder in an instance, indexed by bidder id.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BidderProfiles {
    valuations: Vec<ValuationVector>,
}

impl BidderProfiles {
    pub fn new(valuations: Vec<ValuationVector>) -> Self {
        BidderProfiles { valuations }
    }

    pub fn len(&self) -> usize {
        self.valuations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.valuations.is_empty()
    }

    pub fn get(&self, i: usize) -> &ValuationVector {
        &self.valuations[i]
    }

    pub fn demand_cap(&self, i: usize) -> u32 {
        self.valuations[i].len() as u32
    }

    pub fn iter(&self) -> impl Iterator<Item = &ValuationVector> {
        self.valuations.iter()
    }

    pub fn max_value(&self) -> Price {
        self.valuations.iter().map(|v| v.max()).max().unwrap_or(0)
    }

    /// Copy with bidder `i`'s report replaced.
    pub fn with_report(&self, i: usize, report: ValuationVector) -> Self {
        let mut valuations = self.valuations.clone();
        valuations[i] = report;
        BidderProfiles { valuations }
    }

    /// Bidders with a non-empty valuation vector.
    pub fn participants(&self) -> usize {
        self.valuations.iter().filter(|v| !v.is_empty()).count()
    }
}
