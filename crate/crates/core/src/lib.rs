//! Online multi-unit clinching auction for sharing TV white-space channels
//! among interfering secondary users.
//!
//! Bidders sit on a conflict graph; each has a set of locally available
//! channels and weakly decreasing marginal values. [`run_auction`] runs the
//! exclusive-use ascending clinching auction, [`run_sharing_auction`] the
//! variant where neighbours may co-occupy a channel under an interference
//! temperature and bandwidth budget. [`oracle`] holds exhaustive reference
//! solvers, [`verify`] the randomised property suites built on them,
//! [`harness`] the experiment sweeps and [`format`] the plain-text instance
//! and result files.

pub mod assign;
pub mod auction;
pub mod bidder;
pub mod channels;
pub mod error;
pub mod format;
pub mod harness;
pub mod oracle;
pub mod scenario;
pub mod sharing;
pub mod units;
pub mod verify;

pub use assign::{greedy_assign, AssignMode, Assignment};
pub use auction::{clinch, run_auction, AuctionConfig, ClinchEntry, Outcome, RoundRecord};
pub use bidder::{BidderProfiles, Price, ValuationVector};
pub use channels::ChannelSet;
pub use error::{Error, Result};
pub use scenario::{generate_instance, ConflictGraph, DensityProfile, Instance, ScenarioConfig};
pub use sharing::{run_sharing_auction, SharingConfig, SharingParams};
pub use units::{Amount, Share};
