//! Annotation service: an HTTP front end through which a human oracle drives
//! the query, label, teach loop of an active-learning session.

pub mod api;
pub mod error;
pub mod session;
pub mod store;

pub use api::{app, router, AppState, Created, LabelsBody};
pub use error::{Result, ServiceError};
pub use session::{
    replay, Batch, BatchRow, DatasetSource, Event, Holdout, LabeledRow, Metrics, QueryPlan, Session, SessionConfig,
    Snapshot, Summary,
};
pub use store::EventStore;
