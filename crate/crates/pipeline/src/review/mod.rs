//! Human review: corruption fixes, bounding-box adjustments and translation
//! quality labels, behind a small JSON-over-HTTP service.

mod service;
mod store;

pub use service::{router, serve, EnqueueRequest, ErrorBody};
pub use store::{
    FixRequest, HumanQualityLabel, LabelScale, QueueFilter, QueuePage, ReviewError, ReviewEvent, ReviewState,
    ReviewStore, ReviewTask, ScoreRequest, TaskKind, TaskPayload, TaskStatus, EVENT_LOG,
};
