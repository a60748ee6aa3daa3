//! Bundled inequalities: tripartite GYNI, the five-event clique of the
//! two-PR possible-events graph, and a ten-event completion of it whose
//! noisy-PR threshold sits near 0.72.

use crate::error::Result;
use crate::inequality::LoInequality;

pub const GYNI_TEXT: &str = include_str!("../fixtures/gyni.txt");
pub const FIVE_EVENT_TEXT: &str = include_str!("../fixtures/five_event.txt");
pub const TEN_EVENT_TEXT: &str = include_str!("../fixtures/ten_event.txt");

pub fn gyni3() -> Result<LoInequality> {
    LoInequality::from_text(GYNI_TEXT, None)
}

pub fn five_event() -> Result<LoInequality> {
    LoInequality::from_text(FIVE_EVENT_TEXT, None)
}

pub fn ten_event() -> Result<LoInequality> {
    LoInequality::from_text(TEN_EVENT_TEXT, None)
}

/// Looks a bundled inequality up by file stem.
pub fn by_name(name: &str) -> Option<&'static str> {
    match name {
        "gyni" | "gyni3" => Some(GYNI_TEXT),
        "five_event" => Some(FIVE_EVENT_TEXT),
        "ten_event" => Some(TEN_EVENT_TEXT),
        _ => None,
    }
}
