//! Exact coherence tools for imprecise probability assessments on
//! conditional events.
//!
//! The crate takes an interval-valued assessment on a finite family of
//! conditional events `E_i|H_i` and
//!
//! * checks g-coherence ([`gcoherence::check_g_coherence`]),
//! * computes coherent extension bounds and the least-committal correction
//!   ([`gcoherence::propagate_bounds`], [`gcoherence::correct_assessment`]),
//! * builds a full conditional probability on the algebra generated by the
//!   family, with a quasi-additive class of conditioning events, that agrees
//!   with a chosen precise coherent assessment ([`construction`]),
//! * and verifies the result independently ([`verify`]).
//!
//! All arithmetic is exact over the rationals.

pub mod cli;
pub mod construction;
pub mod error;
pub mod event;
pub mod gcoherence;
pub mod lp;
pub mod pipeline;
pub mod rational;
pub mod verify;

pub use error::{Error, Result};
pub use event::{ConditionalEvent, Event, Universe};
pub use gcoherence::{Assessment, Interval};
pub use rational::Rational;
