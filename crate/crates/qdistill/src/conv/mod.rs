//! Quantum convolutional codes over the Laurent-polynomial ring:
//! commutation checking, standard-form elimination with recorded steps,
//! frame-by-frame measurement decoding, streaming distillation, and the
//! entanglement-assisted fallback for series-entry standard forms.

mod code;
mod decode;
mod ea;
mod poly;

pub use code::{conv_standard_form, ConvCode, ConvStandardForm, ConvStep};
pub use decode::{run_conv_distillation, run_conv_with_pattern, ConvRunner, FrameDecoder, PhaseDep, StreamOutcomes};
pub(crate) use decode::generator_letters;
pub use ea::{ea_decode, ea_decode_single_trial, ea_overhead, EaBlock};
pub use poly::LaurentPoly;
