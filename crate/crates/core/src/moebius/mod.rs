//! Whittaker groups generated by involutions, with the ping-pong
//! discontinuity certificate.

mod group;
mod map;

pub use group::{enumerate_words, CertificateReport, Parity, WhittakerGroup, Word};
pub use map::{involution_from_fixed_points, MoebiusMap};
