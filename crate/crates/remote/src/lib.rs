//! Wire protocol for depth-conditioned target generation: a blocking client
//! implementing [`texrestore::imagesource::ImageSource`] and an oracle-backed
//! mock server speaking the same protocol.

mod client;
mod mock;
pub mod protocol;

pub use client::{RemoteSource, DEFAULT_DENOISE_STEPS};
pub use mock::{serve_mock, MockGenerator, MockServer};
