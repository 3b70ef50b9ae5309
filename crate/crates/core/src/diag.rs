//! One-line diagnostics on standard error.

pub fn warn(message: impl std::fmt::Display) {
    eprintln!("WARN: {message}");
}
