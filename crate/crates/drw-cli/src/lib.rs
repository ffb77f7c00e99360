//! Library surface of the CLI: expression parsing, context handling and
//! command execution.  The binary in `main.rs` is a thin argument-parsing
//! shell around [`commands`].

pub mod commands;
pub mod expr;

/// Exit status conventions: 0 success, 1 mathematical rejection,
/// 2 usage error.
pub const EXIT_OK: i32 = 0;
pub const EXIT_MATH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
