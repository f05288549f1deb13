//! Library side of the `seedbs` command-line tool: input parsing, JSON
//! reports and the benchmark harness.

pub mod bench;
pub mod input;
pub mod report;

use std::path::Path;

use seedbs::signals::load_signal_spec;
use seedbs::SignalSpec;

/// A signal given either as a path to a JSON spec or as a bundled name.
pub fn resolve_signal(name_or_path: &str) -> seedbs::Result<SignalSpec> {
    if Path::new(name_or_path).is_file() {
        load_signal_spec(name_or_path)
    } else {
        SignalSpec::bundled(name_or_path)
    }
}
