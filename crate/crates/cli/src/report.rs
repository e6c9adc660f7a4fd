use serde::Serialize;
use serde_json::Value;

/// Machine-readable record of one invocation. Everything except `timing_ms`
/// is reproduced exactly by running `replay`; the caller fills in the timing.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    /// `command` with the seed made explicit.
    pub replay: String,
    pub params: Value,
    pub results: Value,
    pub timing_ms: f64,
    pub seed: Option<u64>,
    pub version: &'static str,
}

impl RunReport {
    pub fn new(params: Value, results: Value, seed: Option<u64>) -> Self {
        let command: Vec<String> = std::env::args().collect();
        RunReport {
            replay: replay_line(&command, seed),
            command,
            params,
            results,
            timing_ms: 0.0,
            seed,
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

fn replay_line(args: &[String], seed: Option<u64>) -> String {
    let mut parts: Vec<String> = args.iter().map(|a| shell_quote(a)).collect();
    let has_seed = args
        .iter()
        .any(|a| a == "--seed" || a.starts_with("--seed="));
    if let (Some(seed), false) = (seed, has_seed) {
        parts.push(format!("--seed {seed}"));
    }
    parts.join(" ")
}

fn shell_quote(s: &str) -> String {
    let plain = !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || "-_=.,:/^+@".contains(c));
    if plain {
        s.to_string()
    } else {
        format!("'{}'", s.replace('\'', r"'\''"))
    }
}
