use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Machine-readable failure with the process exit code it maps to.
#[derive(Debug, Serialize)]
pub struct Failure {
    pub code: &'static str,
    pub message: String,
    pub context: Value,
    #[serde(skip)]
    pub exit: u8,
}

impl Failure {
    pub fn validation(message: impl Into<String>, context: Value) -> Self {
        Failure { code: "validation", message: message.into(), context, exit: 2 }
    }

    pub fn io(e: impl std::fmt::Display, path: &Path) -> Self {
        Failure { code: "io", message: e.to_string(), context: json!({ "path": path }), exit: 2 }
    }

    pub fn core(e: vortex_core::Error, context: Value) -> Self {
        use vortex_core::Error as E;
        let mut root = &e;
        while let E::InnerFailure { source, .. } = root {
            root = source;
        }
        let (code, exit) = match root {
            E::NoConvergence { .. } => ("non_convergence", 3),
            E::NoSignChange { .. } => ("no_sign_change", 2),
            E::NoCatenoid(_) => ("no_catenoid", 2),
            _ => ("validation", 2),
        };
        let context = match e {
            E::InnerFailure { ref values, .. } => json!({ "input": context, "profile": values }),
            _ => context,
        };
        Failure { code, message: e.to_string(), context, exit }
    }
}

pub type Outcome = Result<Value, Failure>;

/// `{version, command, config_echo, runtime_ms}` followed by the result fields, or by an
/// `error` object.
pub fn envelope(command: &str, config: &impl Serialize, runtime_ms: f64, outcome: &Outcome) -> Value {
    let mut out = json!({
        "version": VERSION,
        "command": command,
        "config_echo": config,
        "runtime_ms": runtime_ms,
    });
    let obj = out.as_object_mut().expect("object");
    match outcome {
        Ok(Value::Object(fields)) => obj.extend(fields.clone()),
        Ok(other) => {
            obj.insert("result".into(), other.clone());
        }
        Err(f) => {
            obj.insert("error".into(), json!(f));
        }
    }
    out
}
