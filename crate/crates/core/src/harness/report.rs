use serde::Serialize;
use serde_json::Value;

/// The outcome of checking one quantitative claim.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub claim: String,
    pub computed: Value,
    pub bounds: Value,
    pub pass: bool,
    pub runtime_secs: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(claim: impl Into<String>, computed: Value, bounds: Value, pass: bool) -> Self {
        Self {
            claim: claim.into(),
            computed,
            bounds,
            pass,
            runtime_secs: 0.0,
            notes: Vec::new(),
        }
    }

    pub fn with_runtime(mut self, secs: f64) -> Self {
        self.runtime_secs = secs;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }
}
