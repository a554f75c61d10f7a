//! Pass/fail accumulation for exact identity checks.

use crate::exact::{fmt_rat, Rat};

/// Outcome of a batch of exact checks; failures carry human-readable detail.
#[derive(Debug, Clone)]
pub struct IdentityReport {
    pub scope: String,
    pub checked: usize,
    pub failures: Vec<String>,
}

impl IdentityReport {
    pub fn new(scope: impl Into<String>) -> Self {
        Self {
            scope: scope.into(),
            checked: 0,
            failures: Vec::new(),
        }
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn check_eq(&mut self, label: impl AsRef<str>, got: &Rat, want: &Rat) {
        self.checked += 1;
        if got != want {
            self.failures.push(format!(
                "{}: got {}, want {}",
                label.as_ref(),
                fmt_rat(got),
                fmt_rat(want)
            ));
        }
    }

    pub fn check_le(&mut self, label: impl AsRef<str>, lhs: &Rat, rhs: &Rat) {
        self.checked += 1;
        if lhs > rhs {
            self.failures.push(format!(
                "{}: {} exceeds {}",
                label.as_ref(),
                fmt_rat(lhs),
                fmt_rat(rhs)
            ));
        }
    }

    pub fn check_bool(&mut self, label: impl AsRef<str>, ok: bool) {
        self.checked += 1;
        if !ok {
            self.failures.push(label.as_ref().to_string());
        }
    }

    pub fn merge(&mut self, other: IdentityReport) {
        self.checked += other.checked;
        self.failures.extend(
            other
                .failures
                .into_iter()
                .map(|f| format!("{}: {}", other.scope, f)),
        );
    }
}
