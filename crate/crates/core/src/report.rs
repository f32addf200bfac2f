//! Machine-readable verification reports, one JSON object per line.

use std::collections::BTreeMap;
use std::time::Instant;

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::precision::{format_sig, PrecisionContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check_id: String,
    pub lhs: String,
    pub rhs: String,
    pub abs_err: String,
    pub digits_agreed: i64,
    pub params: BTreeMap<String, serde_json::Value>,
    pub runtime_ms: u64,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// `floor(-log10(abs_err / max(|lhs|, 1)))`, capped at `cap` when the
/// error vanishes.
pub fn digits_agreed(lhs: &Float, abs_err: &Float, cap: i64) -> i64 {
    if abs_err.is_zero() {
        return cap;
    }
    let p = lhs.prec().max(abs_err.prec());
    let scale = Float::with_val(p, lhs.abs_ref()).max(&Float::with_val(p, 1));
    let rel = Float::with_val(p, abs_err / &scale);
    let d = -rel.log10().to_f64();
    (d.floor() as i64).min(cap)
}

impl VerificationReport {
    /// Compare `lhs` against `rhs`; the check passes iff `|lhs − rhs| <= tol`.
    pub fn compare(
        check_id: impl Into<String>,
        lhs: &Float,
        rhs: &Float,
        tol: &Float,
        ctx: &PrecisionContext,
        started: Instant,
    ) -> Self {
        let p = ctx.prec();
        let err = Float::with_val(p, lhs - rhs).abs();
        let status = if err <= *tol {
            Status::Pass
        } else {
            Status::Fail
        };
        let sig = ctx.digits() as usize;
        let mut params = BTreeMap::new();
        params.insert("digits".to_string(), ctx.digits().into());
        params.insert("tolerance".to_string(), format_sig(tol, 3).into());
        VerificationReport {
            check_id: check_id.into(),
            lhs: format_sig(lhs, sig),
            rhs: format_sig(rhs, sig),
            abs_err: format_sig(&err, 6),
            digits_agreed: digits_agreed(lhs, &err, i64::from(ctx.working_digits())),
            params,
            runtime_ms: started.elapsed().as_millis() as u64,
            status,
            note: None,
        }
    }

    /// Exact comparison of two rendered values (integers, rationals, tables).
    /// `digits_agreed` is `-1` since no numerical error is involved.
    pub fn exact(check_id: impl Into<String>, lhs: String, rhs: String, started: Instant) -> Self {
        let equal = lhs == rhs;
        VerificationReport {
            check_id: check_id.into(),
            abs_err: if equal { "0".into() } else { "nonzero".into() },
            digits_agreed: -1,
            lhs,
            rhs,
            params: BTreeMap::from([("comparison".to_string(), "exact".into())]),
            runtime_ms: started.elapsed().as_millis() as u64,
            status: if equal { Status::Pass } else { Status::Fail },
            note: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn with_status(mut self, status: Status) -> Self {
        self.status = status;
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    /// One-line human rendering.
    pub fn to_text(&self) -> String {
        let status = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        };
        let mut line = format!(
            "{status:<12} {:<28} lhs={} rhs={} err={} digits={} ({} ms)",
            self.check_id, self.lhs, self.rhs, self.abs_err, self.digits_agreed, self.runtime_ms
        );
        if let Some(note) = &self.note {
            line.push_str(" -- ");
            line.push_str(note);
        }
        line
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digits_agreed_rule() {
        let p = 128;
        let lhs = Float::with_val(p, 250.0);
        let err = Float::with_val(p, 2.5e-7);
        assert_eq!(digits_agreed(&lhs, &err, 40), 9);
        let small = Float::with_val(p, 0.01);
        assert_eq!(digits_agreed(&small, &err, 40), 6);
        assert_eq!(digits_agreed(&small, &Float::with_val(p, 0), 40), 40);
    }

    #[test]
    fn json_round_trip() {
        let ctx = PrecisionContext::new(20).unwrap();
        let a = ctx.float(1.5);
        let b = ctx.float(1.5 + 1e-12);
        let r = VerificationReport::compare("x", &a, &b, &ctx.float(1e-10), &ctx, Instant::now())
            .param("radius", 10);
        assert!(r.passed());
        let line = r.to_json_line();
        assert!(!line.contains('\n'));
        let back: VerificationReport = serde_json::from_str(&line).unwrap();
        assert_eq!(back, r);
        assert!(line.contains("\"status\":\"pass\""));
    }
}
