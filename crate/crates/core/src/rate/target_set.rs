//! Finite unions of half-open intervals (a, b].
//!
//! The compact text syntax uses `|` for union: `(-inf,0] | (0,1]`.

use std::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum SetParseError {
    Malformed(String),
    BadEndpoint(String),
    EmptyInterval { lo: f64, hi: f64 },
    Overlap { at: f64 },
    Empty,
}

impl fmt::Display for SetParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetParseError::Malformed(s) => write!(f, "malformed interval {s:?}; expected (lo,hi]"),
            SetParseError::BadEndpoint(s) => write!(f, "bad endpoint {s:?}"),
            SetParseError::EmptyInterval { lo, hi } => {
                write!(f, "interval ({lo},{hi}] is empty")
            }
            SetParseError::Overlap { at } => write!(f, "intervals overlap near {at}"),
            SetParseError::Empty => write!(f, "the set must be nonempty"),
        }
    }
}

impl std::error::Error for SetParseError {}

/// An ordered disjoint union of half-open intervals `(lo, hi]`, with
/// `lo = −∞` and `hi = +∞` admitted.
#[derive(Clone, Debug, PartialEq)]
pub struct TargetSet {
    intervals: Vec<(f64, f64)>,
}

impl TargetSet {
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<Self, SetParseError> {
        if intervals.is_empty() {
            return Err(SetParseError::Empty);
        }
        intervals.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for &(lo, hi) in &intervals {
            if !(lo < hi) || lo.is_nan() || hi.is_nan() || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                return Err(SetParseError::EmptyInterval { lo, hi });
            }
        }
        for w in intervals.windows(2) {
            if w[0].1 > w[1].0 {
                return Err(SetParseError::Overlap { at: w[1].0 });
            }
        }
        Ok(TargetSet { intervals })
    }

    /// Single interval (lo, hi].
    pub fn interval(lo: f64, hi: f64) -> Result<Self, SetParseError> {
        Self::new(vec![(lo, hi)])
    }

    /// Parse `(-inf,0] | (0,1]`.
    pub fn parse(text: &str) -> Result<Self, SetParseError> {
        let mut intervals = Vec::new();
        for piece in text.split('|') {
            let piece = piece.trim();
            if piece.is_empty() {
                continue;
            }
            let inner = piece
                .strip_prefix('(')
                .and_then(|s| s.strip_suffix(']'))
                .ok_or_else(|| SetParseError::Malformed(piece.to_string()))?;
            let (lo, hi) = inner
                .split_once(',')
                .ok_or_else(|| SetParseError::Malformed(piece.to_string()))?;
            intervals.push((parse_endpoint(lo)?, parse_endpoint(hi)?));
        }
        Self::new(intervals)
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    /// Membership under the half-open convention.
    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(lo, hi)| x > lo && x <= hi)
    }

    pub fn is_bounded(&self) -> bool {
        self.intervals
            .iter()
            .all(|&(lo, hi)| lo.is_finite() && hi.is_finite())
    }

    /// Smallest finite endpoint (for search windows); None when none exist.
    pub fn min_finite(&self) -> Option<f64> {
        self.intervals
            .iter()
            .flat_map(|&(lo, hi)| [lo, hi])
            .filter(|e| e.is_finite())
            .min_by(|a, b| a.partial_cmp(b).unwrap())
    }

    pub fn max_finite(&self) -> Option<f64> {
        self.intervals
            .iter()
            .flat_map(|&(lo, hi)| [lo, hi])
            .filter(|e| e.is_finite())
            .max_by(|a, b| a.partial_cmp(b).unwrap())
    }

    /// Endpoints scaled by `s > 0` (the √n dilation).
    pub fn scaled(&self, s: f64) -> TargetSet {
        assert!(s > 0.0);
        TargetSet { intervals: self.intervals.iter().map(|&(lo, hi)| (lo * s, hi * s)).collect() }
    }

    /// Complement within the line, staying inside the half-open algebra.
    /// `None` when the set is the whole line.
    pub fn complement(&self) -> Option<TargetSet> {
        let mut pieces = Vec::new();
        let first_lo = self.intervals[0].0;
        if first_lo > f64::NEG_INFINITY {
            pieces.push((f64::NEG_INFINITY, first_lo));
        }
        for w in self.intervals.windows(2) {
            if w[0].1 < w[1].0 {
                pieces.push((w[0].1, w[1].0));
            }
        }
        let last_hi = self.intervals.last().unwrap().1;
        if last_hi < f64::INFINITY {
            pieces.push((last_hi, f64::INFINITY));
        }
        if pieces.is_empty() {
            None
        } else {
            Some(TargetSet { intervals: pieces })
        }
    }
}

impl fmt::Display for TargetSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fmt_ep = |e: f64| {
            if e == f64::NEG_INFINITY {
                "-inf".to_string()
            } else if e == f64::INFINITY {
                "inf".to_string()
            } else {
                format!("{e}")
            }
        };
        let parts: Vec<String> = self
            .intervals
            .iter()
            .map(|&(lo, hi)| format!("({},{}]", fmt_ep(lo), fmt_ep(hi)))
            .collect();
        write!(f, "{}", parts.join(" | "))
    }
}

fn parse_endpoint(text: &str) -> Result<f64, SetParseError> {
    let t = text.trim();
    match t {
        "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
        "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
        _ => t.parse().map_err(|_| SetParseError::BadEndpoint(t.to_string())),
    }
}
