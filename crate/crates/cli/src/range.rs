//! `--take-frames` ranges: `a..b`, `a..`, `..b` or `a`, 0-based and inclusive.

use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameRange {
    pub start: usize,
    pub end: Option<usize>,
}

impl FrameRange {
    pub const ALL: FrameRange = FrameRange { start: 0, end: None };

    pub fn contains(&self, index: usize) -> bool {
        index >= self.start && self.end.map_or(true, |e| index <= e)
    }

    /// True once `index` is past the end of the range.
    pub fn is_past(&self, index: usize) -> bool {
        self.end.is_some_and(|e| index > e)
    }
}

impl FromStr for FrameRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bound = |t: &str| -> Result<usize, String> {
            t.trim().parse().map_err(|_| format!("invalid frame index {t:?} in range {s:?}"))
        };
        let range = match s.split_once("..") {
            None => {
                let i = bound(s)?;
                FrameRange { start: i, end: Some(i) }
            }
            Some((a, b)) => FrameRange {
                start: if a.is_empty() { 0 } else { bound(a)? },
                end: if b.is_empty() { None } else { Some(bound(b)?) },
            },
        };
        if let Some(end) = range.end {
            if end < range.start {
                return Err(format!("frame range {s:?} ends before it starts"));
            }
        }
        Ok(range)
    }
}

impl fmt::Display for FrameRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.end {
            Some(e) => write!(f, "{}..{e}", self.start),
            None => write!(f, "{}..", self.start),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!("3..5".parse(), Ok(FrameRange { start: 3, end: Some(5) }));
        assert_eq!("3..".parse(), Ok(FrameRange { start: 3, end: None }));
        assert_eq!("..5".parse(), Ok(FrameRange { start: 0, end: Some(5) }));
        assert_eq!("4".parse(), Ok(FrameRange { start: 4, end: Some(4) }));
        assert_eq!("..".parse(), Ok(FrameRange::ALL));
        assert!("5..3".parse::<FrameRange>().is_err());
        assert!("a..3".parse::<FrameRange>().is_err());
        assert!("".parse::<FrameRange>().is_err());
        assert!("-1".parse::<FrameRange>().is_err());
    }

    #[test]
    fn membership() {
        let r: FrameRange = "3..5".parse().unwrap();
        assert!(!r.contains(2) && r.contains(3) && r.contains(5) && !r.contains(6));
        assert!(r.is_past(6) && !r.is_past(5));
        assert!(!FrameRange::ALL.is_past(usize::MAX));
    }
}
