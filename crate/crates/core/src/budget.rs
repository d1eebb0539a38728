use std::time::{Duration, Instant};

use thiserror::Error;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("step budget or time limit exhausted")]
pub struct Timeout;

/// Counts rewrite steps and enforces an optional wall-clock deadline.
#[derive(Clone, Debug)]
pub struct Budget {
    remaining: u64,
    deadline: Option<Instant>,
    used: u64,
}

impl Budget {
    pub fn new(steps: u64, timeout: Option<Duration>) -> Self {
        Budget {
            remaining: steps,
            deadline: timeout.map(|d| Instant::now() + d),
            used: 0,
        }
    }

    pub fn unlimited() -> Self {
        Self::new(u64::MAX, None)
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn tick(&mut self) -> Result<(), Timeout> {
        self.charge(1)
    }

    pub fn charge(&mut self, n: u64) -> Result<(), Timeout> {
        if self.remaining < n {
            self.remaining = 0;
            return Err(Timeout);
        }
        self.remaining -= n;
        let before = self.used;
        self.used += n;
        if let Some(d) = self.deadline {
            if before / 256 != self.used / 256 && Instant::now() >= d {
                return Err(Timeout);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exhausts() {
        let mut b = Budget::new(3, None);
        assert!(b.tick().is_ok());
        assert!(b.charge(2).is_ok());
        assert_eq!(b.tick(), Err(Timeout));
    }
}
