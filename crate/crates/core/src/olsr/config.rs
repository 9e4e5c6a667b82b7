use serde::{Deserialize, Serialize};

use super::OlsrError;

/// Number of tunable OLSR parameters.
pub const PARAM_COUNT: usize = 8;

/// Bounds for the three emission intervals, in seconds.
pub const INTERVAL_RANGE: (f64, f64) = (1.0, 30.0);
/// Bounds for the four hold times, in seconds.
pub const HOLD_TIME_RANGE: (f64, f64) = (3.0, 100.0);
/// Highest willingness grade (WILL_ALWAYS).
pub const WILL_ALWAYS: u8 = 7;
/// Willingness grade of a node that never relays (WILL_NEVER).
pub const WILL_NEVER: u8 = 0;

/// The eight tunable OLSR parameters.
///
/// Field order matches the raw vector layout used by the optimizers:
/// hello, refresh, tc, willingness, neighbor hold, topology hold,
/// MID hold, duplicate hold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OlsrConfig {
    pub hello_interval: f64,
    pub refresh_interval: f64,
    pub tc_interval: f64,
    pub willingness: u8,
    pub neighb_hold_time: f64,
    pub top_hold_time: f64,
    pub mid_hold_time: f64,
    pub dup_hold_time: f64,
}

impl OlsrConfig {
    /// RFC 3626 standard configuration.
    pub fn rfc3626() -> Self {
        OlsrConfig {
            hello_interval: 2.0,
            refresh_interval: 2.0,
            tc_interval: 5.0,
            willingness: 3,
            neighb_hold_time: 3.0 * 2.0,
            top_hold_time: 3.0 * 5.0,
            mid_hold_time: 3.0 * 5.0,
            dup_hold_time: 30.0,
        }
    }

    /// Checks every field against the tuning ranges.
    pub fn validate(&self) -> Result<(), OlsrError> {
        for (name, value, (lo, hi)) in self.named_reals() {
            if !value.is_finite() || value < lo || value > hi {
                return Err(OlsrError::ParamOutOfRange { name, value, lo, hi });
            }
        }
        if self.willingness > WILL_ALWAYS {
            return Err(OlsrError::ParamOutOfRange {
                name: "willingness",
                value: f64::from(self.willingness),
                lo: 0.0,
                hi: f64::from(WILL_ALWAYS),
            });
        }
        Ok(())
    }

    /// Weaker check for configurations bundled under a range waiver:
    /// every time must be finite and strictly positive.
    pub fn validate_waived(&self) -> Result<(), OlsrError> {
        for (name, value, _) in self.named_reals() {
            if !value.is_finite() || value <= 0.0 {
                return Err(OlsrError::ParamOutOfRange { name, value, lo: 0.0, hi: f64::INFINITY });
            }
        }
        if self.willingness > WILL_ALWAYS {
            return Err(OlsrError::ParamOutOfRange {
                name: "willingness",
                value: f64::from(self.willingness),
                lo: 0.0,
                hi: f64::from(WILL_ALWAYS),
            });
        }
        Ok(())
    }

    /// HELLO period actually used by a node. A neighbor must be advertised
    /// at least once per refresh interval, so a refresh interval shorter
    /// than the HELLO interval speeds HELLO emission up.
    pub fn hello_period(&self) -> f64 {
        self.hello_interval.min(self.refresh_interval)
    }

    pub fn to_raw(&self) -> [f64; PARAM_COUNT] {
        [
            self.hello_interval,
            self.refresh_interval,
            self.tc_interval,
            f64::from(self.willingness),
            self.neighb_hold_time,
            self.top_hold_time,
            self.mid_hold_time,
            self.dup_hold_time,
        ]
    }

    fn named_reals(&self) -> [(&'static str, f64, (f64, f64)); 7] {
        [
            ("hello_interval", self.hello_interval, INTERVAL_RANGE),
            ("refresh_interval", self.refresh_interval, INTERVAL_RANGE),
            ("tc_interval", self.tc_interval, INTERVAL_RANGE),
            ("neighb_hold_time", self.neighb_hold_time, HOLD_TIME_RANGE),
            ("top_hold_time", self.top_hold_time, HOLD_TIME_RANGE),
            ("mid_hold_time", self.mid_hold_time, HOLD_TIME_RANGE),
            ("dup_hold_time", self.dup_hold_time, HOLD_TIME_RANGE),
        ]
    }
}

impl Default for OlsrConfig {
    fn default() -> Self {
        Self::rfc3626()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rfc_defaults_follow_hold_time_rules() {
        let c = OlsrConfig::rfc3626();
        assert_eq!(c.neighb_hold_time, 3.0 * c.hello_interval);
        assert_eq!(c.top_hold_time, 3.0 * c.tc_interval);
        assert_eq!(c.mid_hold_time, 3.0 * c.tc_interval);
        assert_eq!(c.dup_hold_time, 30.0);
        assert_eq!(c.willingness, 3);
        c.validate().unwrap();
    }

    #[test]
    fn out_of_range_is_rejected() {
        let mut c = OlsrConfig::rfc3626();
        c.hello_interval = 0.5;
        assert!(matches!(c.validate(), Err(OlsrError::ParamOutOfRange { name: "hello_interval", .. })));
        c.validate_waived().unwrap();
        c.hello_interval = 2.0;
        c.willingness = 8;
        assert!(c.validate().is_err());
        c.willingness = 3;
        c.dup_hold_time = f64::NAN;
        assert!(c.validate().is_err());
        assert!(c.validate_waived().is_err());
    }

    #[test]
    fn hello_period_takes_the_faster_cadence() {
        let mut c = OlsrConfig::rfc3626();
        assert_eq!(c.hello_period(), 2.0);
        c.refresh_interval = 1.5;
        assert_eq!(c.hello_period(), 1.5);
        c.refresh_interval = 10.0;
        assert_eq!(c.hello_period(), 2.0);
    }
}
