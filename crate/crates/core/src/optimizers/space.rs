use rand::Rng;

use super::OptimizeError;
use crate::olsr::{OlsrConfig, HOLD_TIME_RANGE, INTERVAL_RANGE, PARAM_COUNT, WILL_ALWAYS, WILL_NEVER};

/// A candidate in the continuous search box, one entry per OLSR parameter.
pub type Point = [f64; PARAM_COUNT];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dimension {
    pub name: &'static str,
    pub lower: f64,
    pub upper: f64,
    /// Rounded to the nearest integer when decoded.
    pub integer: bool,
}

impl Dimension {
    pub fn range(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lower, self.upper)
    }
}

/// Search box over the eight OLSR parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpace {
    dims: [Dimension; PARAM_COUNT],
}

impl Default for ParamSpace {
    fn default() -> Self {
        Self::olsr()
    }
}

impl ParamSpace {
    /// Tuning ranges of the OLSR parameters, in [`OlsrConfig::to_raw`] order.
    pub fn olsr() -> Self {
        let real = |name, (lower, upper): (f64, f64)| Dimension { name, lower, upper, integer: false };
        ParamSpace {
            dims: [
                real("hello_interval", INTERVAL_RANGE),
                real("refresh_interval", INTERVAL_RANGE),
                real("tc_interval", INTERVAL_RANGE),
                Dimension {
                    name: "willingness",
                    lower: f64::from(WILL_NEVER),
                    upper: f64::from(WILL_ALWAYS),
                    integer: true,
                },
                real("neighb_hold_time", HOLD_TIME_RANGE),
                real("top_hold_time", HOLD_TIME_RANGE),
                real("mid_hold_time", HOLD_TIME_RANGE),
                real("dup_hold_time", HOLD_TIME_RANGE),
            ],
        }
    }

    pub fn dims(&self) -> &[Dimension; PARAM_COUNT] {
        &self.dims
    }

    pub fn names(&self) -> [&'static str; PARAM_COUNT] {
        self.dims.map(|d| d.name)
    }

    pub fn clamp(&self, x: &Point) -> Point {
        std::array::from_fn(|i| self.dims[i].clamp(x[i]))
    }

    pub fn contains(&self, x: &Point) -> bool {
        x.iter().zip(&self.dims).all(|(&v, d)| v >= d.lower && v <= d.upper)
    }

    /// Uniform sample from the box.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        std::array::from_fn(|i| rng.random_range(self.dims[i].lower..=self.dims[i].upper))
    }

    /// Maps a raw vector onto a valid configuration: every entry is clamped,
    /// willingness is rounded half away from zero first.
    pub fn decode(&self, raw: &[f64]) -> Result<OlsrConfig, OptimizeError> {
        if raw.len() != PARAM_COUNT {
            return Err(OptimizeError::Dimension(raw.len()));
        }
        if let Some(i) = raw.iter().position(|v| !v.is_finite()) {
            return Err(OptimizeError::NonFinite { name: self.dims[i].name, value: raw[i] });
        }
        let v: Point = std::array::from_fn(|i| {
            let d = &self.dims[i];
            d.clamp(if d.integer { raw[i].round() } else { raw[i] })
        });
        Ok(OlsrConfig {
            hello_interval: v[0],
            refresh_interval: v[1],
            tc_interval: v[2],
            willingness: v[3] as u8,
            neighb_hold_time: v[4],
            top_hold_time: v[5],
            mid_hold_time: v[6],
            dup_hold_time: v[7],
        })
    }
}

/// [`ParamSpace::decode`] over the default OLSR box.
pub fn decode_params(raw: &[f64]) -> Result<OlsrConfig, OptimizeError> {
    ParamSpace::olsr().decode(raw)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn clamps_below_range() {
        let mut raw = OlsrConfig::rfc3626().to_raw();
        raw[0] = 0.2;
        raw[7] = 250.0;
        let cfg = decode_params(&raw).unwrap();
        assert_eq!(cfg.hello_interval, 1.0);
        assert_eq!(cfg.dup_hold_time, 100.0);
    }

    #[test]
    fn willingness_rounds_then_clamps() {
        let mut raw = OlsrConfig::rfc3626().to_raw();
        raw[3] = 3.7;
        assert_eq!(decode_params(&raw).unwrap().willingness, 4);
        raw[3] = 3.2;
        assert_eq!(decode_params(&raw).unwrap().willingness, 3);
        raw[3] = 9.6;
        assert_eq!(decode_params(&raw).unwrap().willingness, 7);
        raw[3] = -0.8;
        assert_eq!(decode_params(&raw).unwrap().willingness, 0);
    }

    #[test]
    fn standard_vector_decodes_to_standard_config() {
        let cfg = decode_params(&OlsrConfig::rfc3626().to_raw()).unwrap();
        assert_eq!(cfg, OlsrConfig::rfc3626());
        assert_eq!(cfg.to_raw(), [2.0, 2.0, 5.0, 3.0, 6.0, 15.0, 15.0, 30.0]);
    }

    #[test]
    fn rejects_non_finite_and_wrong_length() {
        let mut raw = OlsrConfig::rfc3626().to_raw();
        raw[5] = f64::NAN;
        assert!(matches!(decode_params(&raw), Err(OptimizeError::NonFinite { name: "top_hold_time", .. })));
        assert!(matches!(decode_params(&raw[..7]), Err(OptimizeError::Dimension(7))));
    }

    proptest! {
        #[test]
        fn decoded_configs_are_valid(raw in prop::array::uniform8(-1e3f64..1e3)) {
            let cfg = decode_params(&raw).unwrap();
            prop_assert!(cfg.validate().is_ok());
            let back = cfg.to_raw();
            prop_assert_eq!(back[3].fract(), 0.0);
            prop_assert!(ParamSpace::olsr().contains(&back));
        }
    }
}
