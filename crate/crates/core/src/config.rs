//! Planner parameters and the flat `key = value` configuration format.
//!
//! Every parameter has a default, so an empty file is a valid configuration.
//! Lines starting with `#` are comments. Unknown keys are rejected so that
//! typos do not silently fall back to defaults.

use std::path::Path;

use crate::error::{Error, Result};

/// Parameters shared by the grid, end-point, planner and simulator modules.
#[derive(Debug, Clone, PartialEq)]
pub struct PlannerConfig {
    /// Occupancy probability above which a cell is treated as an obstacle, in `(0, 100]`.
    pub threshold: f64,
    /// Planning range of the local planner, meters.
    pub planning_range: f64,
    /// Range sensor saturation distance, meters.
    pub sensor_range: f64,
    /// Sample field of view, degrees.
    pub fov_deg: f64,
    /// Number of end-point candidates drawn from each scan.
    pub samples: usize,
    /// Number of raw beams per scan.
    pub raw_beams: usize,
    /// Heuristic inflation weight.
    pub epsilon: f64,
    /// Clearance at which the obstacle cost saturates to zero, meters.
    pub d_safe: f64,
    /// Obstacle-cost multiplier.
    pub lambda_dist: f64,
    /// Robot radius; cells closer than this to an obstacle are not traversable.
    pub r_robot: f64,
    /// Seconds between planning ticks.
    pub replan_period: f64,
    /// Cruise speed, meters/second.
    pub v_max: f64,
    /// End-point low-pass cutoff, Hz.
    pub lpf_cutoff: f64,
    /// Side length of the square local-map window, meters.
    pub window_size: f64,
    /// Height of the local map. Carried for completeness, the planner is planar.
    pub window_height: f64,
    /// When every clamped sample within ±90° of the heading is shorter than this the scan signals a dead end.
    pub dead_end_range: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            threshold: 70.0,
            planning_range: 5.0,
            sensor_range: 15.0,
            fov_deg: 240.0,
            samples: 48,
            raw_beams: 1440,
            epsilon: 1.0,
            d_safe: 1.0,
            lambda_dist: 5.0,
            r_robot: 0.3,
            replan_period: 0.1,
            v_max: 2.0,
            lpf_cutoff: 1.0,
            window_size: 11.0,
            window_height: 5.0,
            dead_end_range: 2.0,
        }
    }
}

impl PlannerConfig {
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if !(self.threshold > 0.0 && self.threshold <= 100.0) {
            return fail(format!("threshold must be in (0, 100], got {}", self.threshold));
        }
        if !(self.planning_range > 0.0 && self.planning_range <= self.sensor_range) {
            return fail(format!(
                "need 0 < planning_range <= sensor_range, got {} and {}",
                self.planning_range, self.sensor_range
            ));
        }
        if !(self.fov_deg > 0.0 && self.fov_deg <= 360.0) {
            return fail(format!("fov_deg must be in (0, 360], got {}", self.fov_deg));
        }
        if self.samples == 0 || self.raw_beams == 0 || !self.raw_beams.is_multiple_of(self.samples) {
            return fail(format!(
                "samples ({}) must divide raw_beams ({})",
                self.samples, self.raw_beams
            ));
        }
        if !(self.epsilon >= 0.0) || !(self.lambda_dist >= 0.0) {
            return fail("epsilon and lambda_dist must be non-negative".into());
        }
        if !(self.r_robot >= 0.0) || !(self.d_safe > self.r_robot) {
            return fail(format!(
                "need 0 <= r_robot < d_safe, got {} and {}",
                self.r_robot, self.d_safe
            ));
        }
        if !(self.replan_period > 0.0) || !(self.lpf_cutoff > 0.0) || !(self.v_max > 0.0) {
            return fail("replan_period, lpf_cutoff and v_max must be positive".into());
        }
        if !(self.window_size > 0.0) || !(self.window_height > 0.0) {
            return fail("window dimensions must be positive".into());
        }
        if !(self.dead_end_range >= 0.0) {
            return fail("dead_end_range must be non-negative".into());
        }
        Ok(())
    }

    /// Stride between sampled beams in the raw scan.
    pub fn sample_stride(&self) -> usize {
        self.raw_beams / self.samples
    }

    pub fn fov_rad(&self) -> f64 {
        self.fov_deg.to_radians()
    }

    /// Sets one parameter by name. Returns `Ok(false)` for unknown keys.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<bool, String> {
        let slot: &mut f64 = match key {
            "threshold" => &mut self.threshold,
            "planning_range" => &mut self.planning_range,
            "sensor_range" => &mut self.sensor_range,
            "fov_deg" => &mut self.fov_deg,
            "epsilon" => &mut self.epsilon,
            "d_safe" => &mut self.d_safe,
            "lambda_dist" => &mut self.lambda_dist,
            "r_robot" => &mut self.r_robot,
            "replan_period" => &mut self.replan_period,
            "v_max" => &mut self.v_max,
            "lpf_cutoff" => &mut self.lpf_cutoff,
            "window_size" => &mut self.window_size,
            "window_height" => &mut self.window_height,
            "dead_end_range" => &mut self.dead_end_range,
            "samples" => {
                self.samples = parse_value(key, value)?;
                return Ok(true);
            }
            "raw_beams" => {
                self.raw_beams = parse_value(key, value)?;
                return Ok(true);
            }
            _ => return Ok(false),
        };
        *slot = parse_value(key, value)?;
        Ok(true)
    }

    /// Renders the configuration in the file format accepted by [`KeyValues`].
    pub fn to_key_values(&self) -> String {
        format!(
            "threshold = {}\nplanning_range = {}\nsensor_range = {}\nfov_deg = {}\nsamples = {}\n\
             raw_beams = {}\nepsilon = {}\nd_safe = {}\nlambda_dist = {}\nr_robot = {}\n\
             replan_period = {}\nv_max = {}\nlpf_cutoff = {}\nwindow_size = {}\n\
             window_height = {}\ndead_end_range = {}\n",
            self.threshold,
            self.planning_range,
            self.sensor_range,
            self.fov_deg,
            self.samples,
            self.raw_beams,
            self.epsilon,
            self.d_safe,
            self.lambda_dist,
            self.r_robot,
            self.replan_period,
            self.v_max,
            self.lpf_cutoff,
            self.window_size,
            self.window_height,
            self.dead_end_range,
        )
    }
}

pub(crate) fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> std::result::Result<T, String> {
    value
        .trim()
        .parse()
        .map_err(|_| format!("invalid value {value:?} for {key}"))
}

/// Ordered `key = value` pairs with the line each came from.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues {
    pub source: String,
    pub entries: Vec<(String, String, usize)>,
}

impl KeyValues {
    pub fn parse(source: &str, text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(source, idx + 1, format!("expected `key = value`, got {line:?}")))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(Error::parse(source, idx + 1, "empty key"));
            }
            entries.push((key.to_string(), value.trim().to_string(), idx + 1));
        }
        Ok(Self {
            source: source.to_string(),
            entries,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&path.display().to_string(), &text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .rev()
            .find(|(k, _, _)| k == key)
            .map(|(_, v, _)| v.as_str())
    }
}

impl TryFrom<&KeyValues> for PlannerConfig {
    type Error = Error;

    fn try_from(kv: &KeyValues) -> Result<Self> {
        let mut cfg = PlannerConfig::default();
        for (key, value, line) in &kv.entries {
            match cfg.set(key, value) {
                Ok(true) => {}
                Ok(false) => return Err(Error::parse(&kv.source, *line, format!("unknown key {key:?}"))),
                Err(msg) => return Err(Error::parse(&kv.source, *line, msg)),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = PlannerConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.sample_stride(), 30);
    }

    #[test]
    fn round_trips_through_key_values() {
        let cfg = PlannerConfig {
            epsilon: 2.5,
            samples: 24,
            ..PlannerConfig::default()
        };
        let kv = KeyValues::parse("mem", &cfg.to_key_values()).unwrap();
        assert_eq!(PlannerConfig::try_from(&kv).unwrap(), cfg);
    }

    #[test]
    fn rejects_unknown_key_with_line() {
        let kv = KeyValues::parse("cfg.txt", "# comment\nepsilon = 1\nepsilom = 2\n").unwrap();
        let err = PlannerConfig::try_from(&kv).unwrap_err();
        assert_eq!(err.to_string(), "cfg.txt:3: unknown key \"epsilom\"");
    }

    #[test]
    fn rejects_non_dividing_sample_count() {
        let cfg = PlannerConfig {
            samples: 47,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn rejects_threshold_out_of_range() {
        for t in [0.0, -1.0, 100.5] {
            let cfg = PlannerConfig {
                threshold: t,
                ..Default::default()
            };
            assert!(cfg.validate().is_err(), "{t}");
        }
    }
}
