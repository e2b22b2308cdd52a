//! Golden end-point scenarios.
//!
//! ```text
//! # free-form comment
//! name = four_way_junction
//! pose = 0.0 0.0 0.0 0.0          # x y z yaw
//! expect = 2.0 -1.0 5.5 1.0       # xmin ymin xmax ymax of the open region
//! ranges = 3.2 inf 4.1 ...         # may span several `ranges` lines
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::{Point, Pose, ScanFrame};
use crate::error::{Error, Result};

/// A recorded scan with the region its end-point must fall in.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub pose: Pose,
    pub expect_min: Point,
    pub expect_max: Point,
    pub ranges: Vec<f64>,
}

impl Scenario {
    pub fn contains(&self, p: Point) -> bool {
        (self.expect_min.x..=self.expect_max.x).contains(&p.x)
            && (self.expect_min.y..=self.expect_max.y).contains(&p.y)
    }

    pub fn scan(&self, fov_deg: f64) -> Result<ScanFrame> {
        ScanFrame::new(self.ranges.clone(), fov_deg, 0.0)
    }

    pub fn parse(source: &str, text: &str) -> Result<Self> {
        let mut name = None;
        let mut pose = None;
        let mut expect = None;
        let mut ranges = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(source, line_no, "expected `key = value`"))?;
            let numbers = || -> Result<Vec<f64>> {
                value
                    .split_whitespace()
                    .map(|t| {
                        t.parse::<f64>()
                            .map_err(|_| Error::parse(source, line_no, format!("bad number {t:?}")))
                    })
                    .collect()
            };
            match key.trim() {
                "name" => name = Some(value.trim().to_string()),
                "pose" => {
                    let v = numbers()?;
                    if v.len() != 4 {
                        return Err(Error::parse(source, line_no, "pose needs x y z yaw"));
                    }
                    pose = Some(Pose::new(v[0], v[1], v[2], v[3]));
                }
                "expect" => {
                    let v = numbers()?;
                    if v.len() != 4 || v[0] > v[2] || v[1] > v[3] {
                        return Err(Error::parse(source, line_no, "expect needs xmin ymin xmax ymax"));
                    }
                    expect = Some((Point::new(v[0], v[1]), Point::new(v[2], v[3])));
                }
                "ranges" => ranges.extend(numbers()?),
                other => return Err(Error::parse(source, line_no, format!("unknown key {other:?}"))),
            }
        }

        let missing = |what: &str| Error::parse(source, text.lines().count(), format!("missing `{what}`"));
        let (expect_min, expect_max) = expect.ok_or_else(|| missing("expect"))?;
        Ok(Self {
            name: name.unwrap_or_default(),
            pose: pose.ok_or_else(|| missing("pose"))?,
            expect_min,
            expect_max,
            ranges,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&path.display().to_string(), &text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "name = {}", self.name);
        let p = &self.pose;
        let _ = writeln!(out, "pose = {} {} {} {}", p.x, p.y, p.z, p.yaw);
        let _ = writeln!(
            out,
            "expect = {} {} {} {}",
            self.expect_min.x, self.expect_min.y, self.expect_max.x, self.expect_max.y
        );
        for chunk in self.ranges.chunks(12) {
            let line: Vec<String> = chunk.iter().map(|r| format!("{r}")).collect();
            let _ = writeln!(out, "ranges = {}", line.join(" "));
        }
        out
    }
}
