use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{EquationParams, SpectralField, TorusGrid};

/// Node times closer than this are treated as equal.
pub const TIME_TOL: f64 = 1e-9;

/// Closed time interval `[a, b]` with `a < b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeInterval {
    a: f64,
    b: f64,
}

impl TimeInterval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::Argument(format!("invalid interval [{a}, {b}]")));
        }
        Ok(TimeInterval { a, b })
    }

    pub fn start(&self) -> f64 {
        self.a
    }

    pub fn end(&self) -> f64 {
        self.b
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn contains_interval(&self, other: &TimeInterval) -> bool {
        other.a >= self.a - TIME_TOL && other.b <= self.b + TIME_TOL
    }
}

/// Sampled flow: one field per node of a strictly increasing time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    interval: TimeInterval,
    grid: TorusGrid,
    params: EquationParams,
    times: Vec<f64>,
    fields: Vec<SpectralField>,
}

impl Trajectory {
    /// A trajectory with no nodes is allowed (it only carries metadata);
    /// otherwise the first and last nodes must sit on the interval ends.
    pub fn new(
        interval: TimeInterval,
        grid: TorusGrid,
        params: EquationParams,
        times: Vec<f64>,
        fields: Vec<SpectralField>,
    ) -> Result<Self> {
        if times.len() != fields.len() {
            return Err(Error::Config(format!(
                "{} times but {} fields",
                times.len(),
                fields.len()
            )));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("time grid must be strictly increasing".into()));
        }
        if let (Some(first), Some(last)) = (times.first(), times.last()) {
            if (first - interval.start()).abs() > TIME_TOL || (last - interval.end()).abs() > TIME_TOL {
                return Err(Error::Config(format!(
                    "time grid [{first}, {last}] does not span [{}, {}]",
                    interval.start(),
                    interval.end()
                )));
            }
        }
        if fields.iter().any(|f| f.grid() != &grid) {
            return Err(Error::Config("all fields must share one grid".into()));
        }
        Ok(Trajectory {
            interval,
            grid,
            params,
            times,
            fields,
        })
    }

    pub fn interval(&self) -> TimeInterval {
        self.interval
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn params(&self) -> EquationParams {
        self.params
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn fields(&self) -> &[SpectralField] {
        &self.fields
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_field(&self) -> Option<&SpectralField> {
        self.fields.last()
    }

    /// Index of the node at time `t`, if any.
    pub fn node_at(&self, t: f64) -> Option<usize> {
        let i = self.times.partition_point(|&s| s < t - TIME_TOL);
        (i < self.times.len() && (self.times[i] - t).abs() <= TIME_TOL).then_some(i)
    }

    /// Inclusive node index range covering `j`; errors when `j` leaves the
    /// stored interval.
    pub fn node_range(&self, j: &TimeInterval) -> Result<(usize, usize)> {
        if !self.interval.contains_interval(j) {
            return Err(Error::Argument(format!(
                "interval [{}, {}] exceeds stored [{}, {}]",
                j.start(),
                j.end(),
                self.interval.start(),
                self.interval.end()
            )));
        }
        let lo = self.times.partition_point(|&s| s < j.start() - TIME_TOL);
        let hi = self.times.partition_point(|&s| s <= j.end() + TIME_TOL);
        if hi == 0 || lo >= hi {
            return Err(Error::Argument("interval contains no trajectory nodes".into()));
        }
        Ok((lo, hi - 1))
    }

    /// Nodes `lo..=hi` as a trajectory over `[t_lo, t_hi]`.
    pub fn slice(&self, lo: usize, hi: usize) -> Result<Trajectory> {
        if hi <= lo || hi >= self.len() {
            return Err(Error::Argument(format!("bad node slice {lo}..={hi}")));
        }
        Trajectory::new(
            TimeInterval::new(self.times[lo], self.times[hi])?,
            self.grid,
            self.params,
            self.times[lo..=hi].to_vec(),
            self.fields[lo..=hi].to_vec(),
        )
    }

    /// Restriction to the nodes inside `j`.
    pub fn restrict(&self, j: &TimeInterval) -> Result<Trajectory> {
        let (lo, hi) = self.node_range(j)?;
        self.slice(lo, hi)
    }

    /// Same nodes with a different label for the equation coefficients.
    pub fn with_params(mut self, params: EquationParams) -> Self {
        self.params = params;
        self
    }
}

/// Trapezoidal integral of node samples `values[k] ≈ g(times[k])` over
/// `[a, b]`, linearly interpolating at cut points that fall between nodes.
pub fn trapezoid_over(times: &[f64], values: &[f64], a: f64, b: f64) -> f64 {
    debug_assert_eq!(times.len(), values.len());
    let mut total = 0.0;
    for k in 1..times.len() {
        let (t0, t1) = (times[k - 1], times[k]);
        let lo = t0.max(a);
        let hi = t1.min(b);
        if hi <= lo {
            continue;
        }
        let lerp = |t: f64| values[k - 1] + (values[k] - values[k - 1]) * (t - t0) / (t1 - t0);
        total += 0.5 * (hi - lo) * (lerp(lo) + lerp(hi));
    }
    total
}
