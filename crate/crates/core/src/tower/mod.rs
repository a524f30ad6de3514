//! End-growth bookkeeping for the iterated construction `S_2, S_3, …`.
//!
//! Each step glues a plane with `m` necks on top of the current surface. At the
//! limit `t = 0` the growths change exactly by
//! `(c_1, …, c_n) ↦ (c_1, …, c_(n-1), -c_n/(m-1), m c_n/(m-1))`,
//! so everything here is exact rational arithmetic. The true surfaces attain
//! these values only approximately.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use crate::{Error, Result};

/// Bound on `c_n(S_n)/√n` for the minimal schedule.
pub const SQRT_CONSTANT: f64 = 1.6;

fn int(k: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(k))
}

fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub m: u64,
    /// `(m-1)²/(2c_n²)`, a lower bound for the curvature gained by the step.
    pub curvature_bound: BigRational,
}

/// Ordered growths `c_1 < … < c_(n-1) < 0 < c_n` of one surface of the tower.
///
/// The growths need not sum to zero: they describe the ends of a base surface,
/// not a closed residue system.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthState {
    growths: Vec<BigRational>,
    history: Vec<StepRecord>,
}

impl GrowthState {
    pub fn new(growths: Vec<BigRational>) -> Result<Self> {
        let n = growths.len();
        if n < 2 {
            return Err(Error::Precondition(format!("need at least 2 ends, got {n}")));
        }
        if growths.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Precondition("growths must be strictly increasing".into()));
        }
        if !growths[n - 2].is_negative() || !growths[n - 1].is_positive() {
            return Err(Error::Precondition("exactly the last growth must be positive".into()));
        }
        Ok(GrowthState { growths, history: Vec::new() })
    }

    /// The standard catenoid, growths `(-1, 1)`.
    pub fn catenoid() -> Self {
        GrowthState {
            growths: vec![-BigRational::one(), BigRational::one()],
            history: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.growths.len()
    }

    pub fn growths(&self) -> &[BigRational] {
        &self.growths
    }

    pub fn growths_f64(&self) -> Vec<f64> {
        self.growths.iter().map(to_f64).collect()
    }

    pub fn history(&self) -> &[StepRecord] {
        &self.history
    }

    /// `c_n`.
    pub fn top(&self) -> &BigRational {
        &self.growths[self.n() - 1]
    }

    /// `c_n / |c_(n-1)|`.
    pub fn embeddedness_ratio(&self) -> BigRational {
        self.top() / self.growths[self.n() - 2].abs()
    }

    /// Smallest `m` with `m - 1 > c_n/|c_(n-1)|`.
    pub fn min_admissible_m(&self) -> u64 {
        let floor = self.embeddedness_ratio().floor().to_integer();
        floor.to_u64().map_or(u64::MAX, |f| f.saturating_add(2))
    }

    pub fn step(&self, m: u64) -> Result<GrowthState> {
        let ratio = self.embeddedness_ratio();
        if m < 2 || int(m - 1) <= ratio {
            return Err(Error::EmbeddednessCondition {
                ratio: to_f64(&ratio),
                min_admissible: self.min_admissible_m(),
            });
        }
        let cn = self.top().clone();
        let mut growths = self.growths[..self.n() - 1].to_vec();
        growths.push(-&cn / int(m - 1));
        growths.push(&cn * int(m) / int(m - 1));
        let mut history = self.history.clone();
        history.push(StepRecord {
            m,
            curvature_bound: int(m - 1) * int(m - 1) / (int(2) * &cn * &cn),
        });
        Ok(GrowthState { growths, history })
    }
}

/// `m_2, m_3, …` with `m_2 ≥ 3` and `m_(k+1) ≥ m_k + 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule(Vec<u64>);

impl Schedule {
    pub fn new(ms: Vec<u64>) -> Result<Self> {
        if ms.is_empty() {
            return Err(Error::InvalidSchedule { index: 2, reason: "empty schedule".into() });
        }
        if ms[0] < 3 {
            return Err(Error::InvalidSchedule {
                index: 2,
                reason: format!("m_2 = {} but needs ≥ 3", ms[0]),
            });
        }
        for k in 1..ms.len() {
            if ms[k] < ms[k - 1] + 2 {
                return Err(Error::InvalidSchedule {
                    index: k + 2,
                    reason: format!("m_{} = {} but needs ≥ {}", k + 2, ms[k], ms[k - 1] + 2),
                });
            }
        }
        Ok(Schedule(ms))
    }

    /// `m_n = 2n - 1` for `n = 2..=last`.
    pub fn minimal(last: usize) -> Self {
        Schedule((2..=last.max(2) as u64).map(|n| 2 * n - 1).collect())
    }

    /// `m_n = base^n` for `n = 2..=last`.
    pub fn geometric(base: u64, last: usize) -> Result<Self> {
        if base < 2 {
            return Err(Error::Precondition(format!("geometric base must be ≥ 2, got {base}")));
        }
        let ms = (2..=last.max(2) as u32)
            .map(|n| {
                base.checked_pow(n)
                    .ok_or_else(|| Error::Precondition(format!("{base}^{n} does not fit in 64 bits")))
            })
            .collect::<Result<Vec<_>>>()?;
        Schedule::new(ms)
    }

    /// `minimal`, `geometric:B` or a comma separated list, covering `m_2..=m_last`.
    pub fn parse(text: &str, last: usize) -> Result<Self> {
        let text = text.trim();
        if text == "minimal" {
            return Ok(Schedule::minimal(last));
        }
        if let Some(b) = text.strip_prefix("geometric:") {
            let base = b
                .trim()
                .parse()
                .map_err(|_| Error::Precondition(format!("bad geometric base {b:?}")))?;
            return Schedule::geometric(base, last);
        }
        let ms = text
            .split(',')
            .map(|s| s.trim().parse::<u64>().map_err(|_| Error::Precondition(format!("bad schedule entry {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Schedule::new(ms)
    }

    pub fn values(&self) -> &[u64] {
        &self.0
    }

    /// `m_n`.
    pub fn m(&self, n: usize) -> Option<u64> {
        n.checked_sub(2).and_then(|k| self.0.get(k).copied())
    }

    /// Largest `n` for which `m_n` is given.
    pub fn last_index(&self) -> usize {
        self.0.len() + 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleReport {
    /// `S_2, S_3, …, S_(last+1)`.
    pub states: Vec<GrowthState>,
    /// `m_n ≥ 2n - 1` for every index.
    pub lower_bound_holds: bool,
    /// `m_n = 2n - 1` for every index.
    pub is_minimal: bool,
}

/// Runs the schedule from the catenoid, checking the embeddedness condition at
/// every step.
pub fn validate_schedule(s: &Schedule) -> Result<ScheduleReport> {
    let mut states = vec![GrowthState::catenoid()];
    for (k, &m) in s.values().iter().enumerate() {
        let next = states[k].step(m).map_err(|e| Error::InvalidSchedule { index: k + 2, reason: e.to_string() })?;
        states.push(next);
    }
    let indexed = || s.values().iter().enumerate().map(|(k, &m)| (2 * (k as u64 + 2) - 1, m));
    Ok(ScheduleReport {
        states,
        lower_bound_holds: indexed().all(|(b, m)| m >= b),
        is_minimal: indexed().all(|(b, m)| m == b),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesVerdict {
    Convergent,
    Divergent,
    Inconclusive,
}

impl std::fmt::Display for SeriesVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SeriesVerdict::Convergent => "convergent",
            SeriesVerdict::Divergent => "divergent",
            SeriesVerdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TowerRow {
    pub n: usize,
    pub m: u64,
    /// `c_n(S_n)`, exact.
    pub top_growth: BigRational,
    /// `c_n(S_n)/√n`.
    pub sqrt_ratio: f64,
    /// `(m_n-1)²/(2c_n(S_n)²)`.
    pub curvature_certificate: f64,
    /// `c_n(S_∞) = -c_n(S_n)/(m_n-1)`.
    pub limit_growth: f64,
    /// `Σ_(k≤n) |c_k(S_∞)|`.
    pub partial_sum: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Asymptotics {
    pub rows: Vec<TowerRow>,
    pub sqrt_constant: f64,
    pub max_sqrt_ratio: f64,
    pub sqrt_bound_holds: bool,
    /// `c_n(S_n)/√n` is nondecreasing in `n`.
    pub sqrt_ratio_monotone: bool,
    /// Certificate exceeds `n - 1` for every row.
    pub certificate_exceeds_n_minus_1: bool,
    /// Largest ratio `|c_(n+1)(S_∞)|/|c_n(S_∞)|` over the last quarter of rows.
    pub tail_ratio: f64,
    /// `p` in `|c_n(S_∞)| ≈ n^(-p)`, fitted on the last half of rows.
    pub decay_exponent: f64,
    pub series: SeriesVerdict,
}

impl Asymptotics {
    /// Some certificate exceeds `target`.
    pub fn certificate_exceeds(&self, target: f64) -> bool {
        self.rows.iter().any(|r| r.curvature_certificate > target)
    }
}

fn classify(rows: &[TowerRow]) -> (f64, f64, SeriesVerdict) {
    let a: Vec<f64> = rows.iter().map(|r| r.limit_growth.abs()).collect();
    let len = a.len();
    if len < 8 {
        return (f64::NAN, f64::NAN, SeriesVerdict::Inconclusive);
    }
    let tail_ratio = (len - len / 4 - 1..len - 1).map(|k| a[k + 1] / a[k]).fold(0.0, f64::max);
    let (lo, hi) = (len / 2, len - 1);
    let p = -(a[hi] / a[lo]).ln() / (rows[hi].n as f64 / rows[lo].n as f64).ln();
    let verdict = if tail_ratio < 0.9 || p > 1.1 {
        SeriesVerdict::Convergent
    } else if p < 0.9 {
        SeriesVerdict::Divergent
    } else {
        SeriesVerdict::Inconclusive
    };
    (tail_ratio, p, verdict)
}

/// Rows `n = 2..=last` of the tower driven by `s`.
pub fn asymptotics(s: &Schedule, last: usize) -> Result<Asymptotics> {
    if last < 2 || last > s.last_index() {
        return Err(Error::Precondition(format!(
            "need 2 ≤ N ≤ {}, got {last}",
            s.last_index()
        )));
    }
    let mut state = GrowthState::catenoid();
    let mut rows = Vec::with_capacity(last - 1);
    let mut partial_sum = 0.0;
    for n in 2..=last {
        let m = s.m(n).expect("index checked above");
        let cn = state.top().clone();
        let limit = -&cn / int(m - 1);
        partial_sum += to_f64(&limit).abs();
        let cert = int(m - 1) * int(m - 1) / (int(2) * &cn * &cn);
        rows.push(TowerRow {
            n,
            m,
            sqrt_ratio: to_f64(&cn) / (n as f64).sqrt(),
            curvature_certificate: to_f64(&cert),
            limit_growth: to_f64(&limit),
            partial_sum,
            top_growth: cn,
        });
        state = state.step(m).map_err(|e| Error::InvalidSchedule { index: n, reason: e.to_string() })?;
    }
    let max_sqrt_ratio = rows.iter().map(|r| r.sqrt_ratio).fold(0.0, f64::max);
    let (tail_ratio, decay_exponent, series) = classify(&rows);
    Ok(Asymptotics {
        sqrt_constant: SQRT_CONSTANT,
        max_sqrt_ratio,
        sqrt_bound_holds: max_sqrt_ratio <= SQRT_CONSTANT,
        sqrt_ratio_monotone: rows.windows(2).all(|w| w[1].sqrt_ratio >= w[0].sqrt_ratio),
        certificate_exceeds_n_minus_1: rows.iter().all(|r| r.curvature_certificate > (r.n - 1) as f64),
        tail_ratio,
        decay_exponent,
        series,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn two_steps_from_the_catenoid() {
        let s = GrowthState::catenoid().step(3).unwrap();
        assert_eq!(s.growths(), &[q(-1, 1), q(-1, 2), q(3, 2)]);
        assert_eq!(s.history()[0].curvature_bound, q(2, 1));
        let s = s.step(5).unwrap();
        assert_eq!(s.growths(), &[q(-1, 1), q(-1, 2), q(-3, 8), q(15, 8)]);
        assert_eq!(s.history()[1].curvature_bound, q(32, 9));
    }

    #[test]
    fn m_two_is_rejected() {
        let e = GrowthState::catenoid().step(2).unwrap_err();
        assert_eq!(e, Error::EmbeddednessCondition { ratio: 1.0, min_admissible: 3 });
    }

    #[test]
    fn min_admissible_is_sharp() {
        let s = GrowthState::catenoid().step(3).unwrap();
        let m = s.min_admissible_m();
        assert_eq!(m, 5);
        assert!(s.step(m).is_ok());
        assert!(s.step(m - 1).is_err());
    }

    #[test]
    fn schedules() {
        let r = validate_schedule(&Schedule::new(vec![3, 5, 7, 9]).unwrap()).unwrap();
        assert!(r.is_minimal && r.lower_bound_holds);
        assert_eq!(r.states.len(), 5);
        match Schedule::new(vec![3, 4]) {
            Err(Error::InvalidSchedule { index, .. }) => assert_eq!(index, 3),
            other => panic!("{other:?}"),
        }
        let r = validate_schedule(&Schedule::new(vec![4, 7, 10]).unwrap()).unwrap();
        assert!(r.lower_bound_holds && !r.is_minimal);
        assert!(Schedule::new(vec![2, 5]).is_err());
    }

    #[test]
    fn parse_forms() {
        assert_eq!(Schedule::parse("minimal", 5).unwrap().values(), &[3, 5, 7, 9]);
        assert_eq!(Schedule::parse("geometric:2", 4).unwrap().values(), &[4, 8, 16]);
        assert_eq!(Schedule::parse(" 3, 5 ,8", 0).unwrap().values(), &[3, 5, 8]);
        assert!(Schedule::parse("3,x", 0).is_err());
        assert!(Schedule::parse("geometric:2", 80).is_err());
    }

    #[test]
    fn minimal_fifth_growth() {
        let a = asymptotics(&Schedule::minimal(10), 10).unwrap();
        let row = a.rows.iter().find(|r| r.n == 5).unwrap();
        assert_eq!(row.top_growth, q(35, 16));
        assert_eq!(row.top_growth, q(3, 2) * q(5, 4) * q(7, 6));
    }

    #[test]
    fn minimal_schedule_sqrt_growth() {
        let a = asymptotics(&Schedule::minimal(200), 200).unwrap();
        assert!(a.sqrt_bound_holds && a.sqrt_ratio_monotone);
        assert!(a.certificate_exceeds_n_minus_1);
        assert_eq!(a.series, SeriesVerdict::Divergent);
        assert!((a.decay_exponent - 0.5).abs() < 0.05);
    }

    #[test]
    fn geometric_schedule_converges() {
        let a = asymptotics(&Schedule::geometric(2, 20).unwrap(), 20).unwrap();
        assert_eq!(a.series, SeriesVerdict::Convergent);
        assert!(a.tail_ratio < 0.6);
        let last = a.rows.last().unwrap().partial_sum;
        assert!(last - a.rows[a.rows.len() - 2].partial_sum < 1e-5 * last);
    }

    #[test]
    fn identity_chain() {
        let s = Schedule::new(vec![4, 7, 11, 14]).unwrap();
        let r = validate_schedule(&s).unwrap();
        for (k, &m) in s.values().iter().enumerate() {
            let (a, b) = (&r.states[k], &r.states[k + 1]);
            let n = a.n();
            assert_eq!(b.growths()[n - 1], -a.top() / int(m - 1));
            assert_eq!(b.growths()[n], a.top() * int(m) / int(m - 1));
        }
    }

    #[test]
    fn bad_last_index() {
        assert!(asymptotics(&Schedule::minimal(5), 7).is_err());
    }
}
