//! Population dynamics, fractional publication output, venue ratio series
//! and logistic growth fitting.

use crate::classifier::EthnicityLabel;
use crate::corpus::{label_of, AuthorLabels, PublicationRecord};
use crate::names::FullName;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

const L: usize = EthnicityLabel::ALL.len();

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BibliometricsError {
    #[error("need at least {min} points, got {got}")]
    TooFewPoints { min: usize, got: usize },
    #[error("values are constant; growth parameters are not identifiable")]
    DegenerateData,
    #[error("invalid data: {0}")]
    InvalidData(String),
    #[error("label groups must be non-empty and disjoint")]
    BadGroups,
}

/// Per-year new and accumulated author counts for every label.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct PopulationSeries {
    pub years: Vec<i32>,
    /// Indexed `[year][label.index()]`.
    pub new: Vec<[usize; L]>,
    pub accumulated: Vec<[usize; L]>,
}

impl PopulationSeries {
    fn position(&self, year: i32) -> Option<usize> {
        self.years.binary_search(&year).ok()
    }

    pub fn new_authors(&self, year: i32, label: EthnicityLabel) -> usize {
        self.position(year).map_or(0, |i| self.new[i][label.index()])
    }

    /// Accumulated count, carried forward past the last year.
    pub fn accumulated(&self, year: i32, label: EthnicityLabel) -> usize {
        match self.years.binary_search(&year) {
            Ok(i) => self.accumulated[i][label.index()],
            Err(0) => 0,
            Err(i) => self.accumulated[i - 1][label.index()],
        }
    }

    /// `(year, accumulated)` points for one label.
    pub fn accumulated_points(&self, label: EthnicityLabel) -> Vec<(f64, f64)> {
        self.years
            .iter()
            .zip(&self.accumulated)
            .map(|(&y, a)| (y as f64, a[label.index()] as f64))
            .collect()
    }
}

fn year_span(records: &[PublicationRecord]) -> Option<Vec<i32>> {
    let min = records.iter().map(|r| r.year).min()?;
    let max = records.iter().map(|r| r.year).max()?;
    Some((min..=max).collect())
}

/// Counts each distinct author once, in the year of their first publication.
pub fn population_series(records: &[PublicationRecord], labels: &AuthorLabels) -> PopulationSeries {
    let Some(years) = year_span(records) else {
        return PopulationSeries::default();
    };
    let mut debut: BTreeMap<&FullName, i32> = BTreeMap::new();
    for r in records {
        for a in &r.authors {
            debut
                .entry(a)
                .and_modify(|y| *y = (*y).min(r.year))
                .or_insert(r.year);
        }
    }
    let first = years[0];
    let mut new = vec![[0usize; L]; years.len()];
    for (name, year) in debut {
        new[(year - first) as usize][label_of(labels, name).index()] += 1;
    }
    let mut accumulated = Vec::with_capacity(years.len());
    let mut running = [0usize; L];
    for row in &new {
        for (acc, n) in running.iter_mut().zip(row) {
            *acc += n;
        }
        accumulated.push(running);
    }
    PopulationSeries {
        years,
        new,
        accumulated,
    }
}

/// Fractional publication counts: each of a paper's K authors earns 1/K.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct OutputSeries {
    pub years: Vec<i32>,
    pub values: Vec<[f64; L]>,
    pub papers: Vec<usize>,
}

impl OutputSeries {
    pub fn value(&self, year: i32, label: EthnicityLabel) -> f64 {
        self.years
            .binary_search(&year)
            .map_or(0.0, |i| self.values[i][label.index()])
    }

    pub fn papers_in(&self, year: i32) -> usize {
        self.years.binary_search(&year).map_or(0, |i| self.papers[i])
    }
}

pub fn output_series(records: &[PublicationRecord], labels: &AuthorLabels) -> OutputSeries {
    let Some(years) = year_span(records) else {
        return OutputSeries::default();
    };
    let first = years[0];
    let mut values = vec![[0.0f64; L]; years.len()];
    let mut papers = vec![0usize; years.len()];
    for r in records {
        let i = (r.year - first) as usize;
        papers[i] += 1;
        let share = 1.0 / r.authors.len() as f64;
        for a in &r.authors {
            values[i][label_of(labels, a).index()] += share;
        }
    }
    OutputSeries {
        years,
        values,
        papers,
    }
}

/// Logistic growth `P(t) = Pm / (1 + (Pm/P0 - 1) e^{-r (t - t0)})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticFit {
    pub p0: f64,
    pub pm: f64,
    pub r: f64,
    pub t0: f64,
    /// Sum of squared errors at the returned parameters.
    pub residual: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl LogisticFit {
    pub fn value(&self, t: f64) -> f64 {
        logistic(self.p0, self.pm, self.r, t - self.t0)
    }

    /// Time at which `P = Pm / 2` and growth is fastest.
    pub fn inflection_time(&self) -> f64 {
        self.t0 + (self.pm / self.p0 - 1.0).ln() / self.r
    }
}

fn logistic(p0: f64, pm: f64, r: f64, s: f64) -> f64 {
    pm / (1.0 + (pm / p0 - 1.0) * (-r * s).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticInit {
    pub p0: f64,
    pub pm: f64,
    pub r: f64,
}

pub const MIN_FIT_POINTS: usize = 4;
const MAX_ITERATIONS: usize = 1000;
const MAX_LOG_STEP: f64 = 0.5;

/// Parameters in log space: (ln P0, ln(Pm - P0), ln r).
fn unpack(theta: [f64; 3]) -> (f64, f64, f64) {
    let p0 = theta[0].exp();
    (p0, p0 + theta[1].exp(), theta[2].exp())
}

fn sse(points: &[(f64, f64)], t0: f64, theta: [f64; 3]) -> f64 {
    let (p0, pm, r) = unpack(theta);
    points
        .iter()
        .map(|&(t, y)| {
            let e = logistic(p0, pm, r, t - t0) - y;
            e * e
        })
        .sum()
}

/// Model value and its gradient with respect to the log parameters.
fn value_and_jacobian(theta: [f64; 3], s: f64) -> (f64, [f64; 3]) {
    let (p0, pm, r) = unpack(theta);
    let d = pm - p0;
    let e = (-r * s).exp();
    let q = d / p0;
    let den = 1.0 + q * e;
    let p = pm / den;
    let dp_dpm = 1.0 / den - pm * e / (p0 * den * den);
    let dp_dp0 = pm * pm * e / (p0 * p0 * den * den);
    let dp_dr = pm * q * s * e / (den * den);
    (p, [(dp_dp0 + dp_dpm) * p0, dp_dpm * d, dp_dr * r])
}

fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let mut m = [[0.0; 4]; 3];
    for i in 0..3 {
        m[i][..3].copy_from_slice(&a[i]);
        m[i][3] = b[i];
    }
    for col in 0..3 {
        let pivot = (col..3).max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))?;
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        for row in 0..3 {
            if row != col {
                let f = m[row][col] / m[col][col];
                for k in col..4 {
                    m[row][k] -= f * m[col][k];
                }
            }
        }
    }
    Some([m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]])
}

/// Least-squares logistic fit by damped Gauss-Newton (Levenberg-Marquardt)
/// in log-parameter space, with `t0` fixed to the first time point.
///
/// Points must be sorted by time with positive values. When the iteration
/// budget runs out the best parameters so far are returned with
/// `converged == false`.
pub fn fit_logistic(points: &[(f64, f64)], init: Option<LogisticInit>) -> Result<LogisticFit, BibliometricsError> {
    if points.len() < MIN_FIT_POINTS {
        return Err(BibliometricsError::TooFewPoints {
            min: MIN_FIT_POINTS,
            got: points.len(),
        });
    }
    if points.iter().any(|&(t, y)| !t.is_finite() || !(y > 0.0) || !y.is_finite()) {
        return Err(BibliometricsError::InvalidData("values must be positive and finite".into()));
    }
    if points.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(BibliometricsError::InvalidData("times must be strictly increasing".into()));
    }
    let first = points[0].1;
    if points.iter().all(|&(_, y)| y == first) {
        return Err(BibliometricsError::DegenerateData);
    }
    let t0 = points[0].0;
    let max = points.iter().map(|p| p.1).fold(f64::MIN, f64::max);
    let init = init.unwrap_or(LogisticInit {
        p0: first,
        pm: 2.0 * max,
        r: 0.1,
    });
    if !(init.p0 > 0.0 && init.pm > init.p0 && init.r > 0.0) {
        return Err(BibliometricsError::InvalidData(
            "initial guess needs 0 < P0 < Pm and r > 0".into(),
        ));
    }
    let mut theta = [init.p0.ln(), (init.pm - init.p0).ln(), init.r.ln()];
    let mut cost = sse(points, t0, theta);
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let mut jtj = [[0.0; 3]; 3];
        let mut jtr = [0.0; 3];
        for &(t, y) in points {
            let (p, j) = value_and_jacobian(theta, t - t0);
            let res = p - y;
            for a in 0..3 {
                jtr[a] += j[a] * res;
                for b in 0..3 {
                    jtj[a][b] += j[a] * j[b];
                }
            }
        }
        let grad_norm = jtr.iter().map(|g| g * g).sum::<f64>().sqrt();
        if grad_norm <= 1e-14 * (1.0 + cost) {
            converged = true;
            break;
        }
        let mut improved = false;
        while lambda < 1e16 {
            let mut a = jtj;
            for (k, row) in a.iter_mut().enumerate() {
                row[k] += lambda * jtj[k][k].max(1e-12);
            }
            let Some(mut step) = solve3(a, [-jtr[0], -jtr[1], -jtr[2]]) else {
                lambda *= 10.0;
                continue;
            };
            // Bound moves in log space so one step cannot jump to a flat region.
            let longest = step.iter().fold(0.0f64, |m, s| m.max(s.abs()));
            if longest > MAX_LOG_STEP {
                for s in step.iter_mut() {
                    *s *= MAX_LOG_STEP / longest;
                }
            }
            let trial = [theta[0] + step[0], theta[1] + step[1], theta[2] + step[2]];
            let trial_cost = sse(points, t0, trial);
            if trial_cost.is_finite() && trial_cost < cost {
                let rel_drop = (cost - trial_cost) / cost.max(f64::MIN_POSITIVE);
                let step_norm = step.iter().map(|s| s * s).sum::<f64>().sqrt();
                theta = trial;
                cost = trial_cost;
                lambda = (lambda / 3.0).max(1e-12);
                improved = true;
                if rel_drop < 1e-14 || step_norm < 1e-13 {
                    converged = true;
                }
                break;
            }
            lambda *= 4.0;
        }
        if !improved {
            // No decrease at any damping: a stationary point to precision.
            converged = true;
        }
        if converged {
            break;
        }
    }
    let (p0, pm, r) = unpack(theta);
    Ok(LogisticFit {
        p0,
        pm,
        r,
        t0,
        residual: cost,
        converged,
        iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Inflection {
    PreInflection,
    Near,
    PostInflection,
}

impl Inflection {
    pub fn as_str(self) -> &'static str {
        match self {
            Inflection::PreInflection => "pre-inflection",
            Inflection::Near => "near",
            Inflection::PostInflection => "post-inflection",
        }
    }
}

pub const DEFAULT_INFLECTION_BAND: f64 = 0.1;

/// Compares `P(t_last)` with the inflection value `Pm / 2`; within
/// `band * Pm` of it counts as near.
pub fn inflection_position(fit: &LogisticFit, t_last: f64, band: f64) -> Inflection {
    let offset = fit.value(t_last) - fit.pm / 2.0;
    if offset.abs() <= band * fit.pm {
        Inflection::Near
    } else if offset < 0.0 {
        Inflection::PreInflection
    } else {
        Inflection::PostInflection
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RatioWindow {
    /// Unique names from the venue's first year up to each year.
    #[default]
    Cumulative,
    PerYear,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VenueRatioPoint {
    pub venue: String,
    pub year: i32,
    pub count_a: usize,
    pub count_b: usize,
    /// Unique names of any label in the same window.
    pub size: usize,
    /// `count_a / count_b`; `None` when `count_b == 0`.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct VenueRatioSeries {
    pub points: Vec<VenueRatioPoint>,
    /// Requested venues with no publications.
    pub missing_venues: Vec<String>,
}

pub fn asian_group() -> BTreeSet<EthnicityLabel> {
    use EthnicityLabel::*;
    [Chi, Jap, Kor, Vie, Ind, Ara].into_iter().collect()
}

pub fn european_group() -> BTreeSet<EthnicityLabel> {
    use EthnicityLabel::*;
    [Eng, Ger, Frn, Spa, Rus, Ita].into_iter().collect()
}

/// Ratio of unique group-A names to unique group-B names per venue and
/// year. Venue keys match case-insensitively; one row per year in which
/// the venue has publications.
pub fn venue_ratio_series(
    records: &[PublicationRecord],
    labels: &AuthorLabels,
    group_a: &BTreeSet<EthnicityLabel>,
    group_b: &BTreeSet<EthnicityLabel>,
    venues: &[String],
    window: RatioWindow,
) -> Result<VenueRatioSeries, BibliometricsError> {
    if group_a.is_empty() || group_b.is_empty() || !group_a.is_disjoint(group_b) {
        return Err(BibliometricsError::BadGroups);
    }
    let mut out = VenueRatioSeries::default();
    for venue in venues {
        let key = venue.to_lowercase();
        let mut by_year: BTreeMap<i32, BTreeSet<&FullName>> = BTreeMap::new();
        for r in records.iter().filter(|r| r.venue.to_lowercase() == key) {
            by_year.entry(r.year).or_default().extend(r.authors.iter());
        }
        if by_year.is_empty() {
            log::warn!("venue {venue:?} has no publications");
            out.missing_venues.push(venue.clone());
            continue;
        }
        let mut cumulative: BTreeSet<&FullName> = BTreeSet::new();
        for (year, names) in by_year {
            let window_names = match window {
                RatioWindow::Cumulative => {
                    cumulative.extend(names);
                    cumulative.clone()
                }
                RatioWindow::PerYear => names,
            };
            let (mut a, mut b) = (0, 0);
            for n in &window_names {
                let l = label_of(labels, n);
                a += group_a.contains(&l) as usize;
                b += group_b.contains(&l) as usize;
            }
            out.points.push(VenueRatioPoint {
                venue: venue.clone(),
                year,
                count_a: a,
                count_b: b,
                size: window_names.len(),
                ratio: (b > 0).then(|| a as f64 / b as f64),
            });
        }
    }
    Ok(out)
}

pub(crate) fn to_csv<F>(header: &[&str], fill: F) -> String
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    fill(&mut w).expect("in-memory write");
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

/// Columns: year, label, new, accumulated.
pub fn population_csv(series: &PopulationSeries) -> String {
    to_csv(&["year", "label", "new", "accumulated"], |w| {
        for (i, &y) in series.years.iter().enumerate() {
            for l in EthnicityLabel::ALL {
                w.write_record([
                    y.to_string(),
                    l.code().to_string(),
                    series.new[i][l.index()].to_string(),
                    series.accumulated[i][l.index()].to_string(),
                ])?;
            }
        }
        Ok(())
    })
}

/// Columns: year, label, value, papers.
pub fn output_csv(series: &OutputSeries) -> String {
    to_csv(&["year", "label", "value", "papers"], |w| {
        for (i, &y) in series.years.iter().enumerate() {
            for l in EthnicityLabel::ALL {
                w.write_record([
                    y.to_string(),
                    l.code().to_string(),
                    series.values[i][l.index()].to_string(),
                    series.papers[i].to_string(),
                ])?;
            }
        }
        Ok(())
    })
}

/// Columns: group, venue, year, count_a, count_b, size, ratio (empty when
/// undefined).
pub fn venue_ratio_csv(rows: &[(String, VenueRatioSeries)]) -> String {
    to_csv(
        &["group", "venue", "year", "count_a", "count_b", "size", "ratio"],
        |w| {
            for (group, series) in rows {
                for p in &series.points {
                    w.write_record([
                        group.clone(),
                        p.venue.clone(),
                        p.year.to_string(),
                        p.count_a.to_string(),
                        p.count_b.to_string(),
                        p.size.to_string(),
                        p.ratio.map(|r| r.to_string()).unwrap_or_default(),
                    ])?;
                }
            }
            Ok(())
        },
    )
}
