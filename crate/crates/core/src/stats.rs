//! Files-per-author distribution statistics.

use std::cmp::Ordering;

use serde::Serialize;

use crate::doa::AuthorshipMap;
use crate::error::{Error, Result};
use crate::ingest::DevIdx;
use crate::subsystem::Scope;

/// Files authored per author within a scope, ascending. Authors with no
/// authored file in the scope are not part of the sample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WorkloadSample(Vec<u64>);

impl WorkloadSample {
    pub fn new(mut counts: Vec<u64>) -> Self {
        counts.sort_unstable();
        Self(counts)
    }

    pub fn counts(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&c| c as f64).collect()
    }
}

pub fn files_per_author(map: &AuthorshipMap, scope: &Scope<'_>) -> WorkloadSample {
    WorkloadSample::new(
        map.authored_counts(scope)
            .into_values()
            .map(|c| c as u64)
            .collect(),
    )
}

fn sorted(values: &[f64]) -> Result<Vec<f64>> {
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::domain("sample contains NaN"));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Linear interpolation at rank `(n - 1) * p` between neighbouring order statistics.
pub fn quantile(values: &[f64], p: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::domain("quantile of an empty sample"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("quantile level {p} outside [0, 1]")));
    }
    Ok(quantile_sorted(&sorted(values)?, p))
}

fn median_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Medcouple: median of the kernel `((xj - m) - (m - xi)) / (xj - xi)` over
/// pairs `xi <= m <= xj`. Pairs where both values equal the median take
/// `sign(p - 1 - i - j)`, with `i`, `j` indexing the `p` tied values.
/// Quadratic; fine for the sample sizes seen here.
pub fn medcouple(values: &[f64]) -> Result<f64> {
    let n = values.len();
    if n < 3 {
        return Err(Error::domain(format!("medcouple needs at least 3 values, got {n}")));
    }
    let x = sorted(values)?;
    if x[0] == x[n - 1] {
        return Ok(0.0);
    }
    let m = median_sorted(&x);
    let lower: Vec<f64> = x.iter().copied().filter(|&v| v < m).collect();
    let upper: Vec<f64> = x.iter().copied().filter(|&v| v > m).collect();
    let ties = x.iter().filter(|&&v| v == m).count();

    let mut kernel = Vec::with_capacity((lower.len() + ties) * (upper.len() + ties));
    for &xi in &lower {
        for &xj in &upper {
            kernel.push(((xj - m) - (m - xi)) / (xj - xi));
        }
    }
    // a median-valued point against a strictly larger or smaller one
    kernel.extend(std::iter::repeat_n(1.0, ties * upper.len()));
    kernel.extend(std::iter::repeat_n(-1.0, ties * lower.len()));
    for i in 0..ties {
        for j in 0..ties {
            let s = (ties as i64 - 1 - i as i64 - j as i64).signum();
            kernel.push(s as f64);
        }
    }
    kernel.sort_by(f64::total_cmp);
    Ok(median_sorted(&kernel))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdjustedFences {
    pub q1: f64,
    pub q3: f64,
    pub medcouple: f64,
    pub lower: f64,
    pub upper: f64,
}

impl AdjustedFences {
    pub fn is_outlier(&self, value: f64) -> bool {
        value < self.lower || value > self.upper
    }
}

/// Skewness-adjusted boxplot fences (medcouple-scaled whiskers).
pub fn adjusted_fences(values: &[f64]) -> Result<AdjustedFences> {
    let mc = medcouple(values)?;
    let x = sorted(values)?;
    let q1 = quantile_sorted(&x, 0.25);
    let q3 = quantile_sorted(&x, 0.75);
    let iqr = q3 - q1;
    let (lo_scale, hi_scale) = if mc >= 0.0 {
        ((-4.0 * mc).exp(), (3.0 * mc).exp())
    } else {
        ((-3.0 * mc).exp(), (4.0 * mc).exp())
    };
    Ok(AdjustedFences {
        q1,
        q3,
        medcouple: mc,
        lower: q1 - 1.5 * lo_scale * iqr,
        upper: q3 + 1.5 * hi_scale * iqr,
    })
}

/// Gini coefficient, population form: `sum |xi - xj| / (2 n^2 mean)`.
///
/// Evaluated through the sorted-rank identity
/// `sum (2i - n - 1) x(i) / (n sum x)`, which is exact for integer samples.
pub fn gini(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::domain("gini of an empty sample"));
    }
    if values.iter().any(|&v| v < 0.0) {
        return Err(Error::domain("gini needs non-negative values"));
    }
    let x = sorted(values)?;
    let n = x.len() as f64;
    let total: f64 = x.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::domain("gini of a sample with zero mean"));
    }
    let weighted: f64 = x
        .iter()
        .enumerate()
        .map(|(i, &v)| (2.0 * (i + 1) as f64 - n - 1.0) * v)
        .sum();
    Ok(weighted / (n * total))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedAuthor {
    pub developer: DevIdx,
    pub files: usize,
    pub share: f64,
}

/// Shares of the scope's live files owned by the top authors. Shares are
/// fractions of the live files in scope and may sum above one because a file
/// can have several authors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopKShare {
    pub ranking: Vec<RankedAuthor>,
    pub top1_share: f64,
    pub next_share: f64,
    /// Set when the scope has fewer than `k` authors.
    pub truncated: bool,
}

impl TopKShare {
    pub fn cumulative(&self) -> f64 {
        self.top1_share + self.next_share
    }
}

pub fn top_k_share(map: &AuthorshipMap, scope: &Scope<'_>, k: usize) -> Result<TopKShare> {
    if k == 0 {
        return Err(Error::domain("k must be positive"));
    }
    let live = map.files_in(scope).count();
    if live == 0 {
        return Err(Error::domain(format!("scope {} has no live files", scope.name())));
    }
    let mut ranking: Vec<(DevIdx, usize)> = map.authored_counts(scope).into_iter().collect();
    ranking.sort_by(|a, b| match b.1.cmp(&a.1) {
        Ordering::Equal => map.developer(a.0).cmp(map.developer(b.0)),
        other => other,
    });
    let truncated = ranking.len() < k;
    ranking.truncate(k);
    let ranking: Vec<RankedAuthor> = ranking
        .into_iter()
        .map(|(developer, files)| RankedAuthor {
            developer,
            files,
            share: files as f64 / live as f64,
        })
        .collect();
    let top1_share = ranking.first().map_or(0.0, |r| r.share);
    let next_share = ranking.iter().skip(1).map(|r| r.share).sum();
    Ok(TopKShare {
        ranking,
        top1_share,
        next_share,
        truncated,
    })
}
