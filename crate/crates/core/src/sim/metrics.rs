use super::TrialRecord;

/// z-score of a two-sided 95% interval.
const Z95: f64 = 1.959_963_984_540_054;

/// Below this many events the Wilson interval replaces the normal one.
const WILSON_BELOW: usize = 20;

/// Aggregate error rates over a set of trials.
#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub trials: usize,
    pub p_md: f64,
    pub p_fa: f64,
    /// `p_md + p_fa`.
    pub pe: f64,
    pub md_half_width: f64,
    pub fa_half_width: f64,
    /// Half-width on `pe`, the sum of the two component half-widths.
    pub ci_half_width: f64,
    pub misdetections: usize,
    pub targets: usize,
    pub false_alarms: usize,
    pub decoded: usize,
}

/// `p_md = Σ md / Σ targets`, `p_fa = Σ fa / Σ |L|`, with `0/0 = 0`.
pub fn compute_metrics(records: &[TrialRecord]) -> Metrics {
    let misdetections: usize = records.iter().map(|r| r.misdetections).sum();
    let targets: usize = records.iter().map(|r| r.targets).sum();
    let false_alarms: usize = records.iter().map(|r| r.false_alarms).sum();
    let decoded: usize = records.iter().map(|r| r.decoded.len()).sum();
    let p_md = ratio(misdetections, targets);
    let p_fa = ratio(false_alarms, decoded);
    let md_half_width = half_width(misdetections, targets);
    let fa_half_width = half_width(false_alarms, decoded);
    Metrics {
        trials: records.len(),
        p_md,
        p_fa,
        pe: p_md + p_fa,
        md_half_width,
        fa_half_width,
        ci_half_width: md_half_width + fa_half_width,
        misdetections,
        targets,
        false_alarms,
        decoded,
    }
}

fn ratio(events: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        events as f64 / total as f64
    }
}

/// 95% half-width of a binomial proportion: normal approximation, or Wilson
/// when either outcome has fewer than 20 occurrences.
pub fn half_width(events: usize, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    let p = events as f64 / n;
    if events < WILSON_BELOW || total - events < WILSON_BELOW {
        let z2 = Z95 * Z95;
        Z95 / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt()
    } else {
        Z95 * (p * (1.0 - p) / n).sqrt()
    }
}
