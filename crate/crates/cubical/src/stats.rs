//! Small statistics toolkit: compensated sums, step functions on `[0, 1]`,
//! the standard normal distribution function, and the Kolmogorov-Smirnov
//! distance used to score empirical normality.

/// Compensated sum (Neumaier's variant, which also survives cancellation of
/// large opposite terms). The fold order is the iteration order, so results
/// are reproducible whenever the input order is.
pub fn kahan_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut compensation = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            compensation += (sum - t) + v;
        } else {
            compensation += (v - t) + sum;
        }
        sum = t;
    }
    sum + compensation
}

/// Sample mean and standard deviation (denominator `n - 1`); the deviation
/// is zero for fewer than two samples.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = kahan_sum(values.iter().copied()) / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss = kahan_sum(values.iter().map(|v| (v - mean) * (v - mean)));
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Right-continuous real step function on `[0, 1]`, zero before its first
/// breakpoint and constant after the last.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction {
    points: Vec<(f64, f64)>,
}

impl StepFunction {
    /// `points` must have strictly increasing abscissae.
    pub fn new(points: Vec<(f64, f64)>) -> Self {
        debug_assert!(points.windows(2).all(|w| w[0].0 < w[1].0));
        Self { points }
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn value_at(&self, t: f64) -> f64 {
        match self.points.binary_search_by(|probe| probe.0.total_cmp(&t)) {
            Ok(i) => self.points[i].1,
            Err(0) => 0.0,
            Err(i) => self.points[i - 1].1,
        }
    }

    /// Pointwise average of many step functions, exact at every breakpoint.
    pub fn average(funcs: &[StepFunction]) -> StepFunction {
        assert!(!funcs.is_empty(), "average of no functions");
        let mut grid: Vec<f64> = funcs
            .iter()
            .flat_map(|f| f.points.iter().map(|&(t, _)| t))
            .collect();
        grid.sort_unstable_by(f64::total_cmp);
        grid.dedup();
        let inv = 1.0 / funcs.len() as f64;
        let mut cursors = vec![0usize; funcs.len()];
        let mut values = vec![0.0f64; funcs.len()];
        let mut points = Vec::with_capacity(grid.len());
        for &t in &grid {
            for (f, (cursor, value)) in funcs.iter().zip(cursors.iter_mut().zip(values.iter_mut()))
            {
                while *cursor < f.points.len() && f.points[*cursor].0 <= t {
                    *value = f.points[*cursor].1;
                    *cursor += 1;
                }
            }
            points.push((t, kahan_sum(values.iter().copied()) * inv));
        }
        StepFunction::new(points)
    }

    /// Exact supremum of `|a - b|`, evaluated over the union of breakpoints
    /// (step functions attain their sup there).
    pub fn sup_abs_diff(a: &StepFunction, b: &StepFunction) -> f64 {
        let mut grid: Vec<f64> = a
            .points
            .iter()
            .chain(b.points.iter())
            .map(|&(t, _)| t)
            .collect();
        grid.sort_unstable_by(f64::total_cmp);
        grid.dedup();
        let mut sup = 0.0f64;
        for &t in &grid {
            sup = sup.max((a.value_at(t) - b.value_at(t)).abs());
        }
        sup
    }

    pub fn max_value(&self) -> f64 {
        self.points.iter().map(|&(_, v)| v).fold(0.0, f64::max)
    }

    /// Largest jump between consecutive values, counting the initial rise
    /// from zero.
    pub fn max_jump(&self) -> f64 {
        let mut prev = 0.0;
        let mut jump = 0.0f64;
        for &(_, v) in &self.points {
            jump = jump.max((v - prev).abs());
            prev = v;
        }
        jump
    }

    /// Integral over `[0, 1]` (compensated float arithmetic).
    pub fn integral(&self) -> f64 {
        let mut segments = Vec::with_capacity(self.points.len());
        for (i, &(t, v)) in self.points.iter().enumerate() {
            let end = self.points.get(i + 1).map_or(1.0, |&(next, _)| next);
            segments.push(v * (end - t));
        }
        kahan_sum(segments)
    }
}

/// Standard normal distribution function, double precision (Hart's rational
/// approximations; absolute error well below 1e-12).
pub fn standard_normal_cdf(x: f64) -> f64 {
    let z = x.abs();
    let c = if z > 37.0 {
        0.0
    } else {
        let e = (-z * z / 2.0).exp();
        if z < 7.071_067_811_865_475 {
            let num = (((((3.526_249_659_989_11e-2 * z + 0.700_383_064_443_688) * z
                + 6.373_962_203_531_65)
                * z
                + 33.912_866_078_383)
                * z
                + 112.079_291_497_871)
                * z
                + 221.213_596_169_931)
                * z
                + 220.206_867_912_376;
            let den = ((((((8.838_834_764_831_84e-2 * z + 1.755_667_163_182_64) * z
                + 16.064_177_579_207)
                * z
                + 86.780_732_202_946_1)
                * z
                + 296.564_248_779_674)
                * z
                + 637.333_633_378_831)
                * z
                + 793.826_512_519_948)
                * z
                + 440.413_735_824_752;
            e * num / den
        } else {
            let b = z + 0.65;
            let b = z + 4.0 / b;
            let b = z + 3.0 / b;
            let b = z + 2.0 / b;
            let b = z + 1.0 / b;
            e / (b * 2.506_628_274_631_000_5)
        }
    };
    if x > 0.0 {
        1.0 - c
    } else {
        c
    }
}

/// Two-sided Kolmogorov-Smirnov distance between an empirical sample and
/// the standard normal law.
pub fn ks_distance_standard_normal(samples: &[f64]) -> f64 {
    assert!(!samples.is_empty(), "KS distance of an empty sample");
    let mut sorted = samples.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let phi = standard_normal_cdf(x);
        d = d.max(phi - i as f64 / n);
        d = d.max((i + 1) as f64 / n - phi);
    }
    d
}
