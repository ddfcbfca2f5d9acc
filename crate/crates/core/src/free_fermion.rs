//! Closed-form channel for the cluster ring: quasiparticle dispersion, the
//! many-body gap, the thermodynamic-limit `C^zz` correlator and the
//! correlation-length fit shared with the entanglement channel.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate, QuadratureConfig};

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Dispersion {
    pub b_field: f64,
}

impl Dispersion {
    pub fn new(b_field: f64) -> Self {
        Self { b_field }
    }

    /// `Lambda(r) = sqrt(B^2 + 1 + 2 B cos r)`.
    pub fn eval(&self, r: f64) -> f64 {
        let b = self.b_field;
        (b * b + 1.0 + 2.0 * b * r.cos()).max(0.0).sqrt()
    }

    pub fn min(&self) -> f64 {
        (self.b_field.abs() - 1.0).abs()
    }
}

/// Many-body gap `2 min_r Lambda(r) = 2 ||B| - 1|`.
pub fn energy_gap(b_field: f64) -> f64 {
    2.0 * Dispersion::new(b_field).min()
}

/// `C^zz` between spins `1` and `l` in the infinite chain.
pub fn czz_analytic(b_field: f64, l: usize) -> Result<f64> {
    czz_analytic_with(b_field, l, &QuadratureConfig::default())
}

pub fn czz_analytic_with(b_field: f64, l: usize, cfg: &QuadratureConfig) -> Result<f64> {
    if l < 2 {
        return Err(domain(alloc::format!("separation must satisfy L >= 2, got {l}")));
    }
    if !b_field.is_finite() {
        return Err(domain("field must be finite"));
    }
    let disp = Dispersion::new(b_field);
    let m = (l as f64 - 1.0) / 2.0;
    let [s, c] = integrate(
        |r| {
            let lam = disp.eval(r);
            if lam == 0.0 {
                return [0.0, 0.0];
            }
            [r.sin() / lam * (m * r).sin(), (b_field + r.cos()) / lam * (m * r).cos()]
        },
        &[-2.0 * PI, -PI, 0.0, PI, 2.0 * PI],
        cfg,
    )?;
    let (s, c) = (s / (4.0 * PI), c / (4.0 * PI));
    Ok((s - c) * (s + c))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum CorrelationKind {
    ZzAnalytic,
    ZzEd,
    Generic,
}

/// Values indexed by separation `L` (strictly increasing).
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationSeries {
    separations: Vec<usize>,
    values: Vec<f64>,
    kind: CorrelationKind,
}

impl CorrelationSeries {
    pub fn new(separations: Vec<usize>, values: Vec<f64>, kind: CorrelationKind) -> Result<Self> {
        if separations.len() != values.len() {
            return Err(domain(alloc::format!(
                "{} separations but {} values",
                separations.len(),
                values.len()
            )));
        }
        if separations.windows(2).any(|w| w[1] <= w[0]) {
            return Err(domain("separations must be strictly increasing"));
        }
        Ok(Self {
            separations,
            values,
            kind,
        })
    }

    pub fn separations(&self) -> &[usize] {
        &self.separations
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> CorrelationKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `czz_analytic` at every separation in `ls`.
pub fn czz_series(b_field: f64, ls: impl IntoIterator<Item = usize>) -> Result<CorrelationSeries> {
    let separations: Vec<usize> = ls.into_iter().collect();
    let values = separations
        .iter()
        .map(|&l| czz_analytic(b_field, l))
        .collect::<Result<Vec<_>>>()?;
    CorrelationSeries::new(separations, values, CorrelationKind::ZzAnalytic)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum LengthModel {
    Exponential,
    PowerLaw,
    /// The series does not decay within the window.
    Saturating,
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct LengthEstimate {
    /// `f64::INFINITY` unless the model is exponential.
    pub xi: f64,
    /// Sum of squared residuals of the selected fit, in `log|C|`.
    pub fit_residual: f64,
    pub window: (usize, usize),
    pub model: LengthModel,
}

impl LengthEstimate {
    pub fn diverges(&self) -> bool {
        self.xi.is_infinite()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitConfig {
    pub noise_floor: f64,
    pub min_points: usize,
    /// Lower edge of the fit window is `max(min_window_start, L_max / 2)`.
    pub min_window_start: usize,
    /// Power law is chosen when its residual is smaller by at least this factor.
    pub power_law_ratio: f64,
    /// Decay lengths longer than this multiple of the largest separation in
    /// the window cannot be resolved and count as saturation.
    pub saturation_factor: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            noise_floor: 1e-13,
            min_points: 5,
            min_window_start: 4,
            power_law_ratio: 4.0,
            saturation_factor: 3.0,
        }
    }
}

/// `(slope, intercept, sum of squared residuals)` of an ordinary least-squares line.
pub(crate) fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let icept = my - slope * mx;
    let ssr = x.iter().zip(y).map(|(a, b)| (b - icept - slope * a).powi(2)).sum();
    (slope, icept, ssr)
}

/// Decay length of `|C(L)|` from a least-squares fit of `log|C|` against `L`
/// over the large-`L` window, `xi = -1/slope`.
///
/// Points at or below the noise floor are dropped before windowing. When
/// fewer than `min_points` remain in the window the last `min_points`
/// surviving points are used instead. A fitted length beyond
/// `saturation_factor` times the largest separation is reported as
/// saturating.
pub fn correlation_length(series: &CorrelationSeries, cfg: &FitConfig) -> Result<LengthEstimate> {
    let pts: Vec<(usize, f64)> = series
        .separations()
        .iter()
        .zip(series.values())
        .filter(|(_, v)| v.abs() > cfg.noise_floor)
        .map(|(&l, v)| (l, v.abs()))
        .collect();
    if pts.is_empty() {
        return Err(Error::NumericallyZero);
    }
    if pts.len() < cfg.min_points {
        return Err(Error::InsufficientData {
            needed: cfg.min_points,
            found: pts.len(),
        });
    }
    let l_max = pts[pts.len() - 1].0;
    let l_min = cfg.min_window_start.max(l_max / 2);
    let mut window: Vec<(usize, f64)> = pts.iter().copied().filter(|p| p.0 >= l_min).collect();
    if window.len() < cfg.min_points {
        window = pts[pts.len() - cfg.min_points..].to_vec();
    }
    let ls: Vec<f64> = window.iter().map(|p| p.0 as f64).collect();
    let logs: Vec<f64> = ls.iter().map(|l| l.ln()).collect();
    let y: Vec<f64> = window.iter().map(|p| p.1.ln()).collect();
    let (slope, _, exp_res) = linear_fit(&ls, &y);
    let (_, _, pow_res) = linear_fit(&logs, &y);
    let span = (window[0].0, window[window.len() - 1].0);

    let resolvable = slope < 0.0 && -1.0 / slope <= cfg.saturation_factor * span.1 as f64;
    let (model, xi, fit_residual) = if !resolvable {
        (LengthModel::Saturating, f64::INFINITY, exp_res)
    } else if pow_res * cfg.power_law_ratio <= exp_res {
        (LengthModel::PowerLaw, f64::INFINITY, pow_res)
    } else {
        (LengthModel::Exponential, -1.0 / slope, exp_res)
    };
    Ok(LengthEstimate {
        xi,
        fit_residual,
        window: span,
        model,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn series(ls: impl Iterator<Item = usize>, f: impl Fn(f64) -> f64) -> CorrelationSeries {
        let ls: Vec<usize> = ls.collect();
        let v = ls.iter().map(|&l| f(l as f64)).collect();
        CorrelationSeries::new(ls, v, CorrelationKind::Generic).unwrap()
    }

    #[test]
    fn dispersion_bounds() {
        for &b in &[0.0, 0.4, 1.0, -1.3, 2.5] {
            let d = Dispersion::new(b);
            for k in 0..=200 {
                let r = -PI + 2.0 * PI * k as f64 / 200.0;
                assert!(d.eval(r) >= d.min() - 1e-12);
                assert!((d.eval(r) - d.eval(-r)).abs() < 1e-14);
            }
        }
        assert!((Dispersion::new(0.7).eval(PI) - 0.3).abs() < 1e-14);
        assert_eq!(Dispersion::new(0.0).eval(1.234), 1.0);
    }

    #[test]
    fn gap_values() {
        assert_eq!(energy_gap(0.0), 2.0);
        assert_eq!(energy_gap(1.0), 0.0);
        assert_eq!(energy_gap(-1.0), 0.0);
        assert_eq!(energy_gap(0.7), energy_gap(-0.7));
    }

    #[test]
    fn zero_field_correlator_vanishes() {
        for l in 2..10 {
            assert!(czz_analytic(0.0, l).unwrap().abs() < 1e-14, "L = {l}");
        }
    }

    #[test]
    fn golden_values() {
        // independent adaptive quadrature of the same integrals
        let cases = [(0.5, 3, 0.031270), (0.5, 5, 0.0019182), (0.5, 7, 0.00022438)];
        for (b, l, want) in cases {
            let got = czz_analytic(b, l).unwrap();
            assert!((got - want).abs() < 5e-5 * want, "L = {l}: {got}");
        }
        let t = czz_analytic(0.5, 33).unwrap();
        assert!((t - 1.37294334195824e-13).abs() < 1e-16);
    }

    #[test]
    fn even_separations_vanish() {
        for l in [2, 4, 6, 10] {
            assert!(czz_analytic(0.6, l).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn even_in_field() {
        for l in [3, 5, 9] {
            let a = czz_analytic(0.8, l).unwrap();
            let b = czz_analytic(-0.8, l).unwrap();
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_short_separation() {
        assert!(czz_analytic(0.5, 1).is_err());
    }

    #[test]
    fn exponential_synthetic() {
        let e = correlation_length(&series(1..30, |l| (-l / 3.0).exp()), &FitConfig::default()).unwrap();
        assert_eq!(e.model, LengthModel::Exponential);
        assert!((e.xi - 3.0).abs() < 1e-6);
    }

    #[test]
    fn power_law_synthetic() {
        let e = correlation_length(&series(1..30, |l| l.powi(-2)), &FitConfig::default()).unwrap();
        assert_eq!(e.model, LengthModel::PowerLaw);
        assert!(e.diverges());
    }

    #[test]
    fn constant_saturates() {
        let e = correlation_length(&series(2..10, |_| 0.93), &FitConfig::default()).unwrap();
        assert_eq!(e.model, LengthModel::Saturating);
        assert!(e.diverges());
    }

    #[test]
    fn zero_and_sparse_series() {
        assert_eq!(
            correlation_length(&series(1..10, |_| 0.0), &FitConfig::default()),
            Err(Error::NumericallyZero)
        );
        assert!(matches!(
            correlation_length(&series(1..4, |l| (-l).exp()), &FitConfig::default()),
            Err(Error::InsufficientData { found: 3, .. })
        ));
    }

    #[test]
    fn window_uses_large_separations() {
        let e = correlation_length(&series(4..41, |l| (-l / 5.0).exp()), &FitConfig::default()).unwrap();
        assert_eq!(e.window, (20, 40));
    }

    #[test]
    fn series_validation() {
        assert!(CorrelationSeries::new(vec![3, 3], vec![1.0, 1.0], CorrelationKind::Generic).is_err());
        assert!(CorrelationSeries::new(vec![3], vec![], CorrelationKind::Generic).is_err());
    }

    #[test]
    fn critical_point_is_power_law() {
        let fit = |b: f64| correlation_length(&czz_series(b, 4..=40).unwrap(), &FitConfig::default()).unwrap();
        assert_eq!(fit(1.0).model, LengthModel::PowerLaw);
        assert_eq!(fit(0.5).model, LengthModel::Exponential);
        assert_eq!(fit(2.0).model, LengthModel::Exponential);
    }
}
