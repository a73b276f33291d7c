use std::f64::consts::LN_10;

use c3rotor::{
    build_block, characteristic, complex_pair_continuation, ep_scan, find_exceptional_point, real_spectrum_st,
    solve_spectrum, Coupling, DoubleDouble, ExceptionalPoint, Real, SymmetrySpecies,
};

use crate::config::FigureArgs;
use crate::error::CliError;
use crate::report::{Cell, Report};
use crate::svg::{Plot, Series, Style};

const FIG1_LAMBDA: &str = "0.1";
const FIG3_G_MAX: f64 = 8.0;
const FIG3_STEPS: usize = 800;
const FIG4_G_MAX: f64 = 40.0;
const FIG4_STEPS: usize = 160;

pub(crate) fn figure(args: &FigureArgs) -> Result<Report, CliError> {
    let id = args.id.ok_or_else(|| CliError::usage("missing --id (1 to 4)"))?;
    let lambda_max = args.lambda_max.unwrap_or(100.0);
    if !(lambda_max > 0.0 && lambda_max <= 1000.0) {
        return Err(CliError::usage("--lambda-max must lie in (0, 1000]"));
    }
    let (report, plot) = match id {
        1 => figure1()?,
        2 => figure2(lambda_max)?,
        3 => figure3()?,
        4 => figure4()?,
        _ => return Err(CliError::usage(format!("--id must be 1, 2, 3 or 4, got {id}"))),
    };
    if let Some(path) = &args.plot {
        std::fs::write(path, plot.render()).map_err(|e| CliError::Io(path.display().to_string(), e.to_string()))?;
    }
    Ok(report)
}

/// `sign(D) · log10(1 + |D|)` from the scaled representation.
fn compress(mantissa_sign: i8, log10_abs: f64) -> f64 {
    if mantissa_sign == 0 {
        return 0.0;
    }
    let mag = if log10_abs > 15.0 { log10_abs } else { 10f64.powf(log10_abs).ln_1p() / LN_10 };
    mantissa_sign as f64 * mag
}

/// Characteristic value of the unsplit A block at λ = 0.1 over [-2, 45].
/// A uniform 0.01 grid misses the 5e-10 splitting near 36, so every root
/// also gets a sample just below and just above it, closer than half the
/// distance to its neighbours.
fn figure1() -> Result<(Report, Plot), CliError> {
    type T = DoubleDouble;
    let lambda: T = FIG1_LAMBDA.parse().expect("literal");
    let tol: T = "1e-26".parse().expect("literal");
    let species = SymmetrySpecies::RawA;
    let roots = solve_spectrum(species, Coupling::real(lambda), 5, tol)?;
    let block = build_block(species, Coupling::real(lambda), roots.truncation_used)?;
    let hundred = T::of_int(100);
    let mut xs: Vec<T> = (0..=4700).map(|i| T::of_int(i) / hundred - T::of_int(2)).collect();
    let values = roots.values();
    for (i, &root) in values.iter().enumerate() {
        let mut reach: T = "1e-4".parse().expect("literal");
        for j in [i.wrapping_sub(1), i + 1] {
            if let Some(&other) = values.get(j) {
                reach = reach.min((other - root).abs() / T::of_int(4));
            }
        }
        xs.push(root - reach);
        xs.push(root + reach);
    }
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
    xs.dedup();

    let mut r = Report::new("figure", &["eps", "value"]);
    r.meta("figure", Cell::Int(1))
        .meta("species", Cell::Text(species.label().into()))
        .meta("lambda", Cell::Exact(FIG1_LAMBDA.into()))
        .meta("transform", Cell::Text("sign(D)*log10(1+|D|)".into()))
        .meta("truncation", Cell::Int(roots.truncation_used as i64))
        .meta("working_digits", Cell::Int(T::DIGITS as i64));
    let mut pts = Vec::with_capacity(xs.len());
    for &x in &xs {
        let cv = characteristic(&block, x);
        let v = compress(cv.sign(), cv.log10_abs());
        r.push(vec![Cell::Float(x.approx()), Cell::Float(v)]);
        pts.push((x.approx(), v));
    }
    let plot = Plot {
        title: format!("Scaled characteristic value, lambda = {FIG1_LAMBDA}"),
        x_label: "eps".into(),
        y_label: "sign(D) log10(1+|D|)".into(),
        series: vec![Series::new("rawA", Style::Line, pts)],
    };
    Ok((r, plot))
}

/// Lowest E and A levels shifted by the barrier, `ε(λ) + λ`.
fn figure2(lambda_max: f64) -> Result<(Report, Plot), CliError> {
    const K: usize = 4;
    let cols = ["lambda", "E0", "E1", "E2", "E3", "A0", "A1", "A2", "A3"];
    let mut r = Report::new("figure", &cols);
    r.meta("figure", Cell::Int(2))
        .meta("lambda_max", Cell::Float(lambda_max))
        .meta("shift", Cell::Text("eps+lambda".into()))
        .meta("A_levels", Cell::Text("A+ and A- merged".into()));
    let mut curves = vec![Vec::new(); 2 * K];
    for i in 0..=100 {
        let lambda = lambda_max * i as f64 / 100.0;
        let c = Coupling::real(lambda);
        let e = solve_spectrum(SymmetrySpecies::EA, c, K, 1e-10)?.values();
        let mut a = solve_spectrum(SymmetrySpecies::APlus, c, K, 1e-10)?.values();
        a.extend(solve_spectrum(SymmetrySpecies::AMinus, c, K, 1e-10)?.values());
        a.sort_by(f64::total_cmp);
        let mut row = vec![Cell::Float(lambda)];
        for (j, v) in e.iter().chain(a.iter().take(K)).enumerate() {
            row.push(Cell::Float(v + lambda));
            curves[j].push((lambda, v + lambda));
        }
        r.push(row);
    }
    let series = curves
        .into_iter()
        .enumerate()
        .map(|(j, pts)| {
            let style = if j < K { Style::Line } else { Style::Dashed };
            Series::new(cols[j + 1], style, pts)
        })
        .collect();
    let plot = Plot {
        title: "Lowest levels eps(lambda) + lambda".into(),
        x_label: "lambda".into(),
        y_label: "eps + lambda".into(),
        series,
    };
    Ok((r, plot))
}

fn first_exceptional_point(species: SymmetrySpecies, range: (f64, f64)) -> Result<ExceptionalPoint<f64>, CliError> {
    let seeds = ep_scan(species, range, 0.05, 2)?;
    let seed = seeds
        .iter()
        .find(|s| s.pair == (0, 1))
        .ok_or(CliError::Numerical(c3rotor::Error::ScanExhausted))?;
    Ok(find_exceptional_point(species, (0, 1), seed, 13)?)
}

/// Real and imaginary parts of the two lowest levels at `g`.
fn lowest_pair(species: SymmetrySpecies, ep: &ExceptionalPoint<f64>, g: f64) -> Result<[(f64, f64); 2], CliError> {
    if g >= ep.g_e {
        let p = complex_pair_continuation(species, (0, 1), ep, g)?;
        return Ok([(p.value.re, -p.value.im), (p.value.re, p.value.im)]);
    }
    let s = real_spectrum_st(species, g, 2, 1e-10)?;
    match s.values().as_slice() {
        [a, b] => Ok([(*a, 0.0), (*b, 0.0)]),
        _ => Err(CliError::Numerical(c3rotor::Error::ScanExhausted)),
    }
}

/// First two E and A+ levels against g through their coalescence.
fn figure3() -> Result<(Report, Plot), CliError> {
    let cols = ["g", "E0_re", "E0_im", "E1_re", "E1_im", "A0_re", "A0_im", "A1_re", "A1_im"];
    let blocks = [SymmetrySpecies::EA, SymmetrySpecies::APlus];
    let eps: Vec<ExceptionalPoint<f64>> =
        blocks.iter().map(|&s| first_exceptional_point(s, (0.0, FIG3_G_MAX))).collect::<Result<_, _>>()?;
    let mut r = Report::new("figure", &cols);
    r.meta("figure", Cell::Int(3))
        .meta("A_block", Cell::Text(SymmetrySpecies::APlus.label().into()))
        .meta("g_e_E", Cell::Float(eps[0].g_e))
        .meta("g_e_A", Cell::Float(eps[1].g_e))
        .meta("g_step", Cell::Float(FIG3_G_MAX / FIG3_STEPS as f64));
    let mut curves = vec![Vec::new(); 8];
    for i in 0..=FIG3_STEPS {
        let g = FIG3_G_MAX * i as f64 / FIG3_STEPS as f64;
        let mut row = vec![Cell::Float(g)];
        for (b, (&species, ep)) in blocks.iter().zip(&eps).enumerate() {
            for (j, (re, im)) in lowest_pair(species, ep, g)?.into_iter().enumerate() {
                row.push(Cell::Float(re));
                row.push(Cell::Float(im));
                curves[4 * b + 2 * j].push((g, re));
                curves[4 * b + 2 * j + 1].push((g, im));
            }
        }
        r.push(row);
    }
    let series = curves
        .into_iter()
        .enumerate()
        .map(|(j, pts)| {
            let style = if j % 2 == 0 { Style::Line } else { Style::Dashed };
            Series::new(cols[j + 1], style, pts)
        })
        .collect();
    let plot = Plot {
        title: "First two E and A+ levels at imaginary barrier".into(),
        x_label: "g".into(),
        y_label: "eps(ig)".into(),
        series,
    };
    Ok((r, plot))
}

/// Real levels of E, A+ and A- against g; pairs drop out at their
/// coalescence points.
fn figure4() -> Result<(Report, Plot), CliError> {
    let blocks = [(SymmetrySpecies::EA, 6), (SymmetrySpecies::APlus, 4), (SymmetrySpecies::AMinus, 4)];
    let mut r = Report::new("figure", &["species", "g", "index", "eps"]);
    r.meta("figure", Cell::Int(4))
        .meta("g_max", Cell::Float(FIG4_G_MAX))
        .meta("g_step", Cell::Float(FIG4_G_MAX / FIG4_STEPS as f64))
        .meta("content", Cell::Text("real eigenvalues only".into()));
    let mut series = Vec::new();
    for (species, k) in blocks {
        let mut pts = Vec::new();
        for i in 0..=FIG4_STEPS {
            let g = FIG4_G_MAX * i as f64 / FIG4_STEPS as f64;
            for (j, v) in real_spectrum_st(species, g, k, 1e-10)?.values().into_iter().enumerate() {
                r.push(vec![Cell::Text(species.label().into()), Cell::Float(g), Cell::Int(j as i64), Cell::Float(v)]);
                pts.push((g, v));
            }
        }
        series.push(Series::new(species.label(), Style::Points, pts));
    }
    let plot = Plot {
        title: "Real levels at imaginary barrier".into(),
        x_label: "g".into(),
        y_label: "eps(ig)".into(),
        series,
    };
    Ok((r, plot))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compression_is_odd_and_monotone() {
        assert_eq!(compress(0, f64::NEG_INFINITY), 0.0);
        assert!((compress(1, 0.0) - 2f64.log10()).abs() < 1e-15);
        assert!((compress(-1, 0.0) + 2f64.log10()).abs() < 1e-15);
        assert_eq!(compress(1, 40.0), 40.0);
        assert!(compress(1, -3.0) < compress(1, -2.0));
    }
}
