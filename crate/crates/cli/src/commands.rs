use c3rotor::spectral::{solve_spectrum_with, SolveOptions};
use c3rotor::{
    ep_scan, find_exceptional_point, rs_series, tunneling_splitting, Coupling, DoubleDouble, ExceptionalPoint, Real,
    SymmetrySpecies,
};

use crate::config::{EpArgs, FileConfig, SeriesArgs, SpectrumArgs, SplittingArgs};
use crate::error::CliError;
use crate::report::{plain_decimal, Cell, Report};

const DEFAULT_TOL: &str = "1e-12";

/// Arithmetic backing a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Field {
    Double,
    Extended,
}

impl Field {
    pub fn from_digits(digits: u32) -> Result<Self, CliError> {
        match digits {
            0 => Err(CliError::usage("precision must be at least 1 digit")),
            d if d <= f64::DIGITS => Ok(Field::Double),
            d if d <= DoubleDouble::DIGITS => Ok(Field::Extended),
            d => Err(CliError::usage(format!(
                "precision of {d} digits is not available (maximum {})",
                DoubleDouble::DIGITS
            ))),
        }
    }
}

/// Flag, then environment, then config file, then doubles.
fn resolve_precision(flag: Option<u32>, file: &FileConfig, env: Option<&str>) -> Result<u32, CliError> {
    if let Some(p) = flag {
        return Ok(p);
    }
    if let Some(text) = env.filter(|s| !s.trim().is_empty()) {
        return text
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("{}: not a digit count: {text:?}", crate::PRECISION_ENV)));
    }
    Ok(file.precision.unwrap_or(f64::DIGITS))
}

pub(crate) fn parse_species(text: Option<&str>) -> Result<SymmetrySpecies, CliError> {
    let text = text.ok_or_else(|| CliError::usage("missing --species"))?;
    text.parse().map_err(|_| CliError::usage(format!("unknown species {text:?} (expected A+, A-, EA, EB or rawA)")))
}

fn parse_real(name: &str, text: &str) -> Result<f64, CliError> {
    let x: f64 = text.trim().parse().map_err(|_| CliError::usage(format!("--{name}: not a number: {text:?}")))?;
    if !x.is_finite() {
        return Err(CliError::usage(format!("--{name} must be finite")));
    }
    Ok(x)
}

fn parse_tol(text: &str) -> Result<f64, CliError> {
    let tol = parse_real("tol", text)?;
    if tol <= 0.0 {
        return Err(CliError::usage("--tol must be positive"));
    }
    Ok(tol)
}

fn field_value<T: Real>(text: &str) -> T {
    T::parse_decimal(text.trim()).expect("validated as a decimal literal")
}

/// Doubles stay numeric; extended values travel as decimal text.
pub(crate) fn cell<T: Real>(x: T) -> Cell {
    if T::DIGITS <= f64::DIGITS {
        Cell::Float(x.approx())
    } else {
        Cell::Exact(plain_decimal(&x.to_decimal(T::DIGITS as usize + 1)))
    }
}

/// `digits` significant digits, truncated toward zero.
fn digits_cell<T: Real>(x: T, digits: u32) -> Cell {
    if T::DIGITS <= f64::DIGITS {
        return Cell::Float(x.approx());
    }
    let wide = x.to_decimal((digits as usize + 3).min(T::DIGITS as usize + 1));
    Cell::Exact(plain_decimal(&truncate_mantissa(&wide, digits as usize)))
}

fn truncate_mantissa(sci: &str, digits: usize) -> String {
    let Some((mant, exp)) = sci.split_once('e') else {
        return sci.to_owned();
    };
    let mut kept = 0;
    let cut: String = mant
        .chars()
        .take_while(|c| {
            if c.is_ascii_digit() {
                kept += 1;
            }
            kept <= digits
        })
        .collect();
    format!("{}e{exp}", cut.trim_end_matches('.'))
}

struct SpectrumJob {
    species: SymmetrySpecies,
    lambda: String,
    levels: usize,
    tol: String,
    truncation: Option<usize>,
    digits: u32,
}

pub(crate) fn spectrum(args: &SpectrumArgs, file: &FileConfig, env: Option<&str>) -> Result<Report, CliError> {
    let species = parse_species(args.species.as_deref())?;
    let lambda = args.lambda.clone().ok_or_else(|| CliError::usage("missing --lambda"))?;
    parse_real("lambda", &lambda)?;
    let levels = args.levels.unwrap_or(5);
    if levels == 0 {
        return Err(CliError::usage("--levels must be at least 1"));
    }
    let tol = args.tol.clone().or_else(|| file.tol.clone()).unwrap_or_else(|| DEFAULT_TOL.into());
    parse_tol(&tol)?;
    if let Some(n) = args.truncation {
        if n < 2 {
            return Err(CliError::usage("--truncation must be at least 2"));
        }
    }
    let digits = resolve_precision(args.precision, file, env)?;
    let job = SpectrumJob { species, lambda, levels, tol, truncation: args.truncation, digits };
    match Field::from_digits(digits)? {
        Field::Double => spectrum_in::<f64>(&job),
        Field::Extended => spectrum_in::<DoubleDouble>(&job),
    }
}

fn spectrum_in<T: Real>(job: &SpectrumJob) -> Result<Report, CliError> {
    let lambda: T = field_value(&job.lambda);
    let tol: T = field_value(&job.tol);
    let opts = SolveOptions { truncation: job.truncation, ..SolveOptions::default() };
    let s = solve_spectrum_with(job.species, Coupling::real(lambda), job.levels, tol, &opts)?;
    let mut r = Report::new("spectrum", &["species", "level", "energy"]);
    r.meta("species", Cell::Text(job.species.label().into()))
        .meta("lambda", Cell::Exact(job.lambda.trim().into()))
        .meta("precision_digits", Cell::Int(job.digits as i64))
        .meta("working_digits", Cell::Int(T::DIGITS as i64))
        .meta("tol", Cell::Exact(job.tol.trim().into()))
        .meta("truncation", Cell::Int(s.truncation_used as i64));
    for e in &s.entries {
        r.push(vec![Cell::Text(e.species.label().into()), Cell::Int(e.level as i64), cell(e.value)]);
    }
    Ok(r)
}

pub(crate) fn series(args: &SeriesArgs) -> Result<Report, CliError> {
    let species = parse_species(args.species.as_deref())?;
    if species == SymmetrySpecies::RawA {
        return Err(CliError::usage("series needs a parity block: use A+ or A- instead of rawA"));
    }
    let level = args.level.unwrap_or(0);
    let order = args.order.unwrap_or(6);
    if order % 2 == 1 {
        return Err(CliError::usage(format!("--order must be even, got {order}")));
    }
    if order > 40 {
        return Err(CliError::usage(format!("--order {order} exceeds the maximum of 40")));
    }
    let s = rs_series(species, level, order)?;
    let mut r = Report::new("series", &["power", "coefficient"]);
    r.meta("species", Cell::Text(species.label().into()))
        .meta("level", Cell::Int(level as i64))
        .meta("order", Cell::Int(order as i64))
        .meta("coefficients", Cell::Exact(s.to_string()));
    for (j, c) in s.coefficient_strings().into_iter().enumerate() {
        r.push(vec![Cell::Int(2 * j as i64), Cell::Exact(c)]);
    }
    Ok(r)
}

/// Least-squares slope of `ln y` against `ln x`.
pub(crate) fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x.ln(), b + y.ln()));
    let (mx, my) = (sx / n, sy / n);
    let (num, den) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| {
        let dx = x.ln() - mx;
        (a + dx * (y.ln() - my), b + dx * dx)
    });
    num / den
}

pub(crate) fn splitting(args: &SplittingArgs, file: &FileConfig, env: Option<&str>) -> Result<Report, CliError> {
    let n = args.n.unwrap_or(1);
    if n == 0 {
        return Err(CliError::usage("--n must be at least 1"));
    }
    let lambdas = if args.lambda.is_empty() { vec!["0.1".to_owned()] } else { args.lambda.clone() };
    for l in &lambdas {
        if parse_real("lambda", l)? == 0.0 {
            return Err(CliError::usage("--lambda values must be nonzero"));
        }
    }
    if args.fit && lambdas.len() < 2 {
        return Err(CliError::usage("--fit needs at least two --lambda values"));
    }
    let tol = args.tol.clone().or_else(|| file.tol.clone()).unwrap_or_else(|| DEFAULT_TOL.into());
    parse_tol(&tol)?;
    let digits = resolve_precision(args.precision, file, env)?;
    match Field::from_digits(digits)? {
        Field::Double => splitting_in::<f64>(n, &lambdas, args.fit, &tol, digits),
        Field::Extended => splitting_in::<DoubleDouble>(n, &lambdas, args.fit, &tol, digits),
    }
}

fn splitting_in<T: Real>(n: usize, lambdas: &[String], fit: bool, tol: &str, digits: u32) -> Result<Report, CliError> {
    let tol_t: T = field_value(tol);
    let mut r = Report::new("splitting", &["n", "lambda", "splitting"]);
    r.meta("n", Cell::Int(n as i64))
        .meta("precision_digits", Cell::Int(digits as i64))
        .meta("working_digits", Cell::Int(T::DIGITS as i64))
        .meta("tol", Cell::Exact(tol.trim().into()));
    let mut points = Vec::new();
    for text in lambdas {
        let lambda: T = field_value(text);
        let d = tunneling_splitting(n, lambda, tol_t)?;
        points.push((lambda.approx().abs(), d.approx().abs()));
        r.push(vec![Cell::Int(n as i64), Cell::Exact(text.trim().into()), cell(d)]);
    }
    if fit {
        r.meta("slope", Cell::Float(log_log_slope(&points)));
    }
    Ok(r)
}

fn parse_pair(text: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::usage(format!("--pair: expected two levels like 0,1, got {text:?}"));
    let (a, b) = text.split_once(',').ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a >= b {
        return Err(CliError::usage(format!("--pair: need lower < upper, got {a},{b}")));
    }
    Ok((a, b))
}

pub(crate) fn parse_range(name: &str, text: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::usage(format!("--{name}: expected a:b, got {text:?}"));
    let (a, b) = text.split_once(':').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    Ok((a, b))
}

pub(crate) fn ep(args: &EpArgs) -> Result<Report, CliError> {
    let label = args.species.as_deref().ok_or_else(|| CliError::usage("missing --species"))?;
    let blocks = if label.trim().eq_ignore_ascii_case("a") {
        vec![SymmetrySpecies::APlus, SymmetrySpecies::AMinus]
    } else {
        let s = parse_species(Some(label))?;
        if s == SymmetrySpecies::RawA {
            return Err(CliError::usage("use A (both parity blocks), A+ or A- instead of rawA"));
        }
        vec![s]
    };
    let pair = parse_pair(args.pair.as_deref().unwrap_or("0,1"))?;
    let digits = args.digits.unwrap_or(20);
    let field = Field::from_digits(digits)?;
    let scan_text = args.scan.clone().unwrap_or_else(|| "0:20".into());
    let (a, b) = parse_range("scan", &scan_text)?;
    if !(0.0..=100.0).contains(&a) || !(0.0..=100.0).contains(&b) || a >= b {
        return Err(CliError::usage(format!("--scan must satisfy 0 <= a < b <= 100, got {scan_text}")));
    }
    let step = args.step.unwrap_or(0.05);
    if !(step > 0.0 && step.is_finite()) {
        return Err(CliError::usage("--step must be positive"));
    }

    let mut r = Report::new(
        "ep",
        &["species", "lower", "upper", "g_e", "eps_e", "residual_d", "residual_dd", "precision_digits", "truncation"],
    );
    r.meta("species", Cell::Text(label.trim().into()))
        .meta("pair", Cell::Text(format!("{},{}", pair.0, pair.1)))
        .meta("scan", Cell::Text(scan_text.trim().into()))
        .meta("step", Cell::Float(step))
        .meta("precision_digits", Cell::Int(digits as i64));
    let mut hosts = Vec::new();
    for species in blocks {
        let seeds = ep_scan(species, (a, b), step, pair.1 + 1)?;
        let Some(seed) = seeds.iter().find(|s| s.pair == pair) else {
            continue;
        };
        let row = match field {
            Field::Double => ep_row(&find_exceptional_point::<f64>(species, pair, seed, digits)?, digits),
            Field::Extended => ep_row(&find_exceptional_point::<DoubleDouble>(species, pair, seed, digits)?, digits),
        };
        hosts.push(species.label());
        r.push(row);
    }
    if hosts.is_empty() {
        r.meta("note", Cell::Text("no exceptional point in range".into()));
    } else {
        r.meta("host", Cell::Text(hosts.join(" ")));
    }
    Ok(r)
}

fn ep_row<T: Real>(ep: &ExceptionalPoint<T>, digits: u32) -> Vec<Cell> {
    let small = |x: T| Cell::Exact(x.to_decimal(3));
    vec![
        Cell::Text(ep.species.label().into()),
        Cell::Int(ep.pair.0 as i64),
        Cell::Int(ep.pair.1 as i64),
        digits_cell(ep.g_e, digits),
        digits_cell(ep.eps_e, digits),
        small(ep.residual_d),
        small(ep.residual_dd),
        Cell::Int(ep.precision_digits as i64),
        Cell::Int(ep.truncation as i64),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_selects_the_field() {
        assert_eq!(Field::from_digits(15).unwrap(), Field::Double);
        assert_eq!(Field::from_digits(30).unwrap(), Field::Extended);
        assert!(Field::from_digits(40).is_err());
        assert!(Field::from_digits(0).is_err());
    }

    #[test]
    fn flag_beats_environment_beats_file() {
        let file = FileConfig { precision: Some(12), ..FileConfig::default() };
        assert_eq!(resolve_precision(Some(30), &file, Some("20")).unwrap(), 30);
        assert_eq!(resolve_precision(None, &file, Some("20")).unwrap(), 20);
        assert_eq!(resolve_precision(None, &file, None).unwrap(), 12);
        assert_eq!(resolve_precision(None, &FileConfig::default(), None).unwrap(), 15);
        assert!(resolve_precision(None, &file, Some("many")).is_err());
    }

    #[test]
    fn slope_of_a_power_law() {
        let pts: Vec<(f64, f64)> = [0.02, 0.04, 0.08].iter().map(|&x| (x, 3.0 * x * x)).collect();
        assert!((log_log_slope(&pts) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn mantissa_truncation() {
        assert_eq!(truncate_mantissa("6.609458762033138965382e0", 20), "6.6094587620331389653e0");
        assert_eq!(truncate_mantissa("-1.25e-3", 2), "-1.2e-3");
        assert_eq!(truncate_mantissa("9.9e1", 1), "9e1");
    }

    #[test]
    fn pair_and_range_parsing() {
        assert_eq!(parse_pair("0,1").unwrap(), (0, 1));
        assert!(parse_pair("1,1").is_err());
        assert!(parse_pair("x").is_err());
        assert_eq!(parse_range("scan", "0:20").unwrap(), (0.0, 20.0));
        assert!(parse_range("scan", "0-20").is_err());
    }
}
