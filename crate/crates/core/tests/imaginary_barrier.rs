use c3rotor::perturbation::rs_series;
use c3rotor::{
    complex_pair_continuation, ep_scan, evaluate_series, find_exceptional_point, real_spectrum_st, Coupling,
    ExceptionalPoint, ExceptionalPointDd, Real, SymmetrySpecies,
};

fn first_ep(species: SymmetrySpecies, upto: f64) -> ExceptionalPoint<f64> {
    let seeds = ep_scan(species, (0.0, upto), 0.05, 2).unwrap();
    let seed = seeds.iter().find(|s| s.pair == (0, 1)).expect("seed");
    find_exceptional_point(species, (0, 1), seed, 13).unwrap()
}

#[test]
fn levels_stay_real_below_the_first_coalescence() {
    for (species, upto) in [
        (SymmetrySpecies::EA, 5.0),
        (SymmetrySpecies::EB, 5.0),
        (SymmetrySpecies::APlus, 8.0),
        (SymmetrySpecies::AMinus, 35.0),
    ] {
        let ep = first_ep(species, upto);
        assert!(ep.g_e > 0.0);
        for f in [0.5, 0.9, 0.99] {
            let s = real_spectrum_st(species, f * ep.g_e, 2, 1e-10).unwrap();
            assert_eq!(s.len(), 2, "{species} at {f} g_e");
        }
    }
}

#[test]
fn coalescence_system_vanishes_at_the_point() {
    let seeds = ep_scan(SymmetrySpecies::APlus, (0.0, 8.0), 0.05, 2).unwrap();
    let ep: ExceptionalPointDd = find_exceptional_point(SymmetrySpecies::APlus, (0, 1), &seeds[0], 20).unwrap();
    assert_eq!(ep.precision_digits, 20);
    assert!(ep.residual_d.approx() < 1e-18);
    assert!(ep.residual_dd.approx() < 1e-18);
}

#[test]
fn imaginary_part_follows_a_square_root() {
    let ep = first_ep(SymmetrySpecies::EA, 5.0);
    let ratios: Vec<f64> = [1.001, 1.005, 1.01, 1.02, 1.035, 1.05]
        .iter()
        .map(|f| {
            let g = ep.g_e * f;
            let p = complex_pair_continuation(SymmetrySpecies::EA, (0, 1), &ep, g).unwrap();
            p.value.im / (g - ep.g_e).sqrt()
        })
        .collect();
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    assert!(hi / lo < 1.05, "{ratios:?}");
}

#[test]
fn small_g_matches_the_series_with_negative_square() {
    for (species, level) in [(SymmetrySpecies::EA, 0), (SymmetrySpecies::EA, 1), (SymmetrySpecies::APlus, 0)] {
        let series = rs_series(species, level, 12).unwrap();
        for g in [0.2, 0.5, 1.0] {
            let v = evaluate_series(&series, &Coupling::imaginary(g));
            let s = real_spectrum_st(species, g, level + 1, 1e-12).unwrap();
            let e = s.values()[level];
            assert!((e - v.value).abs() <= 10.0 * v.last_term.abs() + 1e-12, "{species} {level} g={g}: {e} vs {}", v.value);
        }
    }
}
