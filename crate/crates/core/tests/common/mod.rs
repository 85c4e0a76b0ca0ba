//! Shared helpers and numeric properties for the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use divindex::aggregate::{cdi, gdi, geodi, geodi_continents, bdi, WeightVector};
use divindex::cohort::Dimension;
use divindex::distribution::{CategoryDistribution, DisparityMatrix};
use divindex::indices::{pielou_index, rao_stirling, shannon_index, simpson_index};
use divindex::CommunityBreakdown;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRng, TestRunner};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn edition_fixtures() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(fixture(""))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "clean.csv")
        .collect();
    v.sort();
    v
}

pub fn counts(c: &[u64]) -> CategoryDistribution {
    CategoryDistribution::from_counts(c.iter().enumerate().map(|(i, &n)| (format!("c{i}"), n))).unwrap()
}

pub fn percentages(p: &[f64]) -> CategoryDistribution {
    CategoryDistribution::from_percentages(p.iter().enumerate().map(|(i, &v)| (format!("c{i}"), v))).unwrap()
}

/// Counts with at least one positive entry.
fn nonempty_counts(max_len: usize) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0u64..200, 1..=max_len).prop_filter("non-empty", |v| v.iter().any(|&n| n > 0))
}

fn disparity_for(n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(0.0f64..1.0, n * n).prop_map(move |flat| {
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    // symmetric
                    let (a, b) = (i.min(j), i.max(j));
                    m[i][j] = flat[a * n + b];
                }
            }
        }
        m
    })
}

fn weights() -> impl Strategy<Value = WeightVector> {
    (0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0)
        .prop_filter("positive mass", |(a, b, c)| a + b + c > 1e-6)
        .prop_map(|(a, b, c)| {
            let s = a + b + c;
            let (k, au) = (a / s, b / s);
            WeightVector::new(k, au, 1.0 - k - au).unwrap()
        })
}

fn labelled(c: &[u64], prefix: &str) -> CategoryDistribution {
    CategoryDistribution::from_counts(c.iter().enumerate().map(|(i, &n)| (format!("{prefix}{i}"), n))).unwrap()
}

fn breakdown_of(dim: Dimension, k: &[u64], a: &[u64], o: &[u64]) -> CommunityBreakdown {
    CommunityBreakdown::new(dim, labelled(k, "x"), labelled(a, "x"), labelled(o, "x"))
}

fn close(a: f64, b: f64, tol: f64) -> Result<(), TestCaseError> {
    prop_assert!((a - b).abs() <= tol, "{a} vs {b}");
    Ok(())
}

fn permute<T: Clone>(v: &[T], perm: &[usize]) -> Vec<T> {
    perm.iter().map(|&i| v[i].clone()).collect()
}

fn counts_and_perm() -> impl Strategy<Value = (Vec<u64>, Vec<usize>)> {
    nonempty_counts(8).prop_flat_map(|c| {
        let n = c.len();
        (Just(c), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}

pub type Property = (&'static str, fn(&mut TestRunner) -> Result<(), String>);

fn report<T: std::fmt::Debug>(r: Result<(), proptest::test_runner::TestError<T>>) -> Result<(), String> {
    r.map_err(|e| e.to_string())
}

/// Numeric properties of the indices and aggregates.
pub const PROPERTIES: &[Property] = &[
    ("pielou in [0, 1]", |runner| {
        report(runner.run(&(nonempty_counts(8), 0usize..4), |(c, extra)| {
            let d = counts(&c);
            let s = d.observed_richness().max(1) + extra;
            let j = pielou_index(&d, s).unwrap();
            prop_assert!((0.0..=1.0).contains(&j), "J' = {j}");
            Ok(())
        }))
    }),
    ("shannon <= ln S_observed, equality iff uniform", |runner| {
        report(runner.run(&nonempty_counts(8), |c| {
            let d = counts(&c);
            let h = shannon_index(&d).unwrap();
            let present: Vec<u64> = c.iter().copied().filter(|&n| n > 0).collect();
            let ln_s = (present.len() as f64).ln();
            if present.iter().all(|&n| n == present[0]) {
                close(h, ln_s, 1e-12)?;
            } else {
                prop_assert!(h < ln_s, "H' = {h} not below ln S = {ln_s}");
            }
            Ok(())
        }))
    }),
    ("permutation invariance of H', J', Rao-Stirling", |runner| {
        let strat = counts_and_perm().prop_flat_map(|(c, perm)| {
            let n = c.len();
            (Just(c), Just(perm), disparity_for(n))
        });
        report(runner.run(&strat, |(c, perm, m)| {
            let d = counts(&c);
            let p = counts(&permute(&c, &perm));
            close(shannon_index(&d).unwrap(), shannon_index(&p).unwrap(), 1e-12)?;
            let s = d.len();
            close(pielou_index(&d, s).unwrap(), pielou_index(&p, s).unwrap(), 1e-12)?;
            let pm: Vec<Vec<f64>> = perm.iter().map(|&i| permute(&m[i], &perm)).collect();
            let dm = DisparityMatrix::new(m, 1.5, 0.7).unwrap();
            let pdm = DisparityMatrix::new(pm, 1.5, 0.7).unwrap();
            close(rao_stirling(&d, &dm).unwrap(), rao_stirling(&p, &pdm).unwrap(), 1e-12)?;
            Ok(())
        }))
    }),
    ("count-scaling invariance of H', J', Rao-Stirling", |runner| {
        let strat = (nonempty_counts(8), 2u64..50).prop_flat_map(|(c, k)| {
            let n = c.len();
            (Just(c), Just(k), disparity_for(n))
        });
        report(runner.run(&strat, |(c, k, m)| {
            let d = counts(&c);
            let scaled: Vec<u64> = c.iter().map(|n| n * k).collect();
            let e = counts(&scaled);
            close(shannon_index(&d).unwrap(), shannon_index(&e).unwrap(), 1e-12)?;
            close(pielou_index(&d, c.len()).unwrap(), pielou_index(&e, c.len()).unwrap(), 1e-12)?;
            let dm = DisparityMatrix::new(m, 1.0, 1.0).unwrap();
            close(rao_stirling(&d, &dm).unwrap(), rao_stirling(&e, &dm).unwrap(), 1e-12)?;
            Ok(())
        }))
    }),
    ("zero-count categories change nothing", |runner| {
        report(runner.run(&(nonempty_counts(6), 1usize..4), |(c, zeros)| {
            let mut padded = c.clone();
            padded.extend(std::iter::repeat(0).take(zeros));
            let (d, e) = (counts(&c), counts(&padded));
            close(shannon_index(&d).unwrap(), shannon_index(&e).unwrap(), 0.0)?;
            let s = padded.len();
            close(pielou_index(&d, s).unwrap(), pielou_index(&e, s).unwrap(), 0.0)?;
            Ok(())
        }))
    }),
    ("aggregates lie within their per-community bounds", |runner| {
        let strat = (nonempty_counts(2), nonempty_counts(2), nonempty_counts(2), nonempty_counts(3), nonempty_counts(3), nonempty_counts(3), weights());
        report(runner.run(&strat, |(gk, ga, go, sk, sa, so, w)| {
            let results = [
                gdi(&breakdown_of(Dimension::Gender, &gk, &ga, &go), &w, 2).unwrap(),
                bdi(&breakdown_of(Dimension::Sector, &sk, &sa, &so), &w).unwrap(),
                geodi(&breakdown_of(Dimension::Country, &sk, &sa, &so), &w).unwrap(),
                geodi_continents(&breakdown_of(Dimension::Continent, &sk, &sa, &so), &w).unwrap(),
            ];
            for r in results {
                let vals: Vec<f64> = r.per_community.iter().map(|(_, v)| *v).collect();
                let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                prop_assert!(r.value >= lo - 1e-12 && r.value <= hi + 1e-12, "{} outside [{lo}, {hi}]", r.value);
            }
            Ok(())
        }))
    }),
    ("weight degeneracy picks one community", |runner| {
        let strat = (nonempty_counts(3), nonempty_counts(3), nonempty_counts(3), 0usize..3);
        report(runner.run(&strat, |(k, a, o, which)| {
            let b = breakdown_of(Dimension::Sector, &k, &a, &o);
            let mut w = [0.0; 3];
            w[which] = 1.0;
            let wv = WeightVector::new(w[0], w[1], w[2]).unwrap();
            let r = bdi(&b, &wv).unwrap();
            let own = [&k, &a, &o][which];
            close(r.value, pielou_index(&counts(own), 3).unwrap(), 1e-12)?;
            Ok(())
        }))
    }),
    ("identical communities give the community value for any weights", |runner| {
        report(runner.run(&(nonempty_counts(2), weights()), |(c, w)| {
            let b = breakdown_of(Dimension::Gender, &c, &c, &c);
            close(gdi(&b, &w, 2).unwrap().value, pielou_index(&counts(&c), 2).unwrap(), 1e-12)?;
            Ok(())
        }))
    }),
    ("permuting communities with their weights preserves the aggregate", |runner| {
        let strat = (nonempty_counts(3), nonempty_counts(3), nonempty_counts(3), weights());
        report(runner.run(&strat, |(k, a, o, w)| {
            let b = breakdown_of(Dimension::Country, &k, &a, &o);
            let swapped = breakdown_of(Dimension::Country, &o, &k, &a);
            let sw = WeightVector::new(w.organiser, w.keynote, w.author).unwrap();
            close(geodi(&b, &w).unwrap().value, geodi(&swapped, &sw).unwrap().value, 1e-12)?;
            Ok(())
        }))
    }),
    ("geodi clamp keeps CDI in [0, 1]", |runner| {
        report(runner.run(&(0.0f64..=1.0, 0.0f64..20.0, 0.0f64..=1.0), |(g, geo, b)| {
            let c = cdi(g, geo, b).unwrap();
            prop_assert!((0.0..=1.0).contains(&c), "cdi = {c}");
            close(c, (g + (geo / 3.5).min(1.0) + b) / 3.0, 1e-12)?;
            Ok(())
        }))
    }),
    ("Simpson D approaches sum p^2 as (1 - sum p^2) / (N - 1)", |runner| {
        report(runner.run(&nonempty_counts(5).prop_filter("N >= 2", |c| c.iter().sum::<u64>() >= 2), |c| {
            let d = counts(&c);
            let n: f64 = c.iter().sum::<u64>() as f64;
            let sum_p2: f64 = c.iter().map(|&x| (x as f64 / n).powi(2)).sum();
            let s = simpson_index(&d).unwrap();
            close(s.dominance - sum_p2, (sum_p2 - 1.0) / (n - 1.0), 1e-12)?;
            close(s.dominance + s.complement, 1.0, 1e-12)?;
            Ok(())
        }))
    }),
    ("renormalized percentages match counts", |runner| {
        report(runner.run(&nonempty_counts(6), |c| {
            let n: u64 = c.iter().sum();
            let pct: Vec<f64> = c.iter().map(|&x| 100.0 * x as f64 / n as f64).collect();
            close(shannon_index(&counts(&c)).unwrap(), shannon_index(&percentages(&pct)).unwrap(), 1e-12)?;
            Ok(())
        }))
    }),
];

pub fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    let algorithm = config.rng_algorithm;
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(algorithm))
}
