//! Error metrics for approximate PEs.
//!
//! Every sample compares the cell-grid result against the wide-integer
//! oracle. Reported quantities:
//!
//! - `er`   — error rate, fraction of samples with nonzero error distance;
//! - `med`  — mean absolute error distance;
//! - `nmed` — `med / 2^(2N-2)`, i.e. normalized by the maximum signed
//!   product magnitude for either signedness (the scale the published
//!   8-bit figures imply);
//! - `mred` — mean of `|ED| / max(1, |exact|)` (zero-result samples clamp
//!   the denominator to 1);
//! - `max_ed` — largest absolute error distance observed.

use serde::{Deserialize, Serialize};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pe::{build_pe, eval_pe_exact_oracle, PeConfig, Signedness};

/// How the input space is visited.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InputProtocol {
    /// Every `(a, b)` operand pair exactly once, with `c = 0`. Feasible for
    /// widths up to 8 (65 536 pairs).
    ExhaustiveAbZeroC,
    /// Uniform random `(a, b, c)` triples. `c` spans the accumulator range;
    /// draws whose exact result would overflow the accumulator are
    /// redrawn, so every sampled MAC is representable.
    RandomAbc { seed: u64, count: u64 },
}

impl InputProtocol {
    pub fn name(&self) -> &'static str {
        match self {
            InputProtocol::ExhaustiveAbZeroC => "exhaustive-ab-c0",
            InputProtocol::RandomAbc { .. } => "random-abc",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            InputProtocol::ExhaustiveAbZeroC => None,
            InputProtocol::RandomAbc { seed, .. } => Some(*seed),
        }
    }
}

/// Aggregated error statistics for one PE configuration under one protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub width: u32,
    pub signedness: Signedness,
    pub k: u32,
    pub er: f64,
    pub med: f64,
    pub nmed: f64,
    pub mred: f64,
    pub max_ed: u64,
    pub samples: u64,
    pub protocol: String,
    pub seed: Option<u64>,
}

/// The NMED normalizer `2^(2N-2)`: the maximum magnitude of a signed
/// product, used for both signednesses so 4-bit and 8-bit figures sit on
/// comparable scales.
pub fn nmed_normalizer(width: u32) -> f64 {
    (1u64 << (2 * width - 2)) as f64
}

/// Measures a configuration against the exact oracle.
pub fn analyze(config: PeConfig, protocol: &InputProtocol) -> Result<ErrorReport> {
    let desc = build_pe(config)?;
    let mut samples = 0u64;
    let mut errors = 0u64;
    let mut sum_abs: u128 = 0;
    let mut sum_rel = 0.0f64;
    let mut max_ed = 0u64;

    let mut tally = |approx: i64, exact: i64| {
        let ed = approx - exact;
        samples += 1;
        if ed != 0 {
            errors += 1;
        }
        sum_abs += ed.unsigned_abs() as u128;
        sum_rel += ed.unsigned_abs() as f64 / std::cmp::max(1, exact.abs()) as f64;
        max_ed = max_ed.max(ed.unsigned_abs());
    };

    match *protocol {
        InputProtocol::ExhaustiveAbZeroC => {
            if config.width > 8 {
                return Err(Error::ProtocolInfeasible(format!(
                    "exhaustive enumeration of {0}-bit operands is 2^{1} pairs; \
                     use RandomAbc sampling for widths above 8",
                    config.width,
                    2 * config.width
                )));
            }
            for a in config.operand_min()..=config.operand_max() {
                for b in config.operand_min()..=config.operand_max() {
                    let approx = desc.eval(a, b, 0)?;
                    let exact = eval_pe_exact_oracle(&config, a, b, 0)?;
                    tally(approx, exact);
                }
            }
        }
        InputProtocol::RandomAbc { seed, count } => {
            if count == 0 {
                return Err(Error::ProtocolInfeasible("sample count must be > 0".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..count {
                let a = rng.random_range(config.operand_min()..=config.operand_max());
                let b = rng.random_range(config.operand_min()..=config.operand_max());
                let c = loop {
                    let c = rng.random_range(config.acc_min()..=config.acc_max());
                    let wide = a * b + c;
                    if wide >= config.acc_min() && wide <= config.acc_max() {
                        break c;
                    }
                };
                let approx = desc.eval(a, b, c)?;
                let exact = eval_pe_exact_oracle(&config, a, b, c)?;
                tally(approx, exact);
            }
        }
    }

    let med = sum_abs as f64 / samples as f64;
    Ok(ErrorReport {
        width: config.width,
        signedness: config.signedness,
        k: config.approx_columns,
        er: errors as f64 / samples as f64,
        med,
        nmed: med / nmed_normalizer(config.width),
        mred: sum_rel / samples as f64,
        max_ed,
        samples,
        protocol: protocol.name().to_string(),
        seed: protocol.seed(),
    })
}

/// Runs [`analyze`] once per `k`, reports sorted by `k`.
pub fn sweep_k(
    width: u32,
    signedness: Signedness,
    k_values: &[u32],
    protocol: &InputProtocol,
) -> Result<Vec<ErrorReport>> {
    let mut ks = k_values.to_vec();
    ks.sort_unstable();
    ks.dedup();
    ks.iter()
        .map(|&k| analyze(PeConfig::new(width, signedness, k)?, protocol))
        .collect()
}

fn signedness_str(s: Signedness) -> &'static str {
    match s {
        Signedness::Unsigned => "unsigned",
        Signedness::Signed => "signed",
    }
}

pub const CSV_HEADER: &str = "width,signedness,k,er,med,nmed,mred,max_ed,samples,protocol,seed";

/// Renders reports as CSV with a fixed column order. Float columns use the
/// shortest round-trip representation, so parsing them back is lossless.
pub fn to_csv(reports: &[ErrorReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        let seed = r.seed.map(|s| s.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.width,
            signedness_str(r.signedness),
            r.k,
            r.er,
            r.med,
            r.nmed,
            r.mred,
            r.max_ed,
            r.samples,
            r.protocol,
            seed
        ));
    }
    out
}

/// Parses the CSV emitted by [`to_csv`].
pub fn from_csv(text: &str) -> Result<Vec<ErrorReport>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => {
            return Err(Error::CsvBadToken {
                row: 0,
                col: 0,
                token: other.unwrap_or("").to_string(),
            })
        }
    }
    let mut reports = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 11 {
            return Err(Error::CsvRagged {
                row: i + 1,
                expected: 11,
                found: fields.len(),
            });
        }
        let bad = |col: usize| Error::CsvBadToken {
            row: i + 1,
            col,
            token: fields[col].to_string(),
        };
        reports.push(ErrorReport {
            width: fields[0].parse().map_err(|_| bad(0))?,
            signedness: match fields[1] {
                "unsigned" => Signedness::Unsigned,
                "signed" => Signedness::Signed,
                _ => return Err(bad(1)),
            },
            k: fields[2].parse().map_err(|_| bad(2))?,
            er: fields[3].parse().map_err(|_| bad(3))?,
            med: fields[4].parse().map_err(|_| bad(4))?,
            nmed: fields[5].parse().map_err(|_| bad(5))?,
            mred: fields[6].parse().map_err(|_| bad(6))?,
            max_ed: fields[7].parse().map_err(|_| bad(7))?,
            samples: fields[8].parse().map_err(|_| bad(8))?,
            protocol: fields[9].to_string(),
            seed: if fields[10].is_empty() {
                None
            } else {
                Some(fields[10].parse().map_err(|_| bad(10))?)
            },
        });
    }
    Ok(reports)
}

/// Renders reports as pretty-printed JSON.
pub fn to_json(reports: &[ErrorReport]) -> Result<String> {
    Ok(serde_json::to_string_pretty(reports)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(width: u32, signedness: Signedness, k: u32) -> PeConfig {
        PeConfig::new(width, signedness, k).unwrap()
    }

    #[test]
    fn exact_design_has_zero_error() {
        for signedness in [Signedness::Unsigned, Signedness::Signed] {
            for width in [4, 8] {
                let r =
                    analyze(cfg(width, signedness, 0), &InputProtocol::ExhaustiveAbZeroC).unwrap();
                assert_eq!(r.er, 0.0);
                assert_eq!(r.med, 0.0);
                assert_eq!(r.nmed, 0.0);
                assert_eq!(r.mred, 0.0);
                assert_eq!(r.max_ed, 0);
                assert_eq!(r.samples, 1u64 << (2 * width));
            }
        }
    }

    #[test]
    fn nmed_nondecreasing_in_k() {
        for signedness in [Signedness::Unsigned, Signedness::Signed] {
            let reports = sweep_k(
                4,
                signedness,
                &[0, 1, 2, 3, 4, 5, 6, 7, 8],
                &InputProtocol::ExhaustiveAbZeroC,
            )
            .unwrap();
            for pair in reports.windows(2) {
                assert!(
                    pair[0].nmed <= pair[1].nmed,
                    "{signedness:?}: nmed(k={}) = {} > nmed(k={}) = {}",
                    pair[0].k,
                    pair[0].nmed,
                    pair[1].k,
                    pair[1].nmed
                );
            }
        }
    }

    #[test]
    fn eight_bit_nmed_smaller_than_four_bit_at_same_k() {
        let r4 = analyze(
            cfg(4, Signedness::Unsigned, 4),
            &InputProtocol::ExhaustiveAbZeroC,
        )
        .unwrap();
        let r8 = analyze(
            cfg(8, Signedness::Unsigned, 4),
            &InputProtocol::ExhaustiveAbZeroC,
        )
        .unwrap();
        assert!(r8.nmed < r4.nmed);
    }

    #[test]
    fn exhaustive_above_8_bits_rejected() {
        assert!(matches!(
            analyze(
                cfg(9, Signedness::Unsigned, 0),
                &InputProtocol::ExhaustiveAbZeroC
            ),
            Err(Error::ProtocolInfeasible(_))
        ));
    }

    #[test]
    fn random_protocol_is_reproducible() {
        let p = InputProtocol::RandomAbc {
            seed: 99,
            count: 2000,
        };
        let a = analyze(cfg(8, Signedness::Signed, 5), &p).unwrap();
        let b = analyze(cfg(8, Signedness::Signed, 5), &p).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.seed, Some(99));
        assert_eq!(a.samples, 2000);
    }

    #[test]
    fn csv_round_trip_is_identity() {
        let p = InputProtocol::RandomAbc {
            seed: 5,
            count: 500,
        };
        let mut reports = sweep_k(8, Signedness::Signed, &[0, 2, 5], &p).unwrap();
        reports.extend(
            sweep_k(
                4,
                Signedness::Unsigned,
                &[4],
                &InputProtocol::ExhaustiveAbZeroC,
            )
            .unwrap(),
        );
        let text = to_csv(&reports);
        assert_eq!(from_csv(&text).unwrap(), reports);
    }

    #[test]
    fn json_round_trip_is_identity() {
        let reports = sweep_k(
            4,
            Signedness::Unsigned,
            &[0, 3],
            &InputProtocol::ExhaustiveAbZeroC,
        )
        .unwrap();
        let text = to_json(&reports).unwrap();
        let back: Vec<ErrorReport> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, reports);
    }

    #[test]
    fn single_zero_report_row() {
        let reports = sweep_k(
            4,
            Signedness::Unsigned,
            &[0],
            &InputProtocol::ExhaustiveAbZeroC,
        )
        .unwrap();
        let csv = to_csv(&reports);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[1], "4,unsigned,0,0,0,0,0,0,256,exhaustive-ab-c0,");
    }

    #[test]
    fn reports_sorted_by_k() {
        let reports = sweep_k(
            4,
            Signedness::Signed,
            &[4, 2, 3],
            &InputProtocol::ExhaustiveAbZeroC,
        )
        .unwrap();
        let ks: Vec<u32> = reports.iter().map(|r| r.k).collect();
        assert_eq!(ks, vec![2, 3, 4]);
    }
}
