use std::env;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use cuspcert_core::caselib::{CertifyOptions, TwistChoice, DEFAULT_Q_GRID};
use cuspcert_core::genpos::ORACLE_THRESHOLD;
use cuspcert_core::torus::is_prime_power;
use cuspcert_core::weyl::ENUMERATION_THRESHOLD;
use cuspcert_core::Family;

pub const THREADS_ENV: &str = "CUSPCERT_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Family to include: A, B, C, D, 2A or 2D (repeatable; default all)
    #[arg(long = "family", value_parser = parse_family)]
    pub families: Vec<Family>,

    /// Root-system rank, `N` or an inclusive range `a..b`
    #[arg(long, value_parser = parse_range)]
    pub rank: Option<(usize, usize)>,

    /// Field size, `N` or `a..b` (repeatable; ranges keep prime powers only)
    #[arg(long = "q")]
    pub q: Vec<String>,

    /// Twisting element: paper, coxeter, ncycle or index:<k>
    #[arg(long, default_value = "paper", value_parser = parse_twist)]
    pub twist: TwistChoice,

    /// Cross-check with the orbit oracle when the character group is small
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set,
          num_args = 0..=1, default_missing_value = "true")]
    pub oracle: bool,

    /// Report file
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Worker threads (overridden by CUSPCERT_THREADS)
    #[arg(long)]
    pub threads: Option<usize>,

    /// Largest Weyl group to enumerate
    #[arg(long, default_value_t = ENUMERATION_THRESHOLD)]
    pub group_threshold: u128,

    /// Largest character group the orbit oracle will enumerate
    #[arg(long, default_value_t = ORACLE_THRESHOLD)]
    pub oracle_threshold: u128,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: cuspcert_core::Error| e.to_string())
}

fn parse_twist(s: &str) -> Result<TwistChoice, String> {
    s.parse().map_err(|e: cuspcert_core::Error| e.to_string())
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let bad = || format!("expected N or a..b, got {s:?}");
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        ),
        None => {
            let n = s.trim().parse().map_err(|_| bad())?;
            (n, n)
        }
    };
    if lo > hi {
        return Err(format!("empty range {s}"));
    }
    Ok((lo, hi))
}

/// Expands `--q` values. A single value must be a prime power; a range keeps
/// the prime powers it contains and must contain at least one.
pub fn parse_qs(values: &[String]) -> Result<Vec<u64>, String> {
    if values.is_empty() {
        return Ok(DEFAULT_Q_GRID.to_vec());
    }
    let mut qs = Vec::new();
    for v in values {
        let (lo, hi) = parse_range(v)?;
        let (lo, hi) = (lo as u64, hi as u64);
        if lo == hi && !v.contains("..") {
            if !is_prime_power(lo) {
                return Err(format!("q = {lo} is not a prime power"));
            }
            qs.push(lo);
        } else {
            let found: Vec<u64> = (lo..=hi).filter(|&q| is_prime_power(q)).collect();
            if found.is_empty() {
                return Err(format!("no prime powers in {v}"));
            }
            qs.extend(found);
        }
    }
    qs.sort_unstable();
    qs.dedup();
    Ok(qs)
}

impl Common {
    pub fn families(&self) -> Vec<Family> {
        if self.families.is_empty() {
            Family::ALL.to_vec()
        } else {
            self.families.clone()
        }
    }

    pub fn ranks(&self, default: (usize, usize)) -> Vec<usize> {
        let (lo, hi) = self.rank.unwrap_or(default);
        (lo..=hi).collect()
    }

    pub fn threads(&self) -> Result<Option<usize>, String> {
        match env::var(THREADS_ENV) {
            Ok(v) if !v.trim().is_empty() => match v.trim().parse::<usize>() {
                Ok(n) if n > 0 => Ok(Some(n)),
                _ => Err(format!(
                    "{THREADS_ENV} must be a positive integer, got {v:?}"
                )),
            },
            _ => match self.threads {
                Some(0) => Err("--threads must be positive".into()),
                t => Ok(t),
            },
        }
    }

    pub fn options(&self) -> Result<CertifyOptions, String> {
        Ok(CertifyOptions {
            twist: self.twist,
            oracle: self.oracle,
            group_threshold: self.group_threshold,
            oracle_threshold: self.oracle_threshold,
            threads: self.threads()?,
            timestamp: None,
        })
    }
}
