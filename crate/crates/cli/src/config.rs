//! Command-line surface and the run configuration recorded in every artifact.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use primel_core::Orientation;
use serde::Serialize;

use crate::error::{CliError, CliResult};

/// Environment variable naming the default cache directory.
pub const CACHE_ENV: &str = "PRIMEL_CACHE_DIR";

#[derive(Parser, Debug, Clone)]
#[command(
    name = "primel",
    version,
    about = "Exact L-polynomials of quadratic characters and elliptic twists over F_q[x]"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GlobalArgs {
    /// Field size, an odd prime.
    #[arg(long, global = true)]
    pub q: Option<u32>,
    /// Genus; conductors have degree 2g + 1.
    #[arg(long, global = true)]
    pub g: Option<usize>,
    /// Degree of the conductor or twisting prime.
    #[arg(long, global = true)]
    pub deg: Option<usize>,
    /// Worker threads. Not part of the provenance: results do not depend on it.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub threads: Option<usize>,
    /// Cache directory for L-polynomials.
    #[arg(long, global = true, env = CACHE_ENV)]
    pub cache: Option<PathBuf>,
    /// Ignore the cache directory even if one is configured.
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OrientationArg {
    Standard,
    Literal,
}

impl From<OrientationArg> for Orientation {
    fn from(o: OrientationArg) -> Self {
        match o {
            OrientationArg::Standard => Orientation::Standard,
            OrientationArg::Literal => Orientation::Literal,
        }
    }
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "command", content = "args", rename_all = "kebab-case")]
pub enum Command {
    /// Count monic irreducibles of degree --deg, by enumeration and by formula.
    Primes(PrimesArgs),
    /// Build and verify the L-polynomial of one conductor.
    Lpoly(LpolyArgs),
    /// Exact second moment of central values over all conductors of degree 2g+1.
    SweepMoment2(MomentArgs),
    /// Squared approximate functional equation for every conductor of degree 2g+1.
    AfeCheck(SweepArgs),
    /// Root locations and coefficient bounds for every conductor of degree 2g+1.
    RhCheck(SweepArgs),
    /// Diagonal divisor sum against its closed form.
    Diagonal(DiagonalArgs),
    /// Generating function of the squared divisor function by three routes.
    GfCheck(GfArgs),
    /// Character averages over conductors against the q^{-g} deg f bound.
    WeilCheck(WeilArgs),
    /// Tail of the first sum of the approximate functional equation.
    TailE1(TailArgs),
    /// Truncated Euler products for the second-moment constants.
    EulerCheck(EulerArgs),
    /// L-polynomial and reduction data of an elliptic curve.
    EcLpoly(CurveArgs),
    /// Every quadratic twist of a curve by primes of degree --deg.
    EcTwist(CurveArgs),
    /// First-derivative moment of the odd twists by primes of degree 2g+1.
    EcMoment(EcMomentArgs),
    /// First rank-one twist by a prime of degree 2g+1.
    RankSearch(CurveArgs),
    /// Mean square of L on the circle |u| = q^{-1/2}.
    BoundSpotcheck(BoundArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Primes(_) => "primes",
            Command::Lpoly(_) => "lpoly",
            Command::SweepMoment2(_) => "sweep-moment2",
            Command::AfeCheck(_) => "afe-check",
            Command::RhCheck(_) => "rh-check",
            Command::Diagonal(_) => "diagonal",
            Command::GfCheck(_) => "gf-check",
            Command::WeilCheck(_) => "weil-check",
            Command::TailE1(_) => "tail-e1",
            Command::EulerCheck(_) => "euler-check",
            Command::EcLpoly(_) => "ec-lpoly",
            Command::EcTwist(_) => "ec-twist",
            Command::EcMoment(_) => "ec-moment",
            Command::RankSearch(_) => "rank-search",
            Command::BoundSpotcheck(_) => "bound-spotcheck",
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct PrimesArgs {
    /// One row for every degree from 1 to --deg.
    #[arg(long)]
    pub upto: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct LpolyArgs {
    /// Conductor coefficients, lowest degree first, e.g. "1,2,0,1".
    #[arg(long = "p", allow_hyphen_values = true)]
    pub p: String,
    #[arg(long, value_enum, default_value_t = OrientationArg::Standard)]
    pub orientation: OrientationArg,
    /// Also sum the character pointwise and compare.
    #[arg(long)]
    pub direct: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct MomentArgs {
    #[arg(long, value_enum, default_value_t = OrientationArg::Standard)]
    pub orientation: OrientationArg,
    /// Largest admissible cost (conductors × monic polynomials).
    #[arg(long, default_value_t = 2_000_000_000)]
    pub max_cost: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SweepArgs {
    /// One row for every genus from 1 to --g.
    #[arg(long)]
    pub upto: bool,
    #[arg(long, value_enum, default_value_t = OrientationArg::Standard)]
    pub orientation: OrientationArg,
    #[arg(long, default_value_t = 2_000_000_000)]
    pub max_cost: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DiagonalArgs {
    /// Largest X; one row for every X from 1 up.
    #[arg(long, default_value_t = 8)]
    pub x: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GfArgs {
    #[arg(long, default_value_t = 12)]
    pub n_max: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct WeilArgs {
    /// A single monic f (coefficients lowest first); all f of degree ≤ 2g otherwise.
    #[arg(long, allow_hyphen_values = true)]
    pub f: Option<String>,
    #[arg(long, default_value_t = 2_000_000_000)]
    pub max_cost: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct TailArgs {
    #[arg(long)]
    pub x: usize,
    #[arg(long, default_value_t = 2_000_000_000)]
    pub max_cost: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct EulerArgs {
    /// Largest prime degree kept in the truncated products.
    #[arg(long, default_value_t = 12)]
    pub truncation: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CurveArgs {
    /// JSON file {"q": 5, "A": [...], "B": [...]}.
    #[arg(long)]
    pub curve: Option<PathBuf>,
    /// Coefficients of A, lowest degree first.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Coefficients of B, lowest degree first.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    #[arg(long, value_enum, default_value_t = OrientationArg::Literal)]
    pub orientation: OrientationArg,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct EcMomentArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub curve: CurveArgs,
    /// Truncation degree of K(N); the largest available by default.
    #[arg(long)]
    pub sym2_degree: Option<usize>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BoundArgs {
    /// Angles in [0, 2π), comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0.25,0.5,1,1.5707963267948966,3"
    )]
    pub thetas: Vec<f64>,
    #[arg(long, default_value_t = 2_000_000_000)]
    pub max_cost: u64,
}

impl GlobalArgs {
    pub fn require_q(&self) -> CliResult<u32> {
        self.q
            .ok_or_else(|| CliError::Config("--q is required for this command".into()))
    }

    pub fn require_g(&self) -> CliResult<usize> {
        match (self.g, self.deg) {
            (Some(g), _) => Ok(g),
            (None, Some(d)) if d % 2 == 1 => Ok((d - 1) / 2),
            (None, Some(d)) => Err(CliError::Config(format!(
                "--deg {d} is even; conductors have odd degree 2g + 1"
            ))),
            (None, None) => Err(CliError::Config("--g (or --deg) is required".into())),
        }
    }

    pub fn require_deg(&self) -> CliResult<usize> {
        match (self.deg, self.g) {
            (Some(d), _) => Ok(d),
            (None, Some(g)) => Ok(2 * g + 1),
            (None, None) => Err(CliError::Config("--deg (or --g) is required".into())),
        }
    }

    /// Cache directory in effect.
    pub fn cache_dir(&self) -> Option<&PathBuf> {
        if self.no_cache {
            None
        } else {
            self.cache.as_ref()
        }
    }
}

/// Provenance header: the full configuration and the code version. The
/// thread count is left out so that artifacts match across pool sizes.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    #[serde(flatten)]
    pub global: &'a GlobalArgs,
    pub args: serde_json::Value,
}

impl<'a> Provenance<'a> {
    pub fn new(cli: &'a Cli) -> Self {
        Self {
            tool: "primel",
            version: env!("CARGO_PKG_VERSION"),
            command: cli.command.name(),
            global: &cli.global,
            args: serde_json::to_value(&cli.command)
                .ok()
                .and_then(|mut v| v.get_mut("args").map(serde_json::Value::take))
                .unwrap_or_default(),
        }
    }
}

/// Parses "1,0,-1" into integers.
pub fn parse_coeffs(s: &str) -> CliResult<Vec<i64>> {
    let s = s.trim().trim_start_matches('[').trim_end_matches(']');
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| CliError::Config(format!("bad coefficient '{t}' in '{s}'")))
        })
        .collect()
}
