//! The `padic-dendro` command line.
//!
//! Point lists are read from `--in FILE`, from values given after the
//! command, or from standard input, in that order of preference. A point
//! list is either text (values separated by newlines, blanks or commas, `#`
//! starting a comment) or JSON (an array of values, or an object with a
//! `points` array). Values are integers, fractions `a/b`, or `inf`.
//!
//! Exit codes: 0 on success, 1 when the input is rejected, 2 on usage errors.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::dendrogram::{self, build_dendrogram, valuation_matrix, Dendrogram};
use crate::encoding::{embed_dendrogram, encode_strings, AbstractDendrogram, DigitAlphabet};
use crate::error::Error;
use crate::family::{
    attachment_distribution, build_family, insert_point, parse_family_input, sample_insertions, ClassifierMode,
};
use crate::hidden::hidden_stats;
use crate::padic::{digits, pairwise_valuation, ExtendedPoint, Prime, Rational, Valuation};

#[derive(Debug, Parser)]
#[command(name = "padic-dendro", version, about = "Exact p-adic valuations and dendrograms")]
struct Cli {
    /// Prime used for valuations [default: 2, or the prime of an input
    /// dendrogram].
    #[arg(long, global = true, value_parser = parse_prime)]
    p: Option<Prime>,

    /// Read input from FILE instead of the command line or stdin.
    #[arg(long = "in", global = true, value_name = "FILE")]
    input: Option<PathBuf>,

    /// Write output to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Newick,
    Dot,
    Table,
}

#[derive(Debug, Args)]
struct Values {
    /// Points given inline.
    #[arg(allow_hyphen_values = true, value_name = "VALUE")]
    values: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pairwise valuation matrix of the points.
    Valuate {
        #[command(flatten)]
        values: Values,
        /// Also print this many p-adic digits of each finite point.
        #[arg(long)]
        digits: Option<u32>,
    },
    /// Dendrogram of the points.
    Cluster {
        #[command(flatten)]
        values: Values,
        /// Add the end at infinity.
        #[arg(long)]
        include_infinity: bool,
    },
    /// Hidden-vertex counts and their bounds.
    Hidden {
        #[command(flatten)]
        values: Values,
        #[arg(long)]
        include_infinity: bool,
    },
    /// Insert a point into a dendrogram (JSON from `cluster`, or a point list).
    Insert {
        /// The new point.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// uniform, haar or user:FILE.
        #[arg(long, default_value = "uniform")]
        mode: String,
        #[arg(long)]
        include_infinity: bool,
    },
    /// Draw attachment sites from a classifier distribution.
    Sample {
        #[arg(long, default_value = "uniform")]
        mode: String,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long)]
        include_infinity: bool,
    },
    /// Dendrograms and transitions of a series of configurations.
    Family,
    /// Digit codes realizing a dendrogram.
    Embed {
        /// Alphabet size, a power of p. Defaults to p.
        #[arg(long)]
        q: Option<u64>,
    },
    /// Digit codes of strings, one string per line.
    Encode {
        /// Symbols in digit order. Defaults to the sorted symbols used.
        #[arg(long)]
        alphabet: Option<String>,
    },
}

fn parse_prime(s: &str) -> Result<Prime, String> {
    let n: u64 = s.parse().map_err(|_| format!("'{s}' is not a positive integer"))?;
    Prime::new(n).map_err(|e| e.to_string())
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    /// A value that could not be parsed, with where it was found.
    Input {
        location: String,
        token: String,
        reason: String,
    },
    Domain(Error),
    Io {
        path: PathBuf,
        message: String,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => f.write_str(msg.trim_end()),
            CliError::Input {
                location,
                token,
                reason,
            } => write!(f, "{location}: invalid value '{token}': {reason}"),
            CliError::Domain(e) => write!(f, "error: {e}"),
            CliError::Io { path, message } => write!(f, "error: {}: {message}", path.display()),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

/// Parses `args` (program name first), runs the command and returns what
/// should go to stdout. With `--out` the output is written there and the
/// returned string is empty.
pub fn run<I, T>(args: I) -> Result<String, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Ok(e.to_string()),
                _ => Err(CliError::Usage(e.to_string())),
            }
        }
    };
    let mut text = execute(&cli)?;
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &cli.out {
        Some(path) => {
            fs::write(path, &text).map_err(|e| io_error(path, e))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn pretty(value: &Value) -> String {
    serde_json::to_string_pretty(value).expect("json renders")
}

fn require_json(cli: &Cli, command: &str) -> Result<(), CliError> {
    if cli.format != Format::Json {
        return Err(CliError::Usage(format!(
            "error: '{command}' only supports --format json"
        )));
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<String, CliError> {
    let p = cli.p.unwrap_or(Prime::TWO);
    match &cli.command {
        Command::Valuate {
            values,
            digits: precision,
        } => {
            let points = read_points(cli, values)?;
            if points.is_empty() {
                return Err(Error::TooFewPoints { required: 1, found: 0 }.into());
            }
            let m = valuation_matrix(&points, p)?;
            let expansions: Vec<(String, String)> = match precision {
                Some(k) => points
                    .iter()
                    .filter_map(|x| x.as_finite())
                    .map(|x| (x.to_string(), digits(x, p, *k).to_bracket(*k as usize)))
                    .collect(),
                None => Vec::new(),
            };
            match cli.format {
                Format::Json => {
                    let mut v = serde_json::to_value(&m).expect("matrix serializes");
                    if precision.is_some() {
                        let map = expansions.into_iter().map(|(k, e)| (k, Value::String(e))).collect();
                        v["digits"] = Value::Object(map);
                    }
                    Ok(pretty(&v))
                }
                Format::Table => {
                    let mut out = m.to_table();
                    for (x, e) in expansions {
                        out.push_str(&format!("{x} = {e}\n"));
                    }
                    Ok(out)
                }
                _ => Err(CliError::Usage(
                    "error: 'valuate' supports --format json or table".into(),
                )),
            }
        }
        Command::Cluster {
            values,
            include_infinity,
        } => {
            let d = build_dendrogram(&with_infinity(read_points(cli, values)?, *include_infinity), p)?;
            Ok(match cli.format {
                Format::Json => dendrogram::to_json(&d),
                Format::Newick => dendrogram::to_newick(&d),
                Format::Dot => dendrogram::to_dot(&d),
                Format::Table => d.labeled_signature(),
            })
        }
        Command::Hidden {
            values,
            include_infinity,
        } => {
            require_json(cli, "hidden")?;
            let d = build_dendrogram(&with_infinity(read_points(cli, values)?, *include_infinity), p)?;
            Ok(hidden_stats(&d).to_json())
        }
        Command::Insert {
            x,
            mode,
            include_infinity,
        } => {
            require_json(cli, "insert")?;
            let x: ExtendedPoint = x.parse().map_err(|e: Error| CliError::Input {
                location: "--x".into(),
                token: x.clone(),
                reason: reason_of(e),
            })?;
            let d = read_dendrogram(cli, *include_infinity)?;
            let p = d.prime();
            let mode = parse_mode(mode)?;
            let dist = attachment_distribution(&d, &mode)?;
            let (updated, site) = insert_point(&d, &x)?;
            let level = x.as_finite().map(|_| {
                d.points()
                    .iter()
                    .map(|y| pairwise_valuation(&x, y, p))
                    .filter(|v| v.is_finite())
                    .max()
                    .unwrap_or(Valuation::NegInfinity)
            });
            Ok(pretty(&json!({
                "dendrogram": dendrogram_value(&updated),
                "site": site,
                "attach_level": level,
                "probability": dist.weight_of(&site),
                "distribution": dist,
            })))
        }
        Command::Sample {
            mode,
            seed,
            count,
            include_infinity,
        } => {
            require_json(cli, "sample")?;
            let d = read_dendrogram(cli, *include_infinity)?;
            let dist = attachment_distribution(&d, &parse_mode(mode)?)?;
            let draws = sample_insertions(&dist, *seed, *count)?;
            Ok(pretty(&json!({ "seed": seed, "draws": draws })))
        }
        Command::Family => {
            require_json(cli, "family")?;
            let (fp, configs) = parse_family_input(&read_input(cli)?)?;
            Ok(build_family(&configs, fp)?.to_json())
        }
        Command::Embed { q } => {
            require_json(cli, "embed")?;
            let text = read_input(cli)?;
            let (abstract_tree, p) = match serde_json::from_str::<Value>(&text) {
                Ok(v) if v.get("tree").is_some() && v.get("points").is_none() => {
                    (AbstractDendrogram::from_json(&text)?, p)
                }
                _ => {
                    let d = dendrogram_from_text(&text, cli.p, false)?;
                    (AbstractDendrogram::from_dendrogram(&d), d.prime())
                }
            };
            let alphabet = match q {
                Some(q) => DigitAlphabet::from_size(*q)?,
                None => DigitAlphabet::new(p, 1)?,
            };
            if alphabet.prime() != p {
                return Err(CliError::Usage(format!(
                    "error: --q {} is not a power of p = {p}",
                    alphabet.size()
                )));
            }
            Ok(embed_dendrogram(&abstract_tree, alphabet)?.to_json())
        }
        Command::Encode { alphabet } => {
            require_json(cli, "encode")?;
            let text = read_input(cli)?;
            let strings: Vec<String> = text.lines().filter(|l| !l.is_empty()).map(str::to_owned).collect();
            let symbols: Option<Vec<char>> = alphabet.as_ref().map(|a| a.chars().collect());
            Ok(encode_strings(&strings, p, symbols.as_deref())?.to_json())
        }
    }
}

fn reason_of(e: Error) -> String {
    match e {
        Error::InvalidRational { reason, .. } => reason,
        other => other.to_string(),
    }
}

fn with_infinity(mut points: Vec<ExtendedPoint>, include: bool) -> Vec<ExtendedPoint> {
    if include && !points.iter().any(ExtendedPoint::is_infinity) {
        points.push(ExtendedPoint::Infinity);
    }
    points
}

fn dendrogram_value(d: &Dendrogram) -> Value {
    dendrogram::format::to_json_value(d)
}

fn read_input(cli: &Cli) -> Result<String, CliError> {
    match &cli.input {
        Some(path) => fs::read_to_string(path).map_err(|e| io_error(path, e)),
        None => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| io_error(Path::new("<stdin>"), e))?;
            Ok(s)
        }
    }
}

fn read_points(cli: &Cli, values: &Values) -> Result<Vec<ExtendedPoint>, CliError> {
    if cli.input.is_none() && !values.values.is_empty() {
        return values
            .values
            .iter()
            .enumerate()
            .map(|(k, tok)| {
                tok.parse().map_err(|e| CliError::Input {
                    location: format!("argument {}", k + 1),
                    token: tok.clone(),
                    reason: reason_of(e),
                })
            })
            .collect();
    }
    if cli.input.is_some() && !values.values.is_empty() {
        return Err(CliError::Usage(
            "error: give points either inline or with --in, not both".into(),
        ));
    }
    parse_point_text(&read_input(cli)?)
}

/// A dendrogram from its JSON form, or built from a point list.
fn read_dendrogram(cli: &Cli, include_infinity: bool) -> Result<Dendrogram, CliError> {
    dendrogram_from_text(&read_input(cli)?, cli.p, include_infinity)
}

fn dendrogram_from_text(text: &str, p: Option<Prime>, include_infinity: bool) -> Result<Dendrogram, CliError> {
    if let Ok(v) = serde_json::from_str::<Value>(text) {
        if v.get("tree").is_some() {
            let d = dendrogram::format::from_json_value(v)?;
            if let Some(p) = p.filter(|&p| p != d.prime()) {
                return Err(CliError::Usage(format!(
                    "error: the dendrogram is over p = {} but --p is {p}",
                    d.prime()
                )));
            }
            if include_infinity && !d.has_infinity_end() {
                return Ok(insert_point(&d, &ExtendedPoint::Infinity)?.0);
            }
            return Ok(d);
        }
    }
    let points = with_infinity(parse_point_text(text)?, include_infinity);
    Ok(build_dendrogram(&points, p.unwrap_or(Prime::TWO))?)
}

/// Text or JSON point list.
pub fn parse_point_text(text: &str) -> Result<Vec<ExtendedPoint>, CliError> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') || trimmed.starts_with('{') {
        let v: Value = serde_json::from_str(text).map_err(|e| {
            CliError::Domain(Error::Parse {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })
        })?;
        let items = match &v {
            Value::Array(items) => items,
            Value::Object(map) => match map.get("points") {
                Some(Value::Array(items)) => items,
                _ => return Err(CliError::Usage("error: JSON input needs a \"points\" array".into())),
            },
            _ => unreachable!("starts with a bracket"),
        };
        return items
            .iter()
            .enumerate()
            .map(|(k, item)| {
                let token = match item {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                token.parse().map_err(|e| CliError::Input {
                    location: format!("points[{k}]"),
                    token: token.clone(),
                    reason: reason_of(e),
                })
            })
            .collect();
    }
    let mut points = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("");
        let mut offset = 0;
        for piece in content.split(|c: char| c.is_whitespace() || c == ',') {
            let column = content[..offset].chars().count() + 1;
            offset += piece.len() + 1;
            if piece.is_empty() {
                continue;
            }
            let x = piece.parse().map_err(|e| CliError::Input {
                location: format!("line {}, column {column}", line_no + 1),
                token: piece.to_owned(),
                reason: reason_of(e),
            })?;
            points.push(x);
        }
    }
    Ok(points)
}

fn parse_mode(mode: &str) -> Result<ClassifierMode, CliError> {
    match mode {
        "uniform" => Ok(ClassifierMode::Uniform),
        "haar" => Ok(ClassifierMode::Haar),
        _ => {
            let Some(file) = mode.strip_prefix("user:") else {
                return Err(CliError::Usage(format!(
                    "error: invalid --mode '{mode}' (expected uniform, haar or user:FILE)"
                )));
            };
            let path = Path::new(file);
            let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
            let weights = parse_point_text(&text)?
                .into_iter()
                .enumerate()
                .map(|(k, w)| match w {
                    ExtendedPoint::Finite(r) => Ok(r),
                    ExtendedPoint::Infinity => Err(CliError::Input {
                        location: format!("{file}, weight {}", k + 1),
                        token: "inf".into(),
                        reason: "weights must be finite".into(),
                    }),
                })
                .collect::<Result<Vec<Rational>, _>>()?;
            Ok(ClassifierMode::User(weights))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Result<String, CliError> {
        run(std::iter::once("padic-dendro").chain(args.iter().copied()))
    }

    #[test]
    fn inline_cluster() {
        let out = run_args(&["cluster", "--format", "table", "0", "1"]).unwrap();
        assert_eq!(out, "(0,1)@0\n");
    }

    #[test]
    fn negative_inline_values() {
        let out = run_args(&["cluster", "--format", "table", "-1/2", "3/2", "2"]).unwrap();
        assert!(out.contains("@-1"), "{out}");
    }

    #[test]
    fn text_parsing_locates_errors() {
        let err = parse_point_text("0 1\n# note\n3, 4x\n").unwrap_err();
        match err {
            CliError::Input { location, token, .. } => {
                assert_eq!(location, "line 3, column 4");
                assert_eq!(token, "4x");
            }
            other => panic!("{other:?}"),
        }
        let pts = parse_point_text("0\n1 # one\n\n1/2,inf\n").unwrap();
        assert_eq!(pts.len(), 4);
        assert_eq!(parse_point_text("[0, \"1/3\", \"inf\"]").unwrap().len(), 3);
        assert_eq!(parse_point_text("{\"points\": [5, 7]}").unwrap().len(), 2);
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_args(&["cluster", "--p", "4", "0", "1"]).unwrap_err().exit_code(), 2);
        assert_eq!(run_args(&["bogus"]).unwrap_err().exit_code(), 2);
        assert_eq!(
            run_args(&["hidden", "--format", "dot", "0", "1"])
                .unwrap_err()
                .exit_code(),
            2
        );
        assert_eq!(
            run_args(&["valuate", "--format", "newick", "0"])
                .unwrap_err()
                .exit_code(),
            2
        );
    }

    #[test]
    fn domain_errors() {
        let err = run_args(&["cluster", "0", "1", "0"]).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().contains("positions 0 and 2"), "{err}");
        assert_eq!(run_args(&["cluster", "5"]).unwrap_err().exit_code(), 1);
    }

    #[test]
    fn valuate_single_point() {
        let out = run_args(&["valuate", "7"]).unwrap();
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["matrix"], json!([["inf"]]));
    }

    #[test]
    fn valuate_three_halves() {
        let out = run_args(&["valuate", "--p", "3", "--format", "table", "--digits", "4", "3/2", "0"]).unwrap();
        assert!(out.contains(" 1"), "{out}");
    }
}
