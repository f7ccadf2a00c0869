use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::io::{Read, Write};
use std::process::ExitCode;
use torus_squeeze::barcode::{bottleneck_distance, endpoints_multiset, min_marked_spectrum, Barcode};
use torus_squeeze::diophantine::{convergent_steps, normalize_direction, simultaneous_approx, DEFAULT_DIGITS};
use torus_squeeze::embedding::{
    apply_map, cat3_dominant_eigenvalue, cat_matrix, embed, iterate_width, verify_certificate, CatKind, EmbedLimits,
    EmbeddingCertificate, MapPoint, Verdict,
};
use torus_squeeze::geometry::shortest_orthogonal;
use torus_squeeze::numerics::{int_serde, IntVec};
use torus_squeeze::unimodular::{complete_with_trace, completion_bound, unimodular_complete};
use torus_squeeze::{presets, DirectionSpec, Error, IntMat, Rat, Scalar};

#[derive(Parser)]
#[command(name = "torus-squeeze", version, about = "Exact squeezing certificates on T*T^n and barcode tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Continued-fraction convergents (n = 2) or Dirichlet steps Q = 2, 4, ... (n >= 3).
    Approx(ApproxArgs),
    /// Complete a coprime integer tuple to a matrix in SL(n, Z) with p A = e_1.
    Complete(CompleteArgs),
    /// Search for an embedding certificate.
    Embed(EmbedArgs),
    /// Re-check a certificate.
    Verify(InArgs),
    /// Apply the certified map to a point.
    Map(MapArgs),
    /// Bottleneck distance between two barcodes.
    Bottleneck(BottleneckArgs),
    /// Endpoint multiset and minimal marked spectrum of a barcode.
    Spectrum(InArgs),
    /// Shortest integer vector orthogonal to a direction.
    Ortho(OrthoArgs),
    /// Cat-map matrices and iterated fiber widths.
    Cat(CatArgs),
}

#[derive(Args)]
struct DirectionArgs {
    /// Preset name (golden, sqrt2, cat3-dominant), inline JSON, or a JSON file.
    #[arg(long)]
    direction: String,
    /// Expected dimension.
    #[arg(long)]
    n: Option<usize>,
    /// Decimal digits for enclosures (default from TORUS_SQUEEZE_DIGITS, else 60).
    #[arg(long)]
    digits: Option<u32>,
}

#[derive(Args)]
struct ApproxArgs {
    #[command(flatten)]
    dir: DirectionArgs,
    #[arg(long = "index-max", default_value_t = 10)]
    index_max: usize,
    /// Largest Q, as an integer or `2^k`.
    #[arg(long = "Q-max", default_value = "2^8")]
    q_max: String,
}

#[derive(Args)]
struct CompleteArgs {
    /// Integer tuple as a JSON list.
    #[arg(long)]
    tuple: String,
    /// Include the construction trace (n >= 3).
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct EmbedArgs {
    #[command(flatten)]
    dir: DirectionArgs,
    #[arg(long)]
    r: String,
    #[arg(long = "index-max")]
    index_max: Option<usize>,
    #[arg(long = "Q-max")]
    q_max: Option<String>,
}

#[derive(Args)]
struct InArgs {
    /// Inline JSON or a file path; standard input when omitted or `-`.
    #[arg(long = "in")]
    input: Option<String>,
}

#[derive(Args)]
struct MapArgs {
    /// Certificate: inline JSON, file path, or `-`.
    #[arg(long = "in")]
    input: Option<String>,
    /// Point {"base":[...],"fiber":[...]}: inline JSON or file path.
    #[arg(long)]
    point: String,
}

#[derive(Args)]
struct BottleneckArgs {
    #[arg(long)]
    a: String,
    #[arg(long)]
    b: String,
}

#[derive(Args)]
struct OrthoArgs {
    /// Direction: preset, inline JSON, or file.
    #[arg(long)]
    w: String,
    #[arg(long, default_value = "10")]
    bound: String,
    #[arg(long)]
    digits: Option<u32>,
}

#[derive(Args)]
struct CatArgs {
    /// 2 for cat2, 3 for cat3.
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    k: u32,
    #[arg(long, default_value = "5")]
    r: String,
    /// Direction; defaults to golden (n = 2) or cat3-dominant (n = 3).
    #[arg(long)]
    direction: Option<String>,
    #[arg(long)]
    digits: Option<u32>,
}

/// Failure carrying its exit code and JSON payload.
struct Failure {
    code: u8,
    payload: Value,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::RationalDirection => 1,
            Error::SearchExhausted { .. } | Error::NeedsRefinement(_) => 3,
            _ => 2,
        };
        let mut payload = json!({ "error": e.kind(), "message": e.to_string() });
        match &e {
            Error::SearchExhausted { steps, best_admissible_r } => {
                payload["steps"] = json!(steps);
                payload["best_admissible_r"] = json!(best_admissible_r);
            }
            Error::FiniteExpansion(list) => {
                payload["convergents"] =
                    list.iter().map(|(p, q)| json!([p.to_string(), q.to_string()])).collect::<Value>();
            }
            _ => {}
        }
        Failure { code, payload }
    }
}

#[derive(Serialize, Deserialize)]
struct Ints(#[serde(with = "int_serde::vec")] IntVec);

type Outcome = Result<(u8, Value), Failure>;

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn digits(flag: Option<u32>) -> Result<u32, Error> {
    if let Some(d) = flag {
        return Ok(d);
    }
    match std::env::var("TORUS_SQUEEZE_DIGITS") {
        Ok(s) => s.trim().parse().map_err(|_| Error::Parse(format!("TORUS_SQUEEZE_DIGITS={s:?} is not an integer"))),
        Err(_) => Ok(DEFAULT_DIGITS),
    }
}

/// Inline JSON when the text starts with `{` or `[`, standard input for `-`,
/// otherwise the contents of the named file.
fn read_source(src: Option<&str>) -> Result<String, Error> {
    match src.map(str::trim) {
        None | Some("-") => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| Error::Parse(format!("stdin: {e}")))?;
            Ok(s)
        }
        Some(t) if t.starts_with('{') || t.starts_with('[') => Ok(t.to_string()),
        Some(path) => std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{path}: {e}"))),
    }
}

fn parse_json<T: serde::de::DeserializeOwned>(src: Option<&str>) -> Result<T, Error> {
    Ok(serde_json::from_str(&read_source(src)?)?)
}

fn parse_direction(text: &str, digits: u32) -> Result<DirectionSpec, Error> {
    if presets::NAMES.contains(&text.trim()) {
        return presets::preset(text.trim(), digits);
    }
    let value: Value = serde_json::from_str(&read_source(Some(text))?)?;
    if value.is_array() {
        let raw: Vec<Scalar> = serde_json::from_value(value)?;
        normalize_direction(raw, digits)
    } else {
        Ok(serde_json::from_value(value)?)
    }
}

fn load_direction(args: &DirectionArgs) -> Result<(DirectionSpec, u32), Error> {
    let d = digits(args.digits)?;
    let v = parse_direction(&args.direction, d)?;
    if let Some(n) = args.n {
        if n != v.n() {
            return Err(Error::InvalidInput(format!("--n {n} but the direction has {} entries", v.n())));
        }
    }
    Ok((v, d))
}

fn parse_big(text: &str) -> Result<BigInt, Error> {
    let t = text.trim();
    if let Some(k) = t.strip_prefix("2^") {
        let k: u32 = k.parse().map_err(|_| Error::Parse(format!("bad exponent in {t:?}")))?;
        return Ok(BigInt::from(1) << k);
    }
    t.parse().map_err(|_| Error::Parse(format!("not an integer: {t:?}")))
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Approx(a) => {
            let (v, _) = load_direction(&a.dir)?;
            let steps = if v.n() == 2 {
                convergent_steps(&v.entries()[1], a.index_max)?
            } else {
                let q_max = parse_big(&a.q_max)?;
                let mut q = BigInt::from(2);
                let mut out = Vec::new();
                while q <= q_max {
                    out.push(simultaneous_approx(&v, &q)?);
                    q <<= 1;
                }
                out
            };
            Ok((0, json!({ "direction": to_value(&v), "steps": to_value(&steps) })))
        }
        Command::Complete(c) => {
            let Ints(p) = parse_json(Some(&c.tuple))?;
            let a = unimodular_complete(&p)?;
            let mut out = json!({
                "p": to_value(&Ints(p.clone())),
                "A": to_value(&a),
                "bound": completion_bound(&p).to_string(),
            });
            if c.trace && p.len() >= 3 {
                out["trace"] = to_value(&complete_with_trace(&p)?);
            }
            Ok((0, out))
        }
        Command::Embed(e) => {
            let (v, d) = load_direction(&e.dir)?;
            let r = Rat::parse(&e.r)?;
            let mut limits = EmbedLimits { digits: d, ..EmbedLimits::default() };
            if let Some(k) = e.index_max {
                limits.max_index = k;
            }
            if let Some(q) = &e.q_max {
                limits.q_max = parse_big(q)?;
            }
            Ok((0, to_value(&embed(&v, &r, &limits)?)))
        }
        Command::Verify(i) => {
            let cert: EmbeddingCertificate = parse_json(i.input.as_deref())?;
            let verdict = verify_certificate(&cert)?;
            let code = if matches!(verdict, Verdict::Accept) { 0 } else { 1 };
            Ok((code, to_value(&verdict)))
        }
        Command::Map(m) => {
            let cert: EmbeddingCertificate = parse_json(m.input.as_deref())?;
            let pt: MapPoint = parse_json(Some(&m.point))?;
            let pt = MapPoint::new(pt.base, pt.fiber)?;
            Ok((0, to_value(&apply_map(&cert, &pt)?)))
        }
        Command::Bottleneck(b) => {
            let x: Barcode = parse_json(Some(&b.a))?;
            let y: Barcode = parse_json(Some(&b.b))?;
            Ok((0, json!({ "distance": to_value(&bottleneck_distance(&x, &y)) })))
        }
        Command::Spectrum(i) => {
            let b: Barcode = parse_json(i.input.as_deref())?;
            let e = endpoints_multiset(&b);
            Ok((
                0,
                json!({
                    "endpoints": to_value(&e.finite),
                    "infinite": e.infinite,
                    "min_marked_spectrum": to_value(&min_marked_spectrum(&b)),
                }),
            ))
        }
        Command::Ortho(o) => {
            let w = parse_direction(&o.w, digits(o.digits)?)?;
            let bound = parse_big(&o.bound)?;
            let z = shortest_orthogonal(&w, &bound)?;
            let norm_sq = z.as_ref().map(|z| z.iter().map(|x| x * x).sum::<BigInt>().to_string());
            Ok((0, json!({ "z": z.map(|z| to_value(&Ints(z))), "norm_sq": norm_sq })))
        }
        Command::Cat(c) => {
            let d = digits(c.digits)?;
            let (kind, preset) = match c.n {
                2 => (CatKind::Cat2, "golden"),
                3 => (CatKind::Cat3, "cat3-dominant"),
                n => return Err(Error::InvalidInput(format!("no cat matrix for n = {n}")).into()),
            };
            let a: IntMat = cat_matrix(kind);
            let v = parse_direction(c.direction.as_deref().unwrap_or(preset), d)?;
            let r = Rat::parse(&c.r)?;
            let e = iterate_width(&a, c.k, &r, &v)?;
            let mut out = json!({
                "matrix": to_value(&a),
                "k": c.k,
                "r": to_value(&r),
                "extent": to_value(&e),
                "unit_width_below_2": e.unit_width_below(&Rat::int(2))?,
            });
            if kind == CatKind::Cat3 {
                out["dominant_eigenvalue"] = to_value(&cat3_dominant_eigenvalue(64));
            }
            Ok((0, out))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (code, payload) = match run(cli.command) {
        Ok(x) => x,
        Err(f) => {
            if let Some(msg) = f.payload.get("message").and_then(Value::as_str) {
                eprintln!("torus-squeeze: {msg}");
            }
            (f.code, f.payload)
        }
    };
    // A closed pipe downstream is not our failure.
    let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(&payload).expect("json"));
    ExitCode::from(code)
}
