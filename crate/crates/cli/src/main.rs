use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use vsc_core::cache::DiskCache;
use vsc_core::cy;
use vsc_core::elliptic::{elliptic_breakdown, elliptic_vsc_cached, variable_count};
use vsc_core::genus0::genus0_vsc;
use vsc_core::graphs::graphs_of_degree;
use vsc_core::params::{HypersurfaceParams, InsertionVector};
use vsc_core::pipeline::{build_mirror_map, genus1_gw, integrality_report, records_to_json, records_to_tsv, RationalJson};
use vsc_core::rational::{fmt_q, Q};
use vsc_core::series::TruncatedSeries;
use vsc_core::Error;

const DEFAULT_CACHE: &str = ".vsc-cache";

#[derive(Parser)]
#[command(name = "vsc", version, about = "Exact virtual structure constants and Gromov-Witten invariants of projective hypersurfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Residue cache directory (VSC_CACHE takes precedence)
    #[arg(long, global = true, value_name = "DIR")]
    cache_dir: Option<PathBuf>,

    /// Recompute everything, ignoring the cache
    #[arg(long, global = true)]
    no_cache: bool,

    /// Worker threads (default: available parallelism)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Tsv)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Tsv,
    Json,
}

#[derive(Args)]
struct Target {
    /// Ambient projective space is CP^{N-1}
    #[arg(long = "N", value_name = "N")]
    n: u32,
    /// Degree of the hypersurface
    #[arg(long)]
    k: u32,
}

impl Target {
    fn params(&self) -> vsc_core::Result<HypersurfaceParams> {
        HypersurfaceParams::new(self.n, self.k)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Genus-0 constant w(O_{h^a} O_{h^b} | insertions)_{0,d}
    G0 {
        #[command(flatten)]
        target: Target,
        #[arg(long, allow_negative_numbers = true)]
        d: i64,
        #[arg(long, allow_negative_numbers = true)]
        a: i32,
        #[arg(long, allow_negative_numbers = true)]
        b: i32,
        /// Insertions as `p:m,p:m`
        #[arg(long, default_value = "")]
        ins: String,
    },
    /// Elliptic constant w(insertions)_{1,d}
    G1 {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        d: i64,
        #[arg(long, default_value = "")]
        ins: String,
        /// List the residue of every graph
        #[arg(long)]
        breakdown: bool,
    },
    /// Mirror map t(x) and its inverse x(t)
    Mirror {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        dmax: u32,
    },
    /// Genus-0 and genus-1 Gromov-Witten tables
    Gw {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        dmax: u32,
        /// Fail unless every combination column is an integer
        #[arg(long)]
        check: bool,
    },
    /// Calabi-Yau M_k^k: loop identity and closed genus-1 formula
    Bcov {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        dmax: u32,
        /// Print per-degree OK lines and fail on any mismatch
        #[arg(long)]
        check: bool,
    },
    /// Graphs contributing in degree d
    Catalog {
        #[arg(long)]
        d: u32,
    },
}

enum Failure {
    Core(Error),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Run = Result<String, Failure>;

fn cache(cli: &Cli) -> vsc_core::Result<Option<DiskCache>> {
    if cli.no_cache {
        return Ok(None);
    }
    let dir = std::env::var_os("VSC_CACHE")
        .map(PathBuf::from)
        .or_else(|| cli.cache_dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE));
    DiskCache::open(dir).map(Some)
}

fn parse_ins(s: &str, params: &HypersurfaceParams) -> vsc_core::Result<InsertionVector> {
    let ins = if s.trim().is_empty() { InsertionVector::empty() } else { InsertionVector::parse(s)? };
    ins.validate(params)?;
    Ok(ins)
}

fn rj(q: &Q) -> RationalJson {
    RationalJson::from_q(q)
}

fn to_json<T: Serialize>(v: &T) -> vsc_core::Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn series_rows(out: &mut String, name: &str, s: &TruncatedSeries) {
    for (key, c) in s.terms() {
        let ins = InsertionVector::from_pairs((0..s.shape().nblock).map(|i| (i as u32 + 2, key.e[i] as u32)));
        out.push_str(&format!("{name}\t{}\t{}\t{}\n", key.d, ins.key(), fmt_q(c)));
    }
}

fn run(cli: &Cli) -> Run {
    if let Some(n) = cli.threads {
        vsc_core::parallel::set_threads(n)?;
    }
    let json = cli.format == Format::Json;
    match &cli.command {
        Command::G0 { target, d, a, b, ins } => {
            let params = target.params()?;
            let ins = parse_ins(ins, &params)?;
            let v = genus0_vsc(&params, *d, *a, *b, &ins)?;
            if json {
                Ok(to_json(&json!({"N": params.n, "k": params.k, "d": d, "a": a, "b": b, "ins": ins.key(), "value": rj(&v)}))?)
            } else {
                Ok(format!("{}\n", fmt_q(&v)))
            }
        }
        Command::G1 { target, d, ins, breakdown } => {
            let params = target.params()?;
            let ins = parse_ins(ins, &params)?;
            let cache = cache(cli)?;
            let v = elliptic_vsc_cached(&params, *d, &ins, cache.as_ref())?;
            let graphs = if *breakdown {
                let (_, _, high) = ins.split_low();
                elliptic_breakdown(&params, *d as u32, &high, cache.as_ref())?
            } else {
                Vec::new()
            };
            if json {
                let graphs: Vec<_> = graphs
                    .iter()
                    .map(|(g, v)| json!({"graph": g.to_string(), "type": g.type_label(), "value": rj(v)}))
                    .collect();
                Ok(to_json(&json!({"N": params.n, "k": params.k, "d": d, "ins": ins.key(), "value": rj(&v), "graphs": graphs}))?)
            } else if *breakdown {
                let mut out = String::from("graph\ttype\tresidue\n");
                for (g, r) in &graphs {
                    out += &format!("{g}\t{}\t{}\n", g.type_label(), fmt_q(r));
                }
                out += &format!("total\t-\t{}\n", fmt_q(&v));
                Ok(out)
            } else {
                Ok(format!("{}\n", fmt_q(&v)))
            }
        }
        Command::Mirror { target, dmax } => {
            let params = target.params()?;
            let mm = build_mirror_map(&params, *dmax)?;
            let sub = mm.invert()?;
            let mut x = vec![sub.q_exponent.clone()];
            x.extend(sub.blocks.iter().cloned());
            if json {
                let t: Vec<_> = mm.corrections.iter().map(TruncatedSeries::to_json).collect();
                let x: Vec<_> = x.iter().map(TruncatedSeries::to_json).collect();
                Ok(to_json(&json!({"N": params.n, "k": params.k, "q_cap": dmax, "t": t, "x": x}))?)
            } else {
                let mut out = String::from("series\td\tins\tcoeff\n");
                for (i, c) in mm.corrections.iter().enumerate() {
                    series_rows(&mut out, &format!("t{}", i + 1), c);
                }
                for (i, c) in x.iter().enumerate() {
                    series_rows(&mut out, &format!("x{}", i + 1), c);
                }
                Ok(out)
            }
        }
        Command::Gw { target, dmax, check } => {
            let params = target.params()?;
            let cache = cache(cli)?;
            let tables = genus1_gw(&params, *dmax, cache.as_ref())?;
            let out = if json {
                to_json(&records_to_json(&params, *dmax, &tables.records))?
            } else {
                records_to_tsv(&params, &tables.records)?
            };
            if *check {
                let rep = integrality_report(&tables.records);
                eprintln!("integrality: {} rows checked, {} non-integral", rep.checked, rep.failures.len());
                if !rep.all_integral() {
                    return Err(Failure::Check(format!("{out}non-integral combinations at {:?}", rep.failures)));
                }
            }
            Ok(out)
        }
        Command::Bcov { k, dmax, check } => {
            let cache = cache(cli)?;
            let loop_id = cy::check_loop_identity(*k, *dmax, cache.as_ref())?;
            let closed = cy::check_closed_form(*k, *dmax, cache.as_ref())?;
            if *check {
                let mut out = String::new();
                let mut ok = true;
                for (l, c) in loop_id.rows.iter().zip(&closed.rows).skip(1) {
                    let good = l.holds() && c.holds();
                    ok &= good;
                    out += &format!("d={} {}\n", l.d, if good { "OK" } else { "MISMATCH" });
                }
                if ok {
                    Ok(out + "all identities hold\n")
                } else {
                    Err(Failure::Check(out + "identity check failed\n"))
                }
            } else if json {
                let rows = |r: &cy::IdentityReport| -> Vec<serde_json::Value> {
                    r.rows.iter().map(|x| json!({"d": x.d, "lhs": rj(&x.lhs), "rhs": rj(&x.rhs), "equal": x.holds()})).collect()
                };
                Ok(to_json(&json!({"k": k, "q_cap": dmax, "loop_identity": rows(&loop_id), "closed_form": rows(&closed)}))?)
            } else {
                Ok(format!("# {}\n{}# {}\n{}", loop_id.name, loop_id.to_tsv(), closed.name, closed.to_tsv()))
            }
        }
        Command::Catalog { d } => {
            let graphs = graphs_of_degree(*d);
            if json {
                let g: Vec<_> = graphs
                    .iter()
                    .map(|g| json!({"graph": g.to_string(), "type": g.type_label(), "variables": variable_count(g)}))
                    .collect();
                Ok(to_json(&json!({"d": d, "count": graphs.len(), "graphs": g}))?)
            } else {
                let mut out = String::from("graph\ttype\tvariables\n");
                for g in &graphs {
                    out += &format!("{g}\t{}\t{}\n", g.type_label(), variable_count(g));
                }
                Ok(out)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Check(out)) => {
            print!("{out}");
            ExitCode::from(1)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::InvalidParams(_) | Error::Parse(_) => 2,
                e if e.is_internal() => 3,
                _ => 1,
            })
        }
    }
}
