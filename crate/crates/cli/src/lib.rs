//! Command-line front end for `lrsum-core`.
//!
//! Every subcommand writes either one JSON document, JSON Lines (one record
//! per modulus for `--ell-range` sweeps) or a CSV table.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lrsum_core::arith::{self, Exponent};
use lrsum_core::{density, expsum, hypotheses, lrs, modforms, waring};
use lrsum_core::{Error, HeckeParams, LinRecSeq};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_GUARD: i32 = 3;

/// Histograms above this modulus are dropped from `expsum` output unless requested.
const HISTOGRAM_EMIT_MAX: u64 = 10_000;

#[derive(Parser, Debug)]
#[command(name = "lrsum", version, about = "Exponential sums of linear recurrence sequences and Hecke coefficients")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format; `tau` defaults to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Complete exponential sums over one period.
    Expsum {
        #[command(flatten)]
        seq: SeqArgs,
        /// Keep the value histogram even for large moduli.
        #[arg(long)]
        histogram: bool,
        /// Also evaluate the sum over `n ≤ X`.
        #[arg(long, value_name = "X")]
        range: Option<u128>,
        #[arg(long, default_value_t = 1)]
        xi: u64,
    },
    /// Least period.
    Period {
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long, value_name = "A..B", value_parser = parse_range)]
        ell_range: Option<(u64, u64)>,
    },
    /// Spectral decomposition into traces of root powers.
    Spectral {
        #[command(flatten)]
        seq: SeqArgs,
    },
    /// Order and gcd hypotheses.
    Check {
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long, value_parser = parse_eps, default_value = "1/3")]
        eps: Exponent,
        /// Defaults to `--eps`.
        #[arg(long, value_parser = parse_eps)]
        eps2: Option<Exponent>,
        #[arg(long, value_name = "A..B", value_parser = parse_range)]
        ell_range: Option<(u64, u64)>,
    },
    /// Resultant certificate excluding primes with small root orders.
    Exclude {
        /// `A,B` for `x² + Ax + B`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "hecke")]
        omega: Option<Vec<i64>>,
        #[command(flatten)]
        form: FormArgs,
        #[arg(short = 'T', default_value_t = 6)]
        t: u32,
        #[arg(long, default_value_t = 1000)]
        scan_bound: u64,
    },
    /// Ramanujan τ(1..n).
    Tau {
        #[arg(long, default_value_t = 100)]
        nmax: usize,
    },
    /// Prime-power Hecke coefficients and their reduction.
    Hecke {
        #[command(flatten)]
        form: FormArgs,
        #[arg(short = 'l', long = "ell")]
        ell: Option<u64>,
        #[arg(long, default_value_t = 20)]
        nmax: usize,
        #[arg(long, default_value_t = 100)]
        u_max: usize,
    },
    /// Representation counts `T_k(λ)`.
    Waring {
        #[command(flatten)]
        seq: SeqArgs,
        /// Number of summands.
        #[arg(short = 'k', default_value_t = 2)]
        k: u32,
        #[arg(long, default_value_t = 64)]
        basis_max: u32,
    },
    /// Nonlinearity sums over base-ℓ digit vectors.
    Nonlin {
        #[command(flatten)]
        seq: SeqArgs,
        /// Emit all `W(b)`, not only the maximum.
        #[arg(long)]
        values: bool,
    },
    /// GL₂(F_ℓ) density lower bounds.
    Density {
        #[arg(short = 'l', long = "ell", required_unless_present = "ell_range")]
        ell: Option<u64>,
        #[arg(long, value_name = "A..B", value_parser = parse_range)]
        ell_range: Option<(u64, u64)>,
        #[arg(long, value_parser = parse_eps, default_value = "1/3")]
        eps: Exponent,
        /// Also count nice `2r`-tuples.
        #[arg(short = 'r')]
        r: Option<u32>,
        /// Weight for the nice-tuple power condition.
        #[arg(short = 'k', default_value_t = 12)]
        k: u32,
    },
    /// Frobenius-class sampling of Δ (or coefficients from a file).
    Sample {
        #[arg(short = 'l', long = "ell")]
        ell: u64,
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
        #[arg(long, value_parser = parse_eps, default_value = "1/3")]
        eps: Exponent,
        /// JSON object mapping primes to `a_p` (integers or "m/n").
        #[arg(long)]
        ap_file: Option<PathBuf>,
        #[arg(long, default_value_t = 12)]
        weight: u32,
    },
}

/// Sequence selection shared by the sequence subcommands.
///
/// `--coeffs a0,…,a_{r-1}` means `s_{n+r} = a_{r-1} s_{n+r-1} + … + a_0 s_n`.
#[derive(Args, Debug)]
struct SeqArgs {
    /// Fibonacci sequence modulo `-p`.
    #[arg(long, conflicts_with_all = ["coeffs", "hecke"])]
    fib: bool,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, requires = "init", conflicts_with = "hecke")]
    coeffs: Option<Vec<i64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    init: Option<Vec<i64>>,
    #[command(flatten)]
    form: FormArgs,
    /// Modulus for Hecke sequences.
    #[arg(short = 'l', long = "ell")]
    ell: Option<u64>,
}

#[derive(Args, Debug)]
struct FormArgs {
    /// `delta`, or `a_p` as an integer or fraction.
    #[arg(long, allow_hyphen_values = true)]
    hecke: Option<String>,
    /// Modulus of the sequence, or the Hecke prime with `--hecke`.
    #[arg(short = 'p')]
    p: Option<u64>,
    #[arg(long, default_value_t = modforms::DELTA_WEIGHT)]
    weight: u32,
    #[arg(long)]
    level_divides: bool,
}

fn parse_eps(s: &str) -> Result<Exponent, String> {
    let e: Exponent = s.parse().map_err(|e: Error| e.to_string())?;
    if e.num == 0 || e.num >= e.den {
        return Err(format!("{s} is not strictly between 0 and 1"));
    }
    Ok(e)
}

fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s.split_once("..").ok_or("expected A..B")?;
    let a: u64 = a.trim().parse().map_err(|_| format!("bad bound {a}"))?;
    let b: u64 = b.trim().parse().map_err(|_| format!("bad bound {b}"))?;
    if a > b {
        return Err(format!("empty range {s}"));
    }
    Ok((a, b))
}

impl FormArgs {
    fn params(&self) -> lrsum_core::Result<HeckeParams> {
        let kind = self.hecke.as_deref().ok_or_else(|| Error::invalid("--hecke is required"))?;
        let p = self.p.ok_or_else(|| Error::invalid("-p is required"))?;
        if kind == "delta" {
            return HeckeParams::delta(p);
        }
        HeckeParams::new(p, self.weight, modforms::parse_rational(kind)?, self.level_divides)
    }
}

impl SeqArgs {
    fn is_hecke(&self) -> bool {
        self.form.hecke.is_some()
    }

    fn modulus(&self) -> lrsum_core::Result<u64> {
        let m = if self.is_hecke() { self.ell } else { self.form.p };
        m.ok_or_else(|| Error::invalid(if self.is_hecke() { "-l is required with --hecke" } else { "-p is required" }))
    }

    /// The sequence modulo `m`.
    fn sequence(&self, m: u64) -> lrsum_core::Result<LinRecSeq> {
        if self.is_hecke() {
            return modforms::hecke_mod_seq(&self.form.params()?, m);
        }
        if self.fib {
            return LinRecSeq::fibonacci(m);
        }
        match (&self.coeffs, &self.init) {
            (Some(c), Some(i)) => LinRecSeq::from_signed(m, c, i),
            _ => Err(Error::invalid("choose a sequence: --fib, --coeffs with --init, or --hecke")),
        }
    }

    /// Primes in `range`, skipping the Hecke prime.
    fn sweep_moduli(&self, (a, b): (u64, u64)) -> Vec<u64> {
        let skip = if self.is_hecke() { self.form.p } else { None };
        arith::primes_up_to(b)
            .into_iter()
            .filter(|&l| l >= a && Some(l) != skip)
            .collect()
    }
}

enum Output {
    Json(Value),
    Lines(Vec<Value>),
    Csv { header: Vec<&'static str>, rows: Vec<Vec<String>> },
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn seq_value(s: &LinRecSeq) -> Value {
    json!({ "p": s.p(), "coeffs": s.coeffs(), "init": s.init() })
}

fn exit_code(e: &Error) -> i32 {
    if e.is_guard() {
        EXIT_GUARD
    } else {
        EXIT_PRECONDITION
    }
}

/// Runs `f` for every modulus on the rayon pool; records come back in modulus order.
/// A precondition failure becomes an `{ell, error}` record; a guard trip aborts the sweep.
fn sweep<F>(moduli: &[u64], f: F) -> lrsum_core::Result<Vec<Value>>
where
    F: Fn(u64) -> lrsum_core::Result<Value> + Sync,
{
    let results: Vec<(u64, lrsum_core::Result<Value>)> = moduli.par_iter().map(|&l| (l, f(l))).collect();
    results
        .into_iter()
        .map(|(l, r)| match r {
            Ok(v) => Ok(v),
            Err(e) if e.is_guard() => Err(e),
            Err(e) => Ok(json!({ "ell": l, "error": e.to_string() })),
        })
        .collect()
}

fn complex_rows(values: &[num_complex::Complex64]) -> Vec<Vec<String>> {
    values
        .iter()
        .enumerate()
        .map(|(i, z)| vec![i.to_string(), format!("{:.12}", z.re), format!("{:.12}", z.im), format!("{:.12}", z.norm())])
        .collect()
}

fn execute(cmd: &Command, format: Format, seed: u64) -> lrsum_core::Result<Output> {
    let csv = format == Format::Csv;
    match cmd {
        Command::Expsum { seq, histogram, range, xi } => {
            let s = seq.sequence(seq.modulus()?)?;
            let mut prof = expsum::profile(&s)?;
            if csv {
                return Ok(Output::Csv { header: vec!["xi", "re", "im", "abs"], rows: complex_rows(&prof.sums) });
            }
            let korobov = expsum::korobov_check(&prof, s.order());
            let ranged = match range {
                Some(x) => {
                    let z = expsum::ranged_sum(&s, *x, *xi)?;
                    json!({ "x": x.to_string(), "xi": xi, "re": z.re, "im": z.im, "abs": z.norm() })
                }
                None => Value::Null,
            };
            if prof.p > HISTOGRAM_EMIT_MAX && !histogram {
                prof.histogram.clear();
            }
            Ok(Output::Json(json!({
                "sequence": seq_value(&s),
                "profile": prof,
                "korobov": korobov,
                "ranged": ranged,
            })))
        }
        Command::Period { seq, ell_range } => {
            let record = |m: u64| -> lrsum_core::Result<Value> {
                let s = seq.sequence(m)?;
                let per = s.least_period()?;
                Ok(json!({ "ell": m, "order": s.order(), "tau": per.tau, "degenerate": per.degenerate }))
            };
            let records = match ell_range {
                Some(r) => sweep(&seq.sweep_moduli(*r), record)?,
                None => vec![record(seq.modulus()?)?],
            };
            if csv {
                let rows = records
                    .iter()
                    .map(|v| ["ell", "order", "tau", "degenerate"].iter().map(|k| cell(&v[*k])).collect())
                    .collect();
                return Ok(Output::Csv { header: vec!["ell", "order", "tau", "degenerate"], rows });
            }
            Ok(match ell_range {
                Some(_) => Output::Lines(records),
                None => Output::Json(records.into_iter().next().unwrap()),
            })
        }
        Command::Spectral { seq } => {
            let s = seq.sequence(seq.modulus()?)?;
            let sd = lrs::spectral_decompose(&s, seed)?;
            if csv {
                let rows = sd
                    .components
                    .iter()
                    .map(|c| {
                        let f: Vec<String> = c.factor.coeffs().iter().map(u64::to_string).collect();
                        vec![c.degree.to_string(), c.root_order.to_string(), f.join(" ")]
                    })
                    .collect();
                return Ok(Output::Csv { header: vec!["degree", "root_order", "factor"], rows });
            }
            Ok(Output::Json(json!({ "sequence": seq_value(&s), "spectral": sd })))
        }
        Command::Check { seq, eps, eps2, ell_range } => {
            let eps2 = eps2.unwrap_or(*eps);
            let record = |m: u64| -> lrsum_core::Result<Value> {
                let s = seq.sequence(m)?;
                let sd = lrs::spectral_decompose(&s, seed)?;
                let rep = hypotheses::check_conditions(&sd, *eps, eps2)?;
                Ok(json!({ "ell": m, "sequence": seq_value(&s), "report": rep }))
            };
            let records = match ell_range {
                Some(r) => sweep(&seq.sweep_moduli(*r), record)?,
                None => vec![record(seq.modulus()?)?],
            };
            if csv {
                let keys = ["period", "condition_a", "condition_b", "shparlinski", "korobov_range"];
                let rows = records
                    .iter()
                    .map(|v| {
                        let mut row = vec![cell(&v["ell"])];
                        row.extend(keys.iter().map(|k| cell(&v["report"][*k])));
                        row.push(cell(&v["error"]));
                        row
                    })
                    .collect();
                let mut header = vec!["ell"];
                header.extend(keys);
                header.push("error");
                return Ok(Output::Csv { header, rows });
            }
            Ok(match ell_range {
                Some(_) => Output::Lines(records),
                None => Output::Json(records.into_iter().next().unwrap()),
            })
        }
        Command::Exclude { omega, form, t, scan_bound } => {
            let (a, b) = match omega.as_deref() {
                Some(&[a, b]) => (a, b),
                Some(_) => return Err(Error::invalid("--omega takes exactly two integers A,B")),
                None => {
                    let params = form.params()?;
                    if !params.a_p.is_integer() {
                        return Err(Error::invalid("the certificate needs an integral a_p"));
                    }
                    let a_p: i64 = params.a_p.to_integer().try_into().map_err(|_| Error::Overflow("a_p"))?;
                    let norm: i64 = params.norm().try_into().map_err(|_| Error::Overflow("p^(k-1)"))?;
                    (a_p.checked_neg().ok_or(Error::Overflow("a_p"))?, norm)
                }
            };
            let cert = hypotheses::resultant_exclusion(a, b, *t, *scan_bound)?;
            if csv {
                let rows = cert.excluded_primes.iter().map(|l| vec![l.to_string()]).collect();
                return Ok(Output::Csv { header: vec!["ell"], rows });
            }
            Ok(Output::Json(to_value(&cert)))
        }
        Command::Tau { nmax } => {
            let table = modforms::tau_table(*nmax)?;
            if csv {
                let rows = (1..=*nmax)
                    .map(|n| vec![n.to_string(), table.get(n).unwrap().to_string()])
                    .collect();
                return Ok(Output::Csv { header: vec!["n", "tau"], rows });
            }
            let values: Vec<String> = (1..=*nmax).map(|n| table.get(n).unwrap().to_string()).collect();
            Ok(Output::Json(json!({ "n_max": nmax, "values": values })))
        }
        Command::Hecke { form, ell, nmax, u_max } => {
            let params = form.params()?;
            let exact = modforms::hecke_int_seq(&params, *nmax)?;
            let reduced = match ell {
                Some(l) => Some(modforms::hecke_mod_seq(&params, *l)?.terms(*nmax + 1)),
                None => None,
            };
            if csv {
                let rows = exact
                    .iter()
                    .enumerate()
                    .map(|(n, v)| {
                        let m = reduced.as_ref().map(|r| r[n].to_string()).unwrap_or_default();
                        vec![n.to_string(), v.to_string(), m]
                    })
                    .collect();
                return Ok(Output::Csv { header: vec!["n", "a_p^n", "mod_ell"], rows });
            }
            let zero = modforms::zero_index(&params, *u_max)?;
            let modular = match *ell {
                Some(l) => {
                    let (values, degenerate) = modforms::period_values(&params, l)?;
                    let exceptional = match zero {
                        Some(_) => to_value(&modforms::exceptional_structure_check(&params, l, *u_max, seed)?),
                        None => Value::Null,
                    };
                    json!({
                        "ell": l,
                        "class": modforms::discriminant_class(&params, l)?,
                        "a_p_mod": params.a_p_mod(l)?,
                        "tau": values.len(),
                        "degenerate": degenerate,
                        "values": reduced,
                        "exceptional": exceptional,
                    })
                }
                None => Value::Null,
            };
            Ok(Output::Json(json!({
                "params": params,
                "deligne_ok": params.deligne_ok(),
                "discriminant": params.discriminant().to_string(),
                "values": exact.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                "zero_index": zero,
                "modular": modular,
            })))
        }
        Command::Waring { seq, k, basis_max } => {
            let s = seq.sequence(seq.modulus()?)?;
            let prof = expsum::profile(&s)?;
            let table = waring::representation_counts(&prof.histogram, *k)?;
            if csv {
                let rows = table
                    .rows()
                    .into_iter()
                    .map(|(l, c, r)| vec![l.to_string(), c, format!("{r:.12}")])
                    .collect();
                return Ok(Output::Csv { header: vec!["lambda", "count", "ratio"], rows });
            }
            let basis = if prof.tau == 0 { None } else { waring::min_basis_order(&prof.histogram, *basis_max)? };
            Ok(Output::Json(json!({
                "sequence": seq_value(&s),
                "table": table,
                "fourier": waring::fourier_check(&prof, &table)?,
                "main_term": waring::main_term_report(&table),
                "basis_order": basis,
            })))
        }
        Command::Nonlin { seq, values } => {
            let s = seq.sequence(seq.modulus()?)?;
            let mut rep = expsum::nonlinearity(&s)?;
            if csv {
                return Ok(Output::Csv { header: vec!["b", "re", "im", "abs"], rows: complex_rows(&rep.values) });
            }
            if !values {
                rep.values.clear();
            }
            Ok(Output::Json(json!({ "sequence": seq_value(&s), "report": rep })))
        }
        Command::Density { ell, ell_range, eps, r, k } => {
            let record = |l: u64| -> lrsum_core::Result<Value> {
                let rep = density::density_lower_bound(l, *eps)?;
                let nice = match r {
                    Some(r) => to_value(&density::nice_tuple_count(l, *r, *k, rep.t)?),
                    None => Value::Null,
                };
                let mut v = to_value(&rep);
                v["nice"] = nice;
                Ok(v)
            };
            let moduli: Vec<u64> = match (ell_range, ell) {
                (Some((a, b)), _) => arith::primes_up_to(*b).into_iter().filter(|&l| l >= *a && l > 2).collect(),
                (None, Some(l)) => vec![*l],
                (None, None) => unreachable!("clap requires one of -l, --ell-range"),
            };
            let records = match ell_range {
                Some(_) => sweep(&moduli, record)?,
                None => vec![record(moduli[0])?],
            };
            if csv {
                let rows = records
                    .iter()
                    .map(|v| {
                        ["ell", "eps", "s1", "s2", "lower_bound", "gap", "swapped_bound"]
                            .iter()
                            .map(|k| cell(&v[*k]))
                            .collect()
                    })
                    .collect();
                return Ok(Output::Csv {
                    header: vec!["ell", "eps", "s1", "s2", "lower_bound", "gap", "swapped_bound"],
                    rows,
                });
            }
            Ok(match ell_range {
                Some(_) => Output::Lines(records),
                None => Output::Json(records.into_iter().next().unwrap()),
            })
        }
        Command::Sample { ell, budget, eps, ap_file, weight } => {
            let (k, coeffs) = match ap_file {
                Some(path) => (*weight, read_coefficients(path)?),
                None => (modforms::DELTA_WEIGHT, density::delta_coefficients(*budget)?),
            };
            let sample = density::frobenius_sample(k, &coeffs, *ell, *budget, *eps, seed)?;
            if csv {
                let rows = sample
                    .rows
                    .iter()
                    .map(|r| {
                        vec![
                            r.p.to_string(),
                            r.a_p_mod.to_string(),
                            r.class.to_string(),
                            r.ord_alpha.to_string(),
                            r.ord_beta.to_string(),
                            r.ord_ratio.to_string(),
                            r.good.to_string(),
                        ]
                    })
                    .collect();
                return Ok(Output::Csv {
                    header: vec!["p", "a_p_mod", "class", "ord_alpha", "ord_beta", "ord_ratio", "good"],
                    rows,
                });
            }
            Ok(Output::Json(to_value(&sample)))
        }
    }
}

fn read_coefficients(
    path: &PathBuf,
) -> lrsum_core::Result<std::collections::BTreeMap<u64, num_rational::BigRational>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))?;
    let raw: std::collections::BTreeMap<String, Value> =
        serde_json::from_str(&text).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))?;
    raw.into_iter()
        .map(|(p, v)| {
            let p: u64 = p.parse().map_err(|_| Error::invalid(format!("bad prime key {p}")))?;
            let s = match v {
                Value::String(s) => s,
                Value::Number(n) => n.to_string(),
                other => return Err(Error::invalid(format!("bad a_p {other}"))),
            };
            Ok((p, modforms::parse_rational(&s)?))
        })
        .collect()
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn emit(out: &Output, w: &mut dyn Write) -> io::Result<()> {
    match out {
        Output::Json(v) => {
            serde_json::to_writer_pretty(&mut *w, v)?;
            writeln!(w)
        }
        Output::Lines(vs) => {
            for v in vs {
                serde_json::to_writer(&mut *w, v)?;
                writeln!(w)?;
            }
            Ok(())
        }
        Output::Csv { header, rows } => {
            let mut cw = csv::Writer::from_writer(w);
            cw.write_record(header)?;
            for r in rows {
                cw.write_record(r)?;
            }
            cw.flush()
        }
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let format = cli.format.unwrap_or(match cli.command {
        Command::Tau { .. } => Format::Csv,
        _ => Format::Json,
    });
    let output = match execute(&cli.command, format, cli.seed) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let written = match &cli.out {
        Some(path) => File::create(path).and_then(|mut f| emit(&output, &mut f)),
        None => emit(&output, &mut io::stdout().lock()),
    };
    match written {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_PRECONDITION
        }
    }
}
