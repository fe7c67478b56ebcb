use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use iofpar::canonical::{canonical_build, reconstruct};
use iofpar::monoid::{enumerate_monoid, is_member_direct, is_member_prop1};
use iofpar::normalform::enumerate_wn;
use iofpar::rewriter::Rewriter;
use iofpar::verify::{count_row, errata_table, relation_failures, verify_presentation, Errata, VerifyConfig};
use iofpar::{Limits, PartialInjection, Word};

#[derive(Parser)]
#[command(name = "iofpar", version, about = "Order-, fence- and parity-preserving partial injections")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum What {
    Monoid,
    Wn,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Markdown,
}

#[derive(Subcommand)]
enum Cmd {
    /// List every monoid element or every normal form, one JSON object per line.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "monoid")]
        what: What,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// CSV rows n,monoid_size,wn_size,equal for n in --n or --from..=--to.
    Count {
        #[arg(long, conflicts_with_all = ["from", "to"])]
        n: Option<usize>,
        #[arg(long, requires = "to")]
        from: Option<usize>,
        #[arg(long, requires = "from")]
        to: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rewrite a word to its normal form.
    Normalize {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        word: String,
        #[arg(long)]
        trace: bool,
    },
    /// Canonical normal form of a map given as pairs like "1->3,5->5", or of a word's evaluation.
    Canonical {
        #[arg(long)]
        n: usize,
        #[arg(long, conflicts_with = "word", required_unless_present = "word")]
        map: Option<String>,
        #[arg(long)]
        word: Option<String>,
        /// Reconstruct the map from a normal-form word instead.
        #[arg(long, requires = "word")]
        inverse: bool,
    },
    /// Membership of a map, with the first failed condition.
    Membership {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        map: String,
    },
    /// Run the full presentation check for one n.
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random words to normalize.
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        /// Only print the failing relation instances for n (or --from..=--to).
        #[arg(long)]
        relations: bool,
        #[arg(long, requires = "relations")]
        to: Option<usize>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Write the full report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Accept relation failures documented in this errata file.
        #[arg(long)]
        errata: Option<PathBuf>,
    },
}

type Failure = Box<dyn std::error::Error>;

fn parse_map(n: usize, s: &str) -> Result<PartialInjection, Failure> {
    Ok(PartialInjection::parse_pairs(n, s)?)
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(p) => Box::new(fs::File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

/// Ok(true) means success, Ok(false) a verification failure.
fn run(cmd: Cmd) -> Result<bool, Failure> {
    let limits = Limits::from_env();
    match cmd {
        Cmd::Enumerate { n, what, out } => {
            let mut w = sink(&out)?;
            match what {
                What::Monoid => {
                    for f in enumerate_monoid(n, &limits)? {
                        writeln!(w, "{}", serde_json::to_string(&f)?)?;
                    }
                }
                What::Wn => {
                    for nf in enumerate_wn(n, &limits)? {
                        writeln!(w, "{}", serde_json::to_string(&nf)?)?;
                    }
                }
            }
            Ok(true)
        }
        Cmd::Count { n, from, to, out } => {
            let range = match (n, from, to) {
                (Some(n), _, _) => n..=n,
                (None, Some(a), Some(b)) => a..=b,
                _ => return Err("count needs --n or --from/--to".into()),
            };
            let mut w = csv::Writer::from_writer(sink(&out)?);
            let mut all_equal = true;
            for n in range {
                let row = count_row(n, &limits)?;
                all_equal &= row.equal;
                w.serialize(&row)?;
            }
            w.flush()?;
            Ok(all_equal)
        }
        Cmd::Normalize { n, word, trace } => {
            limits.check(n)?;
            let w: Word = word.parse()?;
            let (nf, t) = Rewriter::new(n)?.normalize(&w)?;
            println!("{}", nf.render());
            if trace {
                print!("{}", t.to_text());
            }
            Ok(true)
        }
        Cmd::Canonical { n, map, word, inverse } => {
            limits.check(n)?;
            if inverse {
                let w: Word = word.expect("required by clap").parse()?;
                let nf = iofpar::normalform::recognize(&w, n).ok_or("word is not in normal form")?;
                println!("{}", reconstruct(&nf, n)?);
                return Ok(true);
            }
            let f = match (map, word) {
                (Some(m), _) => parse_map(n, &m)?,
                (None, Some(w)) => w.parse::<Word>()?.evaluate(n)?,
                _ => unreachable!("enforced by clap"),
            };
            let b = canonical_build(&f, n)?;
            println!("{}", b.result.render());
            Ok(true)
        }
        Cmd::Membership { n, map } => {
            limits.check(n)?;
            let f = parse_map(n, &map)?;
            let r = is_member_prop1(&f);
            match r.failed_condition {
                None => println!("member"),
                Some(c) => println!("not a member: {c}"),
            }
            debug_assert_eq!(r.is_member, is_member_direct(&f));
            Ok(r.is_member)
        }
        Cmd::Verify { n, seed, budget, relations, to, format, json, out, errata } => {
            let errata = match errata {
                Some(p) => Errata::parse(&fs::read_to_string(p)?)?,
                None => Errata::default(),
            };
            if relations {
                let mut all = Vec::new();
                for k in n..=to.unwrap_or(n) {
                    limits.check(k)?;
                    all.extend(relation_failures(k)?.1);
                }
                let mut w = sink(&out)?;
                match format {
                    Format::Markdown => write!(w, "{}", errata_table(&all))?,
                    Format::Csv => {
                        let mut c = csv::Writer::from_writer(w);
                        c.write_record(["n", "family", "params", "lhs", "rhs", "lhs_eval", "rhs_eval"])?;
                        for e in &all {
                            c.write_record([
                                e.n.to_string(),
                                e.family.to_string(),
                                e.params.clone(),
                                e.lhs.to_string(),
                                e.rhs.to_string(),
                                e.lhs_eval.to_string(),
                                e.rhs_eval.to_string(),
                            ])?;
                        }
                        c.flush()?;
                    }
                }
                return Ok(all.iter().all(|e| errata.documents(e)));
            }
            let cfg = VerifyConfig { seed, budget, ..VerifyConfig::new(n) };
            let report = verify_presentation(&cfg, &limits)?;
            if let Some(p) = json {
                fs::write(p, serde_json::to_string_pretty(&report)?)?;
            }
            let mut w = sink(&out)?;
            let fields = [
                ("n", report.config.n.to_string()),
                ("relations_checked", report.relations_checked.to_string()),
                ("relations_failed", report.relations_failed.to_string()),
                ("words_sampled", report.words_sampled.to_string()),
                ("words_normalized", report.words_normalized.to_string()),
                ("monoid_size", report.monoid_size.to_string()),
                ("closure_size", report.closure_size.to_string()),
                ("wn_size", report.wn_size.to_string()),
                ("bijection_ok", report.bijection_ok.to_string()),
                ("generation_ok", report.generation_ok.to_string()),
                ("presentation_verified", report.presentation_verified.to_string()),
            ];
            match format {
                Format::Csv => {
                    let mut c = csv::Writer::from_writer(w);
                    c.write_record(fields.iter().map(|f| f.0))?;
                    c.write_record(fields.iter().map(|f| &f.1))?;
                    c.flush()?;
                }
                Format::Markdown => {
                    writeln!(w, "| field | value |\n|---|---|")?;
                    for (k, v) in &fields {
                        writeln!(w, "| {k} | {v} |")?;
                    }
                    if !report.errata.is_empty() {
                        writeln!(w, "\n{}", errata_table(&report.errata))?;
                    }
                }
            }
            Ok(report.verified_modulo(&errata))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 2 } else { 0 });
        }
    };
    match run(cli.cmd) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
