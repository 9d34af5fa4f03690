use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use vndim::config::{parse_indices, parse_lengths, OutputFormat, Profile, RunConfig};
use vndim::cylinder::{chain_envelope, cylinder_nonempty, equipartition_check, window_sum_criterion, zero_inside};
use vndim::error::{ConfigError, CylinderError, QuotientError, RuleError, SeriesError, SubgroupError};
use vndim::geometry::{enumerate_dogleg_free_classes, Letter, ReducedWord, TreePath};
use vndim::quotient::{build_quotient_graph, check_rule_isomorphism, explicit_eigenvector, four, nullity_csv, nullity_table, QuotientCase};
use vndim::rules::{classify_at, Configuration, RuleEngine};
use vndim::series::{certificates_csv, certify_chain, compare, partial_dimension, LengthRule, Verdict};
use vndim::subgroup::{membership_oracle_bfs, Membership, SubgroupSpec};

#[derive(Parser)]
#[command(name = "vndim", version, about = "Exact kernel dimensions and monotonicity certificates")]
struct Cli {
    /// Constant set: paper (radius 10) or desk (radius 2).
    #[arg(long, global = true)]
    profile: Option<Profile>,
    /// Flat key = value file applied after the profile.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Generator lengths, `3,6` or `1:3,2:6`.
    #[arg(long, global = true)]
    lengths: Option<String>,
    #[arg(long, global = true)]
    format: Option<OutputFormat>,
    /// Which path lengths count: strict-paper or nullity.
    #[arg(long, global = true)]
    length_rule: Option<LengthRule>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Decimal digits in reports.
    #[arg(long, global = true)]
    precision: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dogleg-free translation classes with a given vertex count.
    Paths {
        #[arg(long)]
        max_vertices: usize,
        /// Longest forbidden horizontal run; defaults to the profile's.
        #[arg(long)]
        dogleg_bound: Option<usize>,
        /// `n:l`; report whether `b^l a^(d+1) B^l` is among the classes.
        #[arg(long)]
        contains_bridge: Option<String>,
    },
    /// Nullity of Q - 4 over a range of lengths.
    Spectra {
        /// `lo..hi`, inclusive.
        #[arg(long, default_value = "5..23")]
        range: String,
        /// Cases as digit pairs, e.g. `11`; repeatable. Defaults to all three.
        #[arg(long = "case")]
        cases: Vec<QuotientCase>,
    },
    /// Partial sum and tail for one index set.
    Dim {
        /// Defaults to the config's `indices`.
        #[arg(long = "I")]
        set: Option<String>,
        #[arg(long = "L")]
        truncation: usize,
    },
    /// Certificate that the dimension for J exceeds the one for I.
    Compare {
        #[arg(long = "I")]
        lower: String,
        #[arg(long = "J")]
        upper: String,
        #[arg(long = "L")]
        truncation: usize,
    },
    /// Certificates along a chain, sets separated by `;`.
    Chain {
        #[arg(long)]
        sets: String,
        #[arg(long = "L")]
        truncation: usize,
    },
    /// Classify the configuration given by `zeros` and `origin` in the config.
    Classify,
    /// Run a brute-force oracle against the fast code path.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct OracleArgs {
    #[command(subcommand)]
    check: OracleCheck,
}

#[derive(Subcommand)]
enum OracleCheck {
    /// Automaton membership against the product search.
    Membership {
        #[arg(long, default_value_t = 8)]
        max_len: usize,
    },
    /// Window-sum criterion against the GF(2) solver.
    Criterion {
        #[arg(long, default_value_t = 9)]
        max_vertices: usize,
    },
    /// Equal bucket sizes for random subspaces.
    Equipartition {
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
    /// The explicit eigenvector at the given lengths.
    Eigenvector {
        #[arg(long, default_value = "5,11,17")]
        lengths: String,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Subgroup(#[from] SubgroupError),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Quotient(#[from] QuotientError),
    #[error(transparent)]
    Cylinder(#[from] CylinderError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Subgroup(_) => "subgroup",
            CliError::Rule(_) => "rules",
            CliError::Quotient(_) => "quotient",
            CliError::Cylinder(_) => "cylinder",
            CliError::Series(_) => "series",
            CliError::Usage(_) => "usage",
            CliError::Io(_) => "io",
        }
    }
}

/// A report and whether every check it carries passed.
struct Outcome {
    body: String,
    ok: bool,
}

impl Outcome {
    fn json(v: Value, ok: bool) -> Self {
        Outcome { body: format!("{}\n", serde_json::to_string_pretty(&v).expect("json")), ok }
    }
}

fn run_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::for_profile(cli.profile.unwrap_or(Profile::Paper));
    if let Some(path) = &cli.config {
        cfg.apply(&fs::read_to_string(path)?)?;
    }
    if let Some(l) = &cli.lengths {
        cfg.lengths = parse_lengths(l).map_err(|message| ConfigError::InvalidValue { key: "lengths".into(), message })?;
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    if let Some(r) = cli.length_rule {
        cfg.length_rule = r;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.threads {
        cfg.threads = t.max(1);
    }
    if let Some(p) = cli.precision {
        cfg.precision = p;
    }
    Ok(cfg)
}

fn spec_of(set: &str, cfg: &RunConfig) -> Result<SubgroupSpec, CliError> {
    let indices = parse_indices(set).map_err(CliError::Usage)?;
    Ok(SubgroupSpec::new(indices, cfg.lengths.clone())?)
}

fn cmd_paths(cfg: &RunConfig, max_vertices: usize, bound: Option<usize>, bridge: Option<&str>) -> Result<Outcome, CliError> {
    let d = bound.unwrap_or(cfg.params.dogleg_bound as usize);
    let classes = enumerate_dogleg_free_classes(max_vertices, d);
    let steps: Vec<String> = classes.iter().map(TreePath::step_string).collect();
    let mut ok = true;
    let bridge_json = match bridge {
        Some(b) => {
            let (_, l) = b.split_once(':').ok_or_else(|| CliError::Usage(format!("bridge {b:?} must be n:l")))?;
            let l: usize = l.parse().map_err(|_| CliError::Usage(format!("bad bridge length in {b:?}")))?;
            let word = format!("{}{}{}", "b".repeat(l), "a".repeat(d + 1), "B".repeat(l));
            let present = steps.contains(&word);
            ok = present;
            json!({ "steps": word, "present": present })
        }
        None => Value::Null,
    };
    if cfg.format == OutputFormat::Csv {
        let mut body = String::from("vertices,steps\n");
        for s in &steps {
            body.push_str(&format!("{max_vertices},{s}\n"));
        }
        return Ok(Outcome { body, ok });
    }
    Ok(Outcome::json(
        json!({ "vertices": max_vertices, "dogleg_bound": d, "count": steps.len(), "classes": steps, "bridge": bridge_json }),
        ok,
    ))
}

fn parse_range(s: &str) -> Result<std::ops::RangeInclusive<usize>, CliError> {
    let bad = || CliError::Usage(format!("range {s:?} must look like 5..23"));
    let (lo, hi) = s.split_once("..").ok_or_else(bad)?;
    let lo: usize = lo.trim().parse().map_err(|_| bad())?;
    let hi: usize = hi.trim_start_matches('=').trim().parse().map_err(|_| bad())?;
    Ok(lo..=hi)
}

fn cmd_spectra(cfg: &RunConfig, range: &str, cases: &[QuotientCase]) -> Result<Outcome, CliError> {
    let cases = if cases.is_empty() { QuotientCase::ALL.to_vec() } else { cases.to_vec() };
    let rows = nullity_table(parse_range(range)?, &cases, &cfg.params)?;
    // the one-bad-end cases never see 4; (1,1) sees it at every 5 mod 6
    let ok = rows.iter().all(|r| match r.case {
        QuotientCase::OneOne => r.len % 6 != 5 || r.nullity == 1,
        _ => r.nullity == 0,
    });
    if cfg.format == OutputFormat::Csv {
        return Ok(Outcome { body: nullity_csv(&rows), ok });
    }
    let table: Vec<Value> =
        rows.iter().map(|r| json!({ "length": r.len, "case": r.case.to_string(), "nullity": r.nullity })).collect();
    Ok(Outcome::json(json!({ "rows": table, "checks_passed": ok }), ok))
}

fn cmd_dim(cfg: &RunConfig, set: Option<&str>, truncation: usize) -> Result<Outcome, CliError> {
    let spec = match set {
        Some(s) => spec_of(s, cfg)?,
        None => SubgroupSpec::new(cfg.indices.clone(), cfg.lengths.clone())?,
    };
    let report = partial_dimension(&spec, truncation, &cfg.params, cfg.length_rule)?;
    if cfg.format == OutputFormat::Csv {
        let mut body = String::from("steps,vertices,cells,exponent\n");
        for c in &report.classes {
            body.push_str(&format!("{},{},{},{}\n", c.path.step_string(), c.vertex_count, c.cells, c.exponent));
        }
        return Ok(Outcome { body, ok: true });
    }
    Ok(Outcome::json(report.to_json(cfg.precision), true))
}

fn cmd_chain(cfg: &RunConfig, sets: &[&str], truncation: usize) -> Result<Outcome, CliError> {
    let specs = sets.iter().map(|s| spec_of(s, cfg)).collect::<Result<Vec<_>, _>>()?;
    let certs = if specs.len() == 2 {
        vec![compare(&specs[0], &specs[1], truncation, &cfg.params, cfg.length_rule)?]
    } else {
        certify_chain(&specs, truncation, &cfg.params, cfg.length_rule)?
    };
    let ok = certs.iter().all(|c| c.verdict == Verdict::CertifiedPositive);
    if cfg.format == OutputFormat::Csv {
        return Ok(Outcome { body: certificates_csv(&certs), ok });
    }
    let body = if certs.len() == 1 && sets.len() == 2 {
        certs[0].to_json()
    } else {
        json!({ "certificates": certs.iter().map(|c| c.to_json()).collect::<Vec<_>>(), "all_positive": ok })
    };
    Ok(Outcome::json(body, ok))
}

fn cmd_classify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let config = Configuration::padded(cfg.zeros.clone());
    let engine = RuleEngine::new(&config, &cfg.params);
    let class = classify_at(&engine, &cfg.origin)?;
    let iso = if class.label.is_finite_class() { Some(check_rule_isomorphism(&class, &engine)?) } else { None };
    Ok(Outcome::json(
        json!({
            "classification": class.to_json(),
            "isomorphism": iso.as_ref().map(|i| i.to_json()),
        }),
        true,
    ))
}

fn subsets(indices: &[u32]) -> Vec<BTreeSet<u32>> {
    (0..1u32 << indices.len())
        .map(|m| indices.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, &n)| n).collect())
        .collect()
}

fn all_words(max_len: usize) -> Vec<ReducedWord> {
    let mut out = vec![ReducedWord::identity()];
    let mut frontier = out.clone();
    for _ in 0..max_len {
        frontier = frontier
            .iter()
            .flat_map(|w| Letter::ALL.iter().map(move |&l| w.mul_letter(l)).filter(move |v| v.len() > w.len()))
            .collect();
        out.extend(frontier.iter().cloned());
    }
    out
}

fn cmd_oracle(cfg: &RunConfig, check: &OracleCheck) -> Result<Outcome, CliError> {
    let indices: Vec<u32> = cfg.lengths.indices().collect();
    let (name, cases, failures) = match check {
        OracleCheck::Membership { max_len } => {
            let words = all_words(*max_len);
            let mut failures = Vec::new();
            for set in subsets(&indices) {
                let spec = SubgroupSpec::new(set, cfg.lengths.clone())?;
                let m = Membership::new(&spec);
                for w in &words {
                    if m.contains(w) != membership_oracle_bfs(w, &spec, *max_len)? {
                        failures.push(format!("{spec} {w}"));
                    }
                }
            }
            ("membership", words.len() << indices.len(), failures)
        }
        OracleCheck::Criterion { max_vertices } => {
            let mut failures = Vec::new();
            let mut cases = 0;
            for set in subsets(&indices) {
                let spec = SubgroupSpec::new(set, cfg.lengths.clone())?;
                for len in 1..=*max_vertices {
                    for p in enumerate_dogleg_free_classes(len, cfg.params.dogleg_bound as usize) {
                        let phi = zero_inside(&p, &cfg.params);
                        let fast = window_sum_criterion(&p, &phi, &spec, &cfg.params)?;
                        let slow = cylinder_nonempty(&phi, &spec, &chain_envelope(&p, &spec, &cfg.params), &cfg.params)?;
                        cases += 1;
                        if fast != slow {
                            failures.push(format!("{spec} {}", p.step_string()));
                        }
                    }
                }
            }
            ("criterion", cases, failures)
        }
        OracleCheck::Equipartition { trials } => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut failures = Vec::new();
            for t in 0..*trials {
                let rows: Vec<u32> = (0..rng.gen_range(0..6)).map(|_| rng.gen_range(0..1u32 << 12)).collect();
                let subset = rng.gen_range(0..1u32 << 12);
                if !equipartition_check(&rows, 12, subset)? {
                    failures.push(format!("trial {t}"));
                }
            }
            ("equipartition", *trials, failures)
        }
        OracleCheck::Eigenvector { lengths } => {
            let lens = parse_indices(lengths).map_err(CliError::Usage)?;
            let mut failures = Vec::new();
            for &len in &lens {
                let g = build_quotient_graph(len as usize, QuotientCase::OneOne, &cfg.params)?;
                let x = explicit_eigenvector(len as usize)?;
                let four_x: Vec<_> = x.iter().map(|v| v * four()).collect();
                if g.apply(&x) != four_x {
                    failures.push(format!("length {len}"));
                }
            }
            ("eigenvector", lens.len(), failures)
        }
    };
    let ok = failures.is_empty();
    Ok(Outcome::json(json!({ "check": name, "cases": cases, "failures": failures, "passed": ok }), ok))
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let cfg = run_config(cli)?;
    // an already initialised pool is fine
    let _ = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build_global();
    match &cli.command {
        Command::Paths { max_vertices, dogleg_bound, contains_bridge } => {
            cmd_paths(&cfg, *max_vertices, *dogleg_bound, contains_bridge.as_deref())
        }
        Command::Spectra { range, cases } => cmd_spectra(&cfg, range, cases),
        Command::Dim { set, truncation } => cmd_dim(&cfg, set.as_deref(), *truncation),
        Command::Compare { lower, upper, truncation } => cmd_chain(&cfg, &[lower, upper], *truncation),
        Command::Chain { sets, truncation } => cmd_chain(&cfg, &sets.split(';').collect::<Vec<_>>(), *truncation),
        Command::Classify => cmd_classify(&cfg),
        Command::Oracle(args) => cmd_oracle(&cfg, &args.check),
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> std::io::Result<()> {
    match out {
        Some(path) => fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = json!({ "error": { "kind": "usage", "message": e.to_string().trim() } });
            println!("{}", serde_json::to_string_pretty(&err).expect("json"));
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            if let Err(e) = emit(&outcome.body, cli.out.as_ref()) {
                eprintln!("{e}");
                return ExitCode::from(2);
            }
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            let err = json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
            println!("{}", serde_json::to_string_pretty(&err).expect("json"));
            ExitCode::from(2)
        }
    }
}
