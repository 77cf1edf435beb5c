//! Command-line front end.

use std::io::Read;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::dhjlab::{
    dense_sections_search, density_increment_step, find_line_in_set, instance_from_line_witness, max_linefree_density,
    seeded_instance, IncrementInstance, IncrementParams, DEFAULT_NODE_BUDGET,
};
use crate::error::{Error, Result};
use crate::examples::{ExampleName, ExampleSpec};
use crate::extractor::{
    extract_line_witness, extract_one_sep_witness, extract_simplicial_witness, ExtractOptions, Extraction,
};
use crate::format::{dense_set_from_json, parse_process, parse_words, render_words, write_process, DenseSetJson};
use crate::hypercube::{Alphabet, Sym};
use crate::invariants::{
    mc_one_separated_rate, separation_index_set, separation_index_tuple, type_of_set, type_of_tuple, TypeSet,
    DEFAULT_EXACT_CAP,
};
use crate::process::{
    base_rate, classify_gamma, stationarity::nonempty_subsets, stationarity_modulus_lines, stationarity_modulus_types,
    AnalysisParams, CubeProcess, Target,
};
use crate::rational::Rational;
use crate::report::{
    certificate_json, check_line, classification_json, line_witness_json, separated_witness_json, Outcome, Report,
};

#[derive(Parser, Debug)]
#[command(name = "cubeproc", version, about = "Exact analysis of hypercube-indexed processes")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Add wall-clock timing to the report.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Stationarity moduli, base rate and classifications of a process.
    Analyze(AnalyzeArgs),
    /// Extract a structured witness or a pseudorandom certificate.
    Extract(ExtractArgs),
    /// Emit a built-in process as JSON.
    Examples(ExamplesArgs),
    /// Type of a tuple and of the set of its entries.
    Type(WordsArgs),
    /// Separation index of a tuple and of a set.
    Sep(SepArgs),
    /// Sampled rate of 1-separated random tuples.
    McSep(McArgs),
    /// Density Hales-Jewett experiments.
    Dhj {
        #[command(subcommand)]
        command: DhjCommand,
    },
    /// Re-check the transcript of a saved report.
    Verify(InputArgs),
}

#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// Input file; stdin when absent or `-`.
    #[arg(long, short)]
    pub input: Option<String>,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Base rate for the classifications; the largest marginal by default.
    #[arg(long)]
    pub epsilon: Option<Rational>,
    /// Classification threshold.
    #[arg(long, default_value = "0")]
    pub theta: Rational,
    /// Largest type size for the type modulus; `|A|` by default.
    #[arg(long)]
    pub kappa: Option<usize>,
    /// Largest type dimension for the type modulus.
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long, default_value_t = 2_000_000)]
    pub budget: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Lines,
    Onesep,
    Simplicial,
}

#[derive(Args, Debug)]
pub struct ExtractArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum)]
    pub mode: Mode,
    #[arg(long)]
    pub epsilon: Rational,
    #[arg(long)]
    pub sigma: Rational,
    #[arg(long, default_value = "0")]
    pub eta: Rational,
    /// `|A|` by default.
    #[arg(long)]
    pub kappa: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    /// Report the bounds without enforcing the hypotheses.
    #[arg(long)]
    pub proof_shape: bool,
    #[arg(long)]
    pub allow_small_n: bool,
    #[arg(long)]
    pub pad_gamma: bool,
    /// Force a symbol set, e.g. `1,3`.
    #[arg(long, value_delimiter = ',')]
    pub gamma: Option<Vec<String>>,
    /// Force a type, given as a JSON word list.
    #[arg(long)]
    pub target_type: Option<String>,
    /// Block sizes, e.g. `1,1`.
    #[arg(long, value_delimiter = ',')]
    pub r: Option<Vec<usize>>,
    #[arg(long, default_value_t = 2_000_000)]
    pub budget: usize,
    /// Needed when a type-preservation check is sampled.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct ExamplesArgs {
    #[arg(long)]
    pub name: ExampleName,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value = "1/2")]
    pub epsilon: Rational,
    /// Alphabet size for `independent`.
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Allow `n = 4` for `onesep`.
    #[arg(long)]
    pub relaxed: bool,
}

#[derive(Args, Debug)]
pub struct WordsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Alphabet size for bare numeric word lists.
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Args, Debug)]
pub struct SepArgs {
    #[command(flatten)]
    pub words: WordsArgs,
    #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
    pub exact_cap: usize,
}

#[derive(Args, Debug)]
pub struct McArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: usize,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum DhjCommand {
    /// Find a combinatorial line inside a dense set.
    Lines(InputArgs),
    /// Largest line-free density of `A^n`.
    Maxfree {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: u64,
    },
    /// Search for a subspace with dense sections.
    Sections {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        eta: Rational,
    },
    /// The first-moment step on an instance file, a seeded instance or a
    /// line witness.
    Increment(IncrementArgs),
}

#[derive(Args, Debug)]
pub struct IncrementArgs {
    /// Instance JSON, or a process JSON with `--from-witness`.
    #[arg(long, short)]
    pub input: Option<String>,
    #[arg(long)]
    pub epsilon: Rational,
    #[arg(long)]
    pub sigma: Rational,
    /// One less than the alphabet size.
    #[arg(long)]
    pub k: usize,
    /// Draw an instance with this seed instead of reading one.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 8)]
    pub rows: usize,
    #[arg(long, default_value_t = 8)]
    pub tail: usize,
    /// Draw an instance violating the entry bounds.
    #[arg(long)]
    pub violating: bool,
    /// Read a process, extract a line witness and use its structured sets.
    #[arg(long)]
    pub from_witness: bool,
    /// Line-extraction parameters for `--from-witness`.
    #[arg(long)]
    pub witness_epsilon: Option<Rational>,
    #[arg(long)]
    pub witness_sigma: Option<Rational>,
}

fn read_input(i: &InputArgs) -> Result<String> {
    read_path(i.input.as_deref())
}

fn read_path(p: Option<&str>) -> Result<String> {
    match p {
        None | Some("-") => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
        Some(p) => Ok(std::fs::read_to_string(p)?),
    }
}

fn need_seed(seed: Option<u64>) -> Result<u64> {
    seed.ok_or_else(|| Error::Invalid("this command draws random samples; pass --seed".into()))
}

fn parse_gamma(a: &Alphabet, g: &[String]) -> Result<Vec<Sym>> {
    let mut v = g.iter().map(|t| a.index_of(t.trim())).collect::<Result<Vec<_>>>()?;
    v.sort();
    v.dedup();
    Ok(v)
}

/// Output of one command: the report plus, for `examples`, raw JSON to print
/// instead of the envelope.
pub struct Run {
    pub report: Report,
    pub raw: Option<String>,
}

pub fn run_cli(cli: &Cli, argv: &[String]) -> Run {
    let start = Instant::now();
    let mut run = match dispatch(cli, argv) {
        Ok(r) => r,
        Err(e) => Run { report: Report::new(argv.to_vec(), Value::Null).fail(&e), raw: None },
    };
    run.report = run.report.finalize();
    if cli.timing {
        run.report.timing_ms = Some(start.elapsed().as_millis() as u64);
    }
    run
}

/// Parse `argv`, run, print and return the exit code.
pub fn main_with(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(w) = cli.workers {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build_global();
    }
    let run = run_cli(&cli, &argv[1..]);
    let rep = &run.report;
    match (&run.raw, rep.outcome) {
        (Some(raw), Outcome::Ok) => println!("{raw}"),
        _ => match cli.format {
            Format::Json => println!("{}", rep.to_json()),
            Format::Text => print!("{}", rep.to_text()),
        },
    }
    if let Some(e) = &rep.error {
        eprintln!("error: {e}");
    }
    rep.outcome.exit_code()
}

fn dispatch(cli: &Cli, argv: &[String]) -> Result<Run> {
    let argv = argv.to_vec();
    let report = |params: Value| Report::new(argv.clone(), params);
    match &cli.command {
        Command::Analyze(a) => {
            let p = parse_process(&read_input(&a.input)?)?;
            let mut r = report(json!({ "theta": a.theta, "m": a.m, "budget": a.budget }));
            r.results = analyze(&p, a)?;
            Ok(Run { report: r, raw: None })
        }
        Command::Extract(a) => extract(a, report(Value::Null)),
        Command::Examples(a) => {
            let spec = ExampleSpec {
                name: a.name,
                alphabet: Alphabet::numeric(a.k),
                n: a.n,
                epsilon: a.epsilon.clone(),
                seed: None,
                relaxed: a.relaxed,
            };
            let p = spec.build()?;
            Ok(Run { report: report(Value::Null), raw: Some(write_process(&p)) })
        }
        Command::Type(a) => {
            let (alpha, words) = parse_words(&read_input(&a.input)?, a.k)?;
            let tt = type_of_tuple(&words)?;
            let ts = type_of_set(words.iter())?;
            let mut r = report(Value::Null);
            r.results = json!({
                "tuple_type": render_words(&alpha, &tt.columns),
                "tuple_dim": tt.dim,
                "set_type": ts.elements.iter().map(|e| alpha.render(e)).collect::<Vec<_>>(),
                "set_dim": ts.dim,
            });
            Ok(Run { report: r, raw: None })
        }
        Command::Sep(a) => {
            let (alpha, words) = parse_words(&read_input(&a.words.input)?, a.words.k)?;
            let st = separation_index_tuple(&words)?;
            let ss = separation_index_set(&words, a.exact_cap)?;
            let mut r = report(json!({ "exact_cap": a.exact_cap }));
            r.results = json!({
                "tuple_index": st.value,
                "set_index": ss.value,
                "set_exact": ss.exact,
                "witness": ss.witness.map(|w| render_words(&alpha, &w)),
            });
            Ok(Run { report: r, raw: None })
        }
        Command::McSep(a) => {
            let seed = need_seed(a.seed)?;
            let m = mc_one_separated_rate(a.k, a.n, a.p, a.samples, seed)?;
            let mut r = report(json!({ "k": a.k, "n": a.n, "p": a.p, "samples": a.samples }));
            r.seed = Some(seed);
            r.results = json!({
                "one_separated": m.one_separated,
                "duplicates": m.duplicates,
                "rate": m.rate,
                "rate_decimal": m.rate.to_f64(),
                "bound": m.bound,
            });
            Ok(Run { report: r, raw: None })
        }
        Command::Dhj { command } => dhj(command, report(Value::Null)),
        Command::Verify(a) => {
            let text = read_input(a)?;
            let saved: Report = serde_json::from_str(&text)?;
            let mut r = report(Value::Null);
            let rechecked = saved.transcript.recheck();
            r.results = json!({
                "checks": saved.transcript.checks.len(),
                "rechecked": rechecked,
                "saved_outcome": saved.outcome,
                "lines": saved.transcript.checks.iter().map(check_line).collect::<Vec<_>>(),
            });
            if !rechecked {
                return Err(Error::Invalid("stored verdicts disagree with their values".into()));
            }
            if saved.outcome == Outcome::Ok {
                r.transcript = saved.transcript;
            }
            r.outcome = if saved.outcome == Outcome::Error { Outcome::Error } else { Outcome::Ok };
            if r.outcome == Outcome::Error {
                r.error = saved.error;
            }
            Ok(Run { report: r, raw: None })
        }
    }
}

fn analyze(p: &CubeProcess, a: &AnalyzeArgs) -> Result<Value> {
    let alpha = p.alphabet();
    let lines = stationarity_modulus_lines(p);
    let kappa = a.kappa.unwrap_or(p.k());
    let types = if a.m < p.n() {
        let t = stationarity_modulus_types(p, kappa, a.m, a.budget)?;
        json!({ "eta_star": t.eta_star, "partial": t.partial, "evaluated": t.evaluated })
    } else {
        Value::Null
    };
    let (eps, dev) = base_rate(p, None);
    let eps = a.epsilon.clone().unwrap_or(eps);
    let classes = nonempty_subsets(p.k())
        .iter()
        .map(|g| Ok(classification_json(alpha, &classify_gamma(p, g, &a.theta, &eps)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(json!({
        "eta_star_lines": lines.eta_star,
        "eta_star_types": types.get("eta_star").cloned().unwrap_or(Value::Null),
        "types_partial": types.get("partial").cloned().unwrap_or(Value::Null),
        "base_rate": eps,
        "marginal_spread": dev,
        "classifications": classes,
    }))
}

fn extract(a: &ExtractArgs, mut r: Report) -> Result<Run> {
    let p = parse_process(&read_input(&a.input)?)?;
    let alpha = p.alphabet().clone();
    let params = AnalysisParams::new(a.epsilon.clone(), a.sigma.clone(), a.eta.clone(), a.kappa.unwrap_or(p.k()), a.m)?;
    let target = match (&a.gamma, &a.target_type) {
        (Some(_), Some(_)) => return Err(Error::Invalid("give at most one of --gamma and --target-type".into())),
        (Some(g), None) => Some(Target::Gamma(parse_gamma(&alpha, g)?)),
        (None, Some(t)) => {
            let (_, words) = parse_words(&read_path(Some(t)).or_else(|_| Ok::<_, Error>(t.clone()))?, Some(alpha.k()))?;
            Some(Target::Type(TypeSet::from_elements(words)?))
        }
        (None, None) => None,
    };
    let opts = ExtractOptions {
        proof_shape: a.proof_shape,
        allow_small_n: a.allow_small_n,
        pad_gamma: a.pad_gamma,
        target,
        r: a.r.clone(),
        budget: a.budget,
        seed: a.seed.unwrap_or(0),
    };
    r.parameters =
        json!({ "mode": format!("{:?}", a.mode).to_lowercase(), "params": params, "proof_shape": a.proof_shape });
    r.seed = a.seed;
    let (results, transcript, pseudo) = match a.mode {
        Mode::Lines => match extract_line_witness(&p, &params, &opts)? {
            Extraction::Witness(w) => (line_witness_json(&alpha, &w), w.transcript.clone(), false),
            Extraction::Pseudorandom(c) => (certificate_json(&alpha, &c), c.transcript.clone(), true),
        },
        Mode::Onesep | Mode::Simplicial => {
            let out = if a.mode == Mode::Onesep {
                extract_one_sep_witness(&p, &params, &opts)?
            } else {
                extract_simplicial_witness(&p, &params, &opts)?
            };
            match out {
                Extraction::Witness(w) => {
                    if !w.construction.fact.exhaustive && a.seed.is_none() {
                        return Err(Error::Invalid("the type-preservation check was sampled; pass --seed".into()));
                    }
                    (separated_witness_json(&alpha, &w), w.transcript.clone(), false)
                }
                Extraction::Pseudorandom(c) => (certificate_json(&alpha, &c), c.transcript.clone(), true),
            }
        }
    };
    r.results = results;
    r.transcript = transcript;
    if pseudo {
        r.outcome = Outcome::Pseudorandom;
    } else if a.proof_shape {
        // the hypotheses were skipped, so the bounds are reported, not asserted
        r.results["all_bounds_hold"] = json!(r.transcript.all_hold());
        r.results["bounds"] = json!(r.transcript.checks.iter().map(check_line).collect::<Vec<_>>());
        r.transcript = Default::default();
    }
    Ok(Run { report: r, raw: None })
}

fn dhj(c: &DhjCommand, mut r: Report) -> Result<Run> {
    match c {
        DhjCommand::Lines(i) => {
            let j: DenseSetJson = serde_json::from_str(&read_input(i)?)?;
            let (alpha, d) = dense_set_from_json(&j)?;
            let line = find_line_in_set(&d)?;
            r.results = json!({
                "density": d.density(),
                "line": line.as_ref().map(|v| format!("{v:?}")),
                "points": line.map(|v| (0..d.k).map(|x| alpha.render(&v.at(x as Sym))).collect::<Vec<_>>()),
            });
        }
        DhjCommand::Maxfree { k, n, budget } => {
            let alpha = Alphabet::numeric(*k);
            let lf = max_linefree_density(*k, *n, *budget)?;
            r.parameters = json!({ "k": k, "n": n, "budget": budget });
            r.results = json!({
                "density": lf.density,
                "size": lf.size,
                "exact": lf.exact,
                "nodes": lf.nodes,
                "witness": render_words(&alpha, &lf.witness),
            });
        }
        DhjCommand::Sections { input, m, eta } => {
            let j: DenseSetJson = serde_json::from_str(&read_input(input)?)?;
            let (alpha, d) = dense_set_from_json(&j)?;
            let out = dense_sections_search(&d, *m, eta)?;
            r.parameters = json!({ "m": m, "eta": eta });
            r.results = json!({
                "found": out.found,
                "ell": out.ell,
                "v": format!("{:?}", out.v.generator()),
                "worst_section": out.worst_section,
                "target": out.target,
                "sections": out.sections.iter().map(|(t, x)| json!({ "t": alpha.render(t), "density": x })).collect::<Vec<_>>(),
                "existence_threshold": out.threshold,
                "threshold_met": out.threshold_met,
                "scanned": out.scanned,
            });
            if out.found {
                r.transcript.ge("worst section density", None, out.worst_section, out.target);
            }
        }
        DhjCommand::Increment(a) => {
            let params = IncrementParams { epsilon: a.epsilon.clone(), sigma: a.sigma.clone(), k: a.k };
            let inst: IncrementInstance = if a.from_witness {
                let p = parse_process(&read_path(a.input.as_deref())?)?;
                let (Some(we), Some(ws)) = (&a.witness_epsilon, &a.witness_sigma) else {
                    return Err(Error::Invalid("--from-witness needs --witness-epsilon and --witness-sigma".into()));
                };
                let wp = AnalysisParams::new(we.clone(), ws.clone(), Rational::zero(), p.k(), 1)?;
                let opts = ExtractOptions { allow_small_n: true, ..Default::default() };
                match extract_line_witness(&p, &wp, &opts)? {
                    Extraction::Witness(w) => instance_from_line_witness(&p, &w)?,
                    Extraction::Pseudorandom(_) => {
                        return Err(Error::Invalid("the process is pseudorandom; no witness to feed".into()))
                    }
                }
            } else if let Some(seed) = a.seed {
                r.seed = Some(seed);
                seeded_instance(&params, a.rows, a.tail, !a.violating, seed)?
            } else {
                serde_json::from_str(&read_path(a.input.as_deref())?)?
            };
            r.parameters = json!({ "params": params, "rows": inst.rows.len(), "tail": inst.tail.len() });
            let out = density_increment_step(&inst, &params)?;
            r.results = json!({
                "s": out.s,
                "index": out.index,
                "value": out.value,
                "target": out.target,
                "small_sections": out.small.len(),
                "p_s": out.p_s,
                "p_d_given_s": out.p_d_given_s,
                "p_c_given_s": out.p_c_given_s,
                "average": out.average,
            });
            r.transcript = out.transcript;
        }
    }
    Ok(Run { report: r, raw: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> Run {
        let argv: Vec<String> = std::iter::once("cubeproc").chain(args.iter().copied()).map(String::from).collect();
        let cli = Cli::try_parse_from(&argv).unwrap();
        run_cli(&cli, &argv[1..])
    }

    #[test]
    fn mc_sep_needs_seed() {
        let r = run(&["mc-sep", "--k", "3", "--n", "5", "--p", "3", "--samples", "100"]);
        assert_eq!(r.report.outcome, Outcome::Error);
        let r = run(&["mc-sep", "--k", "3", "--n", "5", "--p", "3", "--samples", "100", "--seed", "1"]);
        assert_eq!(r.report.outcome, Outcome::Ok);
    }

    #[test]
    fn maxfree_and_examples() {
        let r = run(&["dhj", "maxfree", "--k", "2", "--n", "3"]);
        assert_eq!(r.report.results["density"], json!("3/8"));
        let r = run(&["examples", "--name", "intro", "--n", "2"]);
        assert!(r.raw.unwrap().contains("\"bernoulli\""));
    }

    #[test]
    fn params_named_on_failure() {
        let r =
            run(&["dhj", "increment", "--epsilon", "1/2", "--sigma", "1/4", "--k", "1", "--seed", "3", "--violating"]);
        assert_eq!(r.report.outcome, Outcome::Error);
        assert!(r.report.error.unwrap().contains("entry bound on P3(S)"));
    }
}
