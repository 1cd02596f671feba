use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use classmatch::cpm::{solve_cpm, CpmOutcome};
use classmatch::crmm::{solve_crmm, CrmmTrace};
use classmatch::flow::build_base_network;
use classmatch::gen::{generate_raw, GenParams};
use classmatch::matching::violations;
use classmatch::oracle::{
    oracle_decision, oracle_is_popular, oracle_max_cardinality, oracle_popular,
    oracle_rmm_signature, DEFAULT_CAP,
};
use classmatch::reduction::{brute_force_1in3, parse_formula, reduce, reduction_text};
use classmatch::{signature_of, Error, Instance, Matching, Signature};

#[derive(Parser)]
#[command(
    name = "classmatch",
    version,
    about = "Matchings under laminar classifications"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank-maximal feasible matching
    Crmm {
        instance: PathBuf,
        #[arg(long)]
        json: bool,
        /// Include the per-round solver trace
        #[arg(long)]
        trace: bool,
    },
    /// Popular feasible matching, or `status: none`
    Cpm {
        instance: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Check a matching file (pairs or JSON from `crmm`/`cpm`)
    Verify {
        instance: PathBuf,
        matching: PathBuf,
        /// Also decide popularity by brute force
        #[arg(long)]
        popular: bool,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Brute-force answers for small instances
    Oracle {
        #[command(subcommand)]
        query: OracleQuery,
        #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Turn a monotone 1-in-3 formula into a matching instance
    Reduce {
        formula: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decide a monotone 1-in-3 formula by exhaustion
    Sat { formula: PathBuf },
    /// Random instance with laminar classes
    Gen(GenArgs),
    /// Dump the initial flow network
    Network { instance: PathBuf },
}

#[derive(Subcommand)]
enum OracleQuery {
    Rmm {
        instance: PathBuf,
    },
    Popular {
        instance: PathBuf,
    },
    Maxcard {
        instance: PathBuf,
    },
    /// Is there a feasible matching whose signature is at least SIG?
    Decide {
        signature: String,
        instance: PathBuf,
    },
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    applicants: usize,
    #[arg(long, default_value_t = 4)]
    posts: usize,
    #[arg(long, default_value_t = 3)]
    max_rank: usize,
    #[arg(long, default_value_t = 0.25)]
    tie_prob: f64,
    #[arg(long, default_value_t = 2)]
    depth: usize,
    #[arg(long, default_value_t = 0.6)]
    class_prob: f64,
    #[arg(long, default_value_t = 2)]
    max_quota: u32,
    #[arg(long, default_value_t = 12)]
    max_edges: usize,
    /// Unit applicant quotas and no applicant classes
    #[arg(long)]
    many_to_one: bool,
}

enum Failure {
    Invalid(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Invalid(diags) => Failure::Invalid(
                diags
                    .iter()
                    .map(|d| format!("error: {d}"))
                    .collect::<Vec<_>>()
                    .join("\n"),
            ),
            other => Failure::Invalid(format!("error: {other}")),
        }
    }
}

type Outcome = Result<String, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("error: cannot read {}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    Ok(Instance::parse(&read(path)?)?)
}

#[derive(Serialize)]
struct CrmmJson<'a> {
    pairs: Vec<(&'a str, &'a str)>,
    signature: &'a Signature,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<&'a CrmmTrace>,
}

#[derive(Serialize)]
struct CpmJson<'a> {
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pairs: Option<Vec<(&'a str, &'a str)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    unmatched: Option<Vec<&'a str>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rank1_count: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    signature: Option<&'a Signature>,
}

#[derive(Deserialize)]
struct PairsDoc {
    #[serde(default)]
    pairs: Vec<(String, String)>,
}

fn name_pairs<'a>(inst: &'a Instance, m: &Matching) -> Vec<(&'a str, &'a str)> {
    m.pairs()
        .map(|(a, p)| (inst.applicant_name(a), inst.post_name(p)))
        .collect()
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

fn trace_text(trace: &CrmmTrace) -> String {
    let mut out = String::new();
    for it in &trace.iterations {
        let _ = writeln!(
            out,
            "round {}: added={} flow={} min_cut={}",
            it.rank,
            it.arcs_added,
            it.flow_value,
            if it.min_cut_ok { "ok" } else { "FAILED" }
        );
        for a in &it.deleted_arcs {
            let _ = writeln!(
                out,
                "  deleted {} -> {} cap={} tag={}",
                a.tail, a.head, a.cap, a.tag
            );
        }
        for e in &it.pruned_edges {
            let _ = writeln!(out, "  pruned {} {} rank={}", e.applicant, e.post, e.rank);
        }
        let _ = writeln!(out, "  rl_counts = {}", Signature(it.rl_counts.clone()));
    }
    out
}

fn crmm(path: &Path, json: bool, trace: bool) -> Outcome {
    let inst = load_instance(path)?;
    let out = solve_crmm(&inst)?;
    if json {
        return Ok(to_json(&CrmmJson {
            pairs: name_pairs(&inst, &out.matching),
            signature: &out.signature,
            trace: trace.then_some(&out.trace),
        }));
    }
    let mut text = String::new();
    if trace {
        text.push_str(&trace_text(&out.trace));
    }
    text.push_str(&out.matching.to_text(&inst));
    let _ = writeln!(text, "signature = {}", out.signature);
    Ok(text)
}

fn cpm(path: &Path, json: bool) -> Outcome {
    let inst = load_instance(path)?;
    let outcome = solve_cpm(&inst)?;
    let CpmOutcome::Popular {
        matching,
        unmatched,
        rank1_count,
        signature,
    } = &outcome
    else {
        return Ok(if json {
            to_json(&CpmJson {
                status: "none",
                pairs: None,
                unmatched: None,
                rank1_count: None,
                signature: None,
            })
        } else {
            "status: none\n".to_string()
        });
    };
    let unmatched: Vec<&str> = unmatched.iter().map(|&a| inst.applicant_name(a)).collect();
    if json {
        return Ok(to_json(&CpmJson {
            status: "popular",
            pairs: Some(name_pairs(&inst, matching)),
            unmatched: Some(unmatched),
            rank1_count: Some(*rank1_count),
            signature: Some(signature),
        }));
    }
    let mut text = String::from("status: popular\n");
    text.push_str(&matching.to_text(&inst));
    for a in unmatched {
        let _ = writeln!(text, "unmatched: {a}");
    }
    let _ = writeln!(text, "rank1 = {rank1_count}");
    let _ = writeln!(text, "signature = {signature}");
    Ok(text)
}

fn load_matching(inst: &Instance, path: &Path) -> Result<Matching, Failure> {
    let text = read(path)?;
    if text.trim_start().starts_with('{') {
        let doc: PairsDoc = serde_json::from_str(&text)
            .map_err(|e| Failure::Invalid(format!("error: bad matching JSON: {e}")))?;
        let pairs = doc.pairs.iter().map(|(a, p)| (a.as_str(), p.as_str()));
        return Ok(Matching::from_names(inst, pairs)?);
    }
    Ok(Matching::parse(inst, &text)?)
}

fn verify(inst_path: &Path, m_path: &Path, popular: bool, cap: usize) -> Outcome {
    let inst = load_instance(inst_path)?;
    let m = load_matching(&inst, m_path)?;
    let broken = violations(&inst, &m);
    let mut text = String::new();
    if broken.is_empty() {
        text.push_str("feasible\n");
    }
    for v in &broken {
        let _ = writeln!(text, "infeasible: {}", v.describe(&inst));
    }
    let _ = writeln!(text, "signature = {}", signature_of(&inst, &m));
    if popular && broken.is_empty() {
        let yes = oracle_is_popular(&inst, &m, cap)?;
        let _ = writeln!(text, "popular: {}", if yes { "yes" } else { "no" });
    }
    Ok(text)
}

fn oracle(query: &OracleQuery, cap: usize) -> Outcome {
    match query {
        OracleQuery::Rmm { instance } => {
            let inst = load_instance(instance)?;
            let (sig, m) = oracle_rmm_signature(&inst, cap)?;
            Ok(format!("{}signature = {sig}\n", m.to_text(&inst)))
        }
        OracleQuery::Popular { instance } => {
            let inst = load_instance(instance)?;
            Ok(match oracle_popular(&inst, cap)? {
                Some(m) => format!("status: popular\n{}", m.to_text(&inst)),
                None => "status: none\n".to_string(),
            })
        }
        OracleQuery::Maxcard { instance } => {
            let inst = load_instance(instance)?;
            Ok(format!(
                "max cardinality = {}\n",
                oracle_max_cardinality(&inst, cap)?
            ))
        }
        OracleQuery::Decide {
            signature,
            instance,
        } => {
            let target = Signature::parse(signature).ok_or_else(|| {
                Failure::Invalid(format!("error: cannot parse signature `{signature}`"))
            })?;
            let inst = load_instance(instance)?;
            let yes = oracle_decision(&inst, &target, cap)?;
            Ok(if yes { "yes\n" } else { "no\n" }.to_string())
        }
    }
}

fn reduce_cmd(path: &Path, output: Option<&Path>) -> Outcome {
    let f = parse_formula(&read(path)?)?;
    let (inst, target) = reduce(&f)?;
    let text = reduction_text(&inst, &target);
    match output {
        Some(out) => {
            std::fs::write(out, text)
                .map_err(|e| Failure::Io(format!("error: cannot write {}: {e}", out.display())))?;
            Ok(format!("target = {target}\n"))
        }
        None => Ok(text),
    }
}

fn sat(path: &Path) -> Outcome {
    let f = parse_formula(&read(path)?)?;
    Ok(match brute_force_1in3(&f)? {
        Some(assignment) => {
            let bits: Vec<&str> = assignment
                .iter()
                .map(|&b| if b { "1" } else { "0" })
                .collect();
            format!("sat\nassignment = {}\n", bits.join(" "))
        }
        None => "unsat\n".to_string(),
    })
}

fn gen(args: &GenArgs) -> Outcome {
    let valid = args.applicants > 0
        && args.posts > 0
        && args.max_rank > 0
        && (0.0..=1.0).contains(&args.tie_prob)
        && (0.0..=1.0).contains(&args.class_prob);
    if !valid {
        return Err(Failure::Invalid(
            "error: counts and max rank must be positive, probabilities in [0, 1]".into(),
        ));
    }
    let p = GenParams {
        applicants: args.applicants,
        posts: args.posts,
        max_rank: args.max_rank,
        tie_prob: args.tie_prob,
        depth: args.depth,
        class_prob: args.class_prob,
        max_quota: args.max_quota,
        max_edges: args.max_edges,
        many_to_one: args.many_to_one,
    };
    Ok(generate_raw(args.seed, &p).to_text())
}

fn network(path: &Path) -> Outcome {
    let inst = load_instance(path)?;
    Ok(build_base_network(&inst)?.dump(None))
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Crmm {
            instance,
            json,
            trace,
        } => crmm(instance, *json, *trace),
        Command::Cpm { instance, json } => cpm(instance, *json),
        Command::Verify {
            instance,
            matching,
            popular,
            cap,
        } => verify(instance, matching, *popular, *cap),
        Command::Oracle { query, cap } => oracle(query, *cap),
        Command::Reduce { formula, output } => reduce_cmd(formula, output.as_deref()),
        Command::Sat { formula } => sat(formula),
        Command::Gen(args) => gen(args),
        Command::Network { instance } => network(instance),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(3)
        }
    }
}
