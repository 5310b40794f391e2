use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use schemamap::chase::{chase_mapping, ChaseConfig, ChaseMode, ChaseStatus};
use schemamap::containment::{
    check_containment, check_equivalence, ContainmentConfig, ContainmentError, EquivalenceOutcome, LevelBound, Outcome,
};
use schemamap::dummy::dummy_instances;
use schemamap::hom::find_homomorphism;
use schemamap::oracle::{certain_answers, oracle_containment};
use schemamap::parser::{parse_instance, parse_mapping, parse_query, render_fact, ParseError, SourceText};
use schemamap::{Instance, Level, SchemaMapping, Symbol};
use serde_json::{json, Value as Json};

mod render;

const FORMAT: u32 = 1;

#[derive(Parser)]
#[command(
    name = "schemamap",
    version,
    about = "Containment and equivalence of schema mappings with LAV dependencies"
)]
struct Cli {
    /// Emit a single JSON object instead of human-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for per-dummy checks.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a mapping is well formed.
    Validate { mapping: PathBuf },
    /// Chase a source instance with a mapping.
    Chase {
        mapping: PathBuf,
        instance: PathBuf,
        /// Stop after this many levels.
        #[arg(long)]
        levels: Option<Level>,
        #[arg(long, value_enum, default_value_t = Mode::Oblivious)]
        mode: Mode,
        #[arg(long, default_value_t = ChaseConfig::DEFAULT_MAX_FACTS)]
        max_facts: usize,
    },
    /// Print the dummy instances of a mapping.
    Dummies { mapping: PathBuf },
    /// Search for a homomorphism between two instances.
    Hom {
        a: PathBuf,
        b: PathBuf,
        /// Mapping whose source and target relations the instances use.
        #[arg(long)]
        schema: PathBuf,
    },
    /// Decide whether the first mapping is contained in the second.
    Contains {
        left: PathBuf,
        right: PathBuf,
        /// Chase level bound for the right-hand side: `auto` or a number.
        #[arg(long, default_value = "auto", value_parser = parse_bound)]
        bound: LevelBound,
        #[arg(long, default_value_t = ChaseConfig::DEFAULT_MAX_FACTS)]
        max_facts: usize,
    },
    /// Decide whether two mappings are equivalent.
    Equiv {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, default_value = "auto", value_parser = parse_bound)]
        bound: LevelBound,
        #[arg(long, default_value_t = ChaseConfig::DEFAULT_MAX_FACTS)]
        max_facts: usize,
    },
    /// Certain answers of a query on a source instance.
    Certain {
        mapping: PathBuf,
        instance: PathBuf,
        query: PathBuf,
    },
    /// Brute-force containment check over small source instances.
    Oracle {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_facts: usize,
        #[arg(long, value_delimiter = ',', default_value = "a,b")]
        domain: Vec<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Oblivious,
    Restricted,
}

fn parse_bound(s: &str) -> Result<LevelBound, String> {
    if s == "auto" {
        return Ok(LevelBound::Auto);
    }
    s.parse::<u64>()
        .map(LevelBound::Fixed)
        .map_err(|_| format!("expected `auto` or a level, got `{s}`"))
}

/// An input problem: reported on stderr, exit code 3.
struct InputError(String);

impl From<ParseError> for InputError {
    fn from(e: ParseError) -> Self {
        InputError(match e {
            ParseError::Syntax(d) => format!("{d}"),
            other => other.to_string(),
        })
    }
}

impl From<ContainmentError> for InputError {
    fn from(e: ContainmentError) -> Self {
        InputError(e.to_string())
    }
}

impl From<schemamap::chase::ChaseError> for InputError {
    fn from(e: schemamap::chase::ChaseError) -> Self {
        InputError(e.to_string())
    }
}

impl From<schemamap::ModelError> for InputError {
    fn from(e: schemamap::ModelError) -> Self {
        InputError(e.to_string())
    }
}

/// What a command produced: human text, JSON fields, exit code.
struct Output {
    text: String,
    json: serde_json::Map<String, Json>,
    code: u8,
}

fn read(path: &Path) -> Result<SourceText, InputError> {
    SourceText::from_path(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn mapping(path: &Path) -> Result<SchemaMapping, InputError> {
    Ok(parse_mapping(&read(path)?)?)
}

fn outcome_code(o: &Outcome) -> u8 {
    match o {
        Outcome::Contained => 0,
        Outcome::NotContained => 1,
        Outcome::Inconclusive(_) => 2,
    }
}

fn containment_config(bound: LevelBound, max_facts: usize, threads: usize) -> ContainmentConfig {
    ContainmentConfig {
        level_bound: bound,
        chase_budget: ChaseConfig {
            max_facts: Some(max_facts),
            ..ChaseConfig::default()
        },
        threads: threads.max(1),
        ..ContainmentConfig::default()
    }
}

fn execute(cli: &Cli) -> Result<Output, InputError> {
    let mut json = serde_json::Map::new();
    let (text, code) = match &cli.command {
        Command::Validate { mapping: path } => match parse_mapping(&read(path)?) {
            Ok(m) => {
                json.insert("result".into(), json!({"valid": true, "violations": []}));
                (
                    format!(
                        "valid: {} source-to-target, {} target dependencies\n",
                        m.st_tgds.len(),
                        m.t_tgds.len()
                    ),
                    0,
                )
            }
            Err(ParseError::Invalid { diagnostics, .. }) => {
                let lines: Vec<String> = diagnostics.iter().map(ToString::to_string).collect();
                json.insert("result".into(), json!({"valid": false, "violations": lines}));
                (lines.iter().map(|l| format!("{l}\n")).collect(), 1)
            }
            Err(e) => return Err(e.into()),
        },
        Command::Chase {
            mapping: path,
            instance,
            levels,
            mode,
            max_facts,
        } => {
            let m = mapping(path)?;
            let i = parse_instance(&read(instance)?, &m.source)?;
            let cfg = ChaseConfig {
                mode: match mode {
                    Mode::Oblivious => ChaseMode::Oblivious,
                    Mode::Restricted => ChaseMode::Restricted,
                },
                max_facts: Some(*max_facts),
                max_level: *levels,
            };
            let r = chase_mapping(&i, &m, &cfg)?;
            let terminated = r.status == ChaseStatus::Terminated;
            let facts: Vec<Json> = r
                .instance
                .iter()
                .map(|(f, l)| json!({"fact": render_fact(f), "level": l}))
                .collect();
            json.insert(
                "result".into(),
                json!({"status": if terminated { "terminated" } else { "budget_exhausted" }, "steps": r.steps, "facts": facts}),
            );
            let text: String = r
                .instance
                .iter()
                .map(|(f, l)| format!("{}. -- level {l}\n", render_fact(f)))
                .collect();
            if !terminated {
                eprintln!("chase stopped before saturation after {} steps", r.steps);
            }
            (text, if terminated { 0 } else { 4 })
        }
        Command::Dummies { mapping: path } => {
            let m = mapping(path)?;
            let d = dummy_instances(&m);
            let list: Vec<Json> = d.iter().map(|x| Json::String(render_fact(x.fact()))).collect();
            json.insert("result".into(), Json::Array(list));
            (d.to_string(), 0)
        }
        Command::Hom { a, b, schema } => {
            let m = mapping(schema)?;
            let union = m.union_schema()?;
            let ia = parse_instance(&read(a)?, &union)?;
            let ib = parse_instance(&read(b)?, &union)?;
            match find_homomorphism(&ia, &ib)? {
                Some(h) => {
                    let pairs: serde_json::Map<String, Json> = h
                        .null_part()
                        .map(|(k, v)| (k.to_string(), Json::String(v.to_string())))
                        .collect();
                    json.insert("result".into(), json!({"found": true, "assignment": pairs}));
                    let lines: String = h.null_part().map(|(k, v)| format!("{k} -> {v}\n")).collect();
                    (format!("FOUND\n{lines}"), 0)
                }
                None => {
                    json.insert("result".into(), json!({"found": false, "assignment": null}));
                    ("ABSENT\n".into(), 1)
                }
            }
        }
        Command::Contains {
            left,
            right,
            bound,
            max_facts,
        } => {
            let (a, b) = (mapping(left)?, mapping(right)?);
            let v = check_containment(&a, &b, &containment_config(*bound, *max_facts, cli.threads))?;
            render::verdict_json(&v, &mut json);
            (render::verdict_text(&v, &a), outcome_code(&v.outcome))
        }
        Command::Equiv {
            left,
            right,
            bound,
            max_facts,
        } => {
            let (a, b) = (mapping(left)?, mapping(right)?);
            let v = check_equivalence(&a, &b, &containment_config(*bound, *max_facts, cli.threads))?;
            let code = match v.outcome {
                EquivalenceOutcome::Equivalent => 0,
                EquivalenceOutcome::NotEquivalent { .. } => 1,
                EquivalenceOutcome::Inconclusive(_) => 2,
            };
            render::equivalence_json(&v, &mut json);
            (render::equivalence_text(&v, &a, &b), code)
        }
        Command::Certain {
            mapping: path,
            instance,
            query,
        } => {
            let m = mapping(path)?;
            let i = parse_instance(&read(instance)?, &m.source)?;
            let q = parse_query(&read(query)?, &m.target)?;
            let ans = certain_answers(&q, &i, &m, &ChaseConfig::default())?;
            let tuples: Vec<Vec<String>> = ans
                .tuples
                .iter()
                .map(|t| t.iter().map(ToString::to_string).collect())
                .collect();
            json.insert(
                "result".into(),
                json!({"tuples": tuples, "lower_bound": ans.lower_bound}),
            );
            if ans.lower_bound {
                eprintln!("chase budget exhausted: answers are a lower bound");
            }
            (ans.to_lines(), 0)
        }
        Command::Oracle {
            left,
            right,
            max_facts,
            domain,
        } => {
            let (a, b) = (mapping(left)?, mapping(right)?);
            let dom: Vec<Symbol> = domain.iter().map(Symbol::new).collect();
            let v = oracle_containment(&a, &b, *max_facts, &dom, &ChaseConfig::default())?;
            json.insert("verdict".into(), render::outcome_json(&v.outcome));
            json.insert(
                "result".into(),
                json!({
                    "instances_checked": v.instances_checked,
                    "max_facts": v.max_facts,
                    "domain": domain,
                    "counterexample": v.counterexample.as_ref().map(instance_lines),
                }),
            );
            let mut text = format!(
                "{} (checked {} source instances of at most {} facts over {{{}}})\n",
                v.outcome,
                v.instances_checked,
                v.max_facts,
                domain.join(",")
            );
            if let Some(c) = &v.counterexample {
                text.push_str("counterexample:\n");
                text.push_str(&c.to_string());
            }
            (text, outcome_code(&v.outcome))
        }
    };
    Ok(Output { text, json, code })
}

fn instance_lines(i: &Instance) -> Vec<String> {
    i.facts().map(render_fact).collect()
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate { .. } => "validate",
        Command::Chase { .. } => "chase",
        Command::Dummies { .. } => "dummies",
        Command::Hom { .. } => "hom",
        Command::Contains { .. } => "contains",
        Command::Equiv { .. } => "equiv",
        Command::Certain { .. } => "certain",
        Command::Oracle { .. } => "oracle",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    let start = Instant::now();
    match execute(&cli) {
        Ok(mut out) => {
            if cli.json {
                let mut obj = serde_json::Map::new();
                obj.insert("format".into(), json!(FORMAT));
                obj.insert("command".into(), json!(command_name(&cli.command)));
                obj.entry("witnesses").or_insert(json!([]));
                obj.entry("bound_used").or_insert(Json::Null);
                obj.append(&mut out.json);
                let timings = obj.entry("timings_ms").or_insert(json!({}));
                timings["total"] = json!(start.elapsed().as_secs_f64() * 1e3);
                println!("{}", Json::Object(obj));
            } else {
                print!("{}", out.text);
            }
            ExitCode::from(out.code)
        }
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
