use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use log::info;
use serde::Serialize;

use sygns::dataset::{self, Mr, RecordBuilder};
use sygns::entail::{self, atp_report, tptp_problem, AtpReport, Budget, EntailmentVerdict, ExternalProver};
use sygns::fol::Fol;
use sygns::grammar::{sample_trees, Fragment};
use sygns::lexicon::Quantifier;
use sygns::metrics::{EvalReport, MatchConfig};
use sygns::pipeline::{evaluate, EvalConfig, Metric};
use sygns::semantics::{ProperNounStyle, SemanticsConfig};
use sygns::splits::{self, Split, SplitSpec, Strategy};
use sygns::{Error, Lexicon};

#[derive(Parser, Debug)]
#[command(name = "sygns", version, about = "Generate sentence / meaning-representation datasets and score parsers")]
#[command(args_override_self = true)]
struct Cli {
    /// TOML file with one table per subcommand; flags given on the command
    /// line take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
enum Command {
    /// Sample sentences from the full grammar into a JSONL pool.
    Generate(GenerateArgs),
    /// Build a controlled train/valid/test split.
    Split(SplitArgs),
    /// Write TSV and clause files for one or all representations.
    Convert(ConvertArgs),
    /// Mark polarities of a formula or of every record in a file.
    Polarity(PolarityArgs),
    /// Score predictions against gold records.
    Evaluate(EvaluateArgs),
    /// Decide entailment between gold and predicted formulas.
    Prove(ProveArgs),
    /// Render or average evaluation reports.
    Report(ReportArgs),
}

#[derive(Args, Debug, Serialize)]
struct LexiconArgs {
    /// Lexicon TOML; the built-in lexicon when omitted.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// How proper nouns enter first-order formulas.
    #[arg(long, default_value = "predicate", value_parser = parse_proper_nouns)]
    proper_nouns: ProperNounStyle,
}

#[derive(Args, Debug, Serialize)]
struct GenerateArgs {
    #[command(flatten)]
    lexicon: LexiconArgs,
    #[arg(long, default_value_t = 1)]
    max_depth: usize,
    #[arg(long, default_value_t = 50_000)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also allow relative clauses on proper nouns.
    #[arg(long)]
    proper_noun_relatives: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct SplitArgs {
    #[command(flatten)]
    lexicon: LexiconArgs,
    #[arg(long, value_parser = parse_strategy)]
    strategy: Strategy,
    /// Comma-separated primitive quantifiers.
    #[arg(long)]
    primitive: Option<String>,
    #[arg(long)]
    pool: Option<usize>,
    #[arg(long)]
    train: Option<usize>,
    #[arg(long)]
    basic1_share: Option<f64>,
    #[arg(long)]
    per_depth: Option<usize>,
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long)]
    train_max_depth: Option<usize>,
    #[arg(long)]
    valid_fraction: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory receiving train.jsonl, valid.jsonl, test.jsonl.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct ConvertArgs {
    #[arg(long)]
    input: PathBuf,
    /// fol, vf, drs or all.
    #[arg(long, default_value = "all")]
    mr: String,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct PolarityArgs {
    #[command(flatten)]
    lexicon: LexiconArgs,
    /// A single formula, marked and printed.
    #[arg(long, conflicts_with = "input")]
    formula: Option<String>,
    #[arg(long, requires = "out")]
    input: Option<PathBuf>,
    #[arg(long, default_value = "fol", value_parser = parse_mr)]
    mr: Mr,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct EvaluateArgs {
    #[command(flatten)]
    lexicon: LexiconArgs,
    #[arg(long)]
    gold: PathBuf,
    #[arg(long)]
    pred: PathBuf,
    #[arg(long, value_parser = parse_mr)]
    mr: Mr,
    /// Comma-separated subset of exact, counter, polarity, entail.
    #[arg(long, default_value = "exact")]
    metrics: String,
    #[arg(long)]
    report: PathBuf,
    /// Plain-text breakdown table.
    #[arg(long)]
    table: Option<PathBuf>,
    /// Per-record outcomes as JSONL.
    #[arg(long)]
    records: Option<PathBuf>,
    #[command(flatten)]
    matching: MatchingArgs,
    #[command(flatten)]
    budget: BudgetArgs,
    /// External prover command for the entail metric; `{}` is the problem file.
    #[arg(long, alias = "prover")]
    external: Option<String>,
}

#[derive(Args, Debug, Serialize)]
struct MatchingArgs {
    #[arg(long, default_value_t = 10)]
    restarts: usize,
    #[arg(long, default_value_t = 8)]
    exhaustive_threshold: usize,
    #[arg(long, default_value_t = 0)]
    match_seed: u64,
    /// Count REF clauses in clause matching.
    #[arg(long)]
    count_ref: bool,
}

#[derive(Args, Debug, Serialize)]
struct BudgetArgs {
    #[arg(long, default_value_t = 4)]
    max_domain: usize,
    #[arg(long, default_value_t = 10_000)]
    timeout_ms: u64,
}

#[derive(Args, Debug, Serialize)]
struct ProveArgs {
    #[command(flatten)]
    lexicon: LexiconArgs,
    #[arg(long, requires = "pred")]
    gold: Option<PathBuf>,
    #[arg(long, requires = "gold")]
    pred: Option<PathBuf>,
    #[arg(long, default_value = "fol", value_parser = parse_mr)]
    mr: Mr,
    /// Single-pair mode: premise formula.
    #[arg(long, conflicts_with = "gold", requires = "conclusion")]
    premise: Option<String>,
    #[arg(long, requires = "premise")]
    conclusion: Option<String>,
    /// External prover command; `{}` is the problem file.
    #[arg(long, alias = "prover")]
    external: Option<String>,
    /// Directory receiving one TPTP problem per direction.
    #[arg(long)]
    emit_tptp: Option<PathBuf>,
    /// Verdicts as JSONL; printed when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Accuracy summary as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Args, Debug, Serialize)]
struct ReportArgs {
    /// Report JSON files; several are averaged cell by cell.
    #[arg(long, required = true, num_args = 1..)]
    input: Vec<PathBuf>,
    /// Averaged report JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Plain-text table; printed when omitted.
    #[arg(long)]
    table: Option<PathBuf>,
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_mr(s: &str) -> Result<Mr, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_proper_nouns(s: &str) -> Result<ProperNounStyle, String> {
    match s {
        "predicate" => Ok(ProperNounStyle::Predicate),
        "constant" => Ok(ProperNounStyle::Constant),
        _ => Err(format!("expected predicate or constant, found {s:?}")),
    }
}

fn parse_quantifiers(s: &str) -> Result<Vec<Quantifier>, Error> {
    s.split(',')
        .map(str::trim)
        .filter(|w| !w.is_empty())
        .map(|w| Quantifier::from_word(w).ok_or_else(|| Error::Config(format!("unknown quantifier {w:?}"))))
        .collect()
}

fn parse_metrics(s: &str) -> Result<Vec<Metric>, Error> {
    s.split(',').map(str::trim).filter(|w| !w.is_empty()).map(str::parse).collect()
}

/// Failure classes mapped to exit codes: usage 1, data 2, external tool 3.
enum Failure {
    Usage(String),
    Data(Error),
    External(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(m) => Failure::Usage(m),
            Error::External(m) => Failure::External(m),
            other => Failure::Data(other),
        }
    }
}

type Outcome<T = ()> = std::result::Result<T, Failure>;

/// Arguments from the `[subcommand]` table of the config file, as flags
/// placed before the command-line ones so that the latter win.
fn config_args(path: &Path, argv: &[OsString]) -> Outcome<Vec<OsString>> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let sub_names: Vec<String> = Cli::command().get_subcommands().map(|c| c.get_name().to_string()).collect();
    let Some(pos) = argv.iter().position(|a| sub_names.iter().any(|n| a == n.as_str())) else {
        return Ok(argv.to_vec());
    };
    let sub = argv[pos].to_string_lossy().into_owned();
    let mut extra: Vec<OsString> = Vec::new();
    if let Some(section) = table.get(&sub) {
        let section = section
            .as_table()
            .ok_or_else(|| Failure::Usage(format!("config: [{sub}] is not a table")))?;
        for (key, value) in section {
            let flag = format!("--{}", key.replace('_', "-"));
            match value {
                toml::Value::Boolean(true) => extra.push(flag.into()),
                toml::Value::Boolean(false) => {}
                toml::Value::String(s) => extra.extend([flag.into(), s.into()]),
                toml::Value::Integer(_) | toml::Value::Float(_) => extra.extend([flag.into(), value.to_string().into()]),
                toml::Value::Array(xs) => {
                    let parts: Vec<String> = xs
                        .iter()
                        .map(|x| x.as_str().map(String::from).unwrap_or_else(|| x.to_string()))
                        .collect();
                    extra.extend([flag.into(), parts.join(",").into()]);
                }
                other => return Err(Failure::Usage(format!("config: unsupported value for {key}: {other}"))),
            }
        }
    }
    let mut out = argv[..=pos].to_vec();
    out.extend(extra);
    out.extend_from_slice(&argv[pos + 1..]);
    Ok(out)
}

fn config_path(argv: &[OsString]) -> Option<PathBuf> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

fn load_lexicon(args: &LexiconArgs) -> Outcome<Lexicon> {
    match &args.lexicon {
        Some(p) => Ok(Lexicon::load(p)?),
        None => Ok(Lexicon::default()),
    }
}

fn semantics(args: &LexiconArgs) -> SemanticsConfig {
    SemanticsConfig {
        proper_nouns: args.proper_nouns,
        ..SemanticsConfig::default()
    }
}

fn budget(args: &BudgetArgs) -> Budget {
    Budget {
        max_domain: args.max_domain,
        timeout_ms: args.timeout_ms,
        ..Budget::default()
    }
}

fn external(template: &Option<String>, timeout_ms: u64) -> Outcome<Option<ExternalProver>> {
    let Some(t) = template else {
        return Ok(None);
    };
    let prover = ExternalProver::new(t, Duration::from_millis(timeout_ms));
    if !prover.is_available() {
        let prog = t.split_whitespace().next().unwrap_or("");
        return Err(Failure::External(format!("external prover binary not found: {prog}")));
    }
    Ok(Some(prover))
}

fn write_file(path: &Path, text: &str) -> Outcome {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Outcome {
    let mut text = serde_json::to_string_pretty(value).map_err(Error::from)?;
    text.push('\n');
    write_file(path, &text)
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a Command,
    #[serde(skip_serializing_if = "Option::is_none")]
    settings: Option<serde_json::Value>,
    inputs: Vec<String>,
    outputs: Vec<(String, usize)>,
}

fn write_manifest(path: &Path, command: &Command, inputs: &[&Path], outputs: &[(&Path, usize)]) -> Outcome {
    write_manifest_with(path, command, None, inputs, outputs)
}

/// `settings` records resolved values, such as defaults filled in by a spec.
fn write_manifest_with(
    path: &Path,
    command: &Command,
    settings: Option<serde_json::Value>,
    inputs: &[&Path],
    outputs: &[(&Path, usize)],
) -> Outcome {
    let m = Manifest {
        tool: "sygns",
        version: env!("CARGO_PKG_VERSION"),
        command,
        settings,
        inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
        outputs: outputs.iter().map(|(p, n)| (p.display().to_string(), *n)).collect(),
    };
    write_json(path, &m)
}

fn manifest_beside(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.manifest.json"))
}

fn run_generate(a: &GenerateArgs, cmd: &Command) -> Outcome {
    let lex = load_lexicon(&a.lexicon)?;
    let mut fragment = Fragment::table9(a.max_depth);
    if a.proper_noun_relatives {
        fragment = fragment.with_proper_noun_relatives();
    }
    let trees = sample_trees(&lex, fragment, a.n, a.seed, None)?;
    let records = RecordBuilder::new(&lex, semantics(&a.lexicon)).build_all("pool", &trees)?;
    dataset::write_jsonl(&a.out, &records)?;
    info!("wrote {} records to {}", records.len(), a.out.display());
    write_manifest(&manifest_beside(&a.out), cmd, &[], &[(&a.out, records.len())])
}

fn run_split(a: &SplitArgs, cmd: &Command) -> Outcome {
    let lex = load_lexicon(&a.lexicon)?;
    let mut spec = SplitSpec::new(a.strategy).with_seed(a.seed);
    if let Some(p) = &a.primitive {
        spec.primitives = parse_quantifiers(p)?;
    }
    spec.pool = a.pool.unwrap_or(spec.pool);
    spec.train = a.train.unwrap_or(spec.train);
    spec.basic1_share = a.basic1_share.or(spec.basic1_share);
    spec.per_depth = a.per_depth.unwrap_or(spec.per_depth);
    spec.max_depth = a.max_depth.unwrap_or(spec.max_depth);
    spec.train_max_depth = a.train_max_depth.unwrap_or(spec.train_max_depth);
    spec.valid_fraction = a.valid_fraction.unwrap_or(spec.valid_fraction);
    let partition = splits::build(&lex, &spec)?;
    let records = RecordBuilder::new(&lex, semantics(&a.lexicon)).build_partition(&partition)?;
    let mut outputs = Vec::new();
    for split in [Split::Train, Split::Valid, Split::Test] {
        let part: Vec<_> = records.iter().filter(|r| r.split == Some(split)).cloned().collect();
        let path = a.out_dir.join(format!("{split}.jsonl"));
        dataset::write_jsonl(&path, &part)?;
        info!("wrote {} {split} records to {}", part.len(), path.display());
        outputs.push((path, part.len()));
    }
    let outs: Vec<(&Path, usize)> = outputs.iter().map(|(p, n)| (p.as_path(), *n)).collect();
    let settings = serde_json::to_value(&spec).map_err(Error::from)?;
    write_manifest_with(&a.out_dir.join("manifest.json"), cmd, Some(settings), &[], &outs)
}

fn run_convert(a: &ConvertArgs, cmd: &Command) -> Outcome {
    let records = dataset::read_jsonl(&a.input)?;
    let mrs: Vec<Mr> = if a.mr == "all" { Mr::ALL.to_vec() } else { vec![a.mr.parse()?] };
    let stem = a.input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let mut outputs = Vec::new();
    for mr in mrs {
        let path = a.out_dir.join(format!("{stem}.{mr}.tsv"));
        dataset::write_tsv(&path, &records, mr)?;
        outputs.push(path);
        if mr == Mr::Drs {
            let path = a.out_dir.join(format!("{stem}.clf"));
            dataset::write_clf(&path, &records)?;
            outputs.push(path);
        }
    }
    let outs: Vec<(&Path, usize)> = outputs.iter().map(|p| (p.as_path(), records.len())).collect();
    write_manifest(&a.out_dir.join(format!("{stem}.convert.manifest.json")), cmd, &[&a.input], &outs)
}

fn marks(tokens: &[sygns::polarity::PolarizedToken]) -> String {
    tokens.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" ")
}

fn polarize(lex: &Lexicon, mr: Mr, text: &str) -> Outcome<String> {
    let p = sygns::polarity::Polarizer::for_lexicon(lex);
    let tokens = match mr {
        Mr::Fol => p.fol(&Fol::parse(text)?),
        Mr::Vf => p.vf(&sygns::vf::Vf::parse(text)?),
        Mr::Drs => p.fol(&sygns::drs::ClausalDrs::parse_inline(text)?.to_fol()?),
    };
    Ok(marks(&tokens))
}

fn run_polarity(a: &PolarityArgs, cmd: &Command) -> Outcome {
    let lex = load_lexicon(&a.lexicon)?;
    if let Some(f) = &a.formula {
        println!("{}", polarize(&lex, a.mr, f)?);
        return Ok(());
    }
    let (Some(input), Some(out)) = (&a.input, &a.out) else {
        return Err(Failure::Usage("polarity needs --formula, or --input with --out".into()));
    };
    let records = dataset::read_jsonl(input)?;
    let mut text = String::new();
    for r in &records {
        text.push_str(&format!("{}\t{}\t{}\n", r.id, r.sentence, polarize(&lex, a.mr, &r.target(a.mr))?));
    }
    write_file(out, &text)?;
    write_manifest(&manifest_beside(out), cmd, &[input], &[(out, records.len())])
}

#[derive(Serialize)]
struct ReportFile<'a> {
    #[serde(flatten)]
    report: &'a EvalReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    atp: Option<AtpReport>,
}

fn run_evaluate(a: &EvaluateArgs, cmd: &Command) -> Outcome {
    let lex = load_lexicon(&a.lexicon)?;
    let gold = dataset::read_jsonl(&a.gold)?;
    let preds = dataset::read_predictions(&a.pred)?;
    let mut cfg = EvalConfig::new(a.mr, &parse_metrics(&a.metrics)?);
    cfg.matching = MatchConfig {
        restarts: a.matching.restarts,
        exhaustive_threshold: a.matching.exhaustive_threshold,
        seed: a.matching.match_seed,
        count_ref: a.matching.count_ref,
        ..MatchConfig::default()
    };
    cfg.budget = budget(&a.budget);
    cfg.semantics = semantics(&a.lexicon);
    cfg.external = external(&a.external, a.budget.timeout_ms)?;
    let e = evaluate(&lex, &gold, &preds, &cfg)?;
    write_json(
        &a.report,
        &ReportFile {
            report: &e.report,
            atp: e.atp,
        },
    )?;
    if let Some(t) = &a.table {
        write_file(t, &e.report.to_table())?;
    }
    if let Some(p) = &a.records {
        let mut text = String::new();
        for r in &e.records {
            text.push_str(&serde_json::to_string(r).map_err(Error::from)?);
            text.push('\n');
        }
        write_file(p, &text)?;
    }
    info!("scored {} records, {} unparseable", e.report.records, e.report.unparseable);
    write_manifest(
        &manifest_beside(&a.report),
        cmd,
        &[&a.gold, &a.pred],
        &[(&a.report, e.report.records)],
    )
}

#[derive(Serialize)]
struct VerdictLine<'a> {
    id: &'a str,
    direction: String,
    verdict: String,
    witness: String,
}

fn run_prove(a: &ProveArgs, cmd: &Command) -> Outcome {
    let lex = load_lexicon(&a.lexicon)?;
    let prover = external(&a.external, a.budget.timeout_ms)?;
    let b = budget(&a.budget);
    let pairs: Vec<(String, Option<(Fol, Fol)>)> = match (&a.premise, &a.conclusion, &a.gold, &a.pred) {
        (Some(p), Some(c), _, _) => vec![("pair".to_string(), Some((Fol::parse(p)?, Fol::parse(c)?)))],
        (_, _, Some(g), Some(p)) => {
            let gold = dataset::read_jsonl(g)?;
            let preds = dataset::read_predictions(p)?;
            if preds.is_empty() {
                return Err(Error::NoRecords.into());
            }
            let composer = sygns::semantics::Composer::new(&lex, semantics(&a.lexicon));
            let read = |text: &str| -> Option<Fol> {
                match a.mr {
                    Mr::Fol => Fol::parse(text).ok(),
                    Mr::Vf => composer.vf_to_fol(&sygns::vf::Vf::parse(text).ok()?).ok(),
                    Mr::Drs => sygns::drs::ClausalDrs::parse_inline(text).ok()?.to_fol().ok(),
                }
            };
            let by_id: std::collections::HashMap<&str, &str> =
                preds.iter().map(|p| (p.id.as_str(), p.raw.as_str())).collect();
            gold.iter()
                .map(|r| {
                    let pred = by_id.get(r.id.as_str()).copied().unwrap_or("");
                    let pair = read(&r.target(a.mr)).zip(read(pred));
                    (r.id.clone(), pair)
                })
                .collect()
        }
        _ => return Err(Failure::Usage("prove needs --premise and --conclusion, or --gold and --pred".into())),
    };
    if let Some(dir) = &a.emit_tptp {
        for (id, pair) in &pairs {
            if let Some((g, p)) = pair {
                write_file(&dir.join(format!("{id}.g2p.p")), &tptp_problem(g, p))?;
                write_file(&dir.join(format!("{id}.p2g.p")), &tptp_problem(p, g))?;
            }
        }
    }
    use rayon::prelude::*;
    let verdicts: Vec<[EntailmentVerdict; 2]> = pairs
        .par_iter()
        .map(|(_, pair)| match (pair, &prover) {
            (Some((g, p)), Some(ext)) => ext.check(g, p),
            (Some((g, p)), None) => entail::check(g, p, &b),
            (None, _) => entail::malformed(),
        })
        .collect();
    let mut lines = String::new();
    for ((id, _), vs) in pairs.iter().zip(&verdicts) {
        for v in vs {
            let line = VerdictLine {
                id,
                direction: v.direction.to_string(),
                verdict: v.verdict.to_string(),
                witness: v.describe(),
            };
            lines.push_str(&serde_json::to_string(&line).map_err(Error::from)?);
            lines.push('\n');
        }
    }
    match &a.out {
        Some(p) => write_file(p, &lines)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(lines.as_bytes()).map_err(|e| Error::io("<stdout>", e))?;
        }
    }
    let summary = atp_report(&verdicts);
    info!(
        "G=>P {:.3}  G<=P {:.3}  G<=>P {:.3}  unknown {}/{}",
        summary.gold_to_pred,
        summary.pred_to_gold,
        summary.both,
        summary.unknown_gold_to_pred,
        summary.unknown_pred_to_gold
    );
    if let Some(r) = &a.report {
        write_json(r, &summary)?;
        let inputs: Vec<&Path> = [&a.gold, &a.pred].into_iter().flatten().map(|p| p.as_path()).collect();
        write_manifest(&manifest_beside(r), cmd, &inputs, &[(r, pairs.len())])?;
    }
    Ok(())
}

fn run_report(a: &ReportArgs, cmd: &Command) -> Outcome {
    let mut reports = Vec::new();
    for p in &a.input {
        let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
        let r: EvalReport = serde_json::from_str(&text).map_err(Error::from)?;
        reports.push(r);
    }
    let mean = EvalReport::mean(&reports).ok_or(Error::NoRecords)?;
    if let Some(o) = &a.out {
        write_json(o, &mean)?;
        let inputs: Vec<&Path> = a.input.iter().map(|p| p.as_path()).collect();
        write_manifest(&manifest_beside(o), cmd, &inputs, &[(o, mean.records)])?;
    }
    match &a.table {
        Some(t) => write_file(t, &mean.to_table())?,
        None => print!("{}", mean.to_table()),
    }
    Ok(())
}

fn run(argv: Vec<OsString>) -> Outcome {
    let argv = match config_path(&argv) {
        Some(p) => config_args(&p, &argv)?,
        None => argv,
    };
    let matches = match Cli::command().try_get_matches_from(&argv) {
        Ok(m) => m,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return Ok(());
        }
        Err(e) => return Err(Failure::Usage(e.render().to_string())),
    };
    let cli = Cli::from_arg_matches(&matches).map_err(|e| Failure::Usage(e.to_string()))?;
    if cli.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let cmd = &cli.command;
    match cmd {
        Command::Generate(a) => run_generate(a, cmd),
        Command::Split(a) => run_split(a, cmd),
        Command::Convert(a) => run_convert(a, cmd),
        Command::Polarity(a) => run_polarity(a, cmd),
        Command::Evaluate(a) => run_evaluate(a, cmd),
        Command::Prove(a) => run_prove(a, cmd),
        Command::Report(a) => run_report(a, cmd),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    match run(std::env::args_os().collect()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("{}", m.trim_end());
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::External(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
