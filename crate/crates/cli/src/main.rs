//! `twistchar`: volume tables, zeta assemblies, character values and the
//! full verification suite, with exact rational output.

mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;

use twistchar::character::{character_value, CaseSelector, CharacterCase, CharacterVerdict};
use twistchar::classreps::{build_rep, ClassParams};
use twistchar::closed_forms::closed_form_volume;
use twistchar::forms::{normal_form, CaseLabel, FormCase, QuadraticForm};
use twistchar::localfield::{LocalField, DEFAULT_PRECISION};
use twistchar::measure::{
    count_hensel, count_naive, cross_check, default_budget, volume_sequence, Engine, Tail,
    VolumeSequence,
};
use twistchar::suite::{run_suite, SuiteOptions};
use twistchar::zeta::{detect_tail, zeta, RationalFunction};
use twistchar::Error;

use report::{emit, json, Format, Table};

#[derive(Parser)]
#[command(
    name = "twistchar",
    version,
    about = "Exact p-adic volumes and twisted character values"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Table of vol(V_n^0) for n <= max-n.
    Volumes {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        form: FormSel,
    },
    /// The zeta sum as a rational function in X and its value at s = 0.
    Zeta {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        form: FormSel,
        /// Expected rational function, e.g. "(1 - 1/81*X)/(1 - 1/3*X)".
        #[arg(long)]
        check_rf: Option<String>,
    },
    /// Character value of one twisted class at s = 0.
    Character {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        class: ClassSel,
        /// Include the representative matrix in the report.
        #[arg(long)]
        dump_rep: bool,
    },
    /// Runs every check and prints "N/N checks passed".
    Verify {
        /// Primes to check, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = vec![3u64, 5, 7])]
        prime: Vec<u64>,
        #[arg(long, default_value_t = 6)]
        max_n: u32,
        #[arg(long, value_enum, default_value_t = EngineArg::Both)]
        engine: EngineArg,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Number of primitive zeros mod p^k for k = 1..=max-n.
    Count {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        form: FormSel,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    prime: u64,
    #[arg(long, default_value_t = 6)]
    max_n: u32,
    #[arg(long, value_enum, default_value_t = EngineArg::Both)]
    engine: EngineArg,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct FormSel {
    /// Catalog label such as I.1 or IV-u.
    #[arg(long)]
    case: Option<String>,
    /// A form over x, y, z, t with constants u, pi, d, e.g. "x^2 - u*y^2 - pi*z*t".
    #[arg(long)]
    form_expr: Option<String>,
}

#[derive(Args)]
struct ClassSel {
    #[arg(long = "type")]
    class_type: Option<String>,
    #[arg(long)]
    case: Option<String>,
    #[arg(long = "D")]
    d: Option<String>,
    #[arg(long = "A")]
    a: Option<String>,
    #[arg(long)]
    r: Option<String>,
    #[arg(long)]
    br: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineArg {
    Naive,
    Hensel,
    Both,
}

impl EngineArg {
    /// The engine that produces reported numbers; `both` adds a naive cross-check.
    fn primary(self) -> Engine {
        match self {
            EngineArg::Naive => Engine::Naive,
            EngineArg::Hensel | EngineArg::Both => Engine::Hensel,
        }
    }
}

enum Failure {
    /// Bad flags or configuration; exit 2.
    Usage(String),
    /// A computed value disagreed with its expectation; exit 1.
    Mismatch(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::TailUndetected(_) | Error::Pole(_) => Failure::Mismatch(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CliResult = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Volumes { common, form } => cmd_volumes(&common, &form),
        Command::Zeta {
            common,
            form,
            check_rf,
        } => cmd_zeta(&common, &form, check_rf.as_deref()),
        Command::Character {
            common,
            class,
            dump_rep,
        } => cmd_character(&common, &class, dump_rep),
        Command::Verify {
            prime,
            max_n,
            engine,
            format,
            output,
        } => cmd_verify(&prime, max_n, engine, format, output),
        Command::Count { common, form } => cmd_count(&common, &form),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch(msg)) => {
            eprintln!("mismatch: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

/// Field with enough precision for volumes up to `n_max` plus zeta assembly.
fn field_for(prime: u64, n_max: u32) -> Result<LocalField, Error> {
    LocalField::with_precision(prime, DEFAULT_PRECISION.max(n_max + 2))
}

fn resolve_form(
    sel: &FormSel,
    field: &LocalField,
) -> Result<(Option<CaseLabel>, QuadraticForm), Error> {
    match (&sel.case, &sel.form_expr) {
        (Some(label), _) => {
            let label: CaseLabel = label.parse()?;
            Ok((Some(label), normal_form(&FormCase::new(label, *field)?)?))
        }
        (None, Some(expr)) => Ok((None, QuadraticForm::parse(expr, field)?)),
        (None, None) => Err(Error::InvalidParameters(
            "give --case or --form-expr".into(),
        )),
    }
}

#[derive(Serialize)]
struct TailJson {
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    from: Option<usize>,
}

impl TailJson {
    fn of(tail: &Tail) -> Self {
        match tail {
            Tail::Undetected => TailJson {
                kind: "undetected",
                rho: None,
                from: None,
            },
            Tail::Finite => TailJson {
                kind: "finite",
                rho: None,
                from: None,
            },
            Tail::Geometric { rho, from, .. } => TailJson {
                kind: "geometric",
                rho: Some(rho.to_string()),
                from: Some(*from),
            },
        }
    }
}

#[derive(Serialize)]
struct VolumesJson {
    q: u64,
    form: String,
    volumes: Vec<[String; 2]>,
    tail: TailJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    closed_form: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    /// `null` where a level was beyond the naive budget.
    engines_agree: Option<Vec<Option<bool>>>,
}

/// Sequence with its tail, leaving the tail undetected when it cannot be found.
fn with_tail(vs: VolumeSequence) -> VolumeSequence {
    detect_tail(&vs).unwrap_or(vs)
}

/// Naive/Hensel agreement per volume row: row n needs levels n and n + 1.
fn engine_agreement(
    form: &QuadraticForm,
    n_max: u32,
    field: &LocalField,
) -> Result<(Vec<Option<bool>>, Vec<String>), Error> {
    let cmp = cross_check(form, n_max + 1, field, default_budget())?;
    let problems = cmp
        .iter()
        .filter(|c| !c.agrees())
        .map(|c| format!("level {}: naive {} vs hensel {}", c.k, c.naive, c.hensel))
        .collect();
    let level_ok = |k: u32| {
        if k == 0 {
            Some(true)
        } else {
            cmp.get(k as usize - 1).map(|c| c.agrees())
        }
    };
    let rows = (0..=n_max)
        .map(|n| Some(level_ok(n)? && level_ok(n + 1)?))
        .collect();
    Ok((rows, problems))
}

fn cmd_volumes(common: &Common, sel: &FormSel) -> CliResult {
    let field = field_for(common.prime, common.max_n)?;
    let (label, form) = resolve_form(sel, &field)?;
    let vs = with_tail(volume_sequence(
        &form,
        common.max_n,
        &field,
        common.engine.primary(),
    )?);
    let closed: Option<Vec<BigRational>> = label.map(|l| {
        (0..=common.max_n)
            .map(|n| closed_form_volume(l, n, field.q()))
            .collect()
    });
    let (agree, problems) = if common.engine == EngineArg::Both {
        let (rows, problems) = engine_agreement(&form, common.max_n, &field)?;
        (Some(rows), problems)
    } else {
        (None, Vec::new())
    };

    let text = match common.format {
        Format::Json => json(&VolumesJson {
            q: field.q(),
            form: form.render(&field),
            volumes: vs
                .values
                .iter()
                .enumerate()
                .map(|(n, v)| [n.to_string(), v.to_string()])
                .collect(),
            tail: TailJson::of(&vs.tail),
            closed_form: closed
                .as_ref()
                .map(|c| c.iter().map(|v| v.to_string()).collect()),
            engines_agree: agree.clone(),
        })?,
        Format::Csv | Format::Table => {
            let mut t = Table::new(vec!["n", "volume", "closed form", "match", "engines"]);
            for (n, v) in vs.values.iter().enumerate() {
                let (cf, m) = match &closed {
                    Some(c) => (c[n].to_string(), (c[n] == *v).to_string()),
                    None => ("-".into(), "-".into()),
                };
                let e = match agree.as_ref().map(|a| a[n]) {
                    Some(Some(ok)) => ok.to_string(),
                    Some(None) => "skipped".into(),
                    None => "-".into(),
                };
                t.push(vec![n.to_string(), v.to_string(), cf, m, e]);
            }
            if common.format == Format::Csv {
                t.to_csv()?
            } else {
                format!(
                    "q = {}  form = {}  tail = {}\n{}",
                    field.q(),
                    form.render(&field),
                    tail_text(&vs.tail),
                    t.to_text()
                )
            }
        }
    };
    emit(&text, common.output.as_deref())?;
    if !problems.is_empty() {
        return Err(Failure::Mismatch(format!(
            "engines disagree: {}",
            problems.join("; ")
        )));
    }
    if let Some(c) = &closed {
        let bad: Vec<String> = (0..vs.values.len())
            .filter(|&n| c[n] != vs.values[n])
            .map(|n| n.to_string())
            .collect();
        if !bad.is_empty() {
            return Err(Failure::Mismatch(format!(
                "closed form differs at n = {}",
                bad.join(", ")
            )));
        }
    }
    Ok(())
}

fn tail_text(tail: &Tail) -> String {
    match tail {
        Tail::Undetected => "undetected".into(),
        Tail::Finite => "finite".into(),
        Tail::Geometric { rho, from, .. } => format!("geometric, ratio {rho} from n = {from}"),
    }
}

#[derive(Serialize)]
struct ZetaJson {
    q: u64,
    form: String,
    rf: String,
    value_at_s0: String,
    convergence: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    rf_matches: Option<bool>,
}

fn cmd_zeta(common: &Common, sel: &FormSel, check_rf: Option<&str>) -> CliResult {
    let field = field_for(common.prime, common.max_n + 1)?;
    let (_, form) = resolve_form(sel, &field)?;
    let vs = volume_sequence(&form, common.max_n + 1, &field, common.engine.primary())?;
    if common.engine == EngineArg::Both {
        let (_, problems) = engine_agreement(&form, common.max_n + 1, &field)?;
        if !problems.is_empty() {
            return Err(Failure::Mismatch(format!(
                "engines disagree: {}",
                problems.join("; ")
            )));
        }
    }
    let z = zeta(&vs)?;
    let expected: Option<RationalFunction> = check_rf.map(str::parse).transpose()?;
    let matches = expected.as_ref().map(|e| *e == z.rf);
    let text = match common.format {
        Format::Json => json(&ZetaJson {
            q: field.q(),
            form: form.render(&field),
            rf: z.rf.to_string(),
            value_at_s0: z.value_at_s0.to_string(),
            convergence: z.convergence_note.clone(),
            rf_matches: matches,
        })?,
        Format::Csv | Format::Table => {
            let mut t = Table::new(vec!["key", "value"]);
            t.push(vec!["q".into(), field.q().to_string()]);
            t.push(vec!["form".into(), form.render(&field)]);
            t.push(vec!["rf".into(), z.rf.to_string()]);
            t.push(vec!["value at s=0".into(), z.value_at_s0.to_string()]);
            t.push(vec!["convergence".into(), z.convergence_note.clone()]);
            if let Some(m) = matches {
                t.push(vec!["rf matches".into(), m.to_string()]);
            }
            if common.format == Format::Csv {
                t.to_csv()?
            } else {
                t.to_text()
            }
        }
    };
    emit(&text, common.output.as_deref())?;
    match (matches, expected) {
        (Some(false), Some(e)) => Err(Failure::Mismatch(format!("expected {e}, got {}", z.rf))),
        _ => Ok(()),
    }
}

fn parse_case(sel: &ClassSel, field: &LocalField) -> Result<CharacterCase, Error> {
    CaseSelector {
        class_type: sel.class_type.as_deref(),
        case: sel.case.as_deref(),
        d: sel.d.as_deref(),
        a: sel.a.as_deref(),
        r: sel.r.as_deref(),
        br: sel.br.as_deref(),
    }
    .resolve(field)
}

#[derive(Serialize)]
struct RepJson {
    class_type: String,
    entries: Vec<Vec<i128>>,
    params: String,
}

#[derive(Serialize)]
struct VerdictJson {
    class_type: String,
    case: String,
    label: Option<String>,
    form: String,
    computed: Option<String>,
    expected: String,
    expected_rule: &'static str,
    convention: &'static str,
    matched: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    diagnostic: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rf: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    prefactor: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rep: Option<RepJson>,
}

impl VerdictJson {
    fn of(v: &CharacterVerdict) -> Self {
        VerdictJson {
            class_type: v.class_type.to_string(),
            case: v.case.clone(),
            label: v.label.map(|l| l.to_string()),
            form: v.form.clone(),
            computed: v.computed.as_ref().map(|c| c.to_string()),
            expected: v.expected.to_string(),
            expected_rule: v.expected_rule,
            convention: v.convention,
            matched: v.matched,
            diagnostic: v.diagnostic.clone(),
            rf: None,
            prefactor: None,
            rep: None,
        }
    }
}

fn rep_json(params: &ClassParams, field: &LocalField) -> Result<RepJson, Error> {
    let rep = build_rep(params, field)?;
    Ok(RepJson {
        class_type: rep.class_type.to_string(),
        entries: rep.entries.iter().map(|row| row.to_vec()).collect(),
        params: format!("{params:?}"),
    })
}

fn cmd_character(common: &Common, sel: &ClassSel, dump_rep: bool) -> CliResult {
    let field = field_for(common.prime, common.max_n + 1)?;
    let case = parse_case(sel, &field)?;
    let eval = character_value(&case, &field, common.max_n, common.engine.primary())?;
    if common.engine == EngineArg::Both {
        let (_, problems) = engine_agreement(&eval.form, common.max_n + 1, &field)?;
        if !problems.is_empty() {
            return Err(Failure::Mismatch(format!(
                "engines disagree: {}",
                problems.join("; ")
            )));
        }
    }
    let verdict = CharacterVerdict::from_eval(&eval, &field);
    let mut row = VerdictJson::of(&verdict);
    row.rf = Some(eval.zeta.rf.to_string());
    row.prefactor = Some(eval.prefactor.to_string());
    if dump_rep {
        row.rep = Some(rep_json(&case.params(&field)?, &field)?);
    }
    let text = match common.format {
        Format::Json => json(&row)?,
        Format::Csv | Format::Table => {
            let mut t = verdict_table();
            t.push(verdict_row(&verdict));
            let mut text = if common.format == Format::Csv {
                t.to_csv()?
            } else {
                t.to_text()
            };
            if let (Format::Table, Some(rep)) = (common.format, &row.rep) {
                text += &format!(
                    "\nrf: {}\nprefactor: {}\nrepresentative ({}):\n",
                    eval.zeta.rf, eval.prefactor, rep.params
                );
                for r in &rep.entries {
                    text += &format!(
                        "  {}\n",
                        r.iter().map(|x| format!("{x:>6}")).collect::<String>()
                    );
                }
            }
            text
        }
    };
    emit(&text, common.output.as_deref())?;
    if verdict.matched {
        Ok(())
    } else {
        Err(Failure::Mismatch(format!(
            "{}: computed {}, expected {}",
            verdict.case, eval.value, verdict.expected
        )))
    }
}

fn verdict_table() -> Table {
    Table::new(vec![
        "type",
        "case",
        "label",
        "form",
        "computed",
        "expected",
        "rule",
        "convention",
        "match",
    ])
}

fn verdict_row(v: &CharacterVerdict) -> Vec<String> {
    vec![
        v.class_type.to_string(),
        v.case.clone(),
        v.label.map_or("-".into(), |l| l.to_string()),
        v.form.clone(),
        v.computed
            .as_ref()
            .map_or("error".into(), |c| c.to_string()),
        v.expected.to_string(),
        v.expected_rule.to_string(),
        v.convention.to_string(),
        v.matched.to_string(),
    ]
}

#[derive(Serialize)]
struct CheckJson {
    prime: u64,
    group: &'static str,
    name: String,
    passed: bool,
    detail: String,
}

#[derive(Serialize)]
struct VerifyJson {
    checks: Vec<CheckJson>,
    passed: usize,
    total: usize,
    summary: String,
}

fn cmd_verify(
    primes: &[u64],
    max_n: u32,
    engine: EngineArg,
    format: Format,
    output: Option<PathBuf>,
) -> CliResult {
    if max_n < 5 {
        return Err(Failure::Usage("verify needs --max-n of at least 5".into()));
    }
    let mut checks = Vec::new();
    for &p in primes {
        let field = field_for(p, max_n + 1)?;
        let opts = SuiteOptions {
            n_max: max_n,
            engine: engine.primary(),
            cross_check: engine == EngineArg::Both,
        };
        for c in run_suite(&field, opts)? {
            checks.push(CheckJson {
                prime: p,
                group: c.group,
                name: c.name,
                passed: c.passed,
                detail: c.detail,
            });
        }
    }
    let passed = checks.iter().filter(|c| c.passed).count();
    let total = checks.len();
    let summary = format!("{passed}/{total} checks passed");
    let text = match format {
        Format::Json => json(&VerifyJson {
            checks,
            passed,
            total,
            summary: summary.clone(),
        })?,
        Format::Csv | Format::Table => {
            let mut t = Table::new(vec!["p", "group", "check", "passed", "detail"]);
            for c in &checks {
                t.push(vec![
                    c.prime.to_string(),
                    c.group.into(),
                    c.name.clone(),
                    c.passed.to_string(),
                    c.detail.clone(),
                ]);
            }
            if format == Format::Csv {
                t.to_csv()?
            } else {
                t.to_text() + &summary + "\n"
            }
        }
    };
    emit(&text, output.as_deref())?;
    if format != Format::Table {
        eprintln!("{summary}");
    }
    if passed == total {
        Ok(())
    } else {
        Err(Failure::Mismatch(summary))
    }
}

#[derive(Serialize)]
struct CountJson {
    q: u64,
    form: String,
    counts: Vec<CountRow>,
}

#[derive(Serialize)]
struct CountRow {
    k: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    naive: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hensel: Option<String>,
}

fn cmd_count(common: &Common, sel: &FormSel) -> CliResult {
    let field = field_for(common.prime, common.max_n)?;
    let (_, form) = resolve_form(sel, &field)?;
    let budget = default_budget();
    let mut rows = Vec::new();
    let mut problems = Vec::new();
    for k in 1..=common.max_n {
        let naive = match common.engine {
            EngineArg::Naive => Some(count_naive(&form, k, &field, budget)?),
            EngineArg::Both => match count_naive(&form, k, &field, budget) {
                Ok(n) => Some(n),
                Err(Error::Budget { .. }) => None,
                Err(e) => return Err(e.into()),
            },
            EngineArg::Hensel => None,
        };
        let hensel = match common.engine {
            EngineArg::Naive => None,
            _ => Some(count_hensel(&form, k, &field)?),
        };
        if let (Some(a), Some(b)) = (naive, hensel) {
            if a != b {
                problems.push(format!("k = {k}: naive {a} vs hensel {b}"));
            }
        }
        rows.push(CountRow {
            k,
            naive: naive.map(|n| n.to_string()),
            hensel: hensel.map(|n| n.to_string()),
        });
    }
    let text = match common.format {
        Format::Json => json(&CountJson {
            q: field.q(),
            form: form.render(&field),
            counts: rows,
        })?,
        Format::Csv | Format::Table => {
            let mut t = Table::new(vec!["k", "naive", "hensel"]);
            for r in &rows {
                let cell = |x: &Option<String>| x.clone().unwrap_or_else(|| "-".into());
                t.push(vec![r.k.to_string(), cell(&r.naive), cell(&r.hensel)]);
            }
            if common.format == Format::Csv {
                t.to_csv()?
            } else {
                t.to_text()
            }
        }
    };
    emit(&text, common.output.as_deref())?;
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Failure::Mismatch(format!(
            "engines disagree: {}",
            problems.join("; ")
        )))
    }
}
