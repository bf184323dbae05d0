use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use blindlab_core::adversary::{
    audit_blindness, default_corpus, exact_view_tv, run_distinguishing_game, AuditEntry, AuditReport, CircuitPair,
    Coalition, GameConfig, Verdict, ViewFilter,
};
use blindlab_core::compiler::{compile as compile_circuit, LogicalCircuit};
use blindlab_core::config::{MaskMode, Params};
use blindlab_core::counts::GateCounts;
use blindlab_core::obfuscate::{obfuscate, strip_secrets, ObfuscatedProgram, PublicProgram};
use blindlab_core::protocol::{estimate_leak_time, execute, ProtocolConfig, ServerId};
use blindlab_core::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::params::parse_params;
use crate::{Format, Output, Setup};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// What a subcommand prints, and whether it found a property violation.
pub struct Outcome {
    pub stdout: String,
    pub violation: bool,
}

/// Stamp carried by every artifact.
#[derive(Debug, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub version: String,
    pub seed: u64,
    pub params: Params,
    #[serde(flatten)]
    pub body: T,
}

impl<T: Serialize> Envelope<T> {
    fn new(seed: u64, params: Params, body: T) -> Self {
        Envelope {
            version: VERSION.to_string(),
            seed,
            params,
            body,
        }
    }

    fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("artifact serializes") + "\n"
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PublicBody {
    pub public: PublicProgram,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SecretBody {
    pub secret: SecretContents,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SecretContents {
    pub circuit: LogicalCircuit,
    pub program: ObfuscatedProgram,
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn read_value(path: &Path) -> Result<serde_json::Value, CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn from_value<T: for<'de> Deserialize<'de>>(path: &Path, v: serde_json::Value) -> Result<T, CliError> {
    serde_json::from_value(v).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn read_circuit(path: &Path) -> Result<LogicalCircuit, CliError> {
    let c: LogicalCircuit = from_value(path, read_value(path)?)?;
    c.validate()?;
    Ok(c)
}

/// Circuit input for the attacker. Refuses anything named `secret.json` and
/// any document carrying a `secret` object, before and after parsing.
fn read_attack_input(path: &Path) -> Result<LogicalCircuit, CliError> {
    if path.file_name().is_some_and(|n| n == "secret.json") {
        return Err(CliError::SecretInput(path.to_path_buf()));
    }
    let v = read_value(path)?;
    if v.get("secret").is_some() {
        return Err(CliError::SecretInput(path.to_path_buf()));
    }
    let c: LogicalCircuit = from_value(path, v)?;
    c.validate()?;
    Ok(c)
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| io_err(&path, e))
}

fn params_label(p: &Params) -> String {
    let masks = match p.masks {
        MaskMode::Replicate => "replicate",
        MaskMode::Enumerate => "enumerate",
    };
    format!("N={},K={},m={},W={},p={},masks={masks}", p.servers, p.colluders, p.m, p.window, p.p)
}

/// Aligned `key value` lines.
fn table(rows: &[(String, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter().fold(String::new(), |mut s, (k, v)| {
        let _ = writeln!(s, "{k:<width$}  {v}");
        s
    })
}

fn stamp_rows(seed: u64, params: &Params) -> Vec<(String, String)> {
    vec![
        ("version".into(), VERSION.into()),
        ("seed".into(), seed.to_string()),
        ("params".into(), params_label(params)),
    ]
}

fn counts_rows(c: &GateCounts) -> Vec<(String, String)> {
    let v = serde_json::to_value(c).expect("counts serialize");
    let serde_json::Value::Object(map) = v else {
        unreachable!("counts serialize to an object")
    };
    map.into_iter().map(|(k, v)| (k, v.to_string())).collect()
}

fn render<T: Serialize>(out: &Output, env: &Envelope<T>, rows: impl FnOnce() -> Vec<(String, String)>) -> String {
    match out.format {
        Format::Json => env.to_json(),
        Format::Table => {
            let mut all = stamp_rows(env.seed, &env.params);
            all.extend(rows());
            table(&all)
        }
    }
}

#[derive(Serialize)]
struct CompileSummary {
    shape: blindlab_core::config::PublicShape,
    gate_counts: GateCounts,
}

pub fn compile(circuit: &Path, setup: &Setup, out: &Output) -> Result<Outcome, CliError> {
    let params = parse_params(&setup.params)?;
    let c = read_circuit(circuit)?;
    let mut rng = ChaCha20Rng::seed_from_u64(setup.seed);
    let cc = compile_circuit(&c, &params, &mut rng)?;
    let program = obfuscate(&cc, &mut rng)?;
    let public = strip_secrets(&program);
    let counts = GateCounts::from_public(&public);
    let shape = public.shape;

    write(
        &out.out_dir,
        "public.json",
        &Envelope::new(setup.seed, params, PublicBody { public }).to_json(),
    )?;
    let secret = SecretBody {
        secret: SecretContents { circuit: c, program },
    };
    write(&out.out_dir, "secret.json", &Envelope::new(setup.seed, params, secret).to_json())?;

    let env = Envelope::new(
        setup.seed,
        params,
        CompileSummary {
            shape,
            gate_counts: counts,
        },
    );
    let stdout = render(out, &env, || {
        let mut rows = vec![("rows".into(), shape.n.to_string()), ("layers".into(), shape.p.to_string())];
        rows.extend(counts_rows(&counts));
        rows
    });
    Ok(Outcome { stdout, violation: false })
}

#[derive(Serialize)]
struct RunBody {
    measuring_server: Option<ServerId>,
    raw: String,
    decoded: String,
}

pub fn run(circuit: &Path, setup: &Setup, out: &Output) -> Result<Outcome, CliError> {
    let params = parse_params(&setup.params)?;
    let c = read_circuit(circuit)?;
    let (_, result) = execute(&c, &ProtocolConfig::new(params, setup.seed))?;
    let measuring_server = result
        .transcripts
        .iter()
        .find(|t| t.reported_bits.is_some())
        .map(|t| t.server);
    let env = Envelope::new(
        setup.seed,
        params,
        RunBody {
            measuring_server,
            raw: result.raw.clone(),
            decoded: result.decoded.clone(),
        },
    );
    write(&out.out_dir, "run.json", &env.to_json())?;
    let header = serde_json::to_string(&Envelope::new(setup.seed, params, serde_json::Map::new()))
        .expect("header serializes");
    write(
        &out.out_dir,
        "transcripts.jsonl",
        &format!("{header}\n{}", result.transcripts_json_lines()),
    )?;
    let stdout = render(out, &env, || {
        vec![
            (
                "measuring_server".into(),
                measuring_server.map_or("-".into(), |s| s.to_string()),
            ),
            ("raw".into(), env.body.raw.clone()),
            ("decoded".into(), env.body.decoded.clone()),
        ]
    });
    Ok(Outcome { stdout, violation: false })
}

fn pair_name(paths: &[PathBuf]) -> String {
    paths
        .iter()
        .map(|p| p.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned()))
        .collect::<Vec<_>>()
        .join("-vs-")
}

fn read_pair(paths: &[PathBuf]) -> Result<CircuitPair, CliError> {
    let [p0, p1] = paths else {
        return Err(CliError::Params(format!("--pair takes two files, got {}", paths.len())));
    };
    Ok(CircuitPair::new(&pair_name(paths), read_attack_input(p0)?, read_attack_input(p1)?))
}

#[derive(Serialize)]
struct AttackBody {
    pair: String,
    colluders: String,
    trials: usize,
    successes: usize,
    advantage: f64,
    ci: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact_tv: Option<f64>,
    gate_window_tv: f64,
    verdict: Verdict,
}

pub fn attack(
    pair: &[PathBuf],
    colluders: &str,
    trials: usize,
    rehearsals: usize,
    setup: &Setup,
    out: &Output,
) -> Result<Outcome, CliError> {
    let params = parse_params(&setup.params)?;
    let pair = read_pair(pair)?;
    let coalition = Coalition::parse(colluders)?;
    coalition.validate(params.servers, params.colluders)?;
    let cfg = GameConfig::new(params, trials, setup.seed).with_rehearsals(rehearsals);
    let game = run_distinguishing_game(&pair.c0, &pair.c1, &cfg, &coalition)?;
    let exact_tv = match exact_view_tv(&pair.c0, &pair.c1, &cfg, &coalition, ViewFilter::Full) {
        Ok(tv) => Some(tv),
        Err(Error::StateSpaceTooLarge(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let gate_window_tv = exact_view_tv(&pair.c0, &pair.c1, &cfg, &coalition, ViewFilter::GateWindowsOnly)?;
    let verdict = AuditEntry::judge(&game, exact_tv);
    let env = Envelope::new(
        setup.seed,
        params,
        AttackBody {
            pair: pair.name,
            colluders: coalition.to_string(),
            trials: game.trials,
            successes: game.successes,
            advantage: game.advantage,
            ci: game.ci,
            exact_tv,
            gate_window_tv,
            verdict,
        },
    );
    write(&out.out_dir, "attack.json", &env.to_json())?;
    let stdout = render(out, &env, || {
        let b = &env.body;
        let mut rows = vec![
            ("pair".into(), b.pair.clone()),
            ("colluders".into(), b.colluders.clone()),
            ("trials".into(), b.trials.to_string()),
            ("successes".into(), b.successes.to_string()),
            ("advantage".into(), b.advantage.to_string()),
            ("ci".into(), b.ci.to_string()),
        ];
        if let Some(tv) = b.exact_tv {
            rows.push(("exact_tv".into(), tv.to_string()));
        }
        rows.push(("gate_window_tv".into(), b.gate_window_tv.to_string()));
        rows.push(("verdict".into(), verdict_label(b.verdict).into()));
        rows
    });
    Ok(Outcome {
        stdout,
        violation: verdict == Verdict::Violation,
    })
}

fn verdict_label(v: Verdict) -> &'static str {
    match v {
        Verdict::Blind => "blind",
        Verdict::Leaky => "leaky",
        Verdict::Violation => "violation",
    }
}

#[derive(Serialize)]
struct AuditBody {
    #[serde(flatten)]
    report: AuditReport,
    violations: usize,
}

pub fn audit(
    pair: Option<&[PathBuf]>,
    trials: usize,
    rehearsals: usize,
    setup: &Setup,
    out: &Output,
) -> Result<Outcome, CliError> {
    let params = parse_params(&setup.params)?;
    let corpus = match pair {
        Some(paths) => vec![read_pair(paths)?],
        None => default_corpus(),
    };
    let cfg = GameConfig::new(params, trials, setup.seed).with_rehearsals(rehearsals);
    let report = audit_blindness(&cfg, &corpus)?;
    let violations = report.violations();
    let env = Envelope::new(setup.seed, params, AuditBody { report, violations });
    write(&out.out_dir, "audit.json", &env.to_json())?;
    let stdout = match out.format {
        Format::Json => env.to_json(),
        Format::Table => {
            let mut s = table(&stamp_rows(setup.seed, &params));
            let _ = writeln!(
                s,
                "{:<22} {:<14} {:<16} {:>10} {:>8} {:>10} {:>10}  verdict",
                "pair", "template", "colluders", "advantage", "ci", "exact_tv", "gate_tv"
            );
            for e in &env.body.report.entries {
                let template = serde_json::to_value(e.template).expect("template serializes");
                let tv = e.exact_tv.map_or_else(|| "-".to_string(), |t| format!("{t:.6}"));
                let _ = writeln!(
                    s,
                    "{:<22} {:<14} {:<16} {:>10.6} {:>8.6} {:>10} {:>10.6}  {}",
                    e.pair,
                    template.as_str().unwrap_or_default(),
                    e.colluders,
                    e.advantage,
                    e.ci,
                    tv,
                    e.gate_window_tv,
                    verdict_label(e.verdict)
                );
            }
            let _ = writeln!(s, "violations  {violations}");
            s
        }
    };
    Ok(Outcome {
        stdout,
        violation: violations > 0,
    })
}

/// One overhead line: `value relation bound`.
#[derive(Debug, Serialize)]
struct Bound {
    name: &'static str,
    value: usize,
    relation: &'static str,
    bound: usize,
    rule: &'static str,
    ok: bool,
}

#[derive(Debug, Serialize)]
struct LeakTime {
    #[serde(rename = "K")]
    k: usize,
    t: f64,
    unit: String,
    value: f64,
}

#[derive(Debug, Serialize)]
struct ReportBody {
    gate_counts: GateCounts,
    overhead: Vec<Bound>,
    leak_time: LeakTime,
}

pub fn report(public: &Path, leak_interval: f64, unit: &str, out: &Output) -> Result<Outcome, CliError> {
    let artifact: Envelope<PublicBody> = from_value(public, read_value(public)?)?;
    let program = &artifact.body.public;
    let shape = program.shape;
    let counts = GateCounts::from_public(program);
    let check = counts.check(&shape);
    let overhead = vec![
        Bound {
            name: "dummies_v",
            value: counts.added_by_dummies_v,
            relation: "<=",
            bound: check.v_bound,
            rule: "(3^W - 1) x real V pairs",
            ok: check.v_ok,
        },
        Bound {
            name: "dummies_u",
            value: counts.added_by_dummies_u,
            relation: "<=",
            bound: check.u_bound,
            rule: "(3^2 - 1) x real corner pairs",
            ok: check.u_ok,
        },
        Bound {
            name: "mask_pairs",
            value: counts.added_by_masks,
            relation: "==",
            bound: check.mask_expected,
            rule: "2N x tracks x n",
            ok: check.mask_ok,
        },
        Bound {
            name: "mask_gates",
            value: counts.physical_added_by_masks,
            relation: "==",
            bound: check.mask_physical_expected,
            rule: "4N x tracks x n",
            ok: counts.physical_added_by_masks == check.mask_physical_expected,
        },
    ];
    let violation = overhead.iter().any(|b| !b.ok);
    let value = estimate_leak_time(shape.colluders, leak_interval)?;
    let env = Envelope {
        version: artifact.version.clone(),
        seed: artifact.seed,
        params: artifact.params,
        body: ReportBody {
            gate_counts: counts,
            overhead,
            leak_time: LeakTime {
                k: shape.colluders,
                t: leak_interval,
                unit: unit.to_string(),
                value,
            },
        },
    };
    let stdout = match out.format {
        Format::Json => env.to_json(),
        Format::Table => {
            let mut s = table(&stamp_rows(env.seed, &env.params));
            s.push_str("gate_counts\n");
            let rows: Vec<_> = counts_rows(&counts)
                .into_iter()
                .map(|(k, v)| (format!("  {k}"), v))
                .collect();
            s.push_str(&table(&rows));
            s.push_str("overhead\n");
            for b in &env.body.overhead {
                let _ = writeln!(
                    s,
                    "  {:<12} {} {} {}  [{}]  {}",
                    b.name,
                    b.value,
                    b.relation,
                    b.bound,
                    b.rule,
                    if b.ok { "ok" } else { "VIOLATED" }
                );
            }
            s.push_str("leak_time\n");
            let _ = writeln!(s, "  K={} t={} {unit}", shape.colluders, leak_interval);
            let _ = writeln!(s, "  (K+1)t = {value} {unit}");
            s
        }
    };
    Ok(Outcome { stdout, violation })
}
