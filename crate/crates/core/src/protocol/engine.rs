use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use super::schedule::{schedule, Schedule};
use super::{decode_output, Instruction, ProtocolConfig, ServerTranscript};
use crate::circuit::Unitary2;
use crate::compiler::{build_layout, compile_with_layout, BrickworkLayout, LogicalCircuit};
use crate::error::{Error, Result};
use crate::obfuscate::{obfuscate, strip_secrets, ObfuscatedProgram, WindowType};
use crate::sim::{OutcomeDistribution, Statevector};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunResult {
    /// Masked outcome as reported by the measuring server, all `n` rows.
    pub raw: String,
    /// Unmasked outcome on the logical rows.
    pub decoded: String,
    pub seed: u64,
    pub config: ProtocolConfig,
    #[serde(skip)]
    pub transcripts: Vec<ServerTranscript>,
}

impl RunResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("run result serializes")
    }

    /// All transcripts as JSON lines, A-side first.
    pub fn transcripts_json_lines(&self) -> String {
        self.transcripts.iter().map(|t| t.to_json_lines()).collect()
    }
}

/// Where a track's pairs land: the real row or a dummy register of that row.
enum Register {
    Real(usize),
    Dummy(usize, usize),
}

struct Routing {
    /// `(row, real_index, kind)` by window id.
    windows: Vec<(usize, usize, WindowType)>,
}

impl Routing {
    fn new(p: &ObfuscatedProgram) -> Self {
        let mut windows = vec![(0, 0, WindowType::V); p.window_count()];
        for (w, set) in p.windows() {
            windows[w.id] = (w.row, set.real_index, w.kind);
        }
        Routing { windows }
    }

    fn resolve(&self, window_id: usize, track_id: usize) -> Register {
        let (row, real, _) = self.windows[window_id];
        match track_id.cmp(&real) {
            std::cmp::Ordering::Equal => Register::Real(row),
            std::cmp::Ordering::Less => Register::Dummy(row, track_id),
            std::cmp::Ordering::Greater => Register::Dummy(row, track_id - 1),
        }
    }
}

/// Independent single-qubit registers hosting the dummy tracks.
struct DummyBank {
    per_row: usize,
    states: Vec<[Complex64; 2]>,
}

impl DummyBank {
    fn new(rows: usize, per_row: usize) -> Self {
        let zero = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        DummyBank {
            per_row,
            states: vec![zero; rows * per_row],
        }
    }

    fn apply(&mut self, row: usize, slot: usize, u: &Unitary2) {
        let s = &mut self.states[row * self.per_row + slot];
        let (a0, a1) = (s[0], s[1]);
        s[0] = u[(0, 0)] * a0 + u[(0, 1)] * a1;
        s[1] = u[(1, 0)] * a0 + u[(1, 1)] * a1;
    }
}

/// Executes every scheduled instruction and returns the real-row state just
/// before measurement.
fn evolve(p: &ObfuscatedProgram, s: &Schedule) -> Result<Statevector> {
    let routing = Routing::new(p);
    let max_tracks = p.windows().map(|(_, set)| set.tracks.len()).max().unwrap_or(1);
    let mut state = Statevector::new(p.shape.n)?;
    let mut dummies = DummyBank::new(p.shape.n, max_tracks.saturating_sub(1));
    for plan in &s.rounds {
        for ins in &plan.instructions {
            match *ins {
                Instruction::ExecutePair { window_id, track_id, pair } => {
                    let u = pair.unitary();
                    match routing.resolve(window_id, track_id) {
                        Register::Real(row) => state.apply_single(row, &u)?,
                        Register::Dummy(row, slot) => dummies.apply(row, slot, &u),
                    }
                }
                Instruction::ApplyCZ { rows: (a, b), .. } => state.apply_cz(a, b)?,
                Instruction::MeasureAll | Instruction::ForwardState { .. } => {}
            }
        }
    }
    Ok(state)
}

/// Runs an obfuscated program; the only randomness drawn is the final
/// measurement.
pub fn run<R: Rng + ?Sized>(p: &ObfuscatedProgram, cfg: &ProtocolConfig, rng: &mut R) -> Result<RunResult> {
    cfg.validate()?;
    if cfg.params.servers != p.shape.servers {
        return Err(Error::InvalidParams(format!(
            "program compiled for N = {}, config has N = {}",
            p.shape.servers, cfg.params.servers
        )));
    }
    let public = strip_secrets(p);
    let sched = schedule(&public, cfg.params.servers, cfg.measuring_server);
    let state = evolve(p, &sched)?;
    let raw = state.measure_all(rng);
    let decoded_full = decode_output(&raw, &p.secret.mask_bits)?;
    let decoded = decoded_full[..p.secret.logical_qubits].to_string();
    let mut transcripts = sched.transcripts();
    for t in &mut transcripts {
        if t.server == sched.measuring_server {
            t.reported_bits = Some(raw.clone());
        }
    }
    Ok(RunResult {
        raw,
        decoded,
        seed: cfg.seed,
        config: *cfg,
        transcripts,
    })
}

/// Compile, obfuscate and run from a single ChaCha20 stream seeded with
/// `cfg.seed`.
pub fn execute(c: &LogicalCircuit, cfg: &ProtocolConfig) -> Result<(ObfuscatedProgram, RunResult)> {
    let layout = build_layout(c, &cfg.params)?;
    execute_layout(&layout, c.qubits, cfg)
}

/// [`execute`] with a prebuilt layout.
pub fn execute_layout(
    layout: &BrickworkLayout,
    logical_qubits: usize,
    cfg: &ProtocolConfig,
) -> Result<(ObfuscatedProgram, RunResult)> {
    cfg.validate()?;
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let cc = compile_with_layout(layout.clone(), logical_qubits, &cfg.params, &mut rng)?;
    let program = obfuscate(&cc, &mut rng)?;
    let result = run(&program, cfg, &mut rng)?;
    Ok((program, result))
}

/// Exact decoded distribution on the logical rows, computed from the same
/// instruction-level execution as [`run`].
pub fn exact_output_distribution(p: &ObfuscatedProgram) -> Result<OutcomeDistribution> {
    let public = strip_secrets(p);
    let sched = schedule(&public, p.shape.servers, None);
    let state = evolve(p, &sched)?;
    let q = p.secret.logical_qubits;
    let mut out = OutcomeDistribution::new();
    for (raw, prob) in state.distribution() {
        let decoded = decode_output(&raw, &p.secret.mask_bits)?;
        *out.entry(decoded[..q].to_string()).or_insert(0.0) += prob;
    }
    Ok(out)
}

/// Exact masked distribution over all `n` rows.
pub fn exact_raw_distribution(p: &ObfuscatedProgram) -> Result<OutcomeDistribution> {
    let public = strip_secrets(p);
    let sched = schedule(&public, p.shape.servers, None);
    Ok(evolve(p, &sched)?.distribution())
}
