use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Instruction, ServerId, ServerTranscript, TranscriptEntry};
use crate::obfuscate::PublicProgram;

/// The A-server's work in one round (forwards are implied).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundPlan {
    pub round: usize,
    pub server: ServerId,
    pub instructions: Vec<Instruction>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub servers: usize,
    pub rounds: Vec<RoundPlan>,
    pub measuring_server: ServerId,
}

/// Round-robin schedule over `A_1..A_N`, depending only on the public
/// program.
///
/// Round `r` runs the next pair of every track of the current stage on
/// `A_{(r mod N)+1}`. The CZ events of a brick half go to the server of the
/// half's last round. Measurement happens after the final round.
pub fn schedule(p: &PublicProgram, servers: usize, measuring: Option<ServerId>) -> Schedule {
    let mut rounds = Vec::new();
    for stage in &p.stages {
        for offset in 0..stage.width {
            let round = rounds.len();
            let mut instructions = Vec::new();
            for w in &stage.windows {
                for (track_id, t) in w.tracks.iter().enumerate() {
                    instructions.push(Instruction::ExecutePair {
                        window_id: w.id,
                        track_id,
                        pair: t[t.len() - 1 - offset],
                    });
                }
            }
            if offset + 1 == stage.width {
                instructions.extend(stage.cz_after.iter().map(|cz| Instruction::ApplyCZ {
                    rows: cz.rows,
                    layer: cz.layer,
                }));
            }
            rounds.push(RoundPlan {
                round,
                server: ServerId::for_round(round, servers),
                instructions,
            });
        }
    }
    let last = rounds.len().saturating_sub(1);
    Schedule {
        servers,
        measuring_server: measuring.unwrap_or_else(|| ServerId::for_round(last, servers)),
        rounds,
    }
}

impl Schedule {
    pub fn final_round(&self) -> usize {
        self.rounds.len().saturating_sub(1)
    }

    /// Transcripts of all `2N` servers (reported bits left empty).
    pub fn transcripts(&self) -> Vec<ServerTranscript> {
        let n = self.servers;
        let mut out: BTreeMap<ServerId, ServerTranscript> = ServerId::all(n)
            .into_iter()
            .map(|s| (s, ServerTranscript::new(s)))
            .collect();
        let last = self.final_round();
        for plan in &self.rounds {
            let log = |out: &mut BTreeMap<ServerId, ServerTranscript>, server: ServerId, instruction| {
                out.get_mut(&server)
                    .expect("server in range")
                    .entries
                    .push(TranscriptEntry {
                        round: plan.round,
                        server,
                        instruction,
                    });
            };
            for &ins in &plan.instructions {
                log(&mut out, plan.server, ins);
            }
            if plan.round == last {
                log(&mut out, self.measuring_server, Instruction::MeasureAll);
            } else {
                let b = plan.server.next(n);
                log(&mut out, plan.server, Instruction::ForwardState { to: b });
                log(&mut out, b, Instruction::ForwardState { to: b.next(n) });
            }
        }
        let mut v: Vec<_> = out.into_values().collect();
        // A-side first, then B-side, each by index.
        v.sort_by_key(|t| t.server);
        v
    }
}

/// Checks that within every contiguous run of a row's pairs, any `N`
/// consecutive pairs land on `N` distinct servers, and that no server gets
/// two pairs of one track in a single round. Returns the offending rounds.
pub fn audit_schedule(p: &PublicProgram, s: &Schedule) -> Vec<usize> {
    let mut row_of = BTreeMap::new();
    for w in p.windows() {
        row_of.insert(w.id, w.row);
    }
    let mut rounds_by_row: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut bad = Vec::new();
    for plan in &s.rounds {
        let mut seen = std::collections::BTreeSet::new();
        for ins in &plan.instructions {
            if let Instruction::ExecutePair { window_id, track_id, .. } = *ins {
                if !seen.insert((window_id, track_id)) {
                    bad.push(plan.round);
                }
                let rows = rounds_by_row.entry(row_of[&window_id]).or_default();
                if rows.last() != Some(&plan.round) {
                    rows.push(plan.round);
                }
            }
        }
    }
    for rounds in rounds_by_row.values() {
        for run in rounds.chunk_by(|a, b| b == &(a + 1)) {
            for window in run.windows(s.servers.min(run.len())) {
                let servers: std::collections::BTreeSet<_> =
                    window.iter().map(|&r| s.rounds[r].server).collect();
                if servers.len() != window.len() {
                    bad.push(window[0]);
                }
            }
        }
    }
    bad.sort_unstable();
    bad.dedup();
    bad
}
