use std::collections::BTreeMap;

use super::{Instruction, ServerId, ServerTranscript, Side};

/// Splits the two-server transcripts (`A_1`, `B_1`) into `n` servers per
/// side: the round-`r` entries of a side go to server `(r mod n) + 1` of
/// that side and forwarding targets are rewritten to the `2n`-server ring.
///
/// Concatenating the A-side results in round order gives back the A-side
/// message stream of the input.
pub fn split_roles(two_server: &[ServerTranscript], n: usize) -> Vec<ServerTranscript> {
    let mut out: BTreeMap<ServerId, ServerTranscript> = ServerId::all(n)
        .into_iter()
        .map(|s| (s, ServerTranscript::new(s)))
        .collect();
    for t in two_server {
        for e in &t.entries {
            let server = ServerId {
                side: t.server.side,
                index: e.round % n + 1,
            };
            let instruction = match e.instruction {
                Instruction::ForwardState { .. } => Instruction::ForwardState { to: server.next(n) },
                other => other,
            };
            let target = out.get_mut(&server).expect("server in range");
            target.entries.push(super::TranscriptEntry {
                round: e.round,
                server,
                instruction,
            });
            if instruction == Instruction::MeasureAll {
                target.reported_bits.clone_from(&t.reported_bits);
            }
        }
    }
    let mut v: Vec<_> = out.into_values().collect();
    v.sort_by_key(|t| (t.server.side == Side::B, t.server.index));
    v
}
