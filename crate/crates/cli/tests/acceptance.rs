//! Acceptance suite. Each test prints one `ACCEPTANCE n PASS|FAIL` line.
//! Matrix and state-vector oracles here are written from scratch and share
//! no arithmetic with the library.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};
use std::io::Write as _;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use blindlab_core::adversary::{
    exact_view_tv, run_distinguishing_game, template, Coalition, GameConfig, Template, ViewFilter,
};
use blindlab_core::circuit::{Alphabet, Gate, PairSlot, Segment};
use blindlab_core::compiler::{
    brick_unitary, compile, decompose_single, make_masks, rotation_block, Brick, BrickType, LogicalCircuit, LogicalOp,
};
use blindlab_core::config::{MaskMode, Params};
use blindlab_core::counts::GateCounts;
use blindlab_core::obfuscate::{make_tracks, obfuscate, strip_secrets, PublicProgram, Window, WindowType};
use blindlab_core::protocol::{estimate_leak_time, exact_output_distribution, execute, ProtocolConfig, ServerId};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Unitary identities.
const MATRIX_TOL: f64 = 1e-12;
/// Exact output distributions, compiled vs direct.
const DIST_TOL: f64 = 1e-9;
/// Confidence radius in binomial standard deviations.
const SIGMAS: f64 = 3.0;
const GAME_TRIALS: usize = 10_000;
const UNIFORMITY_RUNS: usize = 10_000;
const FULL_COLLUSION_FLOOR: f64 = 0.4;

const BUDGET_1: Duration = Duration::from_secs(1);
const BUDGET_2: Duration = Duration::from_secs(1);
const BUDGET_3: Duration = Duration::from_secs(120);
const BUDGET_4: Duration = Duration::from_secs(10);
const BUDGET_5: Duration = Duration::from_secs(60);
const BUDGET_6: Duration = Duration::from_secs(300);
const BUDGET_7: Duration = Duration::from_secs(1);
const BUDGET_8: Duration = Duration::from_secs(120);
const BUDGET_9: Duration = Duration::from_secs(1);

fn verdict(n: u8, title: &str, failures: &[String], started: Instant, budget: Duration) {
    let elapsed = started.elapsed();
    let mut failures = failures.to_vec();
    if elapsed > budget {
        failures.push(format!("took {elapsed:.2?}, budget {budget:.0?}"));
    }
    let status = if failures.is_empty() { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout();
    let _ = writeln!(out, "ACCEPTANCE {n} {status}: {title} ({elapsed:.2?})");
    for f in &failures {
        let _ = writeln!(out, "    {f}");
    }
    assert!(failures.is_empty(), "criterion {n}: {failures:?}");
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

type M2 = [[Complex64; 2]; 2];
type M4 = [[Complex64; 4]; 4];

fn mul2(a: &M2, b: &M2) -> M2 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j]))
}

fn mul4(a: &M4, b: &M4) -> M4 {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..4).map(|k| a[i][k] * b[k][j]).sum()))
}

fn kron(a: &M2, b: &M2) -> M4 {
    std::array::from_fn(|r| std::array::from_fn(|s| a[r / 2][s / 2] * b[r % 2][s % 2]))
}

fn eye2() -> M2 {
    [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]
}

fn phase_gate(angle: f64) -> M2 {
    [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), Complex64::from_polar(1.0, angle)]]
}

fn hadamard() -> M2 {
    let h = FRAC_1_SQRT_2;
    [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]]
}

fn pauli_x() -> M2 {
    [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]
}

fn rz(theta: f64) -> M2 {
    [
        [Complex64::from_polar(1.0, -theta / 2.0), c(0.0, 0.0)],
        [c(0.0, 0.0), Complex64::from_polar(1.0, theta / 2.0)],
    ]
}

fn rx(theta: f64) -> M2 {
    let (s, co) = (theta / 2.0).sin_cos();
    [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
}

fn gate_matrix(g: Gate) -> M2 {
    match g {
        Gate::I => eye2(),
        Gate::H => hadamard(),
        Gate::T => phase_gate(FRAC_PI_4),
        Gate::Tdg => phase_gate(-FRAC_PI_4),
        Gate::S => phase_gate(2.0 * FRAC_PI_4),
        Gate::Sdg => phase_gate(-2.0 * FRAC_PI_4),
        Gate::X => pauli_x(),
        Gate::Z => phase_gate(4.0 * FRAC_PI_4),
    }
}

/// `H` followed (in product order) by `T^k`.
fn pair_matrix(p: PairSlot) -> M2 {
    let k = match p {
        PairSlot::HI => 0.0,
        PairSlot::HT => 1.0,
        PairSlot::HTdg => -1.0,
        PairSlot::HT2 => 2.0,
        PairSlot::HTdg2 => -2.0,
    };
    mul2(&hadamard(), &phase_gate(k * FRAC_PI_4))
}

fn written_product(pairs: &[PairSlot]) -> M2 {
    pairs.iter().fold(eye2(), |acc, &p| mul2(&acc, &pair_matrix(p)))
}

/// `max |a − e^{iφ} b|` with φ aligning the largest entry of `b` to `a`.
fn phase_distance<const D: usize>(a: &[[Complex64; D]; D], b: &[[Complex64; D]; D]) -> f64 {
    let (i, j) = (0..D * D)
        .map(|k| (k / D, k % D))
        .max_by(|&(i, j), &(k, l)| b[i][j].norm().total_cmp(&b[k][l].norm()))
        .expect("non-empty");
    let phase = a[i][j] / b[i][j];
    let phase = phase / phase.norm();
    (0..D * D)
        .map(|k| (a[k / D][k % D] - phase * b[k / D][k % D]).norm())
        .fold(0.0, f64::max)
}

fn exact_distance<const D: usize>(a: &[[Complex64; D]; D], b: &[[Complex64; D]; D]) -> f64 {
    (0..D * D)
        .map(|k| (a[k / D][k % D] - b[k / D][k % D]).norm())
        .fold(0.0, f64::max)
}

fn from_library2(u: &blindlab_core::circuit::Unitary2) -> M2 {
    std::array::from_fn(|i| std::array::from_fn(|j| u[(i, j)]))
}

fn from_library4(u: &blindlab_core::circuit::UnitaryMatrix) -> M4 {
    std::array::from_fn(|i| std::array::from_fn(|j| u[(i, j)]))
}

/// `CZ·(U3⊗U4)·CZ·(U1⊗U2)`, upper row as the first factor.
fn brick_oracle(b: &Brick) -> M4 {
    let mut cz = [[c(0.0, 0.0); 4]; 4];
    for (k, row) in cz.iter_mut().enumerate() {
        row[k] = c(if k == 3 { -1.0 } else { 1.0 }, 0.0);
    }
    let first = kron(&written_product(b.upper_units[0].pairs()), &written_product(b.lower_units[0].pairs()));
    let second = kron(&written_product(b.upper_units[1].pairs()), &written_product(b.lower_units[1].pairs()));
    mul4(&cz, &mul4(&second, &mul4(&cz, &first)))
}

fn permutation4(map: [usize; 4]) -> M4 {
    let mut m = [[c(0.0, 0.0); 4]; 4];
    for (from, &to) in map.iter().enumerate() {
        m[to][from] = c(1.0, 0.0);
    }
    m
}

#[test]
fn acceptance_1_brick_identities() {
    let t0 = Instant::now();
    let mut fail = Vec::new();
    let identity = Brick::new(0, 0, BrickType::Identity);
    let i4 = permutation4([0, 1, 2, 3]);
    for (label, u) in [
        ("oracle", brick_oracle(&identity)),
        ("library", from_library4(&brick_unitary(&identity))),
    ] {
        let d = exact_distance(&u, &i4);
        if d > MATRIX_TOL {
            fail.push(format!("identity brick ({label}) differs from I4 by {d:e}"));
        }
    }
    // Basis index = 2·upper + lower.
    let cases = [
        (true, permutation4([0, 1, 3, 2])),
        (false, permutation4([0, 3, 2, 1])),
    ];
    for (control_upper, cnot) in cases {
        let b = Brick::new(0, 0, BrickType::Cnot { control_upper });
        let oracle = brick_oracle(&b);
        let library = from_library4(&brick_unitary(&b));
        for (label, u) in [("oracle", oracle), ("library", library)] {
            let d = phase_distance(&u, &cnot);
            if d > MATRIX_TOL {
                fail.push(format!("cnot brick control_upper={control_upper} ({label}) off by {d:e}"));
            }
        }
        let d = exact_distance(&oracle, &library);
        if d > MATRIX_TOL {
            fail.push(format!("oracle and library brick disagree by {d:e}"));
        }
    }
    verdict(1, "identity brick = I4, cnot bricks = CNOT up to phase", &fail, t0, BUDGET_1);
}

#[test]
fn acceptance_2_decomposition_table() {
    let t0 = Instant::now();
    let mut fail = Vec::new();
    for g in Gate::ALL {
        let seg = decompose_single(g).expect("every gate has an entry");
        let target = gate_matrix(g);
        for (label, u) in [
            ("oracle", written_product(seg.pairs())),
            ("library", from_library2(&seg.unitary())),
        ] {
            let d = phase_distance(&u, &target);
            if d > MATRIX_TOL {
                fail.push(format!("{g} entry {seg} ({label}) off by {d:e}"));
            }
        }
    }
    use PairSlot::{HTdg2, HI, HT, HT2};
    let patterns: [(&str, Alphabet, [PairSlot; 2], M2); 5] = [
        ("I = HI·HI", Alphabet::U, [HI, HI], eye2()),
        ("Rz(pi/2) = HI·HT2", Alphabet::U, [HI, HT2], rz(2.0 * FRAC_PI_4)),
        ("Rx(pi/2) = HT2·HI", Alphabet::U, [HT2, HI], rx(2.0 * FRAC_PI_4)),
        ("Rx(-pi/2) = HTdg2·HI", Alphabet::U, [HTdg2, HI], rx(-2.0 * FRAC_PI_4)),
        ("Rx(pi/4) = HT·HI", Alphabet::Mask, [HT, HI], rx(FRAC_PI_4)),
    ];
    for (label, alphabet, pairs, target) in patterns {
        let seg = Segment::new(alphabet, pairs.to_vec()).expect("pattern is in its alphabet");
        for u in [written_product(seg.pairs()), from_library2(&seg.unitary())] {
            let d = phase_distance(&u, &target);
            if d > MATRIX_TOL {
                fail.push(format!("{label} off by {d:e}"));
            }
        }
    }
    let block = rotation_block();
    let oracle4 = (0..4).fold(eye2(), |acc, _| mul2(&acc, &written_product(block.pairs())));
    let library4 = (0..4).fold(eye2(), |acc, _| mul2(&acc, &from_library2(&block.unitary())));
    for (label, u) in [("oracle", oracle4), ("library", library4)] {
        let d = exact_distance(&u, &pauli_x());
        if d > MATRIX_TOL {
            fail.push(format!("(HTHI)^4 ({label}) differs from X by {d:e}"));
        }
    }
    verdict(2, "decomposition entries and unit patterns match targets", &fail, t0, BUDGET_2);
}

/// Plain state vector over `q` qubits, qubit 0 the most significant bit.
fn direct_distribution(circuit: &LogicalCircuit) -> Vec<f64> {
    let q = circuit.qubits;
    let mut amp = vec![c(0.0, 0.0); 1 << q];
    amp[0] = c(1.0, 0.0);
    let mask = |row: usize| 1usize << (q - 1 - row);
    let single = |amp: &mut Vec<Complex64>, row: usize, u: &M2| {
        for i in 0..amp.len() {
            if i & mask(row) == 0 {
                let j = i | mask(row);
                let (a, b) = (amp[i], amp[j]);
                amp[i] = u[0][0] * a + u[0][1] * b;
                amp[j] = u[1][0] * a + u[1][1] * b;
            }
        }
    };
    for op in &circuit.ops {
        match *op {
            LogicalOp::Single { row, gate } => single(&mut amp, row, &gate_matrix(gate)),
            LogicalOp::Cnot { control, target } => {
                for i in 0..amp.len() {
                    if i & mask(control) != 0 && i & mask(target) == 0 {
                        amp.swap(i, i | mask(target));
                    }
                }
            }
            LogicalOp::Cz { a, b } => {
                for (i, x) in amp.iter_mut().enumerate() {
                    if i & mask(a) != 0 && i & mask(b) != 0 {
                        *x = -*x;
                    }
                }
            }
        }
    }
    amp.iter().map(|a| a.norm_sqr()).collect()
}

fn random_circuit(rng: &mut ChaCha20Rng, max_q: usize, max_ops: usize) -> LogicalCircuit {
    let q = rng.gen_range(1..=max_q);
    let n_ops = rng.gen_range(1..=max_ops);
    let ops = (0..n_ops)
        .map(|_| {
            if q == 1 || rng.gen_bool(0.6) {
                LogicalOp::Single {
                    row: rng.gen_range(0..q),
                    gate: Gate::ALL[rng.gen_range(0..Gate::ALL.len())],
                }
            } else {
                let a = rng.gen_range(0..q - 1);
                let (x, y) = if rng.gen_bool(0.5) { (a, a + 1) } else { (a + 1, a) };
                if rng.gen_bool(0.75) {
                    LogicalOp::Cnot { control: x, target: y }
                } else {
                    LogicalOp::Cz { a: x, b: y }
                }
            }
        })
        .collect();
    LogicalCircuit::new(q, ops).expect("generated circuits are valid")
}

/// Large enough for every circuit `random_circuit(_, 4, 12)` can produce.
fn roomy(n: usize, k: usize) -> Params {
    Params::new(n, k).with_m(16).with_layers(24)
}

#[test]
fn acceptance_3_end_to_end_equivalence() {
    let t0 = Instant::now();
    let mut fail = Vec::new();
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for i in 0..200 {
        let circuit = random_circuit(&mut rng, 4, 12);
        let n = rng.gen_range(4..=6);
        let k = 2 * rng.gen_range(1..=2);
        let params = roomy(n, k);
        let (program, _) = execute(&circuit, &ProtocolConfig::new(params, i)).expect("circuit compiles");
        let got = exact_output_distribution(&program).expect("distribution");
        let want = direct_distribution(&circuit);
        let q = circuit.qubits;
        let tv: f64 = want
            .iter()
            .enumerate()
            .map(|(x, p)| {
                let bits = format!("{x:0q$b}");
                (got.get(&bits).copied().unwrap_or(0.0) - p).abs()
            })
            .sum::<f64>()
            / 2.0;
        let extra: f64 = got.iter().filter(|(b, _)| b.len() != q).map(|(_, p)| p).sum();
        worst = worst.max(tv + extra);
        if tv + extra > DIST_TOL {
            fail.push(format!("circuit {i} {circuit:?} N={n} K={k}: TV {tv:e}"));
        }
    }
    verdict(
        3,
        &format!("200 random circuits decode to the direct distribution (max TV {worst:.1e})"),
        &fail,
        t0,
        BUDGET_3,
    );
}

/// Every sequence of `width` letters, by odometer.
fn all_sequences(letters: &[PairSlot], width: usize) -> Vec<Vec<PairSlot>> {
    let mut out = Vec::new();
    let mut digits = vec![0; width];
    loop {
        out.push(digits.iter().map(|&d| letters[d]).collect());
        let mut i = 0;
        while i < width {
            digits[i] += 1;
            if digits[i] < letters.len() {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
        if i == width {
            break;
        }
    }
    out.sort();
    out
}

fn letters(kind: WindowType) -> &'static [PairSlot] {
    use PairSlot::*;
    match kind {
        WindowType::V => &[HI, HT, HTdg],
        WindowType::U => &[HI, HT2, HTdg2],
        WindowType::Mask => &[HI, HT],
    }
}

fn check_public_windows(p: &PublicProgram, fail: &mut Vec<String>, tag: &str) {
    for w in p.windows() {
        let mut got = w.tracks.clone();
        got.sort();
        let width = w.tracks[0].len();
        let replicated = p.shape.masks == MaskMode::Replicate && w.kind == WindowType::Mask;
        let ok = if replicated {
            got.len() == p.shape.mask_tracks() && got.iter().all(|t| t == &got[0])
        } else {
            got == all_sequences(letters(w.kind), width)
        };
        if !ok {
            fail.push(format!("{tag}: window {} ({:?}) tracks {:?}", w.id, w.kind, w.tracks));
            return;
        }
    }
}

#[test]
fn acceptance_4_track_multisets() {
    let t0 = Instant::now();
    let mut fail = Vec::new();
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    for w in 1..=3 {
        for kind in [WindowType::V, WindowType::U, WindowType::Mask] {
            let width = if kind == WindowType::V { w } else { 2 };
            let window = Window { id: 0, kind, row: 0, width };
            let expected = all_sequences(letters(kind), width);
            for _ in 0..100 {
                let pairs = (0..width)
                    .map(|_| letters(kind)[rng.gen_range(0..letters(kind).len())])
                    .collect();
                let real = Segment::new(kind.alphabet(), pairs).expect("letters are in the alphabet");
                let set = make_tracks(&window, &real, &mut rng).expect("tracks");
                let mut got: Vec<Vec<PairSlot>> = set.tracks.iter().map(|t| t.pairs().to_vec()).collect();
                got.sort();
                if got != expected {
                    fail.push(format!("W={w} {kind:?}: multiset differs for {real}"));
                }
                if set.tracks[set.real_index] != real {
                    fail.push(format!("W={w} {kind:?}: real index does not point at {real}"));
                }
            }
        }
        for masks in [MaskMode::Enumerate, MaskMode::Replicate] {
            let params = Params::new(4, 2 * w).with_window(w).with_masks(masks);
            for _ in 0..10 {
                let circuit = random_circuit(&mut rng, 4, 3);
                let cc = compile(&circuit, &params.with_layers(8), &mut rng).expect("compiles");
                let p = strip_secrets(&obfuscate(&cc, &mut rng).expect("obfuscates"));
                check_public_windows(&p, &mut fail, &format!("W={w} {masks:?}"));
            }
        }
    }
    verdict(4, "track multisets are the full enumeration for W = 1, 2, 3", &fail, t0, BUDGET_4);
}

#[test]
fn acceptance_5_masks() {
    let t0 = Instant::now();
    let mut fail = Vec::new();
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    for n in 4..=12 {
        for _ in 0..50 {
            let masks = make_masks(4, n, &mut rng).expect("masks");
            for row in 0..4 {
                let want = if masks.bits[row] == 1 { pauli_x() } else { eye2() };
                let oracle = masks.rows[row]
                    .iter()
                    .fold(eye2(), |acc, b| mul2(&written_product(b.pairs()), &acc));
                for (label, u) in [("oracle", oracle), ("library", from_library2(&masks.row_unitary(row)))] {
                    let d = exact_distance(&u, &want);
                    if d > MATRIX_TOL {
                        fail.push(format!("N={n} row {row} ({label}) differs from X^b by {d:e}"));
                    }
                }
            }
        }
    }
    let x = LogicalCircuit::new(1, vec![LogicalOp::Single { row: 0, gate: Gate::X }]).expect("valid");
    let params = Params::new(5, 4);
    let mut ones = [0usize; 2];
    for seed in 0..UNIFORMITY_RUNS as u64 {
        let (_, r) = execute(&x, &ProtocolConfig::new(params, seed)).expect("runs");
        if r.decoded != "1" {
            fail.push(format!("seed {seed}: decoded {}", r.decoded));
        }
        for (count, bit) in ones.iter_mut().zip(r.raw.chars()) {
            *count += usize::from(bit == '1');
        }
    }
    let radius = SIGMAS * 0.5 / (UNIFORMITY_RUNS as f64).sqrt();
    let freqs: Vec<f64> = ones.iter().map(|&k| k as f64 / UNIFORMITY_RUNS as f64).collect();
    for (row, f) in freqs.iter().enumerate() {
        if (f - 0.5).abs() > radius {
            fail.push(format!("raw row {row}: frequency {f} outside 0.5 ± {radius}"));
        }
    }
    verdict(
        5,
        &format!("mask products are X^b for N = 4..12; raw bit frequencies {freqs:?}"),
        &fail,
        t0,
        BUDGET_5,
    );
}

fn one(gate: Gate) -> LogicalCircuit {
    LogicalCircuit::new(1, vec![LogicalOp::Single { row: 0, gate }]).expect("valid")
}

#[test]
fn acceptance_6_blindness_game() {
    let t0 = Instant::now();
    let mut fail = Vec::new();
    let mut out = std::io::stdout();
    let radius = SIGMAS * 0.5 / (GAME_TRIALS as f64).sqrt();
    let params = Params::new(8, 4);
    let cfg = GameConfig::new(params, GAME_TRIALS, 6);
    let measuring = ServerId::a(8);

    let same = template(Template::ConsecutiveA, 8, 4, measuring, 6);
    let g = run_distinguishing_game(&one(Gate::H), &one(Gate::H), &cfg, &same).expect("game");
    let _ = writeln!(out, "    c0 = c1, {same}: advantage {:+.4} (radius {radius})", g.advantage);
    if g.advantage.abs() > radius {
        fail.push(format!("c0 = c1 advantage {} outside ±{radius}", g.advantage));
    }

    let half = Coalition::of([ServerId::a(7), ServerId::a(8)]);
    let b_side = template(Template::ConsecutiveB, 8, 4, measuring, 6);
    let mixed = template(Template::Mixed, 8, 4, measuring, 6);
    for co in [&half, &same] {
        let tv = exact_view_tv(&one(Gate::I), &one(Gate::X), &cfg, co, ViewFilter::Full).expect("tv");
        let g = run_distinguishing_game(&one(Gate::I), &one(Gate::X), &cfg, co).expect("game");
        let _ = writeln!(
            out,
            "    I vs X, {co}: advantage {:+.4}, exact TV {tv:.6}, bound {:.4}",
            g.advantage,
            tv / 2.0 + radius
        );
        if g.advantage > tv / 2.0 + radius {
            fail.push(format!("{co}: advantage {} above TV/2 + 3σ = {}", g.advantage, tv / 2.0 + radius));
        }
    }
    for co in [&half, &same, &b_side, &mixed, &Coalition::All] {
        let tv = exact_view_tv(&one(Gate::I), &one(Gate::X), &cfg, co, ViewFilter::GateWindowsOnly).expect("tv");
        if tv != 0.0 {
            fail.push(format!("{co}: gate-window TV {tv}"));
        }
    }

    let small = GameConfig::new(Params::new(4, 4), GAME_TRIALS, 6);
    let g = run_distinguishing_game(&one(Gate::I), &one(Gate::X), &small, &Coalition::All).expect("game");
    let _ = writeln!(out, "    I vs X, all servers, N=4: advantage {:+.4}", g.advantage);
    if g.advantage <= FULL_COLLUSION_FLOOR {
        fail.push(format!("full collusion advantage {} not above {FULL_COLLUSION_FLOOR}", g.advantage));
    }
    verdict(6, "game calibrated, bounded by exact TV, gate windows silent", &fail, t0, BUDGET_6);
}

#[test]
fn acceptance_7_overhead() {
    let t0 = Instant::now();
    let mut fail = Vec::new();
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    for k in [2, 4, 6] {
        let w = k / 2;
        for n in [4, 6, 8] {
            for masks in [MaskMode::Replicate, MaskMode::Enumerate] {
                let params = Params::new(n, k).with_m(16).with_layers(4).with_masks(masks);
                let circuit = random_circuit(&mut rng, 4, 2);
                let cc = compile(&circuit, &params, &mut rng).expect("compiles");
                let public = strip_secrets(&obfuscate(&cc, &mut rng).expect("obfuscates"));
                let counts = GateCounts::from_public(&public);
                let tag = format!("K={k} N={n} {masks:?}");
                if !counts.check(&public.shape).all_ok() {
                    fail.push(format!("{tag}: {:?}", counts.check(&public.shape)));
                }
                // Recount from the windows themselves.
                let (mut v_real, mut v_all, mut mask_pairs, mut mask_gates) = (0, 0, 0, 0);
                for win in public.windows() {
                    let width = win.tracks[0].len();
                    match win.kind {
                        WindowType::V => {
                            v_real += width;
                            v_all += win.tracks.len() * width;
                        }
                        WindowType::Mask => {
                            mask_pairs += win.tracks.len() * width;
                            mask_gates += win.tracks.iter().flatten().map(|p| p.physical_len()).sum::<usize>();
                        }
                        WindowType::U => {}
                    }
                }
                let rows = public.shape.n;
                let tracks = match masks {
                    MaskMode::Replicate => 3usize.pow(w as u32),
                    MaskMode::Enumerate => 4,
                };
                if v_all - v_real > (3usize.pow(w as u32) - 1) * v_real {
                    fail.push(format!("{tag}: V dummies {} above bound", v_all - v_real));
                }
                if v_all > 3usize.pow(k as u32 / 2) * v_real {
                    fail.push(format!("{tag}: V slots {v_all} above 3^(K/2) x {v_real}"));
                }
                if mask_pairs != 2 * n * tracks * rows || counts.added_by_masks != mask_pairs {
                    fail.push(format!("{tag}: mask pairs {mask_pairs}, expected {}", 2 * n * tracks * rows));
                }
                if mask_gates != 4 * n * tracks * rows {
                    fail.push(format!("{tag}: mask gates {mask_gates}, expected {}", 4 * n * tracks * rows));
                }
            }
        }
    }
    verdict(7, "dummy and mask overhead within bounds", &fail, t0, BUDGET_7);
}

fn blindlab(args: &[&str], dir: &Path) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_blindlab"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn write_inputs(dir: &Path) {
    std::fs::write(dir.join("bell.json"), r#"{"q":2,"ops":[{"gate":"H","row":0},{"cnot":[0,1]}]}"#).unwrap();
    std::fs::write(dir.join("plus.json"), r#"{"q":2,"ops":[{"gate":"H","row":0}]}"#).unwrap();
}

#[test]
fn acceptance_8_determinism() {
    let t0 = Instant::now();
    let mut fail = Vec::new();
    let invocations: [&[&str]; 3] = [
        &["compile", "--circuit", "bell.json", "--params", "N=4,K=4", "--seed", "8", "--out-dir", "out"],
        &["run", "--circuit", "bell.json", "--params", "N=4,K=4", "--seed", "8", "--out-dir", "out"],
        &[
            "attack", "--pair", "bell.json,plus.json", "--colluders", "A1,A2,B3", "--trials", "300",
            "--rehearsals", "200", "--params", "N=4,K=4", "--seed", "8", "--out-dir", "out",
        ],
    ];
    let files = ["public.json", "secret.json", "run.json", "transcripts.jsonl", "attack.json"];
    let mut snapshots = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().expect("temp dir");
        write_inputs(dir.path());
        let mut snap = Vec::new();
        for args in invocations {
            let (code, stdout) = blindlab(args, dir.path());
            if code != 0 {
                fail.push(format!("{} exited {code}", args[0]));
            }
            snap.push(stdout);
        }
        for f in files {
            snap.push(std::fs::read(dir.path().join("out").join(f)).unwrap_or_default());
        }
        snapshots.push(snap);
    }
    let labels = invocations.iter().map(|a| a[0]).chain(files);
    for (label, (a, b)) in labels.zip(snapshots[0].iter().zip(&snapshots[1])) {
        if a != b || a.is_empty() {
            fail.push(format!("{label} differs between invocations or is empty"));
        }
    }
    verdict(8, "compile, run and attack artifacts are byte-identical", &fail, t0, BUDGET_8);
}

#[test]
fn acceptance_9_leak_time() {
    let t0 = Instant::now();
    let mut fail = Vec::new();
    for k in 0..=16usize {
        for t in [0.25, 0.5, 1.0, 1.5, 2.0, 7.0, 30.0, 365.25, 1e-3, 1e6] {
            let got = estimate_leak_time(k, t).expect("positive time");
            if got != (k + 1) as f64 * t {
                fail.push(format!("K={k} t={t}: {got}"));
            }
        }
    }
    let dir = tempfile::tempdir().expect("temp dir");
    write_inputs(dir.path());
    let (code, _) = blindlab(&["compile", "--circuit", "bell.json", "--params", "N=4,K=4"], dir.path());
    let (report_code, stdout) = blindlab(&["report", "--leak-interval", "30", "--format", "table"], dir.path());
    let text = String::from_utf8_lossy(&stdout);
    if code != 0 || report_code != 0 || !text.contains("(K+1)t = 150 days") {
        fail.push(format!("report for K=4, t=30 days printed:\n{text}"));
    }
    verdict(9, "leak time is (K+1)t on the grid; K=4, t=30 days gives 150 days", &fail, t0, BUDGET_9);
}
