//! Random circuit generators and brute-force oracles shared by the
//! integration tests.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;

use aigsyn::aig::{AndDef, LatchDef, RawAig, Reset, SymbolEntry, SymbolKind};
use aigsyn::{Aig, Literal, Var};

#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub inputs: usize,
    pub latches: usize,
    pub gates: usize,
    pub outputs: usize,
    /// Allow reset values 1 and uninitialized.
    pub resets: bool,
    pub uninitialized: bool,
    pub symbols: bool,
    pub comments: bool,
    /// Bad-state and invariant-constraint sections.
    pub extensions: bool,
    /// Permute variable indices and gate order, and leave index gaps.
    pub shuffle: bool,
}

impl Shape {
    pub fn sequential(inputs: usize, latches: usize, gates: usize) -> Shape {
        Shape {
            inputs,
            latches,
            gates,
            outputs: 1,
            resets: true,
            uninitialized: false,
            symbols: false,
            comments: false,
            extensions: false,
            shuffle: true,
        }
    }
}

fn random_lit<R: Rng>(rng: &mut R, pool: &[Var]) -> Literal {
    if pool.is_empty() || rng.gen_ratio(1, 20) {
        return Literal::from(rng.gen_bool(0.5));
    }
    Literal::new(*pool.choose(rng).unwrap(), rng.gen_bool(0.5))
}

fn random_name<R: Rng>(rng: &mut R) -> String {
    const WORDS: [&str; 6] = ["req", "ack", "grant", "state", "x", "err"];
    let mut name = WORDS.choose(rng).unwrap().to_string();
    if rng.gen_ratio(1, 4) {
        name.push_str(" with space");
    }
    name.push_str(&rng.gen_range(0..100).to_string());
    name
}

/// A well-formed circuit of the given shape. Gates only read variables
/// created before them, so the result is acyclic.
pub fn random_raw<R: Rng>(rng: &mut R, shape: &Shape) -> RawAig {
    let n = shape.inputs + shape.latches + shape.gates;
    let gaps = if shape.shuffle {
        rng.gen_range(0..=2)
    } else {
        0
    };
    let mut indices: Vec<u32> = (1..=(n + gaps) as u32).collect();
    if shape.shuffle {
        indices.shuffle(rng);
    }
    let mut indices = indices.into_iter().map(Var);

    let inputs: Vec<Var> = (0..shape.inputs).map(|_| indices.next().unwrap()).collect();
    let latch_vars: Vec<Var> = (0..shape.latches)
        .map(|_| indices.next().unwrap())
        .collect();
    let mut pool: Vec<Var> = inputs.iter().chain(&latch_vars).copied().collect();
    let mut gates = Vec::new();
    for _ in 0..shape.gates {
        let lhs = indices.next().unwrap();
        let (a, b) = (random_lit(rng, &pool), random_lit(rng, &pool));
        gates.push(AndDef::new(lhs.lit(), a, b));
        pool.push(lhs);
    }
    let latches = latch_vars
        .iter()
        .map(|&v| {
            let reset = match rng.gen_range(0..6) {
                0 if shape.resets => Reset::One,
                1 if shape.resets && shape.uninitialized => Reset::Uninitialized,
                _ => Reset::Zero,
            };
            LatchDef {
                lit: v.lit(),
                next: random_lit(rng, &pool),
                reset,
            }
        })
        .collect();
    let outputs = (0..shape.outputs).map(|_| random_lit(rng, &pool)).collect();
    if shape.shuffle {
        gates.shuffle(rng);
    }

    let mut raw = RawAig {
        max_var: (n + gaps) as u32,
        inputs: inputs.iter().map(|v| v.lit()).collect(),
        latches,
        outputs,
        gates,
        ..RawAig::default()
    };
    if shape.extensions {
        raw.bad = (0..rng.gen_range(0..3))
            .map(|_| random_lit(rng, &pool))
            .collect();
        raw.constraints = (0..rng.gen_range(0..3))
            .map(|_| random_lit(rng, &pool))
            .collect();
    }
    if shape.symbols {
        for (kind, count) in [
            (SymbolKind::Input, shape.inputs),
            (SymbolKind::Latch, shape.latches),
            (SymbolKind::Output, shape.outputs),
        ] {
            for position in 0..count {
                if rng.gen_bool(0.6) {
                    raw.symbols
                        .push(SymbolEntry::new(kind, position, random_name(rng)));
                }
            }
        }
        raw.symbols.shuffle(rng);
    }
    if shape.comments {
        raw.comments = (0..rng.gen_range(1..4))
            .map(|k| format!("comment {k}: {}", random_name(rng)))
            .collect();
    }
    raw
}

/// Serializes a circuit independently of the library writer, choosing
/// among equivalent spellings: explicit `0` resets and zero-valued
/// extension header fields.
pub fn render_variant<R: Rng>(rng: &mut R, raw: &RawAig) -> String {
    let mut s = format!(
        "aag {} {} {} {} {}",
        raw.max_var,
        raw.inputs.len(),
        raw.latches.len(),
        raw.outputs.len(),
        raw.gates.len()
    );
    if !raw.bad.is_empty() || !raw.constraints.is_empty() {
        s.push_str(&format!(" {} {}", raw.bad.len(), raw.constraints.len()));
    } else if rng.gen_ratio(1, 4) {
        s.push_str(" 0 0 0 0");
    }
    s.push('\n');
    for i in &raw.inputs {
        s.push_str(&format!("{}\n", i.code()));
    }
    for l in &raw.latches {
        match l.reset {
            Reset::Zero if rng.gen_bool(0.5) => {
                s.push_str(&format!("{} {} 0\n", l.lit.code(), l.next.code()))
            }
            Reset::Zero => s.push_str(&format!("{} {}\n", l.lit.code(), l.next.code())),
            Reset::One => s.push_str(&format!("{} {} 1\n", l.lit.code(), l.next.code())),
            Reset::Uninitialized => s.push_str(&format!(
                "{} {} {}\n",
                l.lit.code(),
                l.next.code(),
                l.lit.code()
            )),
        }
    }
    for o in raw.outputs.iter().chain(&raw.bad).chain(&raw.constraints) {
        s.push_str(&format!("{}\n", o.code()));
    }
    for g in &raw.gates {
        s.push_str(&format!(
            "{} {} {}\n",
            g.lhs.code(),
            g.rhs0.code(),
            g.rhs1.code()
        ));
    }
    for sym in &raw.symbols {
        s.push_str(&format!(
            "{}{} {}\n",
            sym.kind.prefix(),
            sym.position,
            sym.name
        ));
    }
    if !raw.comments.is_empty() {
        s.push_str("c\n");
        for c in &raw.comments {
            s.push_str(c);
            s.push('\n');
        }
    }
    s
}

/// A random synthesis spec: a circuit whose inputs at the returned
/// positions are named `controllable_*`.
pub fn random_spec<R: Rng>(
    rng: &mut R,
    latches: usize,
    uncontrollable: usize,
    controllable: usize,
    gates: usize,
) -> (Aig, Vec<usize>) {
    let inputs = uncontrollable + controllable;
    let mut raw = random_raw(rng, &Shape::sequential(inputs, latches, gates));
    let mut positions: Vec<usize> = (0..inputs).collect();
    positions.shuffle(rng);
    let mut chosen = positions[..controllable].to_vec();
    chosen.sort_unstable();
    for &p in &chosen {
        raw.symbols.push(SymbolEntry::new(
            SymbolKind::Input,
            p,
            format!("controllable_{p}"),
        ));
    }
    if let Some(&p) = positions[controllable..].first() {
        raw.symbols
            .push(SymbolEntry::new(SymbolKind::Input, p, "env"));
    }
    (
        Aig::new(raw).expect("generated spec is well formed"),
        chosen,
    )
}

fn bits(value: usize, width: usize) -> Vec<bool> {
    (0..width).map(|k| value >> k & 1 == 1).collect()
}

fn index(bits: &[bool]) -> usize {
    bits.iter()
        .enumerate()
        .map(|(k, &b)| (b as usize) << k)
        .sum()
}

/// Realizability by backward induction over explicit state and input
/// tables, simulating the circuit with `Aig::step`.
pub fn brute_force_realizable(aig: &Aig, controllable: &[usize]) -> bool {
    let l = aig.latches.len();
    let uncontrollable: Vec<usize> = (0..aig.inputs.len())
        .filter(|p| !controllable.contains(p))
        .collect();
    let (nu, nc) = (uncontrollable.len(), controllable.len());

    // table[q][u][c] = (output, successor)
    let table: Vec<Vec<Vec<(bool, usize)>>> = (0..1usize << l)
        .map(|q| {
            let state = bits(q, l);
            (0..1usize << nu)
                .map(|u| {
                    (0..1usize << nc)
                        .map(|c| {
                            let mut input = vec![false; aig.inputs.len()];
                            for (k, &p) in uncontrollable.iter().enumerate() {
                                input[p] = u >> k & 1 == 1;
                            }
                            for (k, &p) in controllable.iter().enumerate() {
                                input[p] = c >> k & 1 == 1;
                            }
                            let step = aig.step(&state, &input);
                            (step.outputs[0], index(&step.next_latches))
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    let mut winning = vec![true; 1 << l];
    loop {
        let next: Vec<bool> = (0..1usize << l)
            .map(|q| {
                table[q]
                    .iter()
                    .all(|row| row.iter().any(|&(out, succ)| !out && winning[succ]))
            })
            .collect();
        if next == winning {
            break;
        }
        winning = next;
    }
    let init: Vec<bool> = aig.latches.iter().map(|l| l.reset == Reset::One).collect();
    winning[index(&init)]
}

/// Every state reachable from the initial states, by explicit search.
pub fn reachable_states(aig: &Aig) -> Vec<Vec<bool>> {
    let mut seen: Vec<Vec<bool>> = aig.initial_states().iter().collect();
    let mut frontier = seen.clone();
    let n = aig.inputs.len();
    while let Some(state) = frontier.pop() {
        for x in 0..1usize << n {
            let next = aig.step(&state, &bits(x, n)).next_latches;
            if !seen.contains(&next) {
                seen.push(next.clone());
                frontier.push(next);
            }
        }
    }
    seen
}

pub fn all_inputs(width: usize) -> impl Iterator<Item = Vec<bool>> {
    (0..1usize << width).map(move |x| bits(x, width))
}
