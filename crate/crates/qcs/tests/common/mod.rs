#![allow(dead_code)]

use qcs::curvespec::{Crossing, CurveSpec, Kind, LaminationSigns, Rot, Turn};
use qcs::Var;
use rand::Rng;

pub fn v(s: &str) -> Var {
    Var::new(s).unwrap()
}

fn rot<R: Rng>(rng: &mut R) -> Rot {
    if rng.gen() {
        Rot::Ccw
    } else {
        Rot::Cw
    }
}

fn pick<R: Rng>(rng: &mut R, pool: &[&str], avoid: &[&Var]) -> Var {
    loop {
        let c = v(pool[rng.gen_range(0..pool.len())]);
        if !avoid.contains(&&c) {
            return c;
        }
    }
}

const ARCS: [&str; 6] = ["p", "q", "r", "s", "t", "u"];
const ALL: [&str; 10] = ["p", "q", "r", "s", "t", "u", "a", "b", "c", "e"];

/// Random abstract curve of the given kind with `d` crossings.
pub fn random_spec<R: Rng>(rng: &mut R, kind: Kind, d: usize) -> CurveSpec {
    let arcs: Vec<Var> = (0..d).map(|_| v(ARCS[rng.gen_range(0..ARCS.len())])).collect();
    let mut crossings = Vec::new();
    for j in 0..d {
        let next = &arcs[(j + 1) % d];
        let turn = if j + 1 < d {
            Turn::Next(rot(rng))
        } else if kind == Kind::Arc {
            Turn::End
        } else {
            Turn::Close(rot(rng))
        };
        let third = (turn != Turn::End).then(|| pick(rng, &ALL, &[&arcs[j], next]));
        let sign = (rng.gen_range(0..5) == 0).then(|| if rng.gen() { 1 } else { -1 });
        crossings.push(Crossing { arc: arcs[j].clone(), turn, third, sign });
    }
    let all_ccw = crossings.iter().all(|c| matches!(c.turn, Turn::Next(Rot::Ccw) | Turn::Close(Rot::Ccw)));
    if kind == Kind::Loop && all_ccw {
        crossings[d - 1].turn = Turn::Close(Rot::Cw);
    }
    let (initial, fin) = if kind == Kind::Arc {
        let a = pick(rng, &ALL, &[&arcs[0]]);
        let b = pick(rng, &ALL, &[&arcs[0], &a]);
        let w = pick(rng, &ALL, &[&arcs[d - 1]]);
        let z = pick(rng, &ALL, &[&arcs[d - 1], &w]);
        (Some((a, b)), Some((w, z)))
    } else {
        (None, None)
    };
    CurveSpec { name: "g".into(), kind, crossings, initial, fin }
}

pub fn random_signs<R: Rng>(rng: &mut R) -> LaminationSigns {
    ARCS.iter().map(|a| (v(a), if rng.gen() { 1 } else { -1 })).collect()
}
