//! Standard M-paths: elementary steps and their matrices.

use std::fmt;

use serde::Serialize;

use crate::curvespec::{rebase_loop, CurveSpec, Kind, LaminationSigns, Rot, Transition};
use crate::error::{Error, Result};
use crate::laurent::{Exps, LaurentPoly, Var};
use crate::mat2::{normalize_sign, path_product, Mat2};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StepKind {
    Type1,
    Type2,
    Type3,
    Type3Prime,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Standard,
    Sqrt,
    Y1,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Standard => "standard",
            Mode::Sqrt => "sqrt",
            Mode::Y1 => "y1",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Mode> {
        match s {
            "standard" => Ok(Mode::Standard),
            "sqrt" => Ok(Mode::Sqrt),
            "y1" | "y_equals_1" => Ok(Mode::Y1),
            _ => Err(Error::Input(format!("unknown mode {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub kind: StepKind,
    /// (σ, τ, τ′) for Type1; (τ) otherwise.
    pub arcs: Vec<Var>,
    pub rot: Option<Rot>,
    pub side: Option<Side>,
    /// Lamination sign read by Type2 steps.
    pub sign: Option<i8>,
    pub sqrt_mode: bool,
}

impl Step {
    pub fn type1(sigma: &Var, tau: &Var, tau2: &Var, rot: Rot) -> Step {
        Step {
            kind: StepKind::Type1,
            arcs: vec![sigma.clone(), tau.clone(), tau2.clone()],
            rot: Some(rot),
            side: None,
            sign: None,
            sqrt_mode: false,
        }
    }

    pub fn type2(tau: &Var, rot: Rot, sign: i8, sqrt_mode: bool) -> Step {
        Step { kind: StepKind::Type2, arcs: vec![tau.clone()], rot: Some(rot), side: None, sign: Some(sign), sqrt_mode }
    }

    pub fn type3(tau: &Var, side: Side) -> Step {
        Step { kind: StepKind::Type3, arcs: vec![tau.clone()], rot: None, side: Some(side), sign: None, sqrt_mode: false }
    }

    pub fn type3_prime(tau: &Var, side: Side) -> Step {
        Step {
            kind: StepKind::Type3Prime,
            arcs: vec![tau.clone()],
            rot: None,
            side: Some(side),
            sign: None,
            sqrt_mode: false,
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.arcs.iter().map(|v| v.as_str()).collect();
        match self.kind {
            StepKind::Type1 => write!(
                f,
                "type1 {}; {}, {} {}",
                names[0],
                names[1],
                names[2],
                self.rot.unwrap().as_str()
            ),
            StepKind::Type2 => write!(
                f,
                "type2 {} {} sign={}{}",
                names[0],
                self.rot.unwrap().as_str(),
                if self.sign.unwrap() > 0 { "+1" } else { "-1" },
                if self.sqrt_mode { " sqrt" } else { "" }
            ),
            StepKind::Type3 | StepKind::Type3Prime => write!(
                f,
                "{} {} {}",
                if self.kind == StepKind::Type3 { "type3" } else { "type3'" },
                names[0],
                if self.side == Some(Side::Right) { "right" } else { "left" }
            ),
        }
    }
}

fn x(v: &Var) -> LaurentPoly {
    LaurentPoly::var_of(v)
}

fn xpow(v: &Var, doubled: i64) -> LaurentPoly {
    LaurentPoly::from_monomial(Exps::from_doubled([(v.clone(), doubled)]))
}

fn ypow(v: &Var, doubled: i64) -> LaurentPoly {
    xpow(&Var::coefficient_of(v), doubled)
}

pub fn step_matrix(s: &Step) -> Mat2 {
    let zero = LaurentPoly::zero;
    let one = LaurentPoly::one;
    match s.kind {
        StepKind::Type1 => {
            let frac = &(&x(&s.arcs[0]) * &xpow(&s.arcs[1], -2)) * &xpow(&s.arcs[2], -2);
            let e = if s.rot == Some(Rot::Cw) { frac } else { -frac };
            Mat2::new(one(), zero(), e, one())
        }
        StepKind::Type2 => {
            let tau = &s.arcs[0];
            let b = s.sign.unwrap();
            // Which diagonal slot carries y: clockwise puts it last for b=+1.
            let y_last = (s.rot == Some(Rot::Cw)) == (b > 0);
            let (d1, d2) = match (s.sqrt_mode, y_last) {
                (false, true) => (one(), ypow(tau, 2)),
                (false, false) => (ypow(tau, 2), one()),
                (true, true) => (ypow(tau, -1), ypow(tau, 1)),
                (true, false) => (ypow(tau, 1), ypow(tau, -1)),
            };
            Mat2::diag(d1, d2)
        }
        StepKind::Type3 => {
            let t = &s.arcs[0];
            let sg = if s.side == Some(Side::Right) { 1 } else { -1 };
            Mat2::new(zero(), x(t) * LaurentPoly::constant(sg), xpow(t, -2) * LaurentPoly::constant(-sg), zero())
        }
        StepKind::Type3Prime => {
            let t = &s.arcs[0];
            let sg = if s.side == Some(Side::Right) { 1 } else { -1 };
            Mat2::new(zero(), x(t) * LaurentPoly::constant(sg), xpow(t, -2) * LaurentPoly::constant(sg), zero())
        }
    }
}

fn transition_steps(t: &Transition, arcs: &[Var], sign: i8, sqrt: bool, out: &mut Vec<Step>) {
    let (from, to) = (&arcs[t.from], &arcs[t.to]);
    out.push(Step::type2(from, Rot::Cw, sign, sqrt));
    match t.rot {
        Rot::Ccw => out.push(Step::type1(&t.third, from, to, Rot::Cw)),
        Rot::Cw => {
            out.push(Step::type1(to, &t.third, from, Rot::Cw));
            out.push(Step::type3(&t.third, Side::Right));
            out.push(Step::type1(from, &t.third, to, Rot::Cw));
        }
    }
}

/// Standard M-path of a curve; steps are listed in travel order.
pub fn standard_mpath(spec: &CurveSpec, signs: &LaminationSigns, sqrt_mode: bool) -> Result<Vec<Step>> {
    if spec.kind == Kind::Loop && spec.close_rot() == Some(Rot::Ccw) {
        return standard_mpath(&rebase_loop(spec)?, signs, sqrt_mode);
    }
    let arcs = spec.arcs();
    let d = spec.d();
    let signs_eff = spec.effective_signs(signs)?;
    let mut steps = Vec::new();
    if spec.kind == Kind::Arc {
        let (a, b) = spec.initial.clone().ok_or_else(|| Error::validation("arc needs initial sides"))?;
        steps.push(Step::type3(&a, Side::Right));
        steps.push(Step::type1(&b, &a, &arcs[0], Rot::Cw));
    }
    for t in spec.transitions() {
        transition_steps(&t, &arcs, signs_eff[t.from], sqrt_mode, &mut steps);
    }
    match spec.kind {
        Kind::Arc => {
            let (w, z) = spec.fin.clone().ok_or_else(|| Error::validation("arc needs final sides"))?;
            steps.push(Step::type2(&arcs[d - 1], Rot::Cw, signs_eff[d - 1], sqrt_mode));
            steps.push(Step::type1(&w, &arcs[d - 1], &z, Rot::Cw));
            steps.push(Step::type3(&z, Side::Right));
        }
        Kind::Loop | Kind::Onesided => {
            let c = spec.closing().ok_or_else(|| Error::validation("closed curve needs a close"))?;
            transition_steps(&c, &arcs, signs_eff[d - 1], sqrt_mode, &mut steps);
            if spec.kind == Kind::Onesided {
                steps.push(Step::type3_prime(&arcs[0], Side::Right));
            }
        }
    }
    Ok(steps)
}

/// Product of the step matrices, later steps multiplying on the left.
pub fn path_matrix(steps: &[Step]) -> Mat2 {
    let ms: Vec<Mat2> = steps.iter().map(step_matrix).collect();
    path_product(ms.iter())
}

/// Raw (unnormalized) product for a spec.
pub fn mpath_matrix(spec: &CurveSpec, signs: &LaminationSigns, mode: Mode) -> Result<Mat2> {
    let steps = standard_mpath(spec, signs, mode == Mode::Sqrt)?;
    let m = path_matrix(&steps);
    Ok(if mode == Mode::Y1 { m.map(|p| p.set_coefficients_to_one()) } else { m })
}

/// χ (standard), χ̄ (sqrt) or χ at y=1.
pub fn chi(spec: &CurveSpec, signs: &LaminationSigns, mode: Mode) -> Result<LaurentPoly> {
    let m = mpath_matrix(spec, signs, mode)?;
    let raw = match spec.kind {
        Kind::Arc => m.upper_right(),
        _ => m.trace(),
    };
    normalize_sign(&raw)
}
