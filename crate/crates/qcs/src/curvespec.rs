//! Abstract crossing data for curves and the `.qcs` text format.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::laurent::{Var, VarClass};
use crate::skein::{self, IdentitySpec, MutationSpec};

/// Per-arc shear sign, each value +1 or -1.
pub type LaminationSigns = BTreeMap<Var, i8>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Arc,
    Loop,
    Onesided,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Arc => "arc",
            Kind::Loop => "loop",
            Kind::Onesided => "onesided",
        }
    }

    /// Rotation sense of the closing transition when the file does not say.
    pub fn default_close(self) -> Rot {
        match self {
            Kind::Onesided => Rot::Ccw,
            _ => Rot::Cw,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Rot {
    Ccw,
    Cw,
}

impl Rot {
    pub fn flip(self) -> Rot {
        match self {
            Rot::Ccw => Rot::Cw,
            Rot::Cw => Rot::Ccw,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Rot::Ccw => "ccw",
            Rot::Cw => "cw",
        }
    }
}

/// What happens after crossing an arc.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Turn {
    /// Move on to the next crossing, turning in the given sense.
    Next(Rot),
    /// Closing transition back to the first crossing.
    Close(Rot),
    /// Last crossing of an arc.
    End,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Crossing {
    pub arc: Var,
    pub turn: Turn,
    pub third: Option<Var>,
    /// Per-crossing override of the lamination sign.
    pub sign: Option<i8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurveSpec {
    pub name: String,
    pub kind: Kind,
    pub crossings: Vec<Crossing>,
    pub initial: Option<(Var, Var)>,
    #[serde(rename = "final")]
    pub fin: Option<(Var, Var)>,
}

/// One transition of the standard path: from crossing `from` to `to`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub from: usize,
    pub to: usize,
    pub rot: Rot,
    pub third: Var,
}

impl CurveSpec {
    pub fn d(&self) -> usize {
        self.crossings.len()
    }

    pub fn arcs(&self) -> Vec<Var> {
        self.crossings.iter().map(|c| c.arc.clone()).collect()
    }

    /// Effective sign at crossing `j`.
    pub fn sign_at(&self, j: usize, signs: &LaminationSigns) -> Result<i8> {
        let c = &self.crossings[j];
        if let Some(s) = c.sign {
            return Ok(s);
        }
        signs
            .get(&c.arc)
            .copied()
            .ok_or_else(|| Error::validation(format!("arc {} has no lamination sign", c.arc)))
    }

    pub fn effective_signs(&self, signs: &LaminationSigns) -> Result<Vec<i8>> {
        (0..self.d()).map(|j| self.sign_at(j, signs)).collect()
    }

    /// Interior transitions j -> j+1.
    pub fn transitions(&self) -> Vec<Transition> {
        let d = self.d();
        (0..d.saturating_sub(1))
            .map(|j| {
                let c = &self.crossings[j];
                let rot = match c.turn {
                    Turn::Next(r) => r,
                    _ => unreachable!("validated spec"),
                };
                Transition { from: j, to: j + 1, rot, third: c.third.clone().unwrap() }
            })
            .collect()
    }

    /// Closing transition d -> 1 for closed curves.
    pub fn closing(&self) -> Option<Transition> {
        let d = self.d();
        let last = self.crossings.last()?;
        match last.turn {
            Turn::Close(rot) => {
                Some(Transition { from: d - 1, to: 0, rot, third: last.third.clone().unwrap() })
            }
            _ => None,
        }
    }

    pub fn close_rot(&self) -> Option<Rot> {
        self.closing().map(|t| t.rot)
    }

    /// Check the structural invariants.
    pub fn validate(&self, signs: &LaminationSigns) -> Result<()> {
        let d = self.d();
        let name = &self.name;
        if d == 0 {
            return Err(Error::validation(format!("curve {name}: empty crossing list")));
        }
        for (j, c) in self.crossings.iter().enumerate() {
            check_weight(&c.arc)?;
            if let Some(t) = &c.third {
                check_weight(t)?;
            }
            if let Some(s) = c.sign {
                if s != 1 && s != -1 {
                    return Err(Error::validation(format!("curve {name}: sign must be +1 or -1")));
                }
            }
            let last = j + 1 == d;
            let ok = match (self.kind, c.turn, last) {
                (_, Turn::Next(_), false) => c.third.is_some(),
                (Kind::Arc, Turn::End, true) => c.third.is_none(),
                (Kind::Loop | Kind::Onesided, Turn::Close(_), true) => c.third.is_some(),
                _ => false,
            };
            if !ok {
                return Err(Error::validation(format!(
                    "curve {name}: crossing {} has turn {:?} not allowed for kind {}",
                    j + 1,
                    c.turn,
                    self.kind.as_str()
                )));
            }
            self.sign_at(j, signs)?;
        }
        match self.kind {
            Kind::Arc => {
                let (Some((a, b)), Some((w, z))) = (&self.initial, &self.fin) else {
                    return Err(Error::validation(format!(
                        "curve {name}: arcs need initial and final sides"
                    )));
                };
                for v in [a, b, w, z] {
                    check_weight(v)?;
                }
            }
            _ => {
                if self.initial.is_some() || self.fin.is_some() {
                    return Err(Error::validation(format!(
                        "curve {name}: initial/final only apply to arcs"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn check_weight(v: &Var) -> Result<()> {
    if v.class() == VarClass::Coefficient {
        return Err(Error::validation(format!("arc name {v} uses the reserved y_ prefix")));
    }
    Ok(())
}

/// Turn every CCW into CW and back, including the closing sense.
pub fn reflect(spec: &CurveSpec) -> Result<CurveSpec> {
    if spec.kind != Kind::Onesided {
        return Err(Error::Domain(format!("reflect needs a one-sided curve, got {}", spec.kind.as_str())));
    }
    let mut out = spec.clone();
    for c in &mut out.crossings {
        c.turn = match c.turn {
            Turn::Next(r) => Turn::Next(r.flip()),
            Turn::Close(r) => Turn::Close(r.flip()),
            Turn::End => Turn::End,
        };
    }
    Ok(out)
}

/// Move the starting point past the first crossing.
///
/// The first crossing becomes the closing one with its turn reversed; the
/// old closing transition becomes an ordinary turn in the same sense.
pub fn rotate(spec: &CurveSpec) -> Result<CurveSpec> {
    if spec.kind != Kind::Onesided {
        return Err(Error::Domain(format!("rotate needs a one-sided curve, got {}", spec.kind.as_str())));
    }
    let mut cs = spec.crossings.clone();
    let first = cs.remove(0);
    if let Some(last) = cs.last_mut() {
        if let Turn::Close(r) = last.turn {
            last.turn = Turn::Next(r);
        }
    }
    let rot = match first.turn {
        Turn::Next(r) | Turn::Close(r) => r.flip(),
        Turn::End => unreachable!("validated spec"),
    };
    cs.push(Crossing { turn: Turn::Close(rot), ..first });
    Ok(CurveSpec { crossings: cs, ..spec.clone() })
}

/// Cyclically shift a two-sided loop so that its closing turn is clockwise.
pub fn rebase_loop(spec: &CurveSpec) -> Result<CurveSpec> {
    if spec.kind != Kind::Loop {
        return Err(Error::Domain(format!("rebase needs a two-sided loop, got {}", spec.kind.as_str())));
    }
    let d = spec.d();
    let rot_of = |c: &Crossing| match c.turn {
        Turn::Next(r) | Turn::Close(r) => r,
        Turn::End => unreachable!("validated spec"),
    };
    // Start after the last crossing whose outgoing turn is clockwise.
    let k = (1..=d)
        .rev()
        .find(|&k| rot_of(&spec.crossings[k - 1]) == Rot::Cw)
        .ok_or_else(|| Error::Domain(format!("loop {} has no clockwise turn", spec.name)))?;
    let mut cs: Vec<Crossing> = spec.crossings[k..].iter().chain(&spec.crossings[..k]).cloned().collect();
    for (j, c) in cs.iter_mut().enumerate() {
        let r = rot_of(c);
        c.turn = if j + 1 == d { Turn::Close(r) } else { Turn::Next(r) };
    }
    Ok(CurveSpec { crossings: cs, ..spec.clone() })
}

/// Negate the effective sign at the given crossings (as per-crossing overrides).
pub fn flip_crossing_signs(
    spec: &CurveSpec,
    signs: &LaminationSigns,
    which: &[usize],
) -> Result<CurveSpec> {
    let mut out = spec.clone();
    for &j in which {
        let s = spec.sign_at(j, signs)?;
        out.crossings[j].sign = Some(-s);
    }
    Ok(out)
}

/// Reflection paired with the sign flip of every crossing.
pub fn reflect_signed(spec: &CurveSpec, signs: &LaminationSigns) -> Result<CurveSpec> {
    let all: Vec<usize> = (0..spec.d()).collect();
    flip_crossing_signs(&reflect(spec)?, signs, &all)
}

/// Rotation paired with the sign flip of the moved crossing.
pub fn rotate_signed(spec: &CurveSpec, signs: &LaminationSigns) -> Result<CurveSpec> {
    let r = rotate(spec)?;
    // The moved crossing keeps its own override (if any) through rotate.
    let last = r.d() - 1;
    let mut out = r.clone();
    let s = spec.sign_at(0, signs)?;
    out.crossings[last].sign = Some(-s);
    Ok(out)
}

/// Drop overrides that agree with the lamination.
pub fn normalize_overrides(spec: &CurveSpec, signs: &LaminationSigns) -> CurveSpec {
    let mut out = spec.clone();
    for c in &mut out.crossings {
        if c.sign.is_some() && c.sign == signs.get(&c.arc).copied() {
            c.sign = None;
        }
    }
    out
}

/// Flip every lamination sign of the listed arcs.
pub fn flip_signs(signs: &LaminationSigns, arcs: &[Var]) -> LaminationSigns {
    let mut out = signs.clone();
    for a in arcs {
        if let Some(s) = out.get_mut(a) {
            *s = -*s;
        }
    }
    out
}

/// Everything a `.qcs` file can declare.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SpecFile {
    pub curves: Vec<CurveSpec>,
    pub signs: LaminationSigns,
    /// Boundary variables reported as 1.
    pub units: BTreeSet<Var>,
    pub identities: Vec<IdentitySpec>,
    pub mutations: Vec<MutationSpec>,
}

impl SpecFile {
    pub fn curve(&self, name: &str) -> Result<&CurveSpec> {
        self.curves
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::validation(format!("unknown curve {name}")))
    }
}

/// A whitespace token with its 1-based column.
#[derive(Clone, Debug)]
pub(crate) struct Tok<'a> {
    pub text: &'a str,
    pub col: usize,
}

pub(crate) fn tokenize(line: &str) -> Vec<Tok<'_>> {
    let body = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in body.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Tok { text: &body[s..i], col: s + 1 });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Tok { text: &body[s..], col: s + 1 });
    }
    out
}

pub(crate) fn perr(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col, msg: msg.into() }
}

pub(crate) fn parse_var(line: usize, t: &Tok) -> Result<Var> {
    Var::new(t.text).map_err(|_| perr(line, t.col, format!("malformed name {:?}", t.text)))
}

fn parse_sign(line: usize, t: &Tok, s: &str) -> Result<i8> {
    match s {
        "+1" | "1" => Ok(1),
        "-1" => Ok(-1),
        _ => Err(perr(line, t.col, format!("sign must be +1 or -1, got {s:?}"))),
    }
}

/// Parse a `.qcs` document.
pub fn parse_spec(text: &str) -> Result<SpecFile> {
    let lines: Vec<&str> = text.lines().collect();
    let mut file = SpecFile::default();
    let mut i = 0;
    while i < lines.len() {
        let ln = i + 1;
        let toks = tokenize(lines[i]);
        i += 1;
        let Some(head) = toks.first() else { continue };
        match head.text {
            "lamination" => {
                if toks.len() < 2 {
                    return Err(perr(ln, head.col, "lamination needs at least one entry"));
                }
                for t in &toks[1..] {
                    let (name, val) = t
                        .text
                        .split_once('=')
                        .ok_or_else(|| perr(ln, t.col, "expected <arc>=<+1|-1>"))?;
                    let v = Var::new(name).map_err(|_| perr(ln, t.col, "malformed arc name"))?;
                    let s = parse_sign(ln, t, val)?;
                    if file.signs.insert(v.clone(), s).is_some_and(|old| old != s) {
                        return Err(Error::validation_at(ln, format!("conflicting sign for {v}")));
                    }
                }
            }
            "unit" => {
                for t in &toks[1..] {
                    file.units.insert(parse_var(ln, t)?);
                }
            }
            "curve" => {
                let (curve, next) = parse_curve(&lines, i, ln, &toks)?;
                if file.curves.iter().any(|c| c.name == curve.name) {
                    return Err(Error::validation_at(ln, format!("duplicate curve {}", curve.name)));
                }
                file.curves.push(curve);
                i = next;
            }
            "identity" => {
                let (id, next) = skein::parse_identity_block(&lines, i, ln, &toks)?;
                file.identities.push(id);
                i = next;
            }
            "mutation" => file.mutations.push(skein::parse_mutation_line(ln, &toks)?),
            other => return Err(perr(ln, head.col, format!("unknown directive {other:?}"))),
        }
    }
    for c in &file.curves {
        c.validate(&file.signs)?;
    }
    skein::check_references(&file)?;
    Ok(file)
}

fn parse_curve(lines: &[&str], mut i: usize, ln0: usize, head: &[Tok]) -> Result<(CurveSpec, usize)> {
    if head.len() != 3 {
        return Err(perr(ln0, head[0].col, "expected: curve <name> kind=<arc|loop|onesided>"));
    }
    let name = head[1].text.to_string();
    if !crate::laurent::is_valid_name(&name) {
        return Err(perr(ln0, head[1].col, "malformed curve name"));
    }
    let kind = match head[2].text {
        "kind=arc" => Kind::Arc,
        "kind=loop" => Kind::Loop,
        "kind=onesided" => Kind::Onesided,
        _ => return Err(perr(ln0, head[2].col, "kind must be arc, loop or onesided")),
    };
    let mut spec = CurveSpec { name, kind, crossings: Vec::new(), initial: None, fin: None };
    loop {
        if i >= lines.len() {
            return Err(perr(ln0, 1, "curve block not terminated by end"));
        }
        let ln = i + 1;
        let toks = tokenize(lines[i]);
        i += 1;
        let Some(h) = toks.first() else { continue };
        match h.text {
            "end" => break,
            "initial" | "final" => {
                if toks.len() != 3 {
                    return Err(perr(ln, h.col, format!("{} takes two sides", h.text)));
                }
                let pair = (parse_var(ln, &toks[1])?, parse_var(ln, &toks[2])?);
                if h.text == "initial" {
                    spec.initial = Some(pair);
                } else {
                    spec.fin = Some(pair);
                }
            }
            "cross" => spec.crossings.push(parse_cross(ln, &toks, kind)?),
            other => return Err(perr(ln, h.col, format!("unexpected {other:?} inside curve"))),
        }
    }
    Ok((spec, i))
}

fn parse_cross(ln: usize, toks: &[Tok], kind: Kind) -> Result<Crossing> {
    let mut rest: Vec<&Tok> = toks[1..].iter().collect();
    let mut sign = None;
    if let Some(t) = rest.last() {
        if let Some(v) = t.text.strip_prefix("sign=") {
            sign = Some(parse_sign(ln, t, v)?);
            rest.pop();
        }
    }
    let arc_tok = rest.first().ok_or_else(|| perr(ln, toks[0].col, "cross needs an arc"))?;
    let arc = parse_var(ln, arc_tok)?;
    if rest.len() == 1 {
        return Ok(Crossing { arc, turn: Turn::End, third: None, sign });
    }
    if rest.len() != 3 {
        return Err(perr(ln, toks[0].col, "expected: cross <arc> <ccw|cw|close> <third> [sign=±1]"));
    }
    let t = rest[1];
    let turn = match t.text {
        "ccw" => Turn::Next(Rot::Ccw),
        "cw" => Turn::Next(Rot::Cw),
        "close" => Turn::Close(kind.default_close()),
        "close:ccw" => Turn::Close(Rot::Ccw),
        "close:cw" => Turn::Close(Rot::Cw),
        _ => return Err(perr(ln, t.col, format!("bad turn {:?}", t.text))),
    };
    Ok(Crossing { arc, turn, third: Some(parse_var(ln, rest[2])?), sign })
}

/// Render one curve block in canonical form.
pub fn render_curve(c: &CurveSpec) -> String {
    let mut s = format!("curve {} kind={}\n", c.name, c.kind.as_str());
    if let Some((a, b)) = &c.initial {
        let _ = writeln!(s, "  initial {a} {b}");
    }
    for x in &c.crossings {
        let turn = match x.turn {
            Turn::Next(r) => r.as_str().to_string(),
            Turn::Close(r) if r == c.kind.default_close() => "close".to_string(),
            Turn::Close(r) => format!("close:{}", r.as_str()),
            Turn::End => String::new(),
        };
        let _ = write!(s, "  cross {}", x.arc);
        if !turn.is_empty() {
            let _ = write!(s, " {turn} {}", x.third.as_ref().unwrap());
        }
        if let Some(sg) = x.sign {
            let _ = write!(s, " sign={}", if sg > 0 { "+1" } else { "-1" });
        }
        s.push('\n');
    }
    if let Some((w, z)) = &c.fin {
        let _ = writeln!(s, "  final {w} {z}");
    }
    s.push_str("end\n");
    s
}

/// Render a whole document in canonical form.
pub fn render_spec(f: &SpecFile) -> String {
    let mut s = String::new();
    if !f.signs.is_empty() {
        let entries: Vec<String> = f
            .signs
            .iter()
            .map(|(v, sg)| format!("{v}={}", if *sg > 0 { "+1" } else { "-1" }))
            .collect();
        let _ = writeln!(s, "lamination {}", entries.join(" "));
    }
    if !f.units.is_empty() {
        let names: Vec<String> = f.units.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(s, "unit {}", names.join(" "));
    }
    for c in &f.curves {
        s.push_str(&render_curve(c));
    }
    for id in &f.identities {
        s.push_str(&skein::render_identity(id));
    }
    for m in &f.mutations {
        s.push_str(&skein::render_mutation(m));
        s.push('\n');
    }
    s
}
