//! Command-line front end.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::curvespec::{parse_spec, CurveSpec, SpecFile};
use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::mat2::Mat2;
use crate::mpath::{chi, standard_mpath, step_matrix, Mode};
use crate::skein::{verify_identity, verify_mutation, Report};
use crate::snakeband::{build_graph, flip_graph, flip_graph_dot, graph_matrix_formula, weighted_matchings, enumerator_of};

#[derive(Parser, Debug)]
#[command(name = "qcs", version, about = "Laurent expansions of curves on triangulated surfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub verb: Verb,
}

#[derive(clap::Args, Debug, Clone)]
pub struct Common {
    /// Path to a .qcs file.
    pub input: PathBuf,
    /// Curve to operate on (default: every curve, or the only one).
    #[arg(long)]
    pub curve: Option<String>,
    #[arg(long, default_value = "standard")]
    pub mode: String,
    /// Emit JSON instead of text.
    #[arg(long)]
    pub json: bool,
    /// Worker threads for matching enumeration.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Subcommand, Debug)]
pub enum Verb {
    /// Print the Laurent expansion.
    Expand(Common),
    /// List (good) perfect matchings.
    Matchings {
        #[command(flatten)]
        common: Common,
        /// Print the flip graph in DOT format.
        #[arg(long)]
        dot: bool,
    },
    /// Print the standard M-path with step matrices.
    Mpath(Common),
    /// Cross-check the matching enumerator, tile formula and M-path.
    Verify(Common),
    /// Check the identities and mutation relations of a file.
    Skein(Common),
}

struct Outcome {
    text: String,
    ok: bool,
}

fn load(c: &Common) -> Result<SpecFile> {
    let txt = std::fs::read_to_string(&c.input)
        .map_err(|e| Error::Input(format!("{}: {e}", c.input.display())))?;
    parse_spec(&txt)
}

fn mode(c: &Common) -> Result<Mode> {
    c.mode.parse()
}

fn select<'a>(file: &'a SpecFile, c: &Common, single: bool) -> Result<Vec<&'a CurveSpec>> {
    match &c.curve {
        Some(n) => Ok(vec![file.curve(n)?]),
        None if single && file.curves.len() != 1 => {
            Err(Error::Input("this file has several curves; pick one with --curve".into()))
        }
        None => Ok(file.curves.iter().collect()),
    }
}

fn finish(file: &SpecFile, p: LaurentPoly) -> LaurentPoly {
    p.set_to_one(file.units.iter())
}

fn expand(c: &Common) -> Result<Outcome> {
    let file = load(c)?;
    let m = mode(c)?;
    let curves = select(&file, c, false)?;
    let mut vals = Vec::new();
    for cv in &curves {
        vals.push((cv.name.clone(), finish(&file, chi(cv, &file.signs, m)?)));
    }
    let text = if c.json {
        let obj: serde_json::Map<String, serde_json::Value> =
            vals.iter().map(|(n, p)| (n.clone(), json!(p.canonical_string()))).collect();
        json!({ "mode": m.as_str(), "expansions": obj }).to_string() + "\n"
    } else if c.curve.is_some() {
        format!("{}\n", vals[0].1)
    } else {
        vals.iter().map(|(n, p)| format!("{n} = {p}\n")).collect()
    };
    Ok(Outcome { text, ok: true })
}

fn matchings(c: &Common, dot: bool) -> Result<Outcome> {
    let file = load(c)?;
    let cv = select(&file, c, true)?[0];
    let g = build_graph(cv)?;
    let ms = weighted_matchings(&g, &file.signs, c.threads)?;
    let flips = flip_graph(&g, &ms);
    if dot {
        return Ok(Outcome { text: flip_graph_dot(&cv.name, &ms, &flips), ok: true });
    }
    let total = finish(&file, enumerator_of(&g, &ms)?);
    let text = if c.json {
        let rows: Vec<_> = ms
            .iter()
            .map(|m| {
                json!({
                    "edges": m.edges.iter().map(|&e| g.edges[e].label.as_str()).collect::<Vec<_>>(),
                    "x": m.weight.to_string(),
                    "y": m.coeff.as_ref().map(|y| y.to_string()),
                })
            })
            .collect();
        json!({
            "curve": cv.name,
            "closure": g.closure,
            "tiles": g.d(),
            "matchings": rows,
            "flips": flips,
            "enumerator": total.canonical_string(),
        })
        .to_string()
            + "\n"
    } else {
        let mut s = format!("{} ({:?}, {} tiles): {} matchings\n", cv.name, g.closure, g.d(), ms.len());
        for (i, m) in ms.iter().enumerate() {
            let labels: Vec<&str> = m.edges.iter().map(|&e| g.edges[e].label.as_str()).collect();
            let _ = writeln!(
                s,
                "  P{i}: edges [{}]  x(P) = {}  y(P) = {}",
                labels.join(" "),
                m.weight,
                m.coeff.as_ref().unwrap()
            );
        }
        let _ = writeln!(s, "enumerator = {total}");
        s
    };
    Ok(Outcome { text, ok: true })
}

fn mpath(c: &Common) -> Result<Outcome> {
    let file = load(c)?;
    let m = mode(c)?;
    let cv = select(&file, c, true)?[0];
    let steps = standard_mpath(cv, &file.signs, m == Mode::Sqrt)?;
    let mut acc = Mat2::identity();
    let mut rows = Vec::new();
    let mut s = String::new();
    for (i, st) in steps.iter().enumerate() {
        let sm = step_matrix(st);
        acc = sm.mul(&acc);
        if c.json {
            rows.push(json!({"step": st.to_string(), "matrix": sm.to_string(), "product": acc.to_string()}));
        } else {
            let _ = writeln!(s, "rho{}: {st}\n  M = {sm}\n  product = {acc}", i + 1);
        }
    }
    let value = finish(&file, chi(cv, &file.signs, m)?);
    let text = if c.json {
        json!({"curve": cv.name, "mode": m.as_str(), "steps": rows, "product": acc.to_string(), "chi": value.canonical_string()})
            .to_string()
            + "\n"
    } else {
        let _ = writeln!(s, "chi = {value}");
        s
    };
    Ok(Outcome { text, ok: true })
}

fn verify(c: &Common) -> Result<Outcome> {
    let file = load(c)?;
    let curves = select(&file, c, false)?;
    let mut ok = true;
    let mut s = String::new();
    let mut rows = Vec::new();
    for cv in curves {
        let g = build_graph(cv)?;
        let ms = weighted_matchings(&g, &file.signs, c.threads)?;
        let e = enumerator_of(&g, &ms)?;
        let f = graph_matrix_formula(&g, &file.signs)?;
        let p = chi(cv, &file.signs, Mode::Standard)?;
        let agree = e == f && f == p;
        ok &= agree;
        if c.json {
            rows.push(json!({"curve": cv.name, "agree": agree, "enumerator": e.canonical_string(),
                "formula": f.canonical_string(), "chi": p.canonical_string()}));
        } else if agree {
            let _ = writeln!(s, "{}: OK: methods agree", cv.name);
        } else {
            let _ = writeln!(s, "{}: MISMATCH\n  enumerator = {e}\n  formula = {f}\n  chi = {p}", cv.name);
        }
    }
    if c.json {
        s = json!({"ok": ok, "curves": rows}).to_string() + "\n";
    }
    Ok(Outcome { text: s, ok })
}

fn skein(c: &Common) -> Result<Outcome> {
    let file = load(c)?;
    let mut reports: Vec<Report> = Vec::new();
    for id in &file.identities {
        reports.push(verify_identity(id, &file)?);
    }
    for m in &file.mutations {
        reports.push(verify_mutation(m, &file)?);
    }
    if reports.is_empty() {
        return Err(Error::Input("no identities or mutations in file".into()));
    }
    let ok = reports.iter().all(|r| r.holds);
    let text = if c.json {
        serde_json::to_string(&json!({"ok": ok, "reports": reports})).unwrap() + "\n"
    } else {
        reports.iter().map(Report::render).collect()
    };
    Ok(Outcome { text, ok })
}

fn describe(e: &Error, c: Option<&Common>) -> String {
    match (e, c) {
        (Error::Parse { line, col, msg }, Some(c)) => format!("{}:{line}:{col}: {msg}", c.input.display()),
        (Error::Validation { line: Some(l), msg }, Some(c)) => format!("{}:{l}: {msg}", c.input.display()),
        _ => e.to_string(),
    }
}

/// Run with the given argv; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let mut out = std::io::stdout();
    let mut err = std::io::stderr();
    run_with(args, &mut out, &mut err)
}

/// Like [`run`] but writing to the given sinks.
pub fn run_with<I, T>(args: I, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    let (common, res) = match &cli.verb {
        Verb::Expand(c) => (c, expand(c)),
        Verb::Matchings { common, dot } => (common, matchings(common, *dot)),
        Verb::Mpath(c) => (c, mpath(c)),
        Verb::Verify(c) => (c, verify(c)),
        Verb::Skein(c) => (c, skein(c)),
    };
    match res {
        Ok(o) => {
            let _ = out.write_all(o.text.as_bytes());
            if o.ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {}", describe(&e, Some(common)));
            2
        }
    }
}
