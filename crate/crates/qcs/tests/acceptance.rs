//! One line per acceptance criterion; exits non-zero if any fails.

mod common;

use std::time::{Duration, Instant};

use common::{random_signs, random_spec};
use qcs::cli::run_with;
use qcs::curvespec::{parse_spec, reflect_signed, rotate_signed, Kind, SpecFile};
use qcs::mpath::{chi, mpath_matrix, path_matrix, Mode, Side, Step};
use qcs::skein::{verify_mutation, verify_square_relation};
use qcs::snakeband::{brute_force_matchings, build_graph, enumerate_matchings, graph_matrix_formula, matching_enumerator};
use qcs::{LaurentPoly, Mat2, Var};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn fixture_path(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn fixture(name: &str) -> SpecFile {
    parse_spec(&std::fs::read_to_string(fixture_path(name)).unwrap()).unwrap()
}

fn frac(num: &str, den: &str) -> LaurentPoly {
    LaurentPoly::parse(num).unwrap().div_unit(&LaurentPoly::parse(den).unwrap().as_monomial().unwrap()).unwrap()
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn mobius_poly() -> LaurentPoly {
    frac(
        "c*w*x*z*y_w*y_x*y_y + b*w^2*y*y_w*y_x*y_z + b*c*d*w*y_w*y_x + a*w*y^2*y_w*y_z + a*c*d*y*y_w + d*x*y*z",
        "w*x*y*z",
    )
}

fn annulus() -> Outcome {
    let want = frac(
        "y_x2*x1^2*x2*x4 + y_x2*y_x3*x1^2 + y_x3*x1*x3 + y_x2*y_x3*y_x4*x1*x3 + y_x3*y_x4*x3^2 + y_x1*y_x3*y_x4*x2*x3^2*x4",
        "x1*x2*x3*x4",
    );
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_with(["qcs", "expand", &fixture_path("annulus.qcs"), "--curve=gamma"], &mut out, &mut err);
    ensure(code == 0, String::from_utf8_lossy(&err).to_string())?;
    let printed = String::from_utf8(out).unwrap();
    ensure(printed.trim_end() == want.canonical_string(), format!("expand printed {printed}"))?;
    let f = fixture("annulus.qcs");
    let g = f.curve("gamma").unwrap();
    let graph = build_graph(g).map_err(|e| e.to_string())?;
    let u = |p: LaurentPoly| p.set_to_one(f.units.iter());
    let e = u(matching_enumerator(&graph, &f.signs).unwrap());
    let m = u(graph_matrix_formula(&graph, &f.signs).unwrap());
    let c = u(chi(g, &f.signs, Mode::Standard).unwrap());
    ensure(e == want && m == want && c == want, "methods disagree with the expected expansion")?;
    Ok("canonical output identical; enumerator = formula = chi".into())
}

fn mobius() -> Outcome {
    let f = fixture("mobius4.qcs");
    let a = f.curve("alpha").unwrap();
    let c = chi(a, &f.signs, Mode::Standard).map_err(|e| e.to_string())?;
    ensure(c == mobius_poly(), format!("chi = {c}"))?;
    let g = build_graph(a).unwrap();
    let n = enumerate_matchings(&g).len();
    ensure(n == 6, format!("{n} good matchings"))?;
    ensure(matching_enumerator(&g, &f.signs).unwrap() == c, "enumerator differs")?;
    Ok("chi exact; 6 good matchings; enumerator = chi".into())
}

fn reflection() -> Outcome {
    let f = fixture("mobius4.qcs");
    let r = reflect_signed(f.curve("alpha").unwrap(), &f.signs).map_err(|e| e.to_string())?;
    let c = chi(&r, &f.signs, Mode::Standard).map_err(|e| e.to_string())?;
    ensure(c == mobius_poly(), format!("chi(reflect) = {c}"))?;
    Ok("chi(reflect(alpha)) with flipped signs equals chi(alpha)".into())
}

fn rotation() -> Outcome {
    let f = fixture("mobius4.qcs");
    let beta = rotate_signed(f.curve("alpha").unwrap(), &f.signs).map_err(|e| e.to_string())?;
    let m = mpath_matrix(&beta, &f.signs, Mode::Standard).map_err(|e| e.to_string())?;
    let want = Mat2::new(
        frac("d", "w"),
        frac("w*x*z*y_w*y_x*y_y + b*d*w*y_w*y_x + a*d*y*y_w", "x*y"),
        frac("w*y*y_z + c*d", "w^2*z"),
        frac("c*w*x*z*y_w*y_x*y_y + b*w^2*y*y_w*y_x*y_z + b*c*d*w*y_w*y_x + a*w*y^2*y_w*y_z + a*c*d*y*y_w", "w*x*y*z"),
    );
    ensure(m == want, format!("M(rho_beta) = {m}"))?;
    ensure(m.trace() == mobius_poly(), "trace differs")?;
    Ok("all four entries match; trace = chi(alpha)".into())
}

fn square() -> Outcome {
    let f = fixture("mobius4.qcs");
    let a = f.curve("alpha").unwrap();
    for mode in [Mode::Sqrt, Mode::Y1] {
        let r = verify_square_relation(a, &f.signs, mode).map_err(|e| e.to_string())?;
        ensure(r.holds, r.render())?;
    }
    Ok("holds in sqrt and y=1 modes (path and band graph for alpha^2 agree)".into())
}

fn mutations() -> Outcome {
    let mut n = 0;
    for (file, case) in [("quadrilateral.qcs", 1), ("crosscap_annulus.qcs", 3), ("m2.qcs", 4)] {
        let f = fixture(file);
        let m = f.mutations.iter().find(|m| m.case == case).ok_or(format!("{file}: no case {case}"))?;
        let r = verify_mutation(m, &f).map_err(|e| e.to_string())?;
        ensure(r.holds, r.render())?;
        if case == 4 {
            ensure(r.checks.len() == 5, "case 4 sub-identities missing")?;
        }
        n += r.checks.len();
    }
    Ok(format!("cases 1, 3, 4 hold ({n} relations including sub-identities)"))
}

fn properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let kinds = [Kind::Arc, Kind::Loop, Kind::Onesided];
    let mut corpus = 0;
    for i in 0..240 {
        let kind = kinds[i % 3];
        let d = 1 + (i / 3) % 8;
        let spec = random_spec(&mut rng, kind, d);
        let signs = random_signs(&mut rng);
        let g = build_graph(&spec).map_err(|e| e.to_string())?;
        let mut dp: Vec<Vec<usize>> = enumerate_matchings(&g).into_iter().map(|m| m.edges).collect();
        let mut bf = brute_force_matchings(&g);
        dp.sort();
        bf.sort();
        ensure(dp == bf, format!("oracle mismatch on corpus item {i}"))?;
        let e = matching_enumerator(&g, &signs).map_err(|e| e.to_string())?;
        let c = chi(&spec, &signs, Mode::Standard).map_err(|e| e.to_string())?;
        ensure(e == c, format!("chi != enumerator on corpus item {i}"))?;
        ensure(c.all_positive(), format!("non-positive coefficient on corpus item {i}"))?;
        corpus += 1;
    }
    let mut one_sided = 0;
    for i in 0..120 {
        let spec = random_spec(&mut rng, Kind::Onesided, 1 + i % 6);
        let signs = random_signs(&mut rng);
        let base = chi(&spec, &signs, Mode::Standard).map_err(|e| e.to_string())?;
        let r = chi(&rotate_signed(&spec, &signs).unwrap(), &signs, Mode::Standard).map_err(|e| e.to_string())?;
        let f = chi(&reflect_signed(&spec, &signs).unwrap(), &signs, Mode::Standard).map_err(|e| e.to_string())?;
        ensure(r == base && f == base, format!("invariance fails on one-sided item {i}"))?;
        one_sided += 1;
    }
    let names: Vec<Var> = ["p", "q", "r", "s"].iter().map(|n| Var::new(n).unwrap()).collect();
    let random_product = |rng: &mut ChaCha8Rng| -> Mat2 {
        let len = rng.gen_range(1..7);
        let steps: Vec<Step> = (0..len)
            .map(|_| {
                let v = &names[rng.gen_range(0..4)];
                let u = &names[rng.gen_range(0..4)];
                let side = if rng.gen() { Side::Right } else { Side::Left };
                let rot = if rng.gen() { qcs::curvespec::Rot::Cw } else { qcs::curvespec::Rot::Ccw };
                match rng.gen_range(0..4) {
                    0 => Step::type1(v, u, v, rot),
                    1 => Step::type2(v, rot, if rng.gen() { 1 } else { -1 }, true),
                    2 => Step::type3(v, side),
                    _ => Step::type3_prime(v, side),
                }
            })
            .collect();
        path_matrix(&steps)
    };
    let mut products = 0;
    for _ in 0..500 {
        let a = random_product(&mut rng);
        let b = random_product(&mut rng);
        ensure(a.mul(&b).trace() == b.mul(&a).trace(), "cyclic trace fails")?;
        let rhs = &a.mul(&b).trace() + &(&b.det() * &a.mul(&b.inverse().unwrap()).trace());
        ensure(&a.trace() * &b.trace() == rhs, "trace identity fails")?;
        products += 1;
    }
    Ok(format!(
        "{corpus} specs (oracle, agreement, positivity), {one_sided} one-sided (rotation/reflection), {products} trace pairs"
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 7] = [
        ("1 annulus expansion", annulus, Duration::from_secs(1)),
        ("2 Moebius M4 alpha", mobius, Duration::from_secs(1)),
        ("3 reflection", reflection, Duration::from_secs(1)),
        ("4 rotation matrix", rotation, Duration::from_secs(1)),
        ("5 square relation", square, Duration::from_secs(5)),
        ("6 mutation relations", mutations, Duration::from_secs(5)),
        ("7 property suites", properties, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (name, f, budget) in criteria {
        let t = Instant::now();
        let res = f();
        let dt = t.elapsed();
        let res = match res {
            Ok(m) if dt > budget => Err(format!("{m}; over budget {budget:?}")),
            r => r,
        };
        match res {
            Ok(m) => println!("PASS [{name}] {m} ({:.3}s)", dt.as_secs_f64()),
            Err(m) => {
                failed += 1;
                println!("FAIL [{name}] {m} ({:.3}s)", dt.as_secs_f64());
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 7 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
