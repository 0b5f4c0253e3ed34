//! Snake and band graphs, their (good) perfect matchings, and the two
//! enumerator formulas (matching sum and tile-matrix product).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::curvespec::{self, CurveSpec, Kind, LaminationSigns, Rot};
use crate::error::{Error, Result};
use crate::laurent::{Exps, LaurentPoly, Monomial, Var};
use crate::mat2::Mat2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Closure {
    Open,
    BandTwoSided,
    BandOneSided,
}

/// Where tile j+1 sits relative to tile j.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Shape {
    NorthPointing,
    EastPointing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Side {
    N,
    E,
    S,
    W,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orient {
    Up,
    Down,
}

#[derive(Clone, Debug, Serialize)]
pub struct Tile {
    /// 1-based.
    pub index: usize,
    pub diagonal: Var,
    /// Labels in N, E, S, W order.
    pub labels: [Var; 4],
    pub shape_out: Option<Shape>,
    /// Lower-left corner in the grid embedding.
    pub origin: (i64, i64),
    #[serde(skip)]
    sign_override: Option<i8>,
}

impl Tile {
    pub fn label(&self, s: Side) -> &Var {
        &self.labels[s as usize]
    }

    fn corners(&self) -> [(i64, i64); 4] {
        let (x, y) = self.origin;
        // SW, SE, NW, NE
        [(x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1)]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub label: Var,
    /// First tile (1-based) whose boundary contains the edge.
    pub tile: usize,
    pub side: Side,
}

/// Identification data of a band graph.
#[derive(Clone, Debug, Serialize)]
pub struct Glue {
    /// Edge `a` on tile 1 and its copy `a'` on tile d.
    pub edge: usize,
    pub edge_prime: usize,
    /// Endpoint pairs (x, x') and (y, y').
    pub x: (usize, usize),
    pub y: (usize, usize),
    pub orientation_reversing: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TiledGraph {
    pub closure: Closure,
    pub tiles: Vec<Tile>,
    pub vertices: Vec<(i64, i64)>,
    pub edges: Vec<Edge>,
    pub glue: Option<Glue>,
    /// Lamination signs enter negated (one-sided curves built from their mirror image).
    pub negated: bool,
    #[serde(skip)]
    turns: Vec<Rot>,
    #[serde(skip)]
    ends: Ends,
    /// Edges of tile 1 on its S and W sides and of tile d in the w and z positions.
    #[serde(skip)]
    corner_edges: [usize; 4],
}

#[derive(Clone, Debug, Default)]
struct Ends {
    a: Option<Var>,
    b: Option<Var>,
    w: Option<Var>,
    z: Option<Var>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Matching {
    /// Edge ids of the (cut) graph, sorted.
    pub edges: Vec<usize>,
    pub weight: Monomial,
    pub orientations: Vec<Option<Orient>>,
    pub coeff: Option<Monomial>,
}

impl Matching {
    pub fn term(&self) -> Monomial {
        match &self.coeff {
            Some(c) => self.weight.mul(c),
            None => self.weight.clone(),
        }
    }
}

fn dir_of(j: usize, rot: Rot) -> Shape {
    // j is 1-based; first-type tile matrices belong to CCW turns and the
    // grid direction alternates with parity.
    let first = rot == Rot::Ccw;
    if first ^ (j % 2 == 0) {
        Shape::NorthPointing
    } else {
        Shape::EastPointing
    }
}

/// Build the snake graph (arcs) or the cut band graph (closed curves).
pub fn build_graph(spec: &CurveSpec) -> Result<TiledGraph> {
    let mut nf = spec.clone();
    let mut negated = false;
    if spec.kind == Kind::Onesided && spec.close_rot() == Some(Rot::Cw) {
        nf = curvespec::reflect(spec)?;
        negated = true;
    } else if spec.kind == Kind::Loop && spec.close_rot() == Some(Rot::Ccw) {
        nf = curvespec::rebase_loop(spec)?;
    }
    let d = nf.d();
    if d == 0 {
        return Err(Error::validation("empty crossing list"));
    }
    let arcs = nf.arcs();
    let trans = nf.transitions();
    let turns: Vec<Rot> = trans.iter().map(|t| t.rot).collect();
    let closure = match nf.kind {
        Kind::Arc => Closure::Open,
        Kind::Loop => Closure::BandTwoSided,
        Kind::Onesided => Closure::BandOneSided,
    };
    let ends = match nf.kind {
        Kind::Arc => {
            let (a, b) = nf.initial.clone().ok_or_else(|| Error::validation("missing initial"))?;
            let (w, z) = nf.fin.clone().ok_or_else(|| Error::validation("missing final"))?;
            Ends { a: Some(a), b: Some(b), w: Some(w), z: Some(z) }
        }
        Kind::Loop => {
            let a = nf.closing().unwrap().third;
            Ends { a: Some(a.clone()), b: Some(arcs[d - 1].clone()), w: Some(arcs[0].clone()), z: Some(a) }
        }
        Kind::Onesided => {
            let a = nf.closing().unwrap().third;
            Ends { a: Some(a.clone()), b: Some(arcs[d - 1].clone()), w: Some(a), z: Some(arcs[0].clone()) }
        }
    };

    let mut tiles: Vec<Tile> = Vec::with_capacity(d);
    let mut origin = (0i64, 0i64);
    for j in 0..d {
        let (south, west) = if j == 0 {
            (ends.a.clone().unwrap(), ends.b.clone().unwrap())
        } else {
            let prev = &trans[j - 1];
            match dir_of(j, prev.rot) {
                Shape::NorthPointing => (prev.third.clone(), arcs[j - 1].clone()),
                Shape::EastPointing => (arcs[j - 1].clone(), prev.third.clone()),
            }
        };
        let (north, east, shape_out) = if j + 1 < d {
            let t = &trans[j];
            let s = dir_of(j + 1, t.rot);
            match s {
                Shape::NorthPointing => (t.third.clone(), arcs[j + 1].clone(), Some(s)),
                Shape::EastPointing => (arcs[j + 1].clone(), t.third.clone(), Some(s)),
            }
        } else {
            let (w, z) = (ends.w.clone().unwrap(), ends.z.clone().unwrap());
            if d % 2 == 1 {
                (w, z, None)
            } else {
                (z, w, None)
            }
        };
        if j > 0 {
            origin = match tiles[j - 1].shape_out.unwrap() {
                Shape::NorthPointing => (origin.0, origin.1 + 1),
                Shape::EastPointing => (origin.0 + 1, origin.1),
            };
        }
        tiles.push(Tile {
            index: j + 1,
            diagonal: arcs[j].clone(),
            labels: [north, east, south, west],
            shape_out,
            origin,
            sign_override: nf.crossings[j].sign,
        });
    }

    // Vertices and edges in the grid embedding.
    let mut vid: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    let mut vertices = Vec::new();
    let mut vertex = |p: (i64, i64), vertices: &mut Vec<(i64, i64)>| -> usize {
        *vid.entry(p).or_insert_with(|| {
            vertices.push(p);
            vertices.len() - 1
        })
    };
    let mut edges: Vec<Edge> = Vec::new();
    let mut seen: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut tile_edge = vec![[0usize; 4]; d];
    for (j, t) in tiles.iter().enumerate() {
        let [sw, se, nw, ne] = t.corners();
        let (sw, se, nw, ne) = (
            vertex(sw, &mut vertices),
            vertex(se, &mut vertices),
            vertex(nw, &mut vertices),
            vertex(ne, &mut vertices),
        );
        // Order matters for the DP: S, W first so shared edges are known.
        for (side, (p, q)) in
            [(Side::S, (sw, se)), (Side::W, (sw, nw)), (Side::N, (nw, ne)), (Side::E, (se, ne))]
        {
            let key = (p.min(q), p.max(q));
            let id = *seen.entry(key).or_insert_with(|| {
                edges.push(Edge { u: key.0, v: key.1, label: t.label(side).clone(), tile: j + 1, side });
                edges.len() - 1
            });
            if edges[id].label != *t.label(side) {
                return Err(Error::validation(format!(
                    "tiles {} and {} disagree on a shared edge label",
                    edges[id].tile,
                    j + 1
                )));
            }
            tile_edge[j][side as usize] = id;
        }
    }
    let last_w_side = if d % 2 == 1 { Side::N } else { Side::E };
    let last_z_side = if d % 2 == 1 { Side::E } else { Side::N };
    let corner_edges = [
        tile_edge[0][Side::S as usize],
        tile_edge[0][Side::W as usize],
        tile_edge[d - 1][last_w_side as usize],
        tile_edge[d - 1][last_z_side as usize],
    ];
    let glue = match closure {
        Closure::Open => None,
        _ => {
            let e = corner_edges[0];
            let ep = if closure == Closure::BandTwoSided { corner_edges[3] } else { corner_edges[2] };
            let (x, y) = (edges[e].u, edges[e].v);
            let (xp, yp) = (edges[ep].u, edges[ep].v);
            let rev = closure == Closure::BandOneSided;
            Some(Glue {
                edge: e,
                edge_prime: ep,
                x: (x, if rev { yp } else { xp }),
                y: (y, if rev { xp } else { yp }),
                orientation_reversing: rev,
            })
        }
    };
    Ok(TiledGraph { closure, tiles, vertices, edges, glue, negated, turns, ends, corner_edges })
}

impl TiledGraph {
    pub fn d(&self) -> usize {
        self.tiles.len()
    }

    pub fn shapes(&self) -> Vec<Shape> {
        self.tiles.iter().filter_map(|t| t.shape_out).collect()
    }

    /// Effective sign of tile `j` (0-based).
    pub fn tile_sign(&self, j: usize, signs: &LaminationSigns) -> Result<i8> {
        let t = &self.tiles[j];
        let s = match t.sign_override {
            Some(s) => s,
            None => *signs
                .get(&t.diagonal)
                .ok_or_else(|| Error::validation(format!("arc {} has no lamination sign", t.diagonal)))?,
        };
        Ok(if self.negated { -s } else { s })
    }

    /// Crossing monomial: product of the diagonal labels.
    pub fn cross_monomial(&self) -> Monomial {
        Monomial::unit(Exps::from_doubled(self.tiles.iter().map(|t| (t.diagonal.clone(), 2))))
    }

    fn incident(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.vertices.len()];
        for (i, e) in self.edges.iter().enumerate() {
            inc[e.u].push(i);
            inc[e.v].push(i);
        }
        inc
    }

    /// Good-matching condition on a perfect matching of the cut graph.
    pub fn is_good(&self, edges: &[usize]) -> bool {
        let has = |e: usize| edges.contains(&e);
        let [ea, _, ew, ez] = self.corner_edges;
        match self.closure {
            Closure::Open => true,
            Closure::BandTwoSided => has(ea) || has(ez),
            Closure::BandOneSided => has(ea) || has(ew),
        }
    }

    /// Matching edges after identifying the glue (one glue copy removed).
    pub fn descend(&self, edges: &[usize]) -> Vec<usize> {
        let Some(g) = &self.glue else { return edges.to_vec() };
        let has_a = edges.contains(&g.edge);
        let has_ap = edges.contains(&g.edge_prime);
        let drop = if has_a && !has_ap { g.edge } else { g.edge_prime };
        edges.iter().copied().filter(|&e| e != drop).collect()
    }

    /// Map an edge id to its identified id.
    fn identified(&self, e: usize) -> usize {
        match &self.glue {
            Some(g) if e == g.edge_prime => g.edge,
            _ => e,
        }
    }

    pub fn weight_monomial(&self, edges: &[usize]) -> Monomial {
        let kept = self.descend(edges);
        Monomial::unit(Exps::from_doubled(kept.iter().map(|&e| (self.edges[e].label.clone(), 2))))
    }

    /// Orientation of each diagonal along the alternating path from the SW
    /// corner of tile 1 to the NE corner of tile d.
    pub fn induced_orientations(&self, edges: &[usize]) -> Vec<Option<Orient>> {
        let mut partner = vec![usize::MAX; self.vertices.len()];
        for &e in edges {
            let ed = &self.edges[e];
            partner[ed.u] = ed.v;
            partner[ed.v] = ed.u;
        }
        let pos: BTreeMap<(i64, i64), usize> =
            self.vertices.iter().enumerate().map(|(i, p)| (*p, i)).collect();
        // Diagonal endpoint lookup: vertex -> (tile, is_north_end).
        let mut diag: BTreeMap<usize, (usize, bool)> = BTreeMap::new();
        for (j, t) in self.tiles.iter().enumerate() {
            let [_, se, nw, _] = t.corners();
            diag.insert(pos[&nw], (j, true));
            diag.insert(pos[&se], (j, false));
        }
        let start = pos[&self.tiles[0].corners()[0]];
        let end = pos[&self.tiles[self.d() - 1].corners()[3]];
        let mut out = vec![None; self.d()];
        let mut v = start;
        for _ in 0..=self.vertices.len() {
            let u = partner[v];
            if u == usize::MAX || u == end {
                break;
            }
            let Some(&(j, north)) = diag.get(&u) else { break };
            out[j] = Some(if north { Orient::Down } else { Orient::Up });
            let [_, se, nw, _] = self.tiles[j].corners();
            v = if north { pos[&se] } else { pos[&nw] };
        }
        out
    }

    pub fn coefficient_monomial(
        &self,
        orientations: &[Option<Orient>],
        signs: &LaminationSigns,
    ) -> Result<Monomial> {
        let mut ys = Vec::new();
        for (j, o) in orientations.iter().enumerate() {
            let Some(o) = o else { continue };
            let s = self.tile_sign(j, signs)?;
            let odd = (j + 1) % 2 == 1;
            let oriented = match (odd, s > 0, o) {
                (true, true, Orient::Down) | (true, false, Orient::Up) => true,
                (false, true, Orient::Up) | (false, false, Orient::Down) => true,
                _ => false,
            };
            if oriented {
                ys.push((Var::coefficient_of(&self.tiles[j].diagonal), 2));
            }
        }
        Ok(Monomial::unit(Exps::from_doubled(ys)))
    }

    fn make_matching(&self, edges: Vec<usize>) -> Matching {
        let weight = self.weight_monomial(&edges);
        let orientations = self.induced_orientations(&edges);
        Matching { edges, weight, orientations, coeff: None }
    }

    /// Boundary of tile `j` (0-based) in the identified graph.
    fn tile_boundary(&self, j: usize) -> BTreeSet<usize> {
        let t = &self.tiles[j];
        let [sw, se, nw, ne] = t.corners();
        let pos: BTreeMap<(i64, i64), usize> =
            self.vertices.iter().enumerate().map(|(i, p)| (*p, i)).collect();
        let pairs = [(sw, se), (sw, nw), (nw, ne), (se, ne)];
        pairs
            .iter()
            .map(|(p, q)| {
                let (a, b) = (pos[p], pos[q]);
                let e = self
                    .edges
                    .iter()
                    .position(|e| (e.u, e.v) == (a.min(b), a.max(b)))
                    .expect("tile edge present");
                self.identified(e)
            })
            .collect()
    }
}

/// Perfect matchings of the cut graph by a tile-by-tile transfer DP.
fn dp_perfect_matchings(g: &TiledGraph) -> Vec<Vec<usize>> {
    let inc = g.incident();
    let last_tile: Vec<usize> =
        inc.iter().map(|es| es.iter().map(|&e| g.edges[e].tile).max().unwrap_or(0)).collect();
    let mut by_tile: Vec<Vec<usize>> = vec![Vec::new(); g.d() + 1];
    for (i, e) in g.edges.iter().enumerate() {
        by_tile[e.tile].push(i);
    }
    // state: covered vertices that still have edges in later tiles
    let mut states: BTreeMap<Vec<usize>, Vec<Vec<usize>>> = BTreeMap::new();
    states.insert(Vec::new(), vec![Vec::new()]);
    for tile in 1..=g.d() {
        let new_edges = &by_tile[tile];
        let mut next: BTreeMap<Vec<usize>, Vec<Vec<usize>>> = BTreeMap::new();
        for (covered, partials) in &states {
            for mask in 0u32..(1 << new_edges.len()) {
                let mut cov: BTreeSet<usize> = covered.iter().copied().collect();
                let mut chosen = Vec::new();
                let mut ok = true;
                for (k, &e) in new_edges.iter().enumerate() {
                    if mask & (1 << k) != 0 {
                        let ed = &g.edges[e];
                        if !cov.insert(ed.u) || !cov.insert(ed.v) {
                            ok = false;
                            break;
                        }
                        chosen.push(e);
                    }
                }
                if !ok {
                    continue;
                }
                // Vertices retiring at this tile must be covered.
                let retiring_uncovered = (0..g.vertices.len())
                    .any(|v| last_tile[v] == tile && !cov.contains(&v));
                if retiring_uncovered {
                    continue;
                }
                let state: Vec<usize> = cov.into_iter().filter(|&v| last_tile[v] > tile).collect();
                let entry = next.entry(state).or_default();
                for p in partials {
                    let mut q = p.clone();
                    q.extend_from_slice(&chosen);
                    entry.push(q);
                }
            }
        }
        states = next;
    }
    let mut out: Vec<Vec<usize>> = states.into_values().flatten().collect();
    for m in &mut out {
        m.sort_unstable();
    }
    out
}

/// Test oracle: exhaustive search over edge subsets (include/exclude per
/// edge, pruned when a vertex is doubly covered or can no longer be covered).
pub fn brute_force_matchings(g: &TiledGraph) -> Vec<Vec<usize>> {
    fn rec(
        g: &TiledGraph,
        inc: &[Vec<usize>],
        i: usize,
        cov: &mut Vec<bool>,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if i == g.edges.len() {
            if cov.iter().all(|&c| c) {
                out.push(cur.clone());
            }
            return;
        }
        let e = &g.edges[i];
        // A vertex whose incident edges are all decided must be covered.
        let dead = |v: usize, cov: &Vec<bool>| !cov[v] && inc[v].iter().all(|&f| f <= i);
        if !cov[e.u] && !cov[e.v] {
            cov[e.u] = true;
            cov[e.v] = true;
            cur.push(i);
            rec(g, inc, i + 1, cov, cur, out);
            cur.pop();
            cov[e.u] = false;
            cov[e.v] = false;
        }
        if !dead(e.u, cov) && !dead(e.v, cov) {
            rec(g, inc, i + 1, cov, cur, out);
        }
    }
    let inc = g.incident();
    let mut out = Vec::new();
    rec(g, &inc, 0, &mut vec![false; g.vertices.len()], &mut Vec::new(), &mut out);
    out.retain(|m| g.is_good(m));
    out
}

/// All perfect matchings (open) or good matchings (bands), canonically ordered.
pub fn enumerate_matchings(g: &TiledGraph) -> Vec<Matching> {
    let raw: Vec<Vec<usize>> = dp_perfect_matchings(g).into_iter().filter(|m| g.is_good(m)).collect();
    let mut ms: Vec<Matching> = raw.into_iter().map(|m| g.make_matching(m)).collect();
    canonical_sort(&mut ms);
    ms
}

fn canonical_sort(ms: &mut [Matching]) {
    let Some(reference) = ms.first().map(|m| m.orientations.clone()) else { return };
    let key = |m: &Matching| -> Vec<bool> {
        m.orientations.iter().zip(&reference).map(|(a, b)| a != b).collect()
    };
    ms.sort_by(|a, b| key(a).cmp(&key(b)).then_with(|| a.edges.cmp(&b.edges)));
}

/// Matchings with coefficient monomials filled in; `threads > 1` computes
/// the per-matching data in parallel without changing the order.
pub fn weighted_matchings(
    g: &TiledGraph,
    signs: &LaminationSigns,
    threads: usize,
) -> Result<Vec<Matching>> {
    let ms = enumerate_matchings(g);
    let fill = |m: &Matching| -> Result<Matching> {
        let mut m = m.clone();
        m.coeff = Some(g.coefficient_monomial(&m.orientations, signs)?);
        Ok(m)
    };
    if threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Input(e.to_string()))?;
        pool.install(|| ms.par_iter().map(fill).collect())
    } else {
        ms.iter().map(fill).collect()
    }
}

/// Sum of x(P) y(P) over (good) matchings divided by the crossing monomial.
pub fn matching_enumerator(g: &TiledGraph, signs: &LaminationSigns) -> Result<LaurentPoly> {
    enumerator_of(g, &weighted_matchings(g, signs, 1)?)
}

pub fn enumerator_of(g: &TiledGraph, ms: &[Matching]) -> Result<LaurentPoly> {
    let sum = LaurentPoly::from_terms(ms.iter().map(|m| {
        let t = m.term();
        (t.exps, t.coeff)
    }));
    sum.div_unit(&g.cross_monomial())
}

fn xv(v: &Var) -> LaurentPoly {
    LaurentPoly::var_of(v)
}

fn yv(v: &Var) -> LaurentPoly {
    LaurentPoly::var_of(&Var::coefficient_of(v))
}

fn inv(v: &Var) -> LaurentPoly {
    LaurentPoly::from_monomial(Exps::from_doubled([(v.clone(), -2)]))
}

/// Tile matrix m_j for 1 <= j <= d-1 (1-based), given whether it is of the
/// first type and the sign at i_j.
pub fn tile_matrix(first_type: bool, sign: i8, ij: &Var, ij1: &Var, aj: &Var) -> Mat2 {
    let y = yv(ij);
    let one = LaurentPoly::one;
    let zero = LaurentPoly::zero;
    let frac = &(&xv(aj) * &inv(ij)) * &inv(ij1);
    match (first_type, sign > 0) {
        (true, true) => Mat2::new(one(), zero(), frac, y),
        (true, false) => Mat2::new(y.clone(), zero(), &frac * &y, one()),
        (false, true) => Mat2::new(
            &xv(ij1) * &inv(ij),
            &xv(aj) * &y,
            zero(),
            &(&xv(ij) * &y) * &inv(ij1),
        ),
        (false, false) => Mat2::new(&(&xv(ij1) * &y) * &inv(ij), xv(aj), zero(), &xv(ij) * &inv(ij1)),
    }
}

impl TiledGraph {
    /// M_d = m_{d-1} ... m_1.
    pub fn tile_product(&self, signs: &LaminationSigns) -> Result<Mat2> {
        let mut m = Mat2::identity();
        for j in 0..self.d().saturating_sub(1) {
            let t = &self.tiles[j];
            let aj = match t.shape_out.unwrap() {
                Shape::NorthPointing => t.label(Side::N),
                Shape::EastPointing => t.label(Side::E),
            };
            let mj = tile_matrix(
                self.turns[j] == Rot::Ccw,
                self.tile_sign(j, signs)?,
                &t.diagonal,
                &self.tiles[j + 1].diagonal,
                aj,
            );
            m = mj.mul(&m);
        }
        Ok(m)
    }
}

/// Enumerator computed from boundary matrices around M_d.
pub fn graph_matrix_formula(g: &TiledGraph, signs: &LaminationSigns) -> Result<LaurentPoly> {
    let d = g.d();
    let md = g.tile_product(signs)?;
    let i1 = &g.tiles[0].diagonal;
    let id = &g.tiles[d - 1].diagonal;
    let sd = g.tile_sign(d - 1, signs)?;
    let yd = yv(id);
    let zero = LaurentPoly::zero();
    let a = g.ends.a.as_ref().unwrap();
    match g.closure {
        Closure::Open => {
            let (b, w, z) = (g.ends.b.as_ref().unwrap(), g.ends.w.as_ref().unwrap(), g.ends.z.as_ref().unwrap());
            let r = Mat2::new(zero.clone(), xv(a), -inv(a), &xv(b) * &inv(i1));
            let l = if sd > 0 {
                Mat2::new(&xv(w) * &inv(id), &xv(z) * &yd, -inv(z), zero)
            } else {
                Mat2::new(&(&xv(w) * &yd) * &inv(id), xv(z), -(&yd * &inv(z)), zero)
            };
            Ok(l.mul(&md).mul(&r).upper_right())
        }
        Closure::BandTwoSided => {
            let f = tile_matrix(false, sd, id, i1, a);
            Ok(f.mul(&md).trace())
        }
        Closure::BandOneSided => {
            let j = Mat2::new(zero.clone(), xv(i1), inv(i1), zero);
            let f = j.mul(&tile_matrix(true, sd, id, i1, a));
            Ok(f.mul(&md).trace())
        }
    }
}

/// Pairs of matchings related by flipping a single tile, as (i, j, tile).
pub fn flip_graph(g: &TiledGraph, ms: &[Matching]) -> Vec<(usize, usize, usize)> {
    let sets: Vec<BTreeSet<usize>> = ms
        .iter()
        .map(|m| g.descend(&m.edges).into_iter().map(|e| g.identified(e)).collect())
        .collect();
    let bounds: Vec<BTreeSet<usize>> = (0..g.d()).map(|j| g.tile_boundary(j)).collect();
    let mut out = Vec::new();
    for i in 0..ms.len() {
        for k in i + 1..ms.len() {
            let diff: BTreeSet<usize> = sets[i].symmetric_difference(&sets[k]).copied().collect();
            if let Some(t) = bounds.iter().position(|b| *b == diff) {
                out.push((i, k, t + 1));
            }
        }
    }
    out
}

/// Graphviz rendering of the flip graph.
pub fn flip_graph_dot(name: &str, ms: &[Matching], edges: &[(usize, usize, usize)]) -> String {
    let mut s = format!("graph \"{name}\" {{\n");
    for (i, m) in ms.iter().enumerate() {
        let _ = writeln!(s, "  m{i} [label=\"{}\"];", m.term());
    }
    for (i, k, t) in edges {
        let _ = writeln!(s, "  m{i} -- m{k} [label=\"{t}\"];");
    }
    s.push_str("}\n");
    s
}

/// Number of matchings as a big integer (sum of coefficients of the enumerator numerator).
pub fn matching_count(g: &TiledGraph) -> BigInt {
    BigInt::from(enumerate_matchings(g).len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvespec::parse_spec;

    fn graph(txt: &str) -> (TiledGraph, LaminationSigns) {
        let f = parse_spec(txt).unwrap();
        (build_graph(&f.curves[0]).unwrap(), f.signs)
    }

    #[test]
    fn single_tile() {
        let (g, s) = graph("lamination t=+1\ncurve g kind=arc\n initial a b\n cross t\n final c e\nend\n");
        let ms = enumerate_matchings(&g);
        assert_eq!(ms.len(), 2);
        assert_eq!(flip_graph(&g, &ms).len(), 1);
        assert_eq!(matching_enumerator(&g, &s).unwrap(), graph_matrix_formula(&g, &s).unwrap());
        let ws: Vec<String> = ms.iter().map(|m| m.weight.to_string()).collect();
        assert!(ws.contains(&"a*c".to_string()));
    }

    #[test]
    fn dp_agrees_with_brute_force_small() {
        let (g, _) = graph(
            "lamination p=+1 q=-1 r=+1\ncurve g kind=arc\n initial a b\n cross p ccw u\n cross q cw v\n cross r\n final c e\nend\n",
        );
        let mut dp: Vec<Vec<usize>> = enumerate_matchings(&g).into_iter().map(|m| m.edges).collect();
        let mut bf = brute_force_matchings(&g);
        dp.sort();
        bf.sort();
        assert_eq!(dp, bf);
    }
}
