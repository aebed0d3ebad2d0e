//! Permuted rooted forests: ordered bicolored trees whose vertices carry
//! edges, thorns and loops as ordered descendants, with a latin-label
//! matching between white and black thorns, a target vertex for every
//! labeled loop, and one arrow out of every non-seed root.
//!
//! Symbolic labels have no identity of their own, so structural equality is
//! decided through [`canonicalize`]: ids, loop numbers and thorn labels are
//! renumbered along a deterministic traversal and interchangeable trees are
//! ordered by their encoding.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::degree::{DegreeArray, TriMap};

pub type VertexId = u32;
pub type LoopId = u32;
pub type ThornLabel = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    White,
    Black,
}

impl Color {
    pub fn opposite(self) -> Color {
        match self {
            Color::White => Color::Black,
            Color::Black => Color::White,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum VertexKind {
    SeedRoot,
    NonSeedRoot,
    Internal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LoopEnd {
    Open,
    Close,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "t", rename_all = "lowercase")]
pub enum Slot {
    Edge { child: VertexId },
    Thorn { label: ThornLabel },
    Loop { id: LoopId, end: LoopEnd },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ForestVertex {
    pub id: VertexId,
    pub color: Color,
    pub kind: VertexKind,
    pub descendants: Vec<Slot>,
    #[serde(rename = "arrowTo", skip_serializing_if = "Option::is_none", default)]
    pub arrow_to: Option<VertexId>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PermutedForest {
    pub n: u32,
    pub vertices: Vec<ForestVertex>,
    #[serde(rename = "loopAssignments")]
    pub loop_assignments: BTreeMap<LoopId, VertexId>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Violation {
    #[error("duplicate vertex id {0}")]
    DuplicateId(VertexId),
    #[error("reference to missing vertex {0}")]
    MissingVertex(VertexId),
    #[error("expected exactly one seed root, found {0}")]
    SeedCount(usize),
    #[error("seed root {0} is not white")]
    SeedNotWhite(VertexId),
    #[error("loop {0} does not appear as one open end and one close end on a single vertex")]
    MalformedLoop(LoopId),
    #[error("vertex {0}: edge child {1} has the same color")]
    EdgeColorClash(VertexId, VertexId),
    #[error("vertex {0} is a child but is not marked internal")]
    ChildNotInternal(VertexId),
    #[error("internal vertex {0} has no parent edge")]
    InternalWithoutParent(VertexId),
    #[error("vertex {0} has more than one parent edge")]
    MultipleParents(VertexId),
    #[error("non-seed root {0}: rightmost descendant is not a loop end")]
    RootWithoutTerminalLoop(VertexId),
    #[error("vertex {0}: arrow presence does not match its kind")]
    ArrowKindMismatch(VertexId),
    #[error("arrow out of {0} must point at the opposite color")]
    ArrowColorClash(VertexId),
    #[error("thorn label {0} is not matched white-to-black exactly once")]
    ThornMatching(ThornLabel),
    #[error("white and black totals differ: {0}")]
    ColorBalance(String),
    #[error("loop {0}: assignment does not match the loop/arrow rules")]
    LoopAssignment(LoopId),
    #[error("vertex {0}: loops != incoming arrows + loops assigned here")]
    CountingConstraint(VertexId),
    #[error("edges and arrows do not form a tree rooted at the seed")]
    NotATree,
    #[error("declared n = {0} but the white side carries {1} slots")]
    WrongN(u32, u64),
}

/// Per-forest resolved structure shared by validation, degree extraction,
/// canonicalization and label recovery.
pub(crate) struct Analysis {
    pub idx_of: HashMap<VertexId, usize>,
    pub seed: usize,
    /// for internal vertices, the position of the edge-parent
    pub parent: Vec<Option<usize>>,
    /// loop id -> (owner position, open slot, close slot)
    pub loops: BTreeMap<LoopId, (usize, usize, usize)>,
    pub arrows_in: Vec<u64>,
    pub loops_of: Vec<u64>,
    /// thorn label -> (white position, slot), (black position, slot)
    pub thorns: BTreeMap<ThornLabel, ((usize, usize), (usize, usize))>,
}

pub(crate) fn analyze(f: &PermutedForest) -> Result<Analysis, Vec<Violation>> {
    let mut violations = Vec::new();
    let mut idx_of = HashMap::new();
    for (pos, v) in f.vertices.iter().enumerate() {
        if idx_of.insert(v.id, pos).is_some() {
            violations.push(Violation::DuplicateId(v.id));
        }
    }
    if !violations.is_empty() {
        return Err(violations);
    }
    let count = f.vertices.len();

    let seeds: Vec<usize> = f
        .vertices
        .iter()
        .enumerate()
        .filter(|(_, v)| v.kind == VertexKind::SeedRoot)
        .map(|(i, _)| i)
        .collect();
    if seeds.len() != 1 {
        violations.push(Violation::SeedCount(seeds.len()));
    }
    let seed = seeds.first().copied().unwrap_or(0);
    if let Some(&s) = seeds.first() {
        if f.vertices[s].color != Color::White {
            violations.push(Violation::SeedNotWhite(f.vertices[s].id));
        }
    }

    // loops: two ends, one vertex, open before close
    let mut loops: BTreeMap<LoopId, (usize, usize, usize)> = BTreeMap::new();
    let mut loop_ends: BTreeMap<LoopId, Vec<(usize, usize, LoopEnd)>> = BTreeMap::new();
    for (pos, v) in f.vertices.iter().enumerate() {
        for (s, slot) in v.descendants.iter().enumerate() {
            if let Slot::Loop { id, end } = slot {
                loop_ends.entry(*id).or_default().push((pos, s, *end));
            }
        }
    }
    for (id, ends) in &loop_ends {
        match ends.as_slice() {
            [(v1, s1, LoopEnd::Open), (v2, s2, LoopEnd::Close)] if v1 == v2 && s1 < s2 => {
                loops.insert(*id, (*v1, *s1, *s2));
            }
            _ => violations.push(Violation::MalformedLoop(*id)),
        }
    }

    // edges give each child exactly one parent
    let mut parent: Vec<Option<usize>> = vec![None; count];
    for (pos, v) in f.vertices.iter().enumerate() {
        for slot in &v.descendants {
            if let Slot::Edge { child } = slot {
                match idx_of.get(child) {
                    None => violations.push(Violation::MissingVertex(*child)),
                    Some(&c) => {
                        let cv = &f.vertices[c];
                        if cv.color == v.color {
                            violations.push(Violation::EdgeColorClash(v.id, cv.id));
                        }
                        if parent[c].is_some() {
                            violations.push(Violation::MultipleParents(cv.id));
                        }
                        parent[c] = Some(pos);
                    }
                }
            }
        }
    }
    for (pos, v) in f.vertices.iter().enumerate() {
        match v.kind {
            VertexKind::Internal => {
                if parent[pos].is_none() {
                    violations.push(Violation::InternalWithoutParent(v.id));
                }
            }
            _ => {
                if parent[pos].is_some() {
                    violations.push(Violation::ChildNotInternal(v.id));
                }
            }
        }
    }

    // non-seed roots end in a loop and carry the arrow
    let mut max_loop: Vec<Option<LoopId>> = vec![None; count];
    for (pos, v) in f.vertices.iter().enumerate() {
        if v.kind == VertexKind::NonSeedRoot {
            match v.descendants.last() {
                Some(Slot::Loop { id, .. }) => max_loop[pos] = Some(*id),
                _ => violations.push(Violation::RootWithoutTerminalLoop(v.id)),
            }
        }
        match (v.kind, v.arrow_to) {
            (VertexKind::NonSeedRoot, Some(target)) => match idx_of.get(&target) {
                None => violations.push(Violation::MissingVertex(target)),
                Some(&t) => {
                    if f.vertices[t].color == v.color {
                        violations.push(Violation::ArrowColorClash(v.id));
                    }
                }
            },
            (VertexKind::NonSeedRoot, None) => {
                violations.push(Violation::ArrowKindMismatch(v.id))
            }
            (_, Some(_)) => violations.push(Violation::ArrowKindMismatch(v.id)),
            (_, None) => {}
        }
    }

    // thorn matching
    let mut thorn_sides: BTreeMap<ThornLabel, Vec<(usize, usize)>> = BTreeMap::new();
    for (pos, v) in f.vertices.iter().enumerate() {
        for (s, slot) in v.descendants.iter().enumerate() {
            if let Slot::Thorn { label } = slot {
                thorn_sides.entry(*label).or_default().push((pos, s));
            }
        }
    }
    let mut thorns = BTreeMap::new();
    for (label, sides) in &thorn_sides {
        match sides.as_slice() {
            [a, b] => {
                let (ca, cb) = (f.vertices[a.0].color, f.vertices[b.0].color);
                if ca == cb {
                    violations.push(Violation::ThornMatching(*label));
                } else if ca == Color::White {
                    thorns.insert(*label, (*a, *b));
                } else {
                    thorns.insert(*label, (*b, *a));
                }
            }
            _ => violations.push(Violation::ThornMatching(*label)),
        }
    }

    // loop assignments and the counting constraint
    let mut arrows_in = vec![0u64; count];
    let mut greek_in = vec![0u64; count];
    let mut loops_of = vec![0u64; count];
    for &(owner, _, _) in loops.values() {
        loops_of[owner] += 1;
    }
    for (pos, v) in f.vertices.iter().enumerate() {
        if let Some(target) = v.arrow_to {
            if let Some(&t) = idx_of.get(&target) {
                arrows_in[t] += 1;
            }
        }
        let _ = pos;
    }
    for (id, &(owner, _, _)) in &loops {
        let is_root_max = max_loop[owner] == Some(*id);
        match f.loop_assignments.get(id) {
            Some(target) => {
                if is_root_max {
                    violations.push(Violation::LoopAssignment(*id));
                }
                match idx_of.get(target) {
                    None => violations.push(Violation::MissingVertex(*target)),
                    Some(&t) => {
                        if f.vertices[t].color == f.vertices[owner].color {
                            violations.push(Violation::LoopAssignment(*id));
                        }
                        greek_in[t] += 1;
                    }
                }
            }
            None => {
                if !is_root_max {
                    violations.push(Violation::LoopAssignment(*id));
                }
            }
        }
    }
    for id in f.loop_assignments.keys() {
        if !loops.contains_key(id) {
            violations.push(Violation::MalformedLoop(*id));
        }
    }
    for (pos, v) in f.vertices.iter().enumerate() {
        if loops_of[pos] != arrows_in[pos] + greek_in[pos] {
            violations.push(Violation::CountingConstraint(v.id));
        }
    }

    // balance between the colors
    let mut white_thorns = 0u64;
    let mut black_thorns = 0u64;
    let mut white_loops = 0u64;
    let mut black_loops = 0u64;
    let mut white_slots = 0u64;
    let mut black_slots = 0u64;
    for (pos, v) in f.vertices.iter().enumerate() {
        let thorn_count = v
            .descendants
            .iter()
            .filter(|s| matches!(s, Slot::Thorn { .. }))
            .count() as u64;
        let degree = v.descendants.len() as u64
            + if v.kind == VertexKind::Internal { 1 } else { 0 };
        match v.color {
            Color::White => {
                white_thorns += thorn_count;
                white_loops += loops_of[pos];
                white_slots += degree;
            }
            Color::Black => {
                black_thorns += thorn_count;
                black_loops += loops_of[pos];
                black_slots += degree;
            }
        }
    }
    if white_thorns != black_thorns {
        violations.push(Violation::ColorBalance(format!(
            "{white_thorns} white thorns vs {black_thorns} black"
        )));
    }
    if white_loops != black_loops {
        violations.push(Violation::ColorBalance(format!(
            "{white_loops} white loops vs {black_loops} black"
        )));
    }
    if white_slots != black_slots {
        violations.push(Violation::ColorBalance(format!(
            "{white_slots} white slots vs {black_slots} black"
        )));
    }
    if white_slots != f.n as u64 {
        violations.push(Violation::WrongN(f.n, white_slots));
    }

    // tree property over edges and arrows
    if violations.is_empty() {
        let mut state = vec![0u8; count]; // 0 new, 1 visiting, 2 done
        let up = |pos: usize| -> Option<usize> {
            match f.vertices[pos].kind {
                VertexKind::SeedRoot => None,
                VertexKind::Internal => parent[pos],
                VertexKind::NonSeedRoot => f.vertices[pos]
                    .arrow_to
                    .and_then(|t| idx_of.get(&t).copied()),
            }
        };
        let mut ok = true;
        for start in 0..count {
            let mut chain = Vec::new();
            let mut cur = start;
            loop {
                if state[cur] == 2 {
                    break;
                }
                if state[cur] == 1 {
                    ok = false;
                    break;
                }
                state[cur] = 1;
                chain.push(cur);
                match up(cur) {
                    None => {
                        ok &= cur == seed;
                        break;
                    }
                    Some(next) => cur = next,
                }
            }
            for c in chain {
                state[c] = 2;
            }
            if !ok {
                break;
            }
        }
        if !ok {
            violations.push(Violation::NotATree);
        }
    }

    if violations.is_empty() {
        Ok(Analysis {
            idx_of,
            seed,
            parent,
            loops,
            max_loop,
            arrows_in,
            greek_in,
            loops_of,
            thorns,
        })
    } else {
        Err(violations)
    }
}

/// Check every structural property; `Ok` or the list of violations.
pub fn validate_forest(f: &PermutedForest) -> Result<(), Vec<Violation>> {
    analyze(f).map(|_| ())
}

/// Degree array of a valid forest: per vertex the slot count (descendants
/// plus the parent edge for internal vertices), the incoming arrows, and the
/// incident loops.
pub fn forest_degree(f: &PermutedForest) -> DegreeArray {
    let a = analyze(f).expect("forest_degree needs a valid forest");
    let mut out = DegreeArray::default();
    for (pos, v) in f.vertices.iter().enumerate() {
        let degree = v.descendants.len() as u32
            + if v.kind == VertexKind::Internal { 1 } else { 0 };
        let arrows = a.arrows_in[pos] as u32;
        let loops = a.loops_of[pos] as u32;
        let key = (degree, arrows, loops - arrows);
        let map: &mut TriMap = match (v.color, v.kind) {
            (Color::White, VertexKind::NonSeedRoot) => &mut out.white_roots,
            (Color::White, _) => &mut out.white,
            (Color::Black, VertexKind::NonSeedRoot) => &mut out.black_roots,
            (Color::Black, _) => &mut out.black,
        };
        *map.entry(key).or_insert(0) += 1;
    }
    out
}

// Local encoding of the subtree hanging under `pos`, loops numbered by
// first appearance within each vertex.
fn tree_encoding(f: &PermutedForest, idx_of: &HashMap<VertexId, usize>, pos: usize) -> String {
    let v = &f.vertices[pos];
    let mut local: HashMap<LoopId, usize> = HashMap::new();
    let mut out = String::new();
    out.push(match v.color {
        Color::White => 'w',
        Color::Black => 'b',
    });
    out.push('[');
    for slot in &v.descendants {
        match slot {
            Slot::Edge { child } => {
                out.push('E');
                out.push('(');
                out.push_str(&tree_encoding(f, idx_of, idx_of[child]));
                out.push(')');
            }
            Slot::Thorn { .. } => out.push('T'),
            Slot::Loop { id, end } => {
                let next = local.len();
                let k = *local.entry(*id).or_insert(next);
                out.push(match end {
                    LoopEnd::Open => 'O',
                    LoopEnd::Close => 'C',
                });
                out.push_str(&k.to_string());
            }
        }
    }
    out.push(']');
    out
}

/// Renumber ids, loops and thorn labels along the canonical traversal and
/// order interchangeable trees; two forests are equal as combinatorial
/// objects exactly when their canonical forms are equal.
pub fn canonicalize(f: &PermutedForest) -> PermutedForest {
    let a = analyze(f).expect("canonicalize needs a valid forest");
    let roots: Vec<usize> = f
        .vertices
        .iter()
        .enumerate()
        .filter(|(_, v)| v.kind != VertexKind::Internal)
        .map(|(i, _)| i)
        .collect();
    let mut non_seed: Vec<(String, usize)> = roots
        .iter()
        .copied()
        .filter(|&r| r != a.seed)
        .map(|r| (tree_encoding(f, &a.idx_of, r), r))
        .collect();
    non_seed.sort();

    // group ties and try every order inside each tie group
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut keys: Vec<String> = Vec::new();
    for (enc, r) in non_seed {
        if keys.last() == Some(&enc) {
            groups.last_mut().unwrap().push(r);
        } else {
            keys.push(enc);
            groups.push(vec![r]);
        }
    }
    let mut best: Option<(String, PermutedForest)> = None;
    let mut orders: Vec<Vec<usize>> = vec![Vec::new()];
    for group in &groups {
        let mut next = Vec::new();
        for prefix in &orders {
            for perm in permutations(group) {
                let mut o = prefix.clone();
                o.extend(perm);
                next.push(o);
            }
        }
        orders = next;
    }
    for order in orders {
        let mut tree_order = vec![a.seed];
        tree_order.extend(order);
        let candidate = rebuild(f, &a, &tree_order);
        let key = serde_json::to_string(&candidate).expect("forest serializes");
        if best.as_ref().map_or(true, |(k, _)| key < *k) {
            best = Some((key, candidate));
        }
    }
    best.expect("at least one ordering").1
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        let mut rest: Vec<usize> = items.to_vec();
        rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, x);
            out.push(tail);
        }
    }
    out
}

fn rebuild(f: &PermutedForest, a: &Analysis, tree_order: &[usize]) -> PermutedForest {
    // pre-order traversal assigning new ids
    let mut new_id: HashMap<usize, VertexId> = HashMap::new();
    let mut order: Vec<usize> = Vec::new();
    fn dfs(
        f: &PermutedForest,
        idx_of: &HashMap<VertexId, usize>,
        pos: usize,
        new_id: &mut HashMap<usize, VertexId>,
        order: &mut Vec<usize>,
    ) {
        new_id.insert(pos, order.len() as VertexId);
        order.push(pos);
        for slot in &f.vertices[pos].descendants {
            if let Slot::Edge { child } = slot {
                dfs(f, idx_of, idx_of[child], new_id, order);
            }
        }
    }
    for &root in tree_order {
        dfs(f, &a.idx_of, root, &mut new_id, &mut order);
    }

    // loops renumbered by first appearance, thorn labels by first complete
    // pair appearance
    let mut loop_map: HashMap<LoopId, LoopId> = HashMap::new();
    let mut thorn_map: HashMap<ThornLabel, ThornLabel> = HashMap::new();
    for &pos in &order {
        for slot in &f.vertices[pos].descendants {
            match slot {
                Slot::Loop { id, .. } => {
                    let next = loop_map.len() as LoopId;
                    loop_map.entry(*id).or_insert(next);
                }
                Slot::Thorn { label } => {
                    let next = thorn_map.len() as ThornLabel;
                    thorn_map.entry(*label).or_insert(next);
                }
                Slot::Edge { .. } => {}
            }
        }
    }

    let vertices: Vec<ForestVertex> = order
        .iter()
        .map(|&pos| {
            let v = &f.vertices[pos];
            ForestVertex {
                id: new_id[&pos],
                color: v.color,
                kind: v.kind,
                descendants: v
                    .descendants
                    .iter()
                    .map(|slot| match slot {
                        Slot::Edge { child } => Slot::Edge {
                            child: new_id[&a.idx_of[child]],
                        },
                        Slot::Thorn { label } => Slot::Thorn {
                            label: thorn_map[label],
                        },
                        Slot::Loop { id, end } => Slot::Loop {
                            id: loop_map[id],
                            end: *end,
                        },
                    })
                    .collect(),
                arrow_to: v.arrow_to.map(|t| new_id[&a.idx_of[&t]]),
            }
        })
        .collect();
    let loop_assignments = f
        .loop_assignments
        .iter()
        .map(|(l, t)| (loop_map[l], new_id[&a.idx_of[t]]))
        .collect();
    PermutedForest {
        n: f.n,
        vertices,
        loop_assignments,
    }
}

// ---------------------------------------------------------------------
// exhaustive generation of all forests with a prescribed degree array

#[derive(Debug, Clone, Copy)]
struct VSpec {
    color: Color,
    kind: VertexKind,
    degree: u32,
    arrows_in: u32,
    greek_in: u32,
}

impl VSpec {
    fn loops(&self) -> u32 {
        self.arrows_in + self.greek_in
    }

    fn slot_count(&self) -> u32 {
        self.degree - u32::from(self.kind == VertexKind::Internal)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pat {
    Edge,
    Thorn,
    Open(u32),
    Close(u32),
}

fn patterns_for(spec: &VSpec, edges: u32) -> Vec<Vec<Pat>> {
    let slots = spec.slot_count();
    let loops = spec.loops();
    if slots < 2 * loops + edges {
        return Vec::new();
    }
    let thorns = slots - 2 * loops - edges;
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(
        cur: &mut Vec<Pat>,
        slots: u32,
        open: &mut Vec<u32>,
        opened: u32,
        loops: u32,
        edges: u32,
        thorns: u32,
        must_end_with_close: bool,
        out: &mut Vec<Vec<Pat>>,
    ) {
        if cur.len() == slots as usize {
            if open.is_empty() {
                out.push(cur.clone());
            }
            return;
        }
        let last = cur.len() + 1 == slots as usize;
        if !(last && must_end_with_close) {
            if edges > 0 {
                cur.push(Pat::Edge);
                rec(cur, slots, open, opened, loops, edges - 1, thorns, must_end_with_close, out);
                cur.pop();
            }
            if thorns > 0 {
                cur.push(Pat::Thorn);
                rec(cur, slots, open, opened, loops, edges, thorns - 1, must_end_with_close, out);
                cur.pop();
            }
            if opened < loops {
                cur.push(Pat::Open(opened));
                open.push(opened);
                rec(cur, slots, open, opened + 1, loops, edges, thorns, must_end_with_close, out);
                open.pop();
                cur.pop();
            }
        }
        // closing any currently open loop; distinct choices give distinct
        // matchings
        for i in 0..open.len() {
            let l = open.remove(i);
            cur.push(Pat::Close(l));
            rec(cur, slots, open, opened, loops, edges, thorns, must_end_with_close, out);
            cur.pop();
            open.insert(i, l);
        }
    }
    rec(
        &mut cur,
        slots,
        &mut Vec::new(),
        0,
        loops,
        edges,
        thorns,
        spec.kind == VertexKind::NonSeedRoot,
        &mut out,
    );
    out
}

/// All forests of degree exactly `a`, up to canonical identity. Exhaustive;
/// intended for small total size.
pub fn enumerate_forests(a: &DegreeArray) -> Vec<PermutedForest> {
    if !a.is_consistent() || a.white_count() == 0 {
        return Vec::new();
    }
    let n = a.n() as u32;
    let mut results: BTreeSet<PermutedForest> = BTreeSet::new();

    for (&(t, u, v), _) in &a.white {
        // choose the seed triple; one copy becomes the seed, the rest stay
        // internal
        let mut specs: Vec<VSpec> = Vec::new();
        specs.push(VSpec {
            color: Color::White,
            kind: VertexKind::SeedRoot,
            degree: t,
            arrows_in: u,
            greek_in: v,
        });
        let mut push_all = |m: &TriMap, color: Color, kind: VertexKind, skip_one: Option<(u32, u32, u32)>, specs: &mut Vec<VSpec>| {
            for (&(i, j, k), &c) in m {
                let mut c = c;
                if skip_one == Some((i, j, k)) {
                    c -= 1;
                }
                for _ in 0..c {
                    specs.push(VSpec {
                        color,
                        kind,
                        degree: i,
                        arrows_in: j,
                        greek_in: k,
                    });
                }
            }
        };
        push_all(&a.white, Color::White, VertexKind::Internal, Some((t, u, v)), &mut specs);
        push_all(&a.white_roots, Color::White, VertexKind::NonSeedRoot, None, &mut specs);
        push_all(&a.black, Color::Black, VertexKind::Internal, None, &mut specs);
        push_all(&a.black_roots, Color::Black, VertexKind::NonSeedRoot, None, &mut specs);

        let internal_blacks: Vec<usize> = (0..specs.len())
            .filter(|&i| specs[i].color == Color::Black && specs[i].kind == VertexKind::Internal)
            .collect();
        let internal_whites: Vec<usize> = (0..specs.len())
            .filter(|&i| specs[i].color == Color::White && specs[i].kind == VertexKind::Internal)
            .collect();

        // choose per-vertex edge counts, then slot patterns
        let mut edge_counts = vec![0u32; specs.len()];
        distribute_edges(
            &specs,
            0,
            internal_blacks.len() as u32,
            internal_whites.len() as u32,
            &mut edge_counts,
            &mut |edges| {
                let pattern_sets: Vec<Vec<Vec<Pat>>> = specs
                    .iter()
                    .zip(edges.iter())
                    .map(|(spec, &e)| patterns_for(spec, e))
                    .collect();
                if pattern_sets.iter().any(|p| p.is_empty()) {
                    return;
                }
                let mut chosen: Vec<usize> = vec![0; specs.len()];
                pattern_product(&pattern_sets, 0, &mut chosen, &mut |choice| {
                    assemble(
                        n,
                        &specs,
                        &pattern_sets,
                        choice,
                        &internal_blacks,
                        &internal_whites,
                        &mut results,
                    );
                });
            },
        );
    }
    results.into_iter().collect()
}

fn distribute_edges(
    specs: &[VSpec],
    idx: usize,
    need_white_slots: u32, // white edge slots must equal internal black count
    need_black_slots: u32,
    cur: &mut Vec<u32>,
    f: &mut impl FnMut(&[u32]),
) {
    if idx == specs.len() {
        if need_white_slots == 0 && need_black_slots == 0 {
            f(cur);
        }
        return;
    }
    let spec = &specs[idx];
    let free = spec.slot_count().saturating_sub(2 * spec.loops());
    let budget = match spec.color {
        Color::White => need_white_slots,
        Color::Black => need_black_slots,
    };
    for e in 0..=free.min(budget) {
        cur[idx] = e;
        match spec.color {
            Color::White => distribute_edges(specs, idx + 1, need_white_slots - e, need_black_slots, cur, f),
            Color::Black => distribute_edges(specs, idx + 1, need_white_slots, need_black_slots - e, cur, f),
        }
        cur[idx] = 0;
    }
}

fn pattern_product(
    sets: &[Vec<Vec<Pat>>],
    idx: usize,
    chosen: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize]),
) {
    if idx == sets.len() {
        f(chosen);
        return;
    }
    for c in 0..sets[idx].len() {
        chosen[idx] = c;
        pattern_product(sets, idx + 1, chosen, f);
    }
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    n: u32,
    specs: &[VSpec],
    pattern_sets: &[Vec<Vec<Pat>>],
    choice: &[usize],
    internal_blacks: &[usize],
    internal_whites: &[usize],
    results: &mut BTreeSet<PermutedForest>,
) {
    // edge slots in a fixed order per color
    let mut white_slots: Vec<(usize, usize)> = Vec::new();
    let mut black_slots: Vec<(usize, usize)> = Vec::new();
    for (vi, spec) in specs.iter().enumerate() {
        for (si, p) in pattern_sets[vi][choice[vi]].iter().enumerate() {
            if *p == Pat::Edge {
                match spec.color {
                    Color::White => white_slots.push((vi, si)),
                    Color::Black => black_slots.push((vi, si)),
                }
            }
        }
    }
    debug_assert_eq!(white_slots.len(), internal_blacks.len());
    debug_assert_eq!(black_slots.len(), internal_whites.len());

    for black_perm in permutations(internal_blacks) {
        for white_perm in permutations(internal_whites) {
            // parent positions via the slot assignment
            let mut parent: Vec<Option<usize>> = vec![None; specs.len()];
            let mut child_of_slot: HashMap<(usize, usize), usize> = HashMap::new();
            for (slot, &child) in white_slots.iter().zip(black_perm.iter()) {
                parent[child] = Some(slot.0);
                child_of_slot.insert(*slot, child);
            }
            for (slot, &child) in black_slots.iter().zip(white_perm.iter()) {
                parent[child] = Some(slot.0);
                child_of_slot.insert(*slot, child);
            }
            // edge structure alone must be acyclic
            if has_cycle(&parent) {
                continue;
            }
            // arrows: assign a target to every non-seed root, respecting
            // per-vertex incoming counts
            let roots: Vec<usize> = (0..specs.len())
                .filter(|&i| specs[i].kind == VertexKind::NonSeedRoot)
                .collect();
            let mut arrow_capacity: Vec<u32> = specs.iter().map(|s| s.arrows_in).collect();
            let mut arrow_target: Vec<Option<usize>> = vec![None; specs.len()];
            assign_arrows(
                specs,
                &roots,
                0,
                &mut arrow_capacity,
                &mut arrow_target,
                &mut |targets| {
                    // overall tree check
                    let mut up = parent.clone();
                    for &r in &roots {
                        up[r] = targets[r];
                    }
                    if has_cycle(&up) {
                        return;
                    }
                    assign_greek_and_thorns(
                        n,
                        specs,
                        pattern_sets,
                        choice,
                        &child_of_slot,
                        targets,
                        results,
                    );
                },
            );
        }
    }
}

fn has_cycle(parent: &[Option<usize>]) -> bool {
    for start in 0..parent.len() {
        let mut steps = 0;
        let mut cur = start;
        while let Some(next) = parent[cur] {
            cur = next;
            steps += 1;
            if steps > parent.len() {
                return true;
            }
        }
    }
    false
}

fn assign_arrows(
    specs: &[VSpec],
    roots: &[usize],
    idx: usize,
    capacity: &mut Vec<u32>,
    target: &mut Vec<Option<usize>>,
    f: &mut impl FnMut(&[Option<usize>]),
) {
    if idx == roots.len() {
        if capacity.iter().all(|&c| c == 0) {
            f(target);
        }
        return;
    }
    let r = roots[idx];
    for t in 0..specs.len() {
        if specs[t].color != specs[r].color && capacity[t] > 0 {
            capacity[t] -= 1;
            target[r] = Some(t);
            assign_arrows(specs, roots, idx + 1, capacity, target, f);
            target[r] = None;
            capacity[t] += 1;
        }
    }
}

fn assign_greek_and_thorns(
    n: u32,
    specs: &[VSpec],
    pattern_sets: &[Vec<Vec<Pat>>],
    choice: &[usize],
    child_of_slot: &HashMap<(usize, usize), usize>,
    arrow_target: &[Option<usize>],
    results: &mut BTreeSet<PermutedForest>,
) {
    // global loop ids and the set needing assignment (all but root maxima)
    let mut loop_ids: HashMap<(usize, u32), LoopId> = HashMap::new();
    let mut assignable: Vec<(LoopId, usize)> = Vec::new(); // (loop, owner)
    let mut next_loop: LoopId = 0;
    for (vi, spec) in specs.iter().enumerate() {
        let pat = &pattern_sets[vi][choice[vi]];
        for p in pat {
            if let Pat::Open(local) = p {
                loop_ids.insert((vi, *local), next_loop);
                next_loop += 1;
            }
        }
        if spec.kind == VertexKind::NonSeedRoot {
            // rightmost slot is a close of the maximal loop
            if let Some(Pat::Close(local)) = pat.last() {
                let max_loop = loop_ids[&(vi, *local)];
                for p in pat {
                    if let Pat::Open(l) = p {
                        let id = loop_ids[&(vi, *l)];
                        if id != max_loop {
                            assignable.push((id, vi));
                        }
                    }
                }
            }
        } else {
            for p in pat {
                if let Pat::Open(l) = p {
                    assignable.push((loop_ids[&(vi, *l)], vi));
                }
            }
        }
    }

    let mut greek_capacity: Vec<u32> = specs.iter().map(|s| s.greek_in).collect();
    let mut assignment: BTreeMap<LoopId, usize> = BTreeMap::new();
    assign_greek(
        specs,
        &assignable,
        0,
        &mut greek_capacity,
        &mut assignment,
        &mut |assignment| {
            emit_with_thorns(
                n,
                specs,
                pattern_sets,
                choice,
                child_of_slot,
                arrow_target,
                &loop_ids,
                assignment,
                results,
            );
        },
    );
}

fn assign_greek(
    specs: &[VSpec],
    assignable: &[(LoopId, usize)],
    idx: usize,
    capacity: &mut Vec<u32>,
    assignment: &mut BTreeMap<LoopId, usize>,
    f: &mut impl FnMut(&BTreeMap<LoopId, usize>),
) {
    if idx == assignable.len() {
        if capacity.iter().all(|&c| c == 0) {
            f(assignment);
        }
        return;
    }
    let (loop_id, owner) = assignable[idx];
    for t in 0..specs.len() {
        if specs[t].color != specs[owner].color && capacity[t] > 0 {
            capacity[t] -= 1;
            assignment.insert(loop_id, t);
            assign_greek(specs, assignable, idx + 1, capacity, assignment, f);
            assignment.remove(&loop_id);
            capacity[t] += 1;
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn emit_with_thorns(
    n: u32,
    specs: &[VSpec],
    pattern_sets: &[Vec<Vec<Pat>>],
    choice: &[usize],
    child_of_slot: &HashMap<(usize, usize), usize>,
    arrow_target: &[Option<usize>],
    loop_ids: &HashMap<(usize, u32), LoopId>,
    assignment: &BTreeMap<LoopId, usize>,
    results: &mut BTreeSet<PermutedForest>,
) {
    let mut white_thorns: Vec<(usize, usize)> = Vec::new();
    let mut black_thorns: Vec<(usize, usize)> = Vec::new();
    for (vi, spec) in specs.iter().enumerate() {
        for (si, p) in pattern_sets[vi][choice[vi]].iter().enumerate() {
            if *p == Pat::Thorn {
                match spec.color {
                    Color::White => white_thorns.push((vi, si)),
                    Color::Black => black_thorns.push((vi, si)),
                }
            }
        }
    }
    debug_assert_eq!(white_thorns.len(), black_thorns.len());
    let black_idx: Vec<usize> = (0..black_thorns.len()).collect();
    for matching in permutations(&black_idx) {
        // thorn labels: white thorn i pairs with black thorn matching[i]
        let mut label_of: HashMap<(usize, usize), ThornLabel> = HashMap::new();
        for (i, &b) in matching.iter().enumerate() {
            label_of.insert(white_thorns[i], i as ThornLabel);
            label_of.insert(black_thorns[b], i as ThornLabel);
        }
        let vertices: Vec<ForestVertex> = specs
            .iter()
            .enumerate()
            .map(|(vi, spec)| ForestVertex {
                id: vi as VertexId,
                color: spec.color,
                kind: spec.kind,
                descendants: pattern_sets[vi][choice[vi]]
                    .iter()
                    .enumerate()
                    .map(|(si, p)| match p {
                        Pat::Edge => Slot::Edge {
                            child: child_of_slot[&(vi, si)] as VertexId,
                        },
                        Pat::Thorn => Slot::Thorn {
                            label: label_of[&(vi, si)],
                        },
                        Pat::Open(l) => Slot::Loop {
                            id: loop_ids[&(vi, *l)],
                            end: LoopEnd::Open,
                        },
                        Pat::Close(l) => Slot::Loop {
                            id: loop_ids[&(vi, *l)],
                            end: LoopEnd::Close,
                        },
                    })
                    .collect(),
                arrow_to: arrow_target[vi].map(|t| t as VertexId),
            })
            .collect();
        let forest = PermutedForest {
            n,
            vertices,
            loop_assignments: assignment
                .iter()
                .map(|(&l, &t)| (l, t as VertexId))
                .collect(),
        };
        debug_assert_eq!(validate_forest(&forest), Ok(()), "generated forest invalid");
        results.insert(canonicalize(&forest));
    }
}

impl fmt::Display for PermutedForest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx_of: HashMap<VertexId, usize> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.id, i))
            .collect();
        let mut first = true;
        for v in &self.vertices {
            if v.kind == VertexKind::Internal {
                continue;
            }
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "{}", tree_encoding(self, &idx_of, idx_of[&v.id]))?;
        }
        Ok(())
    }
}

/// Ids referenced anywhere in the forest; handy for input checking.
pub fn referenced_ids(f: &PermutedForest) -> HashSet<VertexId> {
    let mut ids = HashSet::new();
    for v in &f.vertices {
        ids.insert(v.id);
        if let Some(t) = v.arrow_to {
            ids.insert(t);
        }
        for s in &v.descendants {
            if let Slot::Edge { child } = s {
                ids.insert(*child);
            }
        }
    }
    ids
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::closed_form_summand;
    use crate::series::scalar_from_u64;

    fn one_edge_forest() -> PermutedForest {
        PermutedForest {
            n: 1,
            vertices: vec![
                ForestVertex {
                    id: 0,
                    color: Color::White,
                    kind: VertexKind::SeedRoot,
                    descendants: vec![Slot::Edge { child: 1 }],
                    arrow_to: None,
                },
                ForestVertex {
                    id: 1,
                    color: Color::Black,
                    kind: VertexKind::Internal,
                    descendants: vec![],
                    arrow_to: None,
                },
            ],
            loop_assignments: BTreeMap::new(),
        }
    }

    #[test]
    fn minimal_forest_validates() {
        let f = one_edge_forest();
        assert_eq!(validate_forest(&f), Ok(()));
        assert_eq!(
            forest_degree(&f),
            DegreeArray::from_entries(&[(1, 0, 0)], &[], &[(1, 0, 0)], &[])
        );
    }

    #[test]
    fn root_needs_terminal_loop() {
        // a non-seed root whose rightmost descendant is a thorn
        let f = PermutedForest {
            n: 2,
            vertices: vec![
                ForestVertex {
                    id: 0,
                    color: Color::White,
                    kind: VertexKind::SeedRoot,
                    descendants: vec![Slot::Edge { child: 1 }, Slot::Thorn { label: 0 }],
                    arrow_to: None,
                },
                ForestVertex {
                    id: 1,
                    color: Color::Black,
                    kind: VertexKind::Internal,
                    descendants: vec![],
                    arrow_to: None,
                },
                ForestVertex {
                    id: 2,
                    color: Color::Black,
                    kind: VertexKind::NonSeedRoot,
                    descendants: vec![Slot::Thorn { label: 0 }],
                    arrow_to: Some(0),
                },
            ],
            loop_assignments: BTreeMap::new(),
        };
        let violations = validate_forest(&f).unwrap_err();
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::RootWithoutTerminalLoop(2))));
    }

    #[test]
    fn json_schema_shape() {
        let f = one_edge_forest();
        let json = serde_json::to_value(&f).unwrap();
        assert_eq!(json["n"], 1);
        assert_eq!(json["vertices"][0]["color"], "white");
        assert_eq!(json["vertices"][0]["kind"], "seedRoot");
        assert_eq!(json["vertices"][0]["descendants"][0]["t"], "edge");
        assert_eq!(json["vertices"][0]["descendants"][0]["child"], 1);
        let back: PermutedForest = serde_json::from_value(json).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn canonical_form_ignores_label_names() {
        // two-loop seed with a black root: rename every symbolic label and
        // expect the same canonical form
        let base = PermutedForest {
            n: 2,
            vertices: vec![
                ForestVertex {
                    id: 5,
                    color: Color::White,
                    kind: VertexKind::SeedRoot,
                    descendants: vec![
                        Slot::Loop { id: 7, end: LoopEnd::Open },
                        Slot::Loop { id: 7, end: LoopEnd::Close },
                    ],
                    arrow_to: None,
                },
                ForestVertex {
                    id: 9,
                    color: Color::Black,
                    kind: VertexKind::NonSeedRoot,
                    descendants: vec![
                        Slot::Loop { id: 3, end: LoopEnd::Open },
                        Slot::Loop { id: 3, end: LoopEnd::Close },
                    ],
                    arrow_to: Some(5),
                },
            ],
            loop_assignments: BTreeMap::from([(7, 9)]),
        };
        let renamed = PermutedForest {
            n: 2,
            vertices: vec![
                ForestVertex {
                    id: 0,
                    color: Color::White,
                    kind: VertexKind::SeedRoot,
                    descendants: vec![
                        Slot::Loop { id: 100, end: LoopEnd::Open },
                        Slot::Loop { id: 100, end: LoopEnd::Close },
                    ],
                    arrow_to: None,
                },
                ForestVertex {
                    id: 1,
                    color: Color::Black,
                    kind: VertexKind::NonSeedRoot,
                    descendants: vec![
                        Slot::Loop { id: 42, end: LoopEnd::Open },
                        Slot::Loop { id: 42, end: LoopEnd::Close },
                    ],
                    arrow_to: Some(0),
                },
            ],
            loop_assignments: BTreeMap::from([(100, 1)]),
        };
        assert_eq!(canonicalize(&base), canonicalize(&renamed));
        assert_eq!(validate_forest(&base), Ok(()));
    }

    #[test]
    fn enumerate_forced_single_edge() {
        let a = DegreeArray::from_entries(&[(1, 0, 0)], &[], &[(1, 0, 0)], &[]);
        let forests = enumerate_forests(&a);
        assert_eq!(forests.len(), 1);
        assert_eq!(canonicalize(&forests[0]), canonicalize(&one_edge_forest()));
    }

    #[test]
    fn enumerate_two_edge_arrays() {
        let a = DegreeArray::from_entries(&[(2, 0, 0)], &[], &[(2, 0, 0)], &[]);
        assert_eq!(enumerate_forests(&a).len(), 2);
        let a = DegreeArray::from_entries(&[(2, 1, 0)], &[], &[], &[(2, 0, 1)]);
        assert_eq!(enumerate_forests(&a).len(), 1);
        let a = DegreeArray::from_entries(&[(2, 0, 0)], &[], &[(1, 0, 0), (1, 0, 0)], &[]);
        assert_eq!(enumerate_forests(&a).len(), 1);
    }

    #[test]
    fn enumeration_matches_closed_form_at_three_edges() {
        use crate::exec::Exec;
        use crate::hypermaps::lp_degree_table;
        for n in 1..=3usize {
            for (array, &count) in &lp_degree_table(n, Exec::Sequential) {
                let forests = enumerate_forests(array);
                assert_eq!(
                    forests.len() as u64,
                    count,
                    "forest count != enumerated count at n={n} for {array}"
                );
                assert_eq!(closed_form_summand(array), scalar_from_u64(count));
                for f in &forests {
                    assert_eq!(validate_forest(f), Ok(()));
                    assert_eq!(&forest_degree(f), array, "degree drift for {array}");
                }
            }
        }
    }
}
