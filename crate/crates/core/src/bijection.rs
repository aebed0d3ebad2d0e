//! The bijection between partitioned hypermaps and permuted forests, in both
//! directions.
//!
//! Forward: blocks become vertices, the half edges of a block become its
//! ordered slots (labels increasing left to right), same-parity pairs become
//! loops, the block maxima decide parent edges versus arrows, and the
//! leftover matched half edges become latin-labeled thorns. Integer labels
//! are erased at the end, so the output is canonicalized.
//!
//! Inverse: integer labels are recovered one at a time. The leftmost slot of
//! the seed root is label 1; from the slot of a non-hat label the block
//! stability rules force the hat partner onto a known vertex, where it must
//! sit on the leftmost unrecovered slot, and symmetrically back. Afterwards
//! the blocks and the pairing can be read off the labels.

use thiserror::Error;

use crate::degree::DegreeArray;
use crate::forests::{
    analyze, canonicalize, validate_forest, Analysis, Color, ForestVertex, LoopEnd,
    PermutedForest, Slot, VertexKind, Violation,
};
use crate::hypermaps::{GroundSetPartition, HypermapError, PartitionedHypermap};
use crate::pairings::Pairing;

#[derive(Debug, Error)]
pub enum BijectionError {
    #[error("input forest is invalid: {0:?}")]
    InvalidForest(Vec<Violation>),
    #[error("recovery stuck: vertex {0} has no unrecovered slot")]
    RecoveryStuck(u32),
    #[error("recovered labels do not assemble into a partitioned hypermap: {0}")]
    BadRecovery(#[from] HypermapError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    ChildEdge { child: usize },
    ParentEdge,
    Thorn { label: u32 },
    LoopEnd { id: u32, end: LoopEnd },
}

/// Map a partitioned hypermap to its permuted forest, canonical labels.
pub fn theta_forward(ph: &PartitionedHypermap) -> PermutedForest {
    let n = ph.n;
    let f3 = &ph.f3;
    let whites = ph.pi1.blocks();
    let blacks = ph.pi2.blocks();
    let black_offset = whites.len();

    let max_nonhat: Vec<usize> = whites
        .iter()
        .map(|b| *b.iter().filter(|&&p| p % 2 == 0).max().expect("hat balance"))
        .collect();
    let max_hat: Vec<usize> = blacks
        .iter()
        .map(|b| *b.iter().filter(|&&p| p % 2 == 1).max().expect("hat balance"))
        .collect();
    let seed_block = ph.pi1.block_index_of(0);

    // classify every point's slot
    let mut roles: Vec<Option<Role>> = vec![None; 2 * n];
    let mut next_loop = 0u32;
    let mut next_thorn = 0u32;
    let mut loop_info: Vec<(u32, usize, usize, usize)> = Vec::new(); // (id, owner vertex, open, close)
    for p in 0..2 * n {
        let q = f3.apply_index(p);
        if p > q {
            continue;
        }
        if p % 2 == q % 2 {
            // a loop of the common block
            let owner = if p % 2 == 0 {
                ph.pi1.block_index_of(p)
            } else {
                black_offset + ph.pi2.block_index_of(p)
            };
            let id = next_loop;
            next_loop += 1;
            roles[p] = Some(Role::LoopEnd { id, end: LoopEnd::Open });
            roles[q] = Some(Role::LoopEnd { id, end: LoopEnd::Close });
            loop_info.push((id, owner, p, q));
        } else {
            let (white_pt, black_pt) = if p % 2 == 0 { (p, q) } else { (q, p) };
            let w = ph.pi1.block_index_of(white_pt);
            let c = ph.pi2.block_index_of(black_pt);
            let white_is_child = w != seed_block && white_pt == max_nonhat[w];
            let black_is_child = black_pt == max_hat[c];
            debug_assert!(
                !(white_is_child && black_is_child),
                "both maxima matched; the ascendancy would loop"
            );
            if white_is_child {
                // edge upward from the white vertex: the white slot is its
                // connection to the parent, the black slot holds the child
                roles[white_pt] = Some(Role::ParentEdge);
                roles[black_pt] = Some(Role::ChildEdge { child: w });
            } else if black_is_child {
                roles[black_pt] = Some(Role::ParentEdge);
                roles[white_pt] = Some(Role::ChildEdge {
                    child: black_offset + c,
                });
            } else {
                let label = next_thorn;
                next_thorn += 1;
                roles[white_pt] = Some(Role::Thorn { label });
                roles[black_pt] = Some(Role::Thorn { label });
            }
        }
    }

    let vertex_count = whites.len() + blacks.len();
    let mut vertices = Vec::with_capacity(vertex_count);
    let mut loop_assignments = std::collections::BTreeMap::new();
    for vi in 0..vertex_count {
        let (color, block, maximum) = if vi < black_offset {
            (Color::White, &whites[vi], max_nonhat[vi])
        } else {
            (Color::Black, &blacks[vi - black_offset], max_hat[vi - black_offset])
        };
        let own_slots: Vec<usize> = block
            .iter()
            .copied()
            .filter(|&p| (p % 2 == 0) == (color == Color::White))
            .collect();
        let kind = if color == Color::White && vi == seed_block {
            VertexKind::SeedRoot
        } else if roles[maximum] == Some(Role::ParentEdge) {
            VertexKind::Internal
        } else {
            VertexKind::NonSeedRoot
        };
        let descendants: Vec<Slot> = own_slots
            .iter()
            .filter(|&&p| roles[p] != Some(Role::ParentEdge))
            .map(|&p| match roles[p].expect("every slot classified") {
                Role::ChildEdge { child } => Slot::Edge {
                    child: child as u32,
                },
                Role::Thorn { label } => Slot::Thorn { label },
                Role::LoopEnd { id, end } => Slot::Loop { id, end },
                Role::ParentEdge => unreachable!(),
            })
            .collect();
        let arrow_to = if kind == VertexKind::NonSeedRoot {
            // the maximal loop points at the vertex whose opposite block
            // holds its labels
            Some(match color {
                Color::White => (black_offset + ph.pi2.block_index_of(maximum)) as u32,
                Color::Black => ph.pi1.block_index_of(maximum) as u32,
            })
        } else {
            None
        };
        vertices.push(ForestVertex {
            id: vi as u32,
            color,
            kind,
            descendants,
            arrow_to,
        });
    }
    for &(id, owner, open, _) in &loop_info {
        let v = &vertices[owner];
        let is_max_of_root =
            v.kind == VertexKind::NonSeedRoot && matches!(v.descendants.last(), Some(Slot::Loop { id: l, .. }) if *l == id);
        if is_max_of_root {
            continue;
        }
        let target = if owner < black_offset {
            (black_offset + ph.pi2.block_index_of(open)) as u32
        } else {
            ph.pi1.block_index_of(open) as u32
        };
        loop_assignments.insert(id, target);
    }

    let forest = PermutedForest {
        n: n as u32,
        vertices,
        loop_assignments,
    };
    debug_assert_eq!(
        validate_forest(&forest),
        Ok(()),
        "forward construction must produce a valid forest"
    );
    canonicalize(&forest)
}

// Recovery positions of a vertex: the descendant slots in order, then the
// parent connection for internal vertices.
fn position_count(v: &ForestVertex) -> usize {
    v.descendants.len() + usize::from(v.kind == VertexKind::Internal)
}

/// Map a permuted forest back to the unique partitioned hypermap producing
/// it.
pub fn theta_inverse(f: &PermutedForest) -> Result<PartitionedHypermap, BijectionError> {
    let a = analyze(f).map_err(BijectionError::InvalidForest)?;
    let n = f.n as usize;
    let mut labels: Vec<Vec<Option<i32>>> =
        f.vertices.iter().map(|v| vec![None; position_count(v)]).collect();

    // the seed's leftmost slot carries label 1
    labels[a.seed][0] = Some(1);
    let mut cur = (a.seed, 0usize);
    for i in 1..=n as i32 {
        // hat partner of i
        let target = opposite_vertex(f, &a, cur.0, cur.1)?;
        let slot = first_unrecovered(&labels[target])
            .ok_or(BijectionError::RecoveryStuck(f.vertices[target].id))?;
        labels[target][slot] = Some(-i);
        if i == n as i32 {
            break;
        }
        // successor i+1 sits on the white vertex forced by the hat slot
        let wtarget = opposite_vertex(f, &a, target, slot)?;
        let wslot = first_unrecovered(&labels[wtarget])
            .ok_or(BijectionError::RecoveryStuck(f.vertices[wtarget].id))?;
        labels[wtarget][wslot] = Some(i + 1);
        cur = (wtarget, wslot);
    }
    debug_assert!(
        labels.iter().all(|l| l.iter().all(Option::is_some)),
        "recovery must exhaust every slot"
    );

    // read off the pairing from loops, edges and matched thorns
    let mut pairs: Vec<(i32, i32)> = Vec::new();
    for (_, &(owner, open, close)) in &a.loops {
        pairs.push((labels[owner][open].unwrap(), labels[owner][close].unwrap()));
    }
    for (child, parent) in a.parent.iter().enumerate() {
        if let Some(parent) = parent {
            let parent_slot = f.vertices[*parent]
                .descendants
                .iter()
                .position(|s| matches!(s, Slot::Edge { child: c } if a.idx_of[c] == child))
                .expect("edge recorded on the parent");
            let child_parent_pos = position_count(&f.vertices[child]) - 1;
            pairs.push((
                labels[*parent][parent_slot].unwrap(),
                labels[child][child_parent_pos].unwrap(),
            ));
        }
    }
    for (_, &((wv, ws), (bv, bs))) in &a.thorns {
        pairs.push((labels[wv][ws].unwrap(), labels[bv][bs].unwrap()));
    }
    let f3 = Pairing::from_pairs(n, &pairs).map_err(|_| {
        BijectionError::BadRecovery(HypermapError::NotAPartition(
            "recovered labels do not pair up".into(),
        ))
    })?;

    // blocks: each vertex contributes its labels plus their forced partners
    let mut pi1_blocks: Vec<Vec<i32>> = Vec::new();
    let mut pi2_blocks: Vec<Vec<i32>> = Vec::new();
    for (vi, v) in f.vertices.iter().enumerate() {
        let mut block = Vec::new();
        for l in labels[vi].iter().flatten() {
            match v.color {
                Color::White => {
                    let k = *l;
                    debug_assert!(k > 0);
                    block.push(k);
                    block.push(if k == 1 { -(n as i32) } else { -(k - 1) });
                }
                Color::Black => {
                    debug_assert!(*l < 0);
                    block.push(*l);
                    block.push(-*l);
                }
            }
        }
        match v.color {
            Color::White => pi1_blocks.push(block),
            Color::Black => pi2_blocks.push(block),
        }
    }
    let pi1 = GroundSetPartition::from_point_blocks(n, &pi1_blocks)?;
    let pi2 = GroundSetPartition::from_point_blocks(n, &pi2_blocks)?;
    Ok(PartitionedHypermap::new(f3, pi1, pi2)?)
}

fn first_unrecovered(labels: &[Option<i32>]) -> Option<usize> {
    labels.iter().position(Option::is_none)
}

// The opposite-color vertex forced by the slot at `pos` of vertex `v`.
fn opposite_vertex(
    f: &PermutedForest,
    a: &Analysis,
    v: usize,
    pos: usize,
) -> Result<usize, BijectionError> {
    let vertex = &f.vertices[v];
    if pos == vertex.descendants.len() {
        // the parent connection of an internal vertex
        return a.parent[v].ok_or(BijectionError::RecoveryStuck(vertex.id));
    }
    match &vertex.descendants[pos] {
        Slot::Edge { child } => Ok(a.idx_of[child]),
        Slot::Thorn { label } => {
            let ((wv, _), (bv, _)) = a.thorns[label];
            Ok(match vertex.color {
                Color::White => bv,
                Color::Black => wv,
            })
        }
        Slot::Loop { id, .. } => match f.loop_assignments.get(id) {
            Some(target) => Ok(a.idx_of[target]),
            None => vertex
                .arrow_to
                .map(|t| a.idx_of[&t])
                .ok_or(BijectionError::RecoveryStuck(vertex.id)),
        },
    }
}

/// Forward map plus the degree array of the input, for the conversion
/// front end.
pub fn theta_forward_with_degree(ph: &PartitionedHypermap) -> (PermutedForest, DegreeArray) {
    let d = ph.degree_statistics();
    let f = theta_forward(ph);
    debug_assert_eq!(crate::forests::forest_degree(&f), d);
    (f, d)
}
