//! Ready-made group specs for the standard small examples.

use crate::group::{GroupSpec, MatrixGenerator, PermGenerator, Presentation, TableGenerator};

/// Cyclic group ℤ/n as a Cayley table, generated by `s = 1`.
pub fn cyclic(n: usize) -> GroupSpec {
    let table = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
    GroupSpec::new(Presentation::FiniteTable {
        table,
        generators: vec![TableGenerator { name: "s".into(), index: 1 % n.max(1) }],
    })
    .expect("cyclic table is a group")
}

/// Cayley table of the symmetric group S₃; elements are the permutations of
/// {0,1,2} in lexicographic order of their image lists.
pub fn s3_table_presentation(all_nontrivial: bool) -> Presentation {
    let perms: Vec<[usize; 3]> = vec![[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let pos = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
    let table = perms
        .iter()
        .map(|a| perms.iter().map(|b| pos([a[b[0]], a[b[1]], a[b[2]]])).collect())
        .collect();
    let indices: Vec<usize> = if all_nontrivial { (1..6).collect() } else { vec![2, 3] };
    Presentation::FiniteTable {
        table,
        generators: indices.into_iter().map(|i| TableGenerator { name: format!("g{i}"), index: i }).collect(),
    }
}

pub fn s3_table() -> GroupSpec {
    GroupSpec::new(s3_table_presentation(false)).expect("S3 table is a group")
}

/// Replaces the generators of a finite table group by every non-identity element.
pub fn with_all_nontrivial(spec: &GroupSpec) -> Option<GroupSpec> {
    match spec.presentation() {
        Presentation::FiniteTable { table, .. } => {
            let identity = match spec.identity() {
                crate::group::GroupElement::Table(e) => e,
                _ => unreachable!(),
            };
            let generators = (0..table.len())
                .filter(|&i| i != identity)
                .map(|i| TableGenerator { name: format!("g{i}"), index: i })
                .collect();
            GroupSpec::new(Presentation::FiniteTable { table: table.clone(), generators }).ok()
        }
        _ => None,
    }
}

/// S₃ generated by a transposition and a 3-cycle.
pub fn s3_perm() -> GroupSpec {
    GroupSpec::new(Presentation::PermutationGens {
        degree: 3,
        generators: vec![
            PermGenerator { name: "t".into(), images: vec![1, 0, 2] },
            PermGenerator { name: "c".into(), images: vec![1, 2, 0] },
        ],
    })
    .expect("valid permutations")
}

pub fn free_group(rank: usize) -> GroupSpec {
    GroupSpec::new(Presentation::FreeGroup { rank }).expect("rank in range")
}

fn elementary_rows(dim: usize, i: usize, j: usize) -> Vec<Vec<i64>> {
    let mut rows = vec![vec![0i64; dim]; dim];
    for (k, row) in rows.iter_mut().enumerate() {
        row[k] = 1;
    }
    rows[i][j] = 1;
    rows
}

/// Integer Heisenberg group: upper unitriangular 3×3 matrices, generated by E₁₂ and E₂₃.
pub fn heisenberg() -> GroupSpec {
    GroupSpec::new(Presentation::IntegerMatrixGens {
        dim: 3,
        generators: vec![
            MatrixGenerator { name: "x".into(), rows: elementary_rows(3, 0, 1) },
            MatrixGenerator { name: "y".into(), rows: elementary_rows(3, 1, 2) },
        ],
    })
    .expect("unimodular generators")
}

/// SL(n, ℤ) with its elementary generators E_ij(1), i ≠ j.
pub fn sl_elementary(n: usize) -> GroupSpec {
    let mut generators = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                generators.push(MatrixGenerator { name: format!("E{}{}", i + 1, j + 1), rows: elementary_rows(n, i, j) });
            }
        }
    }
    GroupSpec::new(Presentation::IntegerMatrixGens { dim: n, generators }).expect("unimodular generators")
}
