//! Group elements in canonical form, the group law for the supported
//! families, and Cayley-ball enumeration.
//!
//! Four families are supported, all with decidable equality:
//!
//! | family                | element form                  | key              |
//! |-----------------------|-------------------------------|------------------|
//! | `finite_table`        | row index of the Cayley table | `t:3`            |
//! | `permutation_gens`    | image list                    | `p:1,0,2`        |
//! | `integer_matrix_gens` | integer matrix, row major     | `m:1,1;0,1`      |
//! | `free_group`          | freely reduced word           | `w:aB` (`w:` = 1)|
//!
//! Free-group letters are `a..z`; the uppercase letter is the inverse.

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Default cap on the number of elements in an enumerated ball.
pub const DEFAULT_BALL_CAP: usize = 20_000;

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Square integer matrix with arbitrary-precision entries, row major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    dim: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Validation("matrix must be square and non-empty".into()));
        }
        let entries = rows.iter().flatten().map(|&v| BigInt::from(v)).collect();
        Ok(Self { dim, entries })
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![BigInt::zero(); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = BigInt::one();
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.dim + j]
    }

    fn mul(&self, other: &Self) -> Self {
        let n = self.dim;
        let mut entries = vec![BigInt::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    entries[i * n + j] += a * &other.entries[k * n + j];
                }
            }
        }
        Self { dim: n, entries }
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        let n = self.dim;
        let mut a = self.entries.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k * n + k].is_zero() {
                match (k + 1..n).find(|&r| !a[r * n + k].is_zero()) {
                    Some(r) => {
                        for c in 0..n {
                            a.swap(k * n + c, r * n + c);
                        }
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j];
                    a[i * n + j] = v / &prev;
                }
            }
            prev = a[k * n + k].clone();
        }
        sign * &a[n * n - 1]
    }

    /// Inverse over the integers; `None` unless the determinant is a unit.
    pub fn inverse(&self) -> Option<Self> {
        let n = self.dim;
        let mut a: Vec<BigRational> = self.entries.iter().map(|v| BigRational::from_integer(v.clone())).collect();
        let mut inv: Vec<BigRational> = Self::identity(n).entries.into_iter().map(BigRational::from_integer).collect();
        for col in 0..n {
            let piv = (col..n).find(|&r| !a[r * n + col].is_zero())?;
            for c in 0..n {
                a.swap(col * n + c, piv * n + c);
                inv.swap(col * n + c, piv * n + c);
            }
            let p = a[col * n + col].clone();
            for c in 0..n {
                a[col * n + c] /= &p;
                inv[col * n + c] /= &p;
            }
            for r in 0..n {
                if r == col || a[r * n + col].is_zero() {
                    continue;
                }
                let f = a[r * n + col].clone();
                for c in 0..n {
                    let t = &f * &a[col * n + c];
                    a[r * n + c] -= t;
                    let t = &f * &inv[col * n + c];
                    inv[r * n + c] -= t;
                }
            }
        }
        let entries = inv
            .into_iter()
            .map(|v| v.is_integer().then(|| v.to_integer()))
            .collect::<Option<Vec<_>>>()?;
        Some(Self { dim: n, entries })
    }
}

/// A group element in canonical form. Equal elements have identical values.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    Table(usize),
    Perm(Vec<u32>),
    Matrix(IntMatrix),
    /// Freely reduced word; letter `k+1` is generator `k`, `-(k+1)` its inverse.
    Word(Vec<i32>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    FiniteTable,
    PermutationGens,
    IntegerMatrixGens,
    FreeGroup,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableGenerator {
    pub name: String,
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PermGenerator {
    pub name: String,
    pub images: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixGenerator {
    pub name: String,
    pub rows: Vec<Vec<i64>>,
}

/// The on-disk description of a group. Its compact JSON serialization is
/// the canonical form hashed into the spec digest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Presentation {
    FiniteTable {
        table: Vec<Vec<usize>>,
        generators: Vec<TableGenerator>,
    },
    PermutationGens {
        degree: usize,
        generators: Vec<PermGenerator>,
    },
    IntegerMatrixGens {
        dim: usize,
        generators: Vec<MatrixGenerator>,
    },
    FreeGroup {
        rank: usize,
    },
}

#[derive(Clone, Debug)]
enum Law {
    Table { table: Vec<Vec<usize>>, inverse: Vec<usize>, identity: usize },
    Perm { degree: usize },
    Matrix { dim: usize },
    Free { rank: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub element: GroupElement,
}

/// A validated group description together with its group law.
#[derive(Clone, Debug)]
pub struct GroupSpec {
    presentation: Presentation,
    law: Law,
    generators: Vec<Generator>,
    digest: String,
}

fn letter_char(letter: i32) -> char {
    let k = (letter.unsigned_abs() - 1) as u8;
    if letter > 0 {
        (b'a' + k) as char
    } else {
        (b'A' + k) as char
    }
}

impl GroupSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let presentation: Presentation =
            serde_json::from_str(text).map_err(|e| Error::Malformed(format!("group spec: {e}")))?;
        Self::new(presentation)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Malformed(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn new(presentation: Presentation) -> Result<Self> {
        let (law, listed) = match &presentation {
            Presentation::FiniteTable { table, generators } => {
                let (identity, inverse) = validate_table(table)?;
                let mut listed = Vec::new();
                for g in generators {
                    if g.index >= table.len() {
                        return Err(Error::Validation(format!("generator {} index out of range", g.name)));
                    }
                    listed.push(Generator { name: g.name.clone(), element: GroupElement::Table(g.index) });
                }
                (Law::Table { table: table.clone(), inverse, identity }, listed)
            }
            Presentation::PermutationGens { degree, generators } => {
                if *degree == 0 {
                    return Err(Error::Validation("permutation degree must be positive".into()));
                }
                let mut listed = Vec::new();
                for g in generators {
                    if g.images.len() != *degree {
                        return Err(Error::Validation(format!("generator {} has wrong degree", g.name)));
                    }
                    let mut seen = vec![false; *degree];
                    for &i in &g.images {
                        if i as usize >= *degree || std::mem::replace(&mut seen[i as usize], true) {
                            return Err(Error::Validation(format!("generator {} is not a permutation", g.name)));
                        }
                    }
                    listed.push(Generator { name: g.name.clone(), element: GroupElement::Perm(g.images.clone()) });
                }
                (Law::Perm { degree: *degree }, listed)
            }
            Presentation::IntegerMatrixGens { dim, generators } => {
                let mut listed = Vec::new();
                for g in generators {
                    let m = IntMatrix::from_rows(&g.rows)?;
                    if m.dim() != *dim {
                        return Err(Error::Validation(format!("generator {} has wrong dimension", g.name)));
                    }
                    if !m.determinant().abs().is_one() {
                        return Err(Error::Validation(format!("generator {} has determinant other than ±1", g.name)));
                    }
                    listed.push(Generator { name: g.name.clone(), element: GroupElement::Matrix(m) });
                }
                (Law::Matrix { dim: *dim }, listed)
            }
            Presentation::FreeGroup { rank } => {
                if *rank == 0 || *rank > 26 {
                    return Err(Error::Validation("free group rank must be in 1..=26".into()));
                }
                let listed = (1..=*rank as i32)
                    .map(|l| Generator { name: letter_char(l).to_string(), element: GroupElement::Word(vec![l]) })
                    .collect();
                (Law::Free { rank: *rank }, listed)
            }
        };
        let canonical = serde_json::to_vec(&presentation).expect("presentation serializes");
        let mut spec = Self { presentation, law, generators: Vec::new(), digest: sha256_hex(&canonical) };
        spec.generators = spec.close_generators(listed)?;
        Ok(spec)
    }

    /// Adjoins missing inverses; rejects the identity.
    fn close_generators(&self, listed: Vec<Generator>) -> Result<Vec<Generator>> {
        let id = self.identity();
        let mut out: Vec<Generator> = Vec::new();
        let mut seen = HashSet::new();
        for g in &listed {
            if g.element == id {
                return Err(Error::Validation(format!("generator {} is the identity", g.name)));
            }
            if seen.insert(g.element.clone()) {
                out.push(g.clone());
            }
        }
        for g in &listed {
            let inv = self.inverse(&g.element)?;
            if seen.insert(inv.clone()) {
                let name = match &inv {
                    GroupElement::Word(w) => letter_char(w[0]).to_string(),
                    _ => format!("{}^-1", g.name),
                };
                out.push(Generator { name, element: inv });
            }
        }
        Ok(out)
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn family(&self) -> Family {
        match self.presentation {
            Presentation::FiniteTable { .. } => Family::FiniteTable,
            Presentation::PermutationGens { .. } => Family::PermutationGens,
            Presentation::IntegerMatrixGens { .. } => Family::IntegerMatrixGens,
            Presentation::FreeGroup { .. } => Family::FreeGroup,
        }
    }

    /// Lowercase hex SHA-256 of the canonical serialization.
    pub fn digest(&self) -> &str {
        &self.digest
    }

    /// Symmetric generating set: listed generators followed by adjoined inverses.
    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn generator_elements(&self) -> Vec<GroupElement> {
        self.generators.iter().map(|g| g.element.clone()).collect()
    }

    /// Order of the group when it is known to be finite.
    pub fn order(&self) -> Option<usize> {
        match &self.law {
            Law::Table { table, .. } => Some(table.len()),
            _ => None,
        }
    }

    pub fn identity(&self) -> GroupElement {
        match &self.law {
            Law::Table { identity, .. } => GroupElement::Table(*identity),
            Law::Perm { degree } => GroupElement::Perm((0..*degree as u32).collect()),
            Law::Matrix { dim } => GroupElement::Matrix(IntMatrix::identity(*dim)),
            Law::Free { .. } => GroupElement::Word(Vec::new()),
        }
    }

    /// Checks that `g` is a well-formed element of this group.
    pub fn check(&self, g: &GroupElement) -> Result<()> {
        let ok = match (&self.law, g) {
            (Law::Table { table, .. }, GroupElement::Table(i)) => *i < table.len(),
            (Law::Perm { degree }, GroupElement::Perm(p)) => {
                let mut seen = vec![false; *degree];
                p.len() == *degree
                    && p.iter().all(|&i| (i as usize) < *degree && !std::mem::replace(&mut seen[i as usize], true))
            }
            (Law::Matrix { dim }, GroupElement::Matrix(m)) => m.dim() == *dim,
            (Law::Free { rank }, GroupElement::Word(w)) => {
                w.iter().all(|&l| l != 0 && l.unsigned_abs() as usize <= *rank)
                    && w.windows(2).all(|p| p[0] != -p[1])
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Usage(format!("element {g:?} does not belong to this group")))
        }
    }

    fn mismatch(&self, g: &GroupElement, h: &GroupElement) -> Error {
        Error::Usage(format!("cannot combine {g:?} and {h:?} in a {:?} group", self.family()))
    }

    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        match (&self.law, g, h) {
            (Law::Table { table, .. }, GroupElement::Table(a), GroupElement::Table(b))
                if *a < table.len() && *b < table.len() =>
            {
                Ok(GroupElement::Table(table[*a][*b]))
            }
            (Law::Perm { degree }, GroupElement::Perm(a), GroupElement::Perm(b))
                if a.len() == *degree && b.len() == *degree =>
            {
                // (ab)(i) = a(b(i))
                Ok(GroupElement::Perm(b.iter().map(|&i| a[i as usize]).collect()))
            }
            (Law::Matrix { dim }, GroupElement::Matrix(a), GroupElement::Matrix(b))
                if a.dim() == *dim && b.dim() == *dim =>
            {
                Ok(GroupElement::Matrix(a.mul(b)))
            }
            (Law::Free { .. }, GroupElement::Word(a), GroupElement::Word(b)) => {
                let mut w = a.clone();
                for &l in b {
                    if w.last() == Some(&-l) {
                        w.pop();
                    } else {
                        w.push(l);
                    }
                }
                Ok(GroupElement::Word(w))
            }
            _ => Err(self.mismatch(g, h)),
        }
    }

    pub fn inverse(&self, g: &GroupElement) -> Result<GroupElement> {
        match (&self.law, g) {
            (Law::Table { inverse, .. }, GroupElement::Table(a)) if *a < inverse.len() => {
                Ok(GroupElement::Table(inverse[*a]))
            }
            (Law::Perm { degree }, GroupElement::Perm(p)) if p.len() == *degree => {
                let mut inv = vec![0u32; *degree];
                for (i, &j) in p.iter().enumerate() {
                    inv[j as usize] = i as u32;
                }
                Ok(GroupElement::Perm(inv))
            }
            (Law::Matrix { dim }, GroupElement::Matrix(m)) if m.dim() == *dim => m
                .inverse()
                .map(GroupElement::Matrix)
                .ok_or_else(|| Error::Validation("matrix is not invertible over the integers".into())),
            (Law::Free { .. }, GroupElement::Word(w)) => Ok(GroupElement::Word(w.iter().rev().map(|l| -l).collect())),
            _ => Err(self.mismatch(g, g)),
        }
    }

    /// Canonical string form of an element.
    pub fn key(&self, g: &GroupElement) -> String {
        element_key(g)
    }

    pub fn parse_key(&self, key: &str) -> Result<GroupElement> {
        let bad = || Error::Malformed(format!("bad element key {key:?}"));
        let (tag, body) = key.split_once(':').ok_or_else(bad)?;
        let g = match tag {
            "t" => GroupElement::Table(body.parse().map_err(|_| bad())?),
            "p" => GroupElement::Perm(
                body.split(',').map(|s| s.parse::<u32>()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?,
            ),
            "m" => {
                let rows: Vec<Vec<BigInt>> = body
                    .split(';')
                    .map(|r| r.split(',').map(|s| s.parse::<BigInt>()).collect::<std::result::Result<Vec<_>, _>>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad())?;
                let dim = rows.len();
                if rows.iter().any(|r| r.len() != dim) {
                    return Err(bad());
                }
                GroupElement::Matrix(IntMatrix { dim, entries: rows.into_iter().flatten().collect() })
            }
            "w" => GroupElement::Word(
                body.chars()
                    .map(|c| match c {
                        'a'..='z' => Ok(c as i32 - 'a' as i32 + 1),
                        'A'..='Z' => Ok(-(c as i32 - 'A' as i32 + 1)),
                        _ => Err(bad()),
                    })
                    .collect::<Result<_>>()?,
            ),
            _ => return Err(bad()),
        };
        self.check(&g).map_err(|_| Error::Malformed(format!("element key {key:?} is not in this group")))?;
        Ok(g)
    }

    /// Length of a shortest word in the symmetric set `gens` equal to `g`.
    pub fn word_length(&self, g: &GroupElement, gens: &[GroupElement], max_radius: usize) -> Result<usize> {
        self.check(g)?;
        let mut bfs = BallBuilder::new(self, gens, DEFAULT_BALL_CAP)?;
        loop {
            if let Some(&i) = bfs.index.get(g) {
                return Ok(bfs.lengths[i]);
            }
            if bfs.radius >= max_radius || !bfs.grow()? {
                return Err(Error::Unreachable { element: self.key(g), radius: max_radius });
            }
        }
    }

    /// All elements of word length at most `radius` in `gens`.
    pub fn enumerate_ball(&self, gens: &[GroupElement], radius: usize, cap: usize) -> Result<Ball> {
        let mut bfs = BallBuilder::new(self, gens, cap)?;
        while bfs.radius < radius {
            bfs.grow()?;
        }
        Ok(bfs.finish(radius))
    }

    /// Ball grown until a sphere comes out empty; its radius is the
    /// diameter of the Cayley graph. Fails with a resource error if the
    /// group is larger than `cap`.
    pub fn saturated_ball(&self, gens: &[GroupElement], cap: usize) -> Result<Ball> {
        let mut bfs = BallBuilder::new(self, gens, cap)?;
        while bfs.grow()? {}
        let radius = bfs.radius - 1;
        Ok(bfs.finish(radius))
    }
}

pub fn element_key(g: &GroupElement) -> String {
    match g {
        GroupElement::Table(i) => format!("t:{i}"),
        GroupElement::Perm(p) => {
            format!("p:{}", p.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","))
        }
        GroupElement::Matrix(m) => {
            let rows: Vec<String> = (0..m.dim)
                .map(|i| (0..m.dim).map(|j| m.get(i, j).to_string()).collect::<Vec<_>>().join(","))
                .collect();
            format!("m:{}", rows.join(";"))
        }
        GroupElement::Word(w) => format!("w:{}", w.iter().map(|&l| letter_char(l)).collect::<String>()),
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&element_key(self))
    }
}

fn validate_table(table: &[Vec<usize>]) -> Result<(usize, Vec<usize>)> {
    let n = table.len();
    let bad = |m: &str| Err(Error::Validation(format!("group table: {m}")));
    if n == 0 || table.iter().any(|r| r.len() != n) {
        return bad("must be a non-empty square table");
    }
    let is_perm = |values: Vec<usize>| {
        let mut seen = vec![false; n];
        values.into_iter().all(|v| v < n && !std::mem::replace(&mut seen[v], true))
    };
    for (i, row) in table.iter().enumerate() {
        if !is_perm(row.clone()) || !is_perm(table.iter().map(|r| r[i]).collect()) {
            return bad("not a Latin square");
        }
    }
    let identity = match (0..n).find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x)) {
        Some(e) => e,
        None => return bad("no identity element"),
    };
    let mut inverse = vec![0; n];
    for x in 0..n {
        match (0..n).find(|&y| table[x][y] == identity && table[y][x] == identity) {
            Some(y) => inverse[x] = y,
            None => return bad("missing two-sided inverse"),
        }
    }
    for a in 0..n {
        for b in 0..n {
            let ab = table[a][b];
            for c in 0..n {
                if table[ab][c] != table[a][table[b][c]] {
                    return bad("operation is not associative");
                }
            }
        }
    }
    Ok((identity, inverse))
}

/// Breadth-first layer growth shared by ball enumeration and word length.
struct BallBuilder<'a> {
    spec: &'a GroupSpec,
    gens: Vec<GroupElement>,
    cap: usize,
    radius: usize,
    elements: Vec<GroupElement>,
    lengths: Vec<usize>,
    parent: Vec<Option<(usize, usize)>>,
    index: HashMap<GroupElement, usize>,
    layer_start: usize,
}

impl<'a> BallBuilder<'a> {
    fn new(spec: &'a GroupSpec, gens: &[GroupElement], cap: usize) -> Result<Self> {
        let identity = spec.identity();
        let mut sorted: Vec<GroupElement> = gens.to_vec();
        sorted.sort();
        sorted.dedup();
        let set: HashSet<&GroupElement> = sorted.iter().collect();
        for g in &sorted {
            spec.check(g)?;
            if *g == identity {
                return Err(Error::Validation("generating set contains the identity".into()));
            }
            if !set.contains(&spec.inverse(g)?) {
                return Err(Error::Validation(format!("generating set is not symmetric: missing inverse of {g}")));
            }
        }
        if cap == 0 {
            return Err(Error::Resource { what: "ball size".into(), cap });
        }
        let mut index = HashMap::new();
        index.insert(identity.clone(), 0);
        Ok(Self {
            spec,
            gens: sorted,
            cap,
            radius: 0,
            elements: vec![identity],
            lengths: vec![0],
            parent: vec![None],
            index,
            layer_start: 0,
        })
    }

    /// Adds the next sphere; returns false when it is empty (ball saturated).
    fn grow(&mut self) -> Result<bool> {
        let mut fresh: HashMap<GroupElement, (usize, usize)> = HashMap::new();
        for p in self.layer_start..self.elements.len() {
            for (s, gen) in self.gens.iter().enumerate() {
                let x = self.spec.multiply(&self.elements[p], gen)?;
                if !self.index.contains_key(&x) {
                    fresh.entry(x).or_insert((p, s));
                }
            }
        }
        self.radius += 1;
        if self.elements.len() + fresh.len() > self.cap {
            return Err(Error::Resource { what: "ball size".into(), cap: self.cap });
        }
        let mut layer: Vec<(GroupElement, (usize, usize))> = fresh.into_iter().collect();
        layer.sort_by(|a, b| a.0.cmp(&b.0));
        self.layer_start = self.elements.len();
        let grew = !layer.is_empty();
        for (x, par) in layer {
            self.index.insert(x.clone(), self.elements.len());
            self.elements.push(x);
            self.lengths.push(self.radius);
            self.parent.push(Some(par));
        }
        Ok(grew)
    }

    fn finish(self, radius: usize) -> Ball {
        Ball {
            radius,
            elements: self.elements,
            lengths: self.lengths,
            parent: self.parent,
            index: self.index,
            generating_set: self.gens,
        }
    }
}

/// A Cayley ball: identity first, then by word length, ties in canonical order.
#[derive(Clone, Debug)]
pub struct Ball {
    radius: usize,
    elements: Vec<GroupElement>,
    lengths: Vec<usize>,
    parent: Vec<Option<(usize, usize)>>,
    index: HashMap<GroupElement, usize>,
    generating_set: Vec<GroupElement>,
}

/// Products `elements[i]⁻¹·elements[j]` for all ordered pairs of a ball.
#[derive(Clone, Debug)]
pub struct PairProducts {
    /// Distinct products, in order of first appearance scanning pairs row-major.
    pub keys: Vec<GroupElement>,
    pub key_index: HashMap<GroupElement, usize>,
    /// `pair_key[i * n + j]` indexes into `keys`.
    pub pair_key: Vec<usize>,
    /// Smallest `len(x_i) + len(x_j)` over pairs giving the key; at most twice the radius.
    pub length_bound: Vec<usize>,
}

impl PairProducts {
    pub fn in_double_ball(&self, key: usize, radius: usize) -> bool {
        self.length_bound[key] <= 2 * radius
    }
}

impl Ball {
    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &GroupElement {
        &self.elements[i]
    }

    pub fn index_of(&self, g: &GroupElement) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.index.contains_key(g)
    }

    pub fn word_length(&self, i: usize) -> usize {
        self.lengths[i]
    }

    /// For a non-identity element, `(prefix index, generator)` with
    /// `element = prefix · generator` and `len(prefix) = len(element) - 1`.
    pub fn split(&self, i: usize) -> Option<(usize, &GroupElement)> {
        self.parent[i].map(|(p, s)| (p, &self.generating_set[s]))
    }

    pub fn generating_set(&self) -> &[GroupElement] {
        &self.generating_set
    }

    /// Digest of the declared radius followed by the element keys in ball order.
    pub fn ordering_digest(&self) -> String {
        let mut lines = vec![format!("radius {}", self.radius)];
        lines.extend(self.elements.iter().map(element_key));
        sha256_hex(lines.join("\n").as_bytes())
    }

    pub fn pair_products(&self, spec: &GroupSpec) -> Result<PairProducts> {
        let n = self.len();
        let inverses = self.elements.iter().map(|g| spec.inverse(g)).collect::<Result<Vec<_>>>()?;
        let mut keys = Vec::new();
        let mut key_index = HashMap::new();
        let mut pair_key = Vec::with_capacity(n * n);
        let mut length_bound = Vec::new();
        for (inv, &len_i) in inverses.iter().zip(&self.lengths) {
            for (h, &len_j) in self.elements.iter().zip(&self.lengths) {
                let g = spec.multiply(inv, h)?;
                let len = len_i + len_j;
                let k = *key_index.entry(g.clone()).or_insert_with(|| {
                    keys.push(g);
                    length_bound.push(len);
                    keys.len() - 1
                });
                length_bound[k] = length_bound[k].min(len);
                pair_key.push(k);
            }
        }
        Ok(PairProducts { keys, key_index, pair_key, length_bound })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{cyclic, free_group, sl_elementary};

    fn free2() -> GroupSpec {
        free_group(2)
    }

    fn elementary(dim: usize, i: usize, j: usize, v: i64) -> GroupElement {
        let mut rows = vec![vec![0i64; dim]; dim];
        for (k, row) in rows.iter_mut().enumerate() {
            row[k] = 1;
        }
        rows[i][j] = v;
        GroupElement::Matrix(IntMatrix::from_rows(&rows).unwrap())
    }

    fn sl3() -> GroupSpec {
        sl_elementary(3)
    }

    fn word(spec: &GroupSpec, s: &str) -> GroupElement {
        spec.parse_key(&format!("w:{s}")).unwrap()
    }

    #[test]
    fn multiply_examples() {
        let z3 = cyclic(3);
        let s = GroupElement::Table(1);
        let s2 = GroupElement::Table(2);
        assert_eq!(z3.multiply(&s, &s2).unwrap(), z3.identity());

        let f = free2();
        let prod = f.multiply(&f.parse_key("w:ab").unwrap(), &f.parse_key("w:Ba").unwrap()).unwrap();
        assert_eq!(prod, word(&f, "aa"));

        let m = sl3();
        assert_eq!(m.multiply(&elementary(3, 0, 1, 1), &elementary(3, 0, 1, 1)).unwrap(), elementary(3, 0, 1, 2));
    }

    #[test]
    fn mixed_elements_are_usage_errors() {
        let z3 = cyclic(3);
        let err = z3.multiply(&GroupElement::Table(1), &GroupElement::Word(vec![1])).unwrap_err();
        assert!(matches!(err, Error::Usage(_)));
        assert!(matches!(z3.multiply(&GroupElement::Table(1), &GroupElement::Table(7)), Err(Error::Usage(_))));
    }

    #[test]
    fn word_length_examples() {
        let z3 = cyclic(3);
        let gens = z3.generator_elements();
        assert_eq!(z3.word_length(&z3.identity(), &gens, 5).unwrap(), 0);
        assert_eq!(z3.word_length(&GroupElement::Table(2), &gens, 5).unwrap(), 1);
        let f = free2();
        let gens = f.generator_elements();
        assert_eq!(f.word_length(&word(&f, "abab"), &gens, 10).unwrap(), 4);
        assert!(matches!(f.word_length(&word(&f, "abab"), &gens, 3), Err(Error::Unreachable { .. })));
    }

    #[test]
    fn ball_examples() {
        let z3 = cyclic(3);
        assert_eq!(z3.enumerate_ball(&z3.generator_elements(), 1, 100).unwrap().len(), 3);
        let z2 = cyclic(2);
        assert_eq!(z2.enumerate_ball(&z2.generator_elements(), 1, 100).unwrap().len(), 2);
        let f = free2();
        let ball = f.enumerate_ball(&f.generator_elements(), 2, 100).unwrap();
        // brute force: all freely reduced words over {a,A,b,B} of length <= 2
        let letters = ['a', 'A', 'b', 'B'];
        let inv = |c: char| if c.is_lowercase() { c.to_ascii_uppercase() } else { c.to_ascii_lowercase() };
        let mut words = vec![String::new()];
        for &x in &letters {
            words.push(x.to_string());
            for &y in &letters {
                if y != inv(x) {
                    words.push(format!("{x}{y}"));
                }
            }
        }
        assert_eq!(words.len(), 17);
        assert_eq!(ball.len(), 17);
        for w in words {
            assert!(ball.contains(&word(&f, &w)), "{w}");
        }
    }

    #[test]
    fn ball_cap_is_resource_error() {
        let f = free2();
        let err = f.enumerate_ball(&f.generator_elements(), 3, 20).unwrap_err();
        assert_eq!(err, Error::Resource { what: "ball size".into(), cap: 20 });
    }

    #[test]
    fn ball_ordering_and_prefix() {
        let spec = sl3();
        let gens = spec.generator_elements();
        let b1 = spec.enumerate_ball(&gens, 1, 10_000).unwrap();
        let b2 = spec.enumerate_ball(&gens, 2, 10_000).unwrap();
        assert_eq!(b1.element(0), &spec.identity());
        assert_eq!(&b2.elements()[..b1.len()], b1.elements());
        assert_eq!(b1.len(), 13);
        for w in b2.elements().windows(2) {
            let (i, j) = (b2.index_of(&w[0]).unwrap(), b2.index_of(&w[1]).unwrap());
            let (li, lj) = (b2.word_length(i), b2.word_length(j));
            assert!(li < lj || (li == lj && w[0] < w[1]));
        }
        for g in b2.elements() {
            assert!(b2.contains(&spec.inverse(g).unwrap()));
        }
        assert_eq!(b2.ordering_digest(), spec.enumerate_ball(&gens, 2, 10_000).unwrap().ordering_digest());
    }

    #[test]
    fn splits_are_shortest() {
        let f = free2();
        let ball = f.enumerate_ball(&f.generator_elements(), 3, 1000).unwrap();
        for i in 1..ball.len() {
            let (p, s) = ball.split(i).unwrap();
            assert_eq!(ball.word_length(p) + 1, ball.word_length(i));
            assert_eq!(&f.multiply(ball.element(p), s).unwrap(), ball.element(i));
        }
        assert!(ball.split(0).is_none());
    }

    #[test]
    fn finite_balls_saturate() {
        let s3 = GroupSpec::new(Presentation::PermutationGens {
            degree: 3,
            generators: vec![
                PermGenerator { name: "t".into(), images: vec![1, 0, 2] },
                PermGenerator { name: "c".into(), images: vec![1, 2, 0] },
            ],
        })
        .unwrap();
        let gens = s3.generator_elements();
        let sizes: Vec<usize> = (0..5).map(|r| s3.enumerate_ball(&gens, r, 100).unwrap().len()).collect();
        assert_eq!(*sizes.last().unwrap(), 6);
        let sat = sizes.iter().position(|&s| s == 6).unwrap();
        assert!(sizes[sat..].iter().all(|&s| s == 6));
    }

    #[test]
    fn associativity_on_small_balls() {
        for spec in [cyclic(4), free2(), sl3()] {
            let ball = spec.enumerate_ball(&spec.generator_elements(), 1, 1000).unwrap();
            for g in ball.elements() {
                for h in ball.elements() {
                    for k in ball.elements() {
                        let left = spec.multiply(&spec.multiply(g, h).unwrap(), k).unwrap();
                        let right = spec.multiply(g, &spec.multiply(h, k).unwrap()).unwrap();
                        assert_eq!(left, right);
                    }
                }
            }
        }
    }

    #[test]
    fn inverses() {
        for spec in [cyclic(5), free2(), sl3()] {
            let ball = spec.enumerate_ball(&spec.generator_elements(), 2, 10_000).unwrap();
            for g in ball.elements() {
                let inv = spec.inverse(g).unwrap();
                assert_eq!(spec.inverse(&inv).unwrap(), *g);
                assert_eq!(spec.multiply(g, &inv).unwrap(), spec.identity());
            }
        }
    }

    #[test]
    fn spec_validation() {
        let bad_table = Presentation::FiniteTable {
            table: vec![vec![0, 1], vec![1, 1]],
            generators: vec![],
        };
        assert!(matches!(GroupSpec::new(bad_table), Err(Error::Validation(_))));
        let identity_gen = Presentation::FiniteTable {
            table: vec![vec![0, 1], vec![1, 0]],
            generators: vec![TableGenerator { name: "e".into(), index: 0 }],
        };
        assert!(GroupSpec::new(identity_gen).is_err());
        let singular = Presentation::IntegerMatrixGens {
            dim: 2,
            generators: vec![MatrixGenerator { name: "x".into(), rows: vec![vec![2, 0], vec![0, 1]] }],
        };
        assert!(GroupSpec::new(singular).is_err());
        let mixed = Presentation::PermutationGens {
            degree: 3,
            generators: vec![PermGenerator { name: "x".into(), images: vec![1, 0] }],
        };
        assert!(GroupSpec::new(mixed).is_err());
        // a Latin square that is not a group (no associativity)
        let quasi = Presentation::FiniteTable {
            table: vec![
                vec![0, 1, 2, 3, 4],
                vec![1, 0, 3, 4, 2],
                vec![2, 4, 0, 1, 3],
                vec![3, 2, 4, 0, 1],
                vec![4, 3, 1, 2, 0],
            ],
            generators: vec![],
        };
        assert!(GroupSpec::new(quasi).is_err());
    }

    #[test]
    fn inverses_are_adjoined() {
        let z3 = cyclic(3);
        let gens = z3.generator_elements();
        assert_eq!(gens, vec![GroupElement::Table(1), GroupElement::Table(2)]);
        assert_eq!(free2().generators().len(), 4);
        assert_eq!(sl3().generators().len(), 12);
    }

    #[test]
    fn digest_and_keys() {
        let text = r#"{"family":"free_group","rank":2}"#;
        let a = GroupSpec::from_json(text).unwrap();
        let b = GroupSpec::from_json("{ \"rank\": 2, \"family\": \"free_group\" }").unwrap();
        assert_eq!(a.digest(), b.digest());
        assert_eq!(a.digest().len(), 64);
        assert_ne!(a.digest(), cyclic(3).digest());
        let m = sl3();
        let e = elementary(3, 0, 2, -7);
        assert_eq!(m.parse_key(&m.key(&e)).unwrap(), e);
        assert_eq!(a.key(&a.identity()), "w:");
        assert!(a.parse_key("w:aA").is_err());
        assert!(a.parse_key("w:c").is_err());
        assert!(m.parse_key("t:1").is_err());
    }

    #[test]
    fn determinant_and_inverse() {
        let m = IntMatrix::from_rows(&[vec![2, 1], vec![1, 1]]).unwrap();
        assert_eq!(m.determinant(), BigInt::from(1));
        assert_eq!(m.inverse().unwrap(), IntMatrix::from_rows(&[vec![1, -1], vec![-1, 2]]).unwrap());
        let z = IntMatrix::from_rows(&[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(z.determinant(), BigInt::from(-1));
        assert!(IntMatrix::from_rows(&[vec![2, 0], vec![0, 1]]).unwrap().inverse().is_none());
    }
}
