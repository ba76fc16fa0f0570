//! Explicit graph constructions over finite fields: Cayley graphs on abelian
//! groups, the cubic-connection-set family, Kopparty's triple construction,
//! orthogonality graphs on projective points, the plane distance graph, and
//! the generalized cross-product toolkit.

use crate::field::{FieldElement, FieldError, FieldSpec};
use crate::graph::{Graph, GraphError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Cap on vertex counts produced by the constructions here.
pub const GRAPH_CAP: usize = 32768;
/// Cap on field order for table-driven coordinate arithmetic.
pub const FIELD_CAP: u64 = 1024;

#[derive(Debug, Error)]
pub enum ConstructError {
    #[error("connection set is not symmetric: missing inverse of {0:?}")]
    AsymmetricSet(Vec<u64>),
    #[error("connection set contains the identity")]
    IdentityInSet,
    #[error("group element {0:?} is not reduced modulo the group dimensions")]
    UnreducedElement(Vec<u64>),
    #[error("bad characteristic {0}: need a prime different from 3")]
    BadCharacteristic(u64),
    #[error("classification is undefined for even field order")]
    EvenCharacteristic,
    #[error("graph carries no projective classification labels")]
    MissingLabels,
    #[error("vertex set is empty")]
    EmptySet,
    #[error("vertex {0} in the target set is isolated")]
    IsolatedVertexInV1(usize),
    #[error("expected {expected} vectors of dimension {dim}, got {got}")]
    DimensionMismatch { expected: usize, dim: usize, got: usize },
    #[error("zero vector has no projective class")]
    ZeroVector,
    #[error("parameter t={0} must be even here")]
    NotEven(usize),
    #[error("construction size {0} exceeds cap {GRAPH_CAP}")]
    TooLarge(u64),
    #[error("field order {0} exceeds construction cap {FIELD_CAP}")]
    FieldTooLarge(u64),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

// ---------------------------------------------------------------------------
// Table-driven coordinate arithmetic
// ---------------------------------------------------------------------------

/// Index-level field operation tables; coordinates are canonical element
/// indexes in [0, q). Valid for q <= FIELD_CAP.
pub(crate) struct Arith {
    pub q: u32,
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    /// Quadratic character per index; all zeros when q is even.
    chi: Vec<i8>,
}

impl Arith {
    pub fn new(fs: &FieldSpec) -> Result<Arith, ConstructError> {
        let q64 = fs.order();
        if q64 > FIELD_CAP {
            return Err(ConstructError::FieldTooLarge(q64));
        }
        let q = q64 as usize;
        let els: Vec<FieldElement> = fs.elements().collect();
        let mut add = vec![0u32; q * q];
        let mut mul = vec![0u32; q * q];
        let mut neg = vec![0u32; q];
        let odd = fs.p() != 2;
        let mut chi = vec![0i8; q];
        for (i, a) in els.iter().enumerate() {
            neg[i] = fs.index_of(&fs.neg(a)) as u32;
            if odd {
                chi[i] = fs.quad_char(a)?;
            }
            for (j, b) in els.iter().enumerate() {
                add[i * q + j] = fs.index_of(&fs.add(a, b)) as u32;
                mul[i * q + j] = fs.index_of(&fs.mul(a, b)) as u32;
            }
        }
        Ok(Arith { q: q as u32, add, mul, neg, chi })
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        self.add[(a * self.q + b) as usize]
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[(a * self.q + b) as usize]
    }

    #[allow(dead_code)] // exercised by the symmetry tests
    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.neg[a as usize]
    }

    #[inline]
    pub fn chi(&self, a: u32) -> i8 {
        self.chi[a as usize]
    }

    #[inline]
    pub fn dot(&self, xs: &[u32], ys: &[u32]) -> u32 {
        let mut acc = 0u32;
        for (&x, &y) in xs.iter().zip(ys) {
            acc = self.add(acc, self.mul(x, y));
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// Cayley graphs on finite abelian groups
// ---------------------------------------------------------------------------

/// A finite abelian group given as a direct sum of cyclic factors, together
/// with a symmetric, identity-free connection set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CayleySpec {
    dims: Vec<u64>,
    set: Vec<Vec<u64>>,
}

impl CayleySpec {
    pub fn new(dims: Vec<u64>, set: Vec<Vec<u64>>) -> Result<CayleySpec, ConstructError> {
        assert!(!dims.is_empty() && dims.iter().all(|&d| d >= 1));
        let mut canon: Vec<Vec<u64>> = Vec::with_capacity(set.len());
        for s in &set {
            if s.len() != dims.len() || s.iter().zip(&dims).any(|(&c, &d)| c >= d) {
                return Err(ConstructError::UnreducedElement(s.clone()));
            }
            if s.iter().all(|&c| c == 0) {
                return Err(ConstructError::IdentityInSet);
            }
            canon.push(s.clone());
        }
        canon.sort_unstable();
        canon.dedup();
        for s in &canon {
            let inv: Vec<u64> = s.iter().zip(&dims).map(|(&c, &d)| (d - c) % d).collect();
            if canon.binary_search(&inv).is_err() {
                return Err(ConstructError::AsymmetricSet(inv));
            }
        }
        Ok(CayleySpec { dims, set: canon })
    }

    pub fn dims(&self) -> &[u64] {
        &self.dims
    }

    pub fn set(&self) -> &[Vec<u64>] {
        &self.set
    }

    pub fn order(&self) -> u64 {
        self.dims.iter().product()
    }

    fn index_of(&self, tuple: &[u64]) -> usize {
        let mut idx = 0u64;
        for (&c, &d) in tuple.iter().zip(&self.dims) {
            idx = idx * d + c;
        }
        idx as usize
    }

    fn tuple_of(&self, mut idx: u64) -> Vec<u64> {
        let mut t = vec![0u64; self.dims.len()];
        for i in (0..self.dims.len()).rev() {
            t[i] = idx % self.dims[i];
            idx /= self.dims[i];
        }
        t
    }
}

/// Cayley graph: vertices are group elements in row-major tuple order, and v
/// is adjacent to v+s for every s in the connection set. |S|-regular.
pub fn cayley_graph(spec: &CayleySpec) -> Result<Graph, ConstructError> {
    let n = spec.order();
    if n > GRAPH_CAP as u64 {
        return Err(ConstructError::TooLarge(n));
    }
    let n = n as usize;
    let mut g = Graph::new_empty(n);
    for v in 0..n {
        let tuple = spec.tuple_of(v as u64);
        for s in &spec.set {
            let w: Vec<u64> = tuple
                .iter()
                .zip(s)
                .zip(&spec.dims)
                .map(|((&a, &b), &d)| (a + b) % d)
                .collect();
            g.add_edge_unchecked(v, spec.index_of(&w));
        }
    }
    let labels: Vec<String> = (0..n).map(|v| tuple_label(&spec.tuple_of(v as u64))).collect();
    g.set_labels("cayley", labels);
    Ok(g)
}

fn tuple_label(t: &[u64]) -> String {
    let inner: Vec<String> = t.iter().map(|c| c.to_string()).collect();
    format!("({})", inner.join(","))
}

fn require_good_prime(p: u64) -> Result<(), ConstructError> {
    let prime = p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d));
    if !prime || p == 3 {
        return Err(ConstructError::BadCharacteristic(p));
    }
    Ok(())
}

/// Connection set {(x, x^3) : x != 0} over Z_p^2. Symmetric because the cube
/// of -x is -(x^3).
pub fn cubic_cayley_spec(p: u64) -> Result<CayleySpec, ConstructError> {
    require_good_prime(p)?;
    let set: Vec<Vec<u64>> = (1..p).map(|x| vec![x, x * x % p * x % p]).collect();
    CayleySpec::new(vec![p, p], set)
}

/// The (p-1)-regular graph on p^2 vertices whose connection set is the cubic
/// curve {(x, x^3)}. Triangle-free and K_{2,3}-free for prime p != 3.
pub fn cubic_cayley(p: u64) -> Result<Graph, ConstructError> {
    cayley_graph(&cubic_cayley_spec(p)?)
}

fn kopparty_set_indexes(fs: &FieldSpec) -> Result<Vec<[u32; 3]>, ConstructError> {
    let ar = Arith::new(fs)?;
    let mut trace_hits: Vec<u32> = Vec::new();
    for x in fs.elements() {
        let t = fs.trace(&x);
        if t == 1 || t == fs.p() - 1 {
            trace_hits.push(fs.index_of(&x) as u32);
        }
    }
    let q = fs.order() as u32;
    let mut set: Vec<[u32; 3]> = Vec::new();
    for &x in &trace_hits {
        for y in 1..q {
            let xy = ar.mul(x, y);
            let xy2 = ar.mul(xy, y);
            let xy3 = ar.mul(xy2, y);
            set.push([xy, xy2, xy3]);
        }
    }
    set.sort_unstable();
    set.dedup();
    Ok(set)
}

/// Triple construction over GF(q)^3, q = p^h, p != 3: vertices are coordinate
/// triples and u ~ v iff u - v lies in {(xy, xy^2, xy^3) : Tr(x) = +-1, y != 0}.
pub fn kopparty(p: u64, h: usize) -> Result<Graph, ConstructError> {
    require_good_prime(p)?;
    let fs = FieldSpec::new(p, h)?;
    let q = fs.order();
    let n = q * q * q;
    if n > GRAPH_CAP as u64 {
        return Err(ConstructError::TooLarge(n));
    }
    let ar = Arith::new(&fs)?;
    let set = kopparty_set_indexes(&fs)?;
    let q = q as u32;
    let n = n as usize;
    let mut g = Graph::new_empty(n);
    for v in 0..n as u32 {
        let (a, b, c) = (v / (q * q), v / q % q, v % q);
        for s in &set {
            let u = ar.add(a, s[0]) * q * q + ar.add(b, s[1]) * q + ar.add(c, s[2]);
            g.add_edge_unchecked(v as usize, u as usize);
        }
    }
    let labels = (0..n as u32)
        .map(|v| format!("({},{},{})", v / (q * q), v / q % q, v % q))
        .collect();
    g.set_labels("cayley", labels);
    Ok(g)
}

/// Same graph presented as a Cayley spec over Z_p^{3h}, the form the
/// character-sum eigensolver consumes.
pub fn kopparty_spec(p: u64, h: usize) -> Result<CayleySpec, ConstructError> {
    require_good_prime(p)?;
    let fs = FieldSpec::new(p, h)?;
    if fs.order().pow(3) > GRAPH_CAP as u64 {
        return Err(ConstructError::TooLarge(fs.order().pow(3)));
    }
    let set = kopparty_set_indexes(&fs)?;
    let coords = |idx: u32| -> Vec<u64> { fs.element(idx as u64).coeffs().to_vec() };
    let tuples: Vec<Vec<u64>> = set
        .iter()
        .map(|s| {
            let mut t = coords(s[0]);
            t.extend(coords(s[1]));
            t.extend(coords(s[2]));
            t
        })
        .collect();
    CayleySpec::new(vec![p; 3 * h], tuples)
}

// ---------------------------------------------------------------------------
// Projective points and orthogonality graphs
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointClass {
    Absolute,
    Square,
    Nonsquare,
}

/// Canonical representative of a projective point: scaled so that the first
/// nonzero coordinate is 1, tagged by the quadratic character of its
/// self-dot-product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectivePoint {
    pub coords: Vec<FieldElement>,
    pub class: PointClass,
}

impl ProjectivePoint {
    /// Scales arbitrary homogeneous coordinates to the canonical
    /// representative and classifies. Classification is invariant under
    /// scaling because the self-dot-product scales by a square.
    pub fn canonicalize(
        fs: &FieldSpec,
        coords: &[FieldElement],
    ) -> Result<ProjectivePoint, ConstructError> {
        if fs.p() == 2 {
            return Err(ConstructError::EvenCharacteristic);
        }
        let lead = coords.iter().position(|c| !c.is_zero()).ok_or(ConstructError::ZeroVector)?;
        let scale = fs.inv(&coords[lead])?;
        let canon: Vec<FieldElement> = coords.iter().map(|c| fs.mul(c, &scale)).collect();
        let mut dot = fs.zero();
        for c in &canon {
            dot = fs.add(&dot, &fs.mul(c, c));
        }
        let class = match fs.quad_char(&dot)? {
            0 => PointClass::Absolute,
            1 => PointClass::Square,
            _ => PointClass::Nonsquare,
        };
        Ok(ProjectivePoint { coords: canon, class })
    }
}

/// All (q^(r+1)-1)/(q-1) canonical points of the r-dimensional projective
/// space over GF(q), classified as absolute / square / nonsquare. Point order
/// is deterministic: by leading-coordinate position, then row-major suffix.
pub fn projective_points(r: usize, fs: &FieldSpec) -> Result<Vec<ProjectivePoint>, ConstructError> {
    let pts = projective_point_indexes(r, fs)?;
    let out = pts
        .iter()
        .map(|(coords, class)| ProjectivePoint {
            coords: coords.iter().map(|&i| fs.element(i as u64)).collect(),
            class: *class,
        })
        .collect();
    Ok(out)
}

fn projective_point_indexes(
    r: usize,
    fs: &FieldSpec,
) -> Result<Vec<(Vec<u32>, PointClass)>, ConstructError> {
    if fs.p() == 2 {
        return Err(ConstructError::EvenCharacteristic);
    }
    let q = fs.order();
    let t = r + 1;
    let expected: u64 = (0..=r as u32).map(|i| q.pow(i)).sum();
    if expected > GRAPH_CAP as u64 * 4 {
        return Err(ConstructError::TooLarge(expected));
    }
    let ar = Arith::new(fs)?;
    let q = q as u32;
    let mut out = Vec::with_capacity(expected as usize);
    for lead in 0..t {
        let free = t - lead - 1;
        let count = (q as u64).pow(free as u32);
        for k in 0..count {
            let mut coords = vec![0u32; t];
            coords[lead] = 1;
            let mut idx = k;
            for pos in (lead + 1..t).rev() {
                coords[pos] = (idx % q as u64) as u32;
                idx /= q as u64;
            }
            let d = ar.dot(&coords, &coords);
            let class = match ar.chi(d) {
                0 => PointClass::Absolute,
                1 => PointClass::Square,
                _ => PointClass::Nonsquare,
            };
            out.push((coords, class));
        }
    }
    debug_assert_eq!(out.len() as u64, expected);
    Ok(out)
}

fn class_tag(class: PointClass) -> &'static str {
    match class {
        PointClass::Absolute => "a",
        PointClass::Square => "s",
        PointClass::Nonsquare => "n",
    }
}

/// Orthogonality graph on the non-absolute points of r-dimensional projective
/// space: x ~ y iff their dot product vanishes. Self-adjacency is impossible
/// because vertices are non-absolute. Labels carry the class tag.
pub fn ak_graph(r: usize, fs: &FieldSpec) -> Result<Graph, ConstructError> {
    let pts = projective_point_indexes(r, fs)?;
    let verts: Vec<&(Vec<u32>, PointClass)> =
        pts.iter().filter(|(_, c)| *c != PointClass::Absolute).collect();
    let n = verts.len();
    if n > GRAPH_CAP {
        return Err(ConstructError::TooLarge(n as u64));
    }
    let ar = Arith::new(fs)?;
    let mut g = Graph::new_empty(n);
    for i in 0..n {
        for j in i + 1..n {
            if ar.dot(&verts[i].0, &verts[j].0) == 0 {
                g.add_edge_unchecked(i, j);
            }
        }
    }
    let labels: Vec<String> = verts
        .iter()
        .map(|(coords, class)| {
            let inner: Vec<String> = coords.iter().map(|c| c.to_string()).collect();
            format!("{}:({})", class_tag(*class), inner.join(","))
        })
        .collect();
    g.set_labels("projective", labels);
    Ok(g)
}

/// Vertex indices tagged nonsquare in a projective-labeled graph.
pub fn nonsquare_vertices(g: &Graph) -> Result<Vec<usize>, ConstructError> {
    if g.label_scheme() != Some("projective") {
        return Err(ConstructError::MissingLabels);
    }
    let labels = g.labels().ok_or(ConstructError::MissingLabels)?;
    Ok(labels
        .iter()
        .enumerate()
        .filter(|(_, l)| l.starts_with("n:"))
        .map(|(i, _)| i)
        .collect())
}

/// Induced subgraph on the nonsquare-tagged vertices of an orthogonality
/// graph. Clique-freeness is checked by the forbidden-subgraph module, never
/// assumed here.
pub fn nonsquare_subgraph(g: &Graph) -> Result<Graph, ConstructError> {
    let verts = nonsquare_vertices(g)?;
    Ok(g.induced(&verts)?)
}

/// Argmax over v in v1 of |N(v) ∩ v1| / |N(v)|, ties broken by smallest
/// vertex index. Every v1 member must have positive degree.
pub fn dense_vertex(g: &Graph, v1: &[usize]) -> Result<usize, ConstructError> {
    if v1.is_empty() {
        return Err(ConstructError::EmptySet);
    }
    let words = g.words_per_row();
    let mut mask = vec![0u64; words];
    for &v in v1 {
        mask[v / 64] |= 1 << (v % 64);
    }
    let mut sorted: Vec<usize> = v1.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut best: Option<(usize, usize, usize)> = None; // (num, den, vertex)
    for &v in &sorted {
        let den = g.degree(v);
        if den == 0 {
            return Err(ConstructError::IsolatedVertexInV1(v));
        }
        let num: usize = g
            .row(v)
            .iter()
            .zip(&mask)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum();
        let better = match best {
            None => true,
            Some((bn, bd, _)) => num * bd > bn * den,
        };
        if better {
            best = Some((num, den, v));
        }
    }
    Ok(best.unwrap().2)
}

/// Even-parameter clique-free construction: build the orthogonality graph on
/// t-dimensional projective space, pick the densest nonsquare vertex relative
/// to the nonsquare class, and return the induced subgraph on its nonsquare
/// neighborhood.
pub fn even_t_construction(t: usize, fs: &FieldSpec) -> Result<Graph, ConstructError> {
    if !t.is_multiple_of(2) {
        return Err(ConstructError::NotEven(t));
    }
    let ak = ak_graph(t, fs)?;
    let v1 = nonsquare_vertices(&ak)?;
    let v = dense_vertex(&ak, &v1)?;
    let mut in_v1 = vec![false; ak.n()];
    for &u in &v1 {
        in_v1[u] = true;
    }
    let u: Vec<usize> = ak.neighbors(v).filter(|&w| in_v1[w]).collect();
    Ok(ak.induced(&u)?)
}

// ---------------------------------------------------------------------------
// Plane distance graph
// ---------------------------------------------------------------------------

/// Unit-circle elements of GF(q)^2 as index pairs: (a, b) with a^2+b^2 = 1.
fn unit_circle(ar: &Arith) -> Vec<(u32, u32)> {
    let q = ar.q;
    let mut out = Vec::new();
    let one = 1u32;
    for a in 0..q {
        for b in 0..q {
            if ar.add(ar.mul(a, a), ar.mul(b, b)) == one {
                out.push((a, b));
            }
        }
    }
    out
}

/// Graph on the q^2 plane points over GF(q), q odd, with x ~ y iff the
/// squared coordinate differences sum to one.
pub fn distance_graph(fs: &FieldSpec) -> Result<Graph, ConstructError> {
    if fs.p() == 2 {
        return Err(ConstructError::EvenCharacteristic);
    }
    let q = fs.order();
    if q * q > GRAPH_CAP as u64 {
        return Err(ConstructError::TooLarge(q * q));
    }
    let ar = Arith::new(fs)?;
    let circle = unit_circle(&ar);
    let q = q as u32;
    let n = (q * q) as usize;
    let mut g = Graph::new_empty(n);
    for v in 0..n as u32 {
        let (x, y) = (v / q, v % q);
        for &(a, b) in &circle {
            let u = ar.add(x, a) * q + ar.add(y, b);
            g.add_edge_unchecked(v as usize, u as usize);
        }
    }
    let labels = (0..n as u32).map(|v| format!("({},{})", v / q, v % q)).collect();
    g.set_labels("plane", labels);
    Ok(g)
}

/// The distance graph as a Cayley spec over Z_p^{2h}.
pub fn distance_graph_spec(fs: &FieldSpec) -> Result<CayleySpec, ConstructError> {
    if fs.p() == 2 {
        return Err(ConstructError::EvenCharacteristic);
    }
    let ar = Arith::new(fs)?;
    let set: Vec<Vec<u64>> = unit_circle(&ar)
        .iter()
        .map(|&(a, b)| {
            let mut t = fs.element(a as u64).coeffs().to_vec();
            t.extend(fs.element(b as u64).coeffs());
            t
        })
        .collect();
    CayleySpec::new(vec![fs.p(); 2 * fs.h()], set)
}

// ---------------------------------------------------------------------------
// Generalized cross-product
// ---------------------------------------------------------------------------

pub fn dot(fs: &FieldSpec, a: &[FieldElement], b: &[FieldElement]) -> FieldElement {
    let mut acc = fs.zero();
    for (x, y) in a.iter().zip(b) {
        acc = fs.add(&acc, &fs.mul(x, y));
    }
    acc
}

/// Determinant by Gaussian elimination over the field.
pub fn determinant(fs: &FieldSpec, m: &[Vec<FieldElement>]) -> FieldElement {
    let n = m.len();
    let mut a: Vec<Vec<FieldElement>> = m.to_vec();
    let mut det = fs.one();
    for col in 0..n {
        let pivot = match (col..n).find(|&r| !a[r][col].is_zero()) {
            Some(r) => r,
            None => return fs.zero(),
        };
        if pivot != col {
            a.swap(pivot, col);
            det = fs.neg(&det);
        }
        det = fs.mul(&det, &a[col][col]);
        let inv = fs.inv(&a[col][col]).expect("pivot nonzero");
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = fs.mul(&a[r][col], &inv);
            for c in col..n {
                let sub = fs.mul(&factor, &a[col][c]);
                a[r][c] = fs.sub(&a[r][c], &sub);
            }
        }
    }
    det
}

/// Generalized cross-product of t-1 vectors in GF(q)^t by cofactor expansion
/// along an appended top row of standard basis vectors. Orthogonal to every
/// input; zero exactly when the inputs are linearly dependent.
pub fn cross_product(
    fs: &FieldSpec,
    vs: &[Vec<FieldElement>],
) -> Result<Vec<FieldElement>, ConstructError> {
    let t = vs.len() + 1;
    if t < 2 || vs.iter().any(|v| v.len() != t) {
        return Err(ConstructError::DimensionMismatch {
            expected: t.saturating_sub(1),
            dim: t,
            got: vs.first().map_or(0, |v| v.len()),
        });
    }
    let mut out = Vec::with_capacity(t);
    for skip in 0..t {
        let minor: Vec<Vec<FieldElement>> = vs
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != skip)
                    .map(|(_, e)| e.clone())
                    .collect()
            })
            .collect();
        let mut d = determinant(fs, &minor);
        if skip % 2 == 1 {
            d = fs.neg(&d);
        }
        out.push(d);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cayley_small_cases() {
        // Z_2^2 with S = {(1,1)}: a perfect matching on 4 vertices.
        let spec = CayleySpec::new(vec![2, 2], vec![vec![1, 1]]).unwrap();
        let g = cayley_graph(&spec).unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.degrees(), vec![1; 4]);

        // Z_5 with S = {1, 4} is the 5-cycle.
        let spec = CayleySpec::new(vec![5], vec![vec![1], vec![4]]).unwrap();
        let g = cayley_graph(&spec).unwrap();
        assert_eq!(g, {
            let mut c5 = Graph::cycle(5);
            c5.set_labels(
                "cayley",
                (0..5).map(|i| format!("({i})")).collect(),
            );
            c5
        });

        // Missing inverse (4,0) is rejected.
        assert!(matches!(
            CayleySpec::new(vec![5, 5], vec![vec![1, 0]]),
            Err(ConstructError::AsymmetricSet(_))
        ));
        assert!(matches!(
            CayleySpec::new(vec![5], vec![vec![0]]),
            Err(ConstructError::IdentityInSet)
        ));
    }

    #[test]
    fn cubic_cayley_examples() {
        let spec = cubic_cayley_spec(5).unwrap();
        let mut expect = [vec![1, 1], vec![2, 3], vec![3, 2], vec![4, 4]];
        expect.sort();
        assert_eq!(spec.set(), &expect[..]);
        let g = cubic_cayley(5).unwrap();
        assert_eq!(g.n(), 25);
        assert_eq!(g.edge_count(), 50);
        assert_eq!(g.regular_degree(), Some(4));

        let g2 = cubic_cayley(2).unwrap();
        assert_eq!(g2.degrees(), vec![1; 4]);

        assert!(matches!(cubic_cayley(3), Err(ConstructError::BadCharacteristic(3))));
        assert!(matches!(cubic_cayley(9), Err(ConstructError::BadCharacteristic(9))));
    }

    #[test]
    fn cubic_cayley_vertex_transitive_spot_check() {
        let p = 11u64;
        let g = cubic_cayley(p).unwrap();
        let n = g.n();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..20 {
            let shift = rng.random_range(1..n);
            let translate = |v: usize| -> usize {
                let (a, b) = (v / p as usize, v % p as usize);
                let (sa, sb) = (shift / p as usize, shift % p as usize);
                (a + sa) % p as usize * p as usize + (b + sb) % p as usize
            };
            for u in 0..n {
                for v in g.neighbors(u) {
                    assert!(g.has_edge(translate(u), translate(v)));
                }
            }
        }
    }

    #[test]
    fn kopparty_parameters() {
        // q = 8: the trace kernel has index 2, so 4 elements hit trace 1 = -1.
        let g = kopparty(2, 3).unwrap();
        assert_eq!(g.n(), 512);
        assert_eq!(g.regular_degree(), Some(28));

        // q = 5: T = {1, 4}, so |S| = 2 * 4 = 8.
        let g = kopparty(5, 1).unwrap();
        assert_eq!(g.n(), 125);
        assert_eq!(g.regular_degree(), Some(8));

        // q = 7: T = {1, 6}, so |S| = 2 * 6 = 12.
        let g = kopparty(7, 1).unwrap();
        assert_eq!(g.n(), 343);
        assert_eq!(g.regular_degree(), Some(12));

        assert!(matches!(kopparty(3, 1), Err(ConstructError::BadCharacteristic(3))));
    }

    #[test]
    fn kopparty_set_is_symmetric() {
        for (p, h) in [(2u64, 3usize), (5, 1), (7, 1), (2, 2)] {
            let fs = FieldSpec::new(p, h).unwrap();
            let ar = Arith::new(&fs).unwrap();
            let set = kopparty_set_indexes(&fs).unwrap();
            for s in &set {
                let inv = [ar.neg(s[0]), ar.neg(s[1]), ar.neg(s[2])];
                assert!(set.binary_search(&inv).is_ok(), "S != -S at (p,h)=({p},{h})");
            }
        }
    }

    #[test]
    fn projective_point_counts() {
        let f5 = FieldSpec::new(5, 1).unwrap();
        let pts = projective_points(2, &f5).unwrap();
        assert_eq!(pts.len(), 31);
        let absolute = pts.iter().filter(|p| p.class == PointClass::Absolute).count();
        assert_eq!(absolute, 6);

        let f3 = FieldSpec::new(3, 1).unwrap();
        assert_eq!(projective_points(1, &f3).unwrap().len(), 4);

        let f2 = FieldSpec::new(2, 2).unwrap();
        assert!(matches!(
            projective_points(2, &f2),
            Err(ConstructError::EvenCharacteristic)
        ));
    }

    #[test]
    fn projective_class_counts_add_up() {
        for (p, h, r) in [(5u64, 1usize, 2usize), (3, 1, 3), (3, 2, 2), (7, 1, 2)] {
            let fs = FieldSpec::new(p, h).unwrap();
            let pts = projective_points(r, &fs).unwrap();
            let q = fs.order();
            let expected: u64 = (0..=r as u32).map(|i| q.pow(i)).sum();
            assert_eq!(pts.len() as u64, expected);
            let (mut a, mut s, mut ns) = (0, 0, 0);
            for pt in &pts {
                match pt.class {
                    PointClass::Absolute => a += 1,
                    PointClass::Square => s += 1,
                    PointClass::Nonsquare => ns += 1,
                }
            }
            assert_eq!(a + s + ns, pts.len());
        }
    }

    #[test]
    fn canonicalization_idempotent_and_scale_invariant() {
        let fs = FieldSpec::new(5, 1).unwrap();
        let pts = projective_points(2, &fs).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for pt in &pts {
            let again = ProjectivePoint::canonicalize(&fs, &pt.coords).unwrap();
            assert_eq!(&again, pt);
            let a = fs.element(rng.random_range(1..5));
            let scaled: Vec<FieldElement> = pt.coords.iter().map(|c| fs.mul(c, &a)).collect();
            let canon = ProjectivePoint::canonicalize(&fs, &scaled).unwrap();
            assert_eq!(&canon, pt);
        }
        assert!(matches!(
            ProjectivePoint::canonicalize(&fs, &[fs.zero(), fs.zero()]),
            Err(ConstructError::ZeroVector)
        ));
    }

    #[test]
    fn ak_graph_sizes() {
        let f5 = FieldSpec::new(5, 1).unwrap();
        let g = ak_graph(2, &f5).unwrap();
        assert_eq!(g.n(), 25);
        assert!(g.label_scheme() == Some("projective"));

        let f3 = FieldSpec::new(3, 1).unwrap();
        let g = ak_graph(2, &f3).unwrap();
        assert_eq!(g.n(), 9);
    }

    #[test]
    fn nonsquare_subgraph_counts() {
        let f3 = FieldSpec::new(3, 1).unwrap();
        let ak = ak_graph(2, &f3).unwrap();
        let ns = nonsquare_vertices(&ak).unwrap();
        let sub = nonsquare_subgraph(&ak).unwrap();
        assert_eq!(sub.n(), ns.len());
        assert!(sub.n() > 0);

        let unlabeled = Graph::complete(4);
        assert!(matches!(
            nonsquare_subgraph(&unlabeled),
            Err(ConstructError::MissingLabels)
        ));
    }

    #[test]
    fn dense_vertex_examples() {
        let k4 = Graph::complete(4);
        assert_eq!(dense_vertex(&k4, &[0, 1]).unwrap(), 0);

        // Star with center 0: the leaf has ratio 1, the center only 1/4.
        let star = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert_eq!(dense_vertex(&star, &[0, 1]).unwrap(), 1);

        assert!(matches!(dense_vertex(&k4, &[]), Err(ConstructError::EmptySet)));
        let lonely = Graph::from_edges(3, &[(0, 1)]).unwrap();
        assert!(matches!(
            dense_vertex(&lonely, &[0, 2]),
            Err(ConstructError::IsolatedVertexInV1(2))
        ));
    }

    #[test]
    fn even_t_requires_even() {
        let f5 = FieldSpec::new(5, 1).unwrap();
        assert!(matches!(even_t_construction(3, &f5), Err(ConstructError::NotEven(3))));
    }

    #[test]
    fn dense_vertex_ratio_on_nonsquare_class() {
        // Roughly half of each neighborhood lands in the nonsquare class; the
        // argmax clears the 0.4 floor comfortably at q = 5.
        let f5 = FieldSpec::new(5, 1).unwrap();
        let ak = ak_graph(4, &f5).unwrap();
        let v1 = nonsquare_vertices(&ak).unwrap();
        let v = dense_vertex(&ak, &v1).unwrap();
        let in_v1: std::collections::HashSet<usize> = v1.iter().copied().collect();
        let num = ak.neighbors(v).filter(|w| in_v1.contains(w)).count();
        let ratio = num as f64 / ak.degree(v) as f64;
        assert!(ratio >= 0.4, "ratio {ratio}");
    }

    #[test]
    fn distance_graph_degree_matches_circle() {
        for q in [5u64, 7, 11] {
            let fs = FieldSpec::new(q, 1).unwrap();
            let ar = Arith::new(&fs).unwrap();
            let circle = unit_circle(&ar);
            // Circle size is q - chi(-1): enumeration is the oracle here.
            let chi_minus_one = fs.quad_char(&fs.neg(&fs.one())).unwrap();
            assert_eq!(circle.len() as i64, q as i64 - chi_minus_one as i64);
            let g = distance_graph(&fs).unwrap();
            assert_eq!(g.n() as u64, q * q);
            assert_eq!(g.regular_degree(), Some(circle.len()));
        }
        let f2 = FieldSpec::new(2, 2).unwrap();
        assert!(matches!(distance_graph(&f2), Err(ConstructError::EvenCharacteristic)));
    }

    #[test]
    fn cross_product_basis_and_dependence() {
        let fs = FieldSpec::new(7, 1).unwrap();
        let e = |i: usize| -> Vec<FieldElement> {
            (0..3).map(|j| if i == j { fs.one() } else { fs.zero() }).collect()
        };
        let c = cross_product(&fs, &[e(0), e(1)]).unwrap();
        assert_eq!(c, e(2));

        // Linearly dependent input gives the zero vector.
        let v: Vec<FieldElement> = vec![fs.element(2), fs.element(3), fs.element(5)];
        let w: Vec<FieldElement> = v.iter().map(|x| fs.mul(x, &fs.element(4))).collect();
        let z = cross_product(&fs, &[v, w]).unwrap();
        assert!(z.iter().all(|c| c.is_zero()));

        assert!(matches!(
            cross_product(&fs, &[e(0)]),
            Err(ConstructError::DimensionMismatch { .. })
        ));
    }

    fn random_vec(fs: &FieldSpec, t: usize, rng: &mut ChaCha8Rng) -> Vec<FieldElement> {
        (0..t).map(|_| fs.element(rng.random_range(0..fs.order()))).collect()
    }

    #[test]
    fn cross_product_orthogonality() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for q in [5u64, 7] {
            let fs = FieldSpec::new(q, 1).unwrap();
            for t in [3usize, 4, 5] {
                for _ in 0..30 {
                    let vs: Vec<Vec<FieldElement>> =
                        (0..t - 1).map(|_| random_vec(&fs, t, &mut rng)).collect();
                    let c = cross_product(&fs, &vs).unwrap();
                    for v in &vs {
                        assert!(dot(&fs, &c, v).is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn cross_product_gram_identity() {
        // (x_1 x ... x x_{t-1}) . (y_1 x ... x y_{t-1}) equals the determinant
        // of the mutual dot-product matrix; 100 seeded samples at t = 5.
        let fs = FieldSpec::new(7, 1).unwrap();
        let t = 5;
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..100 {
            let xs: Vec<Vec<FieldElement>> =
                (0..t - 1).map(|_| random_vec(&fs, t, &mut rng)).collect();
            let ys: Vec<Vec<FieldElement>> =
                (0..t - 1).map(|_| random_vec(&fs, t, &mut rng)).collect();
            let cx = cross_product(&fs, &xs).unwrap();
            let cy = cross_product(&fs, &ys).unwrap();
            let lhs = dot(&fs, &cx, &cy);
            let gram: Vec<Vec<FieldElement>> = xs
                .iter()
                .map(|x| ys.iter().map(|y| dot(&fs, x, y)).collect())
                .collect();
            let rhs = determinant(&fs, &gram);
            assert_eq!(lhs, rhs);
        }
    }
}
