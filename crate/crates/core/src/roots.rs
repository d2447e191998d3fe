//! Root lattice of a quiver: the symmetric bilinear form of its underlying
//! graph, simple reflections, and descent to the fundamental domain.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnf::Formula;
use crate::quiver::Quiver;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RootError {
    #[error("vertex {0} carries a self-loop")]
    SelfLoop(usize),
    #[error("vector has {got} coordinates, lattice has {expected} vertices")]
    Length { expected: usize, got: usize },
    #[error("vertex {vertex} out of range for {vertices} vertices")]
    VertexRange { vertex: usize, vertices: usize },
    #[error("classification needs a nonzero vector with non-negative coordinates")]
    NotPositive,
}

/// Integer coordinates per vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RootVector(Vec<i64>);

impl RootVector {
    pub fn new(coords: Vec<i64>) -> Self {
        RootVector(coords)
    }

    pub fn zero(n: usize) -> Self {
        RootVector(vec![0; n])
    }

    /// The simple root `α_v`.
    pub fn simple(n: usize, v: usize) -> Self {
        let mut c = vec![0; n];
        c[v] = 1;
        RootVector(c)
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// `Some(v)` when this is `α_v`.
    pub fn as_simple(&self) -> Option<usize> {
        let mut found = None;
        for (v, &c) in self.0.iter().enumerate() {
            match c {
                0 => {}
                1 if found.is_none() => found = Some(v),
                _ => return None,
            }
        }
        found
    }
}

/// Gram matrix of the symmetric form `(·,·)`: 2 on the diagonal and minus
/// the number of edges between distinct vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootLattice {
    n: usize,
    gram: Vec<i64>,
}

impl RootLattice {
    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn entry(&self, a: usize, b: usize) -> i64 {
        self.gram[a * self.n + b]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.gram.chunks(self.n.max(1)).take(self.n).map(<[i64]>::to_vec).collect()
    }

    fn check(&self, g: &RootVector) -> Result<(), RootError> {
        if g.len() != self.n {
            return Err(RootError::Length { expected: self.n, got: g.len() });
        }
        Ok(())
    }

    /// `(g, α_v)`.
    pub fn pairing_with_simple(&self, g: &RootVector, v: usize) -> i64 {
        g.0.iter().enumerate().map(|(w, &c)| c * self.entry(w, v)).sum()
    }
}

pub fn gram_matrix(q: &Quiver) -> Result<RootLattice, RootError> {
    let n = q.num_vertices();
    let mut gram = vec![0i64; n * n];
    for v in 0..n {
        gram[v * n + v] = 2;
    }
    for a in q.arrows() {
        if a.source == a.target {
            return Err(RootError::SelfLoop(a.source));
        }
        gram[a.source * n + a.target] -= 1;
        gram[a.target * n + a.source] -= 1;
    }
    Ok(RootLattice { n, gram })
}

/// `aᵀ · gram · b`.
pub fn tits_value(lat: &RootLattice, a: &RootVector, b: &RootVector) -> Result<i64, RootError> {
    lat.check(a)?;
    lat.check(b)?;
    let mut total = 0;
    for (i, &ai) in a.0.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        total += ai * lat.pairing_with_simple(b, i);
    }
    Ok(total)
}

/// `r_v(g) = g − (g, α_v) α_v`.
pub fn reflect(lat: &RootLattice, v: usize, g: &RootVector) -> Result<RootVector, RootError> {
    lat.check(g)?;
    if v >= lat.n {
        return Err(RootError::VertexRange { vertex: v, vertices: lat.n });
    }
    let mut out = g.clone();
    out.0[v] -= lat.pairing_with_simple(g, v);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RootClass {
    Real,
    Imaginary,
    Undetermined,
}

impl std::fmt::Display for RootClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RootClass::Real => "real",
            RootClass::Imaginary => "imaginary",
            RootClass::Undetermined => "undetermined",
        })
    }
}

/// Default descent budget: ten times the coordinate sum.
pub fn default_max_steps(g: &RootVector) -> usize {
    (10 * g.sum().max(1)) as usize
}

/// Descends `g` toward the fundamental domain `{γ : (γ, α_v) ≤ 0 ∀v}`,
/// always reflecting at the smallest vertex with positive pairing.
pub fn classify_root(lat: &RootLattice, g: &RootVector, max_steps: usize) -> Result<RootClass, RootError> {
    lat.check(g)?;
    if g.is_zero() || g.0.iter().any(|&c| c < 0) {
        return Err(RootError::NotPositive);
    }
    let mut g = g.clone();
    for _ in 0..=max_steps {
        if g.as_simple().is_some() {
            return Ok(RootClass::Real);
        }
        if g.0.iter().any(|&c| c < 0) {
            return Ok(RootClass::Undetermined);
        }
        match (0..lat.n).find(|&v| lat.pairing_with_simple(&g, v) > 0) {
            Some(v) => g = reflect(lat, v, &g)?,
            None => {
                return Ok(if support_connected(lat, &g) { RootClass::Imaginary } else { RootClass::Undetermined });
            }
        }
    }
    Ok(RootClass::Undetermined)
}

fn support_connected(lat: &RootLattice, g: &RootVector) -> bool {
    let support: Vec<usize> = (0..lat.n).filter(|&v| g.0[v] != 0).collect();
    let Some(&start) = support.first() else {
        return false;
    };
    let mut seen = vec![false; lat.n];
    seen[start] = true;
    let mut stack = vec![start];
    let mut reached = 1;
    while let Some(v) = stack.pop() {
        for &w in &support {
            if !seen[w] && lat.entry(v, w) < 0 {
                seen[w] = true;
                reached += 1;
                stack.push(w);
            }
        }
    }
    reached == support.len()
}

/// `|Ω_i|`: number of clauses in which variable `i` (index `i-1`) occurs.
pub fn occurrence_counts(f: &Formula) -> Vec<usize> {
    let mut counts = vec![0usize; f.num_vars()];
    for clause in f.clauses() {
        let mut vars: Vec<usize> = clause.literals().iter().map(|l| l.var).collect();
        vars.sort_unstable();
        vars.dedup();
        for v in vars {
            counts[v - 1] += 1;
        }
    }
    counts
}

/// Closed-form `(α, α)` for `α = dim R_Θ`, with `b = (q−1)³` blocks per clause.
pub fn closed_form_tits(f: &Formula, b: u64) -> i64 {
    let l = f.num_clauses() as i64;
    let counts = occurrence_counts(f);
    let b = b as i64;
    if b == 1 {
        -4 * l - 2 * counts.iter().map(|&c| (c * c) as i64).sum::<i64>()
    } else {
        let s: i64 = counts.iter().map(|&c| c as i64 * (b * c as i64 + 1)).sum();
        2 * b * (l - s)
    }
}
