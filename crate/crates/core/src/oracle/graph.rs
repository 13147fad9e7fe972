//! Explicit Grassmann and bilinear forms graphs over `F_2` and `F_3`.

use std::collections::VecDeque;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use super::field::PrimeField;
use crate::error::{Error, Result};
use crate::params::IntersectionArray;
use crate::qseries::{int, Rational};

/// Largest graph the oracle builds.
pub const MAX_VERTICES: usize = 2000;

/// A graph the oracle can construct.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GraphSpec {
    /// `J_q(n, d)`.
    Grassmann { q: u8, n: usize, d: usize },
    /// `Bil(d x e, q)`.
    Bilinear { q: u8, d: usize, e: usize },
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSpec::Grassmann { q, n, d } => write!(f, "J_{q}({n},{d})"),
            GraphSpec::Bilinear { q, d, e } => write!(f, "Bil({d}x{e},{q})"),
        }
    }
}

/// `grassmann:q=2,n=4,d=2` or `bilinear:q=2,d=2,e=3`.
impl FromStr for GraphSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad =
            || Error::InvalidParameters(format!("bad graph spec {s:?}; use grassmann:q=,n=,d= or bilinear:q=,d=,e="));
        let (name, rest) = s.split_once(':').ok_or_else(bad)?;
        let (mut q, mut n, mut d, mut e) = (None, None, None, None);
        for kv in rest.split(',') {
            let (k, v) = kv.split_once('=').ok_or_else(bad)?;
            let v: usize = v.trim().parse().map_err(|_| bad())?;
            match k.trim() {
                "q" => q = Some(u8::try_from(v).map_err(|_| bad())?),
                "n" => n = Some(v),
                "d" => d = Some(v),
                "e" => e = Some(v),
                _ => return Err(bad()),
            }
        }
        match (name, q, n, d, e) {
            ("grassmann", Some(q), Some(n), Some(d), None) => Ok(GraphSpec::Grassmann { q, n, d }),
            ("bilinear", Some(q), None, Some(d), Some(e)) => Ok(GraphSpec::Bilinear { q, d, e }),
            _ => Err(bad()),
        }
    }
}

/// A connected graph with its distance matrix.
#[derive(Debug, Clone)]
pub struct GraphInstance {
    pub n_vertices: usize,
    /// Sorted neighbour lists.
    pub adjacency: Vec<Vec<usize>>,
    distance: Vec<u8>,
    pub diameter: usize,
}

impl GraphInstance {
    /// Builds the graph from neighbour lists, computing distances by BFS.
    pub fn from_adjacency(mut adjacency: Vec<Vec<usize>>) -> Result<Self> {
        let n = adjacency.len();
        for (u, nb) in adjacency.iter_mut().enumerate() {
            nb.sort_unstable();
            nb.dedup();
            if nb.binary_search(&u).is_ok() {
                return Err(Error::Oracle(format!("loop at vertex {u}")));
            }
        }
        for (u, nb) in adjacency.iter().enumerate() {
            if nb.iter().any(|&v| v >= n || adjacency[v].binary_search(&u).is_err()) {
                return Err(Error::Oracle(format!("adjacency is not symmetric at vertex {u}")));
            }
        }
        let mut distance = vec![u8::MAX; n * n];
        let mut diameter = 0;
        let mut queue = VecDeque::new();
        for s in 0..n {
            let row = &mut distance[s * n..(s + 1) * n];
            row[s] = 0;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &v in &adjacency[u] {
                    if row[v] == u8::MAX {
                        row[v] = row[u] + 1;
                        queue.push_back(v);
                    }
                }
            }
            if row.contains(&u8::MAX) {
                return Err(Error::Oracle("graph is not connected".into()));
            }
            diameter = diameter.max(*row.iter().max().unwrap_or(&0) as usize);
        }
        Ok(Self { n_vertices: n, adjacency, distance, diameter })
    }

    pub fn dist(&self, u: usize, v: usize) -> usize {
        self.distance[u * self.n_vertices + v] as usize
    }

    pub fn degree(&self) -> usize {
        self.adjacency.first().map_or(0, Vec::len)
    }

    /// Edges `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, nb)| nb.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    /// Writes the edge list as `u v` lines, 0-indexed.
    pub fn write_edges<W: Write>(&self, mut w: W) -> io::Result<()> {
        for (u, v) in self.edges() {
            writeln!(w, "{u} {v}")?;
        }
        Ok(())
    }
}

fn check_size(count: usize, spec: &GraphSpec) -> Result<()> {
    if count > MAX_VERTICES {
        return Err(Error::InvalidParameters(format!("{spec} has {count} vertices, above the bound {MAX_VERTICES}")));
    }
    Ok(())
}

/// Reduced row echelon `d x n` matrices over `F_q`, one per `d`-subspace.
fn rref_subspaces(f: PrimeField, n: usize, d: usize) -> Vec<Vec<Vec<u8>>> {
    let q = f.order();
    let mut out = vec![];
    let mut pivots: Vec<usize> = (0..d).collect();
    loop {
        let free: Vec<(usize, usize)> = (0..d)
            .flat_map(|r| {
                let piv = &pivots;
                (piv[r] + 1..n).filter(move |c| !piv.contains(c)).map(move |c| (r, c))
            })
            .collect();
        let mut digits = vec![0u8; free.len()];
        loop {
            let mut m = vec![vec![0u8; n]; d];
            for (r, &p) in pivots.iter().enumerate() {
                m[r][p] = 1;
            }
            for (&(r, c), &x) in free.iter().zip(&digits) {
                m[r][c] = x;
            }
            out.push(m);
            let Some(i) = digits.iter().position(|&x| x + 1 < q) else {
                break;
            };
            digits[i] += 1;
            digits[..i].iter_mut().for_each(|x| *x = 0);
        }
        // next combination of pivot columns
        let Some(i) = (0..d).rev().find(|&i| pivots[i] < n - d + i) else {
            break;
        };
        pivots[i] += 1;
        for j in i + 1..d {
            pivots[j] = pivots[j - 1] + 1;
        }
    }
    out
}

/// Gaussian binomial `[n choose d]_q` as an integer.
fn gaussian_binomial(q: usize, n: usize, d: usize) -> usize {
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..d {
        num *= (q as u128).pow((n - i) as u32) - 1;
        den *= (q as u128).pow((i + 1) as u32) - 1;
    }
    (num / den) as usize
}

/// `J_q(n, d)`: `d`-subspaces of `F_q^n`, adjacent when they meet in
/// dimension `d - 1`, i.e. when their sum has dimension `d + 1`.
pub fn build_grassmann(q: u8, n: usize, d: usize) -> Result<GraphInstance> {
    let spec = GraphSpec::Grassmann { q, n, d };
    let f = PrimeField::new(q)?;
    if d == 0 || 2 * d > n {
        return Err(Error::InvalidParameters(format!("{spec} needs 1 <= d <= n/2")));
    }
    check_size(gaussian_binomial(q as usize, n, d), &spec)?;
    let verts = rref_subspaces(f, n, d);
    let mut adjacency = vec![vec![]; verts.len()];
    let mut scratch = Vec::with_capacity(2 * d);
    for u in 0..verts.len() {
        for v in u + 1..verts.len() {
            scratch.clear();
            scratch.extend(verts[u].iter().cloned());
            scratch.extend(verts[v].iter().cloned());
            if f.rank(&mut scratch) == d + 1 {
                adjacency[u].push(v);
                adjacency[v].push(u);
            }
        }
    }
    GraphInstance::from_adjacency(adjacency)
}

/// `Bil(d x e, q)`: all `d x e` matrices, adjacent when the difference has rank 1.
pub fn build_bilinear(q: u8, d: usize, e: usize) -> Result<GraphInstance> {
    let spec = GraphSpec::Bilinear { q, d, e };
    let f = PrimeField::new(q)?;
    if d == 0 || e == 0 {
        return Err(Error::InvalidParameters(format!("{spec} needs d, e >= 1")));
    }
    let count = (q as usize).checked_pow((d * e) as u32).unwrap_or(usize::MAX);
    check_size(count, &spec)?;
    let entries = |mut idx: usize| {
        let mut m = vec![vec![0u8; e]; d];
        for x in m.iter_mut().flatten() {
            *x = (idx % q as usize) as u8;
            idx /= q as usize;
        }
        m
    };
    let verts: Vec<_> = (0..count).map(entries).collect();
    let mut adjacency = vec![vec![]; count];
    for u in 0..count {
        for v in u + 1..count {
            let mut diff: Vec<Vec<u8>> = verts[u]
                .iter()
                .zip(&verts[v])
                .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| f.sub(x, y)).collect())
                .collect();
            if f.rank(&mut diff) == 1 {
                adjacency[u].push(v);
                adjacency[v].push(u);
            }
        }
    }
    GraphInstance::from_adjacency(adjacency)
}

pub fn build(spec: GraphSpec) -> Result<GraphInstance> {
    match spec {
        GraphSpec::Grassmann { q, n, d } => build_grassmann(q, n, d),
        GraphSpec::Bilinear { q, d, e } => build_bilinear(q, d, e),
    }
}

/// Intersection numbers counted over every ordered vertex pair; errors if
/// the counts depend on the pair (the graph is not distance-regular).
pub fn empirical_intersection(g: &GraphInstance) -> Result<IntersectionArray> {
    let dmax = g.diameter;
    let mut seen: Vec<Option<(usize, usize, usize)>> = vec![None; dmax + 1];
    let mut sphere: Vec<Option<usize>> = vec![None; dmax + 1];
    for x in 0..g.n_vertices {
        let mut sizes = vec![0usize; dmax + 1];
        for y in 0..g.n_vertices {
            let i = g.dist(x, y);
            sizes[i] += 1;
            let (mut c, mut a, mut b) = (0, 0, 0);
            for &z in &g.adjacency[y] {
                match g.dist(x, z) as isize - i as isize {
                    -1 => c += 1,
                    0 => a += 1,
                    1 => b += 1,
                    _ => unreachable!("neighbours differ in distance by at most 1"),
                }
            }
            match seen[i] {
                None => seen[i] = Some((c, a, b)),
                Some(prev) if prev != (c, a, b) => {
                    return Err(Error::Oracle(format!(
                        "not distance-regular: pair ({x}, {y}) at distance {i} has (c, a, b) = {:?}, expected {prev:?}",
                        (c, a, b)
                    )));
                }
                _ => {}
            }
        }
        for (i, &s) in sizes.iter().enumerate() {
            match sphere[i] {
                None => sphere[i] = Some(s),
                Some(prev) if prev != s => {
                    return Err(Error::Oracle(format!("sphere sizes at distance {i} vary ({prev} vs {s})")));
                }
                _ => {}
            }
        }
    }
    let triples: Vec<(usize, usize, usize)> = seen.into_iter().map(|t| t.expect("every distance occurs")).collect();
    let to =
        |f: fn(&(usize, usize, usize)) -> usize| triples.iter().map(|t| int(f(t) as i64)).collect::<Vec<Rational>>();
    Ok(IntersectionArray {
        c_seq: to(|t| t.0),
        a_seq: to(|t| t.1),
        b_seq: to(|t| t.2),
        k_seq: sphere.into_iter().map(|s| int(s.unwrap_or(0) as i64)).collect(),
        k: int(g.degree() as i64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_and_degrees() {
        let j = build_grassmann(2, 4, 2).unwrap();
        assert_eq!((j.n_vertices, j.degree(), j.diameter), (35, 18, 2));
        assert_eq!(build_grassmann(2, 5, 2).unwrap().n_vertices, 155);
        assert_eq!(build_grassmann(3, 4, 2).unwrap().n_vertices, 130);
        let b = build_bilinear(2, 2, 2).unwrap();
        assert_eq!((b.n_vertices, b.degree()), (16, 9));
        let b = build_bilinear(2, 2, 3).unwrap();
        assert_eq!((b.n_vertices, b.degree()), (64, 21));
        assert_eq!(build_bilinear(3, 2, 2).unwrap().n_vertices, 81);
        assert!(build_grassmann(2, 8, 4).is_err());
        assert!(build_bilinear(3, 3, 3).is_err());
        assert!(build_grassmann(5, 4, 2).is_err());
    }

    #[test]
    fn counted_intersection_numbers() {
        let ia = empirical_intersection(&build_grassmann(2, 4, 2).unwrap()).unwrap();
        assert_eq!(ia.b_seq, vec![int(18), int(8), int(0)]);
        assert_eq!(ia.c_seq, vec![int(0), int(1), int(9)]);
        assert_eq!(ia.a_seq[0], int(0));
        assert_eq!(ia.k_seq, vec![int(1), int(18), int(16)]);
    }

    #[test]
    fn non_distance_regular_is_rejected() {
        // a path on three vertices
        let g = GraphInstance::from_adjacency(vec![vec![1], vec![0, 2], vec![1]]).unwrap();
        assert!(empirical_intersection(&g).is_err());
        assert!(GraphInstance::from_adjacency(vec![vec![1], vec![]]).is_err());
        assert!(GraphInstance::from_adjacency(vec![vec![], vec![]]).is_err());
    }

    #[test]
    fn edge_dump() {
        let g = build_bilinear(2, 1, 2).unwrap();
        let mut out = vec![];
        g.write_edges(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), 6);
        assert!(text.lines().all(|l| l.split(' ').count() == 2));
    }

    #[test]
    fn spec_parsing() {
        let s: GraphSpec = "grassmann:q=2,n=4,d=2".parse().unwrap();
        assert_eq!(s, GraphSpec::Grassmann { q: 2, n: 4, d: 2 });
        assert_eq!(s.to_string(), "J_2(4,2)");
        assert!("bilinear:q=2,d=2".parse::<GraphSpec>().is_err());
    }
}
