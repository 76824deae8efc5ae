//! The asynchronous iteration graph, its strong-connectivity certificate,
//! and the doubly-stochastic uniformity condition.
//!
//! Vertices are the `2^n` states; each vertex carries `n` labeled arcs
//! `x -> F_f(i, x)`. Disorder of the single-cell iterations is equivalent to
//! strong connectivity of this graph, and the induced random walk (cell index
//! uniform per step) tends to the uniform law exactly when its transition
//! matrix is doubly stochastic. Matrix entries are exact multiples of `1/n`
//! and are kept as integer numerators; floats appear only when powering.

use serde::Serialize;

use crate::chaotic::{apply_single, BooleanFunction};
use crate::error::{Error, Result};

/// Labeled arc structure: `arcs[x][i - 1] = F_f(i, x)`. Out-degree counted
/// with multiplicity is always `n`.
#[derive(Debug, Clone)]
pub struct IterationGraph {
    n: u32,
    arcs: Vec<Vec<u64>>,
}

impl IterationGraph {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        self.arcs.len()
    }

    /// Targets of the `n` labeled arcs out of `x`.
    pub fn arcs_from(&self, x: u64) -> &[u64] {
        &self.arcs[x as usize]
    }
}

/// Exact graph on the full state space; `n <= 16` (65536 vertices) is an
/// explicit cap, larger dimensions are refused rather than truncated.
pub fn build_iteration_graph(f: &BooleanFunction) -> Result<IterationGraph> {
    let n = f.n();
    if n > 16 {
        return Err(Error::Resource(format!(
            "iteration graph needs 2^{n} vertices; capped at n = 16"
        )));
    }
    let size = 1u64 << n;
    let mut arcs = Vec::with_capacity(size as usize);
    for x in 0..size {
        let row = (1..=n)
            .map(|i| apply_single(f, i, x).expect("i in range"))
            .collect();
        arcs.push(row);
    }
    Ok(IterationGraph { n, arcs })
}

/// Partition of the vertices into strongly connected components.
#[derive(Debug, Clone)]
pub struct SccCertificate {
    /// Component id per vertex, ids in reverse topological order.
    pub component_of: Vec<usize>,
    /// Vertices of each component.
    pub components: Vec<Vec<u64>>,
}

impl SccCertificate {
    pub fn count(&self) -> usize {
        self.components.len()
    }
}

/// Iterative Tarjan over the labeled arcs (recursion would overflow at
/// n = 16).
fn strongly_connected_components(graph: &IterationGraph) -> SccCertificate {
    let n_vertices = graph.vertex_count();
    const UNVISITED: usize = usize::MAX;
    let mut index = vec![UNVISITED; n_vertices];
    let mut lowlink = vec![0usize; n_vertices];
    let mut on_stack = vec![false; n_vertices];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut components: Vec<Vec<u64>> = Vec::new();
    let mut component_of = vec![UNVISITED; n_vertices];

    // Explicit DFS frames: (vertex, next arc position).
    let mut frames: Vec<(usize, usize)> = Vec::new();
    for root in 0..n_vertices {
        if index[root] != UNVISITED {
            continue;
        }
        frames.push((root, 0));
        index[root] = next_index;
        lowlink[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut arc_pos)) = frames.last_mut() {
            if *arc_pos < graph.arcs[v].len() {
                let w = graph.arcs[v][*arc_pos] as usize;
                *arc_pos += 1;
                if index[w] == UNVISITED {
                    index[w] = next_index;
                    lowlink[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    lowlink[v] = lowlink[v].min(index[w]);
                }
            } else {
                frames.pop();
                if let Some(&(parent, _)) = frames.last() {
                    lowlink[parent] = lowlink[parent].min(lowlink[v]);
                }
                if lowlink[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("stack holds the component");
                        on_stack[w] = false;
                        component_of[w] = components.len();
                        comp.push(w as u64);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    components.push(comp);
                }
            }
        }
    }
    SccCertificate { component_of, components }
}

/// Devaney-chaos decision with the component partition as certificate:
/// chaotic exactly when the iteration graph is strongly connected.
pub fn is_devaney_chaotic(f: &BooleanFunction) -> Result<(bool, SccCertificate)> {
    let graph = build_iteration_graph(f)?;
    let cert = strongly_connected_components(&graph);
    Ok((cert.count() == 1, cert))
}

/// Transition matrix of the uniform single-cell walk, held as exact
/// numerators over the common denominator `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkovMatrix {
    dim: usize,
    denom: u32,
    /// Row-major numerators; entry (i, j) is `num[i * dim + j] / denom`.
    num: Vec<u32>,
}

impl MarkovMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn denominator(&self) -> u32 {
        self.denom
    }

    pub fn numerator(&self, row: usize, col: usize) -> u32 {
        self.num[row * self.dim + col]
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        f64::from(self.numerator(row, col)) / f64::from(self.denom)
    }

    /// Exact row sums in numerator units (a stochastic row sums to `denom`).
    pub fn row_sum_numerator(&self, row: usize) -> u64 {
        (0..self.dim).map(|j| u64::from(self.numerator(row, j))).sum()
    }

    pub fn col_sum_numerator(&self, col: usize) -> u64 {
        (0..self.dim).map(|i| u64::from(self.numerator(i, col))).sum()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        self.num.iter().map(|&v| f64::from(v) / f64::from(self.denom)).collect()
    }
}

/// Markov matrix of the walk: off-diagonal entries count arcs `i -> j`
/// weighted by `1/n`, the diagonal absorbs the self-loop mass so each row
/// sums to exactly 1. Dense storage caps the dimension at `n = 12`.
pub fn build_markov_matrix(f: &BooleanFunction) -> Result<MarkovMatrix> {
    let n = f.n();
    if n > 12 {
        return Err(Error::Resource(format!(
            "dense 2^{n} x 2^{n} matrix; capped at n = 12"
        )));
    }
    let dim = 1usize << n;
    let mut num = vec![0u32; dim * dim];
    for x in 0..dim as u64 {
        for i in 1..=n {
            let y = apply_single(f, i, x).expect("i in range") as usize;
            num[x as usize * dim + y] += 1;
        }
    }
    Ok(MarkovMatrix { dim, denom: n, num })
}

/// Column-sum check; row sums hold by construction. `tol = 0` is an exact
/// rational comparison (numerator sums against the denominator).
pub fn is_doubly_stochastic(m: &MarkovMatrix, tol: f64) -> bool {
    (0..m.dim).all(|col| {
        let sum = m.col_sum_numerator(col) as f64 / f64::from(m.denom);
        (sum - 1.0).abs() <= tol
    })
}

fn mat_mul(dim: usize, a: &[f64], b: &[f64], out: &mut [f64]) {
    out.fill(0.0);
    for i in 0..dim {
        for k in 0..dim {
            let aik = a[i * dim + k];
            if aik == 0.0 {
                continue;
            }
            let brow = &b[k * dim..(k + 1) * dim];
            let orow = &mut out[i * dim..(i + 1) * dim];
            for (o, &bv) in orow.iter_mut().zip(brow) {
                *o += aik * bv;
            }
        }
    }
}

/// Largest entrywise deviation of the Cesàro average `(1/K) sum_{k=1..K} M^k`
/// from the flat matrix `2^-n`.
pub fn cesaro_deviation(f: &BooleanFunction, k_terms: u32) -> Result<f64> {
    if k_terms == 0 {
        return Err(Error::Domain("Cesàro average needs K >= 1".into()));
    }
    let m = build_markov_matrix(f)?;
    let dim = m.dim();
    let dense = m.to_dense();
    let mut power = dense.clone(); // M^1
    let mut acc = dense.clone();
    let mut scratch = vec![0.0; dim * dim];
    for _ in 1..k_terms {
        mat_mul(dim, &power, &dense, &mut scratch);
        std::mem::swap(&mut power, &mut scratch);
        for (a, &p) in acc.iter_mut().zip(&power) {
            *a += p;
        }
    }
    let uniform = 1.0 / dim as f64;
    let k = f64::from(k_terms);
    Ok(acc
        .iter()
        .map(|&v| (v / k - uniform).abs())
        .fold(0.0, f64::max))
}

/// True when the time-averaged law is flat to within `tol`. Time averaging
/// is what the bipartite single-cell negation chain requires: its raw powers
/// alternate between the two hypercube classes and do not converge.
pub fn stationary_uniformity_check(f: &BooleanFunction, k_terms: u32, tol: f64) -> Result<bool> {
    if f.n() > 10 {
        return Err(Error::Resource("uniformity check capped at n = 10".into()));
    }
    Ok(cesaro_deviation(f, k_terms)? <= tol)
}

/// Summary consumed by the command-line `analyze` front end.
#[derive(Debug, Clone, Serialize)]
pub struct ChaosReport {
    pub chaotic: bool,
    pub scc_count: usize,
    pub doubly_stochastic: bool,
    pub cesaro_deviation: f64,
}

/// Full verification pass over one Boolean function.
pub fn analyze(f: &BooleanFunction, cesaro_terms: u32) -> Result<ChaosReport> {
    let (chaotic, cert) = is_devaney_chaotic(f)?;
    let m = build_markov_matrix(f)?;
    Ok(ChaosReport {
        chaotic,
        scc_count: cert.count(),
        doubly_stochastic: is_doubly_stochastic(&m, 0.0),
        cesaro_deviation: cesaro_deviation(f, cesaro_terms)?,
    })
}
