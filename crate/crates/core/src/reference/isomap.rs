use std::cmp::Ordering;
use std::collections::BinaryHeap;

use ndarray::parallel::prelude::*;
use ndarray::{s, Array2, ArrayView2, Axis};

use super::eigen::sym_eigh;
use crate::error::{ensure_dims, Result, SefError};
use crate::similarity::{knn_indicator, sq_distances_unchecked};

#[derive(Debug, Clone, Copy, PartialEq)]
struct Frontier {
    dist: f64,
    node: usize,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance, then node index
        other.dist.total_cmp(&self.dist).then(other.node.cmp(&self.node))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn dijkstra(adj: &[Vec<(usize, f64)>], source: usize, out: &mut [f64]) {
    out.fill(f64::INFINITY);
    out[source] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(Frontier { dist: 0.0, node: source });
    while let Some(Frontier { dist, node }) = heap.pop() {
        if dist > out[node] {
            continue;
        }
        for &(next, w) in &adj[node] {
            let cand = dist + w;
            if cand < out[next] {
                out[next] = cand;
                heap.push(Frontier { dist: cand, node: next });
            }
        }
    }
}

fn count_components(adj: &[Vec<(usize, f64)>]) -> usize {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut components = 0;
    let mut stack = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(u) = stack.pop() {
            for &(v, _) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
    }
    components
}

/// All-pairs shortest-path lengths over the symmetrized k-NN graph, with
/// Euclidean edge lengths.
pub fn geodesic_distances(x: ArrayView2<'_, f64>, k: usize) -> Result<Array2<f64>> {
    let n = x.nrows();
    let neighbours = knn_indicator(x, k)?;
    let d2 = sq_distances_unchecked(x);
    let adj: Vec<Vec<(usize, f64)>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && neighbours[[i, j]])
                .map(|j| (j, d2[[i, j]].sqrt()))
                .collect()
        })
        .collect();
    let components = count_components(&adj);
    if components > 1 {
        return Err(SefError::DisconnectedGraph { components });
    }
    let mut geo = Array2::<f64>::zeros((n, n));
    geo.axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(i, mut row)| {
            let mut buf = vec![0.0; n];
            dijkstra(&adj, i, &mut buf);
            row.iter_mut().zip(buf).for_each(|(r, v)| *r = v);
        });
    // Dijkstra from i and from j can differ in the last bit; keep it exactly symmetric.
    for i in 0..n {
        for j in (i + 1)..n {
            let v = geo[[i, j]].min(geo[[j, i]]);
            geo[[i, j]] = v;
            geo[[j, i]] = v;
        }
    }
    Ok(geo)
}

/// Classical MDS of a distance matrix: eigenvectors of the double-centered
/// squared distances, scaled by the square roots of the (clamped) eigenvalues.
pub fn classical_mds(dist: ArrayView2<'_, f64>, m: usize) -> Result<Array2<f64>> {
    let n = dist.nrows();
    ensure_dims(n, dist.ncols())?;
    if m == 0 || m > n {
        return Err(SefError::InvalidParameter(format!(
            "MDS dimensionality must lie in 1..={n}, got {m}"
        )));
    }
    let sq = dist.mapv(|v| v * v);
    let row_mean = sq.mean_axis(Axis(1)).expect("non-empty");
    let col_mean = sq.mean_axis(Axis(0)).expect("non-empty");
    let grand = sq.mean().expect("non-empty");
    let b = Array2::from_shape_fn((n, n), |(i, j)| {
        -0.5 * (sq[[i, j]] - row_mean[i] - col_mean[j] + grand)
    });
    let eig = sym_eigh(b.view())?;
    let mut y = eig.eigenvectors.slice(s![.., ..m]).to_owned();
    for (k, mut col) in y.columns_mut().into_iter().enumerate() {
        col *= eig.eigenvalues[k].max(0.0).sqrt();
    }
    Ok(y)
}

/// ISOMAP embedding: geodesic distances on the k-NN graph followed by
/// classical MDS.
pub fn isomap(x: ArrayView2<'_, f64>, k: usize, m: usize) -> Result<Array2<f64>> {
    let geo = geodesic_distances(x, k)?;
    classical_mds(geo.view(), m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn collinear_points_are_recovered() {
        let x = array![[0.0, 0.0], [1.0, 1.0], [3.0, 3.0], [4.0, 4.0], [6.0, 6.0]];
        let geo = geodesic_distances(x.view(), 2).unwrap();
        let euclid = sq_distances_unchecked(x.view()).mapv(f64::sqrt);
        for (a, b) in geo.iter().zip(euclid.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
        let y = isomap(x.view(), 2, 1).unwrap();
        // positions along the line up to sign and offset
        let t: Vec<f64> = x.column(0).iter().map(|v| v * 2f64.sqrt()).collect();
        let sign = if (y[[4, 0]] - y[[0, 0]]) > 0.0 { 1.0 } else { -1.0 };
        let offset = y[[0, 0]] * sign - t[0];
        for i in 0..5 {
            assert!((y[[i, 0]] * sign - offset - t[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn three_points_by_hand() {
        // With k = 1: 0-1 and 1-2 are mutual/nearest edges, 0-2 is not an edge.
        let x = array![[0.0], [1.0], [3.0]];
        let geo = geodesic_distances(x.view(), 1).unwrap();
        assert_eq!(geo[[0, 2]], 3.0);
        assert_eq!(geo[[0, 1]], 1.0);
        assert_eq!(geo[[1, 2]], 2.0);
    }

    #[test]
    fn disconnected_graph_is_an_error() {
        let x = array![[0.0], [0.1], [100.0], [100.1]];
        assert!(matches!(
            geodesic_distances(x.view(), 1),
            Err(SefError::DisconnectedGraph { components: 2 })
        ));
    }
}
