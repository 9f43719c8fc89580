//! Eigenvalues, eigenvalue clusters and geometric multiplicities.

use alloc::vec::Vec;
use core::cmp::Ordering;

use nalgebra::{ComplexField, DMatrix};

use super::rank::{rank_complex, rank_of};
use super::{shifted, Complex64, Matrix, Tolerance};
use crate::error::{Error, Result};

/// A group of computed eigenvalues treated as one eigenvalue.
///
/// `value` is the mean of the members; for a defective eigenvalue the
/// members scatter around the true value but their mean does not.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenCluster {
    pub value: Complex64,
    pub members: Vec<Complex64>,
}

impl EigenCluster {
    pub fn algebraic_multiplicity(&self) -> usize {
        self.members.len()
    }

    /// Points at which rank tests are evaluated: the mean first, then the
    /// individual members when the cluster is not a singleton.
    pub fn probe_points(&self) -> impl Iterator<Item = Complex64> + '_ {
        let extra = if self.members.len() > 1 {
            &self.members[..]
        } else {
            &[]
        };
        core::iter::once(self.value).chain(extra.iter().copied())
    }
}

pub(crate) fn cmp_complex(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// All `N` eigenvalues with algebraic multiplicity, ordered by real part then
/// imaginary part.
pub fn eigenvalues(d: &Matrix) -> Result<Vec<Complex64>> {
    if !d.is_square() {
        return Err(Error::NotSquare {
            rows: d.nrows(),
            cols: d.ncols(),
        });
    }
    Ok(eigenvalues_of(d.as_inner()))
}

pub(crate) fn eigenvalues_of(d: &DMatrix<f64>) -> Vec<Complex64> {
    let n = d.nrows();
    let budget = 100 * n.max(1);
    // nalgebra's Schur iteration has no exceptional shifts and stalls on
    // some structured matrices; a fixed orthogonal similarity gets it moving.
    let schur = (0..8).find_map(|k| {
        let m = if k == 0 {
            d.clone()
        } else {
            let q = reflector(n, k);
            &q * d * &q
        };
        [1.0, 5.0, 100.0]
            .into_iter()
            .find_map(|f| m.clone().try_schur(f * f64::EPSILON, budget))
    });
    let mut ev = match schur {
        Some(schur) => quasi_triangular_eigenvalues(&schur.unpack().1),
        None => d.complex_eigenvalues().iter().copied().collect(),
    };
    ev.sort_by(cmp_complex);
    ev
}

fn reflector(n: usize, k: usize) -> DMatrix<f64> {
    let v = nalgebra::DVector::from_fn(n, |i, _| 1.0 + ((i * (2 * k + 1) + k) % 7) as f64 / 3.0);
    DMatrix::identity(n, n) - &v * v.transpose() * (2.0 / v.norm_squared())
}

// nalgebra's own 2x2 block formula can yield NaN imaginary parts when the
// discriminant rounds to a tiny negative number, so blocks are solved here.
fn quasi_triangular_eigenvalues(t: &DMatrix<f64>) -> Vec<Complex64> {
    let n = t.nrows();
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)] != 0.0 {
            let (a, b, c, d) = (t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]);
            let half = (a + d) / 2.0;
            let disc = ((a - d) / 2.0) * ((a - d) / 2.0) + b * c;
            let root = num_traits::Float::sqrt(num_traits::Float::abs(disc));
            if disc >= 0.0 {
                out.push(Complex64::new(half - root, 0.0));
                out.push(Complex64::new(half + root, 0.0));
            } else {
                out.push(Complex64::new(half, -root));
                out.push(Complex64::new(half, root));
            }
            i += 2;
        } else {
            out.push(Complex64::new(t[(i, i)], 0.0));
            i += 1;
        }
    }
    out
}

/// Radius within which `k` computed eigenvalues may be fragments of one
/// defective eigenvalue: perturbations of size eps*|D| move an eigenvalue of
/// multiplicity k by up to about (eps*|D|)^(1/k) * |D|^((k-1)/k).
fn fragment_radius(k: usize, scale: f64, tol: &Tolerance) -> f64 {
    let base = tol.eig_cluster * scale.max(1.0);
    if k < 2 {
        return base;
    }
    let spread = 10.0 * num_traits::Float::powf(f64::EPSILON, 1.0 / k as f64) * scale;
    base.max(spread)
}

/// Groups eigenvalues into clusters. A candidate group is the connected
/// component of eigenvalues linked within the fragment radius for the
/// group's size; components are refined with their own size until stable.
pub fn eigen_clusters(d: &Matrix, tol: &Tolerance) -> Result<Vec<EigenCluster>> {
    let ev = eigenvalues(d)?;
    Ok(cluster_eigenvalues(&ev, d.norm(), tol))
}

pub(crate) fn clusters_of(d: &DMatrix<f64>, tol: &Tolerance) -> Vec<EigenCluster> {
    cluster_eigenvalues(&eigenvalues_of(d), d.norm(), tol)
}

pub(crate) fn cluster_eigenvalues(ev: &[Complex64], scale: f64, tol: &Tolerance) -> Vec<EigenCluster> {
    let mut groups: Vec<Vec<Complex64>> = Vec::new();
    let mut pending: Vec<Vec<Complex64>> = alloc::vec![ev.to_vec()];
    while let Some(group) = pending.pop() {
        if group.is_empty() {
            continue;
        }
        let parts = components(&group, fragment_radius(group.len(), scale, tol));
        if parts.len() == 1 {
            groups.push(group);
        } else {
            pending.extend(parts);
        }
    }
    let mut clusters: Vec<EigenCluster> = groups
        .into_iter()
        .map(|mut members| {
            members.sort_by(cmp_complex);
            let k = members.len() as f64;
            let sum = members.iter().fold(Complex64::new(0.0, 0.0), |a, b| a + b);
            let mut value = sum / k;
            if value.im.abs() <= tol.eig_cluster * scale.max(1.0) {
                value.im = 0.0;
            }
            EigenCluster { value, members }
        })
        .collect();
    clusters.sort_by(|a, b| cmp_complex(&a.value, &b.value));
    clusters
}

fn components(points: &[Complex64], radius: f64) -> Vec<Vec<Complex64>> {
    let mut label: Vec<usize> = (0..points.len()).collect();
    fn root(label: &mut [usize], mut i: usize) -> usize {
        while label[i] != i {
            label[i] = label[label[i]];
            i = label[i];
        }
        i
    }
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if (points[i] - points[j]).modulus() <= radius {
                let (a, b) = (root(&mut label, i), root(&mut label, j));
                label[a.max(b)] = a.min(b);
            }
        }
    }
    let mut out: Vec<Vec<Complex64>> = Vec::new();
    let mut slot: Vec<Option<usize>> = alloc::vec![None; points.len()];
    for (i, &p) in points.iter().enumerate() {
        let r = root(&mut label, i);
        let k = *slot[r].get_or_insert_with(|| {
            out.push(Vec::new());
            out.len() - 1
        });
        out[k].push(p);
    }
    out
}

/// Unit vector `v` minimising `|(lambda I - D) v|`; an eigenvector when
/// `lambda` is an eigenvalue.
pub fn eigenvector(d: &Matrix, lambda: Complex64) -> Result<Vec<Complex64>> {
    if !d.is_square() {
        return Err(Error::NotSquare {
            rows: d.nrows(),
            cols: d.ncols(),
        });
    }
    let m = shifted(d.as_inner(), lambda);
    Ok(smallest_right_singular_vector(&m))
}

/// Right singular vector for the smallest singular value, phase-normalised
/// so that its largest-magnitude entry is real and positive.
pub(crate) fn smallest_right_singular_vector(m: &super::ComplexMatrix) -> Vec<Complex64> {
    let n = m.ncols();
    // Pad to at least square so the thin SVD exposes the full right space.
    let padded = if m.nrows() < n {
        let mut p = super::ComplexMatrix::zeros(n, n);
        p.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = super::svd_of(&padded);
    let v_t = svd.v_t.expect("requested v_t");
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bs), (i, &s)| if s < bs { (i, s) } else { (bi, bs) });
    let v: Vec<Complex64> = v_t.row(idx).iter().map(|c| c.conj()).collect();
    normalise_phase(v)
}

pub(crate) fn normalise_phase(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let mut pivot = 0;
    for (i, c) in v.iter().enumerate() {
        if c.modulus() > v[pivot].modulus() + 1e-12 {
            pivot = i;
        }
    }
    let p = v[pivot];
    let nrm: f64 = num_traits::Float::sqrt(v.iter().map(|c| c.norm_sqr()).sum::<f64>());
    if p.modulus() > 0.0 && nrm > 0.0 {
        let phase = p.conj() / p.modulus();
        for c in v.iter_mut() {
            *c = *c * phase / nrm;
        }
    }
    v
}

/// Largest geometric multiplicity `N - rank(lambda I - D)` over the
/// eigenvalue clusters of `D`. The multiplicity of the zero eigenvalue is
/// taken as `N - rank(D)` directly, which is exact in rational mode.
pub fn max_geometric_multiplicity(d: &Matrix, tol: &Tolerance) -> Result<usize> {
    if !d.is_square() {
        return Err(Error::NotSquare {
            rows: d.nrows(),
            cols: d.ncols(),
        });
    }
    Ok(geometric_multiplicity_of(d.as_inner(), &clusters_of(d.as_inner(), tol), tol))
}

pub(crate) fn geometric_multiplicity_of(
    d: &DMatrix<f64>,
    clusters: &[EigenCluster],
    tol: &Tolerance,
) -> usize {
    let n = d.nrows();
    let mut g = n - rank_of(d, tol);
    for c in clusters {
        g = g.max(n - rank_complex(&shifted(d, c.value), tol));
    }
    g.max(1)
}

pub(crate) fn spectral_radius(clusters: &[EigenCluster]) -> f64 {
    clusters
        .iter()
        .flat_map(|c| c.members.iter())
        .map(|e| e.modulus())
        .fold(0.0, f64::max)
}
