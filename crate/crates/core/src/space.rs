//! Discontinuous P_k spaces on triangles: reference Lagrange basis with
//! exact derivatives through order four, and quadrature rules.

use crate::error::FoldError;
use crate::mesh::Mesh;

/// Reference triangle: vertices (0,0), (1,0), (0,1).
/// Barycentric coordinates are (1-x-y, x, y).
pub const REF_VERTICES: [[f64; 2]; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];

/// Value and derivatives of a single basis function at a point.
///
/// Tensors are stored fully; they are symmetric under index permutation.
#[derive(Clone, Copy, Debug, Default)]
pub struct BasisEval {
    pub value: f64,
    pub grad: [f64; 2],
    pub hess: [[f64; 2]; 2],
    pub third: [[[f64; 2]; 2]; 2],
    pub fourth: [[[[f64; 2]; 2]; 2]; 2],
}

impl BasisEval {
    /// Laplacian from the Hessian.
    pub fn laplacian(&self) -> f64 {
        self.hess[0][0] + self.hess[1][1]
    }

    /// `D^2 v · n` (the normal derivative of the gradient).
    pub fn dn_grad(&self, n: [f64; 2]) -> [f64; 2] {
        [
            self.hess[0][0] * n[0] + self.hess[0][1] * n[1],
            self.hess[1][0] * n[0] + self.hess[1][1] * n[1],
        ]
    }

    /// `∂_n Δv = ∇(Δv) · n`, from third derivatives.
    pub fn dn_laplacian(&self, n: [f64; 2]) -> f64 {
        let gx = self.third[0][0][0] + self.third[1][1][0];
        let gy = self.third[0][0][1] + self.third[1][1][1];
        gx * n[0] + gy * n[1]
    }

    /// Biharmonic operator `Δ²v`, from fourth derivatives.
    pub fn bilaplacian(&self) -> f64 {
        self.fourth[0][0][0][0] + 2.0 * self.fourth[0][0][1][1] + self.fourth[1][1][1][1]
    }
}

/// Lagrange basis of degree k on the principal lattice of the reference
/// triangle, stored as monomial coefficients so derivatives are exact.
#[derive(Clone, Debug)]
pub struct RefBasis {
    pub k: usize,
    /// Lattice nodes in reference coordinates.
    pub nodes: Vec<[f64; 2]>,
    /// Monomial exponents (i, j) meaning x^i y^j.
    monos: Vec<(usize, usize)>,
    /// coeffs[b][m]: coefficient of monomial m in basis function b.
    coeffs: Vec<Vec<f64>>,
}

fn lattice_nodes(k: usize) -> Vec<[f64; 2]> {
    let mut nodes = Vec::new();
    for i in 0..=k {
        for j in 0..=(k - i) {
            nodes.push([i as f64 / k as f64, j as f64 / k as f64]);
        }
    }
    nodes
}

fn monomials(k: usize) -> Vec<(usize, usize)> {
    let mut m = Vec::new();
    for i in 0..=k {
        for j in 0..=(k - i) {
            m.push((i, j));
        }
    }
    m
}

/// Dense Gaussian elimination with partial pivoting; n is small (<= 15).
fn invert_dense(a: &mut [Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
            .unwrap();
        a.swap(col, piv);
        inv.swap(col, piv);
        let d = a[col][col];
        assert!(d.abs() > 1e-14, "singular Vandermonde matrix");
        for j in 0..n {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for r in 0..n {
            if r != col {
                let f = a[r][col];
                if f != 0.0 {
                    for j in 0..n {
                        a[r][j] -= f * a[col][j];
                        inv[r][j] -= f * inv[col][j];
                    }
                }
            }
        }
    }
    inv
}

impl RefBasis {
    pub fn new(k: usize) -> Result<Self, FoldError> {
        if k < 1 {
            return Err(FoldError::UnsupportedDegree(k));
        }
        let nodes = lattice_nodes(k);
        let monos = monomials(k);
        let n = nodes.len();
        // Vandermonde: V[node][mono]
        let mut v: Vec<Vec<f64>> = nodes
            .iter()
            .map(|p| {
                monos
                    .iter()
                    .map(|&(i, j)| p[0].powi(i as i32) * p[1].powi(j as i32))
                    .collect()
            })
            .collect();
        let vinv = invert_dense(&mut v);
        // basis b has coefficients = column b of V^{-1}
        let coeffs: Vec<Vec<f64>> = (0..n).map(|b| (0..n).map(|m| vinv[m][b]).collect()).collect();
        Ok(RefBasis { k, nodes, monos, coeffs })
    }

    pub fn ndof(&self) -> usize {
        self.nodes.len()
    }

    /// Partial derivative ∂^{a+b} / ∂x^a ∂y^b of basis function `b` at `p`.
    fn partial(&self, b: usize, p: [f64; 2], ax: usize, ay: usize) -> f64 {
        let mut s = 0.0;
        for (m, &(i, j)) in self.monos.iter().enumerate() {
            if i < ax || j < ay {
                continue;
            }
            let c = self.coeffs[b][m];
            if c == 0.0 {
                continue;
            }
            let mut fac = 1.0;
            for t in 0..ax {
                fac *= (i - t) as f64;
            }
            for t in 0..ay {
                fac *= (j - t) as f64;
            }
            s += c * fac * p[0].powi((i - ax) as i32) * p[1].powi((j - ay) as i32);
        }
        s
    }

    /// Evaluate all basis functions at reference point `p` with derivatives
    /// up to `max_order` (0..=4). Higher tensors are left zero.
    pub fn eval(&self, p: [f64; 2], max_order: usize) -> Result<Vec<BasisEval>, FoldError> {
        if max_order > 4 {
            return Err(FoldError::UnsupportedDerivativeOrder(max_order));
        }
        let n = self.ndof();
        let mut out = vec![BasisEval::default(); n];
        for b in 0..n {
            let e = &mut out[b];
            e.value = self.partial(b, p, 0, 0);
            if max_order >= 1 {
                e.grad = [self.partial(b, p, 1, 0), self.partial(b, p, 0, 1)];
            }
            if max_order >= 2 {
                let d = [
                    self.partial(b, p, 2, 0),
                    self.partial(b, p, 1, 1),
                    self.partial(b, p, 0, 2),
                ];
                for i in 0..2 {
                    for j in 0..2 {
                        e.hess[i][j] = d[i + j];
                    }
                }
            }
            if max_order >= 3 {
                let d = [
                    self.partial(b, p, 3, 0),
                    self.partial(b, p, 2, 1),
                    self.partial(b, p, 1, 2),
                    self.partial(b, p, 0, 3),
                ];
                for i in 0..2 {
                    for j in 0..2 {
                        for l in 0..2 {
                            e.third[i][j][l] = d[i + j + l];
                        }
                    }
                }
            }
            if max_order >= 4 {
                let d = [
                    self.partial(b, p, 4, 0),
                    self.partial(b, p, 3, 1),
                    self.partial(b, p, 2, 2),
                    self.partial(b, p, 1, 3),
                    self.partial(b, p, 0, 4),
                ];
                for i in 0..2 {
                    for j in 0..2 {
                        for l in 0..2 {
                            for m in 0..2 {
                                e.fourth[i][j][l][m] = d[i + j + l + m];
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Barycentric interface matching the spec: p = (λ0, λ1, λ2).
pub fn reference_basis(
    k: usize,
    bary: [f64; 3],
    max_order: usize,
) -> Result<Vec<BasisEval>, FoldError> {
    let basis = RefBasis::new(k)?;
    basis.eval([bary[1], bary[2]], max_order)
}

/// Affine map from the reference triangle onto a physical triangle.
#[derive(Clone, Copy, Debug)]
pub struct ElementMap {
    pub origin: [f64; 2],
    pub jac: [[f64; 2]; 2],
    pub jinv: [[f64; 2]; 2],
    pub det: f64,
}

impl ElementMap {
    pub fn new(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> Self {
        let jac = [[b[0] - a[0], c[0] - a[0]], [b[1] - a[1], c[1] - a[1]]];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let jinv = [
            [jac[1][1] / det, -jac[0][1] / det],
            [-jac[1][0] / det, jac[0][0] / det],
        ];
        ElementMap { origin: a, jac, jinv, det }
    }

    pub fn from_mesh(mesh: &Mesh, t: usize) -> Self {
        let tv = mesh.triangles[t].v;
        Self::new(
            mesh.vertices[tv[0]].pos,
            mesh.vertices[tv[1]].pos,
            mesh.vertices[tv[2]].pos,
        )
    }

    pub fn to_physical(&self, r: [f64; 2]) -> [f64; 2] {
        [
            self.origin[0] + self.jac[0][0] * r[0] + self.jac[0][1] * r[1],
            self.origin[1] + self.jac[1][0] * r[0] + self.jac[1][1] * r[1],
        ]
    }

    pub fn to_reference(&self, p: [f64; 2]) -> [f64; 2] {
        // jinv rows are ∂ξ_a/∂x_i with ξ = Jinv (x - origin); here jinv is
        // the matrix inverse of jac, so ξ = jinv · (x - origin).
        let d = [p[0] - self.origin[0], p[1] - self.origin[1]];
        [
            self.jinv[0][0] * d[0] + self.jinv[0][1] * d[1],
            self.jinv[1][0] * d[0] + self.jinv[1][1] * d[1],
        ]
    }

    /// Push reference-space derivatives to physical space by the chain rule.
    pub fn push(&self, r: &BasisEval, max_order: usize) -> BasisEval {
        // ji[a][i] = ∂ξ_a / ∂x_i
        let ji = self.jinv;
        let mut e = BasisEval { value: r.value, ..Default::default() };
        if max_order >= 1 {
            for i in 0..2 {
                e.grad[i] = r.grad[0] * ji[0][i] + r.grad[1] * ji[1][i];
            }
        }
        if max_order >= 2 {
            for i in 0..2 {
                for j in 0..2 {
                    let mut s = 0.0;
                    for a in 0..2 {
                        for b in 0..2 {
                            s += r.hess[a][b] * ji[a][i] * ji[b][j];
                        }
                    }
                    e.hess[i][j] = s;
                }
            }
        }
        if max_order >= 3 {
            for i in 0..2 {
                for j in 0..2 {
                    for l in 0..2 {
                        let mut s = 0.0;
                        for a in 0..2 {
                            for b in 0..2 {
                                for c in 0..2 {
                                    s += r.third[a][b][c] * ji[a][i] * ji[b][j] * ji[c][l];
                                }
                            }
                        }
                        e.third[i][j][l] = s;
                    }
                }
            }
        }
        if max_order >= 4 {
            for i in 0..2 {
                for j in 0..2 {
                    for l in 0..2 {
                        for m in 0..2 {
                            let mut s = 0.0;
                            for a in 0..2 {
                                for b in 0..2 {
                                    for c in 0..2 {
                                        for d in 0..2 {
                                            s += r.fourth[a][b][c][d]
                                                * ji[a][i]
                                                * ji[b][j]
                                                * ji[c][l]
                                                * ji[d][m];
                                        }
                                    }
                                }
                            }
                            e.fourth[i][j][l][m] = s;
                        }
                    }
                }
            }
        }
        e
    }
}

/// Degree-k fully discontinuous space over a mesh. Holds no mesh reference;
/// the mesh is passed alongside wherever element data is needed.
#[derive(Clone, Debug)]
pub struct DgSpace {
    pub k: usize,
    pub basis: RefBasis,
}

impl DgSpace {
    pub fn new(k: usize) -> Result<Self, FoldError> {
        if !(2..=4).contains(&k) {
            return Err(FoldError::UnsupportedDegree(k));
        }
        Ok(DgSpace { k, basis: RefBasis::new(k)? })
    }

    pub fn dofs_per_element(&self) -> usize {
        (self.k + 1) * (self.k + 2) / 2
    }

    pub fn num_dofs(&self, mesh: &Mesh) -> usize {
        mesh.triangles.len() * self.dofs_per_element()
    }

    pub fn element_dofs(&self, t: usize) -> std::ops::Range<usize> {
        let nb = self.dofs_per_element();
        t * nb..(t + 1) * nb
    }

    /// Evaluate the discrete function given by `coeffs` at physical point `p`
    /// inside element `t`, with derivatives up to `max_order`.
    pub fn eval_in_element(
        &self,
        mesh: &Mesh,
        t: usize,
        p: [f64; 2],
        coeffs: &[f64],
        max_order: usize,
    ) -> Result<BasisEval, FoldError> {
        let map = ElementMap::from_mesh(mesh, t);
        let r = map.to_reference(p);
        let tol = 1e-12;
        if r[0] < -tol || r[1] < -tol || r[0] + r[1] > 1.0 + tol {
            return Err(FoldError::PointOutsideElement { point: p, element: t });
        }
        Ok(self.eval_at_reference(mesh, t, r, coeffs, max_order))
    }

    /// Same as `eval_in_element` but with a trusted reference point.
    pub fn eval_at_reference(
        &self,
        mesh: &Mesh,
        t: usize,
        r: [f64; 2],
        coeffs: &[f64],
        max_order: usize,
    ) -> BasisEval {
        let map = ElementMap::from_mesh(mesh, t);
        let evs = self.basis.eval(r, max_order).expect("order <= 4");
        let dofs = self.element_dofs(t);
        let local = &coeffs[dofs];
        let mut acc = BasisEval::default();
        for (b, ev) in evs.iter().enumerate() {
            let pe = map.push(ev, max_order);
            let c = local[b];
            acc.value += c * pe.value;
            for i in 0..2 {
                acc.grad[i] += c * pe.grad[i];
                for j in 0..2 {
                    acc.hess[i][j] += c * pe.hess[i][j];
                    for l in 0..2 {
                        acc.third[i][j][l] += c * pe.third[i][j][l];
                        for m in 0..2 {
                            acc.fourth[i][j][l][m] += c * pe.fourth[i][j][l][m];
                        }
                    }
                }
            }
        }
        acc
    }

    /// Nodal interpolation of a scalar field, element by element.
    pub fn interpolate(&self, mesh: &Mesh, f: &dyn Fn([f64; 2]) -> f64) -> Vec<f64> {
        let nb = self.dofs_per_element();
        let mut coeffs = vec![0.0; self.num_dofs(mesh)];
        for t in 0..mesh.triangles.len() {
            let map = ElementMap::from_mesh(mesh, t);
            for (b, node) in self.basis.nodes.iter().enumerate() {
                coeffs[t * nb + b] = f(map.to_physical(*node));
            }
        }
        coeffs
    }
}

/// Quadrature rule in reference coordinates with positive weights.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    /// Points; for triangle rules these are (x, y) in the reference triangle,
    /// for edge rules (s, 0) with s in (0, 1).
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

/// Gauss-Legendre nodes/weights on (0, 1), by Newton iteration on P_n.
fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        // initial guess on (-1, 1)
        let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            // Legendre P_n and derivative by recurrence
            let (mut p0, mut p1) = (1.0, t);
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * t * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
            let dt = p1 / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0, t);
        for j in 2..=n {
            let jf = j as f64;
            let p2 = ((2.0 * jf - 1.0) * t * p1 - (jf - 1.0) * p0) / jf;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
        x[i] = 0.5 * (1.0 - t); // map to (0,1), also fixes ordering
        w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
    }
    // sort ascending for determinism
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    (
        idx.iter().map(|&i| x[i]).collect(),
        idx.iter().map(|&i| w[i]).collect(),
    )
}

/// Rule exact for polynomials of total degree `d` on the reference triangle,
/// built by a Duffy transform of tensor Gauss-Legendre.
pub fn triangle_quadrature(d: usize) -> Result<QuadratureRule, FoldError> {
    if d > 20 {
        return Err(FoldError::UnsupportedDegree(d));
    }
    // x = u, y = v (1 - u), Jacobian (1 - u): degree d integrand becomes
    // degree d + 1 in u and d in v.
    let nu = (d + 3) / 2;
    let nv = (d + 2) / 2;
    let (xu, wu) = gauss_legendre_unit(nu.max(1));
    let (xv, wv) = gauss_legendre_unit(nv.max(1));
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for (iu, &u) in xu.iter().enumerate() {
        for (iv, &v) in xv.iter().enumerate() {
            points.push([u, v * (1.0 - u)]);
            weights.push(wu[iu] * wv[iv] * (1.0 - u));
        }
    }
    Ok(QuadratureRule { points, weights })
}

/// Rule exact for degree `d` on the reference edge (0, 1).
pub fn edge_quadrature(d: usize) -> Result<QuadratureRule, FoldError> {
    if d > 20 {
        return Err(FoldError::UnsupportedDegree(d));
    }
    let n = (d + 2) / 2;
    let (x, w) = gauss_legendre_unit(n.max(1));
    Ok(QuadratureRule {
        points: x.iter().map(|&s| [s, 0.0]).collect(),
        weights: w,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn factorial(n: usize) -> f64 {
        (1..=n).product::<usize>() as f64
    }

    /// Exact integral of x^a y^b over the unit simplex: a! b! / (a+b+2)!.
    fn simplex_monomial(a: usize, b: usize) -> f64 {
        factorial(a) * factorial(b) / factorial(a + b + 2)
    }

    #[test]
    fn triangle_rule_weight_sums_and_exactness() {
        for d in 0..=12 {
            let q = triangle_quadrature(d).unwrap();
            let s: f64 = q.weights.iter().sum();
            assert!((s - 0.5).abs() < 1e-14, "d={d}: weight sum {s}");
            for a in 0..=d {
                for b in 0..=(d - a) {
                    let num: f64 = q
                        .points
                        .iter()
                        .zip(&q.weights)
                        .map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32))
                        .sum();
                    let exact = simplex_monomial(a, b);
                    assert!(
                        (num - exact).abs() < 1e-14,
                        "d={d} monomial x^{a} y^{b}: {num} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn triangle_rule_x2y2() {
        let q = triangle_quadrature(4).unwrap();
        let num: f64 = q
            .points
            .iter()
            .zip(&q.weights)
            .map(|(p, w)| w * p[0] * p[0] * p[1] * p[1])
            .sum();
        assert!((num - 1.0 / 180.0).abs() < 1e-15);
    }

    #[test]
    fn edge_rule_exactness() {
        for d in 0..=14 {
            let q = edge_quadrature(d).unwrap();
            let s: f64 = q.weights.iter().sum();
            assert!((s - 1.0).abs() < 1e-14);
            for a in 0..=d {
                let num: f64 = q
                    .points
                    .iter()
                    .zip(&q.weights)
                    .map(|(p, w)| w * p[0].powi(a as i32))
                    .sum();
                let exact = 1.0 / (a as f64 + 1.0);
                assert!((num - exact).abs() < 1e-14, "d={d} s^{a}");
            }
        }
    }

    #[test]
    fn degree_limit_rejected() {
        assert!(triangle_quadrature(21).is_err());
        assert!(edge_quadrature(21).is_err());
        assert!(RefBasis::new(2).unwrap().eval([0.2, 0.3], 5).is_err());
    }

    #[test]
    fn p1_centroid_values() {
        let evs = reference_basis(1, [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 0).unwrap();
        assert_eq!(evs.len(), 3);
        for e in &evs {
            assert!((e.value - 1.0 / 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn lagrange_property_k2() {
        let basis = RefBasis::new(2).unwrap();
        for (i, node) in basis.nodes.clone().iter().enumerate() {
            let evs = basis.eval(*node, 0).unwrap();
            for (j, e) in evs.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((e.value - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn partition_of_unity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in 2..=4 {
            let basis = RefBasis::new(k).unwrap();
            for _ in 0..50 {
                let x: f64 = rng.random::<f64>();
                let y: f64 = rng.random::<f64>() * (1.0 - x);
                let evs = basis.eval([x, y], 1).unwrap();
                let vs: f64 = evs.iter().map(|e| e.value).sum();
                let gx: f64 = evs.iter().map(|e| e.grad[0]).sum();
                let gy: f64 = evs.iter().map(|e| e.grad[1]).sum();
                assert!((vs - 1.0).abs() < 1e-13);
                assert!(gx.abs() < 1e-13 && gy.abs() < 1e-13);
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for k in 2..=4 {
            let basis = RefBasis::new(k).unwrap();
            for _ in 0..20 {
                let x: f64 = 0.05 + 0.4 * rng.random::<f64>();
                let y: f64 = 0.05 + 0.4 * rng.random::<f64>();
                let h = 1e-6;
                for b in 0..basis.ndof() {
                    // order 1 vs central difference of values
                    let gx = (basis.partial(b, [x + h, y], 0, 0)
                        - basis.partial(b, [x - h, y], 0, 0))
                        / (2.0 * h);
                    let exact = basis.partial(b, [x, y], 1, 0);
                    assert!((gx - exact).abs() < 1e-6 * (1.0 + exact.abs()));
                    // each order m from the order below
                    for ax in 0..4usize {
                        for ay in 0..(4 - ax) {
                            let fd = (basis.partial(b, [x + h, y], ax, ay)
                                - basis.partial(b, [x - h, y], ax, ay))
                                / (2.0 * h);
                            let ex = basis.partial(b, [x, y], ax + 1, ay);
                            assert!(
                                (fd - ex).abs() < 1e-6 * (1.0 + ex.abs()),
                                "k={k} b={b} d({ax},{ay})/dx"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn interpolation_reproduces_polynomials() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in 2..=4usize {
            let basis = RefBasis::new(k).unwrap();
            // interpolate q(x,y) = (x + 2y)^k restricted to degree-k space
            let q = |p: [f64; 2]| (p[0] + 2.0 * p[1]).powi(k as i32);
            let coeffs: Vec<f64> = basis.nodes.iter().map(|&n| q(n)).collect();
            for _ in 0..100 {
                let x: f64 = rng.random::<f64>();
                let y: f64 = rng.random::<f64>() * (1.0 - x);
                let evs = basis.eval([x, y], 0).unwrap();
                let v: f64 = evs.iter().zip(&coeffs).map(|(e, c)| e.value * c).sum();
                assert!((v - q([x, y])).abs() < 1e-12);
            }
        }
    }
}
