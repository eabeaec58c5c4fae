//! Jacobson radical of a matrix algebra over `F_q`.
//!
//! The radical is ring-theoretic, so it is computed for the algebra viewed
//! over the prime field `F_p` (each `F_q` entry becomes its `m × m`
//! multiplication matrix). Over `F_p` we use the iterated trace functionals
//! of Cohen, Ivanyos and Wales: with `l = ⌊log_p n⌋`, `I_{-1} = A` and
//!
//! ```text
//! g_i(a) = Tr(ã^{p^i}) / p^i  mod p        (ã an integer lift of a)
//! I_i    = { a ∈ I_{i-1} : g_i(ab) = 0 for all b ∈ A }
//! ```
//!
//! each `g_i` is linear on `I_{i-1}` and `I_l = rad(A)`.

use crate::gf::{kernel, span_basis, Fe, Field, Matrix};

/// Integer matrix with entries reduced modulo some `p^k`.
#[derive(Clone)]
struct IntMatrix {
    n: usize,
    data: Vec<u64>,
}

impl IntMatrix {
    fn mul_mod(&self, other: &IntMatrix, modulus: u64) -> IntMatrix {
        let n = self.n;
        let mut out = vec![0u64; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let b = other.data[k * n + j];
                    if b != 0 {
                        out[i * n + j] = (out[i * n + j] + a * b) % modulus;
                    }
                }
            }
        }
        IntMatrix { n, data: out }
    }

    fn pow_mod(&self, mut e: u64, modulus: u64) -> IntMatrix {
        let n = self.n;
        let mut acc = IntMatrix {
            n,
            data: (0..n * n).map(|i| u64::from(i % (n + 1) == 0) % modulus).collect(),
        };
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_mod(&base, modulus);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_mod(&base, modulus);
            }
        }
        acc
    }

    fn trace(&self, modulus: u64) -> u64 {
        (0..self.n).map(|i| self.data[i * self.n + i]).sum::<u64>() % modulus
    }
}

/// `F_q` matrix as an `F_p` matrix of size `nm`, entries in `0..p`.
fn to_prime_field(f: &Field, a: &Matrix) -> IntMatrix {
    let m = f.m() as usize;
    let n = a.rows();
    let big = n * m;
    let mut data = vec![0u64; big * big];
    // Multiplication-by-c matrix in the power basis: column t = coords(c·ω^t).
    let basis: Vec<Fe> = (0..m).map(|t| Fe((f.p() as u32).pow(t as u32))).collect();
    for r in 0..n {
        for c in 0..n {
            let x = a[(r, c)];
            if x.is_zero() {
                continue;
            }
            for (t, &w) in basis.iter().enumerate() {
                let col = f.coords(f.mul(x, w));
                for (s, &v) in col.iter().enumerate() {
                    data[(r * m + s) * big + c * m + t] = v as u64;
                }
            }
        }
    }
    IntMatrix { n: big, data }
}

fn from_prime_field(f: &Field, a: &IntMatrix, n: usize) -> Matrix {
    let m = f.m() as usize;
    let big = a.n;
    let mut out = Matrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            // Block (r, c) applied to 1 = column c*m of the block.
            let coords: Vec<u32> = (0..m).map(|s| a.data[(r * m + s) * big + c * m] as u32).collect();
            out[(r, c)] = f.from_coords(&coords);
        }
    }
    out
}

fn combine(p: u64, coeffs: &[u32], mats: &[IntMatrix]) -> IntMatrix {
    let n = mats[0].n;
    let mut data = vec![0u64; n * n];
    for (&c, m) in coeffs.iter().zip(mats) {
        if c == 0 {
            continue;
        }
        for (d, &x) in data.iter_mut().zip(&m.data) {
            *d = (*d + c as u64 * x) % p;
        }
    }
    IntMatrix { n, data }
}

/// `F_q`-basis of the Jacobson radical of the algebra spanned by `basis`
/// (which must be closed under multiplication and contain the identity, or at
/// least act faithfully on `k^n`).
pub fn radical_of_matrix_algebra(f: &Field, basis: &[Matrix]) -> Vec<Matrix> {
    if basis.is_empty() {
        return Vec::new();
    }
    let n = basis[0].rows();
    if n == 0 {
        return Vec::new();
    }
    let p = f.p() as u64;
    let m = f.m() as usize;
    // F_p basis: ω^t · b.
    let mut fp_basis = Vec::with_capacity(basis.len() * m);
    for b in basis {
        for t in 0..m {
            let w = Fe((f.p() as u32).pow(t as u32));
            fp_basis.push(to_prime_field(f, &b.scale(f, w)));
        }
    }
    let big = n * m;
    let mut l = 0u32;
    while (p as u128).pow(l + 1) <= big as u128 {
        l += 1;
    }
    let fp = Field::prime(f.p()).expect("p is prime");
    let mut current: Vec<IntMatrix> = fp_basis.clone();
    for i in 0..=l {
        if current.is_empty() {
            break;
        }
        let pi = p.pow(i);
        let modulus = pi * p;
        // gram[j][t] = g_i(current_j * basis_t)
        let mut gram = Matrix::zeros(current.len(), fp_basis.len());
        for (j, a) in current.iter().enumerate() {
            for (t, b) in fp_basis.iter().enumerate() {
                let prod = a.mul_mod(b, p);
                let tr = prod.pow_mod(pi, modulus).trace(modulus);
                debug_assert_eq!(tr % pi, 0, "trace functional is divisible by p^i on I_(i-1)");
                gram[(j, t)] = Fe(((tr / pi) % p) as u32);
            }
        }
        // Coefficient vectors c with c^T gram = 0.
        let ker = kernel(&fp, &gram.transpose());
        current = ker
            .columns()
            .iter()
            .map(|c| combine(p, &c.iter().map(|x| x.index()).collect::<Vec<_>>(), &current))
            .collect();
    }
    let vecs: Vec<Vec<Fe>> = current
        .iter()
        .map(|a| from_prime_field(f, a, n).flatten())
        .collect();
    span_basis(f, n * n, &vecs)
        .into_iter()
        .map(|v| Matrix::new(n, n, v))
        .collect()
}

/// A finite-dimensional unital algebra by left-multiplication matrices:
/// `mult[i]` is the matrix of `x ↦ b_i x`.
#[derive(Clone, Debug)]
pub struct Algebra {
    pub dim: usize,
    pub one: Vec<Fe>,
    pub mult: Vec<Matrix>,
}

impl Algebra {
    /// The group algebra `kG` with basis the group elements.
    pub fn group_algebra(group: &crate::groupscheme::ConstantGroup) -> Algebra {
        let n = group.order();
        let mult = (0..n)
            .map(|g| {
                let mut m = Matrix::zeros(n, n);
                for h in 0..n {
                    m[(group.mul(g, h), h)] = Fe(1);
                }
                m
            })
            .collect();
        let mut one = vec![Fe::ZERO; n];
        one[group.identity()] = Fe(1);
        Algebra { dim: n, one, mult }
    }

    pub fn left_matrix(&self, f: &Field, x: &[Fe]) -> Matrix {
        let mut acc = Matrix::zeros(self.dim, self.dim);
        for (c, m) in x.iter().zip(&self.mult) {
            if !c.is_zero() {
                acc = acc.add(f, &m.scale(f, *c));
            }
        }
        acc
    }

    pub fn product(&self, f: &Field, x: &[Fe], y: &[Fe]) -> Vec<Fe> {
        self.left_matrix(f, x).mul_vec(f, y)
    }

    /// Quotient by a two-sided ideal given by a basis of coefficient vectors.
    pub fn quotient(&self, f: &Field, ideal: &[Vec<Fe>]) -> Algebra {
        let n = self.dim;
        let mut cols = span_basis(f, n, ideal);
        let u = cols.len();
        for i in 0..n {
            let mut e = vec![Fe::ZERO; n];
            e[i] = Fe(1);
            cols.push(e);
        }
        let keep = crate::gf::independent_subset(f, &cols);
        let full = Matrix::from_columns(n, &keep.iter().map(|&i| cols[i].clone()).collect::<Vec<_>>());
        let inv = full.inverse(f).expect("completed basis");
        let rows: Vec<usize> = (u..n).collect();
        let proj = inv.select_rows(&rows);
        let comp = full.select_columns(&rows);
        let mult = comp
            .columns()
            .iter()
            .map(|b| proj.mul(f, &self.left_matrix(f, b).mul(f, &comp)))
            .collect();
        let one = proj.mul_vec(f, &self.one);
        Algebra { dim: n - u, one, mult }
    }
}

/// Jacobson radical of an abstract algebra, as coefficient vectors.
pub fn jacobson_radical(f: &Field, alg: &Algebra) -> Vec<Vec<Fe>> {
    if alg.dim == 0 {
        return Vec::new();
    }
    radical_of_matrix_algebra(f, &alg.mult)
        .iter()
        .map(|l| l.mul_vec(f, &alg.one))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldSpec;
    use crate::groupscheme::enumerate_elements;

    fn group(p: u32, gens: &[Vec<Vec<i64>>], d: usize) -> (Field, crate::groupscheme::ConstantGroup) {
        let f = Field::prime(p).unwrap();
        let g: Vec<Matrix> = gens.iter().map(|x| Matrix::from_ints(&f, x)).collect();
        let grp = enumerate_elements(&f, &g, d, 200).unwrap();
        (f, grp)
    }

    #[test]
    fn semisimple_group_algebra_has_zero_radical() {
        let (f, g) = group(2, &[vec![vec![0, 1], vec![1, 1]]], 2);
        assert!(jacobson_radical(&f, &Algebra::group_algebra(&g)).is_empty());
        let (f, g) = group(2, &[], 2);
        assert!(jacobson_radical(&f, &Algebra::group_algebra(&g)).is_empty());
    }

    #[test]
    fn z2_char2_radical_is_augmentation() {
        let (f, g) = group(2, &[vec![vec![1, 1], vec![0, 1]]], 2);
        let rad = jacobson_radical(&f, &Algebra::group_algebra(&g));
        assert_eq!(rad, vec![vec![Fe(1), Fe(1)]]);
    }

    #[test]
    fn upper_triangular_over_f4() {
        let f = Field::new(&FieldSpec {
            p: 2,
            m: 2,
            modulus: vec![1, 1, 1],
        })
        .unwrap();
        // Algebra of upper triangular 2x2 matrices: radical = strictly upper.
        let e11 = Matrix::new(2, 2, vec![Fe(1), Fe(0), Fe(0), Fe(0)]);
        let e22 = Matrix::new(2, 2, vec![Fe(0), Fe(0), Fe(0), Fe(1)]);
        let e12 = Matrix::new(2, 2, vec![Fe(0), Fe(1), Fe(0), Fe(0)]);
        let rad = radical_of_matrix_algebra(&f, &[e11, e22, e12.clone()]);
        assert_eq!(rad, vec![e12]);
    }

    #[test]
    fn s3_char3_radical() {
        // S_3 as permutation matrices over F_3: rad(kS_3) has dimension 4 in
        // characteristic 3 (kS_3 has two simples of dimension 1, both with
        // projective covers of dimension 3).
        let (f, g) = group(
            3,
            &[
                vec![vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]],
                vec![vec![0, 0, 1], vec![1, 0, 0], vec![0, 1, 0]],
            ],
            3,
        );
        assert_eq!(g.order(), 6);
        let alg = Algebra::group_algebra(&g);
        let rad = jacobson_radical(&f, &alg);
        assert_eq!(rad.len(), 4);
        let q = alg.quotient(&f, &rad);
        assert!(jacobson_radical(&f, &q).is_empty());
    }
}
