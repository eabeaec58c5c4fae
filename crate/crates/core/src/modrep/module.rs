use crate::error::{Error, Result};
use crate::gf::{kernel, rank, span_basis, Fe, Field, Matrix};
use crate::groupscheme::ConstantGroup;

/// A finite-dimensional representation of the constant group, given by one
/// matrix per group generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KGModule {
    pub dim: usize,
    pub action: Vec<Matrix>,
}

impl KGModule {
    pub fn new(dim: usize, action: Vec<Matrix>) -> Self {
        for a in &action {
            assert_eq!((a.rows(), a.cols()), (dim, dim), "action matrix has wrong size");
        }
        KGModule { dim, action }
    }

    pub fn trivial(ngens: usize) -> Self {
        KGModule::new(1, vec![Matrix::identity(1); ngens])
    }

    pub fn zero(ngens: usize) -> Self {
        KGModule::new(0, vec![Matrix::zeros(0, 0); ngens])
    }

    /// `kG` with basis the group elements and `s·e_g = e_{sg}`.
    pub fn regular(group: &ConstantGroup) -> Self {
        let n = group.order();
        let action = group
            .generators()
            .iter()
            .map(|g| {
                let s = group.index_of(g).expect("generator is an element");
                let mut m = Matrix::zeros(n, n);
                for h in 0..n {
                    m[(group.mul(s, h), h)] = Fe(1);
                }
                m
            })
            .collect();
        KGModule::new(n, action)
    }

    pub fn ngens(&self) -> usize {
        self.action.len()
    }

    pub fn direct_sum(&self, other: &KGModule) -> KGModule {
        let action = self
            .action
            .iter()
            .zip(&other.action)
            .map(|(a, b)| a.direct_sum(b))
            .collect();
        KGModule::new(self.dim + other.dim, action)
    }

    pub fn power(&self, k: usize) -> KGModule {
        let mut m = KGModule::zero(self.ngens());
        for _ in 0..k {
            m = m.direct_sum(self);
        }
        m
    }

    pub fn tensor(&self, f: &Field, other: &KGModule) -> KGModule {
        let action = self
            .action
            .iter()
            .zip(&other.action)
            .map(|(a, b)| a.kron(f, b))
            .collect();
        KGModule::new(self.dim * other.dim, action)
    }

    /// Contragredient `g ↦ ρ(g)^{-T}`.
    pub fn dual(&self, f: &Field) -> KGModule {
        let action = self
            .action
            .iter()
            .map(|a| a.inverse(f).expect("action is invertible").transpose())
            .collect();
        KGModule::new(self.dim, action)
    }

    /// Twist every matrix entry by `c ↦ c^{1/p^e}`.
    pub fn frobenius_twist(&self, f: &Field, e: u32) -> KGModule {
        let action = self.action.iter().map(|a| a.map(|c| f.inv_frobenius(c, e))).collect();
        KGModule::new(self.dim, action)
    }

    /// Images of all group elements, in element order.
    pub fn element_images(&self, f: &Field, group: &ConstantGroup) -> Vec<Matrix> {
        if self.dim == 0 {
            return vec![Matrix::zeros(0, 0); group.order()];
        }
        group.evaluate(f, &self.action)
    }

    /// Checks that the generator matrices define a representation of the
    /// enumerated group: `ρ(s)ρ(h) = ρ(sh)` for every generator `s` and element `h`.
    pub fn check_relations(&self, f: &Field, group: &ConstantGroup) -> Result<()> {
        if self.ngens() != group.generators().len() {
            return Err(Error::Verification("module has wrong number of generators".into()));
        }
        for a in &self.action {
            if a.inverse(f).is_none() {
                return Err(Error::Verification("action matrix is not invertible".into()));
            }
        }
        let imgs = self.element_images(f, group);
        for (s, g) in group.generators().iter().enumerate() {
            let si = group.index_of(g).unwrap();
            for h in 0..group.order() {
                if self.action[s].mul(f, &imgs[h]) != imgs[group.mul(si, h)] {
                    return Err(Error::Verification(format!(
                        "relation fails for generator {s} and element {h}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The submodule with the given basis (columns). Panics if not invariant.
    pub fn restrict(&self, f: &Field, basis: &Matrix) -> KGModule {
        let k = basis.cols();
        if k == 0 {
            return KGModule::zero(self.ngens());
        }
        let solver = crate::gf::CoordSolver::new(f, basis.clone()).expect("basis is independent");
        let action = self
            .action
            .iter()
            .map(|a| {
                let img = a.mul(f, basis);
                let cols: Vec<Vec<Fe>> = img
                    .columns()
                    .iter()
                    .map(|c| solver.coords(f, c).expect("subspace is invariant"))
                    .collect();
                Matrix::from_columns(k, &cols)
            })
            .collect();
        KGModule::new(k, action)
    }

    /// Quotient by the submodule spanned by the columns of `sub`. Returns the
    /// quotient module and the projection matrix `M -> M/U`.
    pub fn quotient(&self, f: &Field, sub: &Matrix) -> (KGModule, Matrix) {
        let n = self.dim;
        let sub_rows: Vec<Vec<Fe>> = sub.columns();
        let sub_basis = span_basis(f, n, &sub_rows);
        let u = sub_basis.len();
        // Complement: standard basis vectors independent of the submodule.
        let mut cols: Vec<Vec<Fe>> = sub_basis.clone();
        for i in 0..n {
            let mut e = vec![Fe::ZERO; n];
            e[i] = Fe(1);
            cols.push(e);
        }
        let keep = crate::gf::independent_subset(f, &cols);
        let full = Matrix::from_columns(n, &keep.iter().map(|&i| cols[i].clone()).collect::<Vec<_>>());
        let inv = full.inverse(f).expect("completed basis is invertible");
        let qdim = n - u;
        let rows: Vec<usize> = (u..n).collect();
        let proj = inv.select_rows(&rows);
        let comp = full.select_columns(&rows);
        let action = self
            .action
            .iter()
            .map(|a| proj.mul(f, &a.mul(f, &comp)))
            .collect();
        (KGModule::new(qdim, action), proj)
    }

    /// Fixed-space dimension of every group element: an isomorphism invariant.
    pub fn fixed_point_profile(&self, f: &Field, group: &ConstantGroup) -> Vec<usize> {
        let id = Matrix::identity(self.dim);
        self.element_images(f, group)
            .iter()
            .map(|m| self.dim - rank(f, &m.sub(f, &id)))
            .collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.dim == 1 && self.action.iter().all(|a| a[(0, 0)] == Fe(1))
    }
}

/// Basis of `Hom_G(M, N)`: matrices `X` (`dim N × dim M`) with
/// `X ρ_M(g) = ρ_N(g) X` for every generator `g`.
pub fn hom_space(f: &Field, m: &KGModule, n: &KGModule) -> Vec<Matrix> {
    let (dm, dn) = (m.dim, n.dim);
    let unknowns = dm * dn;
    if unknowns == 0 {
        return Vec::new();
    }
    let ngens = m.ngens();
    let mut sys = Matrix::zeros(ngens * unknowns, unknowns);
    for g in 0..ngens {
        let (am, an) = (&m.action[g], &n.action[g]);
        for r in 0..dn {
            for c in 0..dm {
                let row = g * unknowns + r * dm + c;
                // Σ_k X[r,k] am[k,c]
                for k in 0..dm {
                    let v = am[(k, c)];
                    if !v.is_zero() {
                        let col = r * dm + k;
                        sys[(row, col)] = f.add(sys[(row, col)], v);
                    }
                }
                // − Σ_k an[r,k] X[k,c]
                for k in 0..dn {
                    let v = an[(r, k)];
                    if !v.is_zero() {
                        let col = k * dm + c;
                        sys[(row, col)] = f.sub(sys[(row, col)], v);
                    }
                }
            }
        }
    }
    kernel(f, &sys)
        .columns()
        .into_iter()
        .map(|v| Matrix::new(dn, dm, v))
        .collect()
}

/// Sum of images `Σ_i ρ(j_i) M` for algebra elements given as coefficient
/// vectors over group elements.
pub fn algebra_image(f: &Field, images: &[Matrix], elements: &[Vec<Fe>], dim: usize) -> Matrix {
    let mut vecs = Vec::new();
    for coeffs in elements {
        let mut acc = Matrix::zeros(dim, dim);
        for (c, img) in coeffs.iter().zip(images) {
            if !c.is_zero() {
                acc = acc.add(f, &img.scale(f, *c));
            }
        }
        vecs.extend(acc.columns());
    }
    let basis = span_basis(f, dim, &vecs);
    Matrix::from_columns(dim, &basis)
}
