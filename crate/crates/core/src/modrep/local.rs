use crate::error::{Error, Result};
use crate::gf::{independent_subset, rank, CoordSolver, Fe, Field, Matrix};

use super::module::{hom_space, KGModule};
use super::radical::radical_of_matrix_algebra;

/// `End_G(P)` for an indecomposable `P`, together with the residue map onto
/// the field `End_G(P)/rad`.
#[derive(Clone, Debug)]
pub struct LocalEnd {
    dim: usize,
    end_basis: Vec<Matrix>,
    rad_dim: usize,
    residue_dim: usize,
    solver: CoordSolver,
}

impl LocalEnd {
    pub fn new(f: &Field, p: &KGModule) -> Result<LocalEnd> {
        let end = hom_space(f, p, p);
        LocalEnd::from_basis(f, p.dim, end)
    }

    /// Builds the residue data from a basis of an endomorphism algebra.
    pub fn from_basis(f: &Field, dim: usize, end: Vec<Matrix>) -> Result<LocalEnd> {
        if dim == 0 {
            return Err(Error::NotIndecomposable("zero module".into()));
        }
        let rad = radical_of_matrix_algebra(f, &end);
        let n2 = dim * dim;
        let mut vecs: Vec<Vec<Fe>> = rad.iter().map(Matrix::flatten).collect();
        vecs.extend(end.iter().map(Matrix::flatten));
        let keep = independent_subset(f, &vecs);
        let rad_dim = rad.len();
        debug_assert!(keep[..rad_dim].iter().enumerate().all(|(i, &k)| i == k));
        let cols: Vec<Vec<Fe>> = keep.iter().map(|&i| vecs[i].clone()).collect();
        let residue_dim = cols.len() - rad_dim;
        let complement: Vec<Matrix> = keep[rad_dim..]
            .iter()
            .map(|&i| Matrix::new(dim, dim, vecs[i].clone()))
            .collect();
        let solver = CoordSolver::new(f, Matrix::from_columns(n2, &cols))
            .ok_or_else(|| Error::Verification("endomorphism basis is dependent".into()))?;
        let local = LocalEnd {
            dim,
            end_basis: end,
            rad_dim,
            residue_dim,
            solver,
        };
        local.check_field(f, &complement)?;
        Ok(local)
    }

    /// `End/rad` must be commutative with a one-dimensional space of
    /// `q`-Frobenius fixed points, i.e. a field.
    fn check_field(&self, f: &Field, complement: &[Matrix]) -> Result<()> {
        let k = self.residue_dim;
        for a in complement {
            for b in complement {
                let ab = self.residue(f, &a.mul(f, b));
                let ba = self.residue(f, &b.mul(f, a));
                if ab != ba {
                    return Err(Error::NotIndecomposable("End/rad is not commutative".into()));
                }
            }
        }
        let mut frob_minus_id = Vec::with_capacity(k);
        for (i, a) in complement.iter().enumerate() {
            let mut r = self.residue(f, &a.pow(f, f.q() as u64));
            r[i] = f.sub(r[i], f.one());
            frob_minus_id.push(r);
        }
        let fixed = k - if k == 0 { 0 } else { rank(f, &Matrix::from_rows(&frob_minus_id)) };
        if fixed != 1 {
            return Err(Error::NotIndecomposable(format!(
                "End/rad splits into {fixed} factors"
            )));
        }
        Ok(())
    }

    pub fn module_dim(&self) -> usize {
        self.dim
    }

    pub fn end_dim(&self) -> usize {
        self.end_basis.len()
    }

    pub fn end_basis(&self) -> &[Matrix] {
        &self.end_basis
    }

    pub fn rad_dim(&self) -> usize {
        self.rad_dim
    }

    /// `dim_{F_q} End/rad`.
    pub fn residue_dim(&self) -> usize {
        self.residue_dim
    }

    /// Image of an endomorphism in `End/rad`, as `F_q`-coordinates.
    pub fn residue(&self, f: &Field, x: &Matrix) -> Vec<Fe> {
        let c = self.solver.coords_unchecked(f, &x.flatten());
        c[self.rad_dim..].to_vec()
    }

    pub fn is_unit(&self, f: &Field, x: &Matrix) -> bool {
        self.residue(f, x).iter().any(|c| !c.is_zero())
    }
}

/// Rank over `End(P)/rad` of the composition pairing
/// `Hom(P, M) × Hom(M, P) → End(P)/rad`, given the two hom bases.
pub fn pairing_rank(f: &Field, local: &LocalEnd, into: &[Matrix], out_of: &[Matrix]) -> usize {
    if into.is_empty() || out_of.is_empty() {
        return 0;
    }
    let rows: Vec<Vec<Fe>> = into
        .iter()
        .map(|phi| {
            out_of
                .iter()
                .flat_map(|psi| local.residue(f, &psi.mul(f, phi)))
                .collect()
        })
        .collect();
    let r = rank(f, &Matrix::from_rows(&rows));
    debug_assert_eq!(r % local.residue_dim(), 0);
    r / local.residue_dim()
}

/// Multiplicity of the indecomposable `p` as a direct summand of `m`.
pub fn summand_multiplicity(f: &Field, p: &KGModule, m: &KGModule) -> Result<usize> {
    let local = LocalEnd::new(f, p)?;
    Ok(summand_multiplicity_with(f, &local, p, m))
}

pub fn summand_multiplicity_with(f: &Field, local: &LocalEnd, p: &KGModule, m: &KGModule) -> usize {
    if m.dim == 0 {
        return 0;
    }
    let into = hom_space(f, p, m);
    let out_of = hom_space(f, m, p);
    pairing_rank(f, local, &into, &out_of)
}
