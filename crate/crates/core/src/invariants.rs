//! Degree-by-degree invariant rings `A = S^G`.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::gf::{independent_subset, kernel, span_basis, Fe, Field, Matrix};
use crate::groupscheme::GroupScheme;
use crate::modrep::{hom_space, KGModule, RepresentationData};
use crate::polyring::{degree_module, piece_dim, MonomialBasis, Polynomial, Substitution, MAX_DEGREE};

pub struct InvariantRing<'a> {
    group: &'a GroupScheme,
    bases: BTreeMap<usize, Vec<Polynomial>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantGenerator {
    pub degree: usize,
    pub poly: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantRingData {
    pub generators: Vec<InvariantGenerator>,
    /// `dim A_n` for `n = 0..=D`.
    pub hilbert: Vec<usize>,
    pub certified_up_to: usize,
    pub note: String,
    #[serde(skip)]
    pub generator_polys: Vec<Polynomial>,
}

impl InvariantRingData {
    pub fn to_json(&self) -> Value {
        json!({
            "generators": self.generators,
            "hilbert": self.hilbert,
            "certified_up_to": self.certified_up_to,
        })
    }
}

impl<'a> InvariantRing<'a> {
    pub fn new(group: &'a GroupScheme) -> Self {
        InvariantRing {
            group,
            bases: BTreeMap::new(),
        }
    }

    fn field(&self) -> &Field {
        self.group.field()
    }

    /// Basis of `(S_n)^G`: kernel of the stacked `ρ_n(g) − I` on the span of
    /// weight-zero monomials.
    pub fn invariant_basis(&mut self, n: usize) -> Result<Vec<Polynomial>> {
        if n > MAX_DEGREE {
            return Err(Error::ResourceCap(format!("degree {n} above cap {MAX_DEGREE}")));
        }
        if let Some(b) = self.bases.get(&n) {
            return Ok(b.clone());
        }
        let f = self.field().clone();
        let piece = degree_module(self.group, n);
        let zero = vec![0u64; self.group.diag().orders.len()];
        let cols: Vec<usize> = (0..piece.dim()).filter(|&i| piece.weights[i] == zero).collect();
        let basis = if cols.is_empty() {
            Vec::new()
        } else {
            let mut blocks = Vec::new();
            for a in &piece.action {
                let mut m = a.select_columns(&cols);
                for (c, &i) in cols.iter().enumerate() {
                    m[(i, c)] = f.sub(m[(i, c)], f.one());
                }
                blocks.push(m);
            }
            let ker = if blocks.is_empty() {
                Matrix::identity(cols.len())
            } else {
                let mut stack = blocks[0].clone();
                for b in &blocks[1..] {
                    stack = stack.vstack(b);
                }
                kernel(&f, &stack)
            };
            ker.columns()
                .iter()
                .map(|v| {
                    let mut full = vec![Fe::ZERO; piece.dim()];
                    for (c, &i) in cols.iter().enumerate() {
                        full[i] = v[c];
                    }
                    Polynomial::from_coords(&piece.basis, self.group.dim(), &full)
                })
                .collect()
        };
        self.bases.insert(n, basis.clone());
        Ok(basis)
    }

    pub fn is_invariant(&self, p: &Polynomial) -> bool {
        let f = self.field();
        let zero = vec![0u64; self.group.diag().orders.len()];
        p.terms().keys().all(|e| self.group.diag().monomial_weight(e) == zero)
            && self
                .group
                .constant()
                .generators()
                .iter()
                .all(|g| Substitution::new(f, g).apply(p) == *p)
    }

    /// Average over the constant part, then drop terms of nonzero weight.
    pub fn reynolds(&self, p: &Polynomial) -> Result<Polynomial> {
        if !self.group.is_linearly_reductive() {
            return Err(Error::NotLinearlyReductive(format!(
                "p = {} divides the order {} of the constant part",
                self.field().p(),
                self.group.constant().order()
            )));
        }
        let f = self.field();
        let mut acc = Polynomial::zero(p.nvars());
        for g in self.group.constant().elements() {
            acc = acc.add(f, &Substitution::new(f, g).apply(p));
        }
        let inv = f
            .inv(f.from_int(self.group.constant().order() as i64))
            .expect("order is a unit");
        let zero = vec![0u64; self.group.diag().orders.len()];
        let diag = self.group.diag();
        Ok(Polynomial::from_terms(
            f,
            p.nvars(),
            acc.scale(f, inv)
                .terms()
                .iter()
                .filter(|(e, _)| diag.monomial_weight(e) == zero)
                .map(|(e, &c)| (e.clone(), c)),
        ))
    }

    /// Greedy generators: in each degree, complete the span of products of
    /// earlier generators to all of `(S_n)^G`.
    pub fn generators_up_to(&mut self, bound: usize) -> Result<InvariantRingData> {
        let f = self.field().clone();
        let d = self.group.dim();
        let mut gens: Vec<(usize, Polynomial)> = Vec::new();
        // Spanning set of the subalgebra generated so far, per degree.
        let mut sub: Vec<Vec<Polynomial>> = vec![vec![Polynomial::constant(d, f.one())]];
        let mut hilbert = vec![1];
        for n in 1..=bound {
            let basis = MonomialBasis::new(d, n);
            let mut products = Vec::new();
            for (k, g) in &gens {
                for r in &sub[n - k] {
                    products.push(g.mul(&f, r));
                }
            }
            let prod_vecs: Vec<Vec<Fe>> = products.iter().map(|p| p.coords_in(&basis)).collect();
            let spanned = span_basis(&f, basis.len(), &prod_vecs);
            let inv = self.invariant_basis(n)?;
            hilbert.push(inv.len());
            let mut all = spanned.clone();
            all.extend(inv.iter().map(|p| p.coords_in(&basis)));
            let keep = independent_subset(&f, &all);
            let mut level: Vec<Polynomial> = spanned
                .iter()
                .map(|v| Polynomial::from_coords(&basis, d, v))
                .collect();
            for &i in keep.iter().filter(|&&i| i >= spanned.len()) {
                let p = inv[i - spanned.len()].clone();
                gens.push((n, p.clone()));
                level.push(p);
            }
            sub.push(level);
        }
        Ok(InvariantRingData {
            generators: gens
                .iter()
                .map(|(n, p)| InvariantGenerator {
                    degree: *n,
                    poly: p.to_json(&f),
                })
                .collect(),
            hilbert,
            certified_up_to: bound,
            note: "generation beyond the degree bound is not certified".into(),
            generator_polys: gens.into_iter().map(|(_, p)| p).collect(),
        })
    }
}

/// `x^a` is invariant under the infinitesimal part `∏ μ_{p^{v_p(n_j)}}`.
pub fn identity_component_invariant(group: &GroupScheme, e: &[u32]) -> bool {
    let p = group.field().p() as u64;
    let diag = group.diag();
    let w = diag.monomial_weight(e);
    diag.orders.iter().zip(&w).all(|(&n, &x)| {
        let mut pp = 1;
        while n % (pp * p) == 0 {
            pp *= p;
        }
        x % pp == 0
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HilbertRow {
    pub degree: usize,
    pub dim_s: usize,
    /// `dim ((P_i ⊗ S)^G)_n` per label.
    pub invariant_dims: BTreeMap<String, usize>,
    pub weighted_sum: usize,
    /// Invariants of `P_i ⊗ S_n` agree with `Hom_G(P_i^*, S_n)`.
    pub dual_route_agrees: bool,
    pub agree: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct HilbertReport {
    pub rows: Vec<HilbertRow>,
    pub agree: bool,
}

/// Checks `dim S_n = Σ_i (dim V_i / dim End V_i)·dim((P_i ⊗ S)^G)_n`, which
/// follows from `S ≅ (kG ⊗ S)^G` and `kG ≅ ⊕ P_i^{dim V_i / dim End V_i}`.
pub fn hilbert_function_compare(group: &GroupScheme, reps: &RepresentationData, max_degree: usize) -> Result<HilbertReport> {
    if !group.is_constant_only() {
        return Err(Error::Unsupported(
            "label Hilbert functions are computed for constant groups".into(),
        ));
    }
    let f = group.field();
    let ngens = group.constant().generators().len();
    let triv = KGModule::trivial(ngens);
    let mut rows = Vec::new();
    for n in 0..=max_degree {
        let piece = degree_module(group, n).as_module();
        let mut dims = BTreeMap::new();
        let mut sum = 0usize;
        let mut dual_ok = true;
        for datum in &reps.data {
            let p = &datum.projective_cover;
            let tensor = p.tensor(f, &piece);
            let k = hom_space(f, &triv, &tensor).len();
            let k2 = hom_space(f, &p.dual(f), &piece).len();
            dual_ok &= k == k2;
            sum += k * datum.simple.dim / datum.end_dim;
            dims.insert(datum.label.clone(), k);
        }
        let dim_s = piece_dim(group.dim(), n);
        rows.push(HilbertRow {
            degree: n,
            dim_s,
            invariant_dims: dims,
            weighted_sum: sum,
            dual_route_agrees: dual_ok,
            agree: dual_ok && sum == dim_s,
        });
    }
    let agree = rows.iter().all(|r| r.agree);
    Ok(HilbertReport { rows, agree })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupscheme::{DiagPart, DEFAULT_ELEMENT_CAP};
    use crate::modrep::simples_and_projective_covers;

    fn sign2() -> GroupScheme {
        let f = Field::prime(3).unwrap();
        let g = Matrix::from_ints(&f, &[vec![-1, 0], vec![0, -1]]);
        GroupScheme::new(f, 2, vec![g], DiagPart::default(), DEFAULT_ELEMENT_CAP).unwrap()
    }

    fn mu2(p: u32) -> GroupScheme {
        let f = Field::prime(p).unwrap();
        let diag = DiagPart::new(vec![2], vec![vec![1], vec![1]], 2).unwrap();
        GroupScheme::new(f, 2, vec![], diag, DEFAULT_ELEMENT_CAP).unwrap()
    }

    #[test]
    fn veronese_bases() {
        let g = sign2();
        let mut r = InvariantRing::new(&g);
        assert_eq!(r.invariant_basis(1).unwrap().len(), 0);
        let b = r.invariant_basis(2).unwrap();
        assert_eq!(b.len(), 3);
        assert!(b.iter().all(|p| r.is_invariant(p)));
    }

    #[test]
    fn veronese_generators() {
        let g = sign2();
        let data = InvariantRing::new(&g).generators_up_to(4).unwrap();
        assert_eq!(data.generators.iter().map(|x| x.degree).collect::<Vec<_>>(), vec![2, 2, 2]);
        assert_eq!(data.hilbert, vec![1, 0, 3, 0, 5]);
        let mu = mu2(2);
        let data = InvariantRing::new(&mu).generators_up_to(3).unwrap();
        assert_eq!(data.generators.iter().map(|x| x.degree).collect::<Vec<_>>(), vec![2, 2, 2]);
    }

    #[test]
    fn trivial_group_generators() {
        let f = Field::prime(2).unwrap();
        let g = GroupScheme::new(f, 3, vec![], DiagPart::default(), 10).unwrap();
        let data = InvariantRing::new(&g).generators_up_to(2).unwrap();
        assert_eq!(data.generators.len(), 3);
        assert!(data.generators.iter().all(|x| x.degree == 1));
        assert_eq!(data.hilbert, vec![1, 3, 6]);
    }

    #[test]
    fn reynolds_examples() {
        let g = sign2();
        let r = InvariantRing::new(&g);
        let f = g.field();
        let x = Polynomial::variable(2, 0);
        assert!(r.reynolds(&x).unwrap().is_zero());
        let x2 = x.mul(f, &x);
        assert_eq!(r.reynolds(&x2).unwrap(), x2);
        let mu = mu2(2);
        let r = InvariantRing::new(&mu);
        let f = mu.field();
        let y = Polynomial::variable(2, 1);
        let xy = x.mul(f, &y);
        let p = x2.add(f, &xy).add(f, &x);
        assert_eq!(r.reynolds(&p).unwrap(), x2.add(f, &xy));
    }

    #[test]
    fn modular_reynolds_refused() {
        let f = Field::prime(2).unwrap();
        let g = Matrix::from_ints(&f, &[vec![1, 1], vec![0, 1]]);
        let gs = GroupScheme::new(f, 2, vec![g], DiagPart::default(), 10).unwrap();
        let r = InvariantRing::new(&gs);
        assert!(matches!(
            r.reynolds(&Polynomial::variable(2, 0)),
            Err(Error::NotLinearlyReductive(_))
        ));
    }

    #[test]
    fn hilbert_identity() {
        let g = sign2();
        let reps = simples_and_projective_covers(g.field(), g.constant()).unwrap();
        let rep = hilbert_function_compare(&g, &reps, 4).unwrap();
        assert!(rep.agree);
        let f = Field::prime(2).unwrap();
        let s = Matrix::from_ints(&f, &[vec![0, 1], vec![1, 1]]);
        let z3 = GroupScheme::new(f, 2, vec![s], DiagPart::default(), 10).unwrap();
        let reps = simples_and_projective_covers(z3.field(), z3.constant()).unwrap();
        assert!(hilbert_function_compare(&z3, &reps, 6).unwrap().agree);
    }

    #[test]
    fn infinitesimal_subring() {
        let f = Field::prime(2).unwrap();
        let diag = DiagPart::new(vec![4], vec![vec![1], vec![1]], 2).unwrap();
        let g = GroupScheme::new(f, 2, vec![], diag, 10).unwrap();
        assert!(identity_component_invariant(&g, &[4, 0]));
        assert!(identity_component_invariant(&g, &[0, 4]));
        assert!(!identity_component_invariant(&g, &[2, 0]));
    }
}
