//! Polynomials over `F_q`, the linear group action on `S = Sym V`, and the
//! graded pieces `S_n` as representations.

use std::collections::{BTreeMap, HashMap};

use serde_json::{Map, Value};

use crate::gf::{Fe, Field, Matrix};
use crate::groupscheme::{DiagPart, GroupScheme};
use crate::modrep::KGModule;

pub const MAX_DEGREE: usize = 64;

pub type Exponent = Vec<u32>;

/// Exponent vectors of total degree `n` in `d` variables, lexicographically
/// descending (`x_1^n` first).
pub fn monomials(d: usize, n: usize) -> Vec<Exponent> {
    fn rec(d: usize, n: u32, prefix: &mut Vec<u32>, out: &mut Vec<Exponent>) {
        if prefix.len() + 1 == d {
            prefix.push(n);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for a in (0..=n).rev() {
            prefix.push(a);
            rec(d, n - a, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if d == 0 {
        if n == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(d, n as u32, &mut Vec::with_capacity(d), &mut out);
    out
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// `dim S_n = C(n+d-1, d-1)`.
pub fn piece_dim(d: usize, n: usize) -> usize {
    if d == 0 {
        return usize::from(n == 0);
    }
    binomial((n + d - 1) as u64, (d - 1) as u64) as usize
}

/// Monomial basis of `S_n` with a reverse index.
#[derive(Clone, Debug)]
pub struct MonomialBasis {
    pub degree: usize,
    pub monomials: Vec<Exponent>,
    index: HashMap<Exponent, usize>,
}

impl MonomialBasis {
    pub fn new(d: usize, n: usize) -> Self {
        let monomials = monomials(d, n);
        let index = monomials.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        MonomialBasis {
            degree: n,
            monomials,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn index_of(&self, e: &[u32]) -> Option<usize> {
        self.index.get(e).copied()
    }
}

/// Sparse polynomial: exponent vector ↦ nonzero coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Exponent, Fe>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Fe) -> Self {
        Polynomial::monomial(vec![0; nvars], c)
    }

    pub fn monomial(exps: Exponent, c: Fe) -> Self {
        let nvars = exps.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        Polynomial { nvars, terms }
    }

    pub fn variable(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Polynomial::monomial(e, Fe(1))
    }

    pub fn from_terms(f: &Field, nvars: usize, terms: impl IntoIterator<Item = (Exponent, Fe)>) -> Self {
        let mut p = Polynomial::zero(nvars);
        for (e, c) in terms {
            p.add_term(f, e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, Fe> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, e: &[u32]) -> Fe {
        self.terms.get(e).copied().unwrap_or(Fe::ZERO)
    }

    pub fn add_term(&mut self, f: &Field, e: Exponent, c: Fe) {
        debug_assert_eq!(e.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = f.add(*o.get(), c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, f: &Field, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            out.add_term(f, e.clone(), c);
        }
        out
    }

    pub fn sub(&self, f: &Field, other: &Polynomial) -> Polynomial {
        self.add(f, &other.scale(f, f.neg(Fe(1))))
    }

    pub fn scale(&self, f: &Field, c: Fe) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, &x)| (e.clone(), f.mul(x, c))).collect(),
        }
    }

    pub fn mul(&self, f: &Field, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (a, &x) in &self.terms {
            for (b, &y) in &other.terms {
                let e: Exponent = a.iter().zip(b).map(|(i, j)| i + j).collect();
                out.add_term(f, e, f.mul(x, y));
            }
        }
        out
    }

    /// Total degree if homogeneous (zero polynomial gives `None`).
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>() as usize);
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    /// Coordinates in the monomial basis of `S_n` (terms of other degrees are ignored).
    pub fn coords_in(&self, basis: &MonomialBasis) -> Vec<Fe> {
        let mut v = vec![Fe::ZERO; basis.len()];
        for (e, &c) in &self.terms {
            if let Some(i) = basis.index_of(e) {
                v[i] = c;
            }
        }
        v
    }

    pub fn from_coords(basis: &MonomialBasis, nvars: usize, coords: &[Fe]) -> Polynomial {
        let mut p = Polynomial::zero(nvars);
        for (e, &c) in basis.monomials.iter().zip(coords) {
            if !c.is_zero() {
                p.terms.insert(e.clone(), c);
            }
        }
        p
    }

    /// `{"[a1,...,ad]": coefficient-coords}`.
    pub fn to_json(&self, f: &Field) -> Value {
        let mut map = Map::new();
        for (e, &c) in &self.terms {
            let key = format!(
                "[{}]",
                e.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
            );
            map.insert(key, Value::from(f.coords(c)));
        }
        Value::Object(map)
    }
}

/// Substitution `x_j ↦ Σ_i g_ij x_i` with cached powers of the images.
pub struct Substitution<'a> {
    field: &'a Field,
    images: Vec<Polynomial>,
    powers: Vec<Vec<Polynomial>>,
}

impl<'a> Substitution<'a> {
    pub fn new(field: &'a Field, g: &Matrix) -> Self {
        let d = g.rows();
        let images: Vec<Polynomial> = (0..d)
            .map(|j| {
                Polynomial::from_terms(
                    field,
                    d,
                    (0..d).map(|i| {
                        let mut e = vec![0; d];
                        e[i] = 1;
                        (e, g[(i, j)])
                    }),
                )
            })
            .collect();
        let powers = images
            .iter()
            .map(|_| vec![Polynomial::constant(d, Fe(1))])
            .collect();
        Substitution {
            field,
            images,
            powers,
        }
    }

    fn power(&mut self, j: usize, k: usize) -> &Polynomial {
        while self.powers[j].len() <= k {
            let next = self.powers[j].last().unwrap().mul(self.field, &self.images[j]);
            self.powers[j].push(next);
        }
        &self.powers[j][k]
    }

    pub fn apply_monomial(&mut self, e: &[u32]) -> Polynomial {
        let d = self.images.len();
        let mut acc = Polynomial::constant(d, Fe(1));
        for (j, &k) in e.iter().enumerate() {
            if k > 0 {
                let pw = self.power(j, k as usize).clone();
                acc = acc.mul(self.field, &pw);
            }
        }
        acc
    }

    pub fn apply(&mut self, p: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero(p.nvars());
        for (e, &c) in p.terms() {
            let img = self.apply_monomial(e);
            out = out.add(self.field, &img.scale(self.field, c));
        }
        out
    }
}

/// `g·f` with `g·x_j = Σ_i g_ij x_i`.
pub fn act_on_polynomial(f: &Field, g: &Matrix, p: &Polynomial) -> Polynomial {
    Substitution::new(f, g).apply(p)
}

/// The representation `S_n` with its monomial weights.
#[derive(Clone, Debug)]
pub struct GradedPiece {
    pub degree: usize,
    pub basis: MonomialBasis,
    /// One matrix per constant generator; column `j` is `g·m_j`.
    pub action: Vec<Matrix>,
    /// `weights[i]` is the weight tuple of monomial `i`.
    pub weights: Vec<Vec<u64>>,
}

impl GradedPiece {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn as_module(&self) -> KGModule {
        KGModule::new(self.dim(), self.action.clone())
    }
}

/// Matrix of `g` on `S_n` in the monomial basis.
pub fn piece_matrix(f: &Field, g: &Matrix, basis: &MonomialBasis) -> Matrix {
    let mut sub = Substitution::new(f, g);
    let n = basis.len();
    let mut m = Matrix::zeros(n, n);
    for (j, e) in basis.monomials.iter().enumerate() {
        let img = sub.apply_monomial(e);
        for (i, c) in img.coords_in(basis).into_iter().enumerate() {
            m[(i, j)] = c;
        }
    }
    m
}

pub fn degree_module(g: &GroupScheme, n: usize) -> GradedPiece {
    let f = g.field();
    let basis = MonomialBasis::new(g.dim(), n);
    let action = g
        .constant()
        .generators()
        .iter()
        .map(|s| piece_matrix(f, s, &basis))
        .collect();
    let weights = basis
        .monomials
        .iter()
        .map(|e| monomial_weight(g.diag(), e))
        .collect();
    GradedPiece {
        degree: n,
        basis,
        action,
        weights,
    }
}

pub fn monomial_weight(d: &DiagPart, e: &[u32]) -> Vec<u64> {
    d.monomial_weight(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupscheme::DEFAULT_ELEMENT_CAP;

    #[test]
    fn monomial_order_and_count() {
        assert_eq!(monomials(2, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(monomials(4, 3).len(), piece_dim(4, 3));
        assert_eq!(piece_dim(4, 3), 20);
        assert_eq!(monomials(3, 0), vec![vec![0, 0, 0]]);
    }

    #[test]
    fn sign_action_cancels_in_even_degree() {
        let f = Field::prime(3).unwrap();
        let g = Matrix::from_ints(&f, &[vec![-1, 0], vec![0, -1]]);
        let p = Polynomial::from_terms(&f, 2, [(vec![2, 0], Fe(1)), (vec![1, 1], Fe(1))]);
        assert_eq!(act_on_polynomial(&f, &g, &p), p);
    }

    #[test]
    fn unipotent_action_char2() {
        let f = Field::prime(2).unwrap();
        // x -> x, y -> x + y
        let g = Matrix::from_ints(&f, &[vec![1, 1], vec![0, 1]]);
        let y2 = Polynomial::monomial(vec![0, 2], Fe(1));
        let expect = Polynomial::from_terms(&f, 2, [(vec![2, 0], Fe(1)), (vec![0, 2], Fe(1))]);
        assert_eq!(act_on_polynomial(&f, &g, &y2), expect);
        let id = Matrix::identity(2);
        assert_eq!(act_on_polynomial(&f, &id, &y2), y2);
    }

    #[test]
    fn degree_pieces() {
        let f = Field::prime(3).unwrap();
        let g = Matrix::from_ints(&f, &[vec![-1, 0], vec![0, -1]]);
        let gs = GroupScheme::new(f.clone(), 2, vec![g.clone()], DiagPart::default(), DEFAULT_ELEMENT_CAP).unwrap();
        assert_eq!(degree_module(&gs, 1).action[0], g);
        let p0 = degree_module(&gs, 0);
        assert_eq!(p0.dim(), 1);
        assert!(p0.as_module().is_trivial());
        assert_eq!(degree_module(&gs, 2).action[0], Matrix::identity(3));
    }

    #[test]
    fn weights() {
        let d = DiagPart::new(vec![2], vec![vec![1], vec![1]], 2).unwrap();
        assert_eq!(monomial_weight(&d, &[1, 1]), vec![0]);
        assert_eq!(monomial_weight(&d, &[2, 1]), vec![1]);
        assert!(monomial_weight(&DiagPart::default(), &[1, 1]).is_empty());
    }

    #[test]
    fn json_shape() {
        let f = Field::prime(5).unwrap();
        let p = Polynomial::monomial(vec![1, 2], Fe(3));
        assert_eq!(p.to_json(&f).to_string(), r#"{"[1,2]":[3]}"#);
    }
}
