//! Finite group schemes of the form `H × D`: a constant group `H` given by
//! matrix generators on `V = k^d`, times a diagonalizable `D = ∏ μ_{n_j}` acting
//! through a weight matrix.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{is_prime, rank, Field, Matrix};

pub const DEFAULT_ELEMENT_CAP: usize = 200;

/// The enumerated constant part. Elements are sorted by the canonical matrix
/// ordering; the identity need not come first.
#[derive(Clone, Debug)]
pub struct ConstantGroup {
    generators: Vec<Matrix>,
    elements: Vec<Matrix>,
    identity: usize,
    /// `elements[i] = generators[s] * elements[j]` for `parent[i] = Some((j, s))`.
    parent: Vec<Option<(usize, usize)>>,
    /// Indices in an order where every parent precedes its children.
    bfs_order: Vec<usize>,
    table: Vec<usize>,
}

impl ConstantGroup {
    pub fn generators(&self) -> &[Matrix] {
        &self.generators
    }

    pub fn elements(&self) -> &[Matrix] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn dim(&self) -> usize {
        self.elements[0].rows()
    }

    /// Index of `elements[a] * elements[b]`.
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order() + b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        (0..self.order())
            .find(|&b| self.mul(a, b) == self.identity)
            .expect("group is closed under inverses")
    }

    pub fn index_of(&self, m: &Matrix) -> Option<usize> {
        self.elements.iter().position(|e| e == m)
    }

    /// Extends generator images to every element (as a word evaluation).
    /// `images[s]` is the image of generator `s` in some representation.
    pub fn evaluate(&self, f: &Field, images: &[Matrix]) -> Vec<Matrix> {
        assert_eq!(images.len(), self.generators.len());
        let n = images.first().map_or(1, |m| m.rows());
        let mut out: Vec<Option<Matrix>> = vec![None; self.order()];
        for &i in &self.bfs_order {
            out[i] = Some(match self.parent[i] {
                None => Matrix::identity(n),
                Some((j, s)) => images[s].mul(f, out[j].as_ref().unwrap()),
            });
        }
        out.into_iter().map(Option::unwrap).collect()
    }

    /// Multiplicative order of one element.
    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(a, x);
            k += 1;
        }
        k
    }
}

/// Breadth-first closure of the generators under left multiplication.
pub fn enumerate_elements(f: &Field, gens: &[Matrix], dim: usize, cap: usize) -> Result<ConstantGroup> {
    for g in gens {
        if g.rows() != dim || g.cols() != dim {
            return Err(Error::config("group.constant_generators", "generator has wrong size"));
        }
        if g.inverse(f).is_none() {
            return Err(Error::config("group.constant_generators", "generator is not invertible"));
        }
    }
    let id = Matrix::identity(dim);
    let mut found: HashMap<Matrix, usize> = HashMap::new();
    let mut elems = vec![id.clone()];
    let mut parent = vec![None];
    found.insert(id, 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for (s, g) in gens.iter().enumerate() {
            let prod = g.mul(f, &elems[i]);
            if found.contains_key(&prod) {
                continue;
            }
            if elems.len() >= cap {
                return Err(Error::GroupTooLarge { cap });
            }
            found.insert(prod.clone(), elems.len());
            elems.push(prod);
            parent.push(Some((i, s)));
            queue.push_back(elems.len() - 1);
        }
    }
    // Sort canonically and remap.
    let mut perm: Vec<usize> = (0..elems.len()).collect();
    perm.sort_by(|&a, &b| elems[a].cmp(&elems[b]));
    let mut new_index = vec![0; elems.len()];
    for (new, &old) in perm.iter().enumerate() {
        new_index[old] = new;
    }
    let elements: Vec<Matrix> = perm.iter().map(|&o| elems[o].clone()).collect();
    let parent_sorted: Vec<Option<(usize, usize)>> = perm
        .iter()
        .map(|&o| parent[o].map(|(j, s)| (new_index[j], s)))
        .collect();
    let bfs_order: Vec<usize> = (0..elems.len()).map(|o| new_index[o]).collect();
    let n = elements.len();
    let lookup: HashMap<&Matrix, usize> = elements.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut table = vec![0; n * n];
    for a in 0..n {
        for b in 0..n {
            let prod = elements[a].mul(f, &elements[b]);
            table[a * n + b] = *lookup
                .get(&prod)
                .ok_or_else(|| Error::Verification("group closure is not closed".into()))?;
        }
    }
    Ok(ConstantGroup {
        generators: gens.to_vec(),
        identity: new_index[0],
        elements,
        parent: parent_sorted,
        bfs_order,
        table,
    })
}

/// `D = ∏ μ_{n_j}` acting on `x_i` with weight `weights[i][j] mod n_j`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DiagPart {
    pub orders: Vec<u64>,
    pub weights: Vec<Vec<u64>>,
}

impl DiagPart {
    pub fn new(orders: Vec<u64>, weights: Vec<Vec<i64>>, dim: usize) -> Result<DiagPart> {
        if orders.iter().any(|&n| n == 0) {
            return Err(Error::config("group.diag.orders", "orders must be positive"));
        }
        if !orders.is_empty() && weights.len() != dim {
            return Err(Error::config(
                "group.diag.weights",
                format!("expected {dim} rows, got {}", weights.len()),
            ));
        }
        let mut w = Vec::with_capacity(dim);
        for (i, row) in weights.iter().enumerate() {
            if row.len() != orders.len() {
                return Err(Error::config(
                    format!("group.diag.weights[{i}]"),
                    format!("expected {} entries", orders.len()),
                ));
            }
            w.push(
                row.iter()
                    .zip(&orders)
                    .map(|(&x, &n)| x.rem_euclid(n as i64) as u64)
                    .collect(),
            );
        }
        if orders.is_empty() {
            w = vec![Vec::new(); dim];
        }
        Ok(DiagPart { orders, weights: w })
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }

    pub fn order(&self) -> u64 {
        self.orders.iter().product()
    }

    /// Number of character classes `∏ n_j`.
    pub fn class_count(&self) -> u64 {
        self.order()
    }

    /// `(Σ_i w_ij a_i mod n_j)_j`.
    pub fn monomial_weight(&self, exps: &[u32]) -> Vec<u64> {
        self.orders
            .iter()
            .enumerate()
            .map(|(j, &n)| {
                exps.iter()
                    .zip(&self.weights)
                    .map(|(&a, w)| (a as u64 % n) * w[j] % n)
                    .sum::<u64>()
                    % n
            })
            .collect()
    }
}

/// A finite group scheme `H × ∏ μ_{n_j}` with its defining representation.
#[derive(Clone, Debug)]
pub struct GroupScheme {
    field: Field,
    dim: usize,
    constant: ConstantGroup,
    diag: DiagPart,
}

impl GroupScheme {
    pub fn new(
        field: Field,
        dim: usize,
        constant_generators: Vec<Matrix>,
        diag: DiagPart,
        cap: usize,
    ) -> Result<GroupScheme> {
        if dim == 0 {
            return Err(Error::config("dimension", "must be positive"));
        }
        let constant = enumerate_elements(&field, &constant_generators, dim, cap)?;
        // Direct product: every constant generator preserves each weight space.
        if !diag.is_empty() {
            for (s, g) in constant_generators.iter().enumerate() {
                for i in 0..dim {
                    for j in 0..dim {
                        if !g[(i, j)].is_zero() && diag.weights[i] != diag.weights[j] {
                            return Err(Error::config(
                                format!("group.constant_generators[{s}]"),
                                "generator does not commute with the diagonalizable part",
                            ));
                        }
                    }
                }
            }
        }
        Ok(GroupScheme {
            field,
            dim,
            constant,
            diag,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constant(&self) -> &ConstantGroup {
        &self.constant
    }

    pub fn diag(&self) -> &DiagPart {
        &self.diag
    }

    pub fn is_constant_only(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn is_diagonal_only(&self) -> bool {
        self.constant.generators().is_empty() || self.constant.order() == 1
    }

    /// `dim_k k[G]`.
    pub fn order(&self) -> u64 {
        self.constant.order() as u64 * self.diag.order()
    }

    pub fn is_linearly_reductive(&self) -> bool {
        is_linearly_reductive(self.constant.order() as u64, self.field.p())
    }

    pub fn infinitesimal_e0(&self) -> u32 {
        infinitesimal_e0(&self.diag.orders, self.field.p())
    }

    pub fn is_small(&self) -> SmallnessReport {
        is_small(self)
    }
}

/// Constant part is linearly reductive iff `p ∤ |H|`; `μ`-factors always are.
pub fn is_linearly_reductive(constant_order: u64, p: u32) -> bool {
    constant_order % p as u64 != 0
}

/// Largest `p`-adic valuation among the `μ`-factor orders.
pub fn infinitesimal_e0(orders: &[u64], p: u32) -> u32 {
    orders
        .iter()
        .map(|&n| {
            let mut s = 0;
            let mut n = n;
            while n % p as u64 == 0 {
                n /= p as u64;
                s += 1;
            }
            s
        })
        .max()
        .unwrap_or(0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A non-identity element fixing a hyperplane.
    PseudoReflection { element: usize, matrix: Vec<Vec<u32>> },
    /// A subgroup scheme `μ_ℓ` (the kernel of the character map onto `Z/ℓ`
    /// given by `coeffs`) acting with too small a non-fixed locus.
    Subgroup {
        ell: u64,
        coeffs: Vec<u64>,
        moved_coordinates: usize,
    },
}

impl std::fmt::Display for Witness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Witness::PseudoReflection { element, matrix } => {
                write!(f, "pseudo-reflection element #{element} {matrix:?}")
            }
            Witness::Subgroup {
                ell,
                coeffs,
                moved_coordinates,
            } => {
                if *moved_coordinates == 0 {
                    write!(f, "subgroup scheme mu_{ell} (character {coeffs:?}) acts trivially")
                } else {
                    write!(f, "subgroup scheme mu_{ell} (character {coeffs:?}) moves one coordinate")
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SmallnessReport {
    pub small: bool,
    /// Set for mixed descriptors: each factor was certified separately.
    pub factorwise: bool,
    pub witness: Option<Witness>,
}

pub fn is_small(g: &GroupScheme) -> SmallnessReport {
    let factorwise = !g.is_constant_only() && !g.is_diagonal_only();
    let witness = constant_witness(g).or_else(|| diagonal_witness(g.diag()));
    SmallnessReport {
        small: witness.is_none(),
        factorwise,
        witness,
    }
}

fn constant_witness(g: &GroupScheme) -> Option<Witness> {
    let f = g.field();
    let grp = g.constant();
    let id = Matrix::identity(g.dim());
    // Elements are distinct matrices, so the action on V is faithful; only
    // pseudo-reflections can fail.
    for (i, e) in grp.elements().iter().enumerate() {
        if i == grp.identity() {
            continue;
        }
        if rank(f, &e.sub(f, &id)) < 2 {
            let matrix = (0..e.rows())
                .map(|r| e.row(r).iter().map(|x| x.index()).collect())
                .collect();
            return Some(Witness::PseudoReflection { element: i, matrix });
        }
    }
    None
}

fn primes_dividing(n: u64) -> Vec<u64> {
    (2..=n).filter(|&l| n % l == 0 && is_prime(l)).collect()
}

/// Checks every order-`ℓ` subgroup scheme of `∏ μ_{n_j}`: these correspond to
/// nonzero characters `c` of the weight group into `Z/ℓ` (up to scalar). The
/// subgroup moves `x_i` iff `Σ_j c_j w_ij ≢ 0 mod ℓ`; small requires at least
/// two moved coordinates, and faithful requires at least one.
pub fn diagonal_witness(d: &DiagPart) -> Option<Witness> {
    let mut ells: Vec<u64> = d.orders.iter().flat_map(|&n| primes_dividing(n)).collect();
    ells.sort_unstable();
    ells.dedup();
    for ell in ells {
        let support: Vec<usize> = (0..d.orders.len()).filter(|&j| d.orders[j] % ell == 0).collect();
        let total = ell.pow(support.len() as u32);
        for code in 1..total {
            let mut c = vec![0u64; d.orders.len()];
            let mut x = code;
            for &j in &support {
                c[j] = x % ell;
                x /= ell;
            }
            // Normalize: first nonzero coefficient equals 1.
            if support.iter().map(|&j| c[j]).find(|&v| v != 0) != Some(1) {
                continue;
            }
            let moved = d
                .weights
                .iter()
                .filter(|w| w.iter().zip(&c).map(|(&a, &b)| (a % ell) * b).sum::<u64>() % ell != 0)
                .count();
            if moved < 2 {
                return Some(Witness::Subgroup {
                    ell,
                    coeffs: c,
                    moved_coordinates: moved,
                });
            }
        }
    }
    None
}
