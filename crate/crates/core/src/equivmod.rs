//! S-free, `Q`-graded `(G, S)`-modules and summand counting.
//!
//! A module is stored by its homogeneous free generators and, for each
//! constant group generator `s`, the sparse matrix with polynomial entries
//! expressing `s·gen_j = Σ_i a_ij gen_i`. The diagonalizable part acts through
//! generator weights.
//!
//! Counting summands isomorphic to `P ⊗ S(c)` (generators in degree `c`) uses
//! that every degree-preserving composite `P⊗S(c) → M → P⊗S(c)` factors through
//! the generators of `M` sitting exactly in degree `c`: a map out of `P⊗S(c)`
//! lands in `M_c`, and a map into `P⊗S(c)` kills every generator of degree
//! above `c` after composing. So the composition pairing only needs
//!
//! * `F_c`, the reductions mod `m` of all `G`-maps `P → M_c`, and
//! * `R_c`, the restrictions to degree-`c` generators of all graded
//!   equivariant maps `M → P⊗S(c)`,
//!
//! and its rank over `End(P)/rad` is the multiplicity. Shifts are restricted to
//! generator degrees of `M`, since a summand `P⊗S(c)` contributes generators in
//! degree `c`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{kernel, Fe, Field, Matrix};
use crate::groupscheme::DiagPart;
use crate::modrep::{hom_space, pairing_rank, KGModule, LocalEnd};
use crate::polyring::{Exponent, MonomialBasis, Polynomial, Substitution};

/// Exact rational degree; denominators are powers of `p`.
pub type Degree = Ratio<i64>;

pub const DEFAULT_SLICE_MAX: usize = 5000;
pub const DEFAULT_RANK_MAX: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Generator {
    pub label: String,
    #[serde(serialize_with = "ser_degree")]
    pub degree: Degree,
    pub weight: Vec<u64>,
}

fn ser_degree<S: serde::Serializer>(d: &Degree, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_degree(d))
}

pub fn format_degree(d: &Degree) -> String {
    if *d.denom() == 1 {
        d.numer().to_string()
    } else {
        format!("{}/{}", d.numer(), d.denom())
    }
}

/// Sparse column: `(row index, polynomial entry)`.
pub type SparseColumn = Vec<(usize, Polynomial)>;

fn add_weights(a: &[u64], b: &[u64], orders: &[u64]) -> Vec<u64> {
    a.iter()
        .zip(b)
        .zip(orders)
        .map(|((x, y), n)| (x + y) % n)
        .collect()
}

fn sub_weights(a: &[u64], b: &[u64], orders: &[u64]) -> Vec<u64> {
    a.iter()
        .zip(b)
        .zip(orders)
        .map(|((x, y), n)| (x + n - y % n) % n)
        .collect()
}

/// Nonnegative integer `t` with `a = b + t`, if any.
fn integer_gap(a: &Degree, b: &Degree) -> Option<usize> {
    let diff = a - b;
    (diff.is_integer() && *diff.numer() >= 0).then(|| *diff.numer() as usize)
}

/// Homogeneous slice `M_t` restricted to one weight.
#[derive(Clone, Debug)]
pub struct Slice {
    pub degree: Degree,
    pub weight: Vec<u64>,
    /// `(generator, monomial)` pairs spanning the slice.
    pub entries: Vec<(usize, Exponent)>,
    index: HashMap<(usize, Exponent), usize>,
}

impl Slice {
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn index_of(&self, gen: usize, e: &[u32]) -> Option<usize> {
        self.index.get(&(gen, e.to_vec())).copied()
    }
}

#[derive(Debug)]
pub struct GradedEquivariantModule {
    nvars: usize,
    diag: DiagPart,
    gens: Vec<Generator>,
    action: Vec<Vec<SparseColumn>>,
    slice_max: usize,
    slices: Mutex<HashMap<(Degree, Vec<u64>), Arc<Slice>>>,
    bases: Mutex<HashMap<usize, Arc<MonomialBasis>>>,
}

impl Clone for GradedEquivariantModule {
    fn clone(&self) -> Self {
        GradedEquivariantModule::new(self.nvars, self.diag.clone(), self.gens.clone(), self.action.clone())
            .with_slice_max(self.slice_max)
    }
}

impl GradedEquivariantModule {
    pub fn new(nvars: usize, diag: DiagPart, gens: Vec<Generator>, action: Vec<Vec<SparseColumn>>) -> Self {
        for cols in &action {
            assert_eq!(cols.len(), gens.len(), "one column per generator");
        }
        GradedEquivariantModule {
            nvars,
            diag,
            gens,
            action,
            slice_max: DEFAULT_SLICE_MAX,
            slices: Mutex::new(HashMap::new()),
            bases: Mutex::new(HashMap::new()),
        }
    }

    pub fn with_slice_max(mut self, cap: usize) -> Self {
        self.slice_max = cap;
        self
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn gens(&self) -> &[Generator] {
        &self.gens
    }

    pub fn ngroup_gens(&self) -> usize {
        self.action.len()
    }

    pub fn diag(&self) -> &DiagPart {
        &self.diag
    }

    /// `rank_S M`: the module is free on its generators.
    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn action(&self) -> &[Vec<SparseColumn>] {
        &self.action
    }

    /// Distinct generator degrees, ascending.
    pub fn generator_degrees(&self) -> Vec<Degree> {
        let mut d: Vec<Degree> = self.gens.iter().map(|g| g.degree).collect();
        d.sort();
        d.dedup();
        d
    }

    fn basis(&self, n: usize) -> Arc<MonomialBasis> {
        let mut b = self.bases.lock().unwrap();
        b.entry(n)
            .or_insert_with(|| Arc::new(MonomialBasis::new(self.nvars, n)))
            .clone()
    }

    fn mono_weight(&self, e: &[u32]) -> Vec<u64> {
        self.diag.monomial_weight(e)
    }

    /// The homogeneous slice of degree `t` and weight `weight`.
    pub fn slice(&self, t: Degree, weight: &[u64]) -> Result<Arc<Slice>> {
        let key = (t, weight.to_vec());
        if let Some(s) = self.slices.lock().unwrap().get(&key) {
            return Ok(s.clone());
        }
        let mut entries = Vec::new();
        for (i, g) in self.gens.iter().enumerate() {
            let Some(n) = integer_gap(&t, &g.degree) else {
                continue;
            };
            let need = sub_weights(weight, &g.weight, &self.diag.orders);
            let basis = self.basis(n);
            for e in &basis.monomials {
                if self.diag.is_empty() || self.mono_weight(e) == need {
                    entries.push((i, e.clone()));
                }
            }
            if entries.len() > self.slice_max {
                return Err(Error::ResourceCap(format!(
                    "slice of degree {} exceeds {} entries",
                    format_degree(&t),
                    self.slice_max
                )));
            }
        }
        let index = entries.iter().enumerate().map(|(k, e)| (e.clone(), k)).collect();
        let slice = Arc::new(Slice {
            degree: t,
            weight: weight.to_vec(),
            entries,
            index,
        });
        self.slices.lock().unwrap().insert(key, slice.clone());
        Ok(slice)
    }

    /// Action of constant generator `s` on a slice, as a square matrix.
    pub fn slice_action(&self, f: &Field, s: usize, slice: &Slice, sub: &mut Substitution) -> Matrix {
        let n = slice.dim();
        let mut m = Matrix::zeros(n, n);
        for (col, (k, mu)) in slice.entries.iter().enumerate() {
            let moved = sub.apply_monomial(mu);
            for (l, entry) in &self.action[s][*k] {
                let prod = moved.mul(f, entry);
                for (e, &c) in prod.terms() {
                    let row = slice
                        .index_of(*l, e)
                        .expect("action preserves degree and weight");
                    m[(row, col)] = f.add(m[(row, col)], c);
                }
            }
        }
        m
    }

    /// The slice as a representation of the constant group.
    pub fn slice_module(&self, f: &Field, group_gens: &[Matrix], slice: &Slice) -> KGModule {
        let action = group_gens
            .iter()
            .enumerate()
            .map(|(s, g)| {
                let mut sub = Substitution::new(f, g);
                self.slice_action(f, s, slice, &mut sub)
            })
            .collect();
        KGModule::new(slice.dim(), action)
    }

    /// Every nonzero entry `a_ij` is homogeneous of degree `deg(gen_j) − deg(gen_i)`
    /// and carries weight `wt(gen_j) − wt(gen_i)`.
    pub fn check_homogeneity(&self) -> Result<()> {
        for (s, cols) in self.action.iter().enumerate() {
            for (j, col) in cols.iter().enumerate() {
                for &(i, ref poly) in col {
                    if poly.is_zero() {
                        continue;
                    }
                    let gap = integer_gap(&self.gens[j].degree, &self.gens[i].degree);
                    let ok_deg = match (gap, poly.homogeneous_degree()) {
                        (Some(g), Some(d)) => g == d,
                        _ => false,
                    };
                    let want = sub_weights(&self.gens[j].weight, &self.gens[i].weight, &self.diag.orders);
                    let ok_wt = poly.terms().keys().all(|e| self.mono_weight(e) == want);
                    if !ok_deg || !ok_wt {
                        return Err(Error::Verification(format!(
                            "action entry ({i},{j}) of group generator {s} is not homogeneous of the right degree/weight"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn direct_sum(&self, other: &GradedEquivariantModule) -> GradedEquivariantModule {
        assert_eq!(self.nvars, other.nvars);
        let off = self.gens.len();
        let mut gens = self.gens.clone();
        gens.extend(other.gens.iter().cloned());
        let action = self
            .action
            .iter()
            .zip(&other.action)
            .map(|(a, b)| {
                let mut cols = a.clone();
                cols.extend(
                    b.iter()
                        .map(|col| col.iter().map(|(i, p)| (i + off, p.clone())).collect()),
                );
                cols
            })
            .collect();
        GradedEquivariantModule::new(self.nvars, self.diag.clone(), gens, action)
            .with_slice_max(self.slice_max)
    }
}

/// `P ⊗ S` with all generators in degree `shift` and weight `weight`.
pub fn standard_module(
    p: &KGModule,
    shift: Degree,
    weight: Vec<u64>,
    nvars: usize,
    diag: &DiagPart,
) -> GradedEquivariantModule {
    let gens = (0..p.dim)
        .map(|i| Generator {
            label: format!("v{i}"),
            degree: shift,
            weight: weight.clone(),
        })
        .collect();
    let action = p
        .action
        .iter()
        .map(|a| {
            (0..p.dim)
                .map(|j| {
                    (0..p.dim)
                        .filter(|&i| !a[(i, j)].is_zero())
                        .map(|i| (i, Polynomial::constant(nvars, a[(i, j)])))
                        .collect()
                })
                .collect()
        })
        .collect();
    GradedEquivariantModule::new(nvars, diag.clone(), gens, action)
}

/// `^eM`: generators `^e(x^r g_k)` for `r ∈ [0, p^e)^d`, in degree
/// `(|r| + deg g_k)/p^e`. For `s·(x^r g_k) = Σ c_b x^b g_l` and
/// `b = p^e·q + r'`, the entry in row `(r', l)` gains `c_b^{1/p^e} x^q`.
pub fn frobenius_pushforward(
    f: &Field,
    group_gens: &[Matrix],
    m: &GradedEquivariantModule,
    e: u32,
    rank_max: usize,
) -> Result<GradedEquivariantModule> {
    let d = m.nvars;
    let p = f.p() as u64;
    for &n in &m.diag.orders {
        if n % p == 0 {
            return Err(Error::NonEtale(format!(
                "mu_{n} is infinitesimal in characteristic {p}; no canonical twisted action on the pushforward"
            )));
        }
    }
    let q = p
        .checked_pow(e)
        .ok_or_else(|| Error::ResourceCap("p^e overflows".into()))?;
    let blocks = q
        .checked_pow(d as u32)
        .filter(|&b| (b as u128) * (m.rank() as u128) <= rank_max as u128)
        .ok_or_else(|| {
            Error::ResourceCap(format!("rank p^(de)·rank(M) exceeds {rank_max}"))
        })? as usize;
    let decode = |mut code: usize| -> Exponent {
        let mut r = vec![0u32; d];
        for slot in r.iter_mut().rev() {
            *slot = (code as u64 % q) as u32;
            code /= q as usize;
        }
        r
    };
    let encode = |r: &[u32]| -> usize { r.iter().fold(0usize, |acc, &x| acc * q as usize + x as usize) };
    // p^{-e} modulo each μ-order.
    let inv_q: Vec<u64> = m
        .diag
        .orders
        .iter()
        .map(|&n| {
            if n == 1 {
                0
            } else {
                (1..n).find(|&x| (x * (q % n)) % n == 1).expect("p is a unit mod n")
            }
        })
        .collect();
    let qi = q as i64;
    let mut gens = Vec::with_capacity(blocks * m.rank());
    for g in m.gens.iter() {
        for code in 0..blocks {
            let r = decode(code);
            let deg = (Degree::from_integer(r.iter().sum::<u32>() as i64) + g.degree) / Degree::from_integer(qi);
            let raw = add_weights(&m.mono_weight(&r), &g.weight, &m.diag.orders);
            let weight = raw
                .iter()
                .zip(&inv_q)
                .zip(&m.diag.orders)
                .map(|((w, iq), n)| (w * iq) % n)
                .collect();
            let label = if m.rank() == 1 {
                format!("^{e}(x^{r:?})")
            } else {
                format!("^{e}(x^{r:?} {})", g.label)
            };
            gens.push(Generator {
                label,
                degree: deg,
                weight,
            });
        }
    }
    let mut action = Vec::with_capacity(group_gens.len());
    for (s, g) in group_gens.iter().enumerate() {
        let mut sub = Substitution::new(f, g);
        let mut cols: Vec<SparseColumn> = Vec::with_capacity(gens.len());
        for k in 0..m.rank() {
            for code in 0..blocks {
                let r = decode(code);
                let moved = sub.apply_monomial(&r);
                let mut col: BTreeMap<usize, Polynomial> = BTreeMap::new();
                for (l, entry) in &m.action[s][k] {
                    let prod = moved.mul(f, entry);
                    for (b, &c) in prod.terms() {
                        let quo: Exponent = b.iter().map(|&x| (x as u64 / q) as u32).collect();
                        let rem: Exponent = b.iter().map(|&x| (x as u64 % q) as u32).collect();
                        let row = l * blocks + encode(&rem);
                        col.entry(row)
                            .or_insert_with(|| Polynomial::zero(d))
                            .add_term(f, quo, f.inv_frobenius(c, e));
                    }
                }
                cols.push(col.into_iter().filter(|(_, p)| !p.is_zero()).collect());
            }
        }
        action.push(cols);
    }
    Ok(GradedEquivariantModule::new(d, m.diag.clone(), gens, action).with_slice_max(m.slice_max))
}

/// A degree-preserving equivariant `S`-linear map `src → dst(c)`, stored as the
/// images of the source generators, each in the matching slice of `dst`.
#[derive(Clone, Debug)]
pub struct GradedMap {
    pub shift: Degree,
    pub slices: Vec<Arc<Slice>>,
    pub images: Vec<Vec<Fe>>,
}

impl GradedMap {
    pub fn is_zero(&self) -> bool {
        self.images.iter().all(|v| v.iter().all(|c| c.is_zero()))
    }

    /// Image of `x^μ · gen_j`, as `(dst generator, exponent) -> coefficient`.
    fn image_of(&self, j: usize, mu: &[u32]) -> Vec<((usize, Exponent), Fe)> {
        self.slices[j]
            .entries
            .iter()
            .zip(&self.images[j])
            .filter(|(_, c)| !c.is_zero())
            .map(|((k, nu), &c)| ((*k, nu.iter().zip(mu).map(|(a, b)| a + b).collect()), c))
            .collect()
    }
}

/// Composite `second ∘ first`, returned as images of the source generators of
/// `first` in the slices of `second`'s target.
pub fn compose(f: &Field, first: &GradedMap, second: &GradedMap, target: &GradedEquivariantModule) -> Result<GradedMap> {
    let shift = first.shift + second.shift;
    let mut slices = Vec::new();
    let mut images = Vec::new();
    for (j, sl) in first.slices.iter().enumerate() {
        let out_slice = target.slice(sl.degree + second.shift, &sl.weight)?;
        let mut v = vec![Fe::ZERO; out_slice.dim()];
        for ((k, mu), &c) in sl.entries.iter().zip(&first.images[j]) {
            if c.is_zero() {
                continue;
            }
            for ((l, e), d) in second.image_of(*k, mu) {
                let idx = out_slice.index_of(l, &e).expect("composite stays in slice");
                v[idx] = f.add(v[idx], f.mul(c, d));
            }
        }
        slices.push(out_slice);
        images.push(v);
    }
    Ok(GradedMap { shift, slices, images })
}

/// Basis of graded equivariant maps `src → dst` raising degree by `c`: each
/// generator image lies in `dst_{deg + c}` with the generator's weight.
pub fn graded_hom(
    f: &Field,
    group_gens: &[Matrix],
    src: &GradedEquivariantModule,
    dst: &GradedEquivariantModule,
    c: Degree,
) -> Result<Vec<GradedMap>> {
    let slices: Vec<Arc<Slice>> = src
        .gens
        .iter()
        .map(|g| dst.slice(g.degree + c, &g.weight))
        .collect::<Result<_>>()?;
    let mut offsets = Vec::with_capacity(slices.len());
    let mut total = 0;
    for s in &slices {
        offsets.push(total);
        total += s.dim();
    }
    if total == 0 {
        return Ok(Vec::new());
    }
    let mut rows: Vec<Vec<Fe>> = Vec::new();
    for (s, g) in group_gens.iter().enumerate() {
        let mut sub = Substitution::new(f, g);
        for (j, out) in slices.iter().enumerate() {
            // Σ_i a_ij(s)·φ(gen_i) − s·φ(gen_j) = 0 in slices[j].
            let mut block = vec![vec![Fe::ZERO; total]; out.dim()];
            for (i, poly) in &src.action[s][j] {
                for (u, (k, mu)) in slices[*i].entries.iter().enumerate() {
                    for (nu, &c) in poly.terms() {
                        let e: Exponent = mu.iter().zip(nu).map(|(a, b)| a + b).collect();
                        let row = out.index_of(*k, &e).expect("degree bookkeeping");
                        let col = offsets[*i] + u;
                        block[row][col] = f.add(block[row][col], c);
                    }
                }
            }
            let act = dst.slice_action(f, s, out, &mut sub);
            for r in 0..out.dim() {
                for u in 0..out.dim() {
                    let v = act[(r, u)];
                    if !v.is_zero() {
                        let col = offsets[j] + u;
                        block[r][col] = f.sub(block[r][col], v);
                    }
                }
            }
            rows.extend(block);
        }
    }
    let ker = if rows.is_empty() {
        Matrix::identity(total)
    } else {
        kernel(f, &Matrix::from_rows(&rows))
    };
    Ok(ker
        .columns()
        .into_iter()
        .map(|v| GradedMap {
            shift: c,
            slices: slices.clone(),
            images: slices
                .iter()
                .zip(&offsets)
                .map(|(s, &o)| v[o..o + s.dim()].to_vec())
                .collect(),
        })
        .collect())
}

/// Indecomposable `P` with weight `χ` and its local endomorphism data.
#[derive(Clone, Debug)]
pub struct StandardLabel {
    pub label: String,
    pub module: KGModule,
    pub weight: Vec<u64>,
    pub local: LocalEnd,
}

impl StandardLabel {
    pub fn new(f: &Field, label: impl Into<String>, module: KGModule, weight: Vec<u64>) -> Result<Self> {
        let local = LocalEnd::new(f, &module)?;
        Ok(StandardLabel {
            label: label.into(),
            module,
            weight,
            local,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SummandCount {
    #[serde(serialize_with = "ser_shift_map")]
    pub per_shift: BTreeMap<Degree, usize>,
    pub total: usize,
}

fn ser_shift_map<S: serde::Serializer>(
    m: &BTreeMap<Degree, usize>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(m.len()))?;
    for (k, v) in m {
        map.serialize_entry(&format_degree(k), v)?;
    }
    map.end()
}

impl SummandCount {
    /// `"0:1;1/2:2"`.
    pub fn breakdown(&self) -> String {
        self.per_shift
            .iter()
            .map(|(k, v)| format!("{}:{}", format_degree(k), v))
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// Multiplicity of `P ⊗ S(c)` in `M` at one shift `c`.
pub fn summand_count_at(
    f: &Field,
    group_gens: &[Matrix],
    label: &StandardLabel,
    m: &GradedEquivariantModule,
    c: Degree,
) -> Result<usize> {
    let chi = &label.weight;
    let orders = &m.diag.orders;
    let p = &label.module;
    let dp = p.dim;
    // Degree-c generators of M with weight χ.
    let bar: Vec<usize> = (0..m.rank())
        .filter(|&i| m.gens[i].degree == c && m.gens[i].weight == *chi)
        .collect();
    if bar.is_empty() {
        return Ok(0);
    }
    // F_c: G-maps P → M_c, reduced to the degree-c generators.
    let mc = m.slice(c, chi)?;
    let mc_module = m.slice_module(f, group_gens, &mc);
    let bar_pos: Vec<usize> = bar
        .iter()
        .map(|&i| mc.index_of(i, &vec![0; m.nvars]).expect("generator lies in its slice"))
        .collect();
    let into: Vec<Matrix> = hom_space(f, p, &mc_module)
        .into_iter()
        .map(|x| x.select_rows(&bar_pos))
        .filter(|x| !x.is_zero())
        .collect();
    if into.is_empty() {
        return Ok(0);
    }
    // R_c: equivariant maps M → P⊗S(c). Unknowns (j, v, μ) with
    // |μ| = deg(gen_j) − c and wt(μ) = wt(gen_j) − χ.
    let mut unknown_index: HashMap<(usize, usize, Exponent), usize> = HashMap::new();
    let mut per_gen: Vec<Option<Vec<Exponent>>> = vec![None; m.rank()];
    let mut count = 0usize;
    for (j, g) in m.gens.iter().enumerate() {
        let Some(n) = integer_gap(&g.degree, &c) else {
            continue;
        };
        let need = sub_weights(&g.weight, chi, orders);
        let monos: Vec<Exponent> = m
            .basis(n)
            .monomials
            .iter()
            .filter(|e| m.diag.is_empty() || m.mono_weight(e) == need)
            .cloned()
            .collect();
        for mu in &monos {
            for v in 0..dp {
                unknown_index.insert((j, v, mu.clone()), count);
                count += 1;
            }
        }
        per_gen[j] = Some(monos);
    }
    if count > m.slice_max * dp.max(1) * 4 {
        return Err(Error::ResourceCap(format!("hom system with {count} unknowns")));
    }
    let mut rows: Vec<Vec<Fe>> = Vec::new();
    for (s, g) in group_gens.iter().enumerate() {
        let mut sub = Substitution::new(f, g);
        let rho = &p.action[s];
        let mut block: HashMap<usize, Vec<Fe>> = HashMap::new();
        let touch = |eq: usize, col: usize, val: Fe, block: &mut HashMap<usize, Vec<Fe>>| {
            let row = block.entry(eq).or_insert_with(|| vec![Fe::ZERO; count]);
            row[col] = f.add(row[col], val);
        };
        for j in 0..m.rank() {
            let Some(monos_j) = &per_gen[j] else {
                continue;
            };
            // LHS: Σ_i a_ij(s) · g(gen_i)
            for (i, poly) in &m.action[s][j] {
                let Some(monos_i) = &per_gen[*i] else {
                    continue;
                };
                for mu in monos_i {
                    for (nu, &cf) in poly.terms() {
                        let e: Exponent = mu.iter().zip(nu).map(|(a, b)| a + b).collect();
                        for v in 0..dp {
                            let col = unknown_index[&(*i, v, mu.clone())];
                            let eq = unknown_index[&(j, v, e.clone())];
                            touch(eq, col, cf, &mut block);
                        }
                    }
                }
            }
            // RHS: (ρ_P(s) ⊗ s) · g(gen_j)
            for mu in monos_j {
                let moved = sub.apply_monomial(mu);
                for v in 0..dp {
                    let col = unknown_index[&(j, v, mu.clone())];
                    for w in 0..dp {
                        let a = rho[(w, v)];
                        if a.is_zero() {
                            continue;
                        }
                        for (e, &cf) in moved.terms() {
                            let eq = unknown_index[&(j, w, e.clone())];
                            touch(eq, col, f.neg(f.mul(a, cf)), &mut block);
                        }
                    }
                }
            }
        }
        let mut keys: Vec<usize> = block.keys().copied().collect();
        keys.sort_unstable();
        rows.extend(keys.into_iter().map(|k| block.remove(&k).unwrap()));
    }
    let ker = if rows.is_empty() {
        Matrix::identity(count)
    } else {
        kernel(f, &Matrix::from_rows(&rows))
    };
    let zero = vec![0u32; m.nvars];
    let out_of: Vec<Matrix> = ker
        .columns()
        .iter()
        .map(|u| {
            let mut x = Matrix::zeros(dp, bar.len());
            for (b, &j) in bar.iter().enumerate() {
                for v in 0..dp {
                    x[(v, b)] = u[unknown_index[&(j, v, zero.clone())]];
                }
            }
            x
        })
        .filter(|x| !x.is_zero())
        .collect();
    Ok(pairing_rank(f, &label.local, &into, &out_of))
}

/// Multiplicity of `P ⊗ S(c)` in `M` for every candidate shift `c`.
pub fn summand_count(
    f: &Field,
    group_gens: &[Matrix],
    label: &StandardLabel,
    m: &GradedEquivariantModule,
) -> Result<SummandCount> {
    let mut out = SummandCount::default();
    for c in m.generator_degrees() {
        let k = summand_count_at(f, group_gens, label, m, c)?;
        if k > 0 {
            out.per_shift.insert(c, k);
            out.total += k;
        }
    }
    Ok(out)
}

/// Real linear combination of shift classes of indecomposables.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ThetaVector {
    pub coefficients: BTreeMap<String, f64>,
    #[serde(skip)]
    pub exact: BTreeMap<String, Ratio<i64>>,
    pub u_values: BTreeMap<String, u64>,
}

/// Normalizes counts by `p^{de}`; `u` is the minimal generator count of each label.
pub fn theta_vector(counts: &BTreeMap<String, (u64, u64)>, p: u32, d: usize, e: u32) -> ThetaVector {
    let denom = (p as i64).pow(e * d as u32);
    let mut v = ThetaVector::default();
    for (label, &(count, u)) in counts {
        let r = Ratio::new(count as i64, denom);
        v.coefficients.insert(label.clone(), count as f64 / denom as f64);
        v.exact.insert(label.clone(), r);
        v.u_values.insert(label.clone(), u);
    }
    v
}

/// `Σ |c_M| · u(M)`.
pub fn theta_norm(v: &ThetaVector) -> f64 {
    v.coefficients
        .iter()
        .map(|(l, c)| c.abs() * *v.u_values.get(l).unwrap_or(&1) as f64)
        .sum()
}
