//! Weight-class counting for diagonalizable actions `D = ∏ μ_{n_j}`.
//!
//! `A = S^D` is spanned by monomials of weight `0`, and `^eA` by the
//! `x^{a + p^e b}` with `a ∈ [0,p^e)^d` and `W·a + p^e·W·b ≡ 0`. Writing
//! `s = W·a`, the block belonging to `a` is the `A`-module of monomials `x^b`
//! with `p^e·wt(b) ≡ −s`; it splits as `⊕ M_χ` over the solutions `χ` of
//! `p^e·χ ≡ −s (mod n)`, where `M_χ` is spanned by the monomials of weight `χ`.
//! Coordinatewise, `p^e·χ_j ≡ −s_j (mod n_j)` is solvable iff
//! `g_j = gcd(p^e, n_j)` divides `s_j`, and then has `g_j` solutions. When
//! `p ∤ n` every block is a single `M_χ`, with `χ = −p^{−e}·s`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::equivmod::{frobenius_pushforward, standard_module, summand_count, Degree, StandardLabel, DEFAULT_RANK_MAX};
use crate::error::{Error, Result};
use crate::gf::{Field, Matrix};
use crate::groupscheme::{enumerate_elements, DiagPart, DEFAULT_ELEMENT_CAP};
use crate::modrep::KGModule;

/// Above this many exponent blocks the residue convolution is used.
pub const ENUMERATION_LIMIT: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightClassCount {
    pub e: u32,
    pub p: u32,
    pub d: usize,
    pub orders: Vec<u64>,
    /// Every class of `∏ Z/n_j`, including those with count zero.
    pub counts: BTreeMap<Vec<u64>, u64>,
}

impl WeightClassCount {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn denominator(&self) -> u64 {
        (self.p as u64).pow(self.e * self.d as u32)
    }

    pub fn normalized(&self, class: &[u64]) -> f64 {
        self.counts.get(class).copied().unwrap_or(0) as f64 / self.denominator() as f64
    }

    pub fn predicted(&self) -> f64 {
        1.0 / self.orders.iter().product::<u64>() as f64
    }

    /// Rows `e,class,count,normalized,predicted`.
    pub fn to_csv_rows(&self) -> Vec<String> {
        self.counts
            .iter()
            .map(|(c, &n)| {
                format!(
                    "{},{},{},{:.6},{:.6}",
                    self.e,
                    class_label(c),
                    n,
                    self.normalized(c),
                    self.predicted()
                )
            })
            .collect()
    }
}

pub const CSV_HEADER: &str = "e,class,count,normalized,predicted";

/// `chi0`, `chi1.3`, …
pub fn class_label(c: &[u64]) -> String {
    let parts: Vec<String> = c.iter().map(u64::to_string).collect();
    format!("chi{}", parts.join("."))
}

fn all_classes(orders: &[u64]) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for &n in orders {
        out = out
            .into_iter()
            .flat_map(|c| {
                (0..n).map(move |x| {
                    let mut c = c.clone();
                    c.push(x);
                    c
                })
            })
            .collect();
    }
    out
}

fn class_index(c: &[u64], orders: &[u64]) -> usize {
    c.iter().zip(orders).fold(0usize, |acc, (&x, &n)| acc * n as usize + x as usize)
}

/// Solutions `χ` of `q·χ ≡ −s (mod n)`, coordinatewise.
fn solution_coset(s: &[u64], orders: &[u64], q: u64) -> Vec<Vec<u64>> {
    let mut per_coord = Vec::with_capacity(orders.len());
    for (&sj, &n) in s.iter().zip(orders) {
        let target = (n - sj % n) % n;
        let qn = q % n;
        let sols: Vec<u64> = (0..n).filter(|&x| (qn * x) % n == target).collect();
        if sols.is_empty() {
            return Vec::new();
        }
        per_coord.push(sols);
    }
    let mut out = vec![Vec::new()];
    for sols in per_coord {
        out = out
            .into_iter()
            .flat_map(|c| {
                sols.iter().map(move |&x| {
                    let mut c = c.clone();
                    c.push(x);
                    c
                })
            })
            .collect();
    }
    out
}

fn check_inputs(diag: &DiagPart, p: u32, d: usize, e: u32) -> Result<u64> {
    if diag.weights.len() != d {
        return Err(Error::config("group.diag.weights", format!("expected {d} rows")));
    }
    (p as u64)
        .checked_pow(e)
        .filter(|q| q.checked_pow(d as u32).is_some())
        .ok_or_else(|| Error::ResourceCap(format!("p^(de) overflows for e = {e}")))
}

/// Distribution of `s = W·a mod n` over `a ∈ [0,q)^d`.
fn residue_distribution_enumerated(diag: &DiagPart, d: usize, q: u64) -> Vec<u64> {
    let orders = &diag.orders;
    let size: usize = orders.iter().product::<u64>() as usize;
    let mut dist = vec![0u64; size];
    let mut a = vec![0u32; d];
    loop {
        let s = diag.monomial_weight(&a);
        dist[class_index(&s, orders)] += 1;
        let mut i = d;
        loop {
            if i == 0 {
                return dist;
            }
            i -= 1;
            a[i] += 1;
            if (a[i] as u64) < q {
                break;
            }
            a[i] = 0;
        }
    }
}

/// Same distribution by convolving one coordinate at a time.
fn residue_distribution_convolved(diag: &DiagPart, d: usize, q: u64) -> Vec<u64> {
    let orders = &diag.orders;
    let classes = all_classes(orders);
    let size = classes.len();
    let mut dist = vec![0u64; size];
    dist[0] = 1;
    for i in 0..d {
        // How many a_i ∈ [0,q) give each residue a_i·w_i.
        let mut step = vec![0u64; size];
        let n_lcm = orders.iter().fold(1u64, |l, &n| l / crate::gf::gcd(l, n) * n);
        for r in 0..n_lcm.min(q) {
            let reps = (q - r).div_ceil(n_lcm);
            let w: Vec<u64> = orders
                .iter()
                .zip(&diag.weights[i])
                .map(|(&n, &wt)| (r % n) * wt % n)
                .collect();
            step[class_index(&w, orders)] += reps;
        }
        let mut next = vec![0u64; size];
        for (x, cx) in classes.iter().enumerate() {
            if dist[x] == 0 {
                continue;
            }
            for (y, cy) in classes.iter().enumerate() {
                if step[y] == 0 {
                    continue;
                }
                let z: Vec<u64> = cx.iter().zip(cy).zip(orders).map(|((a, b), n)| (a + b) % n).collect();
                next[class_index(&z, orders)] += dist[x] * step[y];
            }
        }
        dist = next;
    }
    dist
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountingPath {
    Auto,
    Enumerate,
    Convolve,
}

pub fn veronese_summand_counts(diag: &DiagPart, p: u32, d: usize, e: u32) -> Result<WeightClassCount> {
    veronese_summand_counts_via(diag, p, d, e, CountingPath::Auto)
}

pub fn veronese_summand_counts_via(
    diag: &DiagPart,
    p: u32,
    d: usize,
    e: u32,
    path: CountingPath,
) -> Result<WeightClassCount> {
    let q = check_inputs(diag, p, d, e)?;
    let blocks = q.pow(d as u32);
    let use_enum = match path {
        CountingPath::Auto => blocks <= ENUMERATION_LIMIT,
        CountingPath::Enumerate => true,
        CountingPath::Convolve => false,
    };
    let dist = if use_enum {
        residue_distribution_enumerated(diag, d, q)
    } else {
        residue_distribution_convolved(diag, d, q)
    };
    let classes = all_classes(&diag.orders);
    let mut counts: BTreeMap<Vec<u64>, u64> = classes.iter().map(|c| (c.clone(), 0)).collect();
    for (s, &k) in classes.iter().zip(&dist) {
        if k == 0 {
            continue;
        }
        for chi in solution_coset(s, &diag.orders, q) {
            *counts.get_mut(&chi).unwrap() += k;
        }
    }
    Ok(WeightClassCount {
        e,
        p,
        d,
        orders: diag.orders.clone(),
        counts,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CrosscheckEntry {
    pub class: String,
    pub diagmu: u64,
    pub equivariant: u64,
    pub agree: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CrosscheckReport {
    pub e: u32,
    pub entries: Vec<CrosscheckEntry>,
    pub agree: bool,
}

/// Realizes `∏ μ_{n_j}` as the constant group generated by
/// `diag(ζ_j^{w_1j}, …, ζ_j^{w_dj})` and compares both pipelines. The
/// character `σ_j ↦ ζ_j^{k_j}` of the constant group matches the class
/// `χ = −k`.
pub fn crosscheck_constant_realization(f: &Field, diag: &DiagPart, e: u32) -> Result<CrosscheckReport> {
    let d = diag.weights.len();
    let q = f.q() as u64;
    let mut roots = Vec::with_capacity(diag.orders.len());
    for &n in &diag.orders {
        if n % f.p() as u64 == 0 || (q - 1) % n != 0 {
            return Err(Error::MissingRoots(n));
        }
        roots.push(f.pow(f.primitive_element(), (q - 1) / n));
    }
    let gens: Vec<Matrix> = roots
        .iter()
        .enumerate()
        .map(|(j, &z)| {
            let entries: Vec<_> = (0..d).map(|i| f.pow(z, diag.weights[i][j])).collect();
            Matrix::diagonal(&entries)
        })
        .collect();
    enumerate_elements(f, &gens, d, DEFAULT_ELEMENT_CAP)?;
    let oracle = veronese_summand_counts(diag, f.p(), d, e)?;
    let s = standard_module(&KGModule::trivial(gens.len()), Degree::from_integer(0), vec![], d, &DiagPart::default());
    let pf = frobenius_pushforward(f, &gens, &s, e, DEFAULT_RANK_MAX)?;
    let mut entries = Vec::new();
    for k in all_classes(&diag.orders) {
        let action = roots
            .iter()
            .zip(&k)
            .map(|(&z, &kj)| Matrix::diagonal(&[f.pow(z, kj)]))
            .collect();
        let label = StandardLabel::new(f, class_label(&k), KGModule::new(1, action), vec![])?;
        let measured = summand_count(f, &gens, &label, &pf)?.total as u64;
        let chi: Vec<u64> = k.iter().zip(&diag.orders).map(|(&x, &n)| (n - x) % n).collect();
        let expected = oracle.counts[&chi];
        entries.push(CrosscheckEntry {
            class: class_label(&chi),
            diagmu: expected,
            equivariant: measured,
            agree: expected == measured,
        });
    }
    entries.sort_by(|a, b| a.class.cmp(&b.class));
    let agree = entries.iter().all(|x| x.agree);
    Ok(CrosscheckReport { e, entries, agree })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mu(orders: Vec<u64>, weights: Vec<Vec<i64>>) -> DiagPart {
        let d = weights.len();
        DiagPart::new(orders, weights, d).unwrap()
    }

    #[test]
    fn parity_counts() {
        let m = mu(vec![2], vec![vec![1], vec![1]]);
        let c = veronese_summand_counts(&m, 3, 2, 1).unwrap();
        assert_eq!(c.counts[&vec![0]], 5);
        assert_eq!(c.counts[&vec![1]], 4);
    }

    #[test]
    fn infinitesimal_cosets() {
        let m = mu(vec![2], vec![vec![1], vec![1]]);
        let c = veronese_summand_counts(&m, 2, 2, 1).unwrap();
        assert_eq!(c.counts.values().copied().collect::<Vec<_>>(), vec![2, 2]);
        let c = veronese_summand_counts(&m, 2, 2, 3).unwrap();
        assert_eq!(c.counts.values().copied().collect::<Vec<_>>(), vec![32, 32]);
        assert_eq!(c.normalized(&[0]), 0.5);
    }

    #[test]
    fn paths_agree() {
        for (orders, weights, p, e) in [
            (vec![2], vec![vec![1], vec![1]], 3, 3),
            (vec![4], vec![vec![1], vec![2], vec![3]], 2, 3),
            (vec![3, 2], vec![vec![1, 1], vec![2, 0]], 5, 2),
            (vec![6], vec![vec![1], vec![5]], 3, 2),
        ] {
            let m = mu(orders, weights);
            let d = m.weights.len();
            let a = veronese_summand_counts_via(&m, p, d, e, CountingPath::Enumerate).unwrap();
            let b = veronese_summand_counts_via(&m, p, d, e, CountingPath::Convolve).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn trivial_order_is_one_class() {
        let m = mu(vec![1], vec![vec![0], vec![0]]);
        let c = veronese_summand_counts(&m, 3, 2, 2).unwrap();
        assert_eq!(c.counts.len(), 1);
        assert_eq!(c.total(), 81);
    }

    #[test]
    fn realization_agrees() {
        let f = Field::prime(3).unwrap();
        let r = crosscheck_constant_realization(&f, &mu(vec![2], vec![vec![1], vec![1]]), 1).unwrap();
        assert!(r.agree);
        assert_eq!(r.entries.iter().map(|x| x.diagmu).collect::<Vec<_>>(), vec![5, 4]);
        let f5 = Field::prime(5).unwrap();
        assert!(crosscheck_constant_realization(&f5, &mu(vec![4], vec![vec![1], vec![3]]), 1).unwrap().agree);
    }

    #[test]
    fn missing_roots() {
        let f = Field::prime(3).unwrap();
        let err = crosscheck_constant_realization(&f, &mu(vec![4], vec![vec![1], vec![3]]), 1).unwrap_err();
        assert!(matches!(err, Error::MissingRoots(4)));
    }
}
