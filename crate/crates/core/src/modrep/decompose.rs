use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{kernel, rref, Fe, Field, Matrix};
use crate::groupscheme::ConstantGroup;

use super::local::{summand_multiplicity_with, LocalEnd};
use super::module::{algebra_image, hom_space, KGModule};
use super::radical::{jacobson_radical, Algebra};

const RANDOM_CANDIDATES: usize = 256;
const EXHAUSTIVE_LIMIT: u64 = 1 << 14;

fn image_basis(f: &Field, m: &Matrix) -> Matrix {
    let ech = rref(f, m);
    m.select_columns(&ech.pivots)
}

/// Fitting split `M = ker φ^n ⊕ im φ^n` for a non-invertible, non-nilpotent `φ`.
fn fitting_split(f: &Field, phi: &Matrix) -> Option<(Matrix, Matrix)> {
    let n = phi.rows();
    let power = phi.pow(f, n as u64);
    if power.is_zero() {
        return None;
    }
    let ker = kernel(f, &power);
    if ker.cols() == 0 {
        return None;
    }
    Some((ker, image_basis(f, &power)))
}

/// Splits `m` into two nonzero submodules, or returns `None` when `End(m)` is
/// local.
pub fn split_once(f: &Field, m: &KGModule) -> Result<Option<(Matrix, Matrix)>> {
    let end = hom_space(f, m, m);
    match LocalEnd::from_basis(f, m.dim, end.clone()) {
        Ok(_) => return Ok(None),
        Err(Error::NotIndecomposable(_)) => {}
        Err(e) => return Err(e),
    }
    let k = end.len();
    for b in &end {
        if let Some(s) = fitting_split(f, b) {
            return Ok(Some(s));
        }
    }
    for i in 0..k {
        for j in i + 1..k {
            if let Some(s) = fitting_split(f, &end[i].add(f, &end[j])) {
                return Ok(Some(s));
            }
        }
    }
    let combo = |coeffs: &[Fe]| {
        coeffs
            .iter()
            .zip(&end)
            .fold(Matrix::zeros(m.dim, m.dim), |acc, (&c, b)| acc.add(f, &b.scale(f, c)))
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..RANDOM_CANDIDATES {
        let coeffs: Vec<Fe> = (0..k).map(|_| Fe(rng.gen_range(0..f.q()))).collect();
        if let Some(s) = fitting_split(f, &combo(&coeffs)) {
            return Ok(Some(s));
        }
    }
    let total = (f.q() as u64).checked_pow(k as u32);
    if let Some(total) = total.filter(|&t| t <= EXHAUSTIVE_LIMIT) {
        for code in 1..total {
            let mut x = code;
            let coeffs: Vec<Fe> = (0..k)
                .map(|_| {
                    let c = Fe((x % f.q() as u64) as u32);
                    x /= f.q() as u64;
                    c
                })
                .collect();
            if let Some(s) = fitting_split(f, &combo(&coeffs)) {
                return Ok(Some(s));
            }
        }
    }
    Err(Error::DecompositionIncomplete(format!(
        "no splitting endomorphism found for a decomposable module of dimension {}",
        m.dim
    )))
}

/// Inclusion matrices (columns in the coordinates of `m`) of indecomposable
/// summands whose direct sum is `m`.
pub fn indecomposable_summands(f: &Field, m: &KGModule) -> Result<Vec<Matrix>> {
    let mut done = Vec::new();
    let mut stack = vec![Matrix::identity(m.dim)];
    if m.dim == 0 {
        return Ok(done);
    }
    while let Some(basis) = stack.pop() {
        let sub = m.restrict(f, &basis);
        match split_once(f, &sub)? {
            None => done.push(basis),
            Some((a, b)) => {
                // Push in reverse so the kernel part is processed first.
                stack.push(basis.mul(f, &b));
                stack.push(basis.mul(f, &a));
            }
        }
    }
    Ok(done)
}

/// A simple module with its projective cover.
#[derive(Clone, Debug)]
pub struct SimpleProjectiveDatum {
    pub label: String,
    pub simple: KGModule,
    pub projective_cover: KGModule,
    /// `dim_k End_G V`.
    pub end_dim: usize,
    /// Multiplicity of the projective cover in the regular module.
    pub regular_multiplicity: usize,
}

impl SimpleProjectiveDatum {
    pub fn is_projective_simple(&self) -> bool {
        self.simple.dim == self.projective_cover.dim
    }
}

/// Simple modules of the constant group, each with projective cover, obtained
/// by splitting the regular module.
#[derive(Clone, Debug)]
pub struct RepresentationData {
    pub data: Vec<SimpleProjectiveDatum>,
    pub radical: Vec<Vec<Fe>>,
}

impl RepresentationData {
    pub fn find(&self, label: &str) -> Option<&SimpleProjectiveDatum> {
        self.data.iter().find(|d| d.label == label)
    }

    pub fn trivial(&self) -> &SimpleProjectiveDatum {
        self.data.iter().find(|d| d.simple.is_trivial()).expect("trivial simple exists")
    }
}

pub fn simples_and_projective_covers(f: &Field, group: &ConstantGroup) -> Result<RepresentationData> {
    let reg = KGModule::regular(group);
    let pieces = indecomposable_summands(f, &reg)?;
    // Isomorphism classes of the projective indecomposables.
    let mut classes: Vec<(KGModule, LocalEnd, usize)> = Vec::new();
    for incl in &pieces {
        let piece = reg.restrict(f, incl);
        let mut matched = false;
        for (rep, local, count) in classes.iter_mut() {
            if rep.dim == piece.dim && summand_multiplicity_with(f, local, rep, &piece) == 1 {
                *count += 1;
                matched = true;
                break;
            }
        }
        if !matched {
            let local = LocalEnd::new(f, &piece)?;
            classes.push((piece, local, 1));
        }
    }
    let radical = jacobson_radical(f, &Algebra::group_algebra(group));
    let mut data = Vec::new();
    for (proj, _, count) in classes {
        let images = proj.element_images(f, group);
        let rad_p = algebra_image(f, &images, &radical, proj.dim);
        let (simple, _) = proj.quotient(f, &rad_p);
        let end_dim = hom_space(f, &simple, &simple).len();
        if end_dim == 0 || simple.dim % end_dim != 0 || simple.dim / end_dim != count {
            return Err(Error::Verification(format!(
                "simple of dimension {} has End dimension {end_dim} but appears {count} times in kG",
                simple.dim
            )));
        }
        data.push(SimpleProjectiveDatum {
            label: String::new(),
            simple,
            projective_cover: proj,
            end_dim,
            regular_multiplicity: count,
        });
    }
    let total: usize = data.iter().map(|d| d.projective_cover.dim * d.regular_multiplicity).sum();
    if total != group.order() {
        return Err(Error::Verification("projective multiplicities do not add up to |G|".into()));
    }
    let mut keyed: Vec<(bool, usize, usize, Vec<usize>, usize, SimpleProjectiveDatum)> = data
        .into_iter()
        .map(|d| {
            (
                !d.simple.is_trivial(),
                d.simple.dim,
                d.end_dim,
                d.simple.fixed_point_profile(f, group),
                d.projective_cover.dim,
                d,
            )
        })
        .collect();
    keyed.sort_by(|a, b| (a.0, a.1, a.2, &a.3, a.4).cmp(&(b.0, b.1, b.2, &b.3, b.4)));
    let data = keyed
        .into_iter()
        .enumerate()
        .map(|(i, k)| {
            let mut d = k.5;
            d.label = if d.simple.is_trivial() {
                "triv".to_string()
            } else {
                format!("V{i}")
            };
            d
        })
        .collect();
    Ok(RepresentationData { data, radical })
}

/// Result of [`decompose_module`]: summand labels with multiplicities.
#[derive(Clone, Debug, Serialize)]
pub struct DecompositionReport {
    pub parts: BTreeMap<String, usize>,
    pub complete: bool,
    pub label_collision: bool,
    #[serde(skip)]
    pub summands: Vec<Matrix>,
}

pub fn decompose_module(
    f: &Field,
    reps: &RepresentationData,
    m: &KGModule,
) -> Result<DecompositionReport> {
    let mut parts = BTreeMap::new();
    if m.dim == 0 {
        return Ok(DecompositionReport {
            parts,
            complete: true,
            label_collision: false,
            summands: Vec::new(),
        });
    }
    let (summands, mut complete) = match indecomposable_summands(f, m) {
        Ok(s) => (s, true),
        Err(Error::DecompositionIncomplete(_)) => (vec![Matrix::identity(m.dim)], false),
        Err(e) => return Err(e),
    };
    let mut known: Vec<(String, KGModule, LocalEnd)> = Vec::new();
    for d in &reps.data {
        known.push((d.label.clone(), d.simple.clone(), LocalEnd::new(f, &d.simple)?));
        if !d.is_projective_simple() {
            known.push((
                format!("P_{}", d.label),
                d.projective_cover.clone(),
                LocalEnd::new(f, &d.projective_cover)?,
            ));
        }
    }
    let mut label_collision = false;
    let mut dim_sum = 0;
    for incl in &summands {
        let piece = m.restrict(f, incl);
        dim_sum += piece.dim;
        let found = known
            .iter()
            .find(|(_, k, local)| k.dim == piece.dim && summand_multiplicity_with(f, local, k, &piece) == 1)
            .map(|(l, _, _)| l.clone());
        let label = match found {
            Some(l) => l,
            None => {
                let fingerprint: Vec<usize> = reps
                    .data
                    .iter()
                    .map(|d| hom_space(f, &d.projective_cover, &piece).len())
                    .collect();
                let label = format!("I{}{:?}", piece.dim, fingerprint);
                match LocalEnd::new(f, &piece) {
                    Ok(local) => {
                        if known.iter().any(|(l, _, _)| *l == label) {
                            label_collision = true;
                        }
                        let unique = if label_collision {
                            format!("{label}#{}", known.len())
                        } else {
                            label.clone()
                        };
                        known.push((unique.clone(), piece.clone(), local));
                        unique
                    }
                    Err(_) => {
                        complete = false;
                        label
                    }
                }
            }
        };
        *parts.entry(label).or_insert(0) += 1;
    }
    // Verification pass: dimensions and hom-rank profile against projectives.
    if dim_sum != m.dim {
        complete = false;
    }
    for d in &reps.data {
        let total = hom_space(f, &d.projective_cover, m).len();
        let summed: usize = summands
            .iter()
            .map(|incl| hom_space(f, &d.projective_cover, &m.restrict(f, incl)).len())
            .sum();
        if total != summed {
            complete = false;
        }
    }
    Ok(DecompositionReport {
        parts,
        complete,
        label_collision,
        summands,
    })
}
