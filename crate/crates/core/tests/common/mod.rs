#![allow(dead_code)]

use std::collections::HashSet;
use std::path::PathBuf;

use frobsig::config::RunConfig;
use frobsig::equivmod::{compose, graded_hom, standard_module, GradedEquivariantModule};
use frobsig::gf::{Fe, Field, Matrix};
use frobsig::groupscheme::GroupScheme;
use frobsig::modrep::KGModule;

pub fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

pub fn load(name: &str) -> (RunConfig, GroupScheme) {
    let cfg = RunConfig::load(&config_path(name)).expect("config loads");
    let g = cfg.group().expect("group builds");
    (cfg, g)
}

/// The representation on the generators: `M ⊗_S k`, keeping only the
/// constant terms of the action entries.
pub fn generator_module(m: &GradedEquivariantModule) -> KGModule {
    let n = m.rank();
    let zero = vec![0u32; m.nvars()];
    let action = m
        .action()
        .iter()
        .map(|cols| {
            let mut a = Matrix::zeros(n, n);
            for (j, col) in cols.iter().enumerate() {
                for (i, poly) in col {
                    a[(*i, j)] = poly.coefficient(&zero);
                }
            }
            a
        })
        .collect();
    KGModule::new(n, action)
}

/// `a` with `x − a·I` nilpotent, when unique.
fn residue_scalar(f: &Field, x: &Matrix) -> Fe {
    let n = x.rows();
    let found: Vec<Fe> = f
        .elements()
        .into_iter()
        .filter(|&a| {
            let y = x.sub(f, &Matrix::identity(n).scale(f, a));
            y.pow(f, n as u64).is_zero()
        })
        .collect();
    assert_eq!(found.len(), 1, "endomorphism is not scalar modulo nilpotents");
    found[0]
}

/// Rank of a matrix by counting the distinct vectors of its row space.
pub fn rank_by_enumeration(f: &Field, rows: &[Vec<Fe>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let elements: Vec<Fe> = f.elements().collect();
    let q = elements.len();
    let width = rows[0].len();
    let mut span: HashSet<Vec<Fe>> = HashSet::new();
    span.insert(vec![Fe::default(); width]);
    for r in rows {
        let current: Vec<Vec<Fe>> = span.iter().cloned().collect();
        for v in current {
            for &c in &elements[1..] {
                let w: Vec<Fe> = v.iter().zip(r).map(|(&a, &b)| f.add(a, f.mul(c, b))).collect();
                span.insert(w);
            }
        }
    }
    let mut size = span.len();
    let mut k = 0;
    while size > 1 {
        assert_eq!(size % q, 0);
        size /= q;
        k += 1;
    }
    k
}

/// Summand count of `P ⊗ S(c)` in `m` (summed over shifts) from whole graded
/// hom spaces in both directions and their actual composites. Only valid for
/// `P` whose endomorphisms are scalars modulo nilpotents.
pub fn brute_force_count(f: &Field, gens: &[Matrix], p: &KGModule, weight: Vec<u64>, m: &GradedEquivariantModule) -> usize {
    let mut total = 0;
    for c in m.generator_degrees() {
        let src = standard_module(p, c, weight.clone(), m.nvars(), m.diag());
        let zero = frobsig::equivmod::Degree::from_integer(0);
        let into = graded_hom(f, gens, &src, m, zero).unwrap();
        let out = graded_hom(f, gens, m, &src, zero).unwrap();
        if into.is_empty() || out.is_empty() {
            continue;
        }
        let rows: Vec<Vec<Fe>> = into
            .iter()
            .map(|phi| {
                out.iter()
                    .map(|psi| {
                        let comp = compose(f, phi, psi, &src).unwrap();
                        let n = p.dim;
                        let mut x = Matrix::zeros(n, n);
                        for (j, img) in comp.images.iter().enumerate() {
                            let slice = &comp.slices[j];
                            for (u, (k, mu)) in slice.entries.iter().enumerate() {
                                assert!(mu.iter().all(|&a| a == 0));
                                x[(*k, j)] = img[u];
                            }
                        }
                        residue_scalar(f, &x)
                    })
                    .collect()
            })
            .collect();
        total += rank_by_enumeration(f, &rows);
    }
    total
}

/// `#{a ∈ [0,n)^d : |a| even}` and the odd count.
pub fn parity_counts(n: u64, d: u32) -> (u64, u64) {
    let mut even = 0u64;
    let total = n.pow(d);
    for code in 0..total {
        let mut c = code;
        let mut s = 0;
        for _ in 0..d {
            s += c % n;
            c /= n;
        }
        if s % 2 == 0 {
            even += 1;
        }
    }
    (even, total - even)
}
