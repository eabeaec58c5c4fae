//! Predicted Frobenius limits and F-signatures, measured summand counts, and
//! the search for a split copy of the regular representation in low degrees.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::diagmu::{class_label, veronese_summand_counts};
use crate::equivmod::{frobenius_pushforward, standard_module, summand_count, Degree, StandardLabel, DEFAULT_RANK_MAX};
use crate::error::{Error, Result};
use crate::gf::{rank, solve, Fe, Matrix};
use crate::groupscheme::{DiagPart, GroupScheme};
use crate::modrep::{hom_space, simples_and_projective_covers, KGModule, RepresentationData};
use crate::polyring::degree_module;

pub const CSV_HEADER: &str = "config_hash,e,label,shift_count_breakdown,count,normalized,predicted,deviation";

#[derive(Clone, Debug, Serialize)]
pub struct LabelPrediction {
    pub label: String,
    pub simple_dim: usize,
    pub end_dim: usize,
    /// Coefficient in the Frobenius limit of `^e(L^G)`.
    pub fl_coefficient: f64,
    /// Generalized F-signature `s(M_label, A)`.
    pub s_value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Prediction {
    pub group_order: u64,
    pub linearly_reductive: bool,
    pub rank: usize,
    /// `s(A)`.
    pub s_a: f64,
    /// Coefficient of the full class of `S` viewed over `A`: `rank / dim k[G]`.
    pub fl_total: f64,
    pub labels: Vec<LabelPrediction>,
}

fn gate(group: &GroupScheme) -> Result<()> {
    let report = group.is_small();
    match report.witness {
        Some(w) if !report.small => Err(Error::NotSmall { witness: w.to_string() }),
        _ => Ok(()),
    }
}

/// One measurable label: a standard module `P ⊗ S` with generator weight, and
/// its predicted normalized count.
#[derive(Clone, Debug)]
struct Target {
    name: String,
    standard: Option<StandardLabel>,
    class: Option<Vec<u64>>,
    module_rank: usize,
    prediction: LabelPrediction,
}

/// Everything needed to measure one configuration.
pub struct Pipeline {
    group: GroupScheme,
    source: KGModule,
    rank_max: usize,
    slice_max: usize,
    reps: Option<RepresentationData>,
    targets: Vec<Target>,
    prediction: Prediction,
}

fn all_weights(orders: &[u64]) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for &n in orders {
        out = out
            .into_iter()
            .flat_map(|c: Vec<u64>| {
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

fn negate(w: &[u64], orders: &[u64]) -> Vec<u64> {
    w.iter().zip(orders).map(|(&x, &n)| (n - x) % n).collect()
}

impl Pipeline {
    /// `source` is the representation `U` with `L = U ⊗ S`.
    pub fn new(group: GroupScheme, source: KGModule, slice_max: usize) -> Result<Pipeline> {
        gate(&group)?;
        Pipeline::without_smallness_gate(group, source, slice_max)
    }

    /// Counting itself does not need smallness; only the predictions do.
    pub fn without_smallness_gate(group: GroupScheme, source: KGModule, slice_max: usize) -> Result<Pipeline> {
        let f = group.field().clone();
        let order = group.order();
        let lr = group.is_linearly_reductive();
        let rank = source.dim;
        let diag = group.diag().clone();
        let weights = all_weights(&diag.orders);
        let mu_order = diag.order();
        let mut targets = Vec::new();
        let reps = if group.constant().order() > 1 || group.is_constant_only() {
            Some(simples_and_projective_covers(&f, group.constant())?)
        } else {
            None
        };
        let name_with_class = |base: &str, w: &[u64]| -> String {
            if diag.is_empty() {
                base.to_string()
            } else if base.is_empty() {
                class_label(&negate(w, &diag.orders))
            } else {
                format!("{base}@{}", class_label(&negate(w, &diag.orders)))
            }
        };
        match &reps {
            Some(reps) => {
                for w in &weights {
                    for d in &reps.data {
                        let base = if d.is_projective_simple() {
                            d.label.clone()
                        } else {
                            format!("P_{}", d.label)
                        };
                        let s = d.simple.dim as f64 / (order as f64 * d.end_dim as f64);
                        let name = name_with_class(&base, w);
                        targets.push(Target {
                            name: name.clone(),
                            standard: Some(StandardLabel::new(&f, &name, d.projective_cover.clone(), w.clone())?),
                            class: None,
                            module_rank: d.projective_cover.dim,
                            prediction: LabelPrediction {
                                label: name,
                                simple_dim: d.simple.dim,
                                end_dim: d.end_dim,
                                fl_coefficient: rank as f64 * s,
                                s_value: s,
                            },
                        });
                    }
                    if !lr {
                        let name = name_with_class("S", w);
                        let ngens = group.constant().generators().len();
                        targets.push(Target {
                            name: name.clone(),
                            standard: Some(StandardLabel::new(&f, &name, KGModule::trivial(ngens), w.clone())?),
                            class: None,
                            module_rank: 1,
                            prediction: LabelPrediction {
                                label: name,
                                simple_dim: 1,
                                end_dim: 1,
                                fl_coefficient: 0.0,
                                s_value: 0.0,
                            },
                        });
                    }
                }
            }
            None => {
                if rank != 1 {
                    return Err(Error::Unsupported(
                        "diagonalizable descriptors are measured on L = S only".into(),
                    ));
                }
                for w in &weights {
                    let chi = negate(w, &diag.orders);
                    let name = class_label(&chi);
                    let s = 1.0 / mu_order as f64;
                    targets.push(Target {
                        name: name.clone(),
                        standard: None,
                        class: Some(chi),
                        module_rank: 1,
                        prediction: LabelPrediction {
                            label: name,
                            simple_dim: 1,
                            end_dim: 1,
                            fl_coefficient: s,
                            s_value: s,
                        },
                    });
                }
            }
        }
        targets.sort_by(|a, b| a.name.cmp(&b.name));
        let prediction = Prediction {
            group_order: order,
            linearly_reductive: lr,
            rank,
            s_a: if lr { 1.0 / order as f64 } else { 0.0 },
            fl_total: rank as f64 / order as f64,
            labels: targets.iter().map(|t| t.prediction.clone()).collect(),
        };
        Ok(Pipeline {
            group,
            source,
            rank_max: DEFAULT_RANK_MAX,
            slice_max,
            reps,
            targets,
            prediction,
        })
    }

    pub fn prediction(&self) -> &Prediction {
        &self.prediction
    }

    pub fn group(&self) -> &GroupScheme {
        &self.group
    }

    pub fn representation_data(&self) -> Option<&RepresentationData> {
        self.reps.as_ref()
    }

    pub fn with_rank_max(mut self, cap: usize) -> Self {
        self.rank_max = cap;
        self
    }

    /// Summand counts of `^e L` for one `e`.
    pub fn measure_e(&self, e: u32) -> Result<LevelResult> {
        let start = Instant::now();
        let f = self.group.field();
        let d = self.group.dim();
        let p = f.p();
        let denom = (p as f64).powi((e as usize * d) as i32);
        let mut rows = Vec::new();
        let mut accounted = 0u64;
        let pushforward_rank;
        if self.reps.is_none() {
            let counts = veronese_summand_counts(self.group.diag(), p, d, e)?;
            pushforward_rank = counts.denominator() as usize;
            for t in &self.targets {
                let count = counts.counts[t.class.as_ref().unwrap()];
                accounted += count;
                rows.push(LevelRow::new(e, t, BTreeMap::new(), count, denom));
            }
        } else {
            let gens = self.group.constant().generators();
            let diag: DiagPart = self.group.diag().clone();
            let zero = vec![0u64; diag.orders.len()];
            let l = standard_module(&self.source, Degree::from_integer(0), zero, d, &diag).with_slice_max(self.slice_max);
            let pf = frobenius_pushforward(f, gens, &l, e, self.rank_max)?;
            pushforward_rank = pf.rank();
            for t in &self.targets {
                let c = summand_count(f, gens, t.standard.as_ref().unwrap(), &pf)?;
                accounted += c.total as u64 * t.module_rank as u64;
                rows.push(LevelRow::new(e, t, c.per_shift.iter().map(|(k, v)| (*k, *v)).collect(), c.total as u64, denom));
            }
        }
        if accounted > pushforward_rank as u64 {
            return Err(Error::Verification(format!(
                "summands account for rank {accounted} > {pushforward_rank} at e = {e}"
            )));
        }
        Ok(LevelResult {
            e,
            rows,
            pushforward_rank,
            accounted_rank: accounted as usize,
            complete: accounted as usize == pushforward_rank,
            elapsed_ms: start.elapsed().as_millis() as u64,
        })
    }

    /// Measures `e = 1..=e_max` concurrently on at most `threads` workers.
    /// A resource-cap failure truncates the report to the levels before it.
    pub fn measure(&self, e_max: u32, threads: usize, config_hash: &str) -> Result<FSigReport> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .map_err(|e| Error::Verification(format!("thread pool: {e}")))?;
        let results: Vec<Result<LevelResult>> =
            pool.install(|| (1..=e_max).into_par_iter().map(|e| self.measure_e(e)).collect());
        let mut levels = Vec::new();
        let mut partial = None;
        for r in results {
            match r {
                Ok(l) if partial.is_none() => levels.push(l),
                Ok(_) => {}
                Err(Error::ResourceCap(msg)) => {
                    partial.get_or_insert(msg);
                }
                Err(e) => return Err(e),
            }
        }
        let mut trends = BTreeMap::new();
        for t in &self.targets {
            let devs: Vec<f64> = levels
                .iter()
                .flat_map(|l| l.rows.iter().filter(|r| r.label == t.name).map(|r| r.deviation))
                .collect();
            trends.insert(t.name.clone(), Trend::from_deviations(&devs));
        }
        let smallness = self.group.is_small();
        Ok(FSigReport {
            config_hash: config_hash.to_string(),
            prediction: self.prediction.clone(),
            levels,
            trends,
            small: smallness.small,
            factorwise: smallness.factorwise,
            e0: self.group.infinitesimal_e0(),
            partial,
        })
    }
}

/// Predictions without measuring; refuses non-small actions.
pub fn predict(group: &GroupScheme, source: &KGModule) -> Result<Prediction> {
    Ok(Pipeline::new(group.clone(), source.clone(), crate::equivmod::DEFAULT_SLICE_MAX)?.prediction)
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelRow {
    pub e: u32,
    pub label: String,
    #[serde(skip)]
    pub per_shift: BTreeMap<Degree, usize>,
    pub shift_count_breakdown: String,
    pub count: u64,
    pub normalized: f64,
    pub predicted: f64,
    pub deviation: f64,
}

impl LevelRow {
    fn new(e: u32, t: &Target, per_shift: BTreeMap<Degree, usize>, count: u64, denom: f64) -> LevelRow {
        let normalized = count as f64 / denom;
        let predicted = t.prediction.fl_coefficient;
        let breakdown = per_shift
            .iter()
            .map(|(k, v)| format!("{}:{}", crate::equivmod::format_degree(k), v))
            .collect::<Vec<_>>()
            .join(";");
        LevelRow {
            e,
            label: t.name.clone(),
            per_shift,
            shift_count_breakdown: breakdown,
            count,
            normalized,
            predicted,
            deviation: (normalized - predicted).abs(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelResult {
    pub e: u32,
    pub rows: Vec<LevelRow>,
    pub pushforward_rank: usize,
    /// `Σ count · rank(label module)`.
    pub accounted_rank: usize,
    pub complete: bool,
    pub elapsed_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trend {
    pub non_increasing: bool,
    pub endpoint_improves: bool,
}

impl Trend {
    fn from_deviations(d: &[f64]) -> Trend {
        const EPS: f64 = 1e-12;
        Trend {
            non_increasing: d.windows(2).all(|w| w[1] <= w[0] + EPS),
            endpoint_improves: d.len() >= 2 && d[d.len() - 1] < d[0] - EPS,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FSigReport {
    pub config_hash: String,
    pub prediction: Prediction,
    pub levels: Vec<LevelResult>,
    pub trends: BTreeMap<String, Trend>,
    pub small: bool,
    pub factorwise: bool,
    pub e0: u32,
    /// Set when a resource cap cut the e-range short.
    pub partial: Option<String>,
}

impl FSigReport {
    pub fn rows(&self) -> impl Iterator<Item = &LevelRow> {
        self.levels.iter().flat_map(|l| l.rows.iter())
    }

    pub fn row(&self, e: u32, label: &str) -> Option<&LevelRow> {
        self.rows().find(|r| r.e == e && r.label == label)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in self.rows() {
            out.push_str(&format!(
                "{},{},{},{},{},{:.6},{:.6},{:.6}\n",
                self.config_hash, r.e, r.label, r.shift_count_breakdown, r.count, r.normalized, r.predicted, r.deviation
            ));
        }
        out
    }

    /// The flat JSON table: one object per `(e, label)` with the CSV fields.
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .rows()
            .map(|r| {
                serde_json::json!({
                    "config_hash": self.config_hash,
                    "e": r.e,
                    "label": r.label,
                    "shift_count_breakdown": r.shift_count_breakdown,
                    "count": r.count,
                    "normalized": r.normalized,
                    "predicted": r.predicted,
                    "deviation": r.deviation,
                })
            })
            .collect();
        serde_json::json!({ "rows": rows, "report": self })
    }
}

/// A split embedding `kG → ⊕_{i ≤ r} S_i` with its retraction.
#[derive(Clone, Debug, Serialize)]
pub struct RegularSummand {
    pub found: bool,
    pub degree_cap: usize,
    /// Smallest `r` at which the search succeeded.
    pub degree: Option<usize>,
    /// Rank of the embedding's component in each `S_i`.
    pub image_ranks: Vec<usize>,
    #[serde(skip)]
    pub embedding: Option<Matrix>,
    #[serde(skip)]
    pub retraction: Option<Matrix>,
    pub verified: bool,
}

/// Searches `⊕_{i=0}^{r} S_i` for a copy of `kG` with an equivariant retraction.
///
/// An embedding is `ι_v(g) = g·v` for some `v`; the compositions `π∘ι_v` over
/// all `π ∈ Hom_G(M, kG)` form a left ideal of `End_G(kG)`, which contains the
/// identity exactly when it has full dimension `|G|`.
pub fn find_regular_summand(group: &GroupScheme, r: usize) -> Result<RegularSummand> {
    if !group.is_constant_only() {
        return Err(Error::Unsupported("regular summand search needs a constant group".into()));
    }
    let f = group.field();
    let grp = group.constant();
    let n = grp.order();
    let reg = KGModule::regular(grp);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut pieces: Vec<KGModule> = Vec::new();
    for deg in 0..=r {
        pieces.push(degree_module(group, deg).as_module());
        let m = pieces[1..].iter().fold(pieces[0].clone(), |acc, p| acc.direct_sum(p));
        let images = m.element_images(f, grp);
        let out_of = hom_space(f, &m, &reg);
        if out_of.is_empty() {
            continue;
        }
        let embedding_for = |v: &[Fe]| -> Matrix {
            let cols: Vec<Vec<Fe>> = (0..n).map(|g| images[g].mul_vec(f, v)).collect();
            Matrix::from_columns(m.dim, &cols)
        };
        let mut candidates: Vec<Vec<Fe>> = Vec::new();
        // Deterministic first: all-ones, then each degree block's last monomial.
        candidates.push(vec![f.one(); m.dim]);
        let mut offset = 0;
        for p in &pieces {
            let mut v = vec![Fe::ZERO; m.dim];
            for v_i in v.iter_mut().take(offset + p.dim).skip(offset) {
                *v_i = f.one();
            }
            candidates.push(v);
            offset += p.dim;
        }
        for _ in 0..256 {
            candidates.push((0..m.dim).map(|_| f.from_index(rng.gen_range(0..f.q() as i64)).expect("index below q")).collect());
        }
        for v in candidates {
            let iota = embedding_for(&v);
            let comps: Vec<Matrix> = out_of.iter().map(|pi| pi.mul(f, &iota)).collect();
            let flat: Vec<Vec<Fe>> = comps.iter().map(Matrix::flatten).collect();
            if rank(f, &Matrix::from_columns(n * n, &flat)) < n {
                continue;
            }
            let a = Matrix::from_columns(n * n, &flat);
            let target = Matrix::new(n * n, 1, Matrix::identity(n).flatten());
            let Some(c) = solve(f, &a, &target) else {
                continue;
            };
            let mut pi = Matrix::zeros(n, m.dim);
            for (k, p) in out_of.iter().enumerate() {
                pi = pi.add(f, &p.scale(f, c[(k, 0)]));
            }
            let verified = pi.mul(f, &iota) == Matrix::identity(n)
                && (0..m.ngens()).all(|s| {
                    m.action[s].mul(f, &iota) == iota.mul(f, &reg.action[s])
                        && pi.mul(f, &m.action[s]) == reg.action[s].mul(f, &pi)
                });
            if !verified {
                return Err(Error::Verification("regular summand retraction check failed".into()));
            }
            let mut image_ranks = Vec::new();
            let mut offset = 0;
            for p in &pieces {
                let rows: Vec<usize> = (offset..offset + p.dim).collect();
                image_ranks.push(rank(f, &iota.select_rows(&rows)));
                offset += p.dim;
            }
            return Ok(RegularSummand {
                found: true,
                degree_cap: r,
                degree: Some(deg),
                image_ranks,
                embedding: Some(iota),
                retraction: Some(pi),
                verified,
            });
        }
    }
    Ok(RegularSummand {
        found: false,
        degree_cap: r,
        degree: None,
        image_ranks: Vec::new(),
        embedding: None,
        retraction: None,
        verified: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::Field;
    use crate::groupscheme::DEFAULT_ELEMENT_CAP;

    fn group(p: u32, gens: &[Vec<Vec<i64>>], d: usize) -> GroupScheme {
        let f = Field::prime(p).unwrap();
        let g = gens.iter().map(|x| Matrix::from_ints(&f, x)).collect();
        GroupScheme::new(f, d, g, DiagPart::default(), DEFAULT_ELEMENT_CAP).unwrap()
    }

    fn s_source(g: &GroupScheme) -> KGModule {
        KGModule::trivial(g.constant().generators().len())
    }

    #[test]
    fn veronese_prediction() {
        let g = group(3, &[vec![vec![-1, 0], vec![0, -1]]], 2);
        let pr = predict(&g, &s_source(&g)).unwrap();
        assert_eq!(pr.s_a, 0.5);
        assert!(pr.labels.iter().all(|l| l.fl_coefficient == 0.5));
    }

    #[test]
    fn z3_prediction() {
        let g = group(2, &[vec![vec![0, 1], vec![1, 1]]], 2);
        let pr = predict(&g, &s_source(&g)).unwrap();
        let s: Vec<f64> = pr.labels.iter().map(|l| l.s_value).collect();
        assert!(s.iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-12));
    }

    #[test]
    fn unipotent_prediction() {
        let g = group(2, &[vec![vec![1, 1, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 1], vec![0, 0, 0, 1]]], 4);
        let pr = predict(&g, &s_source(&g)).unwrap();
        assert_eq!(pr.s_a, 0.0);
        assert_eq!(pr.fl_total, 0.5);
        let free = pr.labels.iter().find(|l| l.label == "S").unwrap();
        assert_eq!(free.fl_coefficient, 0.0);
    }

    #[test]
    fn non_small_refused() {
        let g = group(3, &[vec![vec![-1, 0], vec![0, 1]]], 2);
        assert!(matches!(predict(&g, &s_source(&g)), Err(Error::NotSmall { .. })));
    }

    #[test]
    fn veronese_measure() {
        let g = group(3, &[vec![vec![-1, 0], vec![0, -1]]], 2);
        let p = Pipeline::new(g.clone(), s_source(&g), 5000).unwrap();
        let r = p.measure(2, 2, "h").unwrap();
        assert_eq!(r.row(1, "triv").unwrap().count, 5);
        assert_eq!(r.row(2, "triv").unwrap().count, 41);
        assert_eq!(r.row(2, "V1").unwrap().count, 40);
        assert!(r.levels.iter().all(|l| l.complete));
        assert!(r.trends["triv"].endpoint_improves);
    }

    #[test]
    fn mu2_measure_exact() {
        let f = Field::prime(2).unwrap();
        let diag = DiagPart::new(vec![2], vec![vec![1], vec![1]], 2).unwrap();
        let g = GroupScheme::new(f, 2, vec![], diag, 10).unwrap();
        let p = Pipeline::new(g, KGModule::trivial(0), 5000).unwrap();
        let r = p.measure(3, 1, "h").unwrap();
        assert!(r.rows().all(|x| x.deviation == 0.0));
    }

    #[test]
    fn regular_summand_examples() {
        let g = group(3, &[vec![vec![-1, 0], vec![0, -1]]], 2);
        let found = find_regular_summand(&g, 1).unwrap();
        assert!(found.found && found.verified);
        assert_eq!(found.image_ranks, vec![1, 1]);
        let t = group(2, &[], 2);
        let found = find_regular_summand(&t, 0).unwrap();
        assert_eq!(found.degree, Some(0));
        let u = group(2, &[vec![vec![1, 1, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 1], vec![0, 0, 0, 1]]], 4);
        let found = find_regular_summand(&u, 1).unwrap();
        assert_eq!(found.degree, Some(1));
        assert_eq!(found.image_ranks[1], 2);
    }
}
