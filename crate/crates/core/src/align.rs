//! Matching and self-learning.
//!
//! Similarities are oriented so that larger is better throughout: matching
//! takes row/column argmaxes and the objective is the mean row maximum.

use serde::{Deserialize, Serialize};

use crate::assoc::{self, apply_pipeline, AssocKind, AssocMatrix, Step, Transform, WordVectors};
use crate::cooc::CoocMatrix;
use crate::error::{Error, Result};
use crate::kernels::{self, DenseMatrix, Metric};

/// Hypothesized correspondence: `s[k]` in the source vocabulary is paired
/// with `t[k]` in the target vocabulary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchState {
    pub s: Vec<usize>,
    pub t: Vec<usize>,
    pub objective: f64,
}

impl MatchState {
    pub fn new(s: Vec<usize>, t: Vec<usize>) -> Result<Self> {
        if s.is_empty() || s.len() != t.len() {
            return Err(Error::validation(format!(
                "match needs equal nonempty index lists, got {} and {}",
                s.len(),
                t.len()
            )));
        }
        Ok(MatchState { s, t, objective: 0.0 })
    }

    /// Every index paired with itself.
    pub fn identity(n: usize) -> Self {
        MatchState {
            s: (0..n).collect(),
            t: (0..n).collect(),
            objective: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.s.iter().copied().zip(self.t.iter().copied())
    }

    fn check(&self, v1: usize, v2: usize) -> Result<()> {
        if self.s.is_empty() || self.s.len() != self.t.len() {
            return Err(Error::validation("match state must hold equal nonempty index lists"));
        }
        if let Some(&i) = self.s.iter().find(|&&i| i >= v1) {
            return Err(Error::validation(format!("source index {i} out of range for size {v1}")));
        }
        if let Some(&j) = self.t.iter().find(|&&j| j >= v2) {
            return Err(Error::validation(format!("target index {j} out of range for size {v2}")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClipSpec {
    pub lo: f64,
    pub hi: f64,
}

impl ClipSpec {
    pub const DEFAULT: ClipSpec = ClipSpec { lo: 1.0, hi: 99.0 };

    fn step(self) -> Step {
        Step::Clip {
            lo: self.lo,
            hi: self.hi,
        }
    }
}

/// Second stage: rebuild with the head dropped, then re-run self-learning
/// from the first stage's solution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stage2 {
    pub drop: usize,
    pub clip: Option<ClipSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlignConfig {
    pub csls_k: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub metric: Metric,
    pub stage2: Option<Stage2>,
}

impl Default for AlignConfig {
    fn default() -> Self {
        AlignConfig {
            csls_k: 10,
            max_iters: 100,
            tol: 1e-6,
            metric: Metric::Cosine,
            stage2: None,
        }
    }
}

impl AlignConfig {
    fn check(&self) -> Result<()> {
        if self.csls_k == 0 || self.max_iters == 0 || !(self.tol >= 0.0) {
            return Err(Error::validation("csls_k and max_iters must be >= 1 and tol >= 0"));
        }
        Ok(())
    }
}

/// Drop size used together with a truncation to `dim`: `min(20, ⌈20·dim/400⌉)`.
pub fn drop_for_dim(dim: usize) -> usize {
    (20 * dim).div_ceil(400).min(20)
}

fn topk_sum(buf: &mut [f64], k: usize) -> f64 {
    if k < buf.len() {
        buf.select_nth_unstable_by(k - 1, |a, b| b.total_cmp(a));
    }
    buf[..k].iter().sum()
}

fn topk_row_means(s: &DenseMatrix, k: usize) -> Vec<f64> {
    let mut buf = Vec::with_capacity(s.cols());
    s.row_iter()
        .map(|row| {
            buf.clear();
            buf.extend_from_slice(row);
            topk_sum(&mut buf, k) / k as f64
        })
        .collect()
}

fn topk_col_means(s: &DenseMatrix, k: usize) -> Vec<f64> {
    topk_row_means(&s.transpose(), k)
}

fn check_csls_k(s: &DenseMatrix, k: usize) -> Result<()> {
    if k == 0 || k > s.rows().min(s.cols()) {
        return Err(Error::validation(format!(
            "csls k = {k} must be in 1..={} for a {}x{} similarity matrix",
            s.rows().min(s.cols()),
            s.rows(),
            s.cols()
        )));
    }
    Ok(())
}

/// Cross-domain similarity local scaling: subtracts half the mean of the
/// `k` best similarities of the row and of the column.
pub fn csls(s: &DenseMatrix, k: usize) -> Result<DenseMatrix> {
    let mut out = s.clone();
    csls_in_place(&mut out, k)?;
    Ok(out)
}

pub fn csls_in_place(s: &mut DenseMatrix, k: usize) -> Result<()> {
    check_csls_k(s, k)?;
    let r = topk_row_means(s, k);
    let c = topk_col_means(s, k);
    for (i, ri) in r.iter().enumerate() {
        for (v, cj) in s.row_mut(i).iter_mut().zip(&c) {
            *v -= 0.5 * (ri + cj);
        }
    }
    Ok(())
}

fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (j, &v) in row.iter().enumerate().skip(1) {
        if v > row[best] {
            best = j;
        }
    }
    best
}

/// Forward argmax per row of `s`, lowest index on ties.
pub fn forward_argmax(s: &DenseMatrix) -> Vec<usize> {
    s.row_iter().map(argmax).collect()
}

/// Forward matches for every row followed by backward matches for every
/// column; always `rows + cols` pairs.
pub fn match_bidirectional(s: &DenseMatrix) -> MatchState {
    let (n, m) = s.shape();
    let fwd = forward_argmax(s);
    let mut back = vec![0usize; m];
    if n > 0 {
        let mut best: Vec<f64> = s.row(0).to_vec();
        for i in 1..n {
            for (j, &v) in s.row(i).iter().enumerate() {
                if v > best[j] {
                    best[j] = v;
                    back[j] = i;
                }
            }
        }
    }
    let s_idx = (0..n).chain(back).collect();
    let t_idx = fwd.into_iter().chain(0..m).collect();
    MatchState {
        s: s_idx,
        t: t_idx,
        objective: objective(s),
    }
}

/// Mean over rows of the row maximum.
pub fn objective(s: &DenseMatrix) -> f64 {
    if s.rows() == 0 || s.cols() == 0 {
        return 0.0;
    }
    let total: f64 = s
        .row_iter()
        .map(|r| r.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .sum();
    total / s.rows() as f64
}

/// Similarities between the rows of `x[:, s]` and `z[:, t]`.
///
/// Equal to `sim_matrix(x.select_cols(s), z.select_cols(t), metric)` but
/// computed as `(x · P) · zᵀ`, where `P` counts the pairs of the match, so
/// no `|V| × |s|` intermediate is formed.
pub fn selected_similarity(
    x: &DenseMatrix,
    s: &[usize],
    z: &DenseMatrix,
    t: &[usize],
    metric: Metric,
) -> DenseMatrix {
    assert_eq!(s.len(), t.len(), "match lists differ in length");
    if metric == Metric::NegL1 {
        return kernels::sim_matrix(&x.select_cols(s), &z.select_cols(t), metric);
    }
    let mut xp = DenseMatrix::zeros(x.rows(), z.cols());
    for i in 0..x.rows() {
        let src = x.row(i);
        let dst = xp.row_mut(i);
        for (&a, &b) in s.iter().zip(t) {
            dst[b] += src[a];
        }
    }
    let mut g = xp.matmul_t(z);
    drop(xp);
    if metric == Metric::Dot {
        return g;
    }
    let x_sq: Vec<f64> = x.row_iter().map(|r| s.iter().map(|&a| r[a] * r[a]).sum()).collect();
    let z_sq: Vec<f64> = z.row_iter().map(|r| t.iter().map(|&b| r[b] * r[b]).sum()).collect();
    match metric {
        Metric::Cosine => {
            let x_n: Vec<f64> = x_sq.iter().map(|v| v.sqrt()).collect();
            let z_n: Vec<f64> = z_sq.iter().map(|v| v.sqrt()).collect();
            for (i, &xi) in x_n.iter().enumerate() {
                for (v, &zj) in g.row_mut(i).iter_mut().zip(&z_n) {
                    *v = if xi > 0.0 && zj > 0.0 { *v / (xi * zj) } else { 0.0 };
                }
            }
        }
        Metric::NegL2 => kernels::neg_l2_from_gram(&mut g, &x_sq, &z_sq),
        Metric::Dot | Metric::NegL1 => unreachable!(),
    }
    g
}

/// Initial matching from sorted-row similarity profiles.
///
/// Rows of unequal width are compared on the shorter width, dropping the
/// largest sorted entries of the longer side.
pub fn unsupervised_init(x: &AssocMatrix, z: &AssocMatrix, cfg: &AlignConfig) -> Result<MatchState> {
    cfg.check()?;
    let width = x.data.cols().min(z.data.cols());
    let profile = |a: &DenseMatrix| {
        let sorted = kernels::sortrows(a);
        let sorted = if sorted.cols() > width {
            DenseMatrix::from_fn(sorted.rows(), width, |i, j| sorted.get(i, j))
        } else {
            sorted
        };
        kernels::normalize(&sorted)
    };
    let px = profile(&x.data);
    let pz = profile(&z.data);
    let mut sim = kernels::sim_matrix(&px, &pz, cfg.metric);
    drop((px, pz));
    let obj = objective(&sim);
    csls_in_place(&mut sim, cfg.csls_k)?;
    let mut state = match_bidirectional(&sim);
    state.objective = obj;
    Ok(state)
}

/// Result of a self-learning loop.
#[derive(Clone, Debug)]
pub struct SelfLearned {
    /// Best-objective matching visited.
    pub state: MatchState,
    /// Objective of every measurement, in order.
    pub trace: Vec<f64>,
}

fn self_learn(
    init: &MatchState,
    cfg: &AlignConfig,
    mut measure: impl FnMut(&MatchState) -> Result<DenseMatrix>,
) -> Result<SelfLearned> {
    let mut state = init.clone();
    let mut best: Option<MatchState> = None;
    let mut trace = Vec::new();
    for _ in 0..cfg.max_iters {
        let mut sim = measure(&state)?;
        let obj = objective(&sim);
        if !obj.is_finite() {
            return Err(Error::Numeric("self-learning objective is not finite".into()));
        }
        csls_in_place(&mut sim, cfg.csls_k)?;
        let mut next = match_bidirectional(&sim);
        next.objective = obj;
        trace.push(obj);
        let prev = best.as_ref().map(|b| b.objective);
        if prev.is_none_or(|p| obj > p) {
            best = Some(next.clone());
        }
        if prev.is_some_and(|p| obj - p < cfg.tol) {
            break;
        }
        state = next;
    }
    Ok(SelfLearned {
        state: best.expect("max_iters >= 1"),
        trace,
    })
}

/// Alternates measuring `sim(X[:, s], Z[:, t])` and re-matching under CSLS.
pub fn coocmap_selflearn(
    x: &AssocMatrix,
    z: &AssocMatrix,
    init: &MatchState,
    cfg: &AlignConfig,
) -> Result<SelfLearned> {
    cfg.check()?;
    init.check(x.data.cols(), z.data.cols())?;
    if x.data.rows() != x.data.cols() || z.data.rows() != z.data.cols() {
        return Err(Error::validation("coocmap self-learning needs square association matrices"));
    }
    self_learn(init, cfg, |st| {
        Ok(selected_similarity(&x.data, &st.s, &z.data, &st.t, cfg.metric))
    })
}

/// Vecmap loop outcome; `mapping` is the orthogonal map of the best state.
#[derive(Clone, Debug)]
pub struct VecmapLearned {
    pub state: MatchState,
    pub trace: Vec<f64>,
    pub mapping: DenseMatrix,
}

/// Alternates Procrustes on the matched rows and re-matching under CSLS.
/// Vectors are normalized first.
pub fn vecmap_selflearn(
    xv: &WordVectors,
    zv: &WordVectors,
    init: &MatchState,
    cfg: &AlignConfig,
) -> Result<VecmapLearned> {
    cfg.check()?;
    let x = kernels::normalize(&xv.data);
    let z = kernels::normalize(&zv.data);
    if x.cols() != z.cols() {
        return Err(Error::validation(format!(
            "vector dimensions differ: {} vs {}",
            x.cols(),
            z.cols()
        )));
    }
    init.check(x.rows(), z.rows())?;
    let map_for = |st: &MatchState| kernels::procrustes(&x.select_rows(&st.s), &z.select_rows(&st.t));
    let learned = self_learn(init, cfg, |st| {
        let w = map_for(st)?;
        Ok(kernels::sim_matrix(&x.matmul(&w), &z, Metric::Cosine))
    })?;
    // The best state was matched under the map of the state before it;
    // refit so the returned map is consistent with the returned matching.
    let mapping = map_for(&learned.state)?;
    Ok(VecmapLearned {
        state: learned.state,
        trace: learned.trace,
        mapping,
    })
}

/// Forward translations of every source row under a final CSLS measurement.
pub fn translate_indices(
    x: &AssocMatrix,
    z: &AssocMatrix,
    state: &MatchState,
    cfg: &AlignConfig,
) -> Result<Vec<usize>> {
    state.check(x.data.cols(), z.data.cols())?;
    let mut sim = selected_similarity(&x.data, &state.s, &z.data, &state.t, cfg.metric);
    csls_in_place(&mut sim, cfg.csls_k)?;
    Ok(forward_argmax(&sim))
}

/// Forward translations for the vector route: CSLS over `cos(X W, Z)`.
pub fn vecmap_translate_indices(
    xv: &WordVectors,
    zv: &WordVectors,
    mapping: &DenseMatrix,
    cfg: &AlignConfig,
) -> Result<Vec<usize>> {
    let x = kernels::normalize(&xv.data);
    let z = kernels::normalize(&zv.data);
    let mut sim = kernels::sim_matrix(&x.matmul(mapping), &z, Metric::Cosine);
    csls_in_place(&mut sim, cfg.csls_k)?;
    Ok(forward_argmax(&sim))
}

/// Initial matching for the vector route: vectors are normalized and
/// lifted to `(X Xᵀ)^½` before the sorted-profile comparison.
pub fn vecmap_init(xv: &WordVectors, zv: &WordVectors, cfg: &AlignConfig) -> Result<MatchState> {
    let lift = |v: &WordVectors| -> Result<AssocMatrix> {
        let normed = kernels::normalize(&v.data);
        Ok(AssocMatrix {
            data: kernels::psd_sqrt_gram(&normed)?,
            chain: vec![Transform::Normalize, Transform::PsdSqrtGram],
            vocab_digest: v.vocab_digest.clone(),
        })
    };
    let cosine = AlignConfig {
        metric: Metric::Cosine,
        ..cfg.clone()
    };
    unsupervised_init(&lift(xv)?, &lift(zv)?, &cosine)
}

/// Full coocmap configuration: association, optional truncation and clip
/// for stage 1, and the alignment settings (including stage 2).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoocmapConfig {
    pub assoc: AssocKind,
    pub trunc: Option<usize>,
    pub clip: Option<ClipSpec>,
    pub align: AlignConfig,
}

impl Default for CoocmapConfig {
    fn default() -> Self {
        CoocmapConfig {
            assoc: AssocKind::Coocmap,
            trunc: None,
            clip: None,
            align: AlignConfig::default(),
        }
    }
}

/// Objective trace of one stage.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageTrace {
    pub name: String,
    pub objectives: Vec<f64>,
}

/// Final state plus the association matrices it was learned on.
#[derive(Clone, Debug)]
pub struct CoocmapRun {
    pub state: MatchState,
    pub x: AssocMatrix,
    pub z: AssocMatrix,
    pub stages: Vec<StageTrace>,
}

impl CoocmapRun {
    pub fn translate(&self, cfg: &AlignConfig) -> Result<Vec<usize>> {
        translate_indices(&self.x, &self.z, &self.state, cfg)
    }
}

fn build_stage(base: &AssocMatrix, trunc: Option<usize>, tail: &[Step]) -> Result<AssocMatrix> {
    let steps: Vec<Step> = trunc.map(|r| Step::Trunc { r }).into_iter().chain(tail.iter().copied()).collect();
    apply_pipeline(base, &steps)
}

/// Runs the staged coocmap procedure.
///
/// Stage 1 learns on the (optionally truncated and clipped) association,
/// starting from `seed` or the unsupervised initialization. Stage 2, when
/// configured, rebuilds with the head dropped and continues from stage 1.
pub fn run_coocmap(
    c1: &CoocMatrix,
    c2: &CoocMatrix,
    cfg: &CoocmapConfig,
    seed: Option<&MatchState>,
) -> Result<CoocmapRun> {
    let cfg_align = &cfg.align;
    let base1 = cfg.assoc.build(c1)?;
    let base2 = cfg.assoc.build(c2)?;
    let stage1_tail: Vec<Step> = cfg.clip.map(ClipSpec::step).into_iter().collect();
    let x1 = build_stage(&base1, cfg.trunc, &stage1_tail)?;
    let z1 = build_stage(&base2, cfg.trunc, &stage1_tail)?;

    let init = match seed {
        Some(s) => s.clone(),
        None => unsupervised_init(&x1, &z1, cfg_align)?,
    };
    let first = coocmap_selflearn(&x1, &z1, &init, cfg_align)?;
    let mut stages = vec![StageTrace {
        name: "stage1".into(),
        objectives: first.trace,
    }];
    let Some(stage2) = cfg_align.stage2 else {
        return Ok(CoocmapRun {
            state: first.state,
            x: x1,
            z: z1,
            stages,
        });
    };
    drop((x1, z1));
    let tail: Vec<Step> = std::iter::once(Step::Drop { r: stage2.drop })
        .chain(stage2.clip.map(ClipSpec::step))
        .collect();
    let x2 = build_stage(&base1, cfg.trunc, &tail)?;
    let z2 = build_stage(&base2, cfg.trunc, &tail)?;
    drop((base1, base2));
    let second = coocmap_selflearn(&x2, &z2, &first.state, cfg_align)?;
    stages.push(StageTrace {
        name: "stage2".into(),
        objectives: second.trace,
    });
    Ok(CoocmapRun {
        state: second.state,
        x: x2,
        z: z2,
        stages,
    })
}

/// Vector-route outcome with forward translations.
#[derive(Clone, Debug)]
pub struct VecmapRun {
    pub state: MatchState,
    pub mapping: DenseMatrix,
    pub stages: Vec<StageTrace>,
    pub translations: Vec<usize>,
}

/// Vecmap from `seed` or its own unsupervised initialization.
pub fn run_vecmap(
    xv: &WordVectors,
    zv: &WordVectors,
    cfg: &AlignConfig,
    seed: Option<&MatchState>,
) -> Result<VecmapRun> {
    let init = match seed {
        Some(s) => s.clone(),
        None => vecmap_init(xv, zv, cfg)?,
    };
    let learned = vecmap_selflearn(xv, zv, &init, cfg)?;
    let translations = vecmap_translate_indices(xv, zv, &learned.mapping, cfg)?;
    Ok(VecmapRun {
        state: learned.state,
        mapping: learned.mapping,
        stages: vec![StageTrace {
            name: "vecmap".into(),
            objectives: learned.trace,
        }],
        translations,
    })
}

/// Association matrices for the coocmap-on-vectors route.
pub fn vectors_assoc(xv: &WordVectors, clip: Option<ClipSpec>) -> Result<AssocMatrix> {
    let a = assoc::assoc_from_vectors(xv)?;
    let steps: Vec<Step> = clip.map(ClipSpec::step).into_iter().collect();
    apply_pipeline(&a, &steps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> DenseMatrix {
        DenseMatrix::from_rows(rows).unwrap()
    }

    fn assoc(data: DenseMatrix) -> AssocMatrix {
        AssocMatrix {
            data,
            chain: vec![Transform::Normalize],
            vocab_digest: String::new(),
        }
    }

    #[test]
    fn csls_examples() {
        let out = csls(&DenseMatrix::identity(2), 1).unwrap();
        assert_eq!(out, m(&[&[0.0, -1.0], &[-1.0, 0.0]]));
        assert_eq!(csls(&m(&[&[3.5]]), 1).unwrap(), m(&[&[0.0]]));

        let s = m(&[&[0.3, 0.9, -0.2], &[0.5, 0.1, 0.4]]);
        let shifted = s.map(|v| v + 2.75);
        assert!(csls(&s, 2).unwrap().max_abs_diff(&csls(&shifted, 2).unwrap()) < 1e-12);

        assert!(csls(&s, 0).is_err());
        assert!(csls(&s, 3).is_err());
    }

    #[test]
    fn match_examples() {
        let st = match_bidirectional(&m(&[&[0.9, 0.1], &[0.2, 0.8]]));
        assert_eq!(st.s, vec![0, 1, 0, 1]);
        assert_eq!(st.t, vec![0, 1, 0, 1]);

        let st = match_bidirectional(&DenseMatrix::from_fn(3, 3, |i, j| if i == j { 1.0 } else { 0.1 }));
        assert_eq!(st.len(), 6);
        assert!(st.pairs().all(|(a, b)| a == b));

        let st = match_bidirectional(&DenseMatrix::from_fn(2, 3, |_, _| 0.5));
        assert_eq!(st.s, vec![0, 1, 0, 0, 0]);
        assert_eq!(st.t, vec![0, 0, 0, 1, 2]);
    }

    #[test]
    fn objective_examples() {
        assert_eq!(objective(&m(&[&[1.0, 0.0], &[0.0, 0.5]])), 0.75);
        assert_eq!(objective(&DenseMatrix::from_fn(3, 2, |_, _| -0.25)), -0.25);
        assert_eq!(objective(&m(&[&[0.0, 0.5], &[1.0, 0.0]])), 0.75);
    }

    #[test]
    fn drop_schedule() {
        assert_eq!(drop_for_dim(100), 5);
        assert_eq!(drop_for_dim(300), 15);
        assert_eq!(drop_for_dim(400), 20);
        assert_eq!(drop_for_dim(5000), 20);
        assert_eq!(drop_for_dim(10), 1);
    }

    #[test]
    fn selected_similarity_matches_explicit_columns() {
        let x = DenseMatrix::from_fn(5, 5, |i, j| ((i * 3 + j * 7) % 11) as f64 / 11.0 - 0.3);
        let z = DenseMatrix::from_fn(4, 4, |i, j| ((i * 5 + j * 2) % 7) as f64 / 7.0 - 0.4);
        let s = [0, 4, 4, 2, 1];
        let t = [3, 0, 1, 1, 2];
        for metric in [Metric::Cosine, Metric::Dot, Metric::NegL2, Metric::NegL1] {
            let fast = selected_similarity(&x, &s, &z, &t, metric);
            let slow = kernels::sim_matrix(&x.select_cols(&s), &z.select_cols(&t), metric);
            assert!(fast.max_abs_diff(&slow) < 1e-12, "{metric:?}");
        }
    }

    #[test]
    fn sortrow_init_recovers_identity_on_equal_inputs() {
        let x = assoc(kernels::normalize(&DenseMatrix::from_fn(6, 6, |i, j| {
            ((i * 13 + j * 7 + i * j) % 17) as f64
        })));
        let st = unsupervised_init(&x, &x, &AlignConfig { csls_k: 2, ..Default::default() }).unwrap();
        assert!((0..6).all(|i| st.t[i] == i));
    }

    #[test]
    fn unequal_widths_compare_on_shorter() {
        let x = assoc(DenseMatrix::from_fn(4, 4, |i, j| (i * 4 + j) as f64));
        let z = assoc(DenseMatrix::from_fn(3, 3, |i, j| (i * 3 + j) as f64));
        let st = unsupervised_init(&x, &z, &AlignConfig { csls_k: 1, ..Default::default() }).unwrap();
        assert_eq!(st.len(), 7);
    }

    #[test]
    fn selflearn_on_identical_inputs_is_identity() {
        let x = assoc(kernels::normalize(&DenseMatrix::from_fn(8, 8, |i, j| {
            ((i + 1) * (j + 2) % 9) as f64 + if i == j { 3.0 } else { 0.0 }
        })));
        let cfg = AlignConfig { csls_k: 3, ..Default::default() };
        let out = coocmap_selflearn(&x, &x, &MatchState::identity(8), &cfg).unwrap();
        assert!(out.state.pairs().all(|(a, b)| a == b));
        assert!((out.state.objective - 1.0).abs() < 1e-9);
        let one = coocmap_selflearn(&x, &x, &MatchState::identity(8), &AlignConfig { max_iters: 1, ..cfg.clone() }).unwrap();
        assert_eq!(one.trace.len(), 1);
        assert!(coocmap_selflearn(&x, &x, &MatchState::new(vec![9], vec![0]).unwrap(), &cfg).is_err());
    }

    #[test]
    fn vecmap_identity_and_scalar() {
        let xv = WordVectors {
            data: DenseMatrix::from_fn(7, 3, |i, j| ((i * 5 + j * 3) % 7) as f64 - 2.5 + j as f64 * 0.1),
            vocab_digest: String::new(),
        };
        let cfg = AlignConfig { csls_k: 2, ..Default::default() };
        let out = vecmap_selflearn(&xv, &xv, &MatchState::identity(7), &cfg).unwrap();
        assert!(out.mapping.max_abs_diff(&DenseMatrix::identity(3)) < 1e-8);

        let xs = WordVectors {
            data: DenseMatrix::from_fn(5, 1, |i, _| i as f64 - 1.5),
            vocab_digest: String::new(),
        };
        let zs = WordVectors {
            data: xs.data.map(|v| -v),
            vocab_digest: String::new(),
        };
        let out = vecmap_selflearn(&xs, &zs, &MatchState::identity(5), &cfg).unwrap();
        assert!((out.mapping.get(0, 0).abs() - 1.0).abs() < 1e-12);
    }
}
