//! Named pipelines and the dispatcher that runs them.

use serde::{Deserialize, Serialize};

use crate::align::{self, AlignConfig, ClipSpec, CoocmapConfig, MatchState, Stage2, StageTrace};
use crate::assoc::{self, AssocKind, WordVectors};
use crate::cooc::CoocMatrix;
use crate::error::{Error, Result};
use crate::kernels::Metric;

/// Default stage-2 drop.
pub const DEFAULT_DROP: usize = 20;
/// Default vector dimension for the SVD-vector route.
pub const DEFAULT_SVD_DIM: usize = 300;

const CLIP: ClipSpec = ClipSpec::DEFAULT;
const CLIP_15: ClipSpec = ClipSpec { lo: 1.5, hi: 98.5 };

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Association matrices from counts, unsupervised start.
    Coocmap,
    /// Association matrices from counts, seeded with the true dictionary.
    DictInit,
    /// Vecmap on truncated SVD vectors of `C^∘½`.
    VecmapRaw,
    /// Vecmap on imported vectors.
    VecmapVectors,
    /// Coocmap on `normalize((X Xᵀ)^½)` of imported vectors.
    CoocmapVectors,
}

impl Method {
    pub fn needs_vectors(self) -> bool {
        matches!(self, Method::VecmapVectors | Method::CoocmapVectors)
    }

    pub fn needs_seed(self) -> bool {
        self == Method::DictInit
    }
}

/// Fully resolved pipeline settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub preset: String,
    pub method: Method,
    pub assoc: AssocKind,
    pub clip: Option<ClipSpec>,
    /// Run a second stage with the head dropped.
    pub stage2: bool,
    /// Explicit drop size; otherwise derived from `dim`.
    pub drop: Option<usize>,
    /// Truncation rank for association routes, vector size for SVD vectors.
    pub dim: Option<usize>,
    pub csls_k: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub metric: Metric,
}

/// Names accepted by [`PipelineConfig::preset`].
pub const PRESETS: &[&str] = &[
    "coocmap",
    "coocmap-clip",
    "coocmap-drop",
    "clip-1.5",
    "drop-1.5",
    "log1p",
    "rapp",
    "fung",
    "ppmi",
    "glove",
    "dict-init",
    "vecmap-raw",
    "vecmap-vectors",
    "coocmap-vectors",
    "coocmap-vectors-clip",
];

impl PipelineConfig {
    fn base(name: &str, method: Method, assoc: AssocKind) -> Self {
        let align = AlignConfig::default();
        PipelineConfig {
            preset: name.to_owned(),
            method,
            assoc,
            clip: None,
            stage2: false,
            drop: None,
            dim: None,
            csls_k: align.csls_k,
            max_iters: align.max_iters,
            tol: align.tol,
            metric: assoc.default_metric(),
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        use AssocKind as A;
        use Method as M;
        let b = |m, a| Self::base(name, m, a);
        let cfg = match name {
            "coocmap" => b(M::Coocmap, A::Coocmap),
            "coocmap-clip" => PipelineConfig { clip: Some(CLIP), ..b(M::Coocmap, A::Coocmap) },
            "coocmap-drop" => PipelineConfig { clip: Some(CLIP), stage2: true, ..b(M::Coocmap, A::Coocmap) },
            "clip-1.5" => PipelineConfig { clip: Some(CLIP_15), ..b(M::Coocmap, A::Coocmap) },
            "drop-1.5" => PipelineConfig { clip: Some(CLIP_15), stage2: true, ..b(M::Coocmap, A::Coocmap) },
            "log1p" => b(M::Coocmap, A::Log1p),
            "rapp" => b(M::Coocmap, A::Rapp),
            "fung" => b(M::Coocmap, A::Fung),
            "ppmi" => b(M::Coocmap, A::Ppmi { k: 1.0 }),
            "glove" => b(M::Coocmap, A::Glove),
            "dict-init" => b(M::DictInit, A::Coocmap),
            "vecmap-raw" => PipelineConfig { dim: Some(DEFAULT_SVD_DIM), ..b(M::VecmapRaw, A::Coocmap) },
            "vecmap-vectors" => b(M::VecmapVectors, A::Coocmap),
            "coocmap-vectors" => b(M::CoocmapVectors, A::Coocmap),
            "coocmap-vectors-clip" => PipelineConfig { clip: Some(CLIP), ..b(M::CoocmapVectors, A::Coocmap) },
            _ => {
                return Err(Error::validation(format!(
                    "unknown preset {name:?}; known presets: {}",
                    PRESETS.join(", ")
                )))
            }
        };
        Ok(cfg)
    }

    /// Drop size for stage 2: explicit, else scheduled from `dim`, else 20.
    pub fn effective_drop(&self) -> usize {
        self.drop
            .unwrap_or_else(|| self.dim.map_or(DEFAULT_DROP, align::drop_for_dim))
    }

    pub fn align_config(&self) -> AlignConfig {
        AlignConfig {
            csls_k: self.csls_k,
            max_iters: self.max_iters,
            tol: self.tol,
            metric: self.metric,
            stage2: self.stage2.then(|| Stage2 {
                drop: self.effective_drop(),
                clip: self.clip,
            }),
        }
    }

    pub fn coocmap_config(&self) -> CoocmapConfig {
        CoocmapConfig {
            assoc: self.assoc,
            trunc: self.dim,
            clip: self.clip,
            align: self.align_config(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.csls_k == 0 || self.max_iters == 0 || !(self.tol >= 0.0) {
            return Err(Error::validation("csls_k and max_iters must be >= 1 and tol >= 0"));
        }
        if let Some(c) = self.clip {
            if !(0.0 <= c.lo && c.lo < c.hi && c.hi <= 100.0) {
                return Err(Error::validation(format!("bad clip percentiles ({}, {})", c.lo, c.hi)));
            }
        }
        if self.dim == Some(0) {
            return Err(Error::validation("dimension must be at least 1"));
        }
        Ok(())
    }
}

/// What a pipeline run consumes besides its configuration.
#[derive(Clone, Copy, Debug, Default)]
pub struct PipelineInputs<'a> {
    pub c1: Option<&'a CoocMatrix>,
    pub c2: Option<&'a CoocMatrix>,
    pub vectors: Option<(&'a WordVectors, &'a WordVectors)>,
    pub seed: Option<&'a MatchState>,
}

#[derive(Clone, Debug)]
pub struct PipelineOutcome {
    pub state: MatchState,
    /// Predicted target index for every source index.
    pub targets: Vec<usize>,
    pub stages: Vec<StageTrace>,
}

fn need<T>(v: Option<T>, what: &str, preset: &str) -> Result<T> {
    v.ok_or_else(|| Error::validation(format!("preset {preset:?} needs {what}")))
}

pub fn run_pipeline(cfg: &PipelineConfig, inputs: PipelineInputs<'_>) -> Result<PipelineOutcome> {
    cfg.validate()?;
    let counts = || -> Result<(&CoocMatrix, &CoocMatrix)> {
        Ok((
            need(inputs.c1, "two co-occurrence matrices", &cfg.preset)?,
            need(inputs.c2, "two co-occurrence matrices", &cfg.preset)?,
        ))
    };
    let align_cfg = cfg.align_config();
    match cfg.method {
        Method::Coocmap | Method::DictInit => {
            let (c1, c2) = counts()?;
            let seed = if cfg.method.needs_seed() {
                Some(need(inputs.seed, "a seed dictionary", &cfg.preset)?)
            } else {
                inputs.seed
            };
            let run = align::run_coocmap(c1, c2, &cfg.coocmap_config(), seed)?;
            let targets = run.translate(&align_cfg)?;
            Ok(PipelineOutcome {
                state: run.state,
                targets,
                stages: run.stages,
            })
        }
        Method::VecmapRaw => {
            let (c1, c2) = counts()?;
            let dim = cfg.dim.unwrap_or(DEFAULT_SVD_DIM).min(c1.size()).min(c2.size());
            let xv = assoc::svd_vectors(c1, dim)?;
            let zv = assoc::svd_vectors(c2, dim)?;
            vecmap_outcome(&xv, &zv, &align_cfg, inputs.seed)
        }
        Method::VecmapVectors => {
            let (xv, zv) = need(inputs.vectors, "two vector files", &cfg.preset)?;
            vecmap_outcome(xv, zv, &align_cfg, inputs.seed)
        }
        Method::CoocmapVectors => {
            let (xv, zv) = need(inputs.vectors, "two vector files", &cfg.preset)?;
            let x = align::vectors_assoc(xv, cfg.clip)?;
            let z = align::vectors_assoc(zv, cfg.clip)?;
            let cosine = AlignConfig {
                metric: Metric::Cosine,
                ..align_cfg
            };
            let init = match inputs.seed {
                Some(s) => s.clone(),
                None => align::unsupervised_init(&x, &z, &cosine)?,
            };
            let learned = align::coocmap_selflearn(&x, &z, &init, &cosine)?;
            let targets = align::translate_indices(&x, &z, &learned.state, &cosine)?;
            Ok(PipelineOutcome {
                state: learned.state,
                targets,
                stages: vec![StageTrace {
                    name: "stage1".into(),
                    objectives: learned.trace,
                }],
            })
        }
    }
}

fn vecmap_outcome(
    xv: &WordVectors,
    zv: &WordVectors,
    cfg: &AlignConfig,
    seed: Option<&MatchState>,
) -> Result<PipelineOutcome> {
    let run = align::run_vecmap(xv, zv, cfg, seed)?;
    Ok(PipelineOutcome {
        state: run.state,
        targets: run.translations,
        stages: run.stages,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_listed_preset_resolves() {
        for name in PRESETS {
            let cfg = PipelineConfig::preset(name).unwrap();
            assert_eq!(cfg.preset, *name);
            cfg.validate().unwrap();
        }
        assert!(PipelineConfig::preset("nope").is_err());
    }

    #[test]
    fn drop_presets_configure_stage_two() {
        let cfg = PipelineConfig::preset("coocmap-drop").unwrap();
        let s2 = cfg.align_config().stage2.unwrap();
        assert_eq!(s2.drop, 20);
        assert_eq!(s2.clip, Some(ClipSpec::DEFAULT));
        let with_dim = PipelineConfig { dim: Some(300), ..cfg.clone() };
        assert_eq!(with_dim.align_config().stage2.unwrap().drop, 15);
        let explicit = PipelineConfig { drop: Some(3), ..with_dim };
        assert_eq!(explicit.effective_drop(), 3);
        assert!(PipelineConfig::preset("coocmap").unwrap().align_config().stage2.is_none());
        let d15 = PipelineConfig::preset("drop-1.5").unwrap();
        assert_eq!(d15.clip, Some(ClipSpec { lo: 1.5, hi: 98.5 }));
    }

    #[test]
    fn variant_metrics() {
        assert_eq!(PipelineConfig::preset("rapp").unwrap().metric, Metric::NegL1);
        assert_eq!(PipelineConfig::preset("fung").unwrap().metric, Metric::NegL1);
        assert_eq!(PipelineConfig::preset("ppmi").unwrap().metric, Metric::NegL2);
        assert_eq!(PipelineConfig::preset("glove").unwrap().metric, Metric::NegL2);
        assert_eq!(PipelineConfig::preset("log1p").unwrap().metric, Metric::Cosine);
    }

    #[test]
    fn missing_inputs_are_validation_errors() {
        let cfg = PipelineConfig::preset("vecmap-vectors").unwrap();
        assert!(matches!(run_pipeline(&cfg, PipelineInputs::default()), Err(Error::Validation(_))));
        let cfg = PipelineConfig::preset("coocmap").unwrap();
        assert!(matches!(run_pipeline(&cfg, PipelineInputs::default()), Err(Error::Validation(_))));
    }
}
