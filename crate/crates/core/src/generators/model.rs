//! Named model specifications and prepared samplers.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::attachment::{sample_preferential_attachment, AttachmentSpec};
use super::bst::sample_bst;
use super::cmj::{sample_cmj_tree, BirthSpec};
use super::deterministic::{complete_bary, path, star, superstar, superstar_profile};
use super::gw::{ConditionedGw, GwMethod};
use super::offspring::OffspringSpec;
use super::simply_generated::{SimplyGenerated, WeightSpec};
use super::split::{sample_split_tree, SplitSpec};
use crate::error::{Error, Result};
use crate::tree::RootedTree;

/// A tree family. The size parameter n is the vertex count except for
/// `complete_bary` (height), `superstar` (number of arms) and `split`
/// (number of balls).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelSpec {
    Path,
    Star,
    CompleteBary {
        b: usize,
    },
    Superstar {
        p: Vec<f64>,
    },
    Cgw {
        offspring: OffspringSpec,
        #[serde(default)]
        method: GwMethod,
    },
    SimplyGenerated {
        weights: WeightSpec,
    },
    Split {
        split: SplitSpec,
    },
    Pa {
        chi: f64,
        rho: f64,
    },
    /// Binary search tree from a uniform permutation.
    Bst,
    Cmj {
        birth: BirthSpec,
    },
}

/// A model plus an optional default size, as read from a spec file:
/// `{"model":"cgw","offspring":{"kind":"poisson","lambda":1.0},"n":10000}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    #[serde(flatten)]
    pub model: ModelSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

impl ModelSpec {
    /// Built-in presets by short name.
    pub fn preset(name: &str) -> Result<Self> {
        let pa = |s: AttachmentSpec| ModelSpec::Pa { chi: s.chi, rho: s.rho };
        Ok(match name {
            "path" => ModelSpec::Path,
            "star" => ModelSpec::Star,
            "binary" | "complete_binary" => ModelSpec::CompleteBary { b: 2 },
            "superstar" => ModelSpec::Superstar { p: vec![0.5, 0.5] },
            "cgw" | "poisson_cgw" => {
                ModelSpec::Cgw { offspring: OffspringSpec::Poisson { lambda: 1.0 }, method: GwMethod::Auto }
            }
            "geometric_cgw" => {
                ModelSpec::Cgw { offspring: OffspringSpec::Geometric { p: 0.5 }, method: GwMethod::Auto }
            }
            "condensation" | "type2" => {
                ModelSpec::Cgw { offspring: OffspringSpec::condensation_default(), method: GwMethod::Auto }
            }
            "factorial" | "type3" => ModelSpec::SimplyGenerated { weights: WeightSpec::Factorial { alpha: 1.0 } },
            "bst" => ModelSpec::Bst,
            "rrt" => pa(AttachmentSpec::rrt()),
            "port" => pa(AttachmentSpec::port()),
            "pa_bst" => pa(AttachmentSpec::bst()),
            "bary3" => pa(AttachmentSpec::bary(3)),
            "split_bst" => ModelSpec::Split { split: SplitSpec::bst() },
            "split_dirichlet3" => ModelSpec::Split { split: SplitSpec::dirichlet(3, 1.0) },
            "yule" => ModelSpec::Cmj { birth: BirthSpec::yule() },
            "cmj_bst" => ModelSpec::Cmj { birth: BirthSpec::bst() },
            _ => return Err(Error::InvalidSpec(format!("unknown model preset {name:?}"))),
        })
    }

    pub const PRESETS: &'static [&'static str] = &[
        "path",
        "star",
        "binary",
        "superstar",
        "cgw",
        "geometric_cgw",
        "condensation",
        "factorial",
        "bst",
        "rrt",
        "port",
        "pa_bst",
        "bary3",
        "split_bst",
        "split_dirichlet3",
        "yule",
        "cmj_bst",
    ];

    pub fn validate(&self) -> Result<()> {
        match self {
            ModelSpec::CompleteBary { b } if *b < 1 => Err(Error::InvalidSpec("b must be at least 1".into())),
            ModelSpec::Superstar { p } => superstar_profile(p, 1).map(|_| ()),
            ModelSpec::Cgw { offspring, .. } => offspring.validate(),
            ModelSpec::Split { split } => split.validate(),
            ModelSpec::Pa { chi, rho } => AttachmentSpec::new(*chi, *rho).validate(),
            ModelSpec::Cmj { birth } => birth.validate(),
            _ => Ok(()),
        }
    }

    /// True when every call at the same n returns the same tree.
    pub fn is_deterministic(&self) -> bool {
        matches!(self, ModelSpec::Path | ModelSpec::Star | ModelSpec::CompleteBary { .. } | ModelSpec::Superstar { .. })
    }

    /// Builds any tables needed at size n.
    pub fn prepare(&self, n: usize) -> Result<PreparedModel> {
        self.validate()?;
        if n == 0 && !matches!(self, ModelSpec::CompleteBary { .. }) {
            return Err(Error::InvalidSpec("n must be positive".into()));
        }
        let engine = match self {
            ModelSpec::Path => Engine::Fixed(Arc::new(path(n))),
            ModelSpec::Star => Engine::Fixed(Arc::new(star(n))),
            ModelSpec::CompleteBary { b } => Engine::Fixed(Arc::new(complete_bary(*b, n))),
            ModelSpec::Superstar { p } => Engine::Fixed(Arc::new(superstar(&superstar_profile(p, n)?))),
            ModelSpec::Cgw { offspring, method } => Engine::Gw(ConditionedGw::new(offspring, n, *method)?),
            ModelSpec::SimplyGenerated { weights } => Engine::Sg(SimplyGenerated::new(weights, n)?),
            _ => Engine::Direct,
        };
        Ok(PreparedModel { spec: self.clone(), n, engine })
    }
}

/// A model ready to emit independent trees at a fixed size.
#[derive(Debug, Clone)]
pub struct PreparedModel {
    spec: ModelSpec,
    n: usize,
    engine: Engine,
}

#[derive(Debug, Clone)]
enum Engine {
    Fixed(Arc<RootedTree>),
    Gw(ConditionedGw),
    Sg(SimplyGenerated),
    Direct,
}

impl PreparedModel {
    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Arc<RootedTree>> {
        let n = self.n;
        let tree = match (&self.engine, &self.spec) {
            (Engine::Fixed(t), _) => return Ok(Arc::clone(t)),
            (Engine::Gw(g), _) => g.sample(rng)?,
            (Engine::Sg(s), _) => s.sample(rng)?,
            (Engine::Direct, ModelSpec::Split { split }) => sample_split_tree(split, n, rng)?.tree,
            (Engine::Direct, ModelSpec::Pa { chi, rho }) => {
                sample_preferential_attachment(AttachmentSpec::new(*chi, *rho), n, rng)?
            }
            (Engine::Direct, ModelSpec::Bst) => sample_bst(n, rng),
            (Engine::Direct, ModelSpec::Cmj { birth }) => sample_cmj_tree(birth, n, rng)?,
            (Engine::Direct, spec) => unreachable!("no direct sampler for {spec:?}"),
        };
        Ok(Arc::new(tree))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn presets_prepare_and_sample() {
        let mut rng = seeded(1);
        for name in ModelSpec::PRESETS {
            let spec = ModelSpec::preset(name).unwrap();
            let n = if matches!(spec, ModelSpec::CompleteBary { .. }) { 4 } else { 41 };
            let t = spec.prepare(n).unwrap().sample(&mut rng).unwrap();
            assert!(t.n() >= 1, "{name}");
        }
        assert!(ModelSpec::preset("nope").is_err());
    }

    #[test]
    fn config_json_roundtrip() {
        let text = r#"{"model":"cgw","offspring":{"kind":"poisson","lambda":1.0},"n":10000}"#;
        let cfg: ModelConfig = serde_json::from_str(text).unwrap();
        assert_eq!(cfg.n, Some(10000));
        assert!(matches!(cfg.model, ModelSpec::Cgw { method: GwMethod::Auto, .. }));
        let star: ModelConfig = serde_json::from_str(r#"{"model":"star"}"#).unwrap();
        assert_eq!(star.model, ModelSpec::Star);
        let back: ModelConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }
}
