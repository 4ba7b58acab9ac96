//! Self-describing instance bundles (`lpforge.bundle.v1`).
//!
//! A bundle carries the instance, its certificate point, the coding, the
//! SVD factors and enough provenance to regenerate the file byte for byte.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::coding::{decode, Coding, PrimalDualPoint};
use crate::config::{generate, GeneratedInstance, GeneratorConfig};
use crate::distributions::{derive_stream, DistributionSpec};
use crate::error::{Error, Result};
use crate::instance::LpInstance;
use crate::matrixgen::SvdFactors;
use crate::neighborhood::{neighbor_step, GeneratorState, Operator, OperatorParams};
use crate::search::{hardening_search, SearchSettings, SearchState};

pub const BUNDLE_SCHEMA: &str = "lpforge.bundle.v1";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// A neighborhood chain applied to a bundle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainProvenance {
    pub chain_seed: u64,
    pub chain_index: u64,
    pub steps: usize,
    /// Selection weights of the three operators.
    pub weights: [f64; 3],
    /// Present for hardening-search chains.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchSettings>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub master_seed: u64,
    pub stream_index: u64,
    pub config_hash: String,
    pub tool_version: String,
    pub config: GeneratorConfig,
    /// Chains applied after generation, in order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub chains: Vec<ChainProvenance>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceBundle {
    pub schema: String,
    pub provenance: Provenance,
    pub instance: LpInstance,
    pub certificate: PrimalDualPoint,
    pub coding: Coding,
    /// Hex SHA-256 of `U`, `sigma` and `V` (see [`factors_digest`]).
    pub factors_digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factors: Option<SvdFactors>,
}

/// SHA-256 over the shapes and little-endian bytes of `U`, `sigma`, `V`.
pub fn factors_digest(f: &SvdFactors) -> String {
    let mut h = Sha256::new();
    for mat in [&f.u, &f.v] {
        h.update((mat.rows() as u64).to_le_bytes());
        h.update((mat.cols() as u64).to_le_bytes());
        for v in mat.as_slice() {
            h.update(v.to_le_bytes());
        }
    }
    h.update((f.sigma.len() as u64).to_le_bytes());
    for v in &f.sigma {
        h.update(v.to_le_bytes());
    }
    hex::encode(h.finalize())
}

fn invariant(message: impl Into<String>) -> Error {
    Error::parse("bundle invariant", message)
}

impl InstanceBundle {
    pub fn from_generated(g: &GeneratedInstance, config: &GeneratorConfig, master_seed: u64, index: u64) -> Self {
        Self::from_state(
            &g.state,
            g.instance.clone(),
            g.point.clone(),
            Provenance {
                master_seed,
                stream_index: index,
                config_hash: config.hash(),
                tool_version: TOOL_VERSION.to_string(),
                config: config.clone(),
                chains: Vec::new(),
            },
        )
    }

    pub fn from_state(
        state: &GeneratorState,
        instance: LpInstance,
        certificate: PrimalDualPoint,
        provenance: Provenance,
    ) -> Self {
        Self {
            schema: BUNDLE_SCHEMA.to_string(),
            provenance,
            instance,
            certificate,
            coding: state.coding().clone(),
            factors_digest: factors_digest(state.factors()),
            factors: Some(state.factors().clone()),
        }
    }

    /// Check every cross-field invariant.
    pub fn validate(&self) -> Result<()> {
        if self.schema != BUNDLE_SCHEMA {
            return Err(invariant(format!(
                "schema is {:?}, expected {BUNDLE_SCHEMA:?}",
                self.schema
            )));
        }
        self.instance.validate()?;
        let (m, n) = (self.instance.m(), self.instance.n());
        if self.coding.m() != m {
            return Err(invariant(format!(
                "sum(beta) = {} but the instance has m = {m} rows",
                self.coding.m()
            )));
        }
        if self.coding.n() != n {
            return Err(invariant(format!(
                "coding length {} does not equal m + n = {}",
                self.coding.len(),
                m + n
            )));
        }
        if self.certificate != decode(&self.coding) {
            return Err(invariant("certificate does not match the decoded coding"));
        }
        if self.provenance.config.hash() != self.provenance.config_hash {
            return Err(invariant("config_hash does not match the embedded config"));
        }
        if let Some(f) = &self.factors {
            f.validate()?;
            if factors_digest(f) != self.factors_digest {
                return Err(invariant("factors_digest does not match the stored factors"));
            }
            if (f.m(), f.n()) != (m, n) || f.compose() != self.instance.a {
                return Err(invariant("constraint matrix does not match the stored factors"));
            }
        }
        Ok(())
    }

    /// Generator state, if the factors are stored.
    pub fn state(&self) -> Result<GeneratorState> {
        let factors = self
            .factors
            .clone()
            .ok_or_else(|| invariant("bundle carries no SVD factors"))?;
        GeneratorState::new(factors, self.coding.clone())
    }

    /// Operator parameters with the coding distributions actually used for
    /// this instance (which differ from the config in randomized mode).
    pub fn operator_params(&self) -> Result<OperatorParams> {
        let mut params = self.provenance.config.operator_params();
        let meta = &self.instance.meta;
        if let Some(text) = &meta.dist_x1 {
            params.rule.dist_x1 = text.parse::<DistributionSpec>()?;
        }
        if let Some(text) = &meta.beta_spec {
            params.rule.beta_spec = text.parse::<DistributionSpec>()?;
        }
        Ok(params)
    }

    pub fn to_json_string(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("bundle serializes");
        text.push('\n');
        text
    }

    pub fn from_json_str(text: &str, context: &str) -> Result<Self> {
        let bundle: Self = serde_json::from_str(text).map_err(|e| Error::parse(context, e.to_string()))?;
        bundle.validate()?;
        Ok(bundle)
    }

    /// Recompute the bundle from its provenance alone.
    pub fn regenerate(&self) -> Result<Self> {
        let p = &self.provenance;
        let g = generate(&p.config, p.master_seed, p.stream_index)?;
        let mut bundle = Self::from_generated(&g, &p.config, p.master_seed, p.stream_index);
        for chain in &p.chains {
            bundle = continue_chain(&bundle, chain, |_| Ok(()))?;
        }
        Ok(bundle)
    }
}

/// One step of a chain as seen by [`continue_chain`] callbacks.
pub struct ChainEvent<'a> {
    /// 1-based step number.
    pub step: usize,
    pub operator: Operator,
    pub pos: Option<usize>,
    /// Search mode only: whether the proposal was kept.
    pub accepted: Option<bool>,
    /// Search mode only: iterations of the current instance.
    pub iterations: Option<usize>,
    pub state: &'a GeneratorState,
    pub instance: &'a LpInstance,
    pub point: &'a PrimalDualPoint,
}

impl ChainEvent<'_> {
    /// Bundle of the current point, as if the chain had stopped here.
    pub fn bundle(&self, source: &InstanceBundle, chain: &ChainProvenance) -> InstanceBundle {
        let chain = ChainProvenance {
            steps: self.step,
            ..chain.clone()
        };
        chained_bundle(
            source,
            self.state,
            Some((self.instance.clone(), self.point.clone())),
            chain,
        )
    }
}

/// Run the chain described by `chain` from `source`, reporting every step,
/// and return the final bundle. Random-walk steps come from
/// `derive_stream(chain_seed, chain_index)`; search mode draws proposals
/// from the same stream.
pub fn continue_chain<F>(source: &InstanceBundle, chain: &ChainProvenance, mut visit: F) -> Result<InstanceBundle>
where
    F: FnMut(&ChainEvent) -> Result<()>,
{
    let mut state = source.state()?;
    let mut params = source.operator_params()?;
    params.weights = chain.weights;
    let mut rng = derive_stream(chain.chain_seed, chain.chain_index);
    let mut last = None;
    match &chain.search {
        None => {
            for k in 1..=chain.steps {
                let step = neighbor_step(&mut state, &params, &mut rng)?;
                visit(&ChainEvent {
                    step: k,
                    operator: step.operator,
                    pos: step.pos,
                    accepted: None,
                    iterations: None,
                    state: &state,
                    instance: &step.instance,
                    point: &step.point,
                })?;
                last = Some((step.instance, step.point));
            }
        }
        Some(settings) => {
            let mut current = SearchState::new(state, settings)?;
            hardening_search(&mut current, &params, settings, &mut rng, chain.steps, |k, step, now| {
                visit(&ChainEvent {
                    step: k,
                    operator: step.operator,
                    pos: step.pos,
                    accepted: Some(step.accepted),
                    iterations: Some(step.iterations),
                    state: &now.state,
                    instance: &now.instance,
                    point: &now.point,
                })
            })?;
            if chain.steps > 0 {
                last = Some((current.instance, current.point));
            }
            state = current.state;
        }
    }
    Ok(chained_bundle(source, &state, last, chain.clone()))
}

/// Bundle for `state` reached by a chain started from `source`. `last` is
/// the instance of the final step (`None` for zero steps).
pub fn chained_bundle(
    source: &InstanceBundle,
    state: &GeneratorState,
    last: Option<(LpInstance, PrimalDualPoint)>,
    chain: ChainProvenance,
) -> InstanceBundle {
    let mut provenance = source.provenance.clone();
    provenance.chains.push(chain);
    let (instance, point) = match last {
        None => (source.instance.clone(), source.certificate.clone()),
        Some((mut inst, pt)) => {
            let src = &source.instance.meta;
            inst.meta.master_seed = src.master_seed;
            inst.meta.stream_index = src.stream_index;
            inst.meta.gap = src.gap;
            inst.meta.dist_x1 = src.dist_x1.clone();
            inst.meta.beta_spec = src.beta_spec.clone();
            (inst, pt)
        }
    };
    InstanceBundle::from_state(state, instance, point, provenance)
}

pub fn export_json(bundle: &InstanceBundle, path: &Path) -> Result<()> {
    fs::write(path, bundle.to_json_string()).map_err(|e| Error::io(path, e))
}

pub fn import_json(path: &Path) -> Result<InstanceBundle> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    InstanceBundle::from_json_str(&text, &path.display().to_string())
}
