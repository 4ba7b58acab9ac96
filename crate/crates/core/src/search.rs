//! Hardening search: a neighborhood chain that keeps a proposed step only
//! when the simplex needs at least as many iterations as before.

use serde::{Deserialize, Serialize};

use crate::coding::PrimalDualPoint;
use crate::distributions::RngStream;
use crate::error::Result;
use crate::instance::LpInstance;
use crate::neighborhood::{neighbor_step, GeneratorState, Operator, OperatorParams};
use crate::solver::{solve, PivotRule, SolveStatus};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSettings {
    pub rule: PivotRule,
    pub max_iter: usize,
}

/// Outcome of one proposal.
#[derive(Clone, Debug)]
pub struct SearchStep {
    pub operator: Operator,
    pub pos: Option<usize>,
    pub accepted: bool,
    /// Iterations of the proposal (`None` if it did not solve to
    /// optimality).
    pub proposal_iterations: Option<usize>,
    /// Iterations of the current (possibly unchanged) instance.
    pub iterations: usize,
}

/// Current point of a search.
#[derive(Clone, Debug)]
pub struct SearchState {
    pub state: GeneratorState,
    pub instance: LpInstance,
    pub point: PrimalDualPoint,
    pub iterations: usize,
}

impl SearchState {
    pub fn new(state: GeneratorState, settings: &SearchSettings) -> Result<Self> {
        let (instance, point) = state.instance()?;
        let iterations = solve(&instance, settings.rule, settings.max_iter).iterations;
        Ok(Self {
            state,
            instance,
            point,
            iterations,
        })
    }
}

/// Run `steps` proposals. Proposals that fail to solve or need fewer
/// iterations are discarded (the stream still advances).
pub fn hardening_search<F>(
    current: &mut SearchState,
    params: &OperatorParams,
    settings: &SearchSettings,
    rng: &mut RngStream,
    steps: usize,
    mut visit: F,
) -> Result<()>
where
    F: FnMut(usize, &SearchStep, &SearchState) -> Result<()>,
{
    for k in 1..=steps {
        let mut candidate = current.state.clone();
        let step = neighbor_step(&mut candidate, params, rng)?;
        let res = solve(&step.instance, settings.rule, settings.max_iter);
        let proposal_iterations = (res.status == SolveStatus::Optimal).then_some(res.iterations);
        let accepted = proposal_iterations.is_some_and(|it| it >= current.iterations);
        if accepted {
            current.state = candidate;
            current.instance = step.instance;
            current.point = step.point;
            current.iterations = res.iterations;
        }
        let record = SearchStep {
            operator: step.operator,
            pos: step.pos,
            accepted,
            proposal_iterations,
            iterations: current.iterations,
        };
        visit(k, &record, current)?;
    }
    Ok(())
}
