//! Arrays of machines acting in sequence on a single flying atom.
//!
//! Every machine in the array sees a fixed input state (the output of the
//! previous stage) and is assumed to have reached its own steady state, so
//! stage `i` consists of: solve `pi_m(rho^{i-1})`, build the perturbative
//! atom channel for that machine state, apply it once. Inter-machine and
//! inter-atom correlations are not modelled; each stage is a pure function
//! of the incoming atom state and the stage parameters.
//!
//! Flow reports along a trajectory are stored per atom (the ensemble rates
//! divided by `r`), since a single crossing atom is the object of interest
//! here.

use crate::atomchannel::{AtomChannel, ChannelVariant};
use crate::error::{Error, Result};
use crate::machine::{MachineParams, solve_steady_state};
use crate::qstate::{DensityMatrix, trace_distance};
use crate::thermo::{FlowReport, flow_report_at, stream_fixed_point};

/// States and per-stage flows of one atom crossing a machine array.
#[derive(Clone, Debug)]
pub struct Trajectory {
    /// Atom states, starting with the supplied initial state
    /// (`states.len() == stages_run + 1`).
    pub states: Vec<DensityMatrix>,
    /// Per-atom flow report of each stage (rates divided by `r`).
    pub flows: Vec<FlowReport>,
    /// Set by [`converge`] when the target was reached within tolerance.
    pub converged: bool,
    pub stages_run: usize,
}

impl Trajectory {
    pub fn last(&self) -> &DensityMatrix {
        self.states.last().expect("trajectory holds at least the initial state")
    }
}

fn run_stage(p: &MachineParams, rho: &DensityMatrix) -> Result<(DensityMatrix, FlowReport)> {
    if p.r <= 0.0 {
        return Err(Error::InvalidParams("cascade stages need an arrival rate r > 0".into()));
    }
    let pi = solve_steady_state(p, rho)?;
    let flows = flow_report_at(&pi, rho, p)?.scaled(1.0 / p.r);
    let channel = AtomChannel::new(&pi.rho, p.phi, ChannelVariant::Perturbative)?;
    Ok((channel.apply(rho)?, flows))
}

/// Sends one atom through `n` identical machines.
pub fn propagate(rho_a0: &DensityMatrix, p: &MachineParams, n: usize) -> Result<Trajectory> {
    propagate_heterogeneous(rho_a0, std::iter::repeat(p).take(n))
}

/// Sends one atom through a sequence of (possibly different) machines.
/// A stage failure aborts with the failing stage index.
pub fn propagate_heterogeneous<'a>(
    rho_a0: &DensityMatrix,
    stages: impl IntoIterator<Item = &'a MachineParams>,
) -> Result<Trajectory> {
    let mut states = vec![rho_a0.clone()];
    let mut flows = Vec::new();
    for (stage, p) in stages.into_iter().enumerate() {
        let (next, report) = run_stage(p, states.last().unwrap())
            .map_err(|e| Error::CascadeStage { stage, source: Box::new(e) })?;
        states.push(next);
        flows.push(report);
    }
    let stages_run = flows.len();
    Ok(Trajectory { states, flows, converged: false, stages_run })
}

/// The incoherent thermal fixed point of the stream: the Gibbs state of the
/// atom at the virtual temperature (inverted populations when
/// `beta_v < 0`).
pub fn fixed_point(p: &MachineParams) -> Result<DensityMatrix> {
    stream_fixed_point(p)
}

/// Propagates until the trace-norm distance to the fixed point drops below
/// `tol` or `max_stages` is exhausted. Non-convergence is reported through
/// the `converged` flag, not as an error.
pub fn converge(
    rho_a0: &DensityMatrix,
    p: &MachineParams,
    tol: f64,
    max_stages: usize,
) -> Result<Trajectory> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParams("convergence tolerance must be > 0".into()));
    }
    let target = fixed_point(p)?;
    let mut states = vec![rho_a0.clone()];
    let mut flows = Vec::new();
    let mut converged = trace_distance(rho_a0, &target) < tol;
    while !converged && flows.len() < max_stages {
        let stage = flows.len();
        let (next, report) = run_stage(p, states.last().unwrap())
            .map_err(|e| Error::CascadeStage { stage, source: Box::new(e) })?;
        converged = trace_distance(&next, &target) < tol;
        states.push(next);
        flows.push(report);
    }
    let stages_run = flows.len();
    Ok(Trajectory { states, flows, converged, stages_run })
}

/// Trace-norm state change of one machine crossing in units of `phi^2`,
/// `|A(rho) - rho|_tr / phi^2`.
pub fn kick_magnitude(rho_a: &DensityMatrix, p: &MachineParams) -> Result<f64> {
    if !(p.phi > 0.0) {
        return Err(Error::InvalidParams("kick magnitude needs phi > 0".into()));
    }
    let pi = solve_steady_state(p, rho_a)?;
    let channel = AtomChannel::new(&pi.rho, p.phi, ChannelVariant::Perturbative)?;
    let out = channel.apply(rho_a)?;
    Ok(trace_distance(&out, rho_a) / (p.phi * p.phi))
}
