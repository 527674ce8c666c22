use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Condvar, Mutex, RwLock};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::exchange::LocalView;
use super::partition::Partitioning;
use crate::cloud::{Mesh, PointCloud};
use crate::config::{Order, ResidualMode};
use crate::error::{Error, Result};
use crate::kinetic::{
    directional_flux_derivative, flux_residual, local_timestep, q_derivatives, q_from_primitives, residue_norm,
    state_update, Direction, FluxVector, FreeStream, GasModel, PrimitiveState,
};
use crate::layout::{AosStore, Field, FieldStore, SoaStore, Store, COMPONENTS};
use crate::metrics::{BenchReport, Kernel, KernelTimes};

/// Order in which ready partition tasks are picked.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum SchedulePolicy {
    /// Lowest ready partition first.
    #[default]
    InOrder,
    /// Uniformly random ready partition, seeded. Used to exercise unusual
    /// but legal interleavings.
    Shuffled(u64),
}

/// Parameters of a fixed-point run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub gas: GasModel,
    pub n_iterations: usize,
    pub n_inner: usize,
    pub cfl: f64,
    pub order: Order,
    pub residual_mode: ResidualMode,
    pub n_workers: usize,
    pub free_stream: PrimitiveState,
    pub schedule: SchedulePolicy,
}

impl Default for RunOptions {
    fn default() -> Self {
        let gas = GasModel::default();
        RunOptions {
            gas,
            n_iterations: 100,
            n_inner: 3,
            cfl: 0.5,
            order: Order::Second,
            residual_mode: ResidualMode::Fused,
            n_workers: 1,
            free_stream: crate::init::freestream_state(0.63, 2.0, gas),
            schedule: SchedulePolicy::InOrder,
        }
    }
}

/// One step of the per-iteration phase plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    QVariables,
    /// First-order derivative estimate into buffer 0.
    QDerivativesInit,
    /// Inner sweep `j ≥ 1`, reading buffer `(j-1) % 2` and writing `j % 2`.
    QDerivativesInner(u8),
    FluxResidual,
    Timestep,
    StateUpdate,
}

impl Phase {
    fn kernel(self) -> Kernel {
        match self {
            Phase::QVariables => Kernel::QVariables,
            Phase::QDerivativesInit | Phase::QDerivativesInner(_) => Kernel::QDerivatives,
            Phase::FluxResidual => Kernel::FluxResidual,
            Phase::Timestep => Kernel::Timestep,
            Phase::StateUpdate => Kernel::StateUpdate,
        }
    }
}

/// Phases of one outer iteration.
pub fn phase_plan(order: Order, n_inner: usize) -> Vec<Phase> {
    let mut plan = vec![Phase::QVariables];
    if order == Order::Second {
        plan.push(Phase::QDerivativesInit);
        plan.extend((1..=n_inner).map(|j| Phase::QDerivativesInner(j as u8)));
    }
    plan.extend([Phase::FluxResidual, Phase::Timestep, Phase::StateUpdate]);
    plan
}

/// Derivative buffer holding the converged inner iterate.
fn final_buffer(n_inner: usize) -> u8 {
    (n_inner % 2) as u8
}

/// Ghost fields a phase reads; each is produced by the phase just before.
fn gathered_fields(phase: Phase, order: Order, n_inner: usize) -> Vec<Field> {
    match phase {
        Phase::QDerivativesInit => vec![Field::Q],
        Phase::QDerivativesInner(j) => {
            let b = (j - 1) % 2;
            vec![Field::Qx(b), Field::Qy(b)]
        }
        Phase::FluxResidual => match order {
            Order::First => vec![Field::Q],
            Order::Second => {
                let b = final_buffer(n_inner);
                vec![Field::Qx(b), Field::Qy(b)]
            }
        },
        Phase::QVariables | Phase::Timestep | Phase::StateUpdate => Vec::new(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    /// 1-based outer iteration.
    pub iteration: usize,
    pub residue: f64,
    /// `log10(residue / residue_1)`.
    pub log10_rel: f64,
    /// Seconds since the start of the run when the residue was known.
    pub wall_seconds: f64,
}

/// Per-iteration residues and run totals.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceHistory {
    pub records: Vec<IterationRecord>,
    pub n_points: usize,
    pub total_seconds: f64,
    pub kernel_times: KernelTimes,
    pub split: bool,
}

impl ConvergenceHistory {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn residues(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.residue).collect()
    }

    pub fn rdp(&self) -> Option<f64> {
        crate::metrics::rdp(self.total_seconds, self.iterations(), self.n_points).ok()
    }

    pub fn report(&self) -> BenchReport {
        BenchReport {
            total_seconds: self.total_seconds,
            iterations: self.iterations(),
            n_points: self.n_points,
            split: self.split,
            kernels: self.kernel_times.clone(),
        }
    }
}

struct Partition {
    view: LocalView,
    mesh: Mesh,
}

struct Pending {
    values: Vec<f64>,
    remaining: usize,
}

struct Sched {
    ready: Vec<usize>,
    queued: Vec<bool>,
    running: Vec<bool>,
    /// Partitions whose last task failed; they are never dispatched again.
    failed: Vec<bool>,
    done: usize,
    /// Earliest failure seen as `(phase, global point, error)`. Tasks up to
    /// that phase still run, so the reported failure and the recorded history
    /// do not depend on the schedule.
    failure: Option<(usize, usize, Error)>,
    rng: Option<ChaCha8Rng>,
}

struct Shared<'a, S> {
    parts: &'a [Partition],
    adjacency: Vec<Vec<usize>>,
    data: Vec<RwLock<S>>,
    /// Phases finished per partition.
    completed: Vec<AtomicUsize>,
    sched: Mutex<Sched>,
    wake: Condvar,
    pending: Mutex<BTreeMap<usize, Pending>>,
    residues: Mutex<Vec<(usize, f64, f64)>>,
    plan: Vec<Phase>,
    total_phases: usize,
    opts: &'a RunOptions,
    n_points: usize,
    start: Instant,
}

/// Runs `opts.n_iterations` outer iterations on `cloud`'s fields.
///
/// The result (history and final fields) does not depend on the number of
/// partitions, the worker count, the schedule policy or the layout.
pub fn run_fixed_point(
    cloud: &mut PointCloud,
    partitioning: &Partitioning,
    opts: &RunOptions,
) -> Result<ConvergenceHistory> {
    match run_recorded(cloud, partitioning, opts)? {
        (history, None) => Ok(history),
        (_, Some(err)) => Err(err),
    }
}

/// Like [`run_fixed_point`] but keeps the history of a run that fails.
///
/// On failure the history holds every iteration before the failing one and
/// the cloud's fields are left as they were before the run.
pub fn run_recorded(
    cloud: &mut PointCloud,
    partitioning: &Partitioning,
    opts: &RunOptions,
) -> Result<(ConvergenceHistory, Option<Error>)> {
    if partitioning.color.len() != cloud.n_points() {
        return Err(Error::InvalidArgument(format!(
            "partitioning covers {} points, cloud has {}",
            partitioning.color.len(),
            cloud.n_points()
        )));
    }
    if opts.n_workers == 0 {
        return Err(Error::InvalidArgument("n_workers must be at least 1".into()));
    }
    if opts.order == Order::Second && opts.n_inner == 0 {
        return Err(Error::InvalidArgument("n_inner must be at least 1".into()));
    }
    if opts.n_inner > 250 {
        return Err(Error::InvalidArgument("n_inner must be at most 250".into()));
    }
    if !(opts.cfl > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "cfl must be positive, got {}",
            opts.cfl
        )));
    }
    let mesh = cloud.mesh();
    let parts: Vec<Partition> = LocalView::build_all(partitioning)
        .into_iter()
        .map(|view| Partition {
            mesh: mesh.subset(&view.global, view.n_owned),
            view,
        })
        .collect();
    match &mut cloud.store {
        Store::Aos(s) => run_typed::<AosStore>(s, &parts, partitioning, opts),
        Store::Soa(s) => run_typed::<SoaStore>(s, &parts, partitioning, opts),
    }
}

fn run_typed<S: FieldStore>(
    global: &mut S,
    parts: &[Partition],
    partitioning: &Partitioning,
    opts: &RunOptions,
) -> Result<(ConvergenceHistory, Option<Error>)> {
    let n_parts = parts.len();
    let n_points = global.len();
    let plan = phase_plan(opts.order, opts.n_inner);
    let total_phases = plan.len() * opts.n_iterations;
    let data = parts
        .iter()
        .map(|part| {
            let mut s = S::zeroed(part.view.global.len());
            for (l, &g) in part.view.global.iter().enumerate() {
                for c in 0..COMPONENTS {
                    s.set_raw(l, c, global.get_raw(g, c));
                }
            }
            RwLock::new(s)
        })
        .collect();
    let n_threads = opts.n_workers.min(n_parts).max(1);
    let shared = Shared {
        parts,
        adjacency: partitioning.adjacency(),
        data,
        completed: (0..n_parts).map(|_| AtomicUsize::new(0)).collect(),
        sched: Mutex::new(Sched {
            ready: if total_phases > 0 {
                (0..n_parts).collect()
            } else {
                Vec::new()
            },
            queued: vec![total_phases > 0; n_parts],
            failed: vec![false; n_parts],
            running: vec![false; n_parts],
            done: if total_phases > 0 { 0 } else { n_parts },
            failure: None,
            rng: match opts.schedule {
                SchedulePolicy::InOrder => None,
                SchedulePolicy::Shuffled(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            },
        }),
        wake: Condvar::new(),
        pending: Mutex::new(BTreeMap::new()),
        residues: Mutex::new(Vec::new()),
        plan,
        total_phases,
        opts,
        n_points,
        start: Instant::now(),
    };

    let mut times = KernelTimes::default();
    std::thread::scope(|scope| {
        let workers: Vec<_> = (0..n_threads).map(|_| scope.spawn(|| shared.worker())).collect();
        for w in workers {
            times.merge(&w.join().expect("solver worker panicked"));
        }
    });
    let total_seconds = shared.start.elapsed().as_secs_f64();
    times.scale(1.0 / n_threads as f64);

    let sched = shared.sched.into_inner().expect("scheduler lock poisoned");
    let failure = sched.failure.map(|f| (f.0 / shared.plan.len(), f.2));
    for (part, lock) in parts.iter().zip(shared.data).filter(|_| failure.is_none()) {
        let local = lock.into_inner().expect("partition lock poisoned");
        for (l, &g) in part.view.global[..part.view.n_owned].iter().enumerate() {
            for c in 0..COMPONENTS {
                global.set_raw(g, c, local.get_raw(l, c));
            }
        }
    }
    let mut raw = shared.residues.into_inner().expect("residue lock poisoned");
    raw.sort_by_key(|r| r.0);
    if let Some((failed, _)) = &failure {
        raw.retain(|r| r.0 < *failed);
    }
    let first = raw.first().map_or(0.0, |r| r.1);
    let records = raw
        .into_iter()
        .map(|(t, residue, wall)| IterationRecord {
            iteration: t + 1,
            residue,
            log10_rel: relative_log(residue, first),
            wall_seconds: wall,
        })
        .collect();
    let history = ConvergenceHistory {
        records,
        n_points,
        total_seconds,
        kernel_times: times,
        split: opts.residual_mode == ResidualMode::Split4,
    };
    Ok((history, failure.map(|f| f.1)))
}

fn relative_log(residue: f64, first: f64) -> f64 {
    if first > 0.0 {
        (residue / first).log10()
    } else if residue == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

impl<S: FieldStore> Shared<'_, S> {
    fn worker(&self) -> KernelTimes {
        let mut times = KernelTimes::default();
        loop {
            let (p, k) = {
                let mut st = self.sched.lock().expect("scheduler lock poisoned");
                loop {
                    if st.done == self.parts.len() {
                        return times;
                    }
                    if let Some(limit) = st.failure.as_ref().map(|f| f.0) {
                        let mut dropped = Vec::new();
                        st.ready.retain(|&q| {
                            let keep = self.completed[q].load(Ordering::Acquire) <= limit;
                            if !keep {
                                dropped.push(q);
                            }
                            keep
                        });
                        for q in dropped {
                            st.queued[q] = false;
                        }
                        if st.ready.is_empty() && !st.running.iter().any(|&r| r) {
                            return times;
                        }
                    }
                    if !st.ready.is_empty() {
                        let n_ready = st.ready.len();
                        let idx = match st.rng.as_mut() {
                            Some(rng) => rng.random_range(0..n_ready),
                            None => {
                                let min = st.ready.iter().enumerate().min_by_key(|e| e.1);
                                min.map(|e| e.0).unwrap_or(0)
                            }
                        };
                        let p = st.ready.swap_remove(idx);
                        st.queued[p] = false;
                        st.running[p] = true;
                        break (p, self.completed[p].load(Ordering::Acquire));
                    }
                    st = self.wake.wait(st).expect("scheduler lock poisoned");
                }
            };
            let outcome = self.run_task(p, k, &mut times);
            let mut st = self.sched.lock().expect("scheduler lock poisoned");
            st.running[p] = false;
            match outcome {
                Ok(()) => {
                    let now = k + 1;
                    self.completed[p].store(now, Ordering::Release);
                    if now == self.total_phases {
                        st.done += 1;
                    }
                    for q in std::iter::once(p).chain(self.adjacency[p].iter().copied()) {
                        if self.is_ready(&st, q) {
                            st.queued[q] = true;
                            st.ready.push(q);
                        }
                    }
                }
                Err(e) => {
                    st.failed[p] = true;
                    let key = (k, e.point().unwrap_or(usize::MAX));
                    let earlier = match &st.failure {
                        Some((k0, g0, _)) => key < (*k0, *g0),
                        None => true,
                    };
                    if earlier {
                        st.failure = Some((key.0, key.1, e));
                    }
                }
            }
            self.wake.notify_all();
        }
    }

    fn is_ready(&self, st: &Sched, p: usize) -> bool {
        let k = self.completed[p].load(Ordering::Acquire);
        !st.queued[p]
            && !st.failed[p]
            && !st.running[p]
            && k < self.total_phases
            && self.adjacency[p]
                .iter()
                .all(|&q| self.completed[q].load(Ordering::Acquire) >= k)
    }

    fn run_task(&self, p: usize, k: usize, times: &mut KernelTimes) -> Result<()> {
        let opts = self.opts;
        let t0 = Instant::now();
        let phase = self.plan[k % self.plan.len()];
        let iteration = k / self.plan.len();
        let part = &self.parts[p];

        let fields = gathered_fields(phase, opts.order, opts.n_inner);
        let mut incoming = Vec::new();
        if !fields.is_empty() {
            for block in &part.view.blocks {
                debug_assert!({
                    let done = self.completed[block.owner].load(Ordering::Acquire);
                    k <= done && done <= k + 1
                });
                let src = self.data[block.owner].read().expect("partition lock poisoned");
                for &r in &block.remote {
                    for &f in &fields {
                        incoming.push(src.get4(r, f));
                    }
                }
            }
        }
        let mut guard = self.data[p].write().expect("partition lock poisoned");
        let store = &mut *guard;
        let mut it = incoming.into_iter();
        for block in &part.view.blocks {
            for &l in &block.local {
                for &f in &fields {
                    store.set4(l, f, it.next().expect("gather size"));
                }
            }
        }

        let to_global = |e: Error| Error::Solver {
            iteration: iteration + 1,
            source: Box::new(e.remap_points(|l| part.view.global[l])),
        };
        let mesh = &part.mesh;
        let n_owned = part.view.n_owned;
        match phase {
            Phase::QVariables => {
                for l in 0..n_owned {
                    let s = PrimitiveState::from_array(store.get4(l, Field::Prim));
                    let q = q_from_primitives(s, opts.gas).map_err(|_| {
                        to_global(Error::Positivity {
                            point: l,
                            rho: s.rho,
                            p: s.p,
                        })
                    })?;
                    store.set4(l, Field::Q, q.0);
                }
            }
            Phase::QDerivativesInit => {
                for l in 0..n_owned {
                    let (qx, qy) = q_derivatives(mesh, &*store, l, None).map_err(to_global)?;
                    store.set4(l, Field::Qx(0), qx);
                    store.set4(l, Field::Qy(0), qy);
                }
            }
            Phase::QDerivativesInner(j) => {
                let (rb, wb) = ((j - 1) % 2, j % 2);
                for l in 0..n_owned {
                    let (qx, qy) = q_derivatives(mesh, &*store, l, Some(rb)).map_err(to_global)?;
                    store.set4(l, Field::Qx(wb), qx);
                    store.set4(l, Field::Qy(wb), qy);
                }
            }
            Phase::FluxResidual => {
                let grad = match opts.order {
                    Order::First => None,
                    Order::Second => Some(final_buffer(opts.n_inner)),
                };
                match opts.residual_mode {
                    ResidualMode::Fused => {
                        for l in 0..n_owned {
                            let r = flux_residual(mesh, &*store, l, opts.gas, grad).map_err(to_global)?;
                            store.set4(l, Field::FluxRes, r.0);
                        }
                    }
                    ResidualMode::Split4 => {
                        let mut mark = t0;
                        for (pass, dir) in Direction::ALL.into_iter().enumerate() {
                            for l in 0..n_owned {
                                let d = if mesh.kind(l).uses_split_stencils() {
                                    directional_flux_derivative(mesh, &*store, l, dir, opts.gas, grad)
                                        .map_err(to_global)?
                                } else {
                                    FluxVector::ZERO
                                };
                                let sum = if pass == 0 {
                                    d
                                } else {
                                    FluxVector(store.get4(l, Field::FluxRes)) + d
                                };
                                store.set4(l, Field::FluxRes, sum.0);
                            }
                            let now = Instant::now();
                            let secs = (now - mark).as_secs_f64();
                            times.add(Kernel::SPLIT[pass], secs);
                            times.add(Kernel::FluxResidual, secs);
                            mark = now;
                        }
                        return Ok(());
                    }
                }
            }
            Phase::Timestep => {
                for l in 0..n_owned {
                    let dt = local_timestep(mesh, &*store, l, opts.cfl, opts.gas);
                    store.set(l, Field::DeltaT, 0, dt);
                }
            }
            Phase::StateUpdate => {
                let mut mass = Vec::with_capacity(n_owned);
                for l in 0..n_owned {
                    let dt = store.get(l, Field::DeltaT, 0);
                    let r = FluxVector(store.get4(l, Field::FluxRes));
                    let (new, du) = state_update(mesh, &*store, l, dt, r, opts.gas, FreeStream(opts.free_stream))
                        .map_err(to_global)?;
                    store.set4(l, Field::Prim, new.to_array());
                    mass.push(du.0[0]);
                }
                drop(guard);
                times.add(Kernel::StateUpdate, t0.elapsed().as_secs_f64());
                self.report_mass_changes(p, iteration, &mass, times);
                return Ok(());
            }
        }
        times.add(phase.kernel(), t0.elapsed().as_secs_f64());
        Ok(())
    }

    fn report_mass_changes(&self, p: usize, iteration: usize, mass: &[f64], times: &mut KernelTimes) {
        let complete = {
            let mut pending = self.pending.lock().expect("residue lock poisoned");
            let slot = pending.entry(iteration).or_insert_with(|| Pending {
                values: vec![0.0; self.n_points],
                remaining: self.parts.len(),
            });
            for (&g, &d) in self.parts[p].view.global.iter().zip(mass) {
                slot.values[g] = d;
            }
            slot.remaining -= 1;
            if slot.remaining == 0 {
                pending.remove(&iteration)
            } else {
                None
            }
        };
        if let Some(done) = complete {
            let t0 = Instant::now();
            let residue = residue_norm(&done.values, self.n_points);
            times.add(Kernel::Residue, t0.elapsed().as_secs_f64());
            let wall = self.start.elapsed().as_secs_f64();
            self.residues
                .lock()
                .expect("residue lock poisoned")
                .push((iteration, residue, wall));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plan_shapes() {
        assert_eq!(
            phase_plan(Order::Second, 3),
            vec![
                Phase::QVariables,
                Phase::QDerivativesInit,
                Phase::QDerivativesInner(1),
                Phase::QDerivativesInner(2),
                Phase::QDerivativesInner(3),
                Phase::FluxResidual,
                Phase::Timestep,
                Phase::StateUpdate,
            ]
        );
        assert_eq!(phase_plan(Order::First, 3).len(), 4);
    }

    #[test]
    fn no_phase_overwrites_what_its_peers_gather() {
        // A partition may run phase k while a neighbour runs phase k, so the
        // field written in phase k must differ from every field gathered in k.
        for n_inner in 1..6 {
            for order in [Order::First, Order::Second] {
                for phase in phase_plan(order, n_inner) {
                    let written: Vec<Field> = match phase {
                        Phase::QVariables => vec![Field::Q],
                        Phase::QDerivativesInit => vec![Field::Qx(0), Field::Qy(0)],
                        Phase::QDerivativesInner(j) => vec![Field::Qx(j % 2), Field::Qy(j % 2)],
                        Phase::FluxResidual => vec![Field::FluxRes],
                        Phase::Timestep => vec![Field::DeltaT],
                        Phase::StateUpdate => vec![Field::Prim],
                    };
                    for f in gathered_fields(phase, order, n_inner) {
                        assert!(!written.contains(&f), "{phase:?} {f:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn relative_log_rules() {
        assert_eq!(relative_log(0.0, 0.0), 0.0);
        assert_eq!(relative_log(1e-3, 1e-1), -2.0);
    }
}
