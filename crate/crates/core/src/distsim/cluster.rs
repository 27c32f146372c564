use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::codec::{decode_entries, encode_entries_into, Encoding, HEADER_BYTES};
use super::metrics::{CommMetrics, MigrationEvent, SuperstepMetrics};
use super::migrate::{apply_migration, maybe_migrate, plan_migration, CostModel, EDGE_COST_SECONDS};
use super::replicate::{replicate_hubs, ReplicationPlan, DEFAULT_REPLICATION_THRESHOLD};
use super::{DistError, PartitionAssignment};
use crate::engine::{CommFlags, GatherApply};
use crate::m2g::Graph;
use crate::scalar::Scalar;

/// Communication and balancing policies of a simulated run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Policies {
    pub merge: bool,
    pub replicate_hubs: bool,
    pub delta_encode: bool,
    pub migrate: bool,
    pub replication_threshold: usize,
    pub cost: CostModel,
}

impl Default for Policies {
    fn default() -> Self {
        Policies {
            merge: true,
            replicate_hubs: false,
            delta_encode: false,
            migrate: false,
            replication_threshold: DEFAULT_REPLICATION_THRESHOLD,
            cost: CostModel::default(),
        }
    }
}

impl Policies {
    pub fn none() -> Self {
        Policies { merge: false, ..Self::default() }
    }

    /// All sixteen on/off combinations of the four policies.
    pub fn all_subsets() -> Vec<Policies> {
        (0..16u8)
            .map(|bits| Policies {
                merge: bits & 1 != 0,
                replicate_hubs: bits & 2 != 0,
                delta_encode: bits & 4 != 0,
                migrate: bits & 8 != 0,
                ..Self::default()
            })
            .collect()
    }

    pub fn from_comm(comm: &CommFlags) -> Self {
        Policies {
            merge: comm.merge,
            replicate_hubs: comm.replicate_hubs,
            delta_encode: comm.delta_encode,
            ..Self::none()
        }
    }

    pub fn encoding(&self) -> Encoding {
        if self.delta_encode {
            Encoding::Delta
        } else {
            Encoding::Raw
        }
    }
}

/// What one shard produces in the gather half of a superstep.
struct ShardOutput<T> {
    local: Vec<T>,
    local_work: usize,
    /// One stream per receiving shard, in ascending shard order.
    outgoing: Vec<Outgoing>,
    pre_merge: usize,
    post_merge: usize,
    raw_bytes: usize,
    gathers: usize,
}

/// Encoded batches from one shard to another, back to back.
struct Outgoing {
    dst_shard: usize,
    batches: usize,
    bytes: Vec<u8>,
}

/// A simulated cluster of shards running synchronous supersteps over one
/// graph. Shard state is private; shards exchange only encoded batches.
pub struct Cluster<'g, T> {
    graph: &'g Graph<T>,
    assignment: PartitionAssignment,
    replication: Option<ReplicationPlan>,
    owners: Vec<u32>,
    hub_mask: Vec<bool>,
    policies: Policies,
    superstep: u32,
    metrics: CommMetrics,
}

impl<'g, T: Scalar> Cluster<'g, T> {
    pub fn new(graph: &'g Graph<T>, shards: usize, policies: Policies) -> Result<Self, DistError> {
        let assignment = PartitionAssignment::even(graph.vertex_count(), shards)?;
        let replication = policies
            .replicate_hubs
            .then(|| replicate_hubs(graph, &assignment, policies.replication_threshold));
        let hub_mask = match &replication {
            Some(plan) => plan.mask(graph.vertex_count()),
            None => vec![false; graph.vertex_count()],
        };
        let owners = assignment.owners();
        Ok(Cluster {
            graph,
            assignment,
            replication,
            owners,
            hub_mask,
            policies,
            superstep: 0,
            metrics: CommMetrics::default(),
        })
    }

    pub fn assignment(&self) -> &PartitionAssignment {
        &self.assignment
    }

    pub fn replication(&self) -> Option<&ReplicationPlan> {
        self.replication.as_ref()
    }

    pub fn metrics(&self) -> &CommMetrics {
        &self.metrics
    }

    pub fn into_metrics(self) -> CommMetrics {
        self.metrics
    }

    fn gather_shard<P: GatherApply<T>>(&self, s: usize, owners: &[u32], states: &[P::State], prog: &P) -> ShardOutput<T> {
        let g = self.graph;
        let asg = &self.assignment;
        let own = asg.range(s);
        let mut gathers = 0;
        let mut local_work = 0;
        let local: Vec<T> = own
            .clone()
            .map(|v| {
                let (srcs, ws) = g.in_edges(v);
                let mut acc = prog.identity();
                for (&src, &w) in srcs.iter().zip(ws) {
                    let src = src as usize;
                    if owners[src] as usize == s || self.hub_mask[src] {
                        acc = prog.combine(acc, prog.gather(&states[src], w));
                        local_work += 1;
                    }
                }
                acc
            })
            .collect();
        gathers += local_work;

        let encoding = self.policies.encoding();
        let mut out = ShardOutput { local, local_work, outgoing: Vec::new(), pre_merge: 0, post_merge: 0, raw_bytes: 0, gathers: 0 };
        for t in (0..asg.shard_count()).filter(|&t| t != s) {
            // messages arrive grouped by ascending destination, so merging
            // folds each run of equal destinations in place
            let merge = self.policies.merge;
            let mut raw: Vec<(u64, T)> = Vec::new();
            let mut sent = 0;
            for dst in asg.range(t) {
                let (srcs, ws) = g.in_edges(dst);
                let lo = srcs.partition_point(|&x| (x as usize) < own.start);
                let hi = srcs.partition_point(|&x| (x as usize) < own.end);
                for k in lo..hi {
                    let src = srcs[k] as usize;
                    if self.hub_mask[src] {
                        continue;
                    }
                    let msg = prog.gather(&states[src], ws[k]);
                    sent += 1;
                    match raw.last_mut() {
                        Some((last, acc)) if merge && *last == dst as u64 => *acc = prog.combine(*acc, msg),
                        _ => raw.push((dst as u64, msg)),
                    }
                }
            }
            gathers += sent;
            out.pre_merge += sent;
            let header = (s as u32, t as u32, self.superstep);
            let mut stream = Vec::new();
            let mut batches = 0;
            let mut ship = |entries: &[(u64, T)], out: &mut ShardOutput<T>| {
                out.post_merge += entries.len();
                out.raw_bytes += HEADER_BYTES + entries.len() * (8 + T::KIND.width());
                encode_entries_into(&mut stream, header, entries, encoding);
                batches += 1;
            };
            if merge {
                if !raw.is_empty() {
                    ship(&raw, &mut out);
                }
            } else {
                for m in &raw {
                    ship(std::slice::from_ref(m), &mut out);
                }
            }
            if batches > 0 {
                out.outgoing.push(Outgoing { dst_shard: t, batches, bytes: stream });
            }
        }
        out.gathers = gathers;
        out
    }

    /// One gather, communicate, apply round over all vertices.
    pub fn superstep<P: GatherApply<T>>(&mut self, states: &[P::State], prog: &P) -> Result<Vec<P::State>, DistError> {
        let m = self.graph.vertex_count();
        if states.len() != m {
            return Err(DistError::LengthMismatch { expected: m, found: states.len() });
        }
        let p = self.assignment.shard_count();
        let outputs: Vec<ShardOutput<T>> =
            (0..p).into_par_iter().map(|s| self.gather_shard(s, &self.owners, states, prog)).collect();

        let mut step = SuperstepMetrics {
            mirror_updates: self.replication.as_ref().map_or(0, |r| r.mirror_updates()),
            ..SuperstepMetrics::default()
        };
        for o in &outputs {
            step.pre_merge += o.pre_merge;
            step.post_merge += o.post_merge;
            step.raw_bytes += o.raw_bytes;
            for stream in &o.outgoing {
                step.batches += stream.batches;
                step.encoded_bytes += stream.bytes.len();
                if outputs[stream.dst_shard].local_work > 0 {
                    step.overlap_eligible_bytes += stream.bytes.len();
                }
            }
        }
        step.shard_loads = outputs.iter().map(|o| o.gathers as f64 * EDGE_COST_SECONDS).collect();

        let applied: Vec<Result<Vec<P::State>, DistError>> = (0..p)
            .into_par_iter()
            .map(|t| {
                let range = self.assignment.range(t);
                let mut combined = outputs[t].local.clone();
                for stream in outputs.iter().flat_map(|o| &o.outgoing).filter(|o| o.dst_shard == t) {
                    let mut rest = &stream.bytes[..];
                    while !rest.is_empty() {
                        let (_, used) = decode_entries::<T>(rest, |dst, msg| {
                            let slot = &mut combined[dst as usize - range.start];
                            *slot = prog.combine(*slot, msg);
                        })?;
                        rest = &rest[used..];
                    }
                }
                Ok(combined.iter().zip(&states[range]).map(|(&msg, old)| prog.apply(msg, old)).collect())
            })
            .collect();
        let mut next = Vec::with_capacity(m);
        for part in applied {
            next.extend(part?);
        }

        if self.policies.migrate {
            if let Some(plan) = plan_migration(self.graph, &self.assignment, &step.shard_loads) {
                let decision = maybe_migrate(&step.shard_loads, plan.bytes, &self.policies.cost);
                step.migrations.push(MigrationEvent {
                    triggered: decision.migrate,
                    from: plan.from,
                    to: plan.to,
                    vertices: plan.vertices.len(),
                    bytes: plan.bytes,
                    imbalance_seconds: decision.imbalance_seconds,
                    transfer_seconds: decision.transfer_seconds,
                });
                if decision.migrate {
                    self.assignment = apply_migration(&self.assignment, &plan);
                    self.owners = self.assignment.owners();
                }
            }
        }
        self.metrics.supersteps.push(step);
        self.superstep += 1;
        Ok(next)
    }

    /// Records a superstep that needs no messages, such as a row-local
    /// operation; loads are the in-edges each shard touches.
    pub(crate) fn local_superstep(&mut self, edges_per_vertex: impl Fn(usize) -> usize) {
        let shard_loads = self
            .assignment
            .ranges()
            .map(|r| r.map(&edges_per_vertex).sum::<usize>() as f64 * EDGE_COST_SECONDS)
            .collect();
        self.metrics.supersteps.push(SuperstepMetrics { shard_loads, ..SuperstepMetrics::default() });
        self.superstep += 1;
    }
}

/// One superstep of `prog` on `p` simulated shards.
pub fn run_distributed<T: Scalar, P: GatherApply<T>>(
    g: &Graph<T>,
    states: &[P::State],
    prog: &P,
    p: usize,
    policies: &Policies,
) -> Result<(Vec<P::State>, CommMetrics), DistError> {
    let mut cluster = Cluster::new(g, p, *policies)?;
    let out = cluster.superstep(states, prog)?;
    Ok((out, cluster.into_metrics()))
}
