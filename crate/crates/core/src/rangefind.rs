//! Range finding: sequences and trees of range labels, the transforms that
//! turn contention-resolution schedules into them, and their evaluators.

use crate::algorithms::{run_nocd, UniformScheduleCd, UniformScheduleNoCd};
use crate::dist::{
    ceil_log2, ceil_log2_recip, compensated_sum, log2_log2, range_count, CondensedDistribution,
    SizeDistribution,
};
use crate::parallel::map_trials;
use crate::seed::trial_rng;
use crate::{Error, Result};

/// Minimum trial count for a reduction check to be conclusive.
pub const MIN_CONCLUSIVE_TRIALS: u64 = 30;

fn clamp_label(p: f64, m: u32) -> u32 {
    ceil_log2_recip(p).clamp(1, m)
}

fn check_range(target: u32, m: u32) -> Result<()> {
    if target == 0 || target > m {
        return Err(Error::InvalidParameter(format!(
            "range {target} outside 1..={m}"
        )));
    }
    Ok(())
}

/// A finite sequence of range labels in `1..=m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RangeFindingSequence {
    values: Vec<u32>,
    m: u32,
}

impl RangeFindingSequence {
    pub fn new(values: Vec<u32>, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter(
                "range count must be positive".into(),
            ));
        }
        if let Some(&v) = values.iter().find(|&&v| v == 0 || v > m) {
            return Err(Error::InvalidParameter(format!(
                "sequence value {v} outside 1..={m}"
            )));
        }
        Ok(RangeFindingSequence { values, m })
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn range_count(&self) -> u32 {
        self.m
    }

    /// First 1-based step whose value is within `radius` of `target`.
    pub fn solve(&self, target: u32, radius: u32) -> Option<usize> {
        self.values
            .iter()
            .position(|&v| v.abs_diff(target) <= radius)
            .map(|i| i + 1)
    }
}

/// Turns a no-CD schedule into a range-finding sequence: each round
/// contributes its clamped label `ceil(log2(1/p))` followed by the next
/// range index of a `1..=m` cycle.
pub fn rf_construct(schedule: &UniformScheduleNoCd, n: u64) -> RangeFindingSequence {
    let m = range_count(n);
    let values = schedule
        .probs()
        .iter()
        .enumerate()
        .flat_map(|(i, &p)| [clamp_label(p, m), (i as u32 % m) + 1])
        .collect();
    RangeFindingSequence { values, m }
}

pub fn solve_sequence(sequence: &RangeFindingSequence, target: u32, radius: u32) -> Option<usize> {
    sequence.solve(target, radius)
}

/// `sum_i q_i * solve(S, i, radius)`.
pub fn expected_sequence_time(
    sequence: &RangeFindingSequence,
    y: &CondensedDistribution,
    radius: u32,
) -> Result<f64> {
    expect_over(
        y,
        sequence.range_count(),
        |range| sequence.solve(range, radius).map(|t| t as f64),
        radius,
    )
}

fn expect_over(
    y: &CondensedDistribution,
    m: u32,
    time: impl Fn(u32) -> Option<f64>,
    radius: u32,
) -> Result<f64> {
    if y.range_count() != m as usize {
        return Err(Error::RangeCountMismatch {
            left: m as usize,
            right: y.range_count(),
        });
    }
    let mut terms = Vec::new();
    for range in 1..=m {
        let q = y.prob(range);
        if q > 0.0 {
            let t = time(range).ok_or(Error::Coverage { range, radius })?;
            terms.push(q * t);
        }
    }
    Ok(compensated_sum(terms))
}

/// Radius `floor(alpha * log2 log2 n)`.
pub fn rf_radius(n: u64, alpha: f64) -> u32 {
    (alpha * log2_log2(n)).max(0.0).floor() as u32
}

/// Tree radius `floor(alpha * log2 log2 log2 n)`; zero when `log2 log2 n <= 1`.
pub fn tree_radius(n: u64, alpha: f64) -> u32 {
    let ll = log2_log2(n);
    if ll <= 1.0 {
        return 0;
    }
    (alpha * ll.log2()).max(0.0).floor() as u32
}

fn require_loglog(n: u64) -> Result<f64> {
    let ll = log2_log2(n);
    if ll <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "n = {n} too small for a log log n scale"
        )));
    }
    Ok(ll)
}

/// Lower bound on the expected sequence time at radius `alpha log log n`:
/// `2^H / (4 alpha log2 log2 n)`.
pub fn sequence_entropy_floor(entropy: f64, alpha: f64, n: u64) -> Result<f64> {
    Ok(entropy.exp2() / (4.0 * alpha * require_loglog(n)?))
}

/// The tree floor with the constant of the original argument:
/// `H - ceil(log2(alpha * log2 log2 log2 n))`.
pub fn tree_entropy_floor(entropy: f64, alpha: f64, n: u64) -> Result<f64> {
    let lll = require_loglog(n)?.log2();
    let scale = alpha * lll;
    if scale.is_nan() || scale <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "n = {n} too small for a log log log n scale"
        )));
    }
    Ok(entropy - scale.log2().ceil())
}

/// Slack in a bound that does hold for every tree: a depth-`d` hit at
/// radius `r` is named by a self-delimiting depth, `d - 1` path bits and
/// one of `2r + 1` offsets, so `E + 2 log2(E + 1) >= H + 1 - log2(2r + 1)`.
/// Non-negative whenever the bound is satisfied.
pub fn tree_code_slack(expected_depth: f64, entropy: f64, radius: u32) -> f64 {
    expected_depth + 2.0 * (expected_depth + 1.0).log2()
        - (entropy + 1.0 - (2.0 * radius as f64 + 1.0).log2())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Node {
    label: u32,
    depth: u32,
    children: [Option<usize>; 2],
}

/// A binary tree of range labels; child 0 follows silence, child 1 collision.
/// The root has depth 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RangeFindingTree {
    nodes: Vec<Node>,
    m: u32,
}

/// Builder handle for [`RangeFindingTree::add_child`].
pub type NodeId = usize;

impl RangeFindingTree {
    pub fn with_root(label: u32, m: u32) -> Result<Self> {
        check_range(label, m)?;
        Ok(RangeFindingTree {
            nodes: vec![Node {
                label,
                depth: 1,
                children: [None, None],
            }],
            m,
        })
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn add_child(&mut self, parent: NodeId, bit: bool, label: u32) -> Result<NodeId> {
        check_range(label, self.m)?;
        let depth = self.nodes[parent].depth + 1;
        let id = self.nodes.len();
        self.nodes.push(Node {
            label,
            depth,
            children: [None, None],
        });
        self.nodes[parent].children[bit as usize] = Some(id);
        Ok(id)
    }

    pub fn range_count(&self) -> u32 {
        self.m
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn label(&self, node: NodeId) -> u32 {
        self.nodes[node].label
    }

    pub fn depth(&self, node: NodeId) -> u32 {
        self.nodes[node].depth
    }

    pub fn child(&self, node: NodeId, bit: bool) -> Option<NodeId> {
        self.nodes[node].children[bit as usize]
    }

    pub fn max_depth(&self) -> u32 {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    /// The node reached by following `history` from the root.
    pub fn follow(&self, history: &[bool]) -> Option<NodeId> {
        history
            .iter()
            .try_fold(self.root(), |node, &bit| self.child(node, bit))
    }

    /// Smallest depth of a node whose label is within `radius` of `target`.
    pub fn solve(&self, target: u32, radius: u32) -> Option<u32> {
        self.nodes
            .iter()
            .filter(|n| n.label.abs_diff(target) <= radius)
            .map(|n| n.depth)
            .min()
    }

    fn push_tree(
        &mut self,
        rule: &UniformScheduleCd,
        insert: &[bool],
        history: &mut Vec<bool>,
    ) -> NodeId {
        let depth = history.len() as u32 + 1;
        let p = rule
            .probability(history)
            .expect("history within rule depth");
        let id = self.nodes.len();
        self.nodes.push(Node {
            label: clamp_label(p, self.m),
            depth,
            children: [None, None],
        });
        if history.len() == insert.len() && history[..] == insert[..] {
            let star = self.push_canonical(1, depth + 1);
            self.nodes[id].children[0] = Some(star);
        } else if depth < rule.max_depth() {
            for bit in [false, true] {
                history.push(bit);
                let child = self.push_tree(rule, insert, history);
                history.pop();
                self.nodes[id].children[bit as usize] = Some(child);
            }
        }
        id
    }

    /// Heap-shaped tree holding every label `1..=m` in breadth-first order.
    fn push_canonical(&mut self, label: u32, depth: u32) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(Node {
            label,
            depth,
            children: [None, None],
        });
        for (slot, child) in [2 * label, 2 * label + 1].into_iter().enumerate() {
            if child <= self.m {
                let c = self.push_canonical(child, depth + 1);
                self.nodes[id].children[slot] = Some(c);
            }
        }
        id
    }
}

/// Depth at which the complete tree of all ranges is inserted:
/// `max(1, ceil(log2 m))`.
pub fn insertion_depth(n: u64) -> u32 {
    ceil_log2(range_count(n) as u64).max(1)
}

/// Labels every history `h` of a CD schedule with `ceil(log2(1/A(h)))`
/// (clamped) and replaces the children of the node at [`insertion_depth`]
/// on the leftmost path with a complete tree of all ranges.
pub fn cd_tree_transform(rule: &UniformScheduleCd, n: u64) -> Result<RangeFindingTree> {
    let path = vec![false; insertion_depth(n) as usize - 1];
    cd_tree_transform_along(rule, n, &path)
}

/// As [`cd_tree_transform`], inserting below the node reached by `path`,
/// which must have length `insertion_depth(n) - 1`.
pub fn cd_tree_transform_along(
    rule: &UniformScheduleCd,
    n: u64,
    path: &[bool],
) -> Result<RangeFindingTree> {
    let depth = insertion_depth(n);
    if path.len() != depth as usize - 1 {
        return Err(Error::InvalidParameter(format!(
            "insertion path has length {}, expected {}",
            path.len(),
            depth - 1
        )));
    }
    if rule.max_depth() < depth {
        return Err(Error::Precondition(format!(
            "schedule covers {} rounds, transform needs {depth}",
            rule.max_depth()
        )));
    }
    let mut tree = RangeFindingTree {
        nodes: Vec::new(),
        m: range_count(n),
    };
    tree.push_tree(rule, path, &mut Vec::new());
    Ok(tree)
}

pub fn solve_tree(tree: &RangeFindingTree, target: u32, radius: u32) -> Option<u32> {
    tree.solve(target, radius)
}

pub fn expected_tree_time(
    tree: &RangeFindingTree,
    y: &CondensedDistribution,
    radius: u32,
) -> Result<f64> {
    expect_over(
        y,
        tree.range_count(),
        |r| tree.solve(r, radius).map(f64::from),
        radius,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionReport {
    pub trials: u64,
    /// Monte Carlo mean of contention-resolution rounds.
    pub mean_rounds: f64,
    pub std_error: f64,
    pub radius: u32,
    /// Expected range-finding time of the constructed sequence.
    pub rf_time: f64,
    pub violation: bool,
    pub inconclusive: bool,
}

/// Compares the expected range-finding time of `rf_construct(schedule)`
/// with twice the simulated contention-resolution time under `x`. A
/// violation is flagged when the former exceeds `2 t + 3 se`.
pub fn reduction_check_nocd(
    schedule: &UniformScheduleNoCd,
    x: &SizeDistribution,
    trials: u64,
    alpha: f64,
    seed: u64,
    workers: usize,
) -> Result<ReductionReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let results = map_trials(trials, workers, |t| {
        let mut rng = trial_rng(seed, t);
        let k = x.sample(&mut rng);
        (k, run_nocd(schedule, k, &mut rng))
    })?;
    if let Some((k, _)) = results.iter().find(|(_, r)| !r.solved) {
        return Err(Error::Precondition(format!(
            "schedule of {} rounds failed to resolve k = {k}",
            schedule.len()
        )));
    }
    let rounds: Vec<f64> = results.iter().map(|(_, r)| r.rounds as f64).collect();
    let count = rounds.len() as f64;
    let mean = compensated_sum(rounds.iter().copied()) / count;
    let var = if rounds.len() > 1 {
        compensated_sum(rounds.iter().map(|r| (r - mean).powi(2))) / (count - 1.0)
    } else {
        0.0
    };
    let std_error = (var / count).sqrt();
    let n = x.max_size();
    let radius = rf_radius(n, alpha);
    let rf_time = expected_sequence_time(&rf_construct(schedule, n), &x.condense(), radius)?;
    Ok(ReductionReport {
        trials,
        mean_rounds: mean,
        std_error,
        radius,
        rf_time,
        violation: rf_time > 2.0 * mean + 3.0 * std_error,
        inconclusive: trials < MIN_CONCLUSIVE_TRIALS,
    })
}
