//! Benchmark statistics, exhaustive verification and fault campaigns over
//! PLA files. Each output is treated as a separate single-output function
//! with variables in file column order.

use std::fmt::Write as _;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::diagram::Diagram;
use crate::edge::{edge_campaign, EdgeMode};
use crate::error::{BddError, Result};
use crate::fault::{inject, inject_random_indices, recover_index_ut, Component, FaultOverlay};
use crate::fault::{node_range, ParentMap};
use crate::index_resilient::{ir_reduce, is_index_resilient, is_ir_reduced};
use crate::node::NodeId;
use crate::ops::{from_cubes, DcPolicy};
use crate::pla::PlaFile;
use crate::quasi::{build_qr, has_mergeable, is_level_complete};
use crate::resilient::index_reconstruct;
use crate::unique::UniqueTable;

/// The three diagrams built for one output.
#[derive(Clone, Debug)]
pub struct OutputDiagrams {
    pub ro: Diagram,
    pub qr: Diagram,
    pub ir: Diagram,
}

pub fn output_diagrams(pla: &PlaFile, output: usize, policy: DcPolicy) -> Result<OutputDiagrams> {
    let ro = from_cubes(
        pla.num_inputs as u32,
        &pla.onset(output),
        &pla.dcset(output),
        policy,
    )?;
    let qr = build_qr(&ro);
    let ir = ir_reduce(&qr)?;
    Ok(OutputDiagrams { ro, qr, ir })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OutputStats {
    pub output: usize,
    pub qr: usize,
    pub ro: usize,
    pub ir: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StatsRow {
    pub benchmark: String,
    pub inputs: usize,
    pub outputs: usize,
    pub qr_nodes: usize,
    pub ro_nodes: usize,
    pub ir_nodes: usize,
    pub per_output: Vec<OutputStats>,
}

/// Reference node counts for one published benchmark row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ReferenceRow {
    pub name: &'static str,
    pub inputs: usize,
    pub outputs: usize,
    pub qr: usize,
    pub ro: usize,
    pub ir: usize,
}

const fn row(
    name: &'static str,
    inputs: usize,
    outputs: usize,
    qr: usize,
    ro: usize,
    ir: usize,
) -> ReferenceRow {
    ReferenceRow {
        name,
        inputs,
        outputs,
        qr,
        ro,
        ir,
    }
}

/// Published QR/RO/IR internal node counts for LGSynth93 benchmarks.
pub const REFERENCE_TABLE: [ReferenceRow; 27] = [
    row("al2", 16, 47, 1218, 269, 504),
    row("alcom", 15, 38, 946, 175, 424),
    row("alu1", 12, 8, 206, 31, 109),
    row("amd", 14, 24, 1318, 739, 1021),
    row("b10", 15, 11, 985, 617, 815),
    row("b2", 16, 17, 6613, 5568, 5902),
    row("b9", 16, 5, 453, 196, 334),
    row("br1", 12, 8, 346, 242, 265),
    row("br2", 12, 8, 285, 174, 190),
    row("clpl", 11, 5, 140, 53, 84),
    row("co14", 14, 1, 39, 27, 27),
    row("gary", 15, 11, 988, 625, 814),
    row("in2", 19, 10, 4006, 2476, 2988),
    row("intb", 15, 7, 1862, 1228, 1631),
    row("mp2d", 14, 14, 413, 151, 299),
    row("newapla", 12, 10, 272, 78, 134),
    row("newapla1", 12, 7, 155, 50, 81),
    row("newtpla", 15, 5, 186, 83, 120),
    row("opa", 17, 69, 3091, 1164, 2315),
    row("pdc", 16, 40, 6204, 4754, 5563),
    row("ryy6", 16, 1, 50, 23, 32),
    row("shift", 19, 10, 1206, 189, 667),
    row("t2", 17, 16, 728, 306, 434),
    row("t3", 12, 8, 300, 111, 227),
    row("t4", 12, 8, 399, 213, 320),
    row("test2", 11, 35, 11678, 11195, 11431),
    row("tial", 14, 8, 2230, 1677, 1934),
];

pub fn reference_row(name: &str) -> Option<&'static ReferenceRow> {
    REFERENCE_TABLE.iter().find(|r| r.name == name)
}

/// Measured minus reference, per column.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Delta {
    pub qr: i64,
    pub ro: i64,
    pub ir: i64,
}

impl Delta {
    pub fn is_zero(&self) -> bool {
        self.qr == 0 && self.ro == 0 && self.ir == 0
    }
}

impl StatsRow {
    pub fn reference(&self) -> Option<&'static ReferenceRow> {
        reference_row(&self.benchmark)
    }

    pub fn delta(&self) -> Option<Delta> {
        self.reference().map(|r| Delta {
            qr: self.qr_nodes as i64 - r.qr as i64,
            ro: self.ro_nodes as i64 - r.ro as i64,
            ir: self.ir_nodes as i64 - r.ir as i64,
        })
    }

    /// Outputs violating `ro <= ir <= qr`.
    pub fn sandwich_violations(&self) -> Vec<usize> {
        self.per_output
            .iter()
            .filter(|o| !(o.ro <= o.ir && o.ir <= o.qr))
            .map(|o| o.output)
            .collect()
    }
}

pub fn stats(name: &str, pla: &PlaFile, policy: DcPolicy) -> Result<StatsRow> {
    let mut row = StatsRow {
        benchmark: name.to_string(),
        inputs: pla.num_inputs,
        outputs: pla.num_outputs,
        qr_nodes: 0,
        ro_nodes: 0,
        ir_nodes: 0,
        per_output: Vec::with_capacity(pla.num_outputs),
    };
    for o in 0..pla.num_outputs {
        let d = output_diagrams(pla, o, policy)?;
        let s = OutputStats {
            output: o,
            qr: d.qr.count_nodes(),
            ro: d.ro.count_nodes(),
            ir: d.ir.count_nodes(),
        };
        row.qr_nodes += s.qr;
        row.ro_nodes += s.ro;
        row.ir_nodes += s.ir;
        row.per_output.push(s);
    }
    Ok(row)
}

#[derive(Serialize)]
struct StatsCsvRecord<'a> {
    benchmark: &'a str,
    inputs: usize,
    outputs: usize,
    qr_nodes: usize,
    ro_nodes: usize,
    ir_nodes: usize,
    ref_qr: Option<usize>,
    ref_ro: Option<usize>,
    ref_ir: Option<usize>,
    delta_qr: Option<i64>,
    delta_ro: Option<i64>,
    delta_ir: Option<i64>,
}

pub fn write_stats_csv<W: Write>(rows: &[StatsRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        let reference = r.reference();
        let delta = r.delta();
        w.serialize(StatsCsvRecord {
            benchmark: &r.benchmark,
            inputs: r.inputs,
            outputs: r.outputs,
            qr_nodes: r.qr_nodes,
            ro_nodes: r.ro_nodes,
            ir_nodes: r.ir_nodes,
            ref_qr: reference.map(|x| x.qr),
            ref_ro: reference.map(|x| x.ro),
            ref_ir: reference.map(|x| x.ir),
            delta_qr: delta.map(|x| x.qr),
            delta_ro: delta.map(|x| x.ro),
            delta_ir: delta.map(|x| x.ir),
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_stats_json<W: Write>(rows: &[StatsRow], out: W) -> serde_json::Result<()> {
    serde_json::to_writer_pretty(out, rows)
}

fn signed(x: Option<i64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:+}"))
}

/// Human-readable table, one line per benchmark.
pub fn format_stats_table(rows: &[StatsRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<12} {:>3} {:>3} {:>7} {:>7} {:>7} {:>7} {:>7} {:>7}",
        "benchmark", "in", "out", "qr", "ro", "ir", "d_qr", "d_ro", "d_ir"
    );
    for r in rows {
        let d = r.delta();
        let _ = writeln!(
            s,
            "{:<12} {:>3} {:>3} {:>7} {:>7} {:>7} {:>7} {:>7} {:>7}",
            r.benchmark,
            r.inputs,
            r.outputs,
            r.qr_nodes,
            r.ro_nodes,
            r.ir_nodes,
            signed(d.map(|x| x.qr)),
            signed(d.map(|x| x.ro)),
            signed(d.map(|x| x.ir)),
        );
    }
    s
}

/// Truth table of an output straight from its cubes; x0 is the most
/// significant bit of the index.
pub fn cube_truth_table(pla: &PlaFile, output: usize, policy: DcPolicy) -> Vec<bool> {
    let n = pla.num_inputs;
    let mut table = vec![false; 1 << n];
    let mut mark = |cube: &str| {
        let mut base = 0usize;
        let mut free = Vec::new();
        for (i, c) in cube.bytes().enumerate() {
            let bit = 1 << (n - 1 - i);
            match c {
                b'1' => base |= bit,
                b'-' => free.push(bit),
                _ => {}
            }
        }
        for m in 0..1usize << free.len() {
            let mut k = base;
            for (j, bit) in free.iter().enumerate() {
                if m >> j & 1 == 1 {
                    k |= bit;
                }
            }
            table[k] = true;
        }
    };
    pla.onset(output).into_iter().for_each(&mut mark);
    if policy == DcPolicy::One {
        pla.dcset(output).into_iter().for_each(&mut mark);
    }
    table
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub output: usize,
    pub check: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub outputs: usize,
    /// Outputs whose semantic check was skipped for having too many inputs.
    pub semantic_skipped: usize,
    pub violations: Vec<Violation>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub policy: DcPolicy,
    /// Largest input count checked exhaustively.
    pub max_exhaustive_inputs: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            policy: DcPolicy::Zero,
            max_exhaustive_inputs: 20,
        }
    }
}

/// Checks one output's diagrams against `oracle` (when given) and against
/// the structural predicates of each form. Callers may hand in tampered
/// diagrams to exercise the checks.
pub fn check_output(output: usize, d: &OutputDiagrams, oracle: Option<&[bool]>) -> Vec<Violation> {
    let mut v = Vec::new();
    let mut fail = |check: &str| {
        v.push(Violation {
            output,
            check: check.to_string(),
        })
    };
    if let Some(table) = oracle {
        for (name, diagram) in [("ro", &d.ro), ("qr", &d.qr), ("ir", &d.ir)] {
            if diagram.truth_table() != table {
                fail(&format!("{name} differs from cube oracle"));
            }
        }
    }
    if !d.ro.iter().all(|(_, n)| !n.is_redundant()) || has_mergeable(&d.ro) {
        fail("ro not reduced");
    }
    if !is_level_complete(&d.qr) || has_mergeable(&d.qr) {
        fail("qr not quasi-reduced");
    }
    if !is_index_resilient(&d.ir) {
        fail("ir not index-resilient");
    }
    if !is_ir_reduced(&d.ir) || has_mergeable(&d.ir) {
        fail("ir not reduced");
    }
    let (ro, qr, ir) = (d.ro.count_nodes(), d.qr.count_nodes(), d.ir.count_nodes());
    if !(ro <= ir && ir <= qr) {
        fail("size order ro <= ir <= qr violated");
    }
    v
}

pub fn verify(pla: &PlaFile, opts: VerifyOptions) -> Result<VerifyReport> {
    let mut report = VerifyReport {
        outputs: pla.num_outputs,
        ..Default::default()
    };
    let exhaustive = pla.num_inputs <= opts.max_exhaustive_inputs;
    for o in 0..pla.num_outputs {
        let d = output_diagrams(pla, o, opts.policy)?;
        let oracle = exhaustive.then(|| cube_truth_table(pla, o, opts.policy));
        if !exhaustive {
            report.semantic_skipped += 1;
        }
        report
            .violations
            .extend(check_output(o, &d, oracle.as_deref()));
    }
    Ok(report)
}

/// One line of a campaign CSV. For the index modes `ambiguous` is always
/// zero; `mean_candidate_ratio` is the mean scanned range over `n` for
/// index-ut and the mean invocations per corrupted node for index-ir, and
/// `mean_probe_ratio` is unique-table probes over `n` (zero for index-ir,
/// which never reads the table).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CampaignRow {
    pub benchmark: String,
    pub output_idx: usize,
    pub table_size: usize,
    pub trials: usize,
    pub successes: usize,
    pub ambiguous: usize,
    pub mean_candidate_ratio: f64,
    pub mean_probe_ratio: f64,
    pub seed: u64,
}

impl CampaignRow {
    pub fn complete(&self) -> bool {
        self.successes == self.trials
    }
}

pub fn write_campaign_csv<W: Write>(rows: &[CampaignRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct IndexCampaign {
    pub trials: usize,
    pub successes: usize,
    pub mean_range_ratio: f64,
    pub mean_probe_ratio: f64,
}

/// Single-index faults on a reduced diagram, recovered through the unique
/// table. Each trial corrupts one random node and restores it afterwards.
pub fn index_ut_campaign(
    d: &Diagram,
    buckets: usize,
    trials: usize,
    seed: u64,
) -> Result<IndexCampaign> {
    let mut c = IndexCampaign::default();
    let m = d.count_nodes();
    if m == 0 {
        return Ok(c);
    }
    let table = UniqueTable::from_diagram(d, buckets);
    let parents = ParentMap::new(d);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut work = d.clone();
    let mut ov = FaultOverlay::new(d);
    let n = d.num_vars().max(1) as f64;
    for _ in 0..trials {
        let id = NodeId::from_slot(rng.random_range(0..m));
        let truth = d.node(id).index;
        inject(&mut work, &mut ov, id, Component::Index, &mut rng)?;
        let range = node_range(&work, &parents, &ov, id)?;
        // probes: levels scanned from the top of the range down to the hit
        let probes = range.upper.saturating_sub(truth) + 1;
        let got = recover_index_ut(&mut work, &mut ov, &table, &parents, id);
        c.trials += 1;
        if got == Ok(truth) {
            c.successes += 1;
        }
        c.mean_range_ratio += range.len() as f64 / n;
        c.mean_probe_ratio += probes as f64 / n;
        work.node_mut(id).index = truth;
        ov.clear(id, Component::Index);
    }
    c.mean_range_ratio /= c.trials as f64;
    c.mean_probe_ratio /= c.trials as f64;
    Ok(c)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct IrCampaign {
    pub trials: usize,
    /// Trials in which every corrupted index came back exactly.
    pub successes: usize,
    /// Repairs whose invocation count exceeded the corrupted nodes reachable
    /// from the repaired node.
    pub bound_violations: usize,
    pub max_invocations: usize,
    pub mean_invocations_per_fault: f64,
}

/// `faults` random index faults per trial on an index-resilient diagram,
/// each victim then repaired top-down from its children.
pub fn index_ir_campaign(
    d: &Diagram,
    faults: usize,
    trials: usize,
    seed: u64,
) -> Result<IrCampaign> {
    if !is_index_resilient(d) {
        return Err(BddError::Contract(
            "index-ir campaign needs an index-resilient diagram".into(),
        ));
    }
    let mut c = IrCampaign::default();
    if d.count_nodes() == 0 || faults == 0 {
        return Ok(c);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total_faults = 0;
    let mut total_invocations = 0;
    for _ in 0..trials {
        let mut work = d.clone();
        let mut ov = FaultOverlay::new(&work);
        let victims = inject_random_indices(&mut work, &mut ov, faults, &mut rng);
        total_faults += victims.len();
        for &v in &victims {
            let reachable = corrupted_reachable(&work, &ov, v);
            let r = index_reconstruct(&mut work, &mut ov, v)?;
            if r.invocations > reachable {
                c.bound_violations += 1;
            }
            c.max_invocations = c.max_invocations.max(r.invocations);
            total_invocations += r.invocations;
        }
        c.trials += 1;
        if ov.is_clean() && work.nodes() == d.nodes() {
            c.successes += 1;
        }
    }
    if total_faults > 0 {
        c.mean_invocations_per_fault = total_invocations as f64 / total_faults as f64;
    }
    Ok(c)
}

/// Internal nodes reachable from `id` (itself included) whose index is
/// flagged.
pub fn corrupted_reachable(d: &Diagram, ov: &FaultOverlay, id: NodeId) -> usize {
    let mut seen = vec![false; d.count_nodes()];
    let mut stack = vec![id];
    let mut count = 0;
    while let Some(x) = stack.pop() {
        let Some(s) = x.slot() else { continue };
        if std::mem::replace(&mut seen[s], true) {
            continue;
        }
        if ov.is_corrupt(x, Component::Index) {
            count += 1;
        }
        let n = d.node(x);
        stack.push(n.lo);
        stack.push(n.hi);
    }
    count
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CampaignMode {
    IndexUt,
    IndexIr,
    Edge,
}

#[derive(Clone, Debug)]
pub struct CampaignConfig {
    pub mode: CampaignMode,
    pub trials: usize,
    pub seed: u64,
    pub table_sizes: Vec<usize>,
    pub strict: bool,
    /// Index faults per trial in index-ir mode.
    pub faults: usize,
    pub policy: DcPolicy,
}

/// Runs the configured campaign on every non-constant output: index-ut and
/// edge modes on the reduced diagram, index-ir on the index-resilient one.
pub fn run_campaign(name: &str, pla: &PlaFile, cfg: &CampaignConfig) -> Result<Vec<CampaignRow>> {
    let mut rows = Vec::new();
    for o in 0..pla.num_outputs {
        let d = output_diagrams(pla, o, cfg.policy)?;
        if d.ro.count_nodes() == 0 {
            log::info!("{name}: output {o} is constant, skipped");
            continue;
        }
        let base = |table_size, trials, successes| CampaignRow {
            benchmark: name.to_string(),
            output_idx: o,
            table_size,
            trials,
            successes,
            ambiguous: 0,
            mean_candidate_ratio: 0.0,
            mean_probe_ratio: 0.0,
            seed: cfg.seed,
        };
        match cfg.mode {
            CampaignMode::IndexUt => {
                for &size in &cfg.table_sizes {
                    let c = index_ut_campaign(&d.ro, size, cfg.trials, cfg.seed)?;
                    rows.push(CampaignRow {
                        mean_candidate_ratio: c.mean_range_ratio,
                        mean_probe_ratio: c.mean_probe_ratio,
                        ..base(size, c.trials, c.successes)
                    });
                }
            }
            CampaignMode::IndexIr => {
                let c = index_ir_campaign(&d.ir, cfg.faults, cfg.trials, cfg.seed)?;
                let ok = c.successes - c.successes.min(c.bound_violations);
                rows.push(CampaignRow {
                    mean_candidate_ratio: c.mean_invocations_per_fault,
                    ..base(0, c.trials, ok)
                });
            }
            CampaignMode::Edge => {
                let mode = if cfg.strict {
                    EdgeMode::Strict
                } else {
                    EdgeMode::Fast
                };
                for s in edge_campaign(&d.ro, &cfg.table_sizes, cfg.trials, cfg.seed, mode)? {
                    rows.push(CampaignRow {
                        ambiguous: s.ambiguous,
                        mean_candidate_ratio: s.mean_candidate_ratio,
                        mean_probe_ratio: s.mean_probe_ratio,
                        ..base(s.table_size, s.trials, s.successes)
                    });
                }
            }
        }
    }
    Ok(rows)
}
