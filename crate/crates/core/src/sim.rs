//! Seeded Monte Carlo BER experiments over the PAM/AWGN channel.
//!
//! Each shard simulates its own continuous staircase stream (encoder,
//! channel, marking, decoder) from seeds derived from the master seed and
//! the shard index. Shards advance in lock-step rounds of `chunk_blocks`
//! blocks and the stop rule is evaluated on the fold of all shards after
//! each round, so results depend only on `(spec, master_seed, shard_count)`
//! and never on thread scheduling. Data and noise streams do not depend on
//! the decoder or its thresholds, so runs that differ only in decoder
//! settings see identical channel realisations.

use std::collections::VecDeque;
use std::fs::File;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decoder::{DecoderKind, DecoderStats, IsabmConfig, StreamDecoder};
use crate::error::{Error, Result};
use crate::marking::{mark_block, MarkMode};
use crate::modem::{AwgnChannel, ChannelConfig, Constellation, NoiseVariance};
use crate::scc::{encode_rows, Block, CodeId, SccParams};

pub const DEFAULT_WINDOW: usize = 9;
pub const DEFAULT_ITERATIONS: usize = 7;
pub const DEFAULT_MIN_ERRORS: u64 = 100;
pub const DEFAULT_MAX_INFO_BITS: u64 = 200_000_000;
/// Target BER for desk-scale required-SNR readouts.
pub const DEFAULT_TARGET_BER: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecoderSpec {
    Standard,
    Isabm { k: usize, mode: MarkMode },
}

impl DecoderSpec {
    pub fn name(&self) -> &'static str {
        match self {
            DecoderSpec::Standard => "standard",
            DecoderSpec::Isabm { .. } => "isabm",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopRule {
    pub min_post_fec_bit_errors: u64,
    pub max_info_bits: u64,
    /// Bits to count before the error target may end a run. Waterfall
    /// errors arrive in bursts of whole failed windows, so a floor here
    /// keeps one burst from deciding the estimate.
    #[serde(default)]
    pub min_info_bits: u64,
}

impl StopRule {
    pub fn new(min_post_fec_bit_errors: u64, max_info_bits: u64) -> Self {
        Self { min_post_fec_bit_errors, max_info_bits, min_info_bits: 0 }
    }

    /// A fixed budget of `bits` with `min_errors` required for an
    /// uncensored record.
    pub fn fixed_budget(min_errors: u64, bits: u64) -> Self {
        Self { min_post_fec_bit_errors: min_errors, max_info_bits: bits, min_info_bits: bits }
    }

    fn done(&self, errors: u64, bits: u64) -> bool {
        bits >= self.max_info_bits || (errors >= self.min_post_fec_bit_errors && bits >= self.min_info_bits)
    }
}

impl Default for StopRule {
    fn default() -> Self {
        Self::new(DEFAULT_MIN_ERRORS, DEFAULT_MAX_INFO_BITS)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub code: CodeId,
    /// PAM order `M`.
    pub pam_order: usize,
    pub decoder: DecoderSpec,
    /// Window size `L`.
    pub window: usize,
    /// Iterations `ℓ` per window position.
    pub iterations: usize,
    pub snr_db: Vec<f64>,
    pub stop: StopRule,
    pub master_seed: u64,
    pub shard_count: usize,
    /// Blocks each shard simulates between stop-rule checks.
    pub chunk_blocks: usize,
    #[serde(default = "default_noise")]
    pub noise: NoiseVariance,
    /// Bypass the noise entirely (`N0 → 0`).
    #[serde(default)]
    pub noiseless: bool,
}

fn default_noise() -> NoiseVariance {
    NoiseVariance::FullN0
}

impl ExperimentSpec {
    pub fn new(code: CodeId, pam_order: usize, decoder: DecoderSpec) -> Self {
        Self {
            code,
            pam_order,
            decoder,
            window: DEFAULT_WINDOW,
            iterations: DEFAULT_ITERATIONS,
            snr_db: Vec::new(),
            stop: StopRule::default(),
            master_seed: 1,
            shard_count: 1,
            chunk_blocks: 24,
            noise: NoiseVariance::FullN0,
            noiseless: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.stop.min_post_fec_bit_errors == 0 || self.stop.max_info_bits == 0 {
            return Err(Error::invalid("stop rule limits must be positive"));
        }
        if self.snr_db.iter().any(|s| !s.is_finite()) {
            return Err(Error::invalid("SNR grid contains a non-finite value"));
        }
        if self.snr_db.windows(2).any(|p| p[0] > p[1]) {
            return Err(Error::invalid("SNR grid must be sorted ascending"));
        }
        if self.shard_count == 0 || self.chunk_blocks == 0 {
            return Err(Error::invalid("shard_count and chunk_blocks must be positive"));
        }
        Constellation::from_order(self.pam_order)?;
        let params = self.params()?;
        if let DecoderSpec::Isabm { k, mode } = self.decoder {
            IsabmConfig::new(k, mode, 0).validate(params.window())?;
        }
        Ok(())
    }

    pub fn params(&self) -> Result<SccParams> {
        SccParams::new(self.code.build()?, self.window, self.iterations)
    }

    /// `L − K` for iSABM, `None` for the standard decoder.
    pub fn marked_blocks(&self) -> Option<usize> {
        match self.decoder {
            DecoderSpec::Isabm { k, .. } => Some(self.window - k),
            DecoderSpec::Standard => None,
        }
    }
}

/// One Monte Carlo operating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerRecord {
    pub snr_db: f64,
    pub pre_fec_ber: f64,
    pub post_fec_ber: f64,
    pub info_bits: u64,
    pub bit_errors: u64,
    pub coded_bits: u64,
    pub pre_fec_errors: u64,
    /// Counted blocks that still carried at least one information error.
    pub block_errors: u64,
    pub blocks: u64,
    pub censored: bool,
    pub shards: usize,
    pub seed: u64,
    pub wall_time_s: f64,
    pub decoder_stats: DecoderStats,
}

impl BerRecord {
    /// BER bound implied by the stop rule for a censored record (fewer than
    /// the target number of errors were seen).
    pub fn upper_bound(&self, stop: &StopRule) -> f64 {
        if self.censored {
            (stop.min_post_fec_bit_errors.saturating_sub(1)).max(self.bit_errors) as f64 / self.info_bits.max(1) as f64
        } else {
            self.post_fec_ber
        }
    }
}

fn derive_seed(master: u64, stream: u64, shard: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng.set_word_pos(u128::from(shard) * 16);
    rng.random()
}

const STREAM_DATA: u64 = 1;
const STREAM_NOISE: u64 = 2;
const STREAM_FLIPS: u64 = 3;

#[derive(Debug, Default, Clone, Copy)]
struct Tally {
    info_bits: u64,
    bit_errors: u64,
    coded_bits: u64,
    pre_errors: u64,
    block_errors: u64,
    blocks: u64,
}

impl Tally {
    fn add(&mut self, o: &Tally) {
        self.info_bits += o.info_bits;
        self.bit_errors += o.bit_errors;
        self.coded_bits += o.coded_bits;
        self.pre_errors += o.pre_errors;
        self.block_errors += o.block_errors;
        self.blocks += o.blocks;
    }
}

struct Shard {
    params: SccParams,
    cons: Constellation,
    channel: AwgnChannel,
    mode: Option<MarkMode>,
    data_rng: ChaCha8Rng,
    prev: Block,
    decoder: StreamDecoder,
    /// Transmitted blocks awaiting their decoded counterpart, with their
    /// pre-FEC error counts.
    reference: VecDeque<(u64, Block, u64)>,
    next_index: u64,
    tally: Tally,
    // Scratch.
    bits: Vec<bool>,
    symbols: Vec<f64>,
    received: Vec<f64>,
    hard: Vec<bool>,
    abs_llr: Vec<f64>,
}

impl Shard {
    fn new(spec: &ExperimentSpec, params: &SccParams, snr_db: f64, shard: u64) -> Result<Self> {
        let cons = Constellation::from_order(spec.pam_order)?;
        let channel = if spec.noiseless {
            AwgnChannel::noiseless()
        } else {
            AwgnChannel::new(
                ChannelConfig::new(snr_db, derive_seed(spec.master_seed, STREAM_NOISE, shard))
                    .with_variance(spec.noise),
            )?
        };
        let (kind, mode) = match spec.decoder {
            DecoderSpec::Standard => (DecoderKind::Standard, None),
            DecoderSpec::Isabm { k, mode } => (
                DecoderKind::Isabm(IsabmConfig::new(k, mode, derive_seed(spec.master_seed, STREAM_FLIPS, shard))),
                Some(mode),
            ),
        };
        Ok(Self {
            params: params.clone(),
            cons,
            channel,
            mode,
            data_rng: ChaCha8Rng::seed_from_u64(derive_seed(spec.master_seed, STREAM_DATA, shard)),
            prev: Block::zeros(params.w()),
            decoder: StreamDecoder::new(params.clone(), kind)?,
            reference: VecDeque::new(),
            next_index: 1,
            tally: Tally::default(),
            bits: Vec::new(),
            symbols: Vec::new(),
            received: Vec::new(),
            hard: Vec::new(),
            abs_llr: Vec::new(),
        })
    }

    /// Simulates at least `blocks` more blocks, in whole symbol groups.
    fn run(&mut self, blocks: usize) -> Result<()> {
        let m = self.cons.bits_per_symbol();
        let groups = blocks.div_ceil(m);
        for _ in 0..groups {
            self.step_group(m)?;
        }
        Ok(())
    }

    /// Encodes, transmits and decodes `m` blocks: `m` blocks of `w²` bits
    /// always form whole symbols, so this matches free bit serialisation.
    fn step_group(&mut self, m: usize) -> Result<()> {
        let w = self.params.w();
        let mask = self.params.row_info_mask();
        let mut tx_blocks = Vec::with_capacity(m);
        self.bits.clear();
        for _ in 0..m {
            let info: Vec<u128> = (0..w).map(|_| self.data_rng.random::<u128>() & mask).collect();
            let block = encode_rows(&self.params, &self.prev, &info)?;
            for &row in block.rows() {
                self.bits.extend((0..w).map(|c| (row >> c) & 1 == 1));
            }
            self.prev = block.clone();
            tx_blocks.push(block);
        }
        self.symbols.clear();
        for chunk in self.bits.chunks(m) {
            self.symbols.push(self.cons.point_for(chunk));
        }
        self.channel.transmit_into(&self.symbols, &mut self.received);

        let n0 = self.channel.n0();
        self.hard.clear();
        self.abs_llr.clear();
        let mut llr = vec![0.0; m];
        for &y in &self.received {
            let idx = self.cons.nearest(y);
            for k in 0..m {
                self.hard.push(self.cons.label_bit(idx, k));
            }
            if self.mode.is_some() {
                self.cons.llr_into(y, n0, &mut llr);
                self.abs_llr.extend(llr.iter().map(|l| l.abs()));
            }
        }

        let per_block = w * w;
        for (b, tx) in tx_blocks.into_iter().enumerate() {
            let hard = &self.hard[b * per_block..(b + 1) * per_block];
            let rx = Block::from_bits(w, hard)?;
            let pre = rx.distance(&tx);
            let marks = match &self.mode {
                Some(mode) => Some(mark_block(&self.abs_llr[b * per_block..(b + 1) * per_block], w, mode)?),
                None => None,
            };
            self.reference.push_back((self.next_index, tx, pre));
            self.next_index += 1;
            if let Some((idx, decided)) = self.decoder.push(rx, marks)? {
                self.account(idx, &decided);
            }
        }
        Ok(())
    }

    fn account(&mut self, idx: u64, decided: &Block) {
        if idx == 0 {
            return;
        }
        let (ref_idx, tx, pre) = self.reference.pop_front().expect("reference block present");
        debug_assert_eq!(ref_idx, idx);
        let mask = self.params.row_info_mask();
        let errors: u64 =
            decided.rows().iter().zip(tx.rows()).map(|(a, b)| ((a ^ b) & mask).count_ones() as u64).sum();
        let w = self.params.w() as u64;
        self.tally.info_bits += self.params.info_per_block() as u64;
        self.tally.bit_errors += errors;
        self.tally.coded_bits += w * w;
        self.tally.pre_errors += pre;
        self.tally.blocks += 1;
        if errors > 0 {
            self.tally.block_errors += 1;
        }
    }
}

/// Runs one SNR point until the stop rule fires.
pub fn run_point(spec: &ExperimentSpec, snr_db: f64) -> Result<BerRecord> {
    spec.validate()?;
    if !snr_db.is_finite() {
        return Err(Error::invalid(format!("SNR {snr_db} dB is not finite")));
    }
    let start = Instant::now();
    let params = spec.params()?;
    let mut shards = (0..spec.shard_count as u64)
        .map(|s| Shard::new(spec, &params, snr_db, s))
        .collect::<Result<Vec<_>>>()?;
    let mut total;
    loop {
        shards.par_iter_mut().map(|s| s.run(spec.chunk_blocks)).collect::<Result<Vec<_>>>()?;
        total = Tally::default();
        for s in &shards {
            total.add(&s.tally);
        }
        if spec.stop.done(total.bit_errors, total.info_bits) {
            break;
        }
    }
    let mut stats = DecoderStats::default();
    for s in &shards {
        let d = s.decoder.stats();
        stats.bdd_calls += d.bdd_calls;
        stats.bits_changed += d.bits_changed;
        stats.accepted += d.accepted;
        stats.rejected += d.rejected;
        stats.flip_attempts += d.flip_attempts;
        stats.flip_successes += d.flip_successes;
        stats.insufficient_hubs += d.insufficient_hubs;
    }
    Ok(BerRecord {
        snr_db,
        pre_fec_ber: total.pre_errors as f64 / total.coded_bits.max(1) as f64,
        post_fec_ber: total.bit_errors as f64 / total.info_bits.max(1) as f64,
        info_bits: total.info_bits,
        bit_errors: total.bit_errors,
        coded_bits: total.coded_bits,
        pre_fec_errors: total.pre_errors,
        block_errors: total.block_errors,
        blocks: total.blocks,
        censored: total.bit_errors < spec.stop.min_post_fec_bit_errors,
        shards: spec.shard_count,
        seed: spec.master_seed,
        wall_time_s: start.elapsed().as_secs_f64(),
        decoder_stats: stats,
    })
}

/// Log-linear interpolation of the SNR at which the BER crosses `target`.
/// `None` when no adjacent pair of points (with nonzero BER) brackets it.
pub fn required_snr_at(records: &[BerRecord], target: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = records.iter().map(|r| (r.snr_db, r.post_fec_ber)).collect();
    interpolate_log_linear(&pts, target)
}

pub fn interpolate_log_linear(points: &[(f64, f64)], target: f64) -> Option<f64> {
    if !(target > 0.0) {
        return None;
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    if let Some(&(snr, _)) = pts.iter().find(|p| p.1 == target) {
        return Some(snr);
    }
    for pair in pts.windows(2) {
        let (s0, b0) = pair[0];
        let (s1, b1) = pair[1];
        if b0 <= 0.0 || b1 <= 0.0 {
            continue;
        }
        let (lo, hi) = if b0 >= b1 { (b1, b0) } else { (b0, b1) };
        if target < lo || target > hi {
            continue;
        }
        if b0 == b1 {
            return Some(s0);
        }
        let f = (target.log10() - b0.log10()) / (b1.log10() - b0.log10());
        return Some(s0 + f * (s1 - s0));
    }
    None
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub records: Vec<BerRecord>,
    pub target_ber: f64,
    pub required_snr_db: Option<f64>,
}

/// Runs every SNR of the spec's grid and reads off the SNR at `target_ber`.
pub fn sweep(spec: &ExperimentSpec, target_ber: f64) -> Result<SweepResult> {
    spec.validate()?;
    if spec.snr_db.is_empty() {
        return Err(Error::invalid("empty SNR grid"));
    }
    let records = spec.snr_db.iter().map(|&s| run_point(spec, s)).collect::<Result<Vec<_>>>()?;
    let required_snr_db = required_snr_at(&records, target_ber);
    Ok(SweepResult { records, target_ber, required_snr_db })
}

/// A single grid-search cell; it overrides the decoder of the base spec.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridCell {
    Thresholds { delta1: f64, delta2: f64 },
    Delta3 { delta3: f64 },
    /// `L − K`.
    MarkedBlocks { marked: usize },
}

impl GridCell {
    fn apply(&self, base: &ExperimentSpec) -> Result<ExperimentSpec> {
        let mut spec = base.clone();
        let (k, mode) = match base.decoder {
            DecoderSpec::Isabm { k, mode } => (k, mode),
            DecoderSpec::Standard => return Err(Error::invalid("grid search needs an iSABM decoder")),
        };
        spec.decoder = match *self {
            GridCell::Thresholds { delta1, delta2 } => DecoderSpec::Isabm { k, mode: MarkMode::two(delta1, delta2)? },
            GridCell::Delta3 { delta3 } => DecoderSpec::Isabm { k, mode: MarkMode::one(delta3)? },
            GridCell::MarkedBlocks { marked } => {
                if marked < 2 || marked > base.window {
                    return Err(Error::invalid(format!("L − K = {marked} out of range")));
                }
                DecoderSpec::Isabm { k: base.window - marked, mode }
            }
        };
        Ok(spec)
    }

    fn sort_key(&self) -> (f64, f64) {
        match *self {
            GridCell::Thresholds { delta1, delta2 } => (delta1, delta2),
            GridCell::Delta3 { delta3 } => (delta3, 0.0),
            GridCell::MarkedBlocks { marked } => (marked as f64, 0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub cell: GridCell,
    pub spec: ExperimentSpec,
    pub record: BerRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridTable {
    pub snr_db: f64,
    pub rows: Vec<GridRow>,
    /// Index into `rows` of the lowest post-FEC BER.
    pub argmin: Option<usize>,
}

/// Runs `run_point` for every valid cell at a fixed SNR. Cells with
/// `δ1 < δ2` are skipped. Ties go to the smaller thresholds.
pub fn grid_search(base: &ExperimentSpec, snr_db: f64, cells: &[GridCell]) -> Result<GridTable> {
    let mut rows = Vec::new();
    for cell in cells {
        if let GridCell::Thresholds { delta1, delta2 } = cell {
            if delta1 < delta2 {
                continue;
            }
        }
        let spec = cell.apply(base)?;
        let record = run_point(&spec, snr_db)?;
        rows.push(GridRow { cell: *cell, spec, record });
    }
    let argmin = if rows.iter().all(|r| r.record.censored) {
        None
    } else {
        (0..rows.len()).min_by(|&a, &b| {
            rows[a]
                .record
                .post_fec_ber
                .total_cmp(&rows[b].record.post_fec_ber)
                .then_with(|| {
                    let (ka, kb) = (rows[a].cell.sort_key(), rows[b].cell.sort_key());
                    ka.0.total_cmp(&kb.0).then(ka.1.total_cmp(&kb.1))
                })
        })
    };
    Ok(GridTable { snr_db, rows, argmin })
}

/// One CSV line per record. Wall time is left out so that reruns from a
/// manifest produce identical bytes.
#[derive(Debug, Serialize)]
struct CsvRow {
    code: CodeId,
    decoder: &'static str,
    #[serde(rename = "M")]
    pam_order: usize,
    #[serde(rename = "L")]
    window: usize,
    #[serde(rename = "K")]
    k: Option<usize>,
    delta1: Option<f64>,
    delta2: Option<f64>,
    delta3: Option<f64>,
    snr_db: f64,
    pre_ber: f64,
    post_ber: f64,
    bits: u64,
    errors: u64,
    censored: bool,
    seed: u64,
}

impl CsvRow {
    fn new(spec: &ExperimentSpec, r: &BerRecord) -> Self {
        let (k, d1, d2, d3) = match spec.decoder {
            DecoderSpec::Standard => (None, None, None, None),
            DecoderSpec::Isabm { k, mode: MarkMode::TwoThreshold { delta1, delta2 } } => {
                (Some(k), Some(delta1), Some(delta2), None)
            }
            DecoderSpec::Isabm { k, mode: MarkMode::OneThreshold { delta3 } } => (Some(k), None, None, Some(delta3)),
        };
        Self {
            code: spec.code,
            decoder: spec.decoder.name(),
            pam_order: spec.pam_order,
            window: spec.window,
            k,
            delta1: d1,
            delta2: d2,
            delta3: d3,
            snr_db: r.snr_db,
            pre_ber: r.pre_fec_ber,
            post_ber: r.post_fec_ber,
            bits: r.info_bits,
            errors: r.bit_errors,
            censored: r.censored,
            seed: r.seed,
        }
    }
}

pub fn write_csv<W: Write>(out: W, rows: &[(&ExperimentSpec, &BerRecord)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (spec, r) in rows {
        w.serialize(CsvRow::new(spec, r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file(path: &Path, rows: &[(&ExperimentSpec, &BerRecord)]) -> Result<()> {
    write_csv(File::create(path)?, rows)
}

/// Everything needed to rerun an experiment, plus what it produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool_version: String,
    pub experiments: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub spec: ExperimentSpec,
    pub target_ber: f64,
    pub records: Vec<BerRecord>,
    pub required_snr_db: Option<f64>,
}

impl Manifest {
    pub fn new() -> Self {
        Self { tool_version: env!("CARGO_PKG_VERSION").to_string(), experiments: Vec::new() }
    }

    pub fn push_sweep(&mut self, spec: &ExperimentSpec, sweep: &SweepResult) {
        self.experiments.push(ManifestEntry {
            spec: spec.clone(),
            target_ber: sweep.target_ber,
            records: sweep.records.clone(),
            required_snr_db: sweep.required_snr_db,
        });
    }

    pub fn push_grid(&mut self, table: &GridTable, target_ber: f64) {
        for row in &table.rows {
            self.experiments.push(ManifestEntry {
                spec: ExperimentSpec { snr_db: vec![table.snr_db], ..row.spec.clone() },
                target_ber,
                records: vec![row.record.clone()],
                required_snr_db: None,
            });
        }
    }

    /// `(spec, record)` pairs in file order.
    pub fn rows(&self) -> Vec<(&ExperimentSpec, &BerRecord)> {
        self.experiments.iter().flat_map(|e| e.records.iter().map(move |r| (&e.spec, r))).collect()
    }

    /// Runs every embedded spec again, replacing the stored records.
    pub fn rerun(&self) -> Result<Manifest> {
        let mut out = Manifest { tool_version: self.tool_version.clone(), experiments: Vec::new() };
        for e in &self.experiments {
            let result = sweep(&e.spec, e.target_ber)?;
            out.push_sweep(&e.spec, &result);
        }
        Ok(out)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut f = File::create(path)?;
        serde_json::to_writer_pretty(&mut f, self)?;
        f.write_all(b"\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_reader(std::io::BufReader::new(File::open(path)?))?)
    }
}

impl Default for Manifest {
    fn default() -> Self {
        Self::new()
    }
}
