//! Sliding-window staircase decoders.
//!
//! A window holds `L` consecutive received blocks. Pair `q` (for
//! `1 ≤ q < L`) is the block pair at window positions `(q − 1, q)`; one
//! iteration visits the pairs from the newest (`q = L − 1`) down to the
//! oldest (`q = 1`), decoding all `w` rows of a pair as one group. After
//! `ℓ` iterations the oldest block is emitted and the window slides.

mod isabm;
mod standard;

pub use isabm::{
    decode_window_isabm, isabm_component_decode, miscorrection_check, ComponentOutcome, CrossFlags, IsabmConfig,
};
pub use standard::decode_iteration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::marking::MarkMap;
use crate::scc::{Block, SccParams};

/// Counters accumulated while decoding.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecoderStats {
    pub bdd_calls: u64,
    pub bits_changed: u64,
    pub accepted: u64,
    pub rejected: u64,
    pub flip_attempts: u64,
    pub flip_successes: u64,
    pub insufficient_hubs: u64,
}

/// `L` received blocks plus their marks and the per-word
/// "correctly decoded" flags of the current window position.
#[derive(Debug, Clone)]
pub struct WindowState {
    w: usize,
    capacity: usize,
    blocks: Vec<Block>,
    marks: Vec<Option<MarkMap>>,
    /// `flags[q]` bit `j`: row `j` of pair `q` is trusted. Index 0 unused.
    flags: Vec<u128>,
    base: u64,
}

impl WindowState {
    /// Empty window of capacity `L` holding only the known all-zero `B_0`.
    pub fn new(params: &SccParams) -> Self {
        let w = params.w();
        let capacity = params.window();
        let mut ws = Self {
            w,
            capacity,
            blocks: Vec::with_capacity(capacity),
            marks: Vec::with_capacity(capacity),
            flags: vec![0; capacity],
            base: 0,
        };
        ws.blocks.push(Block::zeros(w));
        ws.marks.push(Some(MarkMap::all_reliable(w)));
        ws
    }

    /// Window over explicit blocks, the oldest at global index `base`.
    pub fn from_blocks(params: &SccParams, base: u64, blocks: Vec<Block>, marks: Vec<Option<MarkMap>>) -> Result<Self> {
        let w = params.w();
        if blocks.is_empty() || blocks.len() > params.window() {
            return Err(Error::invalid(format!("{} blocks for a window of {}", blocks.len(), params.window())));
        }
        Error::check_len(blocks.len(), marks.len())?;
        if blocks.iter().any(|b| b.side() != w) || marks.iter().flatten().any(|m| m.side() != w) {
            return Err(Error::invalid("block side does not match the code"));
        }
        Ok(Self { w, capacity: params.window(), flags: vec![0; params.window()], blocks, marks, base })
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }
    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
    pub fn is_full(&self) -> bool {
        self.blocks.len() == self.capacity
    }
    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }
    pub fn block(&self, pos: usize) -> &Block {
        &self.blocks[pos]
    }
    pub fn block_mut(&mut self, pos: usize) -> &mut Block {
        &mut self.blocks[pos]
    }
    pub fn marks(&self, pos: usize) -> Option<&MarkMap> {
        self.marks[pos].as_ref()
    }
    /// Global index of the oldest resident block.
    pub fn base(&self) -> u64 {
        self.base
    }
    pub fn side(&self) -> usize {
        self.w
    }
    pub fn flags(&self, pair: usize) -> u128 {
        self.flags[pair]
    }

    pub fn admit(&mut self, block: Block, marks: Option<MarkMap>) -> Result<()> {
        if self.is_full() {
            return Err(Error::invalid("window is full"));
        }
        if block.side() != self.w {
            return Err(Error::LengthMismatch { expected: self.w, actual: block.side() });
        }
        self.blocks.push(block);
        self.marks.push(marks);
        Ok(())
    }

    /// Removes the oldest block and starts a fresh window position.
    pub fn emit(&mut self) -> Option<(u64, Block)> {
        if self.blocks.is_empty() {
            return None;
        }
        let b = self.blocks.remove(0);
        self.marks.remove(0);
        self.flags.iter_mut().for_each(|f| *f = 0);
        let idx = self.base;
        self.base += 1;
        Some((idx, b))
    }

    /// Mutable access to the two blocks of pair `q`.
    pub(crate) fn pair_mut(&mut self, q: usize) -> (&mut Block, &mut Block) {
        let (head, tail) = self.blocks.split_at_mut(q);
        (&mut head[q - 1], &mut tail[0])
    }
}

/// Which decoder a stream runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecoderKind {
    Standard,
    Isabm(IsabmConfig),
}

/// Streaming decoder: feed received blocks, collect decided blocks.
#[derive(Debug, Clone)]
pub struct StreamDecoder {
    params: SccParams,
    kind: DecoderKind,
    ws: WindowState,
    stats: DecoderStats,
}

impl StreamDecoder {
    pub fn new(params: SccParams, kind: DecoderKind) -> Result<Self> {
        if let DecoderKind::Isabm(cfg) = &kind {
            cfg.validate(params.window())?;
        }
        let ws = WindowState::new(&params);
        Ok(Self { params, kind, ws, stats: DecoderStats::default() })
    }

    pub fn params(&self) -> &SccParams {
        &self.params
    }
    pub fn stats(&self) -> DecoderStats {
        self.stats
    }
    pub fn window(&self) -> &WindowState {
        &self.ws
    }

    /// Admits the next received block. Once the window is full, runs `ℓ`
    /// iterations and returns the emitted oldest block with its index.
    pub fn push(&mut self, block: Block, marks: Option<MarkMap>) -> Result<Option<(u64, Block)>> {
        self.ws.admit(block, marks)?;
        if !self.ws.is_full() {
            return Ok(None);
        }
        self.decode_position();
        Ok(self.ws.emit())
    }

    /// Drains the tail, decoding each shrinking window before emitting.
    pub fn finish(mut self) -> Vec<(u64, Block)> {
        let mut out = Vec::new();
        while self.ws.len() > 1 {
            self.decode_position();
            out.extend(self.ws.emit());
        }
        out.extend(self.ws.emit());
        out
    }

    fn decode_position(&mut self) {
        let code = self.params.shared_code();
        for iteration in 0..self.params.iterations() {
            let changed = match &self.kind {
                DecoderKind::Standard => standard::iteration_with_stats(&mut self.ws, &code, &mut self.stats),
                DecoderKind::Isabm(cfg) => {
                    // In a full window the K oldest blocks are unmarked; a
                    // draining tail keeps the newest L − K blocks marked.
                    let marked = self.params.window() - cfg.k;
                    let k_eff = self.ws.len().saturating_sub(marked);
                    isabm::iteration_with_stats(&mut self.ws, &code, cfg, k_eff, iteration as u64, &mut self.stats)
                }
            };
            if changed == 0 && self.kind == DecoderKind::Standard {
                // Plain BDD is deterministic: a silent pass means a fixed point.
                break;
            }
        }
    }
}

/// Decodes a complete received stream `Y_1, Y_2, …` (with `B_0` implied)
/// and returns the decided `B_1, B_2, …`.
pub fn run_stream(params: &SccParams, kind: DecoderKind, received: Vec<(Block, Option<MarkMap>)>) -> Result<Vec<Block>> {
    if received.len() + 1 < params.window() {
        return Err(Error::invalid(format!(
            "stream of {} blocks (with B_0) is shorter than the window of {}",
            received.len() + 1,
            params.window()
        )));
    }
    let mut dec = StreamDecoder::new(params.clone(), kind)?;
    let mut out = Vec::with_capacity(received.len() + 1);
    for (block, marks) in received {
        out.extend(dec.push(block, marks)?);
    }
    out.extend(dec.finish());
    Ok(out.into_iter().filter(|(i, _)| *i > 0).map(|(_, b)| b).collect())
}
