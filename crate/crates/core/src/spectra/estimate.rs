//! Conditional-statistics estimators over streamed Monte Carlo samples.
//!
//! Determinism contract: for a fixed (seed, stream_base, budget) the
//! estimates are identical to the last bit for any worker count. Samples
//! are processed in fixed-size blocks (one stream per sample, addressed
//! by sample index); blocks are computed in parallel inside bounded
//! chunks and folded strictly in block order, so the reduction tree never
//! depends on scheduling.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::finite_n::{ComplexPoint, EnsembleKind, EnsembleSpec};
use crate::sampling::{sample, SeededStream};

use super::{decompose, RESIDUAL_DISCARD};

/// Samples per accumulation block (fixed: part of the determinism
/// contract, independent of worker count).
pub const DEFAULT_BLOCK_SAMPLES: u64 = 256;
/// Blocks scheduled per parallel chunk; bounds peak memory for k-nearest
/// candidate lists.
const BLOCKS_PER_CHUNK: u64 = 64;

/// Monte Carlo run parameters.
#[derive(Debug, Clone, Copy)]
pub struct McConfig {
    pub seed: u64,
    /// First stream index; sample i uses stream_base + i.
    pub stream_base: u64,
    /// Number of matrices to draw.
    pub budget: u64,
    /// Worker threads (results do not depend on this).
    pub threads: usize,
}

impl McConfig {
    pub fn new(seed: u64, budget: u64) -> Self {
        McConfig {
            seed,
            stream_base: 0,
            budget,
            threads: 1,
        }
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads.max(1);
        self
    }

    pub fn with_stream_base(mut self, base: u64) -> Self {
        self.stream_base = base;
        self
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads.max(1))
            .build()
            .map_err(|e| Error::numerical(format!("worker pool: {e}")))
    }
}

/// Eigenvalue selection protocol around each target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowMode {
    /// All eigenvalues with |Re z - x| <= h and |Im z - y| <= h
    /// (box window; the conventional default is h = 1/√N).
    Box { half_width: f64 },
    /// The k closest eigenvalues (Euclidean) across the whole run.
    KNearest { k: usize },
}

/// Monte Carlo estimate of the conditional mean self-overlap at a target.
#[derive(Debug, Clone, Copy)]
pub struct ConditionalEstimate {
    pub target: ComplexPoint,
    pub mean: Option<f64>,
    pub std_error: Option<f64>,
    pub count: u64,
}

/// Result of one estimation run.
#[derive(Debug, Clone)]
pub struct McRun {
    pub mode: WindowMode,
    pub estimates: Vec<ConditionalEstimate>,
    pub samples: u64,
    pub discarded: u64,
}

#[derive(Debug, Clone, Copy, Default)]
struct WindowAcc {
    count: u64,
    sum: f64,
    sum_sq: f64,
}

impl WindowAcc {
    fn push(&mut self, overlap: f64) {
        self.count += 1;
        self.sum += overlap;
        self.sum_sq += overlap * overlap;
    }

    fn merge(&mut self, other: &WindowAcc) {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    fn estimate(&self, target: ComplexPoint) -> ConditionalEstimate {
        if self.count == 0 {
            return ConditionalEstimate {
                target,
                mean: None,
                std_error: None,
                count: 0,
            };
        }
        let n = self.count as f64;
        let mean = self.sum / n;
        let std_error = if self.count >= 2 {
            let var = ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0);
            Some((var / n).sqrt())
        } else {
            None
        };
        ConditionalEstimate {
            target,
            mean: Some(mean),
            std_error,
            count: self.count,
        }
    }
}

/// One eigenvalue considered for a k-nearest list; the trailing fields
/// give a total tie-break order so merges are reproducible.
#[derive(Debug, Clone, Copy)]
struct Candidate {
    dist_sq: f64,
    overlap: f64,
    re: f64,
    im: f64,
    sample: u64,
    eig_idx: u32,
}

fn candidate_order(a: &Candidate, b: &Candidate) -> std::cmp::Ordering {
    a.dist_sq
        .total_cmp(&b.dist_sq)
        .then(a.re.total_cmp(&b.re))
        .then(a.im.total_cmp(&b.im))
        .then(a.sample.cmp(&b.sample))
        .then(a.eig_idx.cmp(&b.eig_idx))
}

fn merge_nearest(into: &mut Vec<Candidate>, mut extra: Vec<Candidate>, k: usize) {
    into.append(&mut extra);
    into.sort_by(candidate_order);
    into.truncate(k);
}

fn validate_targets(spec: &EnsembleSpec, targets: &[ComplexPoint]) -> Result<()> {
    for t in targets {
        if !t.x.is_finite() || !t.y.is_finite() {
            return Err(Error::domain("targets must be finite"));
        }
        if spec.kind == EnsembleKind::RealElliptic && t.y == 0.0 {
            return Err(Error::domain(
                "real-ensemble conditional targets require Im z != 0",
            ));
        }
    }
    Ok(())
}

struct BlockOutcome<T> {
    discarded: u64,
    eigenvalues: u64,
    payload: T,
}

/// Run `per_sample` over the budget in deterministic blocks, folding
/// block payloads strictly in block order.
fn run_blocked<T, FInit, FSample, FFold>(
    spec: &EnsembleSpec,
    cfg: &McConfig,
    init: FInit,
    per_sample: FSample,
    mut fold: FFold,
) -> Result<(u64, u64)>
where
    T: Send,
    FInit: Fn() -> T + Sync,
    FSample: Fn(&mut T, u64, &super::SpectralSample) + Sync,
    FFold: FnMut(T),
{
    if cfg.budget == 0 {
        return Err(Error::domain("budget must be at least 1"));
    }
    let pool = cfg.pool()?;
    let blocks_total = cfg.budget.div_ceil(DEFAULT_BLOCK_SAMPLES);
    let mut discarded = 0u64;
    let mut eigenvalues = 0u64;
    let mut chunk_start = 0u64;
    while chunk_start < blocks_total {
        let chunk_end = (chunk_start + BLOCKS_PER_CHUNK).min(blocks_total);
        let outcomes: Vec<BlockOutcome<T>> = pool.install(|| {
            (chunk_start..chunk_end)
                .into_par_iter()
                .map(|block| {
                    let lo = block * DEFAULT_BLOCK_SAMPLES;
                    let hi = ((block + 1) * DEFAULT_BLOCK_SAMPLES).min(cfg.budget);
                    let mut payload = init();
                    let mut discarded = 0u64;
                    let mut eigenvalues = 0u64;
                    for idx in lo..hi {
                        let stream = SeededStream::new(cfg.seed, cfg.stream_base + idx);
                        let drawn = match sample(spec, stream) {
                            Ok(m) => m,
                            Err(_) => {
                                discarded += 1;
                                continue;
                            }
                        };
                        match decompose(&drawn) {
                            Ok(s) if s.residual_max <= RESIDUAL_DISCARD => {
                                eigenvalues += s.eigenvalues.len() as u64;
                                per_sample(&mut payload, idx, &s);
                            }
                            _ => discarded += 1,
                        }
                    }
                    BlockOutcome {
                        discarded,
                        eigenvalues,
                        payload,
                    }
                })
                .collect()
        });
        for outcome in outcomes {
            discarded += outcome.discarded;
            eigenvalues += outcome.eigenvalues;
            fold(outcome.payload);
        }
        chunk_start = chunk_end;
    }
    Ok((discarded, eigenvalues))
}

/// Estimate the conditional mean self-overlap at each target by streaming
/// `cfg.budget` matrices and binning eigenvalue overlaps.
pub fn conditional_overlap_estimate(
    spec: &EnsembleSpec,
    targets: &[ComplexPoint],
    mode: WindowMode,
    cfg: &McConfig,
) -> Result<McRun> {
    validate_targets(spec, targets)?;
    if targets.is_empty() {
        return Err(Error::domain("at least one target is required"));
    }
    match mode {
        WindowMode::Box { half_width } => {
            if !(half_width > 0.0) {
                return Err(Error::domain("box window requires half_width > 0"));
            }
            let mut accs = vec![WindowAcc::default(); targets.len()];
            let (discarded, _) = run_blocked(
                spec,
                cfg,
                || vec![WindowAcc::default(); targets.len()],
                |accs: &mut Vec<WindowAcc>, _idx, s| {
                    for (lam, ov) in s.eigenvalues.iter().zip(&s.overlaps) {
                        for (t, acc) in targets.iter().zip(accs.iter_mut()) {
                            if (lam.re - t.x).abs() <= half_width
                                && (lam.im - t.y).abs() <= half_width
                            {
                                acc.push(*ov);
                            }
                        }
                    }
                },
                |block: Vec<WindowAcc>| {
                    for (acc, b) in accs.iter_mut().zip(&block) {
                        acc.merge(b);
                    }
                },
            )?;
            Ok(McRun {
                mode,
                estimates: targets
                    .iter()
                    .zip(&accs)
                    .map(|(t, a)| a.estimate(*t))
                    .collect(),
                samples: cfg.budget,
                discarded,
            })
        }
        WindowMode::KNearest { k } => {
            if k == 0 {
                return Err(Error::domain("k-nearest requires k >= 1"));
            }
            let mut best: Vec<Vec<Candidate>> = vec![Vec::new(); targets.len()];
            let blocks_total = cfg.budget.div_ceil(DEFAULT_BLOCK_SAMPLES);
            let mut chunk_start = 0u64;
            let pool = cfg.pool()?;
            let mut discarded = 0u64;
            while chunk_start < blocks_total {
                let chunk_end = (chunk_start + BLOCKS_PER_CHUNK).min(blocks_total);
                // Cutoffs from already-folded chunks only: chunk boundaries
                // are fixed, so this stays worker-count independent.
                let cutoffs: Vec<Option<f64>> = best
                    .iter()
                    .map(|list| {
                        if list.len() == k {
                            Some(list[k - 1].dist_sq)
                        } else {
                            None
                        }
                    })
                    .collect();
                let outcomes: Vec<BlockOutcome<Vec<Vec<Candidate>>>> = pool.install(|| {
                    (chunk_start..chunk_end)
                        .into_par_iter()
                        .map(|block| {
                            let lo = block * DEFAULT_BLOCK_SAMPLES;
                            let hi =
                                ((block + 1) * DEFAULT_BLOCK_SAMPLES).min(cfg.budget);
                            let mut lists: Vec<Vec<Candidate>> =
                                vec![Vec::new(); targets.len()];
                            let mut discarded = 0u64;
                            for idx in lo..hi {
                                let stream =
                                    SeededStream::new(cfg.seed, cfg.stream_base + idx);
                                let drawn = match sample(spec, stream) {
                                    Ok(m) => m,
                                    Err(_) => {
                                        discarded += 1;
                                        continue;
                                    }
                                };
                                let s = match decompose(&drawn) {
                                    Ok(s) if s.residual_max <= RESIDUAL_DISCARD => s,
                                    _ => {
                                        discarded += 1;
                                        continue;
                                    }
                                };
                                for (eig_idx, (lam, ov)) in
                                    s.eigenvalues.iter().zip(&s.overlaps).enumerate()
                                {
                                    for (ti, t) in targets.iter().enumerate() {
                                        let d = dist_sq(*lam, *t);
                                        if cutoffs[ti].map_or(true, |c| d <= c) {
                                            lists[ti].push(Candidate {
                                                dist_sq: d,
                                                overlap: *ov,
                                                re: lam.re,
                                                im: lam.im,
                                                sample: idx,
                                                eig_idx: eig_idx as u32,
                                            });
                                        }
                                    }
                                }
                            }
                            for list in &mut lists {
                                list.sort_by(candidate_order);
                                list.truncate(k);
                            }
                            BlockOutcome {
                                discarded,
                                eigenvalues: 0,
                                payload: lists,
                            }
                        })
                        .collect()
                });
                for outcome in outcomes {
                    discarded += outcome.discarded;
                    for (global, block_list) in best.iter_mut().zip(outcome.payload) {
                        merge_nearest(global, block_list, k);
                    }
                }
                chunk_start = chunk_end;
            }
            let estimates = targets
                .iter()
                .zip(&best)
                .map(|(t, list)| {
                    let mut acc = WindowAcc::default();
                    for c in list {
                        acc.push(c.overlap);
                    }
                    acc.estimate(*t)
                })
                .collect();
            Ok(McRun {
                mode,
                estimates,
                samples: cfg.budget,
                discarded,
            })
        }
    }
}

fn dist_sq(lam: Complex64, t: ComplexPoint) -> f64 {
    let dx = lam.re - t.x;
    let dy = lam.im - t.y;
    dx * dx + dy * dy
}

/// Rectangular binning grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x0: f64,
    pub x1: f64,
    pub nx: usize,
    pub y0: f64,
    pub y1: f64,
    pub ny: usize,
}

impl GridSpec {
    pub fn bin_area(&self) -> f64 {
        (self.x1 - self.x0) / self.nx as f64 * (self.y1 - self.y0) / self.ny as f64
    }

    fn validate(&self) -> Result<()> {
        if !(self.x1 > self.x0 && self.y1 > self.y0) || self.nx == 0 || self.ny == 0 {
            return Err(Error::domain("histogram grid must cover a finite rectangle"));
        }
        Ok(())
    }

    fn bin(&self, z: Complex64) -> Option<usize> {
        let fx = (z.re - self.x0) / (self.x1 - self.x0) * self.nx as f64;
        let fy = (z.im - self.y0) / (self.y1 - self.y0) * self.ny as f64;
        if fx < 0.0 || fy < 0.0 {
            return None;
        }
        let (ix, iy) = (fx as usize, fy as usize);
        if ix >= self.nx || iy >= self.ny {
            return None;
        }
        Some(iy * self.nx + ix)
    }
}

/// Eigenvalue counts over a rectangular grid.
#[derive(Debug, Clone)]
pub struct Histogram {
    pub grid: GridSpec,
    /// Row-major counts, ny rows of nx bins.
    pub counts: Vec<u64>,
    pub samples: u64,
    pub discarded: u64,
    pub total_eigenvalues: u64,
    pub in_grid: u64,
}

impl Histogram {
    /// count/(samples · bin area): directly comparable to the closed-form
    /// densities under their printed normalization (which integrates to
    /// the number of complex eigenvalues per matrix).
    pub fn density_scale(&self) -> f64 {
        1.0 / (self.samples as f64 * self.grid.bin_area())
    }
}

/// Histogram of eigenvalue positions over `cfg.budget` matrices.
pub fn density_histogram(
    spec: &EnsembleSpec,
    grid: &GridSpec,
    cfg: &McConfig,
) -> Result<Histogram> {
    grid.validate()?;
    let mut counts = vec![0u64; grid.nx * grid.ny];
    let mut in_grid = 0u64;
    let (discarded, total_eigenvalues) = run_blocked(
        spec,
        cfg,
        || vec![0u64; grid.nx * grid.ny],
        |local: &mut Vec<u64>, _idx, s| {
            for lam in &s.eigenvalues {
                if let Some(b) = grid.bin(*lam) {
                    local[b] += 1;
                }
            }
        },
        |local: Vec<u64>| {
            for (c, l) in counts.iter_mut().zip(&local) {
                *c += l;
                in_grid += l;
            }
        },
    )?;
    Ok(Histogram {
        grid: *grid,
        counts,
        samples: cfg.budget,
        discarded,
        total_eigenvalues,
        in_grid,
    })
}
