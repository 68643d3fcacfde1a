//! Range scanning with checkpoint/resume.
//!
//! Positions are visited in canonical order (m-major, then k, then sign).
//! Each batch of `stride` positions is tested on the worker pool, its records
//! are written in order through the single output writer, and only then is
//! the checkpoint advanced to the batch's last position.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use lucasian::{applicable_rules, class_test, find_params, sun_test, Candidate, Outcome};
use rayon::prelude::*;
use thiserror::Error;

use crate::checkpoint::{CheckpointError, Cursor, ScanCheckpoint, ScanMode, ScanRange};
use crate::record::{millis, ResultRecord};

#[derive(Debug, Error)]
pub enum ScanError {
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
    #[error("cannot write scan output: {0}")]
    Output(#[from] std::io::Error),
    #[error("cannot start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

#[derive(Debug, Clone)]
pub struct ScanOptions {
    /// Positions per batch; the checkpoint is rewritten after every batch.
    pub stride: usize,
    /// Worker threads; `None` uses the rayon default.
    pub jobs: Option<usize>,
    /// Stop (after checkpointing) once this many positions were processed in
    /// this session.
    pub max_candidates: Option<u64>,
    pub timing: bool,
    pub checkpoint: Option<PathBuf>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            stride: 64,
            jobs: None,
            max_candidates: None,
            timing: false,
            checkpoint: None,
        }
    }
}

fn first(range: &ScanRange) -> Option<Cursor> {
    if range.k_min > range.k_max || range.m_min > range.m_max || range.signs.is_empty() {
        return None;
    }
    Some(Cursor {
        m: range.m_min,
        k: range.k_min,
        sign: range.signs[0],
    })
}

fn successor(range: &ScanRange, c: Cursor) -> Option<Cursor> {
    let idx = range.signs.iter().position(|&s| s == c.sign)?;
    if let Some(&sign) = range.signs.get(idx + 1) {
        return Some(Cursor { sign, ..c });
    }
    let sign = range.signs[0];
    if c.k < range.k_max {
        return Some(Cursor { k: c.k + 1, sign, ..c });
    }
    if c.m < range.m_max {
        return Some(Cursor {
            m: c.m + 1,
            k: range.k_min,
            sign,
        });
    }
    None
}

/// Positions strictly after `cursor` (or from the start), in canonical order.
pub fn positions(range: &ScanRange, cursor: Option<Cursor>) -> impl Iterator<Item = Cursor> + '_ {
    let start = match cursor {
        Some(c) => successor(range, c),
        None => first(range),
    };
    std::iter::successors(start, move |&c| successor(range, c))
}

/// Tests one position; `None` when no test applies to it.
pub fn evaluate(pos: Cursor, mode: ScanMode, timing: bool) -> Option<ResultRecord> {
    let cand = Candidate::new(pos.k, pos.m, pos.sign).ok()?;
    let started = Instant::now();
    let verdict = match mode {
        ScanMode::Class => {
            if applicable_rules(&cand).ok()?.is_empty() {
                return None;
            }
            class_test(&cand)
        }
        ScanMode::Generic { b_max, c_max } => sun_test(&cand, find_params(&cand, b_max, c_max)?),
    };
    let elapsed = timing.then(|| millis(started.elapsed()));
    Some(ResultRecord::from_verdict(&cand, &verdict, elapsed))
}

/// Runs (or resumes) a scan, writing one JSON line per tested candidate.
pub fn run_scan<W: Write>(range: ScanRange, opts: &ScanOptions, out: &mut W) -> Result<ScanCheckpoint, ScanError> {
    let mut state = match &opts.checkpoint {
        Some(path) if path.exists() => {
            let cp = ScanCheckpoint::load(path)?;
            if cp.range != range {
                return Err(CheckpointError::RangeMismatch { path: path.clone() }.into());
            }
            cp
        }
        _ => ScanCheckpoint::new(range.clone()),
    };
    let save = |state: &ScanCheckpoint| -> Result<(), ScanError> {
        if let Some(path) = &opts.checkpoint {
            state.save(path)?;
        }
        Ok(())
    };
    if state.complete {
        return Ok(state);
    }
    if state.cursor.is_none() {
        // Fail on an unwritable location before any output is produced.
        save(&state)?;
    }

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = opts.jobs {
        builder = builder.num_threads(jobs);
    }
    let pool = builder.build()?;

    let stride = opts.stride.max(1);
    let mut budget = opts.max_candidates.unwrap_or(u64::MAX);
    let mut order = positions(&range, state.cursor).peekable();
    loop {
        let take = (stride as u64).min(budget) as usize;
        let batch: Vec<Cursor> = order.by_ref().take(take).collect();
        if batch.is_empty() {
            break;
        }
        budget -= batch.len() as u64;
        let records: Vec<Option<ResultRecord>> = pool.install(|| {
            batch
                .par_iter()
                .map(|&pos| evaluate(pos, range.mode, opts.timing))
                .collect()
        });
        for record in records.into_iter().flatten() {
            writeln!(out, "{}", record.to_json_line())?;
            if record.verdict == Outcome::Prime {
                state.found.push(record);
            }
        }
        out.flush()?;
        state.cursor = batch.last().copied();
        if order.peek().is_none() {
            break;
        }
        save(&state)?;
        if budget == 0 {
            return Ok(state);
        }
    }
    state.complete = true;
    save(&state)?;
    Ok(state)
}
