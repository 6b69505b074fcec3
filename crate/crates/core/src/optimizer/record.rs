use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MoveKind {
    Initial,
    BasinHop,
    Cyclic,
    Mutation,
    Swap,
    /// Search state reset to the best configuration seen so far.
    ReturnToBest,
    AdaptAppend,
}

/// Which discrete neighbour a move selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum MoveDetail {
    None,
    Cyclic { offset: usize },
    Mutation { position: usize, operator: usize },
    Swap { first: usize, second: usize },
    Append { operator: usize },
}

/// One line of the optimisation record stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoveRecord {
    pub restart: usize,
    pub cycle: usize,
    pub kind: MoveKind,
    pub detail: MoveDetail,
    pub accepted: bool,
    pub uphill: bool,
    /// Energy of the configuration the move started from.
    pub energy_before: f64,
    /// Energy of the best candidate the move produced.
    pub candidate_energy: f64,
    pub best_energy: f64,
    pub grad_norm: f64,
    pub relaxations: usize,
    pub temperature: f64,
    pub seed: u64,
    /// ChaCha word position after the move, as a decimal string.
    pub rng_word_pos: String,
}

pub fn write_records<W: Write>(records: &[MoveRecord], mut out: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_records(text: &str) -> Result<Vec<MoveRecord>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| Ok(serde_json::from_str(l)?))
        .collect()
}
