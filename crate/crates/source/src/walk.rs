//! Walks a channel from its funding outpoint to the closing transaction and
//! on to the spends of the closing outputs.

use lnlife_core::chain::{OutPoint, Transaction};

use crate::{ChainSource, SourceError};

/// A transaction spending an output reached `depth` levels below the close.
#[derive(Debug, Clone)]
pub struct DownstreamSpend {
    pub from: OutPoint,
    pub depth: u32,
    pub tx: Transaction,
}

#[derive(Debug, Clone)]
pub struct WalkResult {
    pub funding_tx: Transaction,
    pub close_tx: Option<Transaction>,
    pub downstream: Vec<DownstreamSpend>,
    pub depth_reached: u32,
    /// One annotation per leg that could not be fetched.
    pub issues: Vec<String>,
}

/// Fetches the funding transaction, the transaction spending the funding
/// outpoint (the close), and the spends of every closing output down to
/// `max_downstream_depth` levels. A failed leg is recorded in `issues` and
/// the walk continues; only a missing funding transaction is fatal.
pub fn walk_channel(
    source: &dyn ChainSource,
    funding: OutPoint,
    max_downstream_depth: u32,
) -> Result<WalkResult, SourceError> {
    let funding_tx = source.tx(&funding.txid)?;
    if funding.vout as usize >= funding_tx.outputs.len() {
        return Err(SourceError::NotFound(format!("output {funding}")));
    }

    let mut result = WalkResult {
        funding_tx,
        close_tx: None,
        downstream: Vec::new(),
        depth_reached: 0,
        issues: Vec::new(),
    };

    let close_txid = match source.outspend(&funding) {
        Ok(info) if info.spent => info.spender.expect("validated: spent implies spender"),
        Ok(_) => return Ok(result), // still open
        Err(e) => {
            result.issues.push(format!("outspend {funding}: {e}"));
            return Ok(result);
        }
    };
    let close_tx = match source.tx(&close_txid) {
        Ok(tx) => tx,
        Err(e) => {
            result.issues.push(format!("close tx {close_txid}: {e}"));
            return Ok(result);
        }
    };

    let mut frontier: Vec<OutPoint> = (0..close_tx.outputs.len() as u32)
        .map(|vout| OutPoint::new(close_txid, vout))
        .collect();
    result.close_tx = Some(close_tx);

    for depth in 1..=max_downstream_depth {
        let mut next = Vec::new();
        for outpoint in frontier {
            let info = match source.outspend(&outpoint) {
                Ok(info) => info,
                Err(e) => {
                    result.issues.push(format!("outspend {outpoint}: {e}"));
                    continue;
                }
            };
            let Some(spender) = info.spender else {
                continue;
            };
            let tx = match source.tx(&spender) {
                Ok(tx) => tx,
                Err(e) => {
                    result.issues.push(format!("spend tx {spender}: {e}"));
                    continue;
                }
            };
            next.extend((0..tx.outputs.len() as u32).map(|vout| OutPoint::new(spender, vout)));
            result.downstream.push(DownstreamSpend {
                from: outpoint,
                depth,
                tx,
            });
            result.depth_reached = depth;
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(result)
}
