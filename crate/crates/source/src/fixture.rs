//! Newline-delimited transaction fixture files and the in-memory source
//! built from them.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use lnlife_core::chain::{OutPoint, Transaction, TxId};
use lnlife_core::gossip::ShortChannelId;
use serde::{Deserialize, Serialize};

use crate::{ChainSource, OutspendInfo, SourceError};

pub const CHAIN_FORMAT: &str = "lnlife-chain";
pub const FORMAT_VERSION: u32 = 1;

/// First line of every file this toolkit emits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileHeader {
    pub format: String,
    pub version: u32,
}

impl FileHeader {
    pub fn new(format: &str) -> Self {
        FileHeader {
            format: format.to_string(),
            version: FORMAT_VERSION,
        }
    }

    pub fn expect(&self, format: &str) -> Result<(), SourceError> {
        if self.format != format || self.version != FORMAT_VERSION {
            return Err(SourceError::Malformed(format!(
                "unexpected file header {}/{} (wanted {}/{})",
                self.format, self.version, format, FORMAT_VERSION
            )));
        }
        Ok(())
    }
}

/// Writes a chain fixture file: a header line followed by one transaction
/// object per line.
pub fn write_chain_file(path: &Path, txs: &[Transaction]) -> Result<(), SourceError> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer(&mut w, &FileHeader::new(CHAIN_FORMAT))
        .map_err(|e| SourceError::Malformed(e.to_string()))?;
    writeln!(w)?;
    for tx in txs {
        serde_json::to_writer(&mut w, tx).map_err(|e| SourceError::Malformed(e.to_string()))?;
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a chain fixture file. The header line is optional so that plain
/// transaction dumps also load.
pub fn read_chain_file(path: &Path) -> Result<Vec<Transaction>, SourceError> {
    let reader = BufReader::new(File::open(path)?);
    let mut txs = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if lineno == 0 {
            if let Ok(header) = serde_json::from_str::<FileHeader>(trimmed) {
                header.expect(CHAIN_FORMAT)?;
                continue;
            }
        }
        let tx: Transaction = serde_json::from_str(trimmed).map_err(|e| {
            SourceError::Malformed(format!("{}:{}: {}", path.display(), lineno + 1, e))
        })?;
        tx.validate()
            .map_err(|e| SourceError::Malformed(e.to_string()))?;
        txs.push(tx);
    }
    Ok(txs)
}

/// True when the file's first line is a header naming a non-chain format.
fn declares_other_format(path: &Path) -> Result<bool, SourceError> {
    let mut reader = BufReader::new(File::open(path)?);
    let mut first = String::new();
    reader.read_line(&mut first)?;
    Ok(serde_json::from_str::<FileHeader>(first.trim())
        .is_ok_and(|header| header.format != CHAIN_FORMAT))
}

/// An offline chain source over a set of fixture transactions, with a spend
/// index and a (height, index-in-block) index for short-channel-id lookups.
pub struct FixtureSource {
    txs: HashMap<TxId, Transaction>,
    spend_index: HashMap<OutPoint, (TxId, u32)>,
    position_index: HashMap<(u64, u32), TxId>,
}

impl FixtureSource {
    /// Loads every `*.jsonl` chain file in `dir`, in file-name order.
    /// Files whose header declares another format (gossip, truth, …) are
    /// skipped, so a whole corpus directory can be passed directly.
    pub fn from_dir(dir: &Path) -> Result<Self, SourceError> {
        let mut paths: Vec<_> = std::fs::read_dir(dir)?
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|ext| ext == "jsonl"))
            .collect();
        paths.sort();
        let mut txs = Vec::new();
        for path in paths {
            if declares_other_format(&path)? {
                continue;
            }
            txs.extend(read_chain_file(&path)?);
        }
        Ok(Self::from_transactions(txs))
    }

    pub fn from_file(path: &Path) -> Result<Self, SourceError> {
        Ok(Self::from_transactions(read_chain_file(path)?))
    }

    /// Builds the source from already-parsed transactions. Transactions are
    /// positioned within their block in input order; ingesting a duplicate
    /// txid keeps the first record.
    pub fn from_transactions(transactions: impl IntoIterator<Item = Transaction>) -> Self {
        let mut txs = HashMap::new();
        let mut spend_index = HashMap::new();
        let mut position_index = HashMap::new();
        let mut rank_in_block: HashMap<u64, u32> = HashMap::new();

        for tx in transactions {
            if txs.contains_key(&tx.txid) {
                continue;
            }
            for (i, input) in tx.inputs.iter().enumerate() {
                spend_index.insert(input.prevout, (tx.txid, i as u32));
            }
            if let Some(height) = tx.block_height {
                let rank = rank_in_block.entry(height).or_insert(0);
                position_index.insert((height, *rank), tx.txid);
                *rank += 1;
            }
            txs.insert(tx.txid, tx);
        }
        FixtureSource {
            txs,
            spend_index,
            position_index,
        }
    }

    /// Resolves a short channel id to the funding outpoint it names.
    pub fn resolve_scid(&self, scid: &ShortChannelId) -> Option<OutPoint> {
        let txid = self.position_index.get(&(scid.block, scid.tx_index))?;
        let tx = self.txs.get(txid)?;
        (scid.vout < tx.outputs.len() as u32).then(|| OutPoint::new(*txid, scid.vout))
    }

    /// The short channel id of a confirmed outpoint, if it is indexed.
    pub fn scid_of(&self, outpoint: &OutPoint) -> Option<ShortChannelId> {
        let tx = self.txs.get(&outpoint.txid)?;
        let height = tx.block_height?;
        let (&(block, tx_index), _) = self
            .position_index
            .iter()
            .find(|((h, _), txid)| *h == height && **txid == outpoint.txid)?;
        Some(ShortChannelId {
            block,
            tx_index,
            vout: outpoint.vout,
        })
    }

    pub fn transactions(&self) -> impl Iterator<Item = &Transaction> {
        self.txs.values()
    }

    pub fn len(&self) -> usize {
        self.txs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.txs.is_empty()
    }
}

impl ChainSource for FixtureSource {
    fn tx(&self, txid: &TxId) -> Result<Transaction, SourceError> {
        self.txs
            .get(txid)
            .cloned()
            .ok_or_else(|| SourceError::NotFound(format!("tx {txid}")))
    }

    fn outspend(&self, outpoint: &OutPoint) -> Result<OutspendInfo, SourceError> {
        let tx = self
            .txs
            .get(&outpoint.txid)
            .ok_or_else(|| SourceError::NotFound(format!("tx {}", outpoint.txid)))?;
        if outpoint.vout as usize >= tx.outputs.len() {
            return Err(SourceError::NotFound(format!("output {outpoint}")));
        }
        Ok(match self.spend_index.get(outpoint) {
            Some((spender, input_index)) => {
                let height = self.txs.get(spender).and_then(|t| t.block_height);
                OutspendInfo::spent_by(*spender, *input_index, height)
            }
            None => OutspendInfo::unspent(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use lnlife_core::chain::{TxInput, TxOutput};

    fn txid(n: u8) -> TxId {
        TxId([n; 32])
    }

    fn tx(id: u8, spends: Option<(u8, u32)>, n_outputs: usize, height: u64) -> Transaction {
        let prevout = match spends {
            Some((parent, vout)) => OutPoint::new(txid(parent), vout),
            None => OutPoint::new(txid(0xf0 + id), 0),
        };
        Transaction {
            txid: txid(id),
            inputs: vec![TxInput {
                prevout,
                witness: vec![vec![0x01]],
                sequence: 0,
            }],
            outputs: (0..n_outputs)
                .map(|i| TxOutput {
                    value: 1000 * (i as u64 + 1),
                    script_pubkey: vec![0x51],
                })
                .collect(),
            locktime: 0,
            block_height: Some(height),
            block_time: Some(1_600_000_000 + height * 600),
        }
    }

    #[test]
    fn fixture_lookup_and_outspends() {
        let funding = tx(1, None, 2, 100);
        let spender = tx(2, Some((1, 0)), 1, 105);
        let source = FixtureSource::from_transactions([funding.clone(), spender]);

        assert_eq!(source.tx(&txid(1)).unwrap(), funding);
        assert!(source.tx(&txid(9)).unwrap_err().is_not_found());

        let spent = source.outspend(&OutPoint::new(txid(1), 0)).unwrap();
        assert_eq!(spent.spender, Some(txid(2)));
        assert_eq!(spent.spend_input_index, Some(0));
        assert_eq!(spent.spend_height, Some(105));

        let unspent = source.outspend(&OutPoint::new(txid(1), 1)).unwrap();
        assert!(!unspent.spent);

        assert!(source
            .outspend(&OutPoint::new(txid(1), 5))
            .unwrap_err()
            .is_not_found());
    }

    #[test]
    fn chain_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("chain.jsonl");
        let txs = vec![tx(1, None, 2, 100), tx(2, Some((1, 0)), 1, 105)];
        write_chain_file(&path, &txs).unwrap();
        let back = read_chain_file(&path).unwrap();
        assert_eq!(back, txs);

        // header must carry the right format
        std::fs::write(&path, "{\"format\":\"other\",\"version\":1}\n").unwrap();
        assert!(read_chain_file(&path).is_err());
    }

    #[test]
    fn scid_resolution_follows_block_order() {
        // two txs in block 100: ranks 0 and 1 in input order
        let a = tx(1, None, 1, 100);
        let b = tx(2, None, 2, 100);
        let source = FixtureSource::from_transactions([a, b]);

        let scid = ShortChannelId {
            block: 100,
            tx_index: 1,
            vout: 1,
        };
        assert_eq!(source.resolve_scid(&scid), Some(OutPoint::new(txid(2), 1)));
        assert_eq!(source.scid_of(&OutPoint::new(txid(2), 1)), Some(scid));

        // vout out of range
        let bad = ShortChannelId {
            block: 100,
            tx_index: 0,
            vout: 3,
        };
        assert_eq!(source.resolve_scid(&bad), None);
    }

    #[test]
    fn duplicate_ingestion_is_idempotent() {
        let a = tx(1, None, 1, 100);
        let source = FixtureSource::from_transactions([a.clone(), a.clone(), a]);
        assert_eq!(source.len(), 1);
    }
}
