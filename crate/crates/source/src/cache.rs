//! Append-only on-disk cache for transactions and outspends, plus the
//! source wrapper that consults it before going remote.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Mutex;

use lnlife_core::chain::{OutPoint, Transaction, TxId};
use serde::{Deserialize, Serialize};

use crate::fixture::FileHeader;
use crate::{ChainSource, OutspendInfo, SourceError};

pub const CACHE_FORMAT: &str = "lnlife-cache";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum CacheRecord {
    Tx {
        tx: Transaction,
    },
    Outspend {
        outpoint: OutPoint,
        info: OutspendInfo,
    },
}

struct CacheState {
    txs: HashMap<TxId, Transaction>,
    outspends: HashMap<OutPoint, OutspendInfo>,
    writer: BufWriter<File>,
}

/// An append-only store keyed by txid/outpoint with an explicit version
/// header. Replayed fully into memory on open. Cached unspent statuses can
/// go stale; delete the cache file to refresh them.
pub struct TxCache {
    state: Mutex<CacheState>,
}

impl TxCache {
    pub fn open(path: &Path) -> Result<Self, SourceError> {
        let mut txs = HashMap::new();
        let mut outspends = HashMap::new();
        let existing = path.exists();
        if existing {
            let reader = BufReader::new(File::open(path)?);
            let mut lines = reader.lines();
            let header_line = lines
                .next()
                .ok_or_else(|| SourceError::Malformed("cache file is empty".into()))??;
            let header: FileHeader = serde_json::from_str(&header_line)
                .map_err(|e| SourceError::Malformed(format!("cache header: {e}")))?;
            header.expect(CACHE_FORMAT)?;
            for line in lines {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let record: CacheRecord = serde_json::from_str(&line)
                    .map_err(|e| SourceError::Malformed(format!("cache record: {e}")))?;
                match record {
                    CacheRecord::Tx { tx } => {
                        txs.insert(tx.txid, tx);
                    }
                    CacheRecord::Outspend { outpoint, info } => {
                        outspends.insert(outpoint, info);
                    }
                }
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        let mut writer = BufWriter::new(file);
        if !existing {
            serde_json::to_writer(&mut writer, &FileHeader::new(CACHE_FORMAT))
                .map_err(|e| SourceError::Malformed(e.to_string()))?;
            writeln!(writer)?;
            writer.flush()?;
        }
        Ok(TxCache {
            state: Mutex::new(CacheState {
                txs,
                outspends,
                writer,
            }),
        })
    }

    pub fn get_tx(&self, txid: &TxId) -> Option<Transaction> {
        self.state.lock().unwrap().txs.get(txid).cloned()
    }

    pub fn get_outspend(&self, outpoint: &OutPoint) -> Option<OutspendInfo> {
        self.state.lock().unwrap().outspends.get(outpoint).cloned()
    }

    /// First write per key wins; later identical fetches are not re-appended.
    pub fn put_tx(&self, tx: &Transaction) -> Result<(), SourceError> {
        let mut state = self.state.lock().unwrap();
        if state.txs.contains_key(&tx.txid) {
            return Ok(());
        }
        append(&mut state.writer, &CacheRecord::Tx { tx: tx.clone() })?;
        state.txs.insert(tx.txid, tx.clone());
        Ok(())
    }

    pub fn put_outspend(
        &self,
        outpoint: &OutPoint,
        info: &OutspendInfo,
    ) -> Result<(), SourceError> {
        let mut state = self.state.lock().unwrap();
        if state.outspends.contains_key(outpoint) {
            return Ok(());
        }
        append(
            &mut state.writer,
            &CacheRecord::Outspend {
                outpoint: *outpoint,
                info: info.clone(),
            },
        )?;
        state.outspends.insert(*outpoint, info.clone());
        Ok(())
    }

    pub fn tx_count(&self) -> usize {
        self.state.lock().unwrap().txs.len()
    }
}

fn append(writer: &mut BufWriter<File>, record: &CacheRecord) -> Result<(), SourceError> {
    serde_json::to_writer(&mut *writer, record)
        .map_err(|e| SourceError::Malformed(e.to_string()))?;
    writeln!(writer)?;
    writer.flush()?;
    Ok(())
}

/// A chain source that fills an on-disk cache and serves repeats from it.
pub struct CachedSource<S: ChainSource> {
    inner: S,
    cache: TxCache,
}

impl<S: ChainSource> CachedSource<S> {
    pub fn new(inner: S, cache: TxCache) -> Self {
        CachedSource { inner, cache }
    }

    pub fn cache(&self) -> &TxCache {
        &self.cache
    }
}

impl<S: ChainSource> ChainSource for CachedSource<S> {
    fn tx(&self, txid: &TxId) -> Result<Transaction, SourceError> {
        if let Some(tx) = self.cache.get_tx(txid) {
            return Ok(tx);
        }
        let tx = self.inner.tx(txid)?;
        self.cache.put_tx(&tx)?;
        Ok(tx)
    }

    fn outspend(&self, outpoint: &OutPoint) -> Result<OutspendInfo, SourceError> {
        if let Some(info) = self.cache.get_outspend(outpoint) {
            return Ok(info);
        }
        let info = self.inner.outspend(outpoint)?;
        self.cache.put_outspend(outpoint, &info)?;
        Ok(info)
    }
}
