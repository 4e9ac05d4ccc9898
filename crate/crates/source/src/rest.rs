//! Esplora-compatible REST chain source: `GET /tx/{txid}` and
//! `GET /tx/{txid}/outspend/{vout}`, JSON bodies, bounded in-flight
//! requests, exponential backoff on server errors.

use std::sync::{Condvar, Mutex};
use std::time::Duration;

use lnlife_core::chain::{OutPoint, Transaction, TxId};
use serde::de::DeserializeOwned;

use crate::{ChainSource, OutspendInfo, SourceError};

#[derive(Debug, Clone)]
pub struct RestConfig {
    pub base_url: String,
    pub timeout: Duration,
    /// Additional attempts after the first on a retryable failure.
    pub retries: u32,
    pub backoff_base: Duration,
    /// At most this many requests in flight at once.
    pub max_in_flight: usize,
}

impl RestConfig {
    pub fn new(base_url: impl Into<String>) -> Self {
        RestConfig {
            base_url: base_url.into(),
            timeout: Duration::from_secs(10),
            retries: 3,
            backoff_base: Duration::from_millis(200),
            max_in_flight: 8,
        }
    }
}

pub struct RestSource {
    client: reqwest::blocking::Client,
    config: RestConfig,
    in_flight: Semaphore,
}

impl RestSource {
    pub fn new(config: RestConfig) -> Result<Self, SourceError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| SourceError::SourceUnavailable(e.to_string()))?;
        let in_flight = Semaphore::new(config.max_in_flight.max(1));
        Ok(RestSource {
            client,
            config,
            in_flight,
        })
    }

    fn get_json<T: DeserializeOwned>(&self, path: &str) -> Result<T, SourceError> {
        let url = format!("{}{}", self.config.base_url.trim_end_matches('/'), path);
        let _permit = self.in_flight.acquire();

        let mut last_failure = String::new();
        for attempt in 0..=self.config.retries {
            if attempt > 0 {
                std::thread::sleep(self.config.backoff_base * 2u32.pow(attempt - 1));
            }
            match self.client.get(&url).send() {
                Ok(resp) => {
                    let status = resp.status();
                    if status.as_u16() == 404 {
                        return Err(SourceError::NotFound(url));
                    }
                    if status.is_success() {
                        return resp
                            .json::<T>()
                            .map_err(|e| SourceError::Malformed(format!("{url}: {e}")));
                    }
                    if status.is_server_error() {
                        last_failure = format!("{url}: HTTP {}", status.as_u16());
                        continue;
                    }
                    return Err(SourceError::Malformed(format!(
                        "{url}: unexpected HTTP {}",
                        status.as_u16()
                    )));
                }
                Err(e) => {
                    last_failure = format!("{url}: {e}");
                    continue;
                }
            }
        }
        Err(SourceError::SourceUnavailable(format!(
            "{last_failure} (after {} attempts)",
            self.config.retries + 1
        )))
    }
}

impl ChainSource for RestSource {
    fn tx(&self, txid: &TxId) -> Result<Transaction, SourceError> {
        let tx: Transaction = self.get_json(&format!("/tx/{txid}"))?;
        tx.validate()
            .map_err(|e| SourceError::Malformed(e.to_string()))?;
        Ok(tx)
    }

    fn outspend(&self, outpoint: &OutPoint) -> Result<OutspendInfo, SourceError> {
        let info: OutspendInfo =
            self.get_json(&format!("/tx/{}/outspend/{}", outpoint.txid, outpoint.vout))?;
        info.validate()?;
        Ok(info)
    }
}

/// A counting semaphore; permits release on drop.
struct Semaphore {
    available: Mutex<usize>,
    signal: Condvar,
}

struct Permit<'a>(&'a Semaphore);

impl Semaphore {
    fn new(permits: usize) -> Self {
        Semaphore {
            available: Mutex::new(permits),
            signal: Condvar::new(),
        }
    }

    fn acquire(&self) -> Permit<'_> {
        let mut available = self.available.lock().unwrap();
        while *available == 0 {
            available = self.signal.wait(available).unwrap();
        }
        *available -= 1;
        Permit(self)
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        *self.0.available.lock().unwrap() += 1;
        self.0.signal.notify_one();
    }
}
