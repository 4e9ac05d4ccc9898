//! Minimal Bitcoin-side data model: transactions, outpoints, block references,
//! and the hash utilities needed for witness-program verification.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

/// Sanity bound on a single witness item.
pub const MAX_WITNESS_ITEM_LEN: usize = 10_000;

/// A transaction id: 32 bytes, displayed in the usual reversed-hex convention.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TxId(pub [u8; 32]);

impl TxId {
    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }
}

impl fmt::Display for TxId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // byte-reversed, as block explorers print txids
        for b in self.0.iter().rev() {
            write!(f, "{:02x}", b)?;
        }
        Ok(())
    }
}

impl fmt::Debug for TxId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TxId({})", self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid txid: expected 64 hex chars")]
pub struct TxIdParseError;

impl FromStr for TxId {
    type Err = TxIdParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut bytes: Vec<u8> = hex::decode(s).map_err(|_| TxIdParseError)?;
        if bytes.len() != 32 {
            return Err(TxIdParseError);
        }
        bytes.reverse();
        let mut out = [0u8; 32];
        out.copy_from_slice(&bytes);
        Ok(TxId(out))
    }
}

impl Serialize for TxId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TxId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A reference to a specific transaction output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OutPoint {
    pub txid: TxId,
    pub vout: u32,
}

impl OutPoint {
    pub fn new(txid: TxId, vout: u32) -> Self {
        OutPoint { txid, vout }
    }
}

impl fmt::Display for OutPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.txid, self.vout)
    }
}

/// A transaction output: amount in satoshis plus the locking script.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TxOutput {
    pub value: u64,
    #[serde(with = "hex_bytes")]
    pub script_pubkey: Vec<u8>,
}

/// A transaction input with its witness stack.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TxInput {
    pub prevout: OutPoint,
    #[serde(with = "hex_items")]
    pub witness: Vec<Vec<u8>>,
    pub sequence: u32,
}

/// The transaction model used throughout: enough to classify channel
/// lifecycles (witnesses, output scripts and values, locktime), nothing more.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transaction {
    pub txid: TxId,
    pub inputs: Vec<TxInput>,
    pub outputs: Vec<TxOutput>,
    pub locktime: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_height: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_time: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TxValidationError {
    #[error("transaction {0} has no inputs")]
    NoInputs(TxId),
    #[error("transaction {0} has no outputs")]
    NoOutputs(TxId),
    #[error("transaction {txid} input {input} witness item of {len} bytes exceeds bound")]
    OversizedWitnessItem {
        txid: TxId,
        input: usize,
        len: usize,
    },
}

impl Transaction {
    /// Checks the structural invariants the rest of the pipeline relies on.
    pub fn validate(&self) -> Result<(), TxValidationError> {
        if self.inputs.is_empty() {
            return Err(TxValidationError::NoInputs(self.txid));
        }
        if self.outputs.is_empty() {
            return Err(TxValidationError::NoOutputs(self.txid));
        }
        for (i, input) in self.inputs.iter().enumerate() {
            if let Some(item) = input
                .witness
                .iter()
                .find(|w| w.len() > MAX_WITNESS_ITEM_LEN)
            {
                return Err(TxValidationError::OversizedWitnessItem {
                    txid: self.txid,
                    input: i,
                    len: item.len(),
                });
            }
        }
        Ok(())
    }

    /// The input index spending `outpoint`, if any.
    pub fn input_spending(&self, outpoint: &OutPoint) -> Option<usize> {
        self.inputs.iter().position(|i| i.prevout == *outpoint)
    }
}

/// A block position paired with its timestamp. Lifetimes are reported in
/// days (timestamps) while delays are reported in blocks (heights), so both
/// are carried together.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockRef {
    pub height: u64,
    pub time: u64,
}

/// Plain SHA-256.
pub fn sha256(data: &[u8]) -> [u8; 32] {
    Sha256::digest(data).into()
}

/// Builds the P2WSH script_pubkey committing to `witness_script`:
/// `OP_0 <32-byte sha256(witness_script)>`.
pub fn p2wsh_script_pubkey(witness_script: &[u8]) -> Vec<u8> {
    let mut spk = Vec::with_capacity(34);
    spk.push(0x00);
    spk.push(0x20);
    spk.extend_from_slice(&sha256(witness_script));
    spk
}

/// Returns the 32-byte witness program if `script_pubkey` is P2WSH-shaped.
pub fn p2wsh_program(script_pubkey: &[u8]) -> Option<&[u8]> {
    if script_pubkey.len() == 34 && script_pubkey[0] == 0x00 && script_pubkey[1] == 0x20 {
        Some(&script_pubkey[2..])
    } else {
        None
    }
}

pub fn is_p2wsh(script_pubkey: &[u8]) -> bool {
    p2wsh_program(script_pubkey).is_some()
}

/// `OP_0 <20 bytes>`: version-0 pay-to-witness-pubkey-hash.
pub fn is_p2wpkh(script_pubkey: &[u8]) -> bool {
    script_pubkey.len() == 22 && script_pubkey[0] == 0x00 && script_pubkey[1] == 0x14
}

/// Serde helper: bytes as a hex string.
pub mod hex_bytes {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bytes: &[u8], serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&hex::encode(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Vec<u8>, D::Error> {
        let s = String::deserialize(deserializer)?;
        hex::decode(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde helper: a list of byte strings as hex strings.
pub mod hex_items {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(items: &[Vec<u8>], serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(items.iter().map(hex::encode))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> Result<Vec<Vec<u8>>, D::Error> {
        let items = Vec::<String>::deserialize(deserializer)?;
        items
            .into_iter()
            .map(|s| hex::decode(&s).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_empty_input() {
        assert_eq!(
            hex::encode(sha256(b"")),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn sha256_abc() {
        assert_eq!(
            hex::encode(sha256(b"abc")),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn sha256_digest_is_32_bytes() {
        assert_eq!(sha256(&[0xabu8; 33]).len(), 32);
    }

    #[test]
    fn p2wsh_layout() {
        let script = [0x51u8, 0x52, 0x53];
        let spk = p2wsh_script_pubkey(&script);
        assert_eq!(spk.len(), 34);
        assert_eq!(spk[0], 0x00);
        assert_eq!(spk[1], 0x20);
        assert_eq!(&spk[2..], &sha256(&script));
        assert!(is_p2wsh(&spk));
    }

    #[test]
    fn p2wsh_distinct_scripts_distinct_outputs() {
        let a = p2wsh_script_pubkey(&[0x51]);
        let b = p2wsh_script_pubkey(&[0x52]);
        assert_ne!(a, b);
    }

    #[test]
    fn txid_display_is_reversed_hex() {
        let mut bytes = [0u8; 32];
        bytes[0] = 0xbe;
        bytes[31] = 0x89;
        let txid = TxId(bytes);
        let s = txid.to_string();
        assert_eq!(s.len(), 64);
        assert!(s.starts_with("89"));
        assert!(s.ends_with("be"));
        assert_eq!(s.parse::<TxId>().unwrap(), txid);
    }

    #[test]
    fn txid_parse_rejects_bad_input() {
        assert!("zz".parse::<TxId>().is_err());
        assert!("ab".repeat(31).parse::<TxId>().is_err());
    }

    #[test]
    fn transaction_serde_roundtrip() {
        let tx = Transaction {
            txid: TxId([7u8; 32]),
            inputs: vec![TxInput {
                prevout: OutPoint::new(TxId([1u8; 32]), 3),
                witness: vec![vec![0x01, 0x02], vec![]],
                sequence: 0xffff_ffff,
            }],
            outputs: vec![TxOutput {
                value: 123_456,
                script_pubkey: vec![0x00, 0x14, 0xaa],
            }],
            locktime: 0,
            block_height: Some(700_000),
            block_time: Some(1_600_000_000),
        };
        let json = serde_json::to_string(&tx).unwrap();
        let back: Transaction = serde_json::from_str(&json).unwrap();
        assert_eq!(back, tx);
    }

    #[test]
    fn validate_flags_structural_problems() {
        let ok = Transaction {
            txid: TxId([9u8; 32]),
            inputs: vec![TxInput {
                prevout: OutPoint::new(TxId([0u8; 32]), 0),
                witness: vec![],
                sequence: 0,
            }],
            outputs: vec![TxOutput {
                value: 1,
                script_pubkey: vec![0x51],
            }],
            locktime: 0,
            block_height: None,
            block_time: None,
        };
        assert!(ok.validate().is_ok());

        let mut no_outputs = ok.clone();
        no_outputs.outputs.clear();
        assert!(matches!(
            no_outputs.validate(),
            Err(TxValidationError::NoOutputs(_))
        ));

        let mut oversized = ok;
        oversized.inputs[0].witness = vec![vec![0u8; MAX_WITNESS_ITEM_LEN + 1]];
        assert!(matches!(
            oversized.validate(),
            Err(TxValidationError::OversizedWitnessItem { .. })
        ));
    }
}
