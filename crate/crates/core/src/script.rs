//! Script parsing and Lightning script-blueprint matching.
//!
//! Locking scripts are tokenized and compared against the exact shapes the
//! Lightning protocol produces: the 2-of-2 funding script, the revocable
//! to_local output, the anchor output, and the direct-spend to_remote forms.
//! Everything that hashes correctly but matches none of those is an HTLC.

use serde::{Deserialize, Serialize};

use crate::chain::{is_p2wpkh, p2wsh_program, sha256, TxOutput};

pub const OP_0: u8 = 0x00;
pub const OP_PUSHDATA1: u8 = 0x4c;
pub const OP_PUSHDATA2: u8 = 0x4d;
pub const OP_PUSHDATA4: u8 = 0x4e;
pub const OP_1: u8 = 0x51;
pub const OP_2: u8 = 0x52;
pub const OP_15: u8 = 0x5f;
pub const OP_16: u8 = 0x60;
pub const OP_IF: u8 = 0x63;
pub const OP_NOTIF: u8 = 0x64;
pub const OP_ELSE: u8 = 0x67;
pub const OP_ENDIF: u8 = 0x68;
pub const OP_IFDUP: u8 = 0x73;
pub const OP_DROP: u8 = 0x75;
pub const OP_EQUAL: u8 = 0x87;
pub const OP_EQUALVERIFY: u8 = 0x88;
pub const OP_HASH160: u8 = 0xa9;
pub const OP_CHECKSIG: u8 = 0xac;
pub const OP_CHECKSIGVERIFY: u8 = 0xad;
pub const OP_CHECKMULTISIG: u8 = 0xae;
pub const OP_CHECKSEQUENCEVERIFY: u8 = 0xb2;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScriptError {
    #[error("push at offset {offset} declares {declared} bytes but only {available} remain")]
    TruncatedPush {
        offset: usize,
        declared: usize,
        available: usize,
    },
    #[error("revealed witness script does not hash to the output's witness program")]
    HashMismatch,
    #[error("witness does not have the expected shape for a to_local spend")]
    MalformedWitness,
}

/// One element of a tokenized script: an opcode byte or a data push.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScriptToken {
    Op(u8),
    Push(Vec<u8>),
}

/// Tokenizes a locking script. Every push length is checked against the
/// remaining bytes; unknown opcodes are kept as raw byte values.
pub fn parse_script(bytes: &[u8]) -> Result<Vec<ScriptToken>, ScriptError> {
    let mut tokens = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let op = bytes[pos];
        pos += 1;
        let push_len = match op {
            0x01..=0x4b => Some(op as usize),
            OP_PUSHDATA1 => {
                let len = read_le(bytes, &mut pos, 1, op)?;
                Some(len)
            }
            OP_PUSHDATA2 => {
                let len = read_le(bytes, &mut pos, 2, op)?;
                Some(len)
            }
            OP_PUSHDATA4 => {
                let len = read_le(bytes, &mut pos, 4, op)?;
                Some(len)
            }
            _ => None,
        };
        match push_len {
            Some(len) => {
                if bytes.len() - pos < len {
                    return Err(ScriptError::TruncatedPush {
                        offset: pos,
                        declared: len,
                        available: bytes.len() - pos,
                    });
                }
                tokens.push(ScriptToken::Push(bytes[pos..pos + len].to_vec()));
                pos += len;
            }
            None => tokens.push(ScriptToken::Op(op)),
        }
    }
    Ok(tokens)
}

fn read_le(bytes: &[u8], pos: &mut usize, width: usize, _op: u8) -> Result<usize, ScriptError> {
    if bytes.len() - *pos < width {
        return Err(ScriptError::TruncatedPush {
            offset: *pos,
            declared: width,
            available: bytes.len() - *pos,
        });
    }
    let mut len = 0usize;
    for i in 0..width {
        len |= (bytes[*pos + i] as usize) << (8 * i);
    }
    *pos += width;
    Ok(len)
}

/// Serializes tokens back to script bytes, using minimal push encodings.
pub fn serialize_script(tokens: &[ScriptToken]) -> Vec<u8> {
    let mut out = Vec::new();
    for token in tokens {
        match token {
            ScriptToken::Op(op) => out.push(*op),
            ScriptToken::Push(data) => {
                match data.len() {
                    0 => out.push(OP_0),
                    1..=0x4b => out.push(data.len() as u8),
                    0x4c..=0xff => {
                        out.push(OP_PUSHDATA1);
                        out.push(data.len() as u8);
                    }
                    0x100..=0xffff => {
                        out.push(OP_PUSHDATA2);
                        out.extend_from_slice(&(data.len() as u16).to_le_bytes());
                    }
                    _ => {
                        out.push(OP_PUSHDATA4);
                        out.extend_from_slice(&(data.len() as u32).to_le_bytes());
                    }
                }
                out.extend_from_slice(data);
            }
        }
    }
    out
}

/// Encodes `n` as a script number: little-endian sign-magnitude, minimal.
/// This is the consensus encoding, so e.g. 144 takes two bytes (0x90 0x00).
pub fn encode_script_num(n: i64) -> Vec<u8> {
    if n == 0 {
        return Vec::new();
    }
    let negative = n < 0;
    let mut abs = n.unsigned_abs();
    let mut out = Vec::new();
    while abs > 0 {
        out.push((abs & 0xff) as u8);
        abs >>= 8;
    }
    if out.last().is_some_and(|b| b & 0x80 != 0) {
        out.push(if negative { 0x80 } else { 0x00 });
    } else if negative {
        let last = out.last_mut().expect("non-zero value has bytes");
        *last |= 0x80;
    }
    out
}

/// Decodes a minimally encoded script number; `None` for any non-minimal
/// encoding (trailing zero without a preceding sign byte, encoded zero, …).
pub fn decode_script_num_minimal(bytes: &[u8]) -> Option<i64> {
    if bytes.is_empty() {
        return Some(0);
    }
    if bytes.len() > 8 {
        return None;
    }
    let last = bytes[bytes.len() - 1];
    if last & 0x7f == 0 && (bytes.len() < 2 || bytes[bytes.len() - 2] & 0x80 == 0) {
        return None;
    }
    let negative = last & 0x80 != 0;
    let mut magnitude: i64 = 0;
    for (i, &b) in bytes.iter().enumerate() {
        let b = if i == bytes.len() - 1 { b & 0x7f } else { b };
        magnitude |= (b as i64) << (8 * i);
    }
    Some(if negative { -magnitude } else { magnitude })
}

/// The 2-of-2 multisig witness script that funds a channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FundingScript {
    pub pubkey1: [u8; 33],
    pub pubkey2: [u8; 33],
}

/// The revocable to_local commitment output script.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalOutputScript {
    pub revocation_pubkey: [u8; 33],
    pub local_delayed_pubkey: [u8; 33],
    pub to_self_delay: u16,
}

/// The fee-bumping anchor output script.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnchorScript {
    pub funding_pubkey: [u8; 33],
}

/// `2 <pubkey1> <pubkey2> 2 OP_CHECKMULTISIG`
pub fn build_funding_script(pubkey1: &[u8; 33], pubkey2: &[u8; 33]) -> Vec<u8> {
    serialize_script(&[
        ScriptToken::Op(OP_2),
        ScriptToken::Push(pubkey1.to_vec()),
        ScriptToken::Push(pubkey2.to_vec()),
        ScriptToken::Op(OP_2),
        ScriptToken::Op(OP_CHECKMULTISIG),
    ])
}

/// `OP_IF <revocationpubkey> OP_ELSE <to_self_delay> OP_CSV OP_DROP
/// <local_delayedpubkey> OP_ENDIF OP_CHECKSIG`
pub fn build_local_script(script: &LocalOutputScript) -> Vec<u8> {
    serialize_script(&[
        ScriptToken::Op(OP_IF),
        ScriptToken::Push(script.revocation_pubkey.to_vec()),
        ScriptToken::Op(OP_ELSE),
        ScriptToken::Push(encode_script_num(script.to_self_delay as i64)),
        ScriptToken::Op(OP_CHECKSEQUENCEVERIFY),
        ScriptToken::Op(OP_DROP),
        ScriptToken::Push(script.local_delayed_pubkey.to_vec()),
        ScriptToken::Op(OP_ENDIF),
        ScriptToken::Op(OP_CHECKSIG),
    ])
}

/// `<funding_pubkey> OP_CHECKSIG OP_IFDUP OP_NOTIF OP_16 OP_CSV OP_ENDIF`
pub fn build_anchor_script(funding_pubkey: &[u8; 33]) -> Vec<u8> {
    serialize_script(&[
        ScriptToken::Push(funding_pubkey.to_vec()),
        ScriptToken::Op(OP_CHECKSIG),
        ScriptToken::Op(OP_IFDUP),
        ScriptToken::Op(OP_NOTIF),
        ScriptToken::Op(OP_16),
        ScriptToken::Op(OP_CHECKSEQUENCEVERIFY),
        ScriptToken::Op(OP_ENDIF),
    ])
}

/// `<remote_pubkey> OP_CHECKSIGVERIFY OP_1 OP_CSV`: the anchor-era
/// to_remote witness script (one-block delayed, otherwise direct spend).
pub fn build_remote_delayed_script(remote_pubkey: &[u8; 33]) -> Vec<u8> {
    serialize_script(&[
        ScriptToken::Push(remote_pubkey.to_vec()),
        ScriptToken::Op(OP_CHECKSIGVERIFY),
        ScriptToken::Op(OP_1),
        ScriptToken::Op(OP_CHECKSEQUENCEVERIFY),
    ])
}

/// `OP_0 <20-byte key hash>`
pub fn p2wpkh_script_pubkey(pubkey_hash: &[u8; 20]) -> Vec<u8> {
    let mut spk = Vec::with_capacity(22);
    spk.push(0x00);
    spk.push(0x14);
    spk.extend_from_slice(pubkey_hash);
    spk
}

fn as_key(data: &[u8]) -> Option<[u8; 33]> {
    if data.len() == 33 {
        let mut key = [0u8; 33];
        key.copy_from_slice(data);
        Some(key)
    } else {
        None
    }
}

fn is_compressed_key(data: &[u8]) -> bool {
    data.len() == 33 && (data[0] == 0x02 || data[0] == 0x03)
}

/// Matches the canonical 2-of-2 funding script. Both keys must be
/// compressed-form (0x02/0x03 prefix).
pub fn match_funding(witness_script: &[u8]) -> Option<FundingScript> {
    let tokens = parse_script(witness_script).ok()?;
    match tokens.as_slice() {
        [ScriptToken::Op(OP_2), ScriptToken::Push(k1), ScriptToken::Push(k2), ScriptToken::Op(OP_2), ScriptToken::Op(OP_CHECKMULTISIG)]
            if is_compressed_key(k1) && is_compressed_key(k2) =>
        {
            Some(FundingScript {
                pubkey1: as_key(k1)?,
                pubkey2: as_key(k2)?,
            })
        }
        _ => None,
    }
}

/// Matches the to_local blueprint. The delay push must be a minimally
/// encoded script number in 1..=65535; anything else is no match.
pub fn match_local(witness_script: &[u8]) -> Option<LocalOutputScript> {
    let tokens = parse_script(witness_script).ok()?;
    match tokens.as_slice() {
        [ScriptToken::Op(OP_IF), ScriptToken::Push(rev), ScriptToken::Op(OP_ELSE), ScriptToken::Push(delay), ScriptToken::Op(OP_CHECKSEQUENCEVERIFY), ScriptToken::Op(OP_DROP), ScriptToken::Push(delayed), ScriptToken::Op(OP_ENDIF), ScriptToken::Op(OP_CHECKSIG)] =>
        {
            let n = decode_script_num_minimal(delay)?;
            if !(1..=65_535).contains(&n) {
                return None;
            }
            Some(LocalOutputScript {
                revocation_pubkey: as_key(rev)?,
                local_delayed_pubkey: as_key(delayed)?,
                to_self_delay: n as u16,
            })
        }
        _ => None,
    }
}

/// Matches the anchor blueprint.
pub fn match_anchor(witness_script: &[u8]) -> Option<AnchorScript> {
    let tokens = parse_script(witness_script).ok()?;
    match tokens.as_slice() {
        [ScriptToken::Push(key), ScriptToken::Op(OP_CHECKSIG), ScriptToken::Op(OP_IFDUP), ScriptToken::Op(OP_NOTIF), ScriptToken::Op(OP_16), ScriptToken::Op(OP_CHECKSEQUENCEVERIFY), ScriptToken::Op(OP_ENDIF)] => {
            Some(AnchorScript {
                funding_pubkey: as_key(key)?,
            })
        }
        _ => None,
    }
}

fn match_remote_delayed(witness_script: &[u8]) -> bool {
    matches!(
        parse_script(witness_script).ok().as_deref(),
        Some(
            [ScriptToken::Push(key), ScriptToken::Op(OP_CHECKSIGVERIFY), ScriptToken::Op(OP_1), ScriptToken::Op(OP_CHECKSEQUENCEVERIFY)]
        ) if key.len() == 33
    )
}

/// How a commitment output was classified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OutputClass {
    ToLocal(LocalOutputScript),
    ToRemote,
    Anchor(AnchorScript),
    Htlc,
    Unspent,
}

impl OutputClass {
    pub fn is_anchor(&self) -> bool {
        matches!(self, OutputClass::Anchor(_))
    }

    pub fn is_htlc(&self) -> bool {
        matches!(self, OutputClass::Htlc)
    }

    /// Short label used in reports.
    pub fn label(&self) -> &'static str {
        match self {
            OutputClass::ToLocal(_) => "local",
            OutputClass::ToRemote => "remote",
            OutputClass::Anchor(_) => "anchor",
            OutputClass::Htlc => "htlc",
            OutputClass::Unspent => "unspent",
        }
    }
}

/// Classifies one output of a closing transaction.
///
/// `revealed_witness_script` is the witness script exposed when the output
/// was spent; when it is absent but `spend_witness` is given, the script is
/// taken from the last witness item (the P2WSH convention). Without any
/// witness data a P2WSH output stays `Unspent`: its type cannot be inferred.
pub fn classify_output(
    output: &TxOutput,
    revealed_witness_script: Option<&[u8]>,
    spend_witness: Option<&[Vec<u8>]>,
) -> Result<OutputClass, ScriptError> {
    if is_p2wpkh(&output.script_pubkey) {
        // direct-spend form, identifiable from the script_pubkey alone
        return Ok(OutputClass::ToRemote);
    }
    let program = match p2wsh_program(&output.script_pubkey) {
        Some(program) => program,
        None => return Ok(OutputClass::Unspent),
    };
    let from_witness = spend_witness.and_then(|w| w.last()).map(|s| s.as_slice());
    let script = match revealed_witness_script.or(from_witness) {
        Some(script) => script,
        None => return Ok(OutputClass::Unspent),
    };
    if sha256(script) != program {
        return Err(ScriptError::HashMismatch);
    }
    if let Some(local) = match_local(script) {
        return Ok(OutputClass::ToLocal(local));
    }
    if let Some(anchor) = match_anchor(script) {
        return Ok(OutputClass::Anchor(anchor));
    }
    if match_remote_delayed(script) {
        return Ok(OutputClass::ToRemote);
    }
    // every revealed script that matches no known blueprint is an HTLC
    Ok(OutputClass::Htlc)
}

/// Which branch of a to_local script a spend took.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LocalSpendPath {
    /// The OP_IF branch: the counterparty claimed the output with the
    /// revocation key (prior state cheating was punished).
    RevocationPath,
    /// The OP_ELSE branch: the owner swept the output after the delay.
    DelayedPath,
}

/// Consensus truthiness of a witness item: all-zero (with an optional
/// negative-zero sign byte) is false, anything else is true.
fn cast_to_bool(item: &[u8]) -> bool {
    for (i, &b) in item.iter().enumerate() {
        if b != 0 {
            return !(i == item.len() - 1 && b == 0x80);
        }
    }
    false
}

/// Determines the code path taken by a spend of a to_local output.
///
/// The witness must be `[…, <branch selector>, <witness script>]` with the
/// script equal to `script`'s serialization; a truthy selector enters the
/// OP_IF (revocation) branch.
pub fn classify_local_spend(
    spend_witness: &[Vec<u8>],
    script: &LocalOutputScript,
) -> Result<LocalSpendPath, ScriptError> {
    if spend_witness.len() < 3 {
        return Err(ScriptError::MalformedWitness);
    }
    let trailing = &spend_witness[spend_witness.len() - 1];
    if trailing != &build_local_script(script) {
        return Err(ScriptError::MalformedWitness);
    }
    let selector = &spend_witness[spend_witness.len() - 2];
    Ok(if cast_to_bool(selector) {
        LocalSpendPath::RevocationPath
    } else {
        LocalSpendPath::DelayedPath
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::p2wsh_script_pubkey;
    use proptest::prelude::*;

    fn key(prefix: u8, fill: u8) -> [u8; 33] {
        let mut k = [fill; 33];
        k[0] = prefix;
        k
    }

    #[test]
    fn parse_empty_script() {
        assert_eq!(parse_script(&[]).unwrap(), vec![]);
    }

    #[test]
    fn parse_p2wsh_pattern() {
        let mut bytes = vec![0x00, 0x20];
        bytes.extend_from_slice(&[0xaa; 32]);
        let tokens = parse_script(&bytes).unwrap();
        assert_eq!(tokens[0], ScriptToken::Op(OP_0));
        assert_eq!(tokens[1], ScriptToken::Push(vec![0xaa; 32]));
    }

    #[test]
    fn parse_truncated_push() {
        let mut bytes = vec![0x21];
        bytes.extend_from_slice(&[0u8; 10]);
        assert!(matches!(
            parse_script(&bytes),
            Err(ScriptError::TruncatedPush {
                declared: 33,
                available: 10,
                ..
            })
        ));
    }

    #[test]
    fn parse_pushdata_forms() {
        let mut bytes = vec![OP_PUSHDATA1, 0x4c];
        bytes.extend_from_slice(&[7u8; 0x4c]);
        let tokens = parse_script(&bytes).unwrap();
        assert_eq!(tokens, vec![ScriptToken::Push(vec![7u8; 0x4c])]);
        assert!(parse_script(&[OP_PUSHDATA2, 0x01]).is_err());
    }

    // BOLT3 appendix test vector for the funding script.
    #[test]
    fn funding_script_matches_bolt3_vector() {
        let k1: [u8; 33] =
            hex::decode("023da092f6980e58d2c037173180e9a465476026ee50f96695963e8efe436f54eb")
                .unwrap()
                .try_into()
                .unwrap();
        let k2: [u8; 33] =
            hex::decode("030e9f7b623d2ccc7c9bd44d66d5ce21ce504c0acf6385a132cec6d3c39fa711c1")
                .unwrap()
                .try_into()
                .unwrap();
        let script = build_funding_script(&k1, &k2);
        assert_eq!(
            hex::encode(&script),
            "5221023da092f6980e58d2c037173180e9a465476026ee50f96695963e8efe436f54eb21030e9f7b623d2ccc7c9bd44d66d5ce21ce504c0acf6385a132cec6d3c39fa711c152ae"
        );
        let parsed = match_funding(&script).unwrap();
        assert_eq!(parsed.pubkey1, k1);
        assert_eq!(parsed.pubkey2, k2);
    }

    #[test]
    fn funding_rejects_wrong_threshold_and_arity() {
        let k1 = key(0x02, 0x11);
        let k2 = key(0x03, 0x22);
        let k3 = key(0x02, 0x33);

        // 1-of-2
        let one_of_two = serialize_script(&[
            ScriptToken::Op(OP_1),
            ScriptToken::Push(k1.to_vec()),
            ScriptToken::Push(k2.to_vec()),
            ScriptToken::Op(OP_2),
            ScriptToken::Op(OP_CHECKMULTISIG),
        ]);
        assert!(match_funding(&one_of_two).is_none());

        // 2-of-3
        let two_of_three = serialize_script(&[
            ScriptToken::Op(OP_2),
            ScriptToken::Push(k1.to_vec()),
            ScriptToken::Push(k2.to_vec()),
            ScriptToken::Push(k3.to_vec()),
            ScriptToken::Op(0x53),
            ScriptToken::Op(OP_CHECKMULTISIG),
        ]);
        assert!(match_funding(&two_of_three).is_none());
    }

    #[test]
    fn funding_rejects_uncompressed_key_prefix() {
        let script = build_funding_script(&key(0x04, 0x11), &key(0x03, 0x22));
        assert!(match_funding(&script).is_none());
    }

    // BOLT3 appendix test vector for the to_local script with delay 144.
    #[test]
    fn local_script_matches_bolt3_vector() {
        let rev: [u8; 33] =
            hex::decode("0212a140cd0c6539d07cd08dfe09984dec3251ea808b892efeac3ede9402bf2b19")
                .unwrap()
                .try_into()
                .unwrap();
        let delayed: [u8; 33] =
            hex::decode("03fd5960528dc152014952efdb702a88f71e3c1653b2314431701ec77e57fde83c")
                .unwrap()
                .try_into()
                .unwrap();
        let script = build_local_script(&LocalOutputScript {
            revocation_pubkey: rev,
            local_delayed_pubkey: delayed,
            to_self_delay: 144,
        });
        assert_eq!(
            hex::encode(&script),
            "63210212a140cd0c6539d07cd08dfe09984dec3251ea808b892efeac3ede9402bf2b1967029000b2752103fd5960528dc152014952efdb702a88f71e3c1653b2314431701ec77e57fde83c68ac"
        );
        let parsed = match_local(&script).unwrap();
        assert_eq!(parsed.to_self_delay, 144);
        assert_eq!(parsed.revocation_pubkey, rev);
        assert_eq!(parsed.local_delayed_pubkey, delayed);
    }

    #[test]
    fn local_rejects_missing_checksig() {
        let script = build_local_script(&LocalOutputScript {
            revocation_pubkey: key(0x02, 1),
            local_delayed_pubkey: key(0x03, 2),
            to_self_delay: 144,
        });
        let truncated = &script[..script.len() - 1];
        assert!(match_local(truncated).is_none());
    }

    #[test]
    fn local_rejects_non_minimal_delay() {
        // same shape, delay padded with an extra zero byte
        let mut padded = encode_script_num(144);
        padded.push(0x00);
        assert!(decode_script_num_minimal(&padded).is_none());
        let script = serialize_script(&[
            ScriptToken::Op(OP_IF),
            ScriptToken::Push(key(0x02, 1).to_vec()),
            ScriptToken::Op(OP_ELSE),
            ScriptToken::Push(padded),
            ScriptToken::Op(OP_CHECKSEQUENCEVERIFY),
            ScriptToken::Op(OP_DROP),
            ScriptToken::Push(key(0x03, 2).to_vec()),
            ScriptToken::Op(OP_ENDIF),
            ScriptToken::Op(OP_CHECKSIG),
        ]);
        assert!(match_local(&script).is_none());
    }

    #[test]
    fn script_num_boundary_encodings() {
        for (n, expect) in [
            (1i64, vec![0x01u8]),
            (16, vec![0x10]),
            (127, vec![0x7f]),
            (128, vec![0x80, 0x00]),
            (144, vec![0x90, 0x00]),
            (255, vec![0xff, 0x00]),
            (256, vec![0x00, 0x01]),
            (32_767, vec![0xff, 0x7f]),
            (32_768, vec![0x00, 0x80, 0x00]),
            (65_535, vec![0xff, 0xff, 0x00]),
        ] {
            assert_eq!(encode_script_num(n), expect, "encode {n}");
            assert_eq!(decode_script_num_minimal(&expect), Some(n), "decode {n}");
        }
        assert_eq!(decode_script_num_minimal(&[]), Some(0));
        assert_eq!(decode_script_num_minimal(&[0x90]), Some(-16));
        assert_eq!(decode_script_num_minimal(&[0x00]), None);
        assert_eq!(decode_script_num_minimal(&[0x05, 0x00]), None);
    }

    #[test]
    fn anchor_script_round_trip_and_rejections() {
        let k = key(0x02, 0x44);
        let script = build_anchor_script(&k);
        assert_eq!(match_anchor(&script).unwrap().funding_pubkey, k);

        // a funding script is not an anchor
        let funding = build_funding_script(&key(0x02, 1), &key(0x03, 2));
        assert!(match_anchor(&funding).is_none());

        // OP_15 in place of OP_16
        let wrong = serialize_script(&[
            ScriptToken::Push(k.to_vec()),
            ScriptToken::Op(OP_CHECKSIG),
            ScriptToken::Op(OP_IFDUP),
            ScriptToken::Op(OP_NOTIF),
            ScriptToken::Op(OP_15),
            ScriptToken::Op(OP_CHECKSEQUENCEVERIFY),
            ScriptToken::Op(OP_ENDIF),
        ]);
        assert!(match_anchor(&wrong).is_none());
    }

    fn p2wsh_output(witness_script: &[u8], value: u64) -> TxOutput {
        TxOutput {
            value,
            script_pubkey: p2wsh_script_pubkey(witness_script),
        }
    }

    #[test]
    fn classify_unspent_p2wsh() {
        let out = p2wsh_output(&[0x51], 1000);
        assert_eq!(
            classify_output(&out, None, None).unwrap(),
            OutputClass::Unspent
        );
    }

    #[test]
    fn classify_local_output() {
        let local = LocalOutputScript {
            revocation_pubkey: key(0x02, 5),
            local_delayed_pubkey: key(0x03, 6),
            to_self_delay: 144,
        };
        let script = build_local_script(&local);
        let out = p2wsh_output(&script, 5000);
        assert_eq!(
            classify_output(&out, Some(&script), None).unwrap(),
            OutputClass::ToLocal(local)
        );
    }

    #[test]
    fn classify_unmatched_script_as_htlc() {
        // a hashlock shape that matches none of the blueprints
        let script = serialize_script(&[
            ScriptToken::Op(OP_HASH160),
            ScriptToken::Push(vec![0xab; 20]),
            ScriptToken::Op(OP_EQUALVERIFY),
            ScriptToken::Push(key(0x02, 7).to_vec()),
            ScriptToken::Op(OP_CHECKSIG),
        ]);
        let out = p2wsh_output(&script, 3000);
        assert_eq!(
            classify_output(&out, Some(&script), None).unwrap(),
            OutputClass::Htlc
        );
    }

    #[test]
    fn classify_rejects_hash_mismatch() {
        let out = p2wsh_output(&[0x51], 1000);
        assert_eq!(
            classify_output(&out, Some(&[0x52]), None),
            Err(ScriptError::HashMismatch)
        );
    }

    #[test]
    fn classify_p2wpkh_as_remote() {
        let out = TxOutput {
            value: 7000,
            script_pubkey: p2wpkh_script_pubkey(&[0xcd; 20]),
        };
        assert_eq!(
            classify_output(&out, None, None).unwrap(),
            OutputClass::ToRemote
        );
    }

    #[test]
    fn classify_remote_delayed_form() {
        let script = build_remote_delayed_script(&key(0x02, 9));
        let out = p2wsh_output(&script, 800);
        assert_eq!(
            classify_output(&out, Some(&script), None).unwrap(),
            OutputClass::ToRemote
        );
    }

    #[test]
    fn classify_takes_script_from_witness() {
        let local = LocalOutputScript {
            revocation_pubkey: key(0x02, 5),
            local_delayed_pubkey: key(0x03, 6),
            to_self_delay: 700,
        };
        let script = build_local_script(&local);
        let out = p2wsh_output(&script, 5000);
        let witness = vec![vec![0x30, 0x45], vec![], script];
        assert_eq!(
            classify_output(&out, None, Some(&witness)).unwrap(),
            OutputClass::ToLocal(local)
        );
    }

    #[test]
    fn local_spend_paths() {
        let local = LocalOutputScript {
            revocation_pubkey: key(0x02, 1),
            local_delayed_pubkey: key(0x03, 2),
            to_self_delay: 144,
        };
        let script = build_local_script(&local);

        let revoked = vec![vec![0x30; 71], vec![0x01], script.clone()];
        assert_eq!(
            classify_local_spend(&revoked, &local).unwrap(),
            LocalSpendPath::RevocationPath
        );

        let delayed = vec![vec![0x30; 71], vec![], script.clone()];
        assert_eq!(
            classify_local_spend(&delayed, &local).unwrap(),
            LocalSpendPath::DelayedPath
        );

        let malformed = vec![script];
        assert_eq!(
            classify_local_spend(&malformed, &local),
            Err(ScriptError::MalformedWitness)
        );
    }

    #[test]
    fn local_spend_rejects_foreign_script() {
        let local = LocalOutputScript {
            revocation_pubkey: key(0x02, 1),
            local_delayed_pubkey: key(0x03, 2),
            to_self_delay: 144,
        };
        let witness = vec![vec![0x30; 71], vec![0x01], vec![0x51, 0x52]];
        assert_eq!(
            classify_local_spend(&witness, &local),
            Err(ScriptError::MalformedWitness)
        );
    }

    #[test]
    fn negative_zero_selector_is_false() {
        assert!(!cast_to_bool(&[]));
        assert!(!cast_to_bool(&[0x00]));
        assert!(!cast_to_bool(&[0x00, 0x80]));
        assert!(cast_to_bool(&[0x01]));
        assert!(cast_to_bool(&[0x80, 0x00]));
    }

    proptest! {
        // No byte sequence matches more than one blueprint.
        #[test]
        fn matchers_mutually_exclusive(bytes in proptest::collection::vec(any::<u8>(), 0..200)) {
            let hits = [
                match_funding(&bytes).is_some(),
                match_local(&bytes).is_some(),
                match_anchor(&bytes).is_some(),
            ];
            prop_assert!(hits.iter().filter(|h| **h).count() <= 1);
        }

        #[test]
        fn parse_serialize_identity_on_templates(
            fill1 in any::<u8>(),
            fill2 in any::<u8>(),
            delay in 1u16..=65535,
        ) {
            let k1 = key(0x02, fill1);
            let k2 = key(0x03, fill2);
            for script in [
                build_funding_script(&k1, &k2),
                build_local_script(&LocalOutputScript {
                    revocation_pubkey: k1,
                    local_delayed_pubkey: k2,
                    to_self_delay: delay,
                }),
                build_anchor_script(&k1),
                build_remote_delayed_script(&k2),
            ] {
                let tokens = parse_script(&script).unwrap();
                prop_assert_eq!(serialize_script(&tokens), script);
            }
        }

        #[test]
        fn script_num_round_trip(n in 1i64..=65_535) {
            let enc = encode_script_num(n);
            prop_assert_eq!(decode_script_num_minimal(&enc), Some(n));
        }
    }
}
