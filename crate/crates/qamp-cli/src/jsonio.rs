//! JSON input/output: full-precision float emission, input hashing, and
//! schema loading.
//!
//! Every float the CLI emits is formatted as `{:.16e}` — 17 significant
//! digits, enough to round-trip any finite `f64` bit-exactly.  Combined with
//! serde's fixed struct field order this makes repeated runs byte-identical,
//! which the determinism contract of the ledger relies on.

use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use qamp_core::amplify::AmplifiedSchema;
use qamp_core::ham::HamiltonianSchema;
use qamp_core::{AmplifiedOperator, LayeredHamiltonian};

use crate::Failure;

// ─── Emission ───────────────────────────────────────────────────────────────

/// serde_json formatter that prints every `f64` with 17 significant digits.
struct FullPrecision;

impl serde_json::ser::Formatter for FullPrecision {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Serialise compactly with full-precision floats and deterministic field
/// order.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FullPrecision);
    value
        .serialize(&mut ser)
        .expect("in-memory JSON serialisation cannot fail");
    String::from_utf8(out).expect("serialiser emits UTF-8")
}

/// Write `payload` plus a trailing newline to `out`, or to stdout when no
/// path is given.
pub fn emit_payload(payload: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, format!("{payload}\n"))
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{payload}");
            Ok(())
        }
    }
}

// ─── Input loading ──────────────────────────────────────────────────────────

/// Hex-encoded SHA-256 of raw bytes.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Read a file, returning its text and the SHA-256 of its raw bytes.
pub fn read_input(path: &Path) -> Result<(String, String), Failure> {
    let bytes = std::fs::read(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    let digest = sha256_hex(&bytes);
    let text = String::from_utf8(bytes)
        .map_err(|_| Failure::Input(format!("{} is not valid UTF-8", path.display())))?;
    Ok((text, digest))
}

/// Parse and validate a layered Hamiltonian from its JSON schema.
pub fn parse_hamiltonian(text: &str) -> Result<LayeredHamiltonian, Failure> {
    let schema: HamiltonianSchema = serde_json::from_str(text)
        .map_err(|e| Failure::Input(format!("Hamiltonian JSON does not match the schema: {e}")))?;
    LayeredHamiltonian::from_schema(&schema).map_err(|e| Failure::Input(e.to_string()))
}

/// Either of the two operator inputs `spectrum` accepts.
pub enum OperatorInput {
    Amplified(AmplifiedOperator),
    Plain(LayeredHamiltonian),
}

/// Sniff the input document: an amplified-operator schema carries a `base`
/// key, a plain Hamiltonian does not.
pub fn parse_operator(text: &str) -> Result<OperatorInput, Failure> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| Failure::Input(format!("input is not valid JSON: {e}")))?;
    if value.get("base").is_some() {
        let schema: AmplifiedSchema = serde_json::from_value(value).map_err(|e| {
            Failure::Input(format!("amplified-operator JSON does not match the schema: {e}"))
        })?;
        let amp =
            AmplifiedOperator::from_schema(&schema).map_err(|e| Failure::Input(e.to_string()))?;
        Ok(OperatorInput::Amplified(amp))
    } else {
        parse_hamiltonian(text).map(OperatorInput::Plain)
    }
}
