//! NMM identifiers: `NMM-` followed by four base-36 digits.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest encodable identifier value (`ZZZZ` in base 36).
pub const NMM_ID_MAX: u32 = 36 * 36 * 36 * 36 - 1;

const DIGITS: &[u8; 36] = b"0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NmmIdError {
    #[error("NMM ID value {0} is out of range 1..={NMM_ID_MAX}")]
    OutOfRange(u64),
    #[error("malformed NMM ID {0:?}: expected NMM- followed by 4 base-36 digits")]
    Malformed(String),
}

/// A canonical NMM identifier, uppercase with the `NMM-` prefix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NmmId(String);

impl NmmId {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn value(&self) -> u32 {
        nmm_id_decode(&self.0).expect("NmmId holds a canonical code")
    }
}

impl fmt::Display for NmmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Encodes an integer in `1..=NMM_ID_MAX` as a zero-padded canonical NMM ID.
pub fn nmm_id_encode(n: u32) -> Result<NmmId, NmmIdError> {
    if n == 0 || n > NMM_ID_MAX {
        return Err(NmmIdError::OutOfRange(n as u64));
    }
    let mut digits = [b'0'; 4];
    let mut rest = n;
    for slot in digits.iter_mut().rev() {
        *slot = DIGITS[(rest % 36) as usize];
        rest /= 36;
    }
    let mut code = String::with_capacity(8);
    code.push_str("NMM-");
    code.push_str(std::str::from_utf8(&digits).expect("base-36 digits are ASCII"));
    Ok(NmmId(code))
}

/// Decodes a (case-insensitive) NMM ID back to its integer value.
pub fn nmm_id_decode(code: &str) -> Result<u32, NmmIdError> {
    let trimmed = code.trim();
    let malformed = || NmmIdError::Malformed(code.to_string());
    if trimmed.len() != 8 || !trimmed[..4].eq_ignore_ascii_case("NMM-") {
        return Err(malformed());
    }
    let mut value: u32 = 0;
    for c in trimmed[4..].chars() {
        let digit = match c {
            '0'..='9' => c as u32 - '0' as u32,
            'A'..='Z' => c as u32 - 'A' as u32 + 10,
            'a'..='z' => c as u32 - 'a' as u32 + 10,
            _ => return Err(malformed()),
        };
        value = value * 36 + digit;
    }
    if value == 0 {
        return Err(NmmIdError::OutOfRange(0));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn encodes_one_as_first_code() {
        assert_eq!(nmm_id_encode(1).unwrap().as_str(), "NMM-0001");
    }

    #[test]
    fn decodes_zzzz_as_max() {
        assert_eq!(nmm_id_decode("NMM-ZZZZ").unwrap(), 1_679_615);
        assert_eq!(NMM_ID_MAX, 1_679_615);
    }

    #[test]
    fn decode_is_case_insensitive() {
        // 000B in base 36 is 11.
        assert_eq!(nmm_id_decode("nmm-000b").unwrap(), 11);
        assert_eq!(nmm_id_decode("NMM-000B").unwrap(), 11);
    }

    #[test]
    fn rejects_zero_and_overflow() {
        assert_eq!(nmm_id_encode(0), Err(NmmIdError::OutOfRange(0)));
        assert!(nmm_id_encode(NMM_ID_MAX + 1).is_err());
        assert_eq!(nmm_id_decode("NMM-0000"), Err(NmmIdError::OutOfRange(0)));
    }

    #[test]
    fn rejects_malformed_codes() {
        for bad in ["NMM-12", "NMM-12345", "XYZ-0001", "NMM-00!1", "NMM 0001"] {
            assert!(matches!(nmm_id_decode(bad), Err(NmmIdError::Malformed(_))), "{bad}");
        }
    }

    proptest! {
        #[test]
        fn round_trips_every_value(n in 1u32..=NMM_ID_MAX) {
            let code = nmm_id_encode(n).unwrap();
            prop_assert_eq!(nmm_id_decode(code.as_str()).unwrap(), n);
        }

        #[test]
        fn encode_decode_is_uppercase_identity(n in 1u32..=NMM_ID_MAX) {
            let code = nmm_id_encode(n).unwrap();
            let lower = code.as_str().to_lowercase();
            let back = nmm_id_encode(nmm_id_decode(&lower).unwrap()).unwrap();
            prop_assert_eq!(back.as_str(), lower.to_uppercase());
        }
    }
}
