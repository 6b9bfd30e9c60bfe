//! dB and dBm conversions. The rest of the crate works in linear scale;
//! these belong at I/O boundaries only.

/// Converts a dB power ratio to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear power ratio to dB. Zero and negatives map to -inf/NaN
/// as usual for a logarithm; callers dealing with file output should guard.
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Converts dBm to milliwatts.
pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}
