//! Raw per-texel update magnitudes: `TRUM`, width and height as little-endian
//! u32, then width·height little-endian f64 values in row-major order.

use std::path::Path;

use texrestore::image::Grid;

const MAGIC: &[u8; 4] = b"TRUM";

pub fn encode(g: &Grid<f64>) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + 8 * g.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(g.width() as u32).to_le_bytes());
    out.extend_from_slice(&(g.height() as u32).to_le_bytes());
    for v in g.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode(bytes: &[u8]) -> Result<Grid<f64>, String> {
    if bytes.len() < 12 || &bytes[..4] != MAGIC {
        return Err("not an update-magnitude file".into());
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap()) as usize;
    let (w, h) = (word(4), word(8));
    let body = &bytes[12..];
    if body.len() != w * h * 8 {
        return Err(format!("expected {} values for {w}x{h}, found {} bytes", w * h, body.len()));
    }
    let data = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    Grid::from_vec(w, h, data).map_err(|e| e.to_string())
}

pub fn save(g: &Grid<f64>, path: &Path) -> Result<(), String> {
    std::fs::write(path, encode(g)).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

pub fn load(path: &Path) -> Result<Grid<f64>, String> {
    let bytes = std::fs::read(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    decode(&bytes).map_err(|e| format!("{}: {e}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let g = Grid::from_fn(5, 3, |x, y| (x as f64 + 0.1) / (y as f64 + 3.0) * 1e-9);
        assert_eq!(decode(&encode(&g)).unwrap(), g);
    }

    #[test]
    fn truncated_input_is_rejected() {
        let bytes = encode(&Grid::filled(2, 2, 1.0));
        assert!(decode(&bytes[..bytes.len() - 1]).is_err());
        assert!(decode(b"PNG\0aaaaaaaa").is_err());
    }
}
