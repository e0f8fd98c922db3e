//! Binary checkpoints, all little-endian.
//!
//! MLP (`.lvrm`):
//!
//! ```text
//! b"LVRM"  u32 version  u32 n_dims  n_dims × u64 widths
//! for each layer: in×out f64 weights (row-major, input index major), out f64 biases
//! ```
//!
//! Array bundle (`.lvrv`), used for layer norms and base maps:
//!
//! ```text
//! b"LVRV"  u32 version  u32 n_arrays
//! for each array: u32 name_len, name (UTF-8), u32 rows, u32 cols, rows×cols f64
//! ```

use std::path::Path;

use lvrae_core::lvrae::BaseMap;
use lvrae_core::net::{Linear, Mlp};
use lvrae_core::numerics::LayerNormParams;
use lvrae_core::Mat;

use crate::LabError;

pub const MLP_MAGIC: &[u8; 4] = b"LVRM";
pub const BUNDLE_MAGIC: &[u8; 4] = b"LVRV";
pub const FORMAT_VERSION: u32 = 1;

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], String> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len()).ok_or("truncated file")?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, String> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64, String> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>, String> {
        let bytes = self.take(n.checked_mul(8).ok_or("size overflow")?)?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect())
    }

    fn header(&mut self, magic: &[u8; 4]) -> Result<(), String> {
        if self.take(4)? != magic {
            return Err(format!("bad magic, expected {}", String::from_utf8_lossy(magic)));
        }
        let v = self.u32()?;
        if v != FORMAT_VERSION {
            return Err(format!("unsupported version {v}"));
        }
        Ok(())
    }

    fn finish(&self) -> Result<(), String> {
        if self.pos != self.buf.len() {
            return Err(format!("{} trailing bytes", self.buf.len() - self.pos));
        }
        Ok(())
    }
}

pub fn encode_mlp(net: &Mlp) -> Vec<u8> {
    let dims = net.dims();
    let mut out = Vec::with_capacity(12 + 8 * dims.len() + 8 * net.num_params());
    out.extend_from_slice(MLP_MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(dims.len() as u32).to_le_bytes());
    for d in &dims {
        out.extend_from_slice(&(*d as u64).to_le_bytes());
    }
    for s in net.param_slices() {
        for v in s {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn decode_mlp(buf: &[u8]) -> Result<Mlp, String> {
    let mut r = Reader { buf, pos: 0 };
    r.header(MLP_MAGIC)?;
    let n = r.u32()? as usize;
    if n < 2 {
        return Err("an MLP needs at least two widths".into());
    }
    let dims = (0..n)
        .map(|_| r.u64().map(|d| d as usize))
        .collect::<Result<Vec<_>, _>>()?;
    let mut layers = Vec::with_capacity(n - 1);
    for w in dims.windows(2) {
        let weight = Mat::from_vec(w[0], w[1], r.f64s(w[0] * w[1])?).map_err(|e| e.to_string())?;
        let bias = r.f64s(w[1])?;
        layers.push(Linear { weight, bias });
    }
    r.finish()?;
    Mlp::from_layers(layers).map_err(|e| e.to_string())
}

pub fn encode_bundle(arrays: &[(&str, &Mat)]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(BUNDLE_MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(arrays.len() as u32).to_le_bytes());
    for (name, m) in arrays {
        out.extend_from_slice(&(name.len() as u32).to_le_bytes());
        out.extend_from_slice(name.as_bytes());
        out.extend_from_slice(&(m.rows() as u32).to_le_bytes());
        out.extend_from_slice(&(m.cols() as u32).to_le_bytes());
        for v in m.as_slice() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn decode_bundle(buf: &[u8]) -> Result<Vec<(String, Mat)>, String> {
    let mut r = Reader { buf, pos: 0 };
    r.header(BUNDLE_MAGIC)?;
    let n = r.u32()? as usize;
    let mut out = Vec::with_capacity(n.min(64));
    for _ in 0..n {
        let len = r.u32()? as usize;
        let name = String::from_utf8(r.take(len)?.to_vec()).map_err(|_| "array name is not UTF-8")?;
        let rows = r.u32()? as usize;
        let cols = r.u32()? as usize;
        let data = r.f64s(rows.checked_mul(cols).ok_or("size overflow")?)?;
        out.push((name, Mat::from_vec(rows, cols, data).map_err(|e| e.to_string())?));
    }
    r.finish()?;
    Ok(out)
}

fn get<'a>(arrays: &'a [(String, Mat)], name: &str) -> Result<&'a Mat, String> {
    arrays
        .iter()
        .find(|(n, _)| n == name)
        .map(|(_, m)| m)
        .ok_or_else(|| format!("missing array `{name}`"))
}

fn ln_arrays(prefix: &str, p: &LayerNormParams) -> Vec<(String, Mat)> {
    vec![
        (format!("{prefix}gain"), Mat::row_vector(&p.gain)),
        (format!("{prefix}bias"), Mat::row_vector(&p.bias)),
        (format!("{prefix}eps"), Mat::row_vector(&[p.eps])),
    ]
}

fn ln_from(arrays: &[(String, Mat)], prefix: &str) -> Result<LayerNormParams, String> {
    let gain = get(arrays, &format!("{prefix}gain"))?.as_slice().to_vec();
    let bias = get(arrays, &format!("{prefix}bias"))?.as_slice().to_vec();
    let eps = get(arrays, &format!("{prefix}eps"))?.as_slice();
    if eps.len() != 1 {
        return Err("eps must be a single value".into());
    }
    LayerNormParams::new(gain, bias, eps[0]).map_err(|e| e.to_string())
}

fn encode_named(arrays: &[(String, Mat)]) -> Vec<u8> {
    let refs: Vec<(&str, &Mat)> = arrays.iter().map(|(n, m)| (n.as_str(), m)).collect();
    encode_bundle(&refs)
}

pub fn encode_layer_norm(p: &LayerNormParams) -> Vec<u8> {
    encode_named(&ln_arrays("", p))
}

pub fn decode_layer_norm(buf: &[u8]) -> Result<LayerNormParams, String> {
    ln_from(&decode_bundle(buf)?, "")
}

pub fn encode_base_map(phi: &BaseMap) -> Vec<u8> {
    let mut arrays = vec![
        ("lowpass".to_string(), phi.lowpass().clone()),
        ("mixing".to_string(), phi.mixing().clone()),
    ];
    arrays.extend(ln_arrays("ln_", phi.ln()));
    encode_named(&arrays)
}

pub fn decode_base_map(buf: &[u8]) -> Result<BaseMap, String> {
    let arrays = decode_bundle(buf)?;
    BaseMap::from_parts(
        get(&arrays, "lowpass")?.clone(),
        get(&arrays, "mixing")?.clone(),
        ln_from(&arrays, "ln_")?,
    )
    .map_err(|e| e.to_string())
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), LabError> {
    std::fs::write(path, bytes).map_err(|e| LabError::io(path, e))
}

fn read<T>(path: &Path, decode: impl Fn(&[u8]) -> Result<T, String>) -> Result<T, LabError> {
    let bytes = std::fs::read(path).map_err(|e| LabError::io(path, e))?;
    decode(&bytes).map_err(|message| LabError::Format {
        path: path.display().to_string(),
        message,
    })
}

pub fn save_mlp(net: &Mlp, path: &Path) -> Result<(), LabError> {
    write(path, &encode_mlp(net))
}

pub fn load_mlp(path: &Path) -> Result<Mlp, LabError> {
    read(path, decode_mlp)
}

pub fn save_layer_norm(p: &LayerNormParams, path: &Path) -> Result<(), LabError> {
    write(path, &encode_layer_norm(p))
}

pub fn load_layer_norm(path: &Path) -> Result<LayerNormParams, LabError> {
    read(path, decode_layer_norm)
}

pub fn save_base_map(phi: &BaseMap, path: &Path) -> Result<(), LabError> {
    write(path, &encode_base_map(phi))
}

pub fn load_base_map(path: &Path) -> Result<BaseMap, LabError> {
    read(path, decode_base_map)
}
