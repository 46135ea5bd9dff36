//! Trainable parameters in one flat vector with a structured offset layout,
//! plus checkpoint serialization.
//!
//! Keeping every trainable tensor in a single `Vec<f64>` makes the ADAM
//! update, finite-difference checking, and checkpointing uniform: the
//! layout assigns offsets in a fixed declared order.

use super::config::CycGATConfig;
use crate::error::{CoreError, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;

const CHECKPOINT_MAGIC: &[u8; 4] = b"CYCP";
const CHECKPOINT_VERSION: u32 = 1;

/// Offsets of one attention head's tensors inside the flat vector.
#[derive(Clone, Debug, PartialEq)]
pub struct HeadOffsets {
    pub d_in: usize,
    pub d_out: usize,
    pub k: usize,
    pub w: usize,  // d_out x d_in, value transform
    pub w1: usize, // d_out x d_in, attention source transform
    pub w2: usize, // d_out x d_in, attention target transform
    pub w3: usize, // d_out x k, attention positional transform
    pub h: usize,  // 3 * d_out attention vector
}

#[derive(Clone, Debug, PartialEq)]
pub struct LayerOffsets {
    pub heads: Vec<HeadOffsets>,
    pub bn_gamma: usize, // channels
    pub bn_beta: usize,  // channels
    pub channels: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearOffsets {
    pub rows: usize,
    pub cols: usize,
    pub weight: usize,
    pub bias: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParamLayout {
    pub layers: Vec<LayerOffsets>,
    pub readout: HeadOffsets,
    pub mlp: Vec<LinearOffsets>,
    pub total: usize,
    /// (name, offset, length) per tensor, in declared order.
    pub tensors: Vec<(String, usize, usize)>,
}

impl ParamLayout {
    pub fn build(cfg: &CycGATConfig) -> Self {
        let mut offset = 0usize;
        let mut tensors = Vec::new();
        let mut alloc = |name: String, len: usize, offset: &mut usize| -> usize {
            let at = *offset;
            tensors.push((name, at, len));
            *offset += len;
            at
        };

        let mut layers = Vec::with_capacity(cfg.n_layers);
        for l in 0..cfg.n_layers {
            let d_in = cfg.layer_input_dim(l);
            let d_out = cfg.n_filters;
            let mut heads = Vec::with_capacity(cfg.n_heads);
            for h in 0..cfg.n_heads {
                let tag = format!("layer{l}.head{h}");
                heads.push(HeadOffsets {
                    d_in,
                    d_out,
                    k: cfg.epec_k,
                    w: alloc(format!("{tag}.w"), d_out * d_in, &mut offset),
                    w1: alloc(format!("{tag}.w1"), d_out * d_in, &mut offset),
                    w2: alloc(format!("{tag}.w2"), d_out * d_in, &mut offset),
                    w3: alloc(format!("{tag}.w3"), d_out * cfg.epec_k, &mut offset),
                    h: alloc(format!("{tag}.h"), 3 * d_out, &mut offset),
                });
            }
            let channels = cfg.hidden_channels();
            layers.push(LayerOffsets {
                heads,
                bn_gamma: alloc(format!("layer{l}.bn_gamma"), channels, &mut offset),
                bn_beta: alloc(format!("layer{l}.bn_beta"), channels, &mut offset),
                channels,
            });
        }

        let d_in = cfg.hidden_channels();
        let readout = HeadOffsets {
            d_in,
            d_out: 1,
            k: cfg.epec_k,
            w: alloc("readout.w".into(), d_in, &mut offset),
            w1: alloc("readout.w1".into(), d_in, &mut offset),
            w2: alloc("readout.w2".into(), d_in, &mut offset),
            w3: alloc("readout.w3".into(), cfg.epec_k, &mut offset),
            h: alloc("readout.h".into(), 3, &mut offset),
        };

        let mut mlp = Vec::new();
        let mut prev = cfg.upper_triangle_len();
        for (i, &hdim) in cfg.mlp_hidden.iter().enumerate() {
            mlp.push(LinearOffsets {
                rows: hdim,
                cols: prev,
                weight: alloc(format!("mlp{i}.weight"), hdim * prev, &mut offset),
                bias: alloc(format!("mlp{i}.bias"), hdim, &mut offset),
            });
            prev = hdim;
        }
        let last = cfg.mlp_hidden.len();
        mlp.push(LinearOffsets {
            rows: 1,
            cols: prev,
            weight: alloc(format!("mlp{last}.weight"), prev, &mut offset),
            bias: alloc(format!("mlp{last}.bias"), 1, &mut offset),
        });

        Self { layers, readout, mlp, total: offset, tensors }
    }
}

/// Model state: flat trainable vector plus batch-norm running statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct CycGATParams {
    pub config: CycGATConfig,
    pub layout: ParamLayout,
    pub data: Vec<f64>,
    pub bn_running_mean: Vec<Vec<f64>>,
    pub bn_running_var: Vec<Vec<f64>>,
    pub step: u64,
}

impl CycGATParams {
    /// Glorot-uniform initialization, deterministic in the seed. The
    /// attention vector h treats its 3*d_out input as fan-in.
    pub fn init(config: &CycGATConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let layout = ParamLayout::build(config);
        let mut data = vec![0.0f64; layout.total];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);

        let mut glorot = |slice: &mut [f64], fan_in: usize, fan_out: usize, rng: &mut ChaCha8Rng| {
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            for v in slice.iter_mut() {
                *v = rng.random_range(-bound..bound);
            }
        };

        for layer in &layout.layers {
            for head in &layer.heads {
                let (di, dv, k) = (head.d_in, head.d_out, head.k);
                glorot(&mut data[head.w..head.w + dv * di], di, dv, &mut rng);
                glorot(&mut data[head.w1..head.w1 + dv * di], di, dv, &mut rng);
                glorot(&mut data[head.w2..head.w2 + dv * di], di, dv, &mut rng);
                glorot(&mut data[head.w3..head.w3 + dv * k], k, dv, &mut rng);
                glorot(&mut data[head.h..head.h + 3 * dv], 3 * dv, 1, &mut rng);
            }
            for g in &mut data[layer.bn_gamma..layer.bn_gamma + layer.channels] {
                *g = 1.0;
            }
            // beta stays zero
        }
        {
            let r = &layout.readout;
            glorot(&mut data[r.w..r.w + r.d_in], r.d_in, 1, &mut rng);
            glorot(&mut data[r.w1..r.w1 + r.d_in], r.d_in, 1, &mut rng);
            glorot(&mut data[r.w2..r.w2 + r.d_in], r.d_in, 1, &mut rng);
            glorot(&mut data[r.w3..r.w3 + r.k], r.k, 1, &mut rng);
            glorot(&mut data[r.h..r.h + 3], 3, 1, &mut rng);
        }
        for lin in &layout.mlp {
            glorot(&mut data[lin.weight..lin.weight + lin.rows * lin.cols], lin.cols, lin.rows, &mut rng);
            // biases stay zero
        }

        let bn_running_mean = layout.layers.iter().map(|l| vec![0.0; l.channels]).collect();
        let bn_running_var = layout.layers.iter().map(|l| vec![1.0; l.channels]).collect();
        Ok(Self {
            config: config.clone(),
            layout,
            data,
            bn_running_mean,
            bn_running_var,
            step: 0,
        })
    }

    pub fn n_params(&self) -> usize {
        self.layout.total
    }
}

#[derive(Serialize, Deserialize)]
struct CheckpointHeader {
    config: CycGATConfig,
    step: u64,
    n_params: usize,
    bn_channels: Vec<usize>,
}

/// Checkpoint file: magic, version, u64 JSON header length, JSON header,
/// then the trainable vector and batch-norm running mean/var per layer as
/// packed little-endian f64. Round-trips bit-exactly.
pub fn save_checkpoint(params: &CycGATParams, path: &Path) -> Result<()> {
    let header = CheckpointHeader {
        config: params.config.clone(),
        step: params.step,
        n_params: params.data.len(),
        bn_channels: params.bn_running_mean.iter().map(|m| m.len()).collect(),
    };
    let header_bytes = serde_json::to_vec(&header).unwrap();
    let mut f = std::fs::File::create(path)?;
    f.write_all(CHECKPOINT_MAGIC)?;
    f.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
    f.write_all(&(header_bytes.len() as u64).to_le_bytes())?;
    f.write_all(&header_bytes)?;
    let mut buf = Vec::with_capacity(params.data.len() * 8);
    for &v in &params.data {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    for (mean, var) in params.bn_running_mean.iter().zip(&params.bn_running_var) {
        for &v in mean {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        for &v in var {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    f.write_all(&buf)?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<CycGATParams> {
    let mut f = std::fs::File::open(path)?;
    let mut fixed = [0u8; 16];
    f.read_exact(&mut fixed)
        .map_err(|_| CoreError::Format("checkpoint shorter than fixed header".into()))?;
    if &fixed[0..4] != CHECKPOINT_MAGIC {
        return Err(CoreError::Format("bad checkpoint magic".into()));
    }
    let version = u32::from_le_bytes(fixed[4..8].try_into().unwrap());
    if version != CHECKPOINT_VERSION {
        return Err(CoreError::Format(format!("unsupported checkpoint version {version}")));
    }
    let json_len = u64::from_le_bytes(fixed[8..16].try_into().unwrap()) as usize;
    let mut header_bytes = vec![0u8; json_len];
    f.read_exact(&mut header_bytes)
        .map_err(|_| CoreError::Format("truncated checkpoint header".into()))?;
    let header: CheckpointHeader = serde_json::from_slice(&header_bytes)
        .map_err(|e| CoreError::Format(format!("checkpoint header: {e}")))?;

    let layout = ParamLayout::build(&header.config);
    if layout.total != header.n_params {
        return Err(CoreError::Format(format!(
            "config expects {} parameters, header says {}",
            layout.total, header.n_params
        )));
    }
    let expected_bn: Vec<usize> = layout.layers.iter().map(|l| l.channels).collect();
    if expected_bn != header.bn_channels {
        return Err(CoreError::Format("batch-norm channel mismatch".into()));
    }

    let mut buf = Vec::new();
    f.read_to_end(&mut buf)?;
    let n_floats = header.n_params + 2 * expected_bn.iter().sum::<usize>();
    if buf.len() != n_floats * 8 {
        return Err(CoreError::Format(format!(
            "expected {} payload bytes, found {}",
            n_floats * 8,
            buf.len()
        )));
    }
    let read_f64 = |i: usize| f64::from_le_bytes(buf[i * 8..(i + 1) * 8].try_into().unwrap());
    let mut cursor = 0usize;
    let mut data = Vec::with_capacity(header.n_params);
    for _ in 0..header.n_params {
        data.push(read_f64(cursor));
        cursor += 1;
    }
    let mut bn_running_mean = Vec::new();
    let mut bn_running_var = Vec::new();
    for &ch in &expected_bn {
        let mut mean = Vec::with_capacity(ch);
        for _ in 0..ch {
            mean.push(read_f64(cursor));
            cursor += 1;
        }
        let mut var = Vec::with_capacity(ch);
        for _ in 0..ch {
            var.push(read_f64(cursor));
            cursor += 1;
        }
        bn_running_mean.push(mean);
        bn_running_var.push(var);
    }

    Ok(CycGATParams {
        config: header.config,
        layout,
        data,
        bn_running_mean,
        bn_running_var,
        step: header.step,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> CycGATConfig {
        CycGATConfig {
            n_layers: 2,
            n_filters: 3,
            n_heads: 2,
            epec_k: 2,
            leaky_slope: 0.2,
            mlp_hidden: vec![5],
            input_dim: 1,
            n_nodes: 5,
            use_epec: true,
        }
    }

    #[test]
    fn layout_offsets_are_contiguous() {
        let layout = ParamLayout::build(&small_config());
        let mut expect = 0usize;
        for (_, off, len) in &layout.tensors {
            assert_eq!(*off, expect);
            expect += len;
        }
        assert_eq!(expect, layout.total);
    }

    #[test]
    fn init_is_deterministic_and_bn_identity() {
        let cfg = small_config();
        let a = CycGATParams::init(&cfg, 42).unwrap();
        let b = CycGATParams::init(&cfg, 42).unwrap();
        assert_eq!(a.data, b.data);
        let c = CycGATParams::init(&cfg, 43).unwrap();
        assert_ne!(a.data, c.data);
        let l0 = &a.layout.layers[0];
        assert!(a.data[l0.bn_gamma..l0.bn_gamma + l0.channels].iter().all(|&g| g == 1.0));
        assert!(a.data[l0.bn_beta..l0.bn_beta + l0.channels].iter().all(|&b| b == 0.0));
    }

    #[test]
    fn checkpoint_roundtrip_bit_exact() {
        let cfg = small_config();
        let mut params = CycGATParams::init(&cfg, 7).unwrap();
        params.step = 123;
        params.bn_running_mean[0][1] = 0.25;
        params.bn_running_var[1][2] = 3.5;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ckpt.bin");
        save_checkpoint(&params, &path).unwrap();
        let loaded = load_checkpoint(&path).unwrap();
        assert_eq!(loaded.step, 123);
        assert_eq!(loaded.config, params.config);
        for (a, b) in params.data.iter().zip(&loaded.data) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(loaded.bn_running_mean, params.bn_running_mean);
        assert_eq!(loaded.bn_running_var, params.bn_running_var);
        // save again: byte-identical files
        let path2 = dir.path().join("ckpt2.bin");
        save_checkpoint(&loaded, &path2).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&path2).unwrap());
    }

    #[test]
    fn checkpoint_rejects_corruption() {
        let cfg = small_config();
        let params = CycGATParams::init(&cfg, 7).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ckpt.bin");
        save_checkpoint(&params, &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes.truncate(bytes.len() - 8);
        std::fs::write(&path, bytes).unwrap();
        assert!(load_checkpoint(&path).is_err());
    }
}
