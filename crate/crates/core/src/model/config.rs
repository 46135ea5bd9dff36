use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Architecture hyperparameters. `n_filters` is the per-head width of the
/// hidden convolution layers; heads concatenate, so hidden features have
/// `n_heads * n_filters` channels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycGATConfig {
    pub n_layers: usize,
    pub n_filters: usize,
    pub n_heads: usize,
    pub epec_k: usize,
    pub leaky_slope: f64,
    pub mlp_hidden: Vec<usize>,
    pub input_dim: usize,
    /// Node count of the graphs this model is built for; fixes the length
    /// of the upper-triangle vector feeding the fully-connected head.
    pub n_nodes: usize,
    /// When false the positional term of the attention is omitted entirely
    /// and the output is independent of the encodings.
    pub use_epec: bool,
}

impl CycGATConfig {
    pub fn new(n_nodes: usize) -> Self {
        Self {
            n_layers: 8,
            n_filters: 16,
            n_heads: 4,
            epec_k: 8,
            leaky_slope: 0.2,
            mlp_hidden: vec![64],
            input_dim: 1,
            n_nodes,
            use_epec: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("n_layers", self.n_layers),
            ("n_filters", self.n_filters),
            ("n_heads", self.n_heads),
            ("epec_k", self.epec_k),
            ("input_dim", self.input_dim),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(CoreError::InvalidInput(format!("{name} must be positive")));
            }
        }
        if self.n_nodes < 2 {
            return Err(CoreError::InvalidInput("n_nodes must be at least 2".into()));
        }
        if self.leaky_slope <= 0.0 || self.leaky_slope >= 1.0 {
            return Err(CoreError::InvalidInput(
                "leaky_slope must lie strictly between 0 and 1".into(),
            ));
        }
        if self.mlp_hidden.iter().any(|&h| h == 0) {
            return Err(CoreError::InvalidInput("mlp_hidden sizes must be positive".into()));
        }
        Ok(())
    }

    /// Width of hidden-layer features after head concatenation.
    pub fn hidden_channels(&self) -> usize {
        self.n_heads * self.n_filters
    }

    /// Input feature width of convolution layer `layer`.
    pub fn layer_input_dim(&self, layer: usize) -> usize {
        if layer == 0 {
            self.input_dim
        } else {
            self.hidden_channels()
        }
    }

    /// Length of the vectorized upper-triangle edge representation.
    pub fn upper_triangle_len(&self) -> usize {
        self.n_nodes * (self.n_nodes - 1) / 2
    }
}
