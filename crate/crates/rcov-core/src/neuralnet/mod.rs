//! Minimal ConvLSTM + CNN regression engine.
//!
//! The architecture is an encoding-generating stack: one ConvLSTM layer
//! consumes the lag window step by step, a few same-padded convolution
//! layers with leaky-ReLU activations refine its final hidden state, and a
//! final linear convolution emits the single-channel forecast map. All
//! gradients are exact reverse-mode, checked against central differences.

mod adam;
mod cell;
mod checkpoint;
mod conv;
mod loss;
mod net;
mod train;

pub use adam::{adam_step, AdamState};
pub use cell::convlstm_step;
pub use checkpoint::{load_checkpoint, save_checkpoint, spec_digest};
pub use conv::conv2d_same;
pub use loss::{huber_loss, HuberMode, LossSpec};
pub use net::{backward, forward, forward_with_maps};
pub use train::{train, EpochStats, TrainConfig, TrainData, TrainOutcome};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::rng::Rng;

/// Dense channels-first feature tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub channels: usize,
    pub height: usize,
    pub width: usize,
    pub data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(channels: usize, height: usize, width: usize) -> Self {
        Self {
            channels,
            height,
            width,
            data: vec![0.0; channels * height * width],
        }
    }

    pub fn from_mat(m: &Mat) -> Self {
        Self {
            channels: 1,
            height: m.rows(),
            width: m.cols(),
            data: m.data().to_vec(),
        }
    }

    /// Single-channel tensor back to a matrix.
    pub fn into_mat(self) -> Mat {
        assert_eq!(self.channels, 1, "into_mat needs a single channel");
        Mat::from_fn(self.height, self.width, |i, j| self.data[i * self.width + j])
    }

    #[inline]
    pub fn channel(&self, c: usize) -> &[f64] {
        let plane = self.height * self.width;
        &self.data[c * plane..(c + 1) * plane]
    }

    pub fn channel_as_mat(&self, c: usize) -> Mat {
        Mat::from_fn(self.height, self.width, |i, j| {
            self.channel(c)[i * self.width + j]
        })
    }
}

/// Layer kinds of the encoding-generating stack.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LayerKind {
    ConvLstm,
    /// Convolution followed by leaky ReLU.
    ConvLRelu,
    /// Convolution with linear output (the generating layer).
    ConvLinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub kind: LayerKind,
    pub in_channels: usize,
    pub out_channels: usize,
    /// (height, width); both odd so zero padding preserves the spatial size.
    pub kernel: (usize, usize),
    pub use_bias: bool,
    /// Hadamard cell-state terms inside the ConvLSTM gates. Off by default;
    /// the published parameter counts hold without them.
    pub peephole: bool,
}

impl LayerSpec {
    pub fn convlstm(in_channels: usize, out_channels: usize, k: usize) -> Self {
        Self {
            kind: LayerKind::ConvLstm,
            in_channels,
            out_channels,
            kernel: (k, k),
            use_bias: true,
            peephole: false,
        }
    }

    pub fn conv(in_channels: usize, out_channels: usize, k: usize) -> Self {
        Self {
            kind: LayerKind::ConvLRelu,
            in_channels,
            out_channels,
            kernel: (k, k),
            use_bias: true,
            peephole: false,
        }
    }

    pub fn conv_linear(in_channels: usize, out_channels: usize, k: usize) -> Self {
        Self {
            kind: LayerKind::ConvLinear,
            in_channels,
            out_channels,
            kernel: (k, k),
            use_bias: true,
            peephole: false,
        }
    }
}

/// Whole-network architecture: lag length, spatial size, activation slope
/// and the ordered layer list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub lag: usize,
    pub dim: usize,
    pub lrelu_slope: f64,
    pub layers: Vec<LayerSpec>,
}

impl ModelSpec {
    pub fn new(lag: usize, dim: usize, lrelu_slope: f64, layers: Vec<LayerSpec>) -> Result<Self> {
        let spec = Self { lag, dim, lrelu_slope, layers };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lag == 0 || self.dim == 0 {
            return Err(Error::InvalidParameter(
                "lag and spatial dimension must be >= 1".into(),
            ));
        }
        if !(self.lrelu_slope > 0.0 && self.lrelu_slope < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "leaky-ReLU slope must lie in (0, 1), got {}",
                self.lrelu_slope
            )));
        }
        if self.layers.len() < 2 {
            return Err(Error::InvalidParameter(
                "need at least a ConvLSTM layer and a generating layer".into(),
            ));
        }
        for (i, layer) in self.layers.iter().enumerate() {
            let (kh, kw) = layer.kernel;
            if kh % 2 == 0 || kw % 2 == 0 || kh == 0 || kw == 0 {
                return Err(Error::InvalidParameter(format!(
                    "layer {i}: kernel dims must be odd, got {kh}x{kw}"
                )));
            }
            if layer.in_channels == 0 || layer.out_channels == 0 {
                return Err(Error::InvalidParameter(format!(
                    "layer {i}: channel counts must be >= 1"
                )));
            }
            let expected_kind_ok = match (i, layer.kind) {
                (0, LayerKind::ConvLstm) => true,
                (0, _) => false,
                (i, LayerKind::ConvLinear) if i == self.layers.len() - 1 => true,
                (i, LayerKind::ConvLRelu) if i != self.layers.len() - 1 => true,
                _ => false,
            };
            if !expected_kind_ok {
                return Err(Error::InvalidParameter(format!(
                    "layer {i}: {:?} is not valid at this position; expected a leading \
                     ConvLSTM, ConvLRelu layers in the middle and a ConvLinear tail",
                    layer.kind
                )));
            }
        }
        if self.layers[0].in_channels != 1 {
            return Err(Error::InvalidParameter(
                "the ConvLSTM layer consumes single-channel matrices".into(),
            ));
        }
        let last = self.layers.last().expect("checked non-empty");
        if last.out_channels != 1 {
            return Err(Error::InvalidParameter(
                "the generating layer must emit a single channel".into(),
            ));
        }
        for w in self.layers.windows(2) {
            if w[1].in_channels != w[0].out_channels {
                return Err(Error::InvalidParameter(format!(
                    "channel chain breaks: {} out vs {} in",
                    w[0].out_channels, w[1].in_channels
                )));
            }
        }
        Ok(())
    }
}

pub(crate) type Span = std::ops::Range<usize>;

#[derive(Debug, Clone)]
pub(crate) struct ConvLstmRanges {
    /// Input-to-state kernels, gate order [input, forget, cell, output].
    pub wx: [Span; 4],
    /// State-to-state kernels, same gate order.
    pub wh: [Span; 4],
    pub bias: Option<[Span; 4]>,
    /// Peephole maps, gate order [input, forget, output].
    pub peep: Option<[Span; 3]>,
}

#[derive(Debug, Clone)]
pub(crate) struct ConvRanges {
    pub kernel: Span,
    pub bias: Option<Span>,
}

#[derive(Debug, Clone)]
pub(crate) enum LayerRanges {
    ConvLstm(ConvLstmRanges),
    Conv(ConvRanges),
}

/// Offsets of every parameter block inside the flat weight vector.
#[derive(Debug, Clone)]
pub struct WeightLayout {
    pub(crate) layers: Vec<LayerRanges>,
    pub total: usize,
    /// Kernel parameters only: biases and peepholes excluded.
    pub weights_only: usize,
}

impl WeightLayout {
    pub fn new(spec: &ModelSpec) -> Self {
        let mut offset = 0;
        let mut weights_only = 0;
        let mut take = |n: usize| {
            let span = offset..offset + n;
            offset += n;
            span
        };
        let plane = spec.dim * spec.dim;
        let mut layers = Vec::with_capacity(spec.layers.len());
        for layer in &spec.layers {
            let (kh, kw) = layer.kernel;
            let x_size = layer.out_channels * layer.in_channels * kh * kw;
            match layer.kind {
                LayerKind::ConvLstm => {
                    let h_size = layer.out_channels * layer.out_channels * kh * kw;
                    let wx = [take(x_size), take(x_size), take(x_size), take(x_size)];
                    let wh = [take(h_size), take(h_size), take(h_size), take(h_size)];
                    weights_only += 4 * (x_size + h_size);
                    let bias = layer.use_bias.then(|| {
                        let n = layer.out_channels;
                        [take(n), take(n), take(n), take(n)]
                    });
                    let peep = layer.peephole.then(|| {
                        let n = layer.out_channels * plane;
                        [take(n), take(n), take(n)]
                    });
                    layers.push(LayerRanges::ConvLstm(ConvLstmRanges { wx, wh, bias, peep }));
                }
                LayerKind::ConvLRelu | LayerKind::ConvLinear => {
                    let kernel = take(x_size);
                    weights_only += x_size;
                    let bias = layer.use_bias.then(|| take(layer.out_channels));
                    layers.push(LayerRanges::Conv(ConvRanges { kernel, bias }));
                }
            }
        }
        Self { layers, total: offset, weights_only }
    }
}

/// `(weights_only, total)` trainable parameter counts. `weights_only`
/// counts convolution kernels alone; `total` adds biases and peephole maps
/// where enabled.
pub fn count_params(spec: &ModelSpec) -> (usize, usize) {
    let layout = WeightLayout::new(spec);
    (layout.weights_only, layout.total)
}

/// Flat trainable parameter store; the layout is derived from the spec.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelWeights {
    pub data: Vec<f64>,
}

impl ModelWeights {
    pub fn zeros(spec: &ModelSpec) -> Self {
        Self { data: vec![0.0; WeightLayout::new(spec).total] }
    }

    /// Seeded initialization: kernels uniform in `+-sqrt(6 / fan_in)`,
    /// biases zero except the forget gate at 1.0, peepholes zero.
    pub fn init(spec: &ModelSpec, seed: u64) -> Self {
        let layout = WeightLayout::new(spec);
        let mut data = vec![0.0; layout.total];
        let mut rng = Rng::from_seed(seed);
        let mut fill = |span: &Span, fan_in: usize, data: &mut Vec<f64>| {
            let bound = (6.0 / fan_in as f64).sqrt();
            for v in &mut data[span.clone()] {
                *v = bound * (2.0 * rng.uniform() - 1.0);
            }
        };
        for (ranges, layer) in layout.layers.iter().zip(spec.layers.iter()) {
            let (kh, kw) = layer.kernel;
            match ranges {
                LayerRanges::ConvLstm(r) => {
                    for span in &r.wx {
                        fill(span, layer.in_channels * kh * kw, &mut data);
                    }
                    for span in &r.wh {
                        fill(span, layer.out_channels * kh * kw, &mut data);
                    }
                    if let Some(bias) = &r.bias {
                        // forget-gate bias starts at 1 for a long memory
                        for v in &mut data[bias[1].clone()] {
                            *v = 1.0;
                        }
                    }
                }
                LayerRanges::Conv(r) => {
                    fill(&r.kernel, layer.in_channels * kh * kw, &mut data);
                }
            }
        }
        Self { data }
    }
}

#[cfg(test)]
pub(crate) mod test_specs {
    use super::*;

    /// 25-asset architecture: ConvLSTM 1->4 k3, conv 4->8 k3, conv 8->1 k1.
    pub fn spec_25() -> ModelSpec {
        ModelSpec::new(
            20,
            25,
            0.01,
            vec![
                LayerSpec::convlstm(1, 4, 3),
                LayerSpec::conv(4, 8, 3),
                LayerSpec::conv_linear(8, 1, 1),
            ],
        )
        .unwrap()
    }

    /// 60-asset architecture: ConvLSTM 1->16 k5, conv 16->16 k3,
    /// conv 16->32 k3, conv 32->1 k5.
    pub fn spec_60() -> ModelSpec {
        ModelSpec::new(
            20,
            60,
            0.01,
            vec![
                LayerSpec::convlstm(1, 16, 5),
                LayerSpec::conv(16, 16, 3),
                LayerSpec::conv(16, 32, 3),
                LayerSpec::conv_linear(32, 1, 5),
            ],
        )
        .unwrap()
    }

    /// Simulation architecture: ConvLSTM 1->8 k3, conv 8->16 k3, conv 16->1 k1.
    pub fn spec_sim() -> ModelSpec {
        ModelSpec::new(
            20,
            60,
            0.01,
            vec![
                LayerSpec::convlstm(1, 8, 3),
                LayerSpec::conv(8, 16, 3),
                LayerSpec::conv_linear(16, 1, 1),
            ],
        )
        .unwrap()
    }

    /// Tiny spec for gradient checks.
    pub fn spec_toy(dim: usize, lag: usize) -> ModelSpec {
        ModelSpec::new(
            lag,
            dim,
            0.01,
            vec![
                LayerSpec::convlstm(1, 2, 3),
                LayerSpec::conv(2, 2, 3),
                LayerSpec::conv_linear(2, 1, 1),
            ],
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::test_specs::*;
    use super::*;

    #[test]
    fn parameter_count_25_asset_architecture() {
        let (weights_only, total) = count_params(&spec_25());
        assert_eq!(weights_only, 1016);
        // biases: ConvLSTM 4 gates x 4 channels, conv 8, conv 1
        assert_eq!(total, 1016 + 16 + 8 + 1);
    }

    #[test]
    fn parameter_count_60_asset_architecture() {
        let (weights_only, _) = count_params(&spec_60());
        assert_eq!(weights_only, 34912);
    }

    #[test]
    fn parameter_count_simulation_architecture() {
        let (weights_only, _) = count_params(&spec_sim());
        assert_eq!(weights_only, 3760);
    }

    #[test]
    fn peepholes_add_only_to_total() {
        let mut spec = spec_toy(4, 3);
        let (w0, t0) = count_params(&spec);
        spec.layers[0].peephole = true;
        let (w1, t1) = count_params(&spec);
        assert_eq!(w0, w1);
        assert_eq!(t1, t0 + 3 * 2 * 16);
    }

    #[test]
    fn validation_rejects_even_kernels() {
        let r = ModelSpec::new(
            3,
            4,
            0.01,
            vec![LayerSpec::convlstm(1, 2, 2), LayerSpec::conv_linear(2, 1, 1)],
        );
        assert!(r.is_err());
    }

    #[test]
    fn validation_rejects_wrong_layer_order() {
        let r = ModelSpec::new(
            3,
            4,
            0.01,
            vec![LayerSpec::conv(1, 2, 3), LayerSpec::conv_linear(2, 1, 1)],
        );
        assert!(r.is_err());
        let r = ModelSpec::new(
            3,
            4,
            0.01,
            vec![LayerSpec::convlstm(1, 2, 3), LayerSpec::conv(2, 1, 3)],
        );
        assert!(r.is_err());
    }

    #[test]
    fn validation_rejects_broken_channel_chain() {
        let r = ModelSpec::new(
            3,
            4,
            0.01,
            vec![
                LayerSpec::convlstm(1, 2, 3),
                LayerSpec::conv(3, 2, 3),
                LayerSpec::conv_linear(2, 1, 1),
            ],
        );
        assert!(r.is_err());
    }

    #[test]
    fn init_is_seeded_and_bounded() {
        let spec = spec_toy(4, 3);
        let a = ModelWeights::init(&spec, 9);
        let b = ModelWeights::init(&spec, 9);
        assert_eq!(a, b);
        let c = ModelWeights::init(&spec, 10);
        assert_ne!(a, c);
        // forget-gate bias is 1
        let layout = WeightLayout::new(&spec);
        if let LayerRanges::ConvLstm(r) = &layout.layers[0] {
            let bias = r.bias.as_ref().unwrap();
            for v in &a.data[bias[1].clone()] {
                assert_eq!(*v, 1.0);
            }
            for v in &a.data[bias[0].clone()] {
                assert_eq!(*v, 0.0);
            }
        } else {
            panic!("first layer must be ConvLSTM");
        }
    }
}
