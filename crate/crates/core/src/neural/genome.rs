use serde::{Deserialize, Serialize};

use crate::message::MessageShape;
use crate::rng::RngStream;

use super::init::orthogonal_init;

/// Size of the agent's global hidden state.
pub const GLOBAL_STATE: usize = 16;
/// Size of the attention and generator scratch states.
pub const MEMORY_STATE: usize = 10;
/// Size of the task network's own hidden state.
pub const TASK_STATE: usize = 16;
pub const TASK_HIDDEN: usize = 16;
pub const TASK_OBS: usize = 24;
pub const TASK_ACTIONS: usize = 4;
pub const TASK_BINS: usize = 20;

/// Position and shape of one affine layer inside a flat genome. The weight
/// matrix is stored row-major (`outputs × inputs`) and followed by the bias.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub offset: usize,
    pub inputs: usize,
    pub outputs: usize,
}

impl LayerSpec {
    pub const fn len(&self) -> usize {
        self.outputs * (self.inputs + 1)
    }

    pub const fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn weight_range(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.inputs * self.outputs
    }

    fn bias_range(&self) -> std::ops::Range<usize> {
        let start = self.offset + self.inputs * self.outputs;
        start..start + self.outputs
    }
}

/// Borrowed view of an affine layer.
#[derive(Debug, Clone, Copy)]
pub struct Dense<'a> {
    pub weight: &'a [f64],
    pub bias: &'a [f64],
    pub inputs: usize,
    pub outputs: usize,
}

impl<'a> Dense<'a> {
    /// `out = W x + b`.
    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.inputs);
        debug_assert_eq!(out.len(), self.outputs);
        for (j, o) in out.iter_mut().enumerate() {
            let row = &self.weight[j * self.inputs..(j + 1) * self.inputs];
            *o = self.bias[j] + dot(row, x);
        }
    }

    pub fn row(&self, j: usize) -> &'a [f64] {
        &self.weight[j * self.inputs..(j + 1) * self.inputs]
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Where each layer of a genome lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenomeLayout {
    pub shape: MessageShape,
    pub attn_gate: LayerSpec,
    pub attn_update: LayerSpec,
    pub attn_logit: LayerSpec,
    pub global: LayerSpec,
    pub gen_gate: LayerSpec,
    pub gen_update: LayerSpec,
    pub gen_out: LayerSpec,
    pub task: Option<TaskLayers>,
    pub total: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskLayers {
    pub input: LayerSpec,
    pub hidden: LayerSpec,
    pub state: LayerSpec,
    pub action: LayerSpec,
}

impl GenomeLayout {
    pub fn new(shape: MessageShape, with_task: bool) -> Self {
        let c = shape.channels;
        let mut offset = 0;
        let mut layer = |inputs, outputs| {
            let spec = LayerSpec {
                offset,
                inputs,
                outputs,
            };
            offset += spec.len();
            spec
        };
        let attn_in = c + GLOBAL_STATE + MEMORY_STATE;
        let attn_gate = layer(attn_in, MEMORY_STATE);
        let attn_update = layer(attn_in, MEMORY_STATE);
        let attn_logit = layer(MEMORY_STATE, 1);
        let global = layer(shape.symbols() + GLOBAL_STATE, GLOBAL_STATE);
        let gen_in = 2 * c + GLOBAL_STATE + MEMORY_STATE;
        let gen_gate = layer(gen_in, MEMORY_STATE);
        let gen_update = layer(gen_in, MEMORY_STATE);
        let gen_out = layer(MEMORY_STATE, c);
        let task = with_task.then(|| TaskLayers {
            input: layer(GLOBAL_STATE + TASK_STATE + TASK_OBS, TASK_HIDDEN),
            hidden: layer(TASK_HIDDEN, TASK_HIDDEN),
            state: layer(TASK_HIDDEN, TASK_STATE),
            action: layer(TASK_HIDDEN, TASK_ACTIONS * TASK_BINS),
        });
        Self {
            shape,
            attn_gate,
            attn_update,
            attn_logit,
            global,
            gen_gate,
            gen_update,
            gen_out,
            task,
            total: offset,
        }
    }

    pub fn layers(&self) -> Vec<LayerSpec> {
        let mut v = vec![
            self.attn_gate,
            self.attn_update,
            self.attn_logit,
            self.global,
            self.gen_gate,
            self.gen_update,
            self.gen_out,
        ];
        if let Some(t) = self.task {
            v.extend([t.input, t.hidden, t.state, t.action]);
        }
        v
    }
}

/// All evolvable weights of one agent, flat.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Genome {
    layout: GenomeLayout,
    weights: Vec<f64>,
}

impl Genome {
    pub fn zeros(layout: GenomeLayout) -> Self {
        Self {
            layout,
            weights: vec![0.0; layout.total],
        }
    }

    /// Orthogonal weight matrices scaled by `gain`, zero biases. Layers are
    /// drawn in layout order from one stream.
    pub fn orthogonal(layout: GenomeLayout, gain: f64, rng: &mut RngStream) -> Self {
        let mut g = Self::zeros(layout);
        for spec in layout.layers() {
            let w = orthogonal_init(spec.outputs, spec.inputs, gain, rng);
            g.weights[spec.weight_range()].copy_from_slice(&w);
        }
        g
    }

    pub fn from_weights(layout: GenomeLayout, weights: Vec<f64>) -> Option<Self> {
        (weights.len() == layout.total).then_some(Self { layout, weights })
    }

    pub fn layout(&self) -> &GenomeLayout {
        &self.layout
    }

    pub fn shape(&self) -> MessageShape {
        self.layout.shape
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dense(&self, spec: LayerSpec) -> Dense<'_> {
        Dense {
            weight: &self.weights[spec.weight_range()],
            bias: &self.weights[spec.bias_range()],
            inputs: spec.inputs,
            outputs: spec.outputs,
        }
    }

    pub fn weight_mut(&mut self, spec: LayerSpec) -> &mut [f64] {
        &mut self.weights[spec.weight_range()]
    }

    pub fn bias_mut(&mut self, spec: LayerSpec) -> &mut [f64] {
        &mut self.weights[spec.bias_range()]
    }

    pub fn is_finite(&self) -> bool {
        self.weights.iter().all(|w| w.is_finite())
    }
}
