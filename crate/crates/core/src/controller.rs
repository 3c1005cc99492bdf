//! Single-layer fully-connected recurrent policy network.
//!
//! Every neuron sees the full input code, the previous outputs of all neurons,
//! and a constant bias of 1. The flat weight vector is laid out input block
//! first, then recurrent block, then biases, each block neuron-major; the
//! optimizer relies on this ordering when the input size grows mid-run.

use crate::error::{Error, Result};
use std::ops::Range;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ControllerShape {
    pub n_inputs: usize,
    pub n_neurons: usize,
}

impl ControllerShape {
    pub fn new(n_inputs: usize, n_neurons: usize) -> Result<Self> {
        if n_neurons == 0 {
            return Err(Error::InvalidArgument(
                "controller needs at least one neuron".into(),
            ));
        }
        Ok(Self {
            n_inputs,
            n_neurons,
        })
    }

    pub fn weight_count(&self) -> usize {
        self.n_neurons * (self.n_inputs + self.n_neurons + 1)
    }
}

/// Index arithmetic for the flat genotype.
#[derive(Debug, Clone, Copy)]
pub struct GenotypeLayout {
    shape: ControllerShape,
}

impl GenotypeLayout {
    pub fn new(shape: ControllerShape) -> Self {
        Self { shape }
    }

    pub fn shape(&self) -> ControllerShape {
        self.shape
    }

    pub fn total_len(&self) -> usize {
        self.shape.weight_count()
    }

    pub fn input_block(&self) -> Range<usize> {
        0..self.shape.n_neurons * self.shape.n_inputs
    }

    pub fn recurrent_block(&self) -> Range<usize> {
        let start = self.input_block().end;
        start..start + self.shape.n_neurons * self.shape.n_neurons
    }

    pub fn bias_block(&self) -> Range<usize> {
        let start = self.recurrent_block().end;
        start..start + self.shape.n_neurons
    }

    pub fn input_index(&self, neuron: usize, input: usize) -> usize {
        debug_assert!(neuron < self.shape.n_neurons && input < self.shape.n_inputs);
        neuron * self.shape.n_inputs + input
    }

    pub fn recurrent_index(&self, neuron: usize, from: usize) -> usize {
        debug_assert!(neuron < self.shape.n_neurons && from < self.shape.n_neurons);
        self.recurrent_block().start + neuron * self.shape.n_neurons + from
    }

    pub fn bias_index(&self, neuron: usize) -> usize {
        debug_assert!(neuron < self.shape.n_neurons);
        self.bias_block().start + neuron
    }

    /// Flat positions (in the grown layout) that new input weights occupy when
    /// the input count increases. New inputs extend each neuron's input
    /// segment, so the zeros land right before the weights that follow them.
    pub fn insert_positions_for_input_growth(&self, new_n_inputs: usize) -> Result<Vec<usize>> {
        let old = self.shape.n_inputs;
        if new_n_inputs < old {
            return Err(Error::InvalidArgument(format!(
                "cannot shrink inputs from {old} to {new_n_inputs}"
            )));
        }
        let mut positions = Vec::with_capacity(self.shape.n_neurons * (new_n_inputs - old));
        for neuron in 0..self.shape.n_neurons {
            for input in old..new_n_inputs {
                positions.push(neuron * new_n_inputs + input);
            }
        }
        Ok(positions)
    }
}

/// Output nonlinearity. The recurrent state carries post-activation values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Activation {
    #[default]
    Tanh,
    Identity,
    Logistic,
}

impl Activation {
    pub fn apply(&self, x: f64) -> f64 {
        match self {
            Activation::Tanh => x.tanh(),
            Activation::Identity => x,
            Activation::Logistic => 1.0 / (1.0 + (-x).exp()),
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "tanh" => Ok(Activation::Tanh),
            "identity" => Ok(Activation::Identity),
            "logistic" => Ok(Activation::Logistic),
            other => Err(Error::InvalidArgument(format!(
                "unknown activation '{other}' (expected tanh|identity|logistic)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Activation::Tanh => "tanh",
            Activation::Identity => "identity",
            Activation::Logistic => "logistic",
        }
    }
}

/// Weights plus persistent neuron state; owned by one evaluator at a time.
#[derive(Debug, Clone)]
pub struct Controller {
    shape: ControllerShape,
    weights: Vec<f64>,
    activation: Activation,
    prev_outputs: Vec<f64>,
}

impl Controller {
    pub fn new(shape: ControllerShape, weights: Vec<f64>, activation: Activation) -> Result<Self> {
        if weights.len() != shape.weight_count() {
            return Err(Error::DimensionMismatch {
                context: "controller weights",
                expected: shape.weight_count(),
                got: weights.len(),
            });
        }
        Ok(Self {
            shape,
            weights,
            activation,
            prev_outputs: vec![0.0; shape.n_neurons],
        })
    }

    pub fn shape(&self) -> ControllerShape {
        self.shape
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn state(&self) -> &[f64] {
        &self.prev_outputs
    }

    /// Zero the recurrent state; call at every episode start.
    pub fn reset_state(&mut self) {
        self.prev_outputs.iter_mut().for_each(|v| *v = 0.0);
    }

    /// One forward step: returns the argmax action (ties to the lowest index)
    /// and stores the new outputs as next step's recurrent input.
    pub fn activate(&mut self, code: &[f64]) -> Result<usize> {
        if code.len() != self.shape.n_inputs {
            return Err(Error::DimensionMismatch {
                context: "controller input",
                expected: self.shape.n_inputs,
                got: code.len(),
            });
        }
        let layout = GenotypeLayout::new(self.shape);
        let mut outputs = vec![0.0; self.shape.n_neurons];
        for (neuron, out) in outputs.iter_mut().enumerate() {
            let mut pre = 0.0;
            let in_base = neuron * self.shape.n_inputs;
            for (j, x) in code.iter().enumerate() {
                pre += self.weights[in_base + j] * x;
            }
            let rec_base = layout.recurrent_block().start + neuron * self.shape.n_neurons;
            for (j, prev) in self.prev_outputs.iter().enumerate() {
                pre += self.weights[rec_base + j] * prev;
            }
            pre += self.weights[layout.bias_index(neuron)];
            *out = self.activation.apply(pre);
        }
        let action = argmax(&outputs);
        self.prev_outputs = outputs;
        Ok(action)
    }
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Grow the input count, keeping every existing weight at its logical
/// connection and zero-filling the new positions. A grown network fed the old
/// inputs padded with zeros behaves exactly like the old one.
pub fn expand_inputs(
    weights: &[f64],
    shape: ControllerShape,
    new_n_inputs: usize,
) -> Result<(Vec<f64>, ControllerShape)> {
    if weights.len() != shape.weight_count() {
        return Err(Error::DimensionMismatch {
            context: "expand_inputs weights",
            expected: shape.weight_count(),
            got: weights.len(),
        });
    }
    if new_n_inputs < shape.n_inputs {
        return Err(Error::InvalidArgument(format!(
            "cannot shrink inputs from {} to {new_n_inputs}",
            shape.n_inputs
        )));
    }
    let new_shape = ControllerShape::new(new_n_inputs, shape.n_neurons)?;
    let mut out = vec![0.0; new_shape.weight_count()];
    for neuron in 0..shape.n_neurons {
        let old_base = neuron * shape.n_inputs;
        let new_base = neuron * new_n_inputs;
        out[new_base..new_base + shape.n_inputs]
            .copy_from_slice(&weights[old_base..old_base + shape.n_inputs]);
    }
    let old_layout = GenotypeLayout::new(shape);
    let new_layout = GenotypeLayout::new(new_shape);
    let (old_rec, new_rec) = (old_layout.recurrent_block(), new_layout.recurrent_block());
    out[new_rec.start..new_rec.start + old_rec.len()].copy_from_slice(&weights[old_rec]);
    let (old_bias, new_bias) = (old_layout.bias_block(), new_layout.bias_block());
    out[new_bias].copy_from_slice(&weights[old_bias]);
    Ok((out, new_shape))
}
