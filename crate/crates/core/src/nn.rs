//! Multilayer perceptron predicting the blending parameter: ELU hidden
//! layers, identity output, three training losses, backpropagation, ADAM and
//! a sectioned training schedule.

use std::path::Path;
use std::str::FromStr;

use ndarray::{s, Array1, Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euler::{ConservedState, GasModel};

/// Layer widths of the predictor, input to output.
pub const NETWORK_DIMS: [usize; 6] = [40, 80, 80, 80, 80, 1];

/// Cells on each side of an interface fed to the network.
pub const WINDOW_HALF: usize = 5;

pub const INPUT_ORDER: &str = "rho,mom,E,p x cells -5..+4";

pub fn elu(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        x.exp_m1()
    }
}

fn elu_derivative(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else {
        x.exp()
    }
}

/// Network inputs for one interface: `(ρ, ρv, E, p)` of each cell, left to
/// right.
pub fn window_features(gas: &GasModel, cells: &[ConservedState]) -> Result<Vec<f64>> {
    if cells.len() != 2 * WINDOW_HALF {
        return Err(Error::Argument(format!("expected {} cells, got {}", 2 * WINDOW_HALF, cells.len())));
    }
    let mut out = Vec::with_capacity(4 * cells.len());
    for u in cells {
        let p = gas.check_admissible(u)?;
        out.extend_from_slice(&[u.rho, u.mom, u.energy, p]);
    }
    Ok(out)
}

/// Affine map `W z + b` with `W` of shape `(out, in)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    pub w: Array2<f64>,
    pub b: Array1<f64>,
}

impl Layer {
    fn zeros_like(&self) -> Self {
        Self { w: Array2::zeros(self.w.raw_dim()), b: Array1::zeros(self.b.len()) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MlpModel {
    layers: Vec<Layer>,
}

/// Gradients share the layout of the model.
pub type Gradients = Vec<Layer>;

impl MlpModel {
    pub fn from_layers(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Argument("a network needs at least one layer".into()));
        }
        for (i, l) in layers.iter().enumerate() {
            if l.w.nrows() != l.b.len() {
                return Err(Error::Argument(format!("layer {i}: {} rows but {} biases", l.w.nrows(), l.b.len())));
            }
            if i > 0 && layers[i - 1].w.nrows() != l.w.ncols() {
                return Err(Error::Argument(format!("layer {i} does not chain with layer {}", i - 1)));
            }
            if l.w.iter().chain(l.b.iter()).any(|v| !v.is_finite()) {
                return Err(Error::Argument(format!("layer {i} has non-finite parameters")));
            }
        }
        Ok(Self { layers })
    }

    pub fn zeros(dims: &[usize]) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::Argument("need input and output widths".into()));
        }
        Self::from_layers(
            dims.windows(2)
                .map(|d| Layer { w: Array2::zeros((d[1], d[0])), b: Array1::zeros(d[1]) })
                .collect(),
        )
    }

    /// Uniform `±1/√fan_in` initialisation.
    pub fn random(dims: &[usize], seed: u64) -> Result<Self> {
        let mut model = Self::zeros(dims)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for layer in &mut model.layers {
            let bound = 1.0 / (layer.w.ncols() as f64).sqrt();
            layer.w.mapv_inplace(|_| rng.random_range(-bound..bound));
            layer.b.mapv_inplace(|_| rng.random_range(-bound..bound));
        }
        Ok(model)
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn dims(&self) -> Vec<usize> {
        std::iter::once(self.layers[0].w.ncols()).chain(self.layers.iter().map(|l| l.w.nrows())).collect()
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].w.ncols()
    }

    /// Raw (unclamped) outputs for a batch of rows.
    pub fn forward_batch(&self, inputs: ArrayView2<f64>) -> Result<Array1<f64>> {
        if inputs.ncols() != self.input_dim() {
            return Err(Error::Argument(format!(
                "input width {} but the network expects {}",
                inputs.ncols(),
                self.input_dim()
            )));
        }
        let last = self.layers.len() - 1;
        let mut z = inputs.to_owned();
        for (i, layer) in self.layers.iter().enumerate() {
            z = z.dot(&layer.w.t()) + &layer.b;
            if i < last {
                z.mapv_inplace(elu);
            }
        }
        Ok(z.column(0).to_owned())
    }

    pub fn forward(&self, input: &[f64]) -> Result<f64> {
        let view = ArrayView2::from_shape((1, input.len()), input).map_err(|e| Error::Argument(e.to_string()))?;
        Ok(self.forward_batch(view)?[0])
    }

    pub fn predict_alpha(&self, input: &[f64]) -> Result<f64> {
        Ok(self.forward(input)?.clamp(0.0, 1.0))
    }

    /// Mean loss over the batch and its exact gradient.
    pub fn loss_and_gradients(&self, inputs: ArrayView2<f64>, targets: &[f64], kind: LossKind) -> Result<(f64, Gradients)> {
        if inputs.nrows() != targets.len() || targets.is_empty() {
            return Err(Error::Argument("batch inputs and targets disagree".into()));
        }
        if inputs.ncols() != self.input_dim() {
            return Err(Error::Argument("input width does not match the network".into()));
        }
        let last = self.layers.len() - 1;
        // Pre-activations and activations of every layer.
        let mut pre: Vec<Array2<f64>> = Vec::with_capacity(self.layers.len());
        let mut act: Vec<Array2<f64>> = vec![inputs.to_owned()];
        for (i, layer) in self.layers.iter().enumerate() {
            let a = act[i].dot(&layer.w.t()) + &layer.b;
            act.push(if i < last { a.mapv(elu) } else { a.clone() });
            pre.push(a);
        }
        let predictions = act[last + 1].column(0).to_owned();
        let loss = loss(&predictions.to_vec(), targets, kind)?;
        let n = targets.len() as f64;
        let mut delta = Array2::from_shape_fn((targets.len(), 1), |(r, _)| kind.derivative(predictions[r], targets[r]) / n);
        let mut grads: Gradients = self.layers.iter().map(Layer::zeros_like).collect();
        for i in (0..=last).rev() {
            grads[i].w = delta.t().dot(&act[i]);
            grads[i].b = delta.sum_axis(Axis(0));
            if i > 0 {
                let mut back = delta.dot(&self.layers[i].w);
                back.zip_mut_with(&pre[i - 1], |d, a| *d *= elu_derivative(*a));
                delta = back;
            }
        }
        Ok((loss, grads))
    }

    /// Parameters flattened layer by layer (`W` row-major, then `b`).
    pub fn parameters(&self) -> Vec<f64> {
        self.layers.iter().flat_map(|l| l.w.iter().chain(l.b.iter()).copied().collect::<Vec<_>>()).collect()
    }

    pub fn set_parameters(&mut self, values: &[f64]) -> Result<()> {
        let total: usize = self.layers.iter().map(|l| l.w.len() + l.b.len()).sum();
        if values.len() != total {
            return Err(Error::Argument(format!("{} values for {total} parameters", values.len())));
        }
        let mut it = values.iter();
        for layer in &mut self.layers {
            layer.w.iter_mut().chain(layer.b.iter_mut()).for_each(|p| *p = *it.next().unwrap_or(&0.0));
        }
        Ok(())
    }

    pub fn to_file(&self) -> WeightFile {
        WeightFile {
            dims: self.dims(),
            layers: self
                .layers
                .iter()
                .map(|l| LayerFile {
                    w: l.w.outer_iter().map(|r| r.to_vec()).collect(),
                    b: l.b.to_vec(),
                })
                .collect(),
            activation: "elu".into(),
            input_order: INPUT_ORDER.into(),
        }
    }

    pub fn from_file(file: &WeightFile) -> Result<Self> {
        if file.activation != "elu" {
            return Err(Error::Format(format!("unsupported activation {:?}", file.activation)));
        }
        if file.layers.len() + 1 != file.dims.len() {
            return Err(Error::Format("dims and layers disagree".into()));
        }
        let layers = file
            .layers
            .iter()
            .zip(file.dims.windows(2))
            .map(|(l, d)| {
                if l.w.len() != d[1] || l.w.iter().any(|r| r.len() != d[0]) || l.b.len() != d[1] {
                    return Err(Error::Format(format!("layer shape does not match dims {d:?}")));
                }
                let flat: Vec<f64> = l.w.iter().flatten().copied().collect();
                Ok(Layer {
                    w: Array2::from_shape_vec((d[1], d[0]), flat).map_err(|e| Error::Format(e.to_string()))?,
                    b: Array1::from_vec(l.b.clone()),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_layers(layers).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string(&self.to_file())?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_file(&serde_json::from_str(&text)?)
    }
}

const BUNDLED_WEIGHTS: &str = include_str!("../assets/ddlft_weights.json");

/// The network shipped with the crate, trained on the default dataset.
pub fn bundled_model() -> Result<MlpModel> {
    MlpModel::from_file(&serde_json::from_str(BUNDLED_WEIGHTS)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerFile {
    #[serde(rename = "W")]
    pub w: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

/// On-disk layout of a trained network.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightFile {
    pub dims: Vec<usize>,
    pub layers: Vec<LayerFile>,
    pub activation: String,
    pub input_order: String,
}

/// Weight of squared under-prediction in the nonsymmetric loss.
pub const NONSYM_GAMMA: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    Mse,
    Mexp,
    Nonsym,
}

impl FromStr for LossKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mse" => Ok(LossKind::Mse),
            "mexp" => Ok(LossKind::Mexp),
            "nonsym" => Ok(LossKind::Nonsym),
            other => Err(Error::Argument(format!("unknown loss {other:?}"))),
        }
    }
}

impl LossKind {
    fn pointwise(self, prediction: f64, target: f64) -> f64 {
        let r = target - prediction;
        match self {
            LossKind::Mse => r * r,
            LossKind::Mexp => r.exp_m1().powi(2),
            LossKind::Nonsym if prediction > target => -r,
            LossKind::Nonsym => NONSYM_GAMMA * r * r,
        }
    }

    /// Derivative of the pointwise loss with respect to the prediction.
    fn derivative(self, prediction: f64, target: f64) -> f64 {
        let r = target - prediction;
        match self {
            LossKind::Mse => -2.0 * r,
            LossKind::Mexp => -2.0 * r.exp_m1() * r.exp(),
            LossKind::Nonsym if prediction > target => 1.0,
            LossKind::Nonsym => -2.0 * NONSYM_GAMMA * r,
        }
    }
}

/// Mean loss of `predictions` against `targets`.
pub fn loss(predictions: &[f64], targets: &[f64], kind: LossKind) -> Result<f64> {
    if predictions.len() != targets.len() {
        return Err(Error::Argument("predictions and targets differ in length".into()));
    }
    if targets.is_empty() {
        return Err(Error::Argument("empty batch".into()));
    }
    Ok(predictions.iter().zip(targets).map(|(p, t)| kind.pointwise(*p, *t)).sum::<f64>() / targets.len() as f64)
}

/// First and second moment estimates of ADAM.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState {
    pub m: Gradients,
    pub v: Gradients,
    pub t: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamState {
    pub fn new(model: &MlpModel) -> Self {
        let zeros: Gradients = model.layers.iter().map(Layer::zeros_like).collect();
        Self { m: zeros.clone(), v: zeros, t: 0, beta1: 0.9, beta2: 0.999, eps: 1e-8 }
    }
}

pub fn adam_step(model: &mut MlpModel, grads: &Gradients, state: &mut AdamState, step_size: f64) -> Result<()> {
    if grads.len() != model.layers.len()
        || grads.iter().zip(&model.layers).any(|(g, l)| g.w.dim() != l.w.dim() || g.b.len() != l.b.len())
    {
        return Err(Error::Argument("gradient shapes do not match the model".into()));
    }
    state.t += 1;
    let (b1, b2, eps) = (state.beta1, state.beta2, state.eps);
    let c1 = 1.0 - b1.powi(state.t as i32);
    let c2 = 1.0 - b2.powi(state.t as i32);
    for (((layer, g), m), v) in model.layers.iter_mut().zip(grads).zip(&mut state.m).zip(&mut state.v) {
        let params = layer.w.iter_mut().chain(layer.b.iter_mut());
        let grad = g.w.iter().chain(g.b.iter());
        let first = m.w.iter_mut().chain(m.b.iter_mut());
        let second = v.w.iter_mut().chain(v.b.iter_mut());
        for (((p, g), m), v) in params.zip(grad).zip(first).zip(second) {
            *m = b1 * *m + (1.0 - b1) * g;
            *v = b2 * *v + (1.0 - b2) * g * g;
            *p -= step_size * (*m / c1) / ((*v / c2).sqrt() + eps);
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleSection {
    pub epochs: usize,
    pub batch_size: usize,
    pub step_size: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainingSchedule {
    pub sections: Vec<ScheduleSection>,
}

impl TrainingSchedule {
    /// Seven sections of 25 epochs with growing batches and decaying steps.
    pub fn paper() -> Self {
        let rows = [
            (32, 1e-3),
            (256, 1e-3),
            (1024, 1e-3),
            (4096, 1e-3),
            (4096, 1e-4),
            (4096, 1e-5),
            (4096, 1e-6),
        ];
        Self {
            sections: rows
                .iter()
                .map(|&(batch_size, step_size)| ScheduleSection { epochs: 25, batch_size, step_size })
                .collect(),
        }
    }

    /// Two short sections for smoke runs.
    pub fn quick() -> Self {
        Self {
            sections: vec![
                ScheduleSection { epochs: 5, batch_size: 32, step_size: 1e-3 },
                ScheduleSection { epochs: 5, batch_size: 256, step_size: 1e-4 },
            ],
        }
    }

    pub fn total_epochs(&self) -> usize {
        self.sections.iter().map(|s| s.epochs).sum()
    }
}

impl FromStr for TrainingSchedule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Self::paper()),
            "quick" => Ok(Self::quick()),
            other => Err(Error::Argument(format!("unknown schedule {other:?}"))),
        }
    }
}

/// Inputs (one row per sample) and α targets.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub inputs: Array2<f64>,
    pub targets: Vec<f64>,
}

impl Dataset {
    pub fn new(inputs: Array2<f64>, targets: Vec<f64>) -> Result<Self> {
        if inputs.nrows() != targets.len() {
            return Err(Error::Argument("inputs and targets differ in length".into()));
        }
        Ok(Self { inputs, targets })
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub model: MlpModel,
    /// Per-sample mean training loss of every epoch, in order.
    pub history: Vec<f64>,
    /// Index into `history` where each section starts.
    pub section_starts: Vec<usize>,
}

/// Runs the schedule from `model`, reshuffling every epoch with a generator
/// seeded by `seed`.
pub fn train(
    model: MlpModel,
    data: &Dataset,
    schedule: &TrainingSchedule,
    kind: LossKind,
    seed: u64,
    mut on_epoch: impl FnMut(usize, f64),
) -> Result<TrainOutcome> {
    if data.is_empty() {
        return Err(Error::Argument("cannot train on an empty dataset".into()));
    }
    if data.inputs.ncols() != model.input_dim() {
        return Err(Error::Argument("dataset width does not match the network".into()));
    }
    let mut model = model;
    let mut adam = AdamState::new(&model);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut history = Vec::with_capacity(schedule.total_epochs());
    let mut section_starts = Vec::with_capacity(schedule.sections.len());
    let width = data.inputs.ncols();
    for section in &schedule.sections {
        if section.batch_size == 0 {
            return Err(Error::Argument("batch size must be positive".into()));
        }
        section_starts.push(history.len());
        for _ in 0..section.epochs {
            order.shuffle(&mut rng);
            let mut total = 0.0;
            for chunk in order.chunks(section.batch_size) {
                let mut x = Array2::zeros((chunk.len(), width));
                for (r, &i) in chunk.iter().enumerate() {
                    x.row_mut(r).assign(&data.inputs.row(i));
                }
                let y: Vec<f64> = chunk.iter().map(|&i| data.targets[i]).collect();
                let (l, grads) = model.loss_and_gradients(x.view(), &y, kind)?;
                adam_step(&mut model, &grads, &mut adam, section.step_size)?;
                total += l * chunk.len() as f64;
            }
            let mean = total / data.len() as f64;
            on_epoch(history.len(), mean);
            history.push(mean);
        }
    }
    Ok(TrainOutcome { model, history, section_starts })
}

/// Mean loss of `model` over a whole dataset.
pub fn evaluate(model: &MlpModel, data: &Dataset, kind: LossKind) -> Result<f64> {
    let mut total = 0.0;
    let chunk = 4096;
    let mut start = 0;
    while start < data.len() {
        let end = (start + chunk).min(data.len());
        let out = model.forward_batch(data.inputs.slice(s![start..end, ..]))?;
        total += loss(&out.to_vec(), &data.targets[start..end], kind)? * (end - start) as f64;
        start = end;
    }
    Ok(total / data.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use ndarray::array;

    #[test]
    fn elu_examples() {
        assert_eq!(elu(0.0), 0.0);
        assert_eq!(elu(2.0), 2.0);
        assert_relative_eq!(elu(-1.0), (-1.0f64).exp() - 1.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_model_outputs_zero() {
        let m = MlpModel::zeros(&NETWORK_DIMS).unwrap();
        assert_eq!(m.forward(&[1.5; 40]).unwrap(), 0.0);
        assert!(m.forward(&[1.0; 39]).is_err());
    }

    #[test]
    fn toy_network_by_hand() {
        let l1 = Layer { w: array![[1.0, -2.0], [0.5, 0.25]], b: array![0.1, -0.3] };
        let l2 = Layer { w: array![[2.0, -1.0]], b: array![0.05] };
        let m = MlpModel::from_layers(vec![l1, l2]).unwrap();
        let x = [0.4, 0.7];
        let a1 = 0.4 - 1.4 + 0.1;
        let a2 = 0.2 + 0.175 - 0.3;
        let expected = 2.0 * elu(a1) - elu(a2) + 0.05;
        assert_relative_eq!(m.forward(&x).unwrap(), expected, epsilon = 1e-15);

        let id = MlpModel::from_layers(vec![Layer { w: array![[1.0, 0.0]], b: array![0.0] }]).unwrap();
        assert_eq!(id.forward(&[0.8, 5.0]).unwrap(), 0.8);
    }

    #[test]
    fn predictions_are_clamped() {
        for (raw, alpha) in [(-0.2, 0.0), (1.7, 1.0), (0.42, 0.42)] {
            let m = MlpModel::from_layers(vec![Layer { w: array![[0.0]], b: array![raw] }]).unwrap();
            assert_eq!(m.predict_alpha(&[3.0]).unwrap(), alpha);
        }
    }

    #[test]
    fn loss_examples() {
        for kind in [LossKind::Mse, LossKind::Mexp, LossKind::Nonsym] {
            assert_eq!(loss(&[0.3, 0.9], &[0.3, 0.9], kind).unwrap(), 0.0);
        }
        assert_relative_eq!(loss(&[0.5], &[1.0], LossKind::Nonsym).unwrap(), 2.5);
        assert_relative_eq!(loss(&[1.0], &[0.5], LossKind::Nonsym).unwrap(), 0.5);
        assert_relative_eq!(loss(&[0.0], &[1.0], LossKind::Mexp).unwrap(), (1f64.exp() - 1.0).powi(2));
        assert!("huber".parse::<LossKind>().is_err());
        assert!(loss(&[1.0], &[], LossKind::Mse).is_err());
    }

    #[test]
    fn zero_residual_gives_zero_gradient() {
        let m = MlpModel::random(&[3, 4, 1], 1).unwrap();
        let x = array![[0.1, 0.2, 0.3], [1.0, -1.0, 0.5]];
        let y = m.forward_batch(x.view()).unwrap().to_vec();
        let (l, g) = m.loss_and_gradients(x.view(), &y, LossKind::Mse).unwrap();
        assert_eq!(l, 0.0);
        assert!(g.iter().all(|l| l.w.iter().chain(l.b.iter()).all(|v| *v == 0.0)));
    }

    #[test]
    fn duplicated_batch_gives_same_gradient() {
        let m = MlpModel::random(&[3, 5, 1], 2).unwrap();
        let x = array![[0.1, 0.2, 0.3], [1.0, -1.0, 0.5]];
        let xx = ndarray::concatenate![Axis(0), x, x];
        let (_, g1) = m.loss_and_gradients(x.view(), &[0.2, 0.8], LossKind::Nonsym).unwrap();
        let (_, g2) = m.loss_and_gradients(xx.view(), &[0.2, 0.8, 0.2, 0.8], LossKind::Nonsym).unwrap();
        for (a, b) in g1.iter().zip(&g2) {
            for (x, y) in a.w.iter().zip(b.w.iter()) {
                assert_relative_eq!(x, y, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn adam_first_step_and_zero_gradient() {
        let mut m = MlpModel::from_layers(vec![Layer { w: array![[1.0, 2.0]], b: array![0.0] }]).unwrap();
        let mut st = AdamState::new(&m);
        let g = vec![Layer { w: array![[0.5, -3.0]], b: array![0.0] }];
        adam_step(&mut m, &g, &mut st, 1e-3).unwrap();
        assert!((m.layers()[0].w[[0, 0]] - (1.0 - 1e-3)).abs() < 1e-9);
        assert!((m.layers()[0].w[[0, 1]] - (2.0 + 1e-3)).abs() < 1e-9);
        assert_eq!(m.layers()[0].b[0], 0.0);
        assert_eq!(st.t, 1);
        let before = m.clone();
        let zero = vec![Layer { w: array![[0.0, 0.0]], b: array![0.0] }];
        let mut fresh = AdamState::new(&m);
        adam_step(&mut m, &zero, &mut fresh, 1e-3).unwrap();
        assert_eq!(m, before);
        assert_eq!(fresh.t, 1);
    }

    #[test]
    fn empty_schedule_and_empty_data() {
        let m = MlpModel::random(&[2, 3, 1], 4).unwrap();
        let data = Dataset::new(array![[0.1, 0.2]], vec![0.5]).unwrap();
        let out = train(m.clone(), &data, &TrainingSchedule { sections: vec![] }, LossKind::Mse, 1, |_, _| {}).unwrap();
        assert_eq!(out.model, m);
        assert!(out.history.is_empty());
        let empty = Dataset::new(Array2::zeros((0, 2)), vec![]).unwrap();
        assert!(train(m, &empty, &TrainingSchedule::quick(), LossKind::Mse, 1, |_, _| {}).is_err());
    }

    #[test]
    fn weight_file_round_trip() {
        let m = MlpModel::random(&NETWORK_DIMS, 9).unwrap();
        let file = m.to_file();
        assert_eq!(file.dims, NETWORK_DIMS.to_vec());
        let text = serde_json::to_string(&file).unwrap();
        assert!(text.contains("\"W\""));
        let back = MlpModel::from_file(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn schedule_matches_table() {
        let s = TrainingSchedule::paper();
        assert_eq!(s.sections.len(), 7);
        assert_eq!(s.total_epochs(), 175);
        let batches: Vec<usize> = s.sections.iter().map(|x| x.batch_size).collect();
        assert_eq!(batches, vec![32, 256, 1024, 4096, 4096, 4096, 4096]);
        assert_eq!(s.sections[6].step_size, 1e-6);
    }
}
