use std::fmt::Debug;
use std::iter::Sum;
use std::ops::{AddAssign, MulAssign};

use num_traits::Float;
use rand::Rng as _;
use rayon::prelude::*;

use crate::error::{invalid_input, Result};
use crate::rng::Rng;

/// Floating-point type the network runs in: `f32` for training, `f64` for
/// gradient checks.
pub trait Scalar:
    Float + Default + Debug + Send + Sync + AddAssign + MulAssign + Sum + 'static
{
    fn of(x: f64) -> Self;
}

impl Scalar for f32 {
    fn of(x: f64) -> Self {
        x as f32
    }
}

impl Scalar for f64 {
    fn of(x: f64) -> Self {
        x
    }
}

#[inline]
fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [T::zero(); 8];
    let ca = a.chunks_exact(8);
    let cb = b.chunks_exact(8);
    let tail: T = ca
        .remainder()
        .iter()
        .zip(cb.remainder())
        .fold(T::zero(), |s, (&x, &y)| s + x * y);
    for (x, y) in ca.zip(cb) {
        for k in 0..8 {
            acc[k] += x[k] * y[k];
        }
    }
    ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail
}

#[inline]
fn axpy<T: Scalar>(y: &mut [T], a: T, x: &[T]) {
    debug_assert_eq!(x.len(), y.len());
    for (yv, &xv) in y.iter_mut().zip(x) {
        *yv += a * xv;
    }
}

#[inline]
fn sigmoid<T: Scalar>(x: T) -> T {
    T::one() / (T::one() + (-x).exp())
}

/// Dimensions of the two-layer LSTM classifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Shape {
    pub input_dim: usize,
    pub hidden: usize,
    pub classes: usize,
}

/// Parameter tensors in storage order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tensor {
    L1WeightIh,
    L1WeightHh,
    L1BiasIh,
    L1BiasHh,
    L2WeightIh,
    L2WeightHh,
    L2BiasIh,
    L2BiasHh,
    HeadWeight,
    HeadBias,
}

impl Tensor {
    pub const ALL: [Tensor; 10] = [
        Tensor::L1WeightIh,
        Tensor::L1WeightHh,
        Tensor::L1BiasIh,
        Tensor::L1BiasHh,
        Tensor::L2WeightIh,
        Tensor::L2WeightHh,
        Tensor::L2BiasIh,
        Tensor::L2BiasHh,
        Tensor::HeadWeight,
        Tensor::HeadBias,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Tensor::L1WeightIh => "lstm1.weight_ih",
            Tensor::L1WeightHh => "lstm1.weight_hh",
            Tensor::L1BiasIh => "lstm1.bias_ih",
            Tensor::L1BiasHh => "lstm1.bias_hh",
            Tensor::L2WeightIh => "lstm2.weight_ih",
            Tensor::L2WeightHh => "lstm2.weight_hh",
            Tensor::L2BiasIh => "lstm2.bias_ih",
            Tensor::L2BiasHh => "lstm2.bias_hh",
            Tensor::HeadWeight => "head.weight",
            Tensor::HeadBias => "head.bias",
        }
    }
}

impl Shape {
    pub fn new(input_dim: usize, hidden: usize, classes: usize) -> Result<Self> {
        if input_dim == 0 || hidden == 0 || classes == 0 {
            return Err(invalid_input("network dimensions must be positive"));
        }
        Ok(Shape {
            input_dim,
            hidden,
            classes,
        })
    }

    /// `(rows, cols)` of a tensor. Gate blocks are stacked in the order
    /// input, forget, cell candidate, output; the head is `classes x hidden`.
    pub fn dims(&self, t: Tensor) -> (usize, usize) {
        let (d, h, k) = (self.input_dim, self.hidden, self.classes);
        match t {
            Tensor::L1WeightIh => (4 * h, d),
            Tensor::L1WeightHh | Tensor::L2WeightIh | Tensor::L2WeightHh => (4 * h, h),
            Tensor::L1BiasIh | Tensor::L1BiasHh | Tensor::L2BiasIh | Tensor::L2BiasHh => (4 * h, 1),
            Tensor::HeadWeight => (k, h),
            Tensor::HeadBias => (k, 1),
        }
    }

    pub fn len(&self, t: Tensor) -> usize {
        let (r, c) = self.dims(t);
        r * c
    }

    pub fn offset(&self, t: Tensor) -> usize {
        Tensor::ALL
            .iter()
            .take_while(|&&u| u != t)
            .map(|&u| self.len(u))
            .sum()
    }

    pub fn param_count(&self) -> usize {
        Tensor::ALL.iter().map(|&t| self.len(t)).sum()
    }
}

/// Closed-form parameter count of the two-layer network with separate
/// input-side and hidden-side gate biases.
pub fn count_params(hidden: usize, classes: usize, input_dim: usize) -> usize {
    let layer = |d: usize| 4 * hidden * d + 4 * hidden * hidden + 8 * hidden;
    layer(input_dim) + layer(hidden) + hidden * classes + classes
}

/// Multiply-accumulates for one time step through both LSTM layers
/// (gate pre-activations only; elementwise work excluded).
pub fn macs_per_step(hidden: usize, input_dim: usize) -> usize {
    4 * hidden * (input_dim + hidden) + 4 * hidden * (hidden + hidden)
}

fn split_tensors<'a, T>(shape: &Shape, mut buf: &'a [T]) -> [&'a [T]; 10] {
    Tensor::ALL.map(|t| {
        let (head, rest) = buf.split_at(shape.len(t));
        buf = rest;
        head
    })
}

fn split_tensors_mut<'a, T>(shape: &Shape, buf: &'a mut [T]) -> [&'a mut [T]; 10] {
    let mut rest = buf;
    Tensor::ALL.map(|t| {
        let (head, tail) = std::mem::take(&mut rest).split_at_mut(shape.len(t));
        rest = tail;
        head
    })
}

struct Layer<'a, T> {
    w_ih: &'a [T],
    w_hh: &'a [T],
    b_ih: &'a [T],
    b_hh: &'a [T],
    d: usize,
    h: usize,
}

struct LayerGrad<'a, T> {
    w_ih: &'a mut [T],
    w_hh: &'a mut [T],
    b_ih: &'a mut [T],
    b_hh: &'a mut [T],
}

/// Per-step activations kept for backpropagation.
struct LayerTrace<T> {
    /// `steps x 4h`, post-activation `i, f, g, o`.
    gates: Vec<T>,
    c: Vec<T>,
    tanh_c: Vec<T>,
    h: Vec<T>,
}

impl<T: Scalar> Layer<'_, T> {
    fn forward(&self, x: &[T], steps: usize) -> LayerTrace<T> {
        let (d, h) = (self.d, self.h);
        let g4 = 4 * h;
        let bias: Vec<T> = self
            .b_ih
            .iter()
            .zip(self.b_hh)
            .map(|(&a, &b)| a + b)
            .collect();
        let mut tr = LayerTrace {
            gates: vec![T::zero(); steps * g4],
            c: vec![T::zero(); steps * h],
            tanh_c: vec![T::zero(); steps * h],
            h: vec![T::zero(); steps * h],
        };
        let mut h_prev = vec![T::zero(); h];
        let mut c_prev = vec![T::zero(); h];
        for t in 0..steps {
            let xt = &x[t * d..(t + 1) * d];
            let z = &mut tr.gates[t * g4..(t + 1) * g4];
            for r in 0..g4 {
                z[r] = bias[r]
                    + dot(&self.w_ih[r * d..(r + 1) * d], xt)
                    + dot(&self.w_hh[r * h..(r + 1) * h], &h_prev);
            }
            for (j, zv) in z.iter_mut().enumerate() {
                *zv = if (2 * h..3 * h).contains(&j) {
                    zv.tanh()
                } else {
                    sigmoid(*zv)
                };
            }
            for j in 0..h {
                let (i, f, g, o) = (z[j], z[h + j], z[2 * h + j], z[3 * h + j]);
                let c = f * c_prev[j] + i * g;
                let tc = c.tanh();
                tr.c[t * h + j] = c;
                tr.tanh_c[t * h + j] = tc;
                tr.h[t * h + j] = o * tc;
            }
            h_prev.copy_from_slice(&tr.h[t * h..(t + 1) * h]);
            c_prev.copy_from_slice(&tr.c[t * h..(t + 1) * h]);
        }
        tr
    }

    /// Backpropagation through time. `dh_out` is the loss gradient with
    /// respect to every output `h_t`; writes the input gradient into `dx`
    /// when given.
    fn backward(
        &self,
        x: &[T],
        steps: usize,
        tr: &LayerTrace<T>,
        dh_out: &[T],
        g: LayerGrad<'_, T>,
        mut dx: Option<&mut [T]>,
    ) {
        let (d, h) = (self.d, self.h);
        let g4 = 4 * h;
        let zero = vec![T::zero(); h];
        let mut dh_next = vec![T::zero(); h];
        let mut dc_next = vec![T::zero(); h];
        let mut dz = vec![T::zero(); g4];
        let one = T::one();
        for t in (0..steps).rev() {
            let gates = &tr.gates[t * g4..(t + 1) * g4];
            let (c_prev, h_prev) = if t > 0 {
                (&tr.c[(t - 1) * h..t * h], &tr.h[(t - 1) * h..t * h])
            } else {
                (&zero[..], &zero[..])
            };
            for j in 0..h {
                let (i, f, gg, o) = (gates[j], gates[h + j], gates[2 * h + j], gates[3 * h + j]);
                let dh = dh_out[t * h + j] + dh_next[j];
                let tc = tr.tanh_c[t * h + j];
                let d_o = dh * tc;
                let dc = dh * o * (one - tc * tc) + dc_next[j];
                dc_next[j] = dc * f;
                dz[j] = dc * gg * i * (one - i);
                dz[h + j] = dc * c_prev[j] * f * (one - f);
                dz[2 * h + j] = dc * i * (one - gg * gg);
                dz[3 * h + j] = d_o * o * (one - o);
            }
            let xt = &x[t * d..(t + 1) * d];
            for r in 0..g4 {
                let s = dz[r];
                axpy(&mut g.w_ih[r * d..(r + 1) * d], s, xt);
                axpy(&mut g.w_hh[r * h..(r + 1) * h], s, h_prev);
                g.b_ih[r] += s;
                g.b_hh[r] += s;
            }
            dh_next.fill(T::zero());
            for r in 0..g4 {
                axpy(&mut dh_next, dz[r], &self.w_hh[r * h..(r + 1) * h]);
            }
            if let Some(dx) = dx.as_deref_mut() {
                let dxt = &mut dx[t * d..(t + 1) * d];
                dxt.fill(T::zero());
                for r in 0..g4 {
                    axpy(dxt, dz[r], &self.w_ih[r * d..(r + 1) * d]);
                }
            }
        }
    }
}

/// Inverted-dropout scale factors (`0` or `1/(1-p)`) for every output unit
/// of both layers at every step.
#[derive(Clone, Debug, PartialEq)]
pub struct DropoutMasks<T> {
    pub layer1: Vec<T>,
    pub layer2: Vec<T>,
}

impl<T: Scalar> DropoutMasks<T> {
    pub fn sample(rate: f64, steps: usize, hidden: usize, rng: &mut Rng) -> Self {
        let keep = T::of(1.0 / (1.0 - rate));
        let mut draw = || {
            (0..steps * hidden)
                .map(|_| {
                    if rng.random::<f64>() < rate {
                        T::zero()
                    } else {
                        keep
                    }
                })
                .collect::<Vec<T>>()
        };
        let layer1 = draw();
        let layer2 = draw();
        DropoutMasks { layer1, layer2 }
    }
}

pub enum Mode<'a> {
    Eval,
    Train { dropout: f64, rng: &'a mut Rng },
}

/// One training example: `steps x input_dim` row-major features and a label.
#[derive(Clone, Copy, Debug)]
pub struct Example<'a, T> {
    pub features: &'a [T],
    pub label: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BatchOutput {
    pub mean_loss: f64,
    /// Argmax of the (train-mode) output for each example, in batch order.
    pub predictions: Vec<usize>,
}

/// Examples processed serially per work unit; fixed so the gradient
/// summation order does not depend on the worker count.
const CHUNK: usize = 4;

/// Two stacked LSTM layers and a dense softmax head, all parameters in one
/// flat buffer ordered as [`Tensor::ALL`].
#[derive(Clone, Debug, PartialEq)]
pub struct Network<T> {
    shape: Shape,
    params: Vec<T>,
}

impl<T: Scalar> Network<T> {
    pub fn zeros(shape: Shape) -> Self {
        Network {
            shape,
            params: vec![T::zero(); shape.param_count()],
        }
    }

    /// Uniform `[-1/sqrt(h), 1/sqrt(h)]` weights and biases; the forget-gate
    /// input-side bias starts at 1 and its hidden-side twin at 0.
    pub fn init(shape: Shape, rng: &mut Rng) -> Self {
        let bound = 1.0 / (shape.hidden as f64).sqrt();
        let mut net = Network {
            shape,
            params: (0..shape.param_count())
                .map(|_| T::of(rng.random_range(-bound..=bound)))
                .collect(),
        };
        let h = shape.hidden;
        for (bi, bh) in [
            (Tensor::L1BiasIh, Tensor::L1BiasHh),
            (Tensor::L2BiasIh, Tensor::L2BiasHh),
        ] {
            net.tensor_mut(bi)[h..2 * h].fill(T::one());
            net.tensor_mut(bh)[h..2 * h].fill(T::zero());
        }
        net
    }

    pub fn from_params(shape: Shape, params: Vec<T>) -> Result<Self> {
        if params.len() != shape.param_count() {
            return Err(invalid_input(format!(
                "expected {} parameters, got {}",
                shape.param_count(),
                params.len()
            )));
        }
        Ok(Network { shape, params })
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn params(&self) -> &[T] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [T] {
        &mut self.params
    }

    pub fn tensor(&self, t: Tensor) -> &[T] {
        let o = self.shape.offset(t);
        &self.params[o..o + self.shape.len(t)]
    }

    pub fn tensor_mut(&mut self, t: Tensor) -> &mut [T] {
        let o = self.shape.offset(t);
        let n = self.shape.len(t);
        &mut self.params[o..o + n]
    }

    pub fn cast<U: Scalar>(&self) -> Network<U> {
        Network {
            shape: self.shape,
            params: self
                .params
                .iter()
                .map(|x| U::of(x.to_f64().unwrap()))
                .collect(),
        }
    }

    fn layers(&self) -> (Layer<'_, T>, Layer<'_, T>, &[T], &[T]) {
        let [w1i, w1h, b1i, b1h, w2i, w2h, b2i, b2h, hw, hb] =
            split_tensors(&self.shape, &self.params);
        let h = self.shape.hidden;
        (
            Layer {
                w_ih: w1i,
                w_hh: w1h,
                b_ih: b1i,
                b_hh: b1h,
                d: self.shape.input_dim,
                h,
            },
            Layer {
                w_ih: w2i,
                w_hh: w2h,
                b_ih: b2i,
                b_hh: b2h,
                d: h,
                h,
            },
            hw,
            hb,
        )
    }

    fn steps_of(&self, features: &[T]) -> Result<usize> {
        let d = self.shape.input_dim;
        if features.is_empty() || features.len() % d != 0 {
            return Err(invalid_input(format!(
                "feature buffer of length {} is not a non-empty multiple of input_dim {d}",
                features.len()
            )));
        }
        Ok(features.len() / d)
    }

    fn head_logits(&self, head_w: &[T], head_b: &[T], last: &[T]) -> Vec<T> {
        let h = self.shape.hidden;
        head_b
            .iter()
            .enumerate()
            .map(|(k, &b)| b + dot(&head_w[k * h..(k + 1) * h], last))
            .collect()
    }

    fn run(&self, x: &[T], steps: usize, masks: Option<&DropoutMasks<T>>) -> Forward<T> {
        let h = self.shape.hidden;
        let (l1, l2, hw, hb) = self.layers();
        let tr1 = l1.forward(x, steps);
        let x2 = match masks {
            Some(m) => tr1.h.iter().zip(&m.layer1).map(|(&a, &b)| a * b).collect(),
            None => tr1.h.clone(),
        };
        let tr2 = l2.forward(&x2, steps);
        let last_raw = &tr2.h[(steps - 1) * h..steps * h];
        let last: Vec<T> = match masks {
            Some(m) => last_raw
                .iter()
                .zip(&m.layer2[(steps - 1) * h..steps * h])
                .map(|(&a, &b)| a * b)
                .collect(),
            None => last_raw.to_vec(),
        };
        let logits = self.head_logits(hw, hb, &last);
        Forward {
            tr1,
            x2,
            tr2,
            last,
            logits,
        }
    }

    /// Class logits in eval mode.
    pub fn logits(&self, features: &[T]) -> Result<Vec<T>> {
        let steps = self.steps_of(features)?;
        Ok(self.run(features, steps, None).logits)
    }

    /// Softmax class probabilities. Dropout is active only in train mode.
    pub fn forward(&self, features: &[T], mode: Mode<'_>) -> Result<Vec<T>> {
        let steps = self.steps_of(features)?;
        let masks = match mode {
            Mode::Eval => None,
            Mode::Train { dropout, rng } => (dropout > 0.0)
                .then(|| DropoutMasks::sample(dropout, steps, self.shape.hidden, rng)),
        };
        Ok(softmax(&self.run(features, steps, masks.as_ref()).logits))
    }

    /// Mean cross-entropy over the batch, evaluated with the given masks.
    pub fn loss(&self, batch: &[Example<'_, T>], masks: Option<&[DropoutMasks<T>]>) -> Result<f64> {
        let mut total = 0.0;
        for (n, ex) in batch.iter().enumerate() {
            let steps = self.steps_of(ex.features)?;
            let f = self.run(ex.features, steps, masks.map(|m| &m[n]));
            total += log_softmax_loss(&f.logits, ex.label).0.to_f64().unwrap();
        }
        Ok(total / batch.len() as f64)
    }

    fn validate_batch(&self, batch: &[Example<'_, T>], n_masks: Option<usize>) -> Result<()> {
        if batch.is_empty() {
            return Err(invalid_input("empty batch"));
        }
        if let Some(n) = n_masks {
            if n != batch.len() {
                return Err(invalid_input(format!(
                    "{n} dropout masks for {} examples",
                    batch.len()
                )));
            }
        }
        for ex in batch {
            self.steps_of(ex.features)?;
            if ex.label >= self.shape.classes {
                return Err(invalid_input(format!(
                    "label {} outside {} classes",
                    ex.label, self.shape.classes
                )));
            }
        }
        Ok(())
    }

    /// Mean-over-batch gradient of the cross-entropy loss with respect to
    /// every parameter, laid out like [`Network::params`].
    pub fn backward(
        &self,
        batch: &[Example<'_, T>],
        masks: Option<&[DropoutMasks<T>]>,
    ) -> Result<(Vec<T>, BatchOutput)> {
        self.validate_batch(batch, masks.map(<[_]>::len))?;
        if let Some(ms) = masks {
            let h = self.shape.hidden;
            for (ex, m) in batch.iter().zip(ms) {
                let need = ex.features.len() / self.shape.input_dim * h;
                if m.layer1.len() != need || m.layer2.len() != need {
                    return Err(invalid_input("dropout mask shape does not match example"));
                }
            }
        }
        Ok(self.backward_with(batch, &|n| masks.map(|m| m[n].clone())))
    }

    /// Like [`Network::backward`] but masks are produced per example index
    /// on the worker that processes it.
    pub(crate) fn backward_with(
        &self,
        batch: &[Example<'_, T>],
        mask_for: &(dyn Fn(usize) -> Option<DropoutMasks<T>> + Sync),
    ) -> (Vec<T>, BatchOutput) {
        let weight = T::of(1.0 / batch.len() as f64);
        let partials: Vec<(Vec<T>, f64, Vec<usize>)> = batch
            .par_chunks(CHUNK)
            .enumerate()
            .map(|(c, chunk)| {
                let mut grad = vec![T::zero(); self.params.len()];
                let mut loss = 0.0;
                let mut preds = Vec::with_capacity(chunk.len());
                for (k, ex) in chunk.iter().enumerate() {
                    let masks = mask_for(c * CHUNK + k);
                    let (l, p) = self.accumulate(ex, masks.as_ref(), &mut grad, weight);
                    loss += l;
                    preds.push(p);
                }
                (grad, loss, preds)
            })
            .collect();
        let mut iter = partials.into_iter();
        let (mut grad, mut loss, mut predictions) = iter.next().expect("non-empty batch");
        for (g, l, p) in iter {
            grad.iter_mut().zip(&g).for_each(|(a, &b)| *a += b);
            loss += l;
            predictions.extend(p);
        }
        (
            grad,
            BatchOutput {
                mean_loss: loss / batch.len() as f64,
                predictions,
            },
        )
    }

    /// Adds `weight * dLoss/dParams` for one example into `grad`; returns the
    /// example's loss and predicted class.
    fn accumulate(
        &self,
        ex: &Example<'_, T>,
        masks: Option<&DropoutMasks<T>>,
        grad: &mut [T],
        weight: T,
    ) -> (f64, usize) {
        let Shape {
            input_dim: _,
            hidden: h,
            classes: k,
        } = self.shape;
        let steps = ex.features.len() / self.shape.input_dim;
        let fw = self.run(ex.features, steps, masks);
        let (loss, probs) = log_softmax_loss(&fw.logits, ex.label);
        let pred = argmax(&probs);

        let (l1, l2, head_w, _) = self.layers();
        let [g1wi, g1wh, g1bi, g1bh, g2wi, g2wh, g2bi, g2bh, ghw, ghb] =
            split_tensors_mut(&self.shape, grad);

        let dlogits: Vec<T> = probs
            .iter()
            .enumerate()
            .map(|(c, &p)| (if c == ex.label { p - T::one() } else { p }) * weight)
            .collect();
        let mut dlast = vec![T::zero(); h];
        for c in 0..k {
            axpy(&mut ghw[c * h..(c + 1) * h], dlogits[c], &fw.last);
            ghb[c] += dlogits[c];
            axpy(&mut dlast, dlogits[c], &head_w[c * h..(c + 1) * h]);
        }
        if let Some(m) = masks {
            for (v, &s) in dlast.iter_mut().zip(&m.layer2[(steps - 1) * h..steps * h]) {
                *v *= s;
            }
        }

        let mut dh2 = vec![T::zero(); steps * h];
        dh2[(steps - 1) * h..].copy_from_slice(&dlast);
        let mut dx2 = vec![T::zero(); steps * h];
        l2.backward(
            &fw.x2,
            steps,
            &fw.tr2,
            &dh2,
            LayerGrad {
                w_ih: g2wi,
                w_hh: g2wh,
                b_ih: g2bi,
                b_hh: g2bh,
            },
            Some(&mut dx2),
        );
        if let Some(m) = masks {
            for (v, &s) in dx2.iter_mut().zip(&m.layer1) {
                *v *= s;
            }
        }
        l1.backward(
            ex.features,
            steps,
            &fw.tr1,
            &dx2,
            LayerGrad {
                w_ih: g1wi,
                w_hh: g1wh,
                b_ih: g1bi,
                b_hh: g1bh,
            },
            None,
        );
        (loss.to_f64().unwrap(), pred)
    }
}

struct Forward<T> {
    tr1: LayerTrace<T>,
    x2: Vec<T>,
    tr2: LayerTrace<T>,
    last: Vec<T>,
    logits: Vec<T>,
}

pub fn softmax<T: Scalar>(logits: &[T]) -> Vec<T> {
    let max = logits.iter().fold(T::neg_infinity(), |m, &x| m.max(x));
    let exps: Vec<T> = logits.iter().map(|&x| (x - max).exp()).collect();
    let sum: T = exps.iter().copied().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Fused log-softmax cross-entropy; returns `(loss, probabilities)`.
pub fn log_softmax_loss<T: Scalar>(logits: &[T], label: usize) -> (T, Vec<T>) {
    let max = logits.iter().fold(T::neg_infinity(), |m, &x| m.max(x));
    let sum: T = logits.iter().map(|&x| (x - max).exp()).sum();
    let lse = max + sum.ln();
    let probs = logits.iter().map(|&x| (x - lse).exp()).collect();
    (lse - logits[label], probs)
}

/// `-sum_k y_k log(p_k)` for a one-hot `y` on raw probabilities.
pub fn cross_entropy<T: Scalar>(probs: &[T], label: usize) -> T {
    -probs[label].ln()
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax<T: PartialOrd>(v: &[T]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate().skip(1) {
        if *x > v[best] {
            best = i;
        }
    }
    best
}
