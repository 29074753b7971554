//! Backpropagation checked against central finite differences and the
//! closed-form softmax/cross-entropy head gradient.

mod common;

use common::{gradient_errors, random_inputs};
use radaug::nn::{DropoutMasks, Example, Network, Shape, Tensor};
use radaug::rng::substream;

fn check(
    net: &Network<f64>,
    batch: &[Example<'_, f64>],
    masks: Option<&[DropoutMasks<f64>]>,
) -> f64 {
    let mut worst = 0.0f64;
    for (t, err) in gradient_errors(net, batch, masks) {
        assert!(err < 1e-4, "{}: relative error {err:e}", t.name());
        worst = worst.max(err);
    }
    worst
}

#[test]
fn bptt_matches_finite_differences() {
    let shape = Shape::new(2, 8, 3).unwrap();
    let net: Network<f64> = Network::init(shape, &mut substream(11, &[]));
    let x0 = random_inputs(16, 2, 1);
    let x1 = random_inputs(16, 2, 2);
    let batch = [
        Example {
            features: &x0,
            label: 0,
        },
        Example {
            features: &x1,
            label: 2,
        },
    ];
    let worst = check(&net, &batch, None);
    println!("max tensor relative error {worst:e}");
}

#[test]
fn bptt_matches_finite_differences_with_dropout_masks() {
    let shape = Shape::new(2, 8, 3).unwrap();
    let net: Network<f64> = Network::init(shape, &mut substream(12, &[]));
    let x0 = random_inputs(16, 2, 3);
    let x1 = random_inputs(16, 2, 4);
    let batch = [
        Example {
            features: &x0,
            label: 1,
        },
        Example {
            features: &x1,
            label: 1,
        },
    ];
    let masks: Vec<DropoutMasks<f64>> = (0..2)
        .map(|n| DropoutMasks::sample(0.5, 16, 8, &mut substream(5, &[n])))
        .collect();
    check(&net, &batch, Some(&masks));
}

#[test]
fn single_example_batch_equals_unbatched_gradient() {
    let shape = Shape::new(2, 4, 3).unwrap();
    let net: Network<f64> = Network::init(shape, &mut substream(1, &[]));
    let x = random_inputs(6, 2, 9);
    let one = [Example {
        features: &x,
        label: 1,
    }];
    let twice = [one[0], one[0]];
    let (g1, _) = net.backward(&one, None).unwrap();
    let (g2, _) = net.backward(&twice, None).unwrap();
    for (a, b) in g1.iter().zip(&g2) {
        assert!((a - b).abs() <= 1e-15 * a.abs().max(1.0));
    }
}

#[test]
fn head_gradient_is_softmax_minus_onehot_times_last_hidden() {
    let shape = Shape::new(2, 5, 4).unwrap();
    let mut net: Network<f64> = Network::init(shape, &mut substream(2, &[]));
    // Zero head so logits are exactly the head bias.
    net.tensor_mut(Tensor::HeadWeight).fill(0.0);
    net.tensor_mut(Tensor::HeadBias)
        .copy_from_slice(&[0.3, -0.2, 0.1, 0.0]);
    let x = random_inputs(7, 2, 3);
    let label = 2;
    let (g, _) = net
        .backward(
            &[Example {
                features: &x,
                label,
            }],
            None,
        )
        .unwrap();

    // last hidden state: copy of the network with a one-hot-probing head
    let mut probe = net.clone();
    let mut last = vec![0.0; 5];
    for j in 0..5 {
        probe.tensor_mut(Tensor::HeadWeight).fill(0.0);
        probe.tensor_mut(Tensor::HeadBias).fill(0.0);
        probe.tensor_mut(Tensor::HeadWeight)[j] = 1.0;
        last[j] = probe.logits(&x).unwrap()[0];
    }
    let logits = [0.3f64, -0.2, 0.1, 0.0];
    let z: f64 = logits.iter().map(|v| v.exp()).sum();
    let shape = net.shape();
    let hw = &g[shape.offset(Tensor::HeadWeight)..][..20];
    let hb = &g[shape.offset(Tensor::HeadBias)..][..4];
    for k in 0..4 {
        let dk = logits[k].exp() / z - if k == label { 1.0 } else { 0.0 };
        assert!((hb[k] - dk).abs() < 1e-14);
        for j in 0..5 {
            assert!((hw[k * 5 + j] - dk * last[j]).abs() < 1e-14);
        }
    }
}

#[test]
fn shape_mismatch_is_an_error() {
    let net: Network<f64> = Network::zeros(Shape::new(2, 3, 2).unwrap());
    let odd = vec![0.0; 5];
    assert!(net
        .backward(
            &[Example {
                features: &odd,
                label: 0
            }],
            None
        )
        .is_err());
    let ok = vec![0.0; 4];
    assert!(net
        .backward(
            &[Example {
                features: &ok,
                label: 2
            }],
            None
        )
        .is_err());
    assert!(net.backward(&[], None).is_err());
}
