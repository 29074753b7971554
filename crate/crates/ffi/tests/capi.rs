use std::ffi::{CStr, CString};
use std::ptr;

use radaug::nn::{Model, Network, Shape};
use radaug::rng::substream;
use radaug_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = radaug_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn param_counts() {
    assert_eq!(radaug_count_params(128, 11), 201_099);
    assert_eq!(radaug_count_params(64, 11), 51_403);
}

#[test]
fn dataset_generate_save_load_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = c(dir.path().join("d.rsig").to_str().unwrap());
    unsafe {
        let mut ds = ptr::null_mut();
        let st = radaug_dataset_generate(c("bpsk,qpsk").as_ptr(), c("10:10:2").as_ptr(), 5, 64, 1, &mut ds);
        assert_eq!(st, RadaugStatus::Ok);
        assert_eq!(radaug_dataset_len(ds), 10);
        assert_eq!(radaug_dataset_seq_len(ds), 64);
        assert_eq!(radaug_dataset_save(ds, path.as_ptr()), RadaugStatus::Ok);

        let mut back = ptr::null_mut();
        assert_eq!(radaug_dataset_load(path.as_ptr(), &mut back), RadaugStatus::Ok);
        let mut a = vec![0f32; 128];
        let mut b = vec![0f32; 128];
        let (mut la, mut sa, mut lb, mut sb) = (0u8, 0i8, 0u8, 0i8);
        for i in 0..10 {
            assert_eq!(radaug_dataset_frame(ds, i, a.as_mut_ptr(), a.len(), &mut la, &mut sa), RadaugStatus::Ok);
            assert_eq!(radaug_dataset_frame(back, i, b.as_mut_ptr(), b.len(), &mut lb, &mut sb), RadaugStatus::Ok);
            assert_eq!(a, b);
            assert_eq!((la, sa), (lb, sb));
            assert_eq!(sa, 10);
        }
        assert_eq!(
            radaug_dataset_frame(ds, 10, a.as_mut_ptr(), a.len(), &mut la, &mut sa),
            RadaugStatus::InvalidArgument
        );
        assert_eq!(
            radaug_dataset_frame(ds, 0, a.as_mut_ptr(), 127, &mut la, &mut sa),
            RadaugStatus::BufferTooSmall
        );
        radaug_dataset_free(ds);
        radaug_dataset_free(back);
        radaug_dataset_free(ptr::null_mut());
    }
}

#[test]
fn errors_set_message() {
    unsafe {
        let mut ds = ptr::null_mut();
        let st = radaug_dataset_generate(c("bogus").as_ptr(), c("0").as_ptr(), 1, 16, 0, &mut ds);
        assert_eq!(st, RadaugStatus::InvalidArgument);
        assert!(last_error().contains("bogus"));
        assert!(ds.is_null());

        let st = radaug_dataset_load(c("/nonexistent/x.rsig").as_ptr(), &mut ds);
        assert_eq!(st, RadaugStatus::Io);
        assert_eq!(radaug_dataset_load(ptr::null(), &mut ds), RadaugStatus::NullPointer);
        assert_eq!(radaug_dataset_len(ptr::null()), 0);
    }
}

#[test]
fn model_predictions_match_library() {
    let dir = tempfile::tempdir().unwrap();
    let net = Network::init(Shape::new(2, 6, 3).unwrap(), &mut substream(3, &[]));
    let model = Model::new(net, vec!["a".into(), "b".into(), "c".into()], "test").unwrap();
    let path = dir.path().join("m.rmdl");
    model.save(&path).unwrap();
    let iq: Vec<f32> = (0..32).map(|i| ((i * 7 % 11) as f32 - 5.0) / 5.0).collect();
    let frame = radaug::signal::SignalFrame::from_interleaved(&iq).unwrap();
    let (want_class, want) = radaug::experiments::predict(&model, &frame).unwrap();

    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(radaug_model_load(c(path.to_str().unwrap()).as_ptr(), &mut m), RadaugStatus::Ok);
        assert_eq!(radaug_model_num_classes(m), 3);
        let mut probs = [0f64; 3];
        let mut class = usize::MAX;
        let st = radaug_model_predict(m, iq.as_ptr(), 16, probs.as_mut_ptr(), 3, &mut class);
        assert_eq!(st, RadaugStatus::Ok);
        assert_eq!(class, want_class);
        assert_eq!(probs.to_vec(), want);

        // the identity policy must reproduce plain prediction exactly
        let mut tta = [0f64; 3];
        let st = radaug_model_predict_tta(m, iq.as_ptr(), 16, c("none").as_ptr(), 9, tta.as_mut_ptr(), 3, ptr::null_mut());
        assert_eq!(st, RadaugStatus::Ok);
        assert_eq!(tta, probs);

        let st = radaug_model_predict_tta(m, iq.as_ptr(), 16, c("rotation").as_ptr(), 9, tta.as_mut_ptr(), 3, &mut class);
        assert_eq!(st, RadaugStatus::Ok);
        assert!((tta.iter().sum::<f64>() - 1.0).abs() < 1e-6);

        assert_eq!(
            radaug_model_predict(m, iq.as_ptr(), 16, probs.as_mut_ptr(), 2, &mut class),
            RadaugStatus::BufferTooSmall
        );
        radaug_model_free(m);
    }
}

#[test]
fn augment_frame_writes_all_variants() {
    let iq = [1.0f32, 2.0, -3.0, 0.5];
    unsafe {
        assert_eq!(radaug_policy_scale_factor(c("joint").as_ptr()), 6);
        assert_eq!(radaug_policy_scale_factor(c("flip").as_ptr()), 4);
        assert_eq!(radaug_policy_scale_factor(c("nope").as_ptr()), 0);
        let mut out = [0f32; 16];
        let st = radaug_augment_frame(iq.as_ptr(), 2, c("rotation").as_ptr(), 0, out.as_mut_ptr(), 16);
        assert_eq!(st, RadaugStatus::Ok);
        // 0, 90, 180, 270 degrees: (i, q) -> (i, q), (-q, i), (-i, -q), (q, -i)
        assert_eq!(
            out,
            [1.0, 2.0, -3.0, 0.5, -2.0, 1.0, -0.5, -3.0, -1.0, -2.0, 3.0, -0.5, 2.0, -1.0, 0.5, 3.0]
        );
        let st = radaug_augment_frame(iq.as_ptr(), 2, c("rotation").as_ptr(), 0, out.as_mut_ptr(), 15);
        assert_eq!(st, RadaugStatus::BufferTooSmall);
    }
}
