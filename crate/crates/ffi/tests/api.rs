use std::ffi::{CStr, CString};
use std::ptr;

use switchgraph_ffi::*;

fn path_graph(n: u32) -> *mut SgGraph {
    let edges: Vec<u32> = (0..n - 1).flat_map(|i| [i, i + 1]).collect();
    let mut g = ptr::null_mut();
    let status = unsafe { sg_graph_new(n as usize, edges.as_ptr(), edges.len() / 2, &mut g) };
    assert_eq!(status, SgStatus::Ok);
    g
}

fn last_error() -> String {
    let p = sg_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn run_stream(p: *mut SgPredictor, labels: &[i8], order: &[usize]) -> Vec<i8> {
    let mut preds = Vec::new();
    for &v in order {
        let mut y = 0i8;
        assert_eq!(unsafe { sg_predict(p, v, &mut y) }, SgStatus::Ok);
        let mut mistake = -1;
        assert_eq!(unsafe { sg_update(p, labels[v], &mut mistake) }, SgStatus::Ok);
        assert_eq!(mistake, i32::from(y != labels[v]));
        preds.push(y);
    }
    preds
}

#[test]
fn graph_counts_and_spine_is_a_permutation() {
    let g = path_graph(10);
    unsafe {
        assert_eq!(sg_graph_vertex_count(g), 10);
        assert_eq!(sg_graph_edge_count(g), 9);
        let mut order = [0u32; 10];
        assert_eq!(sg_sample_spine(g, 7, order.as_mut_ptr(), order.len()), SgStatus::Ok);
        let mut sorted = order;
        sorted.sort_unstable();
        assert_eq!(sorted.to_vec(), (0..10).collect::<Vec<u32>>());
        let mut short = [0u32; 3];
        assert_eq!(sg_sample_spine(g, 7, short.as_mut_ptr(), short.len()), SgStatus::InvalidArgument);
        sg_graph_free(g);
    }
}

#[test]
fn every_learner_converges_on_a_fixed_labeling() {
    let n = 32;
    let g = path_graph(n as u32);
    let labels: Vec<i8> = (0..n).map(|v| if v < 12 { 1 } else { -1 }).collect();
    let order: Vec<usize> = (0..20).flat_map(|_| 0..n).collect();
    let mut learners = Vec::new();
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(sg_scs_new(g, SgBasis::BinaryTree as i32, 0.0, 3, 0, &mut p), SgStatus::Ok);
        learners.push(p);
        assert_eq!(sg_scs_new(g, SgBasis::Full as i32, -1.0, 3, 0, &mut p), SgStatus::Ok);
        learners.push(p);
        assert_eq!(sg_qbayes_new(g, 0.1, 0.0, 3, &mut p), SgStatus::Ok);
        learners.push(p);
        assert_eq!(sg_sgp_new(g, 10.0, &mut p), SgStatus::Ok);
        learners.push(p);
    }
    for p in learners {
        let preds = run_stream(p, &labels, &order);
        let tail = &preds[preds.len() - n..];
        assert_eq!(tail, &labels[..], "last pass should be error-free");
        assert!(unsafe { sg_mistakes(p) } > 0);
        unsafe { sg_predictor_free(p) };
    }
    unsafe { sg_graph_free(g) };
}

#[test]
fn same_seed_gives_identical_predictions() {
    let g = path_graph(64);
    let labels: Vec<i8> = (0..64).map(|v| if (v / 8) % 2 == 0 { 1 } else { -1 }).collect();
    let order: Vec<usize> = (0..500).map(|t| (t * 37 + 11) % 64).collect();
    let run = || unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(sg_scs_new(g, SgBasis::BinaryTree as i32, 0.05, 99, 0, &mut p), SgStatus::Ok);
        let preds = run_stream(p, &labels, &order);
        sg_predictor_free(p);
        preds
    };
    assert_eq!(run(), run());
    unsafe { sg_graph_free(g) };
}

#[test]
fn errors_map_to_status_codes() {
    let g = path_graph(8);
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(sg_qbayes_new(g, 0.7, 0.1, 1, &mut p), SgStatus::InvalidArgument);
        assert!(last_error().contains("theta"), "{}", last_error());
        assert_eq!(sg_scs_new(g, 9, 0.1, 1, 0, &mut p), SgStatus::InvalidArgument);
        assert_eq!(sg_scs_new(g, SgBasis::BinaryTree as i32, 1.5, 1, 0, &mut p), SgStatus::InvalidArgument);
        assert_eq!(sg_scs_new(ptr::null(), SgBasis::BinaryTree as i32, 0.1, 1, 0, &mut p), SgStatus::NullPointer);
        assert_eq!(sg_scs_new(g, SgBasis::BinaryTree as i32, 0.1, 1, 0, ptr::null_mut()), SgStatus::NullPointer);

        assert_eq!(sg_scs_new(g, SgBasis::BinaryTree as i32, 0.1, 1, 0, &mut p), SgStatus::Ok);
        assert_eq!(sg_update(p, 1, ptr::null_mut()), SgStatus::Protocol);
        let mut y = 0i8;
        assert_eq!(sg_predict(p, 8, &mut y), SgStatus::InvalidArgument);
        assert_eq!(sg_predict(p, 3, &mut y), SgStatus::Ok);
        assert_eq!(sg_update(p, 0, ptr::null_mut()), SgStatus::InvalidArgument);
        assert_eq!(sg_update(p, -1, ptr::null_mut()), SgStatus::Ok);
        sg_predictor_free(p);

        let mut bad = ptr::null_mut();
        assert_eq!(sg_graph_new(4, [0u32, 1].as_ptr(), 1, &mut bad), SgStatus::InvalidArgument);
        assert!(last_error().contains("disconnected"), "{}", last_error());
        let missing = CString::new("/nonexistent/graph.txt").unwrap();
        assert_eq!(sg_graph_from_file(missing.as_ptr(), &mut bad), SgStatus::Io);
        assert!(bad.is_null());

        sg_graph_free(ptr::null_mut());
        sg_predictor_free(ptr::null_mut());
        assert_eq!(sg_mistakes(ptr::null()), 0);
        sg_graph_free(g);
    }
    let name = unsafe { CStr::from_ptr(sg_status_name(SgStatus::Protocol as i32)) };
    assert_eq!(name.to_str().unwrap(), "protocol error");
    let unknown = unsafe { CStr::from_ptr(sg_status_name(42)) };
    assert_eq!(unknown.to_str().unwrap(), "unknown status");
}

#[test]
fn graph_file_round_trip() {
    let dir = std::env::temp_dir().join(format!("switchgraph-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("cycle.txt");
    std::fs::write(&path, "n=5\n1 2\n2 3\n3 4\n4 5\n5 1\n").unwrap();
    let c = CString::new(path.to_str().unwrap()).unwrap();
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(sg_graph_from_file(c.as_ptr(), &mut g), SgStatus::Ok);
        assert_eq!(sg_graph_vertex_count(g), 5);
        assert_eq!(sg_graph_edge_count(g), 5);
        sg_graph_free(g);
    }
    std::fs::remove_dir_all(&dir).unwrap();
}
