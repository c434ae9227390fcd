use qsignal_wasm::{collapse_points, contrast_points, trajectory_points};

#[test]
fn plus_state_trajectory() {
    let v = trajectory_points(1, "plus", 1.0, 1.0, 1, 0).unwrap();
    assert_eq!(v.len(), 7);
    assert_eq!(v[3], 1.0);
    assert!((v[4] - 0.567_667_641_618_306).abs() < 1e-12);
    assert!((v[5] - 0.900_045_591_523_535).abs() < 1e-9);
    assert!((v[6] - 1.5f64.log2()).abs() < 1e-12);
}

#[test]
fn contrast_rows() {
    let v = contrast_points(2, 4, 20, 7, "length").unwrap();
    assert_eq!(v.len(), 12);
    for row in v.chunks(4) {
        assert_eq!(row[3], row[0]);
        assert!(row[1] < 3.0);
    }
}

#[test]
fn collapse_rows_are_n_minus_c() {
    let v = collapse_points(4, 5, 1, "length").unwrap();
    for row in v.chunks(3) {
        assert_eq!(row[1], 4.0 - row[0]);
    }
}

#[test]
fn demo_limits() {
    assert!(contrast_points(2, 11, 5, 1, "length").is_err());
    assert!(collapse_points(3, 5, 1, "tiny").is_err());
    assert!(trajectory_points(1, "bogus", 1.0, 1.0, 4, 0).is_err());
}
