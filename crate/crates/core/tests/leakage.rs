mod common;

#[test]
fn test_rows_never_reach_fitted_state() {
    if let Err(e) = common::check_leakage(100) {
        panic!("{e}");
    }
}
