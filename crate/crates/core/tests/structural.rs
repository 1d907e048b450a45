mod support;

use support::structural;

#[test]
fn d_squared() {
    structural::d_squared().unwrap();
}

#[test]
fn validators() {
    structural::validators().unwrap();
}

#[test]
fn maurer_cartan_iff_d_squared() {
    structural::maurer_cartan().unwrap();
}

#[test]
fn tensor_with_representables() {
    structural::tensor_free().unwrap();
}

#[test]
fn induction_restriction() {
    structural::induction_restriction().unwrap();
}

#[test]
fn kunneth() {
    structural::kunneth().unwrap();
}

#[test]
fn graded_pieces() {
    structural::graded_pieces().unwrap();
}

#[test]
fn certificates() {
    structural::certificates().unwrap();
}
