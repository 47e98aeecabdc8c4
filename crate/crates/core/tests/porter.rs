use qebert_core::text::stem;
use qebert_testkit::porter_pairs;

#[test]
fn matches_reference_on_frozen_fixture() {
    let pairs: Vec<_> = porter_pairs().collect();
    assert_eq!(pairs.len(), 10_000);
    let mismatches: Vec<String> = pairs
        .iter()
        .filter(|(word, want)| stem(word) != *want)
        .map(|(word, want)| format!("{word}: got {}, want {want}", stem(word)))
        .collect();
    assert!(
        mismatches.is_empty(),
        "{} mismatches, first: {:?}",
        mismatches.len(),
        &mismatches[..mismatches.len().min(20)]
    );
}
