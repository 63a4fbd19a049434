use std::fs;
use std::path::Path;

use fracsize::io::read_distribution;
use num_bigint::BigInt;
use num_rational::BigRational;

fn data(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

#[test]
fn bundled_files_load_with_exact_probabilities() {
    let toss = read_distribution(&data("toss.csv")).unwrap();
    assert_eq!(toss.trades(), &[-1.0, 2.0]);
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    assert_eq!(toss.exact_probs().unwrap(), &[half.clone(), half]);

    let three = read_distribution(&data("three_outcome.json")).unwrap();
    assert_eq!(three.trades(), &[-1.0, 2.0, 3.0]);
    assert_eq!(three.probs(), &[0.5, 0.25, 0.25]);
}

#[test]
fn count_files_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let counts = dir.path().join("counts.csv");
    fs::write(&counts, "# two wins per loss\ntrade,count\n-50,1\n100,2\n").unwrap();
    let dist = read_distribution(&counts).unwrap();
    assert_eq!(dist.max_loss(), 50.0);
    assert!((dist.probs()[1] - 2.0 / 3.0).abs() < 1e-15);

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "trade,prob\n-1,0.5\n2,0.4\n").unwrap();
    assert!(read_distribution(&bad).is_err());

    let no_loss = dir.path().join("no_loss.json");
    fs::write(&no_loss, r#"{"trades":[1,2],"probs":["1/2","1/2"]}"#).unwrap();
    assert!(read_distribution(&no_loss).is_err());

    let missing = dir.path().join("missing.csv");
    let err = read_distribution(&missing).unwrap_err().to_string();
    assert!(err.contains("missing.csv"), "{err}");
}
